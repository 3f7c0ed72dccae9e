//! Gale duality and the Horn-Kapranov parametrization.
//!
//! Diagnostic only: the certificate needs nothing from here, but the entropy
//! estimate behind it is checkable with these functions.

use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::hnf::IntMatrix;
use crate::lattice::CayleyConfig;

/// `m x (m - rank)` integer matrix whose columns span the integer kernel of
/// the homogenized configuration matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaleDual {
    rows: Vec<Vec<i64>>,
    cols: usize,
}

impl GaleDual {
    /// Row `b(i)` for Cayley point `i`.
    pub fn row(&self, i: usize) -> &[i64] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    pub fn m(&self) -> usize {
        self.rows.len()
    }

    /// Codimension `m - rank`.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// `B * zeta`, i.e. the values `<b(i), zeta>`.
    pub fn apply(&self, zeta: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|b| b.iter().zip(zeta).map(|(&bi, z)| bi as f64 * z).sum())
            .collect()
    }
}

pub fn gale_dual(config: &CayleyConfig) -> Result<GaleDual> {
    let hom = IntMatrix::from_rows(&config.homogenized());
    let expected = config.n() + config.blocks();
    let (basis, rank) = crate::hnf::integer_kernel(&hom);
    if rank < expected {
        return Err(Error::DegenerateConfiguration { rank, expected });
    }
    let cols = basis.len();
    let m = config.m();
    let mut rows = vec![vec![0i64; cols]; m];
    for (c, v) in basis.iter().enumerate() {
        for (r, x) in v.iter().enumerate() {
            rows[r][c] = x.to_i64().ok_or(Error::Overflow)?;
        }
    }
    Ok(GaleDual { rows, cols })
}

fn products(b: &GaleDual, zeta: &[f64]) -> Result<Vec<f64>> {
    assert_eq!(zeta.len(), b.cols(), "direction has the wrong length");
    let scale = zeta.iter().map(|z| z.abs()).fold(0.0, f64::max);
    let values = b.apply(zeta);
    for (i, (v, row)) in values.iter().zip(b.rows()).enumerate() {
        // zero rows contribute 0 * log 0 = 0
        if row.iter().all(|&x| x == 0) {
            continue;
        }
        let row_norm: f64 = row.iter().map(|&x| (x as f64).abs()).sum();
        if v.abs() <= 1e-12 * row_norm * scale {
            return Err(Error::SingularDirection { row: i });
        }
    }
    Ok(values)
}

fn xlogx(v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v * v.abs().ln()
    }
}

/// `phi(zeta) = sum_i b(i) log|<b(i), zeta>|`.
pub fn horn_kapranov(b: &GaleDual, zeta: &[f64]) -> Result<Vec<f64>> {
    let values = products(b, zeta)?;
    let mut out = vec![0.0; b.cols()];
    for (row, v) in b.rows().iter().zip(&values) {
        if *v == 0.0 {
            continue;
        }
        let l = v.abs().ln();
        for (o, &bi) in out.iter_mut().zip(row) {
            *o += bi as f64 * l;
        }
    }
    Ok(out)
}

/// Offset of the supporting hyperplane `<zeta, x> = sum <b(i),zeta> log|<b(i),zeta>|`.
pub fn supporting_hyperplane_offset(b: &GaleDual, zeta: &[f64]) -> Result<f64> {
    Ok(products(b, zeta)?.into_iter().map(xlogx).sum())
}

/// `(1/2) |B zeta|_1 log m`, the bound on the absolute offset.
pub fn entropy_bound(b: &GaleDual, zeta: &[f64]) -> f64 {
    let l1: f64 = b.apply(zeta).iter().map(|v| v.abs()).sum();
    0.5 * l1 * (b.m() as f64).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_cayley, SupportSystem};

    fn quadratic_config() -> CayleyConfig {
        let sys = SupportSystem::from_raw(vec![vec![vec![0], vec![1], vec![2]]], vec![vec![1.0; 3]]).unwrap();
        build_cayley(&sys).unwrap()
    }

    #[test]
    fn quadratic_gale_dual() {
        let b = gale_dual(&quadratic_config()).unwrap();
        assert_eq!(b.cols(), 1);
        let col: Vec<i64> = b.rows().iter().map(|r| r[0]).collect();
        assert!(col == vec![1, -2, 1] || col == vec![-1, 2, -1]);
    }

    #[test]
    fn horn_kapranov_quadratic() {
        let b = GaleDual { rows: vec![vec![1], vec![-2], vec![1]], cols: 1 };
        let phi = horn_kapranov(&b, &[1.0]).unwrap();
        assert!((phi[0] + 2.0 * 2f64.ln()).abs() < 1e-15);
        let off = supporting_hyperplane_offset(&b, &[1.0]).unwrap();
        assert!((off + 2.0 * 2f64.ln()).abs() < 1e-15);
        let phi2 = horn_kapranov(&b, &[2.0]).unwrap();
        assert!((phi2[0] - phi[0]).abs() < 1e-14);
    }

    #[test]
    fn codimension_zero() {
        let sys = SupportSystem::from_raw(
            vec![vec![vec![0, 0], vec![1, 0]], vec![vec![0, 0], vec![0, 1]]],
            vec![vec![1.0, 1.0], vec![1.0, 1.0]],
        )
        .unwrap();
        let b = gale_dual(&build_cayley(&sys).unwrap()).unwrap();
        assert_eq!(b.cols(), 0);
        assert_eq!(b.m(), 4);
    }

    #[test]
    fn degenerate_configuration() {
        // both supports on the x-axis
        let sys = SupportSystem::from_raw(
            vec![vec![vec![0, 0], vec![1, 0]], vec![vec![0, 0], vec![2, 0]]],
            vec![vec![1.0, 1.0], vec![1.0, 1.0]],
        )
        .unwrap();
        let r = gale_dual(&build_cayley(&sys).unwrap());
        assert!(matches!(r, Err(Error::DegenerateConfiguration { .. })));
    }

    #[test]
    fn singular_direction() {
        let b = GaleDual { rows: vec![vec![1, 0], vec![0, 1], vec![-1, -1]], cols: 2 };
        let r = horn_kapranov(&b, &[1.0, -1.0]);
        assert_eq!(r, Err(Error::SingularDirection { row: 2 }));
    }
}
