//! Mixed cells of the regular subdivision of a Cayley configuration and the
//! circuit inequalities cutting out their mixed-cell cone.
//!
//! Conventions. A lifting `omega` induces the subdivision whose cells are the
//! projections of the *upper* faces of the lifted points `(a, omega(a))`. A
//! choice of one edge `{p, q}` per support is a mixed cell iff there is a
//! vector `nu` such that, in every support, `<nu, a> - omega(a)` attains its
//! minimum exactly on `p` and `q`. That `nu` is stored as the cell normal; it
//! is also the leading exponent of the real Puiseux branch the cell starts
//! (see the tracker).
//!
//! Enumeration is exhaustive over all edge tuples; each candidate costs one
//! exact `n x n` adjugate, so this is meant for desk-scale systems.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hnf::IntMatrix;
use crate::lattice::{CayleyConfig, Lifting};

/// Relative tolerance below which an exclusion margin counts as a tie.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedCell {
    /// One pair of global Cayley indices per support, in support order.
    pub edges: Vec<(usize, usize)>,
    pub normal: Vec<f64>,
    /// `|det|` of the edge difference vectors.
    pub volume: u64,
}

impl MixedCell {
    /// Edge difference rows `a_p - a_q`.
    pub fn exponent_matrix(&self, config: &CayleyConfig) -> Vec<Vec<i64>> {
        self.edges
            .iter()
            .map(|&(p, q)| {
                config
                    .exponent(p)
                    .iter()
                    .zip(config.exponent(q))
                    .map(|(a, b)| a - b)
                    .collect()
            })
            .collect()
    }

    pub fn contains(&self, point: usize) -> bool {
        self.edges.iter().any(|&(p, q)| p == point || q == point)
    }

    /// Edges as (support-local) index pairs.
    pub fn local_edges(&self, config: &CayleyConfig) -> Vec<(usize, usize)> {
        let o = config.origin_index();
        self.edges.iter().map(|&(p, q)| (o[p], o[q])).collect()
    }
}

/// A linear inequality `<coeffs, omega> > 0` on liftings, supported on a
/// circuit of the Cayley configuration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitInequality {
    /// Sparse primitive integer vector over Cayley indices.
    pub coeffs: Vec<(usize, i64)>,
    /// The point whose exclusion from the cell this circuit decides.
    pub witness: usize,
    /// Index of the originating cell in its [`MixedCellSet`].
    pub cell: usize,
}

impl CircuitInequality {
    pub fn dot(&self, values: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(i, c)| c as f64 * values[i]).sum()
    }

    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|&(_, c)| c.unsigned_abs() as f64).sum()
    }

    pub fn nonzeros(&self) -> usize {
        self.coeffs.len()
    }

    /// Dense form over `m` points.
    pub fn dense(&self, m: usize) -> Vec<i64> {
        let mut v = vec![0; m];
        for &(i, c) in &self.coeffs {
            v[i] = c;
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixedCellSet {
    pub cells: Vec<MixedCell>,
    pub inequalities: Vec<CircuitInequality>,
    pub lifting: Lifting,
}

impl MixedCellSet {
    pub fn total_volume(&self) -> u64 {
        self.cells.iter().map(|c| c.volume).sum()
    }

    /// Inequalities belonging to cell `k`.
    pub fn inequalities_of(&self, k: usize) -> impl Iterator<Item = &CircuitInequality> {
        self.inequalities.iter().filter(move |q| q.cell == k)
    }
}

enum Candidate {
    Cell(MixedCell),
    Rejected,
    Tie(Error),
}

/// All mixed cells induced by `lifting`, with the circuit inequalities of
/// every cell.
pub fn enumerate_mixed_cells(config: &CayleyConfig, lifting: &Lifting) -> Result<MixedCellSet> {
    if lifting.len() != config.m() {
        return Err(Error::InvalidSystem(format!(
            "lifting has {} values for {} points",
            lifting.len(),
            config.m()
        )));
    }
    let k = config.blocks();
    if k != config.n() {
        return Err(Error::NonSquare { supports: k, dim: config.n() });
    }
    for b in 0..k {
        if config.block_range(b).len() < 2 {
            return Err(Error::EmptySupport { block: b });
        }
    }

    let candidates = edge_tuples(config);
    let check = |edges: &Vec<(usize, usize)>| check_candidate(config, lifting.values(), edges);

    #[cfg(feature = "parallel")]
    let outcomes: Vec<Candidate> = {
        use rayon::prelude::*;
        candidates.par_iter().map(check).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let outcomes: Vec<Candidate> = candidates.iter().map(check).collect();

    let mut cells = Vec::new();
    for outcome in outcomes {
        match outcome {
            Candidate::Cell(c) => cells.push(c),
            Candidate::Rejected => {}
            Candidate::Tie(e) => return Err(e),
        }
    }
    cells.sort_by(|a, b| a.edges.cmp(&b.edges));

    let mut inequalities = Vec::new();
    for (idx, cell) in cells.iter().enumerate() {
        for mut q in circuit_inequalities(cell, config)? {
            q.cell = idx;
            inequalities.push(q);
        }
    }
    Ok(MixedCellSet { cells, inequalities, lifting: lifting.clone() })
}

/// Every choice of one unordered pair per block, lexicographic.
fn edge_tuples(config: &CayleyConfig) -> Vec<Vec<(usize, usize)>> {
    let mut out: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
    for b in 0..config.blocks() {
        let r = config.block_range(b);
        let pairs: Vec<(usize, usize)> = r
            .clone()
            .flat_map(|p| (p + 1..r.end).map(move |q| (p, q)))
            .collect();
        out = out
            .into_iter()
            .flat_map(|prefix| {
                pairs.iter().map(move |&e| {
                    let mut v = prefix.clone();
                    v.push(e);
                    v
                })
            })
            .collect();
    }
    out
}

fn check_candidate(config: &CayleyConfig, omega: &[f64], edges: &[(usize, usize)]) -> Candidate {
    let n = config.n();
    let rows: Vec<Vec<i64>> = edges
        .iter()
        .map(|&(p, q)| {
            config
                .exponent(p)
                .iter()
                .zip(config.exponent(q))
                .map(|(a, b)| a - b)
                .collect()
        })
        .collect();
    let d = IntMatrix::from_rows(&rows);
    let det = d.det();
    if det.is_zero() {
        return Candidate::Rejected;
    }
    // gamma solves <gamma, a_p - a_q> = omega_q - omega_p, so that
    // <gamma, a> + omega(a) agrees on both edge points
    let adj = d.adjugate();
    let det_f = det.to_f64().unwrap_or(f64::INFINITY);
    let rhs: Vec<f64> = edges.iter().map(|&(p, q)| omega[q] - omega[p]).collect();
    let gamma: Vec<f64> = (0..n)
        .map(|r| {
            (0..n)
                .map(|c| adj[(r, c)].to_f64().unwrap_or(f64::INFINITY) * rhs[c])
                .sum::<f64>()
                / det_f
        })
        .collect();
    let lifted = |p: usize| -> f64 {
        config
            .exponent(p)
            .iter()
            .zip(&gamma)
            .map(|(&a, g)| a as f64 * g)
            .sum::<f64>()
            + omega[p]
    };

    let mut tie: Option<(usize, f64)> = None;
    for (b, &(p, q)) in edges.iter().enumerate() {
        let top = lifted(p);
        let top_q = lifted(q);
        for alpha in config.block_range(b) {
            if alpha == p || alpha == q {
                continue;
            }
            let v = lifted(alpha);
            let margin = top - v;
            let scale = 1.0 + top.abs().max(top_q.abs()).max(v.abs());
            let tol = TIE_TOLERANCE * scale;
            if margin < -tol {
                return Candidate::Rejected;
            }
            if margin.abs() <= tol && tie.is_none() {
                tie = Some((alpha, margin));
            }
        }
    }
    if let Some((point, margin)) = tie {
        return Candidate::Tie(Error::TieDegenerate { edges: edges.to_vec(), point, margin });
    }
    let volume = det.abs().to_u64().unwrap_or(u64::MAX);
    Candidate::Cell(MixedCell {
        edges: edges.to_vec(),
        normal: gamma.into_iter().map(|g| -g).collect(),
        volume,
    })
}

/// One circuit inequality per Cayley point outside the cell.
///
/// For a point `alpha` of support `j`, write
/// `alpha = (1 - mu_j) a_{q_j} + mu_j a_{p_j} + sum_{i != j} mu_i (a_{p_i} - a_{q_i})`,
/// the unique affine dependency between `alpha` and the cell vertices. The
/// inequality says the lifted `alpha` lies strictly below the lifted cell:
/// `(1 - mu_j) w_{q_j} + mu_j w_{p_j} + sum mu_i (w_{p_i} - w_{q_i}) - w_alpha > 0`,
/// scaled to a primitive integer vector.
pub fn circuit_inequalities(cell: &MixedCell, config: &CayleyConfig) -> Result<Vec<CircuitInequality>> {
    let n = config.n();
    if cell.edges.len() != n {
        return Err(Error::InvalidSystem("cell must have one edge per support".into()));
    }
    for (b, &(p, q)) in cell.edges.iter().enumerate() {
        let r = config.block_range(b);
        if p == q || !r.contains(&p) || !r.contains(&q) {
            return Err(Error::InvalidSystem(format!("edge {b} of cell is not in support {b}")));
        }
    }
    let d = IntMatrix::from_rows(&cell.exponent_matrix(config));
    let dt = d.transpose();
    let mut out = Vec::new();
    for alpha in 0..config.m() {
        if cell.contains(alpha) {
            continue;
        }
        let j = config.block()[alpha];
        let (_, qj) = cell.edges[j];
        let target: Vec<BigInt> = config
            .exponent(alpha)
            .iter()
            .zip(config.exponent(qj))
            .map(|(a, b)| BigInt::from(a - b))
            .collect();
        let mu = dt.solve_rational(&target).ok_or(Error::SingularExponentMatrix)?;

        let mut dense: Vec<(usize, BigRational)> = Vec::with_capacity(2 * n + 1);
        for (i, &(p, q)) in cell.edges.iter().enumerate() {
            if i == j {
                dense.push((p, mu[i].clone()));
                dense.push((q, BigRational::one() - &mu[i]));
            } else {
                dense.push((p, mu[i].clone()));
                dense.push((q, -mu[i].clone()));
            }
        }
        dense.push((alpha, -BigRational::one()));
        out.push(CircuitInequality { coeffs: primitive(dense)?, witness: alpha, cell: 0 });
    }
    Ok(out)
}

fn primitive(entries: Vec<(usize, BigRational)>) -> Result<Vec<(usize, i64)>> {
    let lcm = entries
        .iter()
        .fold(BigInt::one(), |acc, (_, r)| acc.lcm(r.denom()));
    let ints: Vec<(usize, BigInt)> = entries
        .into_iter()
        .filter(|(_, r)| !r.is_zero())
        .map(|(i, r)| (i, (r * BigRational::from(lcm.clone())).to_integer()))
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, (_, v)| acc.gcd(v));
    let mut out: Vec<(usize, i64)> = ints
        .into_iter()
        .map(|(i, v)| (&v / &g).to_i64().map(|v| (i, v)).ok_or(Error::Overflow))
        .collect::<Result<_>>()?;
    out.sort_unstable_by_key(|&(i, _)| i);
    Ok(out)
}

/// `2^{n+1} * C(tn - n, n)`, an upper bound on the number of real zeros of a
/// patchworked system with at most `t` terms per equation.
///
/// Panics unless `n >= 1` and `t >= 2`.
pub fn mixed_cell_count_bound(n: usize, t: usize) -> BigUint {
    assert!(n >= 1 && t >= 2, "need n >= 1 and t >= 2");
    let top = t * n - n;
    let mut binom = BigUint::one();
    for i in 0..n {
        binom = binom * BigUint::from(top - i) / BigUint::from(i + 1);
    }
    (BigUint::one() << (n + 1)) * binom
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_cayley, SupportSystem};

    fn univariate(points: &[i64], omega: &[f64]) -> (CayleyConfig, Lifting) {
        let sys = SupportSystem::from_raw(
            vec![points.iter().map(|&p| vec![p]).collect()],
            vec![vec![1.0; points.len()]],
        )
        .unwrap();
        (build_cayley(&sys).unwrap(), Lifting::new(omega.to_vec()).unwrap())
    }

    #[test]
    fn single_edge_univariate() {
        let (cfg, l) = univariate(&[0, 1], &[0.3, -1.2]);
        let set = enumerate_mixed_cells(&cfg, &l).unwrap();
        assert_eq!(set.cells.len(), 1);
        let c = &set.cells[0];
        assert_eq!(c.edges, vec![(0, 1)]);
        assert_eq!(c.volume, 1);
        // nu = omega(1) - omega(0) makes <nu,a> - omega(a) equal on {0,1};
        // equivalently gamma = omega(0) - omega(1)
        assert!((c.normal[0] - (-1.2 - 0.3)).abs() < 1e-15);
        assert!(set.inequalities.is_empty());
    }

    #[test]
    fn middle_point_below_chord() {
        // omega_1 small: the middle point is not on the upper hull
        let (cfg, l) = univariate(&[0, 1, 2], &[0.0, -5.0, 0.0]);
        let set = enumerate_mixed_cells(&cfg, &l).unwrap();
        assert_eq!(set.cells.len(), 1);
        assert_eq!(set.cells[0].edges, vec![(0, 2)]);
        assert_eq!(set.cells[0].volume, 2);
        assert_eq!(set.inequalities.len(), 1);
        assert_eq!(set.inequalities[0].dense(3), vec![1, -2, 1]);
        assert!(set.inequalities[0].dot(l.values()) > 0.0);
    }

    #[test]
    fn middle_point_above_chord() {
        let (cfg, l) = univariate(&[0, 1, 2], &[0.0, 10f64.ln(), 0.0]);
        let set = enumerate_mixed_cells(&cfg, &l).unwrap();
        let edges: Vec<_> = set.cells.iter().map(|c| c.edges.clone()).collect();
        assert_eq!(edges, vec![vec![(0, 1)], vec![(1, 2)]]);
        for q in &set.inequalities {
            assert_eq!(q.dense(3), vec![-1, 2, -1]);
            assert!(q.dot(l.values()) > 0.0);
        }
    }

    #[test]
    fn equal_lifting_on_circuit_is_a_tie() {
        let (cfg, l) = univariate(&[0, 1, 2], &[0.0, 0.0, 0.0]);
        let r = enumerate_mixed_cells(&cfg, &l);
        assert!(matches!(r, Err(Error::TieDegenerate { .. })), "{r:?}");
    }

    #[test]
    fn short_support_is_rejected() {
        let sys = SupportSystem::from_raw(
            vec![vec![vec![0, 0]], vec![vec![0, 0], vec![1, 1]]],
            vec![vec![1.0], vec![1.0, 1.0]],
        )
        .unwrap();
        let cfg = build_cayley(&sys).unwrap();
        let l = Lifting::new(vec![0.0; 3]).unwrap();
        assert_eq!(enumerate_mixed_cells(&cfg, &l), Err(Error::EmptySupport { block: 0 }));
    }

    #[test]
    fn count_bound_values() {
        assert_eq!(mixed_cell_count_bound(2, 8), BigUint::from(728u32));
        assert_eq!(mixed_cell_count_bound(1, 2), BigUint::from(4u32));
        assert_eq!(mixed_cell_count_bound(2, 3), BigUint::from(48u32));
    }

    #[test]
    fn circuit_rejects_foreign_edge() {
        let (cfg, _) = univariate(&[0, 1, 2], &[0.0, 1.0, 0.0]);
        let bad = MixedCell { edges: vec![(0, 0)], normal: vec![0.0], volume: 1 };
        assert!(circuit_inequalities(&bad, &cfg).is_err());
    }
}
