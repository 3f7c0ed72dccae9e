//! Effective patchworking test.
//!
//! For generators `zeta(1..L)` of the dual mixed-cell cone, the system is
//! patchworked when `<Log|C|, zeta(i)> > log(m) * |zeta(i)|_1` for every `i`,
//! with `m` the number of Cayley points. Failing the test is inconclusive.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{build_cayley, log_abs_lifting, Lifting, SupportSystem};
use crate::mixed_cells::{enumerate_mixed_cells, CircuitInequality, MixedCellSet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    /// `<omega, zeta(i)> - log(m) |zeta(i)|_1`, in inequality order.
    pub margins: Vec<f64>,
    pub pass: bool,
    pub m: usize,
    /// No inequalities at all (every support is a binomial); passes trivially.
    pub vacuous: bool,
}

impl Certificate {
    pub fn min_margin(&self) -> Option<f64> {
        self.margins.iter().copied().reduce(f64::min)
    }

    /// Margins sorted ascending.
    pub fn sorted_margins(&self) -> Vec<f64> {
        let mut v = self.margins.clone();
        v.sort_by(f64::total_cmp);
        v
    }
}

pub fn certify(lifting: &Lifting, inequalities: &[CircuitInequality], m: usize) -> Result<Certificate> {
    if inequalities.is_empty() {
        return Err(Error::EmptyInequalities);
    }
    let log_m = (m as f64).ln();
    let margins: Vec<f64> = inequalities
        .iter()
        .map(|q| q.dot(lifting.values()) - log_m * q.l1_norm())
        .collect();
    let pass = margins.iter().all(|&v| v > 0.0);
    Ok(Certificate { margins, pass, m, vacuous: false })
}

/// Lifting by `Log|C|`, mixed cells, then [`certify`]. A system without any
/// inequality (all binomials) passes vacuously.
pub fn certify_system(system: &SupportSystem) -> Result<(Certificate, MixedCellSet)> {
    let config = build_cayley(system)?;
    let lifting = log_abs_lifting(system)?;
    let cells = enumerate_mixed_cells(&config, &lifting)?;
    let cert = if cells.inequalities.is_empty() {
        Certificate { margins: Vec::new(), pass: true, m: config.m(), vacuous: true }
    } else {
        certify(&lifting, &cells.inequalities, config.m())?
    };
    Ok((cert, cells))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadratic(c: [f64; 3]) -> SupportSystem {
        SupportSystem::from_raw(vec![vec![vec![0], vec![1], vec![2]]], vec![c.to_vec()]).unwrap()
    }

    #[test]
    fn quadratic_pass_and_fail() {
        let (cert, _) = certify_system(&quadratic([1.0, 10.0, 1.0])).unwrap();
        assert!(cert.pass);
        assert_eq!(cert.m, 3);
        let want = 2.0 * 10f64.ln() - 4.0 * 3f64.ln();
        for v in &cert.margins {
            assert!((v - want).abs() < 1e-14);
        }

        let (cert, _) = certify_system(&quadratic([1.0, 3.0, 1.0])).unwrap();
        assert!(!cert.pass);
        assert!((cert.min_margin().unwrap() + 9f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn signs_do_not_matter() {
        let (a, _) = certify_system(&quadratic([1.0, 10.0, 1.0])).unwrap();
        let (b, _) = certify_system(&quadratic([-1.0, 10.0, 1.0])).unwrap();
        let (c, _) = certify_system(&quadratic([1.0, -10.0, -1.0])).unwrap();
        assert_eq!(a.margins, b.margins);
        assert_eq!(a.margins, c.margins);
    }

    #[test]
    fn empty_inequalities_error() {
        let l = Lifting::new(vec![0.0, 1.0]).unwrap();
        assert_eq!(certify(&l, &[], 2), Err(Error::EmptyInequalities));
    }

    #[test]
    fn binomial_passes_vacuously() {
        let sys = SupportSystem::from_raw(vec![vec![vec![0], vec![1]]], vec![vec![2.0, -3.0]]).unwrap();
        let (cert, cells) = certify_system(&sys).unwrap();
        assert!(cert.pass && cert.vacuous);
        assert!(cert.margins.is_empty());
        assert_eq!(cells.cells.len(), 1);
    }

    #[test]
    fn scaling_the_lifting_keeps_a_pass() {
        let sys = quadratic([1.0, 10.0, 1.0]);
        let (cert, cells) = certify_system(&sys).unwrap();
        assert!(cert.pass);
        for s in [1.0, 1.5, 3.0, 10.0] {
            let scaled = cells.lifting.scaled(s);
            let c = certify(&scaled, &cells.inequalities, cert.m).unwrap();
            assert!(c.pass);
        }
    }
}
