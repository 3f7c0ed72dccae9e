//! Real solutions of the binomial start systems attached to mixed cells.
//!
//! `x^{d_i} = r_i` for `i = 1..n` is brought to triangular form with the
//! Hermite normal form `U D = H`; the transformed right-hand sides are
//! `lambda = r^U`. Magnitudes are solved in the log domain, signs by parity:
//! an odd pivot fixes the sign of its coordinate, an even pivot needs a
//! positive right-hand side and then admits both signs.

use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hnf::{hermite_normal_form, IntMatrix};
use crate::lattice::SupportSystem;
use crate::mixed_cells::MixedCell;

#[derive(Debug, Clone, PartialEq)]
pub struct BinomialSystem {
    /// Rows `a_p - a_q`.
    pub d: Vec<Vec<i64>>,
    /// `x^{d_i} = rhs_i`.
    pub rhs: Vec<f64>,
}

impl BinomialSystem {
    pub fn new(d: Vec<Vec<i64>>, rhs: Vec<f64>) -> Result<Self> {
        let n = d.len();
        if rhs.len() != n || d.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidSystem("binomial system must be square".into()));
        }
        if rhs.iter().any(|&v| v == 0.0 || !v.is_finite()) {
            return Err(Error::InvalidSystem("binomial right-hand side must be finite and nonzero".into()));
        }
        Ok(Self { d, rhs })
    }

    pub fn n(&self) -> usize {
        self.d.len()
    }

    /// Max over rows of `|x^{d_i} - rhs_i| / |rhs_i|`.
    pub fn relative_residual(&self, x: &[f64]) -> f64 {
        self.d
            .iter()
            .zip(&self.rhs)
            .map(|(row, &r)| {
                let v: f64 = x.iter().zip(row).map(|(xi, &e)| xi.powi(e as i32)).product();
                ((v - r) / r).abs()
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealOrthantSolution {
    pub point: Vec<f64>,
    pub signs: Vec<i8>,
}

/// Start system of a mixed cell: for the edge `(p, q)` of equation `i`, the
/// two-term truncation `c_p x^{a_p} + c_q x^{a_q} = 0`, i.e.
/// `x^{a_p - a_q} = -c_q / c_p`.
pub fn binomial_from_cell(cell: &MixedCell, system: &SupportSystem) -> Result<BinomialSystem> {
    let n = system.n();
    if cell.edges.len() != n {
        return Err(Error::InvalidSystem("cell must have one edge per equation".into()));
    }
    let mut offset = 0;
    let mut d = Vec::with_capacity(n);
    let mut rhs = Vec::with_capacity(n);
    for (i, &(p, q)) in cell.edges.iter().enumerate() {
        let support = &system.supports()[i];
        let coeffs = &system.coefficients()[i];
        let local = |g: usize| -> Result<usize> {
            g.checked_sub(offset)
                .filter(|&l| l < support.len())
                .ok_or_else(|| Error::InvalidSystem(format!("edge {i} lies outside support {i}")))
        };
        let (lp, lq) = (local(p)?, local(q)?);
        let (ap, aq) = (&support.points()[lp], &support.points()[lq]);
        d.push(ap.iter().zip(aq).map(|(a, b)| a - b).collect());
        rhs.push(-coeffs[lq] / coeffs[lp]);
        offset += support.len();
    }
    BinomialSystem::new(d, rhs)
}

/// Every solution in `(R^*)^n`, ordered by sign vector then coordinates.
pub fn solve_real(bsys: &BinomialSystem) -> Result<Vec<RealOrthantSolution>> {
    let n = bsys.n();
    let form = hermite_normal_form(&IntMatrix::from_rows(&bsys.d))?;
    let log_rhs: Vec<f64> = bsys.rhs.iter().map(|r| r.abs().ln()).collect();
    let neg_rhs: Vec<bool> = bsys.rhs.iter().map(|&r| r < 0.0).collect();

    // lambda_i = prod_k rhs_k^{U_ik}
    let mut log_lambda = vec![0.0; n];
    let mut neg_lambda = vec![false; n];
    for i in 0..n {
        for k in 0..n {
            let u = &form.u[(i, k)];
            log_lambda[i] += u.to_f64().ok_or(Error::Overflow)? * log_rhs[k];
            if neg_rhs[k] && u.is_odd() {
                neg_lambda[i] = !neg_lambda[i];
            }
        }
    }
    let h: Vec<Vec<f64>> = (0..n)
        .map(|r| (0..n).map(|c| form.h[(r, c)].to_f64().unwrap_or(f64::INFINITY)).collect())
        .collect();
    let h_odd: Vec<Vec<bool>> = (0..n)
        .map(|r| (0..n).map(|c| form.h[(r, c)].is_odd()).collect())
        .collect();

    // magnitudes do not depend on the sign branch
    let mut logs = vec![0.0; n];
    for i in 0..n {
        let acc: f64 = (0..i).map(|j| h[i][j] * logs[j]).sum();
        logs[i] = (log_lambda[i] - acc) / h[i][i];
    }

    let mut branches: Vec<Vec<i8>> = vec![Vec::new()];
    for i in 0..n {
        let mut next = Vec::with_capacity(branches.len() * 2);
        for signs in branches {
            // sign that x_i^{h_ii} must take
            let mut negative = neg_lambda[i];
            for (j, &s) in signs.iter().enumerate() {
                if s < 0 && h_odd[i][j] {
                    negative = !negative;
                }
            }
            if h_odd[i][i] {
                let mut s = signs.clone();
                s.push(if negative { -1 } else { 1 });
                next.push(s);
            } else if !negative {
                for sign in [-1i8, 1] {
                    let mut s = signs.clone();
                    s.push(sign);
                    next.push(s);
                }
            }
        }
        branches = next;
    }

    let mut out: Vec<RealOrthantSolution> = branches
        .into_iter()
        .map(|signs| {
            let point = signs.iter().zip(&logs).map(|(&s, &l)| f64::from(s) * l.exp()).collect();
            RealOrthantSolution { point, signs }
        })
        .collect();
    out.sort_by(|a, b| {
        a.signs
            .cmp(&b.signs)
            .then_with(|| a.point.iter().zip(&b.point).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal))
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn solve(d: Vec<Vec<i64>>, rhs: Vec<f64>) -> Vec<RealOrthantSolution> {
        solve_real(&BinomialSystem::new(d, rhs).unwrap()).unwrap()
    }

    #[test]
    fn even_pivot() {
        let s = solve(vec![vec![2]], vec![4.0]);
        let pts: Vec<f64> = s.iter().map(|s| s.point[0]).collect();
        assert_eq!(pts.len(), 2);
        assert!((pts[0] + 2.0).abs() < 1e-15 && (pts[1] - 2.0).abs() < 1e-15);
        assert!(solve(vec![vec![2]], vec![-4.0]).is_empty());
    }

    #[test]
    fn odd_pivot_negative() {
        let s = solve(vec![vec![3]], vec![-8.0]);
        assert_eq!(s.len(), 1);
        assert!((s[0].point[0] + 2.0).abs() < 1e-14);
        assert_eq!(s[0].signs, vec![-1]);
    }

    #[test]
    fn triangular_two_by_two() {
        // x1 x2 = 6, x2^2 = 4
        let s = solve(vec![vec![1, 1], vec![0, 2]], vec![6.0, 4.0]);
        assert_eq!(s.len(), 2);
        let want = [[-3.0, -2.0], [3.0, 2.0]];
        for (sol, w) in s.iter().zip(want) {
            assert!((sol.point[0] - w[0]).abs() < 1e-13 && (sol.point[1] - w[1]).abs() < 1e-13, "{sol:?}");
        }
    }

    #[test]
    fn identity_returns_rhs() {
        let s = solve(vec![vec![1, 0], vec![0, 1]], vec![-0.5, 7.0]);
        assert_eq!(s.len(), 1);
        assert!((s[0].point[0] + 0.5).abs() < 1e-15);
        assert!((s[0].point[1] - 7.0).abs() < 1e-14);
    }

    #[test]
    fn singular_is_an_error() {
        let b = BinomialSystem::new(vec![vec![1, 2], vec![2, 4]], vec![1.0, 1.0]).unwrap();
        assert_eq!(solve_real(&b), Err(Error::SingularExponentMatrix));
    }

    #[test]
    fn edge_orientation_flip() {
        // swapping p and q negates the row and inverts the rhs
        let a = solve(vec![vec![1, -1], vec![1, 0]], vec![2.5, -4.0]);
        let b = solve(vec![vec![-1, 1], vec![1, 0]], vec![1.0 / 2.5, -4.0]);
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            for (u, v) in x.point.iter().zip(&y.point) {
                assert!((u - v).abs() < 1e-12);
            }
        }
    }

    proptest! {
        #[test]
        fn solutions_satisfy_system(
            d in proptest::collection::vec(-3i64..=3, 4),
            r0 in 0.1f64..10.0, r1 in 0.1f64..10.0, s0 in any::<bool>(), s1 in any::<bool>(),
        ) {
            let rows = vec![d[0..2].to_vec(), d[2..4].to_vec()];
            prop_assume!(d[0] * d[3] - d[1] * d[2] != 0);
            let rhs = vec![if s0 { -r0 } else { r0 }, if s1 { -r1 } else { r1 }];
            let b = BinomialSystem::new(rows, rhs).unwrap();
            let sols = solve_real(&b).unwrap();
            prop_assert!(sols.len() <= 4);
            prop_assert!(sols.is_empty() || sols.len().is_power_of_two());
            for s in &sols {
                prop_assert!(b.relative_residual(&s.point) < 1e-10);
                for (x, &sg) in s.point.iter().zip(&s.signs) {
                    prop_assert!(*x != 0.0 && (x.signum() as i8) == sg);
                }
            }
            for w in sols.windows(2) {
                prop_assert!(w[0].point != w[1].point);
            }
        }

        #[test]
        fn unimodular_row_operation_is_invariant(
            d in proptest::collection::vec(-3i64..=3, 4),
            r0 in 0.1f64..10.0, r1 in -10.0f64..-0.1, k in -2i64..=2,
        ) {
            prop_assume!(d[0] * d[3] - d[1] * d[2] != 0);
            let rows = vec![d[0..2].to_vec(), d[2..4].to_vec()];
            // row1 += k * row0, rhs1 *= rhs0^k
            let rows2 = vec![rows[0].clone(), vec![rows[1][0] + k * rows[0][0], rows[1][1] + k * rows[0][1]]];
            let a = solve_real(&BinomialSystem::new(rows, vec![r0, r1]).unwrap()).unwrap();
            let b = solve_real(&BinomialSystem::new(rows2, vec![r0, r1 * r0.powi(k as i32)]).unwrap()).unwrap();
            prop_assert_eq!(a.len(), b.len());
            for (x, y) in a.iter().zip(&b) {
                prop_assert_eq!(&x.signs, &y.signs);
                for (u, v) in x.point.iter().zip(&y.point) {
                    prop_assert!((u - v).abs() <= 1e-9 * (1.0 + u.abs()));
                }
            }
        }
    }
}
