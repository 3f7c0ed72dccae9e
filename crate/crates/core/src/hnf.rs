//! Exact integer matrix arithmetic: row echelon form with a unimodular
//! transform, Hermite normal form, determinants and rational solves.
//!
//! Entries are `BigInt`; nothing here can wrap. Conversions back to machine
//! integers are checked and report [`Error::Overflow`].

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Dense row-major integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.as_ref().len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.as_ref().len(), c, "ragged matrix");
            data.extend(row.as_ref().iter().map(|&v| BigInt::from(v)));
        }
        Self { rows: r, cols: c, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    out[(r, c)] += a * &other[(k, c)];
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Checked conversion to machine integers.
    pub fn to_i64_rows(&self) -> Result<Vec<Vec<i64>>> {
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .map(|v| v.to_i64().ok_or(Error::Overflow))
                    .collect()
            })
            .collect()
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                let Some(p) = (k + 1..n).find(|&r| !a[(r, k)].is_zero()) else {
                    return BigInt::zero();
                };
                a.swap_rows(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)];
                    a[(i, j)] = v / &prev;
                }
            }
            prev = a[(k, k)].clone();
        }
        sign * a[(n - 1, n - 1)].clone()
    }

    /// Solves `self * x = rhs` exactly; `None` when singular.
    pub fn solve_rational(&self, rhs: &[BigInt]) -> Option<Vec<BigRational>> {
        assert_eq!(self.rows, self.cols);
        assert_eq!(rhs.len(), self.rows);
        let n = self.rows;
        let mut a: Vec<Vec<BigRational>> = (0..n)
            .map(|r| {
                let mut row: Vec<BigRational> =
                    self.row(r).iter().map(|v| BigRational::from(v.clone())).collect();
                row.push(BigRational::from(rhs[r].clone()));
                row
            })
            .collect();
        for k in 0..n {
            let p = (k..n).find(|&r| !a[r][k].is_zero())?;
            a.swap(k, p);
            let pivot = a[k][k].clone();
            for v in a[k].iter_mut().skip(k) {
                *v = &*v / &pivot;
            }
            for r in 0..n {
                if r != k && !a[r][k].is_zero() {
                    let f = a[r][k].clone();
                    for c in k..=n {
                        let d = &f * &a[k][c];
                        a[r][c] -= d;
                    }
                }
            }
        }
        Some(a.into_iter().map(|mut row| row.pop().unwrap()).collect())
    }

    /// Adjugate, so that `adj * self = det * I`.
    pub fn adjugate(&self) -> Self {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut adj = Self::zeros(n, n);
        if n == 1 {
            adj[(0, 0)] = BigInt::one();
            return adj;
        }
        for i in 0..n {
            for j in 0..n {
                let mut minor = Self::zeros(n - 1, n - 1);
                for (mr, r) in (0..n).filter(|&r| r != i).enumerate() {
                    for (mc, c) in (0..n).filter(|&c| c != j).enumerate() {
                        minor[(mr, mc)] = self[(r, c)].clone();
                    }
                }
                let cof = minor.det();
                // adj[j][i] = (-1)^{i+j} M_ij
                adj[(j, i)] = if (i + j) % 2 == 0 { cof } else { -cof };
            }
        }
        adj
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// `row[dst] += f * row[src]`
    fn add_row_multiple(&mut self, dst: usize, src: usize, f: &BigInt) {
        for c in 0..self.cols {
            let v = f * &self[(src, c)];
            self[(dst, c)] += v;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let v = -std::mem::take(&mut self[(r, c)]);
            self[(r, c)] = v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (r, c): (usize, usize)) -> &BigInt {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut BigInt {
        &mut self.data[r * self.cols + c]
    }
}

/// Result of [`row_echelon`]: `transform * input = echelon`.
#[derive(Debug, Clone)]
pub struct Echelon {
    pub echelon: IntMatrix,
    pub transform: IntMatrix,
    pub rank: usize,
    /// Pivot column of each of the first `rank` rows.
    pub pivots: Vec<usize>,
}

/// Upper row echelon form by unimodular row operations (Euclid on each
/// column). Pivots are positive and entries above a pivot are reduced into
/// `[0, pivot)`, so the result is the row-style Hermite normal form.
pub fn row_echelon(m: &IntMatrix) -> Echelon {
    let mut h = m.clone();
    let mut u = IntMatrix::identity(m.rows());
    let mut r = 0;
    let mut pivots = Vec::new();
    for c in 0..m.cols() {
        if r == m.rows() {
            break;
        }
        loop {
            // smallest nonzero magnitude at or below row r
            let best = (r..m.rows())
                .filter(|&i| !h[(i, c)].is_zero())
                .min_by(|&i, &j| h[(i, c)].abs().cmp(&h[(j, c)].abs()));
            let Some(best) = best else { break };
            h.swap_rows(r, best);
            u.swap_rows(r, best);
            let mut done = true;
            for i in r + 1..m.rows() {
                if h[(i, c)].is_zero() {
                    continue;
                }
                let q = -h[(i, c)].div_floor(&h[(r, c)]);
                h.add_row_multiple(i, r, &q);
                u.add_row_multiple(i, r, &q);
                if !h[(i, c)].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h[(r, c)].is_zero() {
            continue;
        }
        if h[(r, c)].is_negative() {
            h.negate_row(r);
            u.negate_row(r);
        }
        for i in 0..r {
            let q = -h[(i, c)].div_floor(&h[(r, c)]);
            if !q.is_zero() {
                h.add_row_multiple(i, r, &q);
                u.add_row_multiple(i, r, &q);
            }
        }
        pivots.push(c);
        r += 1;
    }
    Echelon { echelon: h, transform: u, rank: r, pivots }
}

/// Lower-triangular Hermite form of a square matrix.
#[derive(Debug, Clone)]
pub struct HermiteForm {
    /// `H = U * D`, lower triangular with positive diagonal.
    pub h: IntMatrix,
    /// Unimodular transform.
    pub u: IntMatrix,
}

/// Computes unimodular `U` with `U * D = H`, `H` lower triangular with a
/// positive diagonal and the entries below each pivot reduced into
/// `[0, pivot)`.
pub fn hermite_normal_form(d: &IntMatrix) -> Result<HermiteForm> {
    assert_eq!(d.rows(), d.cols(), "square matrix expected");
    let n = d.rows();
    // reverse the column order, take the upper echelon form, then reverse
    // the row order: upper triangular in reversed coordinates is lower
    // triangular in the original ones
    let mut rev = IntMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            rev[(r, c)] = d[(r, n - 1 - c)].clone();
        }
    }
    let e = row_echelon(&rev);
    if e.rank < n {
        return Err(Error::SingularExponentMatrix);
    }
    let mut h = IntMatrix::zeros(n, n);
    let mut u = IntMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            h[(r, c)] = e.echelon[(n - 1 - r, n - 1 - c)].clone();
            u[(r, c)] = e.transform[(n - 1 - r, c)].clone();
        }
    }
    Ok(HermiteForm { h, u })
}

/// Integer basis of `{ x : m * x = 0 }`, one basis vector per returned row.
pub fn integer_kernel(m: &IntMatrix) -> (Vec<Vec<BigInt>>, usize) {
    let e = row_echelon(&m.transpose());
    let basis = (e.rank..e.transform.rows())
        .map(|r| e.transform.row(r).to_vec())
        .collect();
    (basis, e.rank)
}
