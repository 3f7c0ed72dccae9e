//! Supports, coefficients, liftings and the Cayley embedding.
//!
//! Everything downstream indexes Cayley points in block-major order: all
//! points of the first support in input order, then the second support, and
//! so on. That ordering is part of the public contract.

use std::collections::HashSet;

use crate::error::{Error, Result};

/// A finite set of exponent vectors in `Z^n`, kept in input order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportSet {
    points: Vec<Vec<i64>>,
    dim: usize,
}

impl SupportSet {
    pub fn new(points: Vec<Vec<i64>>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::InvalidSystem("empty support set".into()));
        };
        let dim = first.len();
        if dim == 0 {
            return Err(Error::InvalidSystem("zero-dimensional exponent vector".into()));
        }
        let mut seen = HashSet::with_capacity(points.len());
        for p in &points {
            if p.len() != dim {
                return Err(Error::InvalidSystem(format!(
                    "exponent vector {p:?} has dimension {}, expected {dim}",
                    p.len()
                )));
            }
            if !seen.insert(p.as_slice()) {
                return Err(Error::InvalidSystem(format!("repeated exponent vector {p:?}")));
            }
        }
        Ok(Self { points, dim })
    }

    pub fn points(&self) -> &[Vec<i64>] {
        &self.points
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// A square sparse system `p_i = sum_a c_a x^a`, one support and one
/// coefficient list per equation.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportSystem {
    supports: Vec<SupportSet>,
    coefficients: Vec<Vec<f64>>,
}

impl SupportSystem {
    pub fn new(supports: Vec<SupportSet>, coefficients: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = supports.first() else {
            return Err(Error::InvalidSystem("no equations".into()));
        };
        let dim = first.dim();
        if supports.iter().any(|s| s.dim() != dim) {
            return Err(Error::InvalidSystem("supports of mixed dimension".into()));
        }
        if supports.len() != dim {
            return Err(Error::NonSquare { supports: supports.len(), dim });
        }
        if coefficients.len() != supports.len() {
            return Err(Error::InvalidSystem(format!(
                "{} coefficient lists for {} supports",
                coefficients.len(),
                supports.len()
            )));
        }
        for (block, (s, c)) in supports.iter().zip(&coefficients).enumerate() {
            if s.len() != c.len() {
                return Err(Error::InvalidSystem(format!(
                    "support {block} has {} points but {} coefficients",
                    s.len(),
                    c.len()
                )));
            }
            for (index, &v) in c.iter().enumerate() {
                if v == 0.0 {
                    return Err(Error::ZeroCoefficient { block, index });
                }
                if !v.is_finite() {
                    return Err(Error::InvalidSystem(format!(
                        "non-finite coefficient at support {block}, term {index}"
                    )));
                }
            }
        }
        Ok(Self { supports, coefficients })
    }

    /// Convenience constructor from raw exponent lists.
    pub fn from_raw(supports: Vec<Vec<Vec<i64>>>, coefficients: Vec<Vec<f64>>) -> Result<Self> {
        let supports = supports
            .into_iter()
            .map(SupportSet::new)
            .collect::<Result<Vec<_>>>()?;
        Self::new(supports, coefficients)
    }

    /// Number of variables (equal to the number of equations).
    pub fn n(&self) -> usize {
        self.supports.len()
    }

    pub fn supports(&self) -> &[SupportSet] {
        &self.supports
    }

    pub fn coefficients(&self) -> &[Vec<f64>] {
        &self.coefficients
    }

    /// Largest support size, the `t` of the fewnomial bound.
    pub fn max_terms(&self) -> usize {
        self.supports.iter().map(SupportSet::len).max().unwrap_or(0)
    }

    /// True when every equation has exactly two terms.
    pub fn is_binomial(&self) -> bool {
        self.supports.iter().all(|s| s.len() == 2)
    }

    /// Same supports, new coefficients.
    pub fn with_coefficients(&self, coefficients: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(self.supports.clone(), coefficients)
    }

    /// Evaluates every equation at `x`; returns the values and, per equation,
    /// the largest absolute term.
    pub fn evaluate(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut values = Vec::with_capacity(self.n());
        let mut scales = Vec::with_capacity(self.n());
        for (s, c) in self.supports.iter().zip(&self.coefficients) {
            let mut sum = 0.0;
            let mut big = 0.0f64;
            for (a, &coef) in s.points().iter().zip(c) {
                let term = coef * monomial(x, a);
                sum += term;
                big = big.max(term.abs());
            }
            values.push(sum);
            scales.push(big);
        }
        (values, scales)
    }

    /// Max over equations of `|p_i(x)| / max_a |c_a x^a|`.
    pub fn relative_residual(&self, x: &[f64]) -> f64 {
        let (values, scales) = self.evaluate(x);
        values
            .iter()
            .zip(&scales)
            .map(|(v, s)| if *s > 0.0 { v.abs() / s } else { v.abs() })
            .fold(0.0, f64::max)
    }
}

pub(crate) fn monomial(x: &[f64], a: &[i64]) -> f64 {
    x.iter()
        .zip(a)
        .map(|(&xi, &ai)| xi.powi(ai as i32))
        .product()
}

/// The Cayley configuration `A_1 * ... * A_n` in `Z^{2n-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CayleyConfig {
    points: Vec<Vec<i64>>,
    block: Vec<usize>,
    origin_index: Vec<usize>,
    n: usize,
    block_start: Vec<usize>,
}

impl CayleyConfig {
    pub fn points(&self) -> &[Vec<i64>] {
        &self.points
    }

    /// Originating support of each point.
    pub fn block(&self) -> &[usize] {
        &self.block
    }

    /// Index of each point within its support.
    pub fn origin_index(&self) -> &[usize] {
        &self.origin_index
    }

    /// Number of points, `#A`.
    pub fn m(&self) -> usize {
        self.points.len()
    }

    /// Dimension of the supports (equal to the number of supports for a
    /// square system).
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of supports.
    pub fn blocks(&self) -> usize {
        self.block_start.len() - 1
    }

    /// Global index range of block `i`.
    pub fn block_range(&self, i: usize) -> std::ops::Range<usize> {
        self.block_start[i]..self.block_start[i + 1]
    }

    /// Exponent part (first `n` coordinates) of point `p`.
    pub fn exponent(&self, p: usize) -> &[i64] {
        &self.points[p][..self.n]
    }

    /// Global index of term `index` of support `block`.
    pub fn global_index(&self, block: usize, index: usize) -> usize {
        self.block_start[block] + index
    }

    /// Rows of the homogenized matrix: the point coordinates plus an all-ones
    /// row, as an `(2n) x m` integer matrix.
    pub fn homogenized(&self) -> Vec<Vec<i64>> {
        let dim = self.points.first().map_or(0, Vec::len);
        let mut rows: Vec<Vec<i64>> = (0..dim)
            .map(|r| self.points.iter().map(|p| p[r]).collect())
            .collect();
        rows.push(vec![1; self.m()]);
        rows
    }
}

/// Builds the Cayley configuration of a square system: a point `a` of
/// support `i` (0-based) becomes `(a, e_i)` with `e_0 = 0`.
pub fn build_cayley(system: &SupportSystem) -> Result<CayleyConfig> {
    let n = system.n();
    let dim = system.supports()[0].dim();
    if dim != n {
        return Err(Error::NonSquare { supports: n, dim });
    }
    cayley_of(system.supports())
}

/// `A_1 * ... * A_k` for any number `k` of supports in a common `Z^d`,
/// embedded in `Z^{d+k-1}`.
pub fn cayley_of(supports: &[SupportSet]) -> Result<CayleyConfig> {
    let Some(first) = supports.first() else {
        return Err(Error::InvalidSystem("no supports".into()));
    };
    let d = first.dim();
    if supports.iter().any(|s| s.dim() != d) {
        return Err(Error::InvalidSystem("supports of mixed dimension".into()));
    }
    let k = supports.len();
    let mut points = Vec::new();
    let mut block = Vec::new();
    let mut origin_index = Vec::new();
    let mut block_start = vec![0];
    for (i, s) in supports.iter().enumerate() {
        for (j, a) in s.points().iter().enumerate() {
            let mut p = Vec::with_capacity(d + k - 1);
            p.extend_from_slice(a);
            p.extend((1..k).map(|e| i64::from(e == i)));
            points.push(p);
            block.push(i);
            origin_index.push(j);
        }
        block_start.push(points.len());
    }
    Ok(CayleyConfig { points, block, origin_index, n: d, block_start })
}

/// One real value per Cayley point.
#[derive(Debug, Clone, PartialEq)]
pub struct Lifting {
    values: Vec<f64>,
}

impl Lifting {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSystem("non-finite lifting value".into()));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { values: self.values.iter().map(|v| v * s).collect() }
    }
}

/// `Log|C|`: natural log of each coefficient magnitude, block-major.
pub fn log_abs_lifting(system: &SupportSystem) -> Result<Lifting> {
    let mut values = Vec::new();
    for (block, c) in system.coefficients().iter().enumerate() {
        for (index, &v) in c.iter().enumerate() {
            if v == 0.0 {
                return Err(Error::ZeroCoefficient { block, index });
            }
            values.push(v.abs().ln());
        }
    }
    Lifting::new(values)
}
