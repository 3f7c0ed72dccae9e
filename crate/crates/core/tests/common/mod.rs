#![allow(dead_code)]

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rph_core::document::parse_system;
use rph_core::lattice::SupportSystem;

pub fn data(name: &str) -> SupportSystem {
    let path = format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
    parse_system(&text).unwrap()
}

pub fn quadratic(c: [f64; 3]) -> SupportSystem {
    SupportSystem::from_raw(vec![vec![vec![0], vec![1], vec![2]]], vec![c.to_vec()]).unwrap()
}

/// Distinct points from `[0, hi]^n`.
pub fn random_support(rng: &mut ChaCha8Rng, n: usize, terms: usize, hi: i64) -> Vec<Vec<i64>> {
    let mut grid: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..n {
        grid = grid
            .into_iter()
            .flat_map(|p| (0..=hi).map(move |v| [p.clone(), vec![v]].concat()))
            .collect();
    }
    grid.shuffle(rng);
    grid.truncate(terms);
    grid
}

/// Random sign, magnitude `10^u` with `u` uniform in `[-span, span]`.
pub fn log_uniform(rng: &mut ChaCha8Rng, span: f64) -> f64 {
    let mag = 10f64.powf(rng.gen_range(-span..span));
    if rng.gen::<bool>() {
        mag
    } else {
        -mag
    }
}

pub fn random_system(rng: &mut ChaCha8Rng, n: usize, max_terms: usize, hi: i64) -> SupportSystem {
    let supports: Vec<_> = (0..n)
        .map(|_| {
            let terms = rng.gen_range(2..=max_terms);
            random_support(rng, n, terms, hi)
        })
        .collect();
    let coeffs = supports.iter().map(|s| s.iter().map(|_| log_uniform(rng, 3.0)).collect()).collect();
    SupportSystem::from_raw(supports, coeffs).unwrap()
}

pub fn dense_support(n: usize, d: i64) -> Vec<Vec<i64>> {
    let mut pts: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..n {
        pts = pts.into_iter().flat_map(|p| (0..=d).map(move |v| [p.clone(), vec![v]].concat())).collect();
    }
    pts.retain(|p| p.iter().sum::<i64>() <= d);
    pts
}

/// Laplace expansion.
pub fn det(m: &[Vec<i64>]) -> i64 {
    match m.len() {
        0 => 1,
        1 => m[0][0],
        n => (0..n)
            .map(|j| {
                let minor: Vec<Vec<i64>> = m[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &v)| v).collect())
                    .collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * m[0][j] * det(&minor)
            })
            .sum(),
    }
}

#[derive(Debug, Clone)]
pub struct OracleCell {
    /// Local index pairs `(min, max)`, one per support.
    pub edges: Vec<(usize, usize)>,
    pub normal: Vec<f64>,
    pub volume: u64,
}

pub struct OracleResult {
    pub cells: Vec<OracleCell>,
    /// Smallest `|slack|` seen; tiny values mean the lifting is close to a tie.
    pub closest: f64,
}

/// Mixed cells by brute force: every choice of one edge per support is
/// tested with an LP that maximises the gap `s` between the edge and the
/// remaining lifted points below the hyperplane through the edge.
pub fn lp_mixed_cells(supports: &[Vec<Vec<i64>>], lifting: &[Vec<f64>]) -> OracleResult {
    let n = supports.len();
    let pairs: Vec<Vec<(usize, usize)>> = supports
        .iter()
        .map(|s| (0..s.len()).flat_map(|p| (p + 1..s.len()).map(move |q| (p, q))).collect())
        .collect();
    let mut choice = vec![0usize; n];
    let mut cells = Vec::new();
    let mut closest = f64::INFINITY;
    'outer: loop {
        let edges: Vec<(usize, usize)> = (0..n).map(|i| pairs[i][choice[i]]).collect();
        let d: Vec<Vec<i64>> = edges
            .iter()
            .enumerate()
            .map(|(i, &(p, q))| (0..n).map(|k| supports[i][p][k] - supports[i][q][k]).collect())
            .collect();
        let vol = det(&d).unsigned_abs();
        if vol > 0 {
            let mut lp = Problem::new(OptimizationDirection::Maximize);
            let gamma: Vec<_> = (0..n).map(|_| lp.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY))).collect();
            let heights: Vec<_> = (0..n).map(|_| lp.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY))).collect();
            let s = lp.add_var(1.0, (f64::NEG_INFINITY, 1.0));
            for i in 0..n {
                for (a, pt) in supports[i].iter().enumerate() {
                    let mut expr: Vec<_> = gamma.iter().zip(pt).map(|(&g, &v)| (g, v as f64)).collect();
                    expr.push((heights[i], -1.0));
                    if a == edges[i].0 || a == edges[i].1 {
                        lp.add_constraint(expr.as_slice(), ComparisonOp::Eq, -lifting[i][a]);
                    } else {
                        expr.push((s, 1.0));
                        lp.add_constraint(expr.as_slice(), ComparisonOp::Le, -lifting[i][a]);
                    }
                }
            }
            let sol = lp.solve().expect("edge equalities are always feasible");
            let slack = sol.objective();
            closest = closest.min(slack.abs());
            if slack > 0.0 {
                cells.push(OracleCell {
                    edges,
                    normal: gamma.iter().map(|&g| -*sol.var_value(g)).collect(),
                    volume: vol,
                });
            }
        }
        for i in (0..n).rev() {
            choice[i] += 1;
            if choice[i] < pairs[i].len() {
                continue 'outer;
            }
            choice[i] = 0;
        }
        break;
    }
    OracleResult { cells, closest }
}

/// Real solutions of `x^{D_i} = r_i` found orthant by orthant: a coarse grid
/// in `y = log|x|` locates the best seed, damped Newton on the relative
/// residuals `x^{D_i}/r_i - 1` refines it.
pub fn grid_binomial_oracle(d: &[Vec<i64>], rhs: &[f64]) -> Vec<Vec<f64>> {
    let n = d.len();
    let mut out = Vec::new();
    for orthant in 0..(1usize << n) {
        let signs: Vec<f64> = (0..n).map(|j| if orthant >> j & 1 == 1 { -1.0 } else { 1.0 }).collect();
        let residual = |y: &[f64]| -> Vec<f64> {
            let x: Vec<f64> = y.iter().zip(&signs).map(|(v, s)| s * v.exp()).collect();
            (0..n)
                .map(|i| x.iter().zip(&d[i]).map(|(xv, &e)| xv.powi(e as i32)).product::<f64>() / rhs[i] - 1.0)
                .collect()
        };
        let merit = |r: &[f64]| r.iter().map(|v| (v + 1.0).abs().ln().powi(2) + if v + 1.0 < 0.0 { 1e6 } else { 0.0 }).sum::<f64>();

        if merit(&residual(&vec![0.0; n])) >= 1e6 {
            continue;
        }
        let mut best: Option<(f64, Vec<f64>)> = None;
        let ticks: Vec<f64> = (-16..=16).map(f64::from).collect();
        let mut idx = vec![0usize; n];
        loop {
            let y: Vec<f64> = idx.iter().map(|&k| ticks[k]).collect();
            let m = merit(&residual(&y));
            if best.as_ref().is_none_or(|(b, _)| m < *b) {
                best = Some((m, y));
            }
            let mut j = 0;
            while j < n {
                idx[j] += 1;
                if idx[j] < ticks.len() {
                    break;
                }
                idx[j] = 0;
                j += 1;
            }
            if j == n {
                break;
            }
        }
        let (m, mut y) = best.unwrap();
        if m >= 1e6 {
            continue;
        }
        let mut converged = false;
        for _ in 0..200 {
            let r = residual(&y);
            if r.iter().all(|v| v.abs() < 1e-15) {
                converged = true;
                break;
            }
            // J_ij = (r_i + 1) D_ij
            let jac: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| (r[i] + 1.0) * d[i][j] as f64).collect()).collect();
            let Some(mut step) = gauss(jac, r.iter().map(|v| -v).collect()) else { break };
            let len = step.iter().map(|v| v.abs()).fold(0.0, f64::max);
            if len > 1.0 {
                step.iter_mut().for_each(|v| *v /= len);
            }
            y.iter_mut().zip(&step).for_each(|(a, b)| *a += b);
            if step.iter().all(|v| v.abs() < 1e-16 * (1.0 + len)) {
                converged = residual(&y).iter().all(|v| v.abs() < 1e-12);
                break;
            }
        }
        if converged || residual(&y).iter().all(|v| v.abs() < 1e-12) {
            out.push(y.iter().zip(&signs).map(|(v, s)| s * v.exp()).collect());
        }
    }
    out
}

/// Partial-pivoting Gaussian elimination.
pub fn gauss(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c] == 0.0 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}
