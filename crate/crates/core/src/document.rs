//! JSON input and output documents.
//!
//! Input:
//!
//! ```json
//! { "n": 1,
//!   "supports": [[[0], [1], [2]]],
//!   "coefficients": [[1, "10", "1/3"]] }
//! ```
//!
//! Coefficients are JSON numbers or strings holding a decimal or an exact
//! rational `p/q`. Indices in output documents are 1-based and local to
//! their support. Floats are written with 17 significant digits.

use std::io;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::binomial::RealOrthantSolution;
use crate::certificate::Certificate;
use crate::error::{Error, Result};
use crate::lattice::{build_cayley, CayleyConfig, SupportSystem};
use crate::mixed_cells::{mixed_cell_count_bound, MixedCellSet};
use crate::pipeline::{SolveReport, Timings};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Number(f64),
    Text(String),
}

impl Coefficient {
    pub fn value(&self) -> Result<f64> {
        match self {
            Coefficient::Number(v) => Ok(*v),
            Coefficient::Text(s) => parse_coefficient(s),
        }
    }
}

fn parse_coefficient(s: &str) -> Result<f64> {
    let s = s.trim();
    let bad = || Error::Input(format!("cannot parse coefficient {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q == BigInt::from(0) {
            return Err(Error::Input(format!("zero denominator in {s:?}")));
        }
        return BigRational::new(p, q).to_f64().ok_or_else(bad);
    }
    s.parse::<f64>().map_err(|_| bad())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDocument {
    pub n: usize,
    pub supports: Vec<Vec<Vec<i64>>>,
    pub coefficients: Vec<Vec<Coefficient>>,
}

impl InputDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Input(e.to_string()))
    }

    pub fn from_system(system: &SupportSystem) -> Self {
        Self {
            n: system.n(),
            supports: system.supports().iter().map(|s| s.points().to_vec()).collect(),
            coefficients: system
                .coefficients()
                .iter()
                .map(|c| c.iter().map(|&v| Coefficient::Number(v)).collect())
                .collect(),
        }
    }

    pub fn to_system(&self) -> Result<SupportSystem> {
        if self.supports.len() != self.n {
            return Err(Error::NonSquare { supports: self.supports.len(), dim: self.n });
        }
        for s in &self.supports {
            for p in s {
                if p.len() != self.n {
                    return Err(Error::Input(format!(
                        "exponent vector {p:?} has length {}, expected n = {}",
                        p.len(),
                        self.n
                    )));
                }
            }
        }
        let coefficients = self
            .coefficients
            .iter()
            .map(|c| c.iter().map(Coefficient::value).collect::<Result<Vec<f64>>>())
            .collect::<Result<Vec<_>>>()?;
        SupportSystem::from_raw(self.supports.clone(), coefficients)
    }
}

pub fn parse_system(text: &str) -> Result<SupportSystem> {
    InputDocument::from_json(text)?.to_system()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellDoc {
    /// 1-based local indices, one pair per support.
    pub indices: Vec<[usize; 2]>,
    pub normal: Vec<f64>,
    pub volume: u64,
    pub inequalities: usize,
    /// Real solutions of the cell's binomial system.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start_points: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedCellsDoc {
    pub n: usize,
    pub m: usize,
    pub mixed_volume: u64,
    pub inequality_count: usize,
    pub cells: Vec<CellDoc>,
}

fn cell_docs(
    config: &CayleyConfig,
    set: &MixedCellSet,
    starts: Option<&[Vec<RealOrthantSolution>]>,
) -> Vec<CellDoc> {
    set.cells
        .iter()
        .enumerate()
        .map(|(k, c)| CellDoc {
            indices: c.local_edges(config).into_iter().map(|(p, q)| [p + 1, q + 1]).collect(),
            normal: c.normal.clone(),
            volume: c.volume,
            inequalities: set.inequalities_of(k).count(),
            start_points: starts.map(|s| s[k].iter().map(|p| p.point.clone()).collect()),
        })
        .collect()
}

impl MixedCellsDoc {
    pub fn new(system: &SupportSystem, set: &MixedCellSet) -> Result<Self> {
        let config = build_cayley(system)?;
        Ok(Self {
            n: system.n(),
            m: config.m(),
            mixed_volume: set.total_volume(),
            inequality_count: set.inequalities.len(),
            cells: cell_docs(&config, set, None),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateDoc {
    pub verdict: Verdict,
    pub vacuous: bool,
    pub m: usize,
    pub min_margin: Option<f64>,
    /// Ascending.
    pub margins: Vec<f64>,
}

impl From<&Certificate> for CertificateDoc {
    fn from(c: &Certificate) -> Self {
        Self {
            verdict: if c.pass { Verdict::Pass } else { Verdict::Fail },
            vacuous: c.vacuous,
            m: c.m,
            min_margin: c.min_margin(),
            margins: c.sorted_margins(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionDoc {
    pub point: Vec<f64>,
    pub residual: f64,
    /// 1-based index into `cells`.
    pub cell: usize,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureDoc {
    pub cell: usize,
    pub start: Vec<f64>,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveDoc {
    pub n: usize,
    pub m: usize,
    pub certified: bool,
    pub uncertified: bool,
    pub certificate: CertificateDoc,
    pub mixed_volume: u64,
    /// Upper bound on the number of real zeros of a patchworked system.
    pub real_zero_bound: String,
    pub cells: Vec<CellDoc>,
    pub solutions: Vec<SolutionDoc>,
    pub failures: Vec<FailureDoc>,
    pub timings: Timings,
}

impl SolveDoc {
    pub fn new(system: &SupportSystem, report: &SolveReport) -> Result<Self> {
        let config = build_cayley(system)?;
        let bound = mixed_cell_count_bound(system.n(), system.max_terms().max(2));
        Ok(Self {
            n: system.n(),
            m: config.m(),
            certified: report.certificate.pass,
            uncertified: report.uncertified,
            certificate: CertificateDoc::from(&report.certificate),
            mixed_volume: report.cells.total_volume(),
            real_zero_bound: bound.to_string(),
            cells: cell_docs(&config, &report.cells, Some(&report.start_solutions)),
            solutions: report
                .solutions
                .iter()
                .map(|s| SolutionDoc {
                    point: s.point.clone(),
                    residual: s.residual,
                    cell: s.cell + 1,
                    steps: s.steps,
                })
                .collect(),
            failures: report
                .failures
                .iter()
                .map(|f| FailureDoc { cell: f.cell + 1, start: f.start.clone(), error: f.error.to_string() })
                .collect(),
            timings: report.timings.clone(),
        })
    }
}

/// Compact JSON with every float printed to 17 significant digits.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SignificantDigits);
    value.serialize(&mut ser).expect("serializing to memory cannot fail");
    String::from_utf8(out).expect("serde_json emits UTF-8")
}

struct SignificantDigits;

impl serde_json::ser::Formatter for SignificantDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_g17(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        writer.write_all(format_g17(f64::from(value)).as_bytes())
    }
}

/// `%.17g`-style formatting that always stays a valid JSON number.
pub fn format_g17(v: f64) -> String {
    if v == 0.0 {
        return if v.is_sign_negative() { "-0.0".into() } else { "0.0".into() };
    }
    let sci = format!("{v:.16e}");
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if (-5..17).contains(&exp) {
        format!("{v:.*}", (16 - exp) as usize)
    } else {
        sci
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_rational_and_decimal_coefficients() {
        let doc = r#"{"n":1,"supports":[[[0],[1],[2]]],"coefficients":[[1,"-1/3","0.25"]]}"#;
        let sys = parse_system(doc).unwrap();
        assert_eq!(sys.coefficients()[0], vec![1.0, -1.0 / 3.0, 0.25]);
    }

    #[test]
    fn malformed_input() {
        assert!(matches!(parse_system("{"), Err(Error::Input(_))));
        let doc = r#"{"n":1,"supports":[[[0],[1]]],"coefficients":[[1,"1/0"]]}"#;
        assert!(matches!(parse_system(doc), Err(Error::Input(_))));
        let doc = r#"{"n":2,"supports":[[[0],[1]]],"coefficients":[[1,2]]}"#;
        assert!(matches!(parse_system(doc), Err(Error::NonSquare { .. })));
        let doc = r#"{"n":1,"supports":[[[0],[1]]],"coefficients":[[1,0]]}"#;
        assert!(matches!(parse_system(doc), Err(Error::ZeroCoefficient { .. })));
    }

    #[test]
    fn g17_round_trips() {
        for v in [1.0, -0.1, 4.938271604938272, 1e-300, 6.02e23, 123456.789, 1e-5, 9.99e16] {
            let s = format_g17(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
            let digits = s.split('e').next().unwrap().chars().filter(char::is_ascii_digit).count();
            let leading_zeros = s.trim_start_matches('-').chars().take_while(|c| *c == '0' || *c == '.').filter(|c| *c == '0').count();
            assert_eq!(digits - leading_zeros, 17, "{s}");
        }
        assert_eq!(format_g17(0.5), "0.50000000000000000");
    }

    #[test]
    fn input_round_trip() {
        let doc = r#"{"n":1,"supports":[[[0],[1]]],"coefficients":[[1.5,"-2"]]}"#;
        let sys = parse_system(doc).unwrap();
        let back = InputDocument::from_system(&sys);
        let again = parse_system(&to_json(&back)).unwrap();
        assert_eq!(sys, again);
    }
}
