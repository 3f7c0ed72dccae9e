//! Real polyhedral homotopy for sparse polynomial systems.
//!
//! The solver lifts the Cayley configuration of the supports by the log
//! absolute values of the coefficients, computes the mixed cells of the
//! induced subdivision, and checks a circuit-inequality certificate that the
//! coefficient vector sits far enough inside its mixed-cell cone for the
//! system to be patchworked. When it is, every real zero is reached by a real
//! path that starts at a real solution of a cell's binomial system.
//!
//! ```
//! use rph_core::{lattice::SupportSystem, pipeline::{solve, SolverConfig}};
//!
//! // 1 + 10x + x^2
//! let sys = SupportSystem::from_raw(vec![vec![vec![0], vec![1], vec![2]]], vec![vec![1.0, 10.0, 1.0]]).unwrap();
//! let report = solve(&sys, &SolverConfig::default()).unwrap();
//! assert!(report.certificate.pass);
//! assert_eq!(report.solutions.len(), 2);
//! ```

pub mod binomial;
pub mod certificate;
pub mod document;
pub mod error;
pub mod gale;
pub mod hnf;
pub mod lattice;
pub mod mixed_cells;
pub mod pipeline;
pub mod tracker;

pub use error::{Error, Result};
