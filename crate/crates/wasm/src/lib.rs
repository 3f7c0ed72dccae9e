//! Browser bindings. Each export takes an input document as a JSON string
//! and returns the corresponding output document as a JSON string.

use rph_core::certificate::certify_system;
use rph_core::document::{parse_system, to_json, CertificateDoc, MixedCellsDoc, SolveDoc};
use rph_core::pipeline::{solve as solve_system, SolverConfig};
use wasm_bindgen::prelude::*;

pub fn mixed_cells_json(input: &str) -> Result<String, String> {
    let sys = parse_system(input).map_err(|e| e.to_string())?;
    let (_, cells) = certify_system(&sys).map_err(|e| e.to_string())?;
    let doc = MixedCellsDoc::new(&sys, &cells).map_err(|e| e.to_string())?;
    Ok(to_json(&doc))
}

pub fn certify_json(input: &str) -> Result<String, String> {
    let sys = parse_system(input).map_err(|e| e.to_string())?;
    let (cert, _) = certify_system(&sys).map_err(|e| e.to_string())?;
    Ok(to_json(&CertificateDoc::from(&cert)))
}

pub fn solve_json(input: &str, force: bool) -> Result<String, String> {
    let sys = parse_system(input).map_err(|e| e.to_string())?;
    let config = SolverConfig { force, ..SolverConfig::default() };
    let report = solve_system(&sys, &config).map_err(|e| e.to_string())?;
    let doc = SolveDoc::new(&sys, &report).map_err(|e| e.to_string())?;
    Ok(to_json(&doc))
}

#[wasm_bindgen]
pub fn mixed_cells(input: &str) -> Result<String, JsError> {
    mixed_cells_json(input).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn certify(input: &str) -> Result<String, JsError> {
    certify_json(input).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn solve(input: &str, force: bool) -> Result<String, JsError> {
    solve_json(input, force).map_err(|e| JsError::new(&e))
}
