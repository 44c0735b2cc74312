//! WebAssembly bindings for the demo page in `www/`. Every export returns a
//! JSON string; errors surface as JavaScript exceptions.

use rendezvous::format::parse_tactic;
use rendezvous::optimizer::{optimize_symmetric_strategy, optimize_theta, ThetaMode};
use rendezvous::{ExactConfig, ExactEngine};
use wasm_bindgen::prelude::*;

/// Largest `n` the page offers for tactic pairs; enumeration stays interactive.
pub const PAIR_MAX_N: usize = 9;

fn engine() -> Result<ExactEngine, String> {
    ExactEngine::new(ExactConfig::default()).map_err(|e| e.to_string())
}

fn to_json(value: Result<serde_json::Value, serde_json::Error>) -> Result<String, String> {
    value.map(|v| v.to_string()).map_err(|e| e.to_string())
}

/// Exact waiting time, survival curve and no-meeting probability of a pair.
pub fn pair_json(n: usize, tactic_a: &str, tactic_b: &str) -> Result<String, String> {
    if n > PAIR_MAX_N {
        return Err(format!("n={n} is above the demo limit of {PAIR_MAX_N}"));
    }
    let a = parse_tactic(tactic_a, Some(n)).map_err(|e| format!("tactic A: {e}"))?;
    let b = parse_tactic(tactic_b, Some(n)).map_err(|e| format!("tactic B: {e}"))?;
    to_json(serde_json::to_value(engine()?.evaluate(&a, &b).map_err(|e| e.to_string())?))
}

/// Exact symmetric Anderson–Weber value over a θ grid, plus the refined optimum.
pub fn theta_json(n: usize, resolution: usize) -> Result<String, String> {
    let opt = optimize_theta(&engine()?, n, ThetaMode::Exact, resolution, None).map_err(|e| e.to_string())?;
    to_json(serde_json::to_value(opt))
}

/// Certified symmetric optimum from multistart Frank–Wolfe.
pub fn symmetric_json(n: usize, restarts: usize, seed: u32) -> Result<String, String> {
    let opt = optimize_symmetric_strategy(&engine()?, n, restarts, u64::from(seed)).map_err(|e| e.to_string())?;
    to_json(serde_json::to_value(opt))
}

#[wasm_bindgen(js_name = evaluatePair)]
pub fn evaluate_pair(n: usize, tactic_a: &str, tactic_b: &str) -> Result<String, JsError> {
    pair_json(n, tactic_a, tactic_b).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = thetaCurve)]
pub fn theta_curve(n: usize, resolution: usize) -> Result<String, JsError> {
    theta_json(n, resolution).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = optimizeSymmetric)]
pub fn optimize_symmetric(n: usize, restarts: usize, seed: u32) -> Result<String, JsError> {
    symmetric_json(n, restarts, seed).map_err(|e| JsError::new(&e))
}
