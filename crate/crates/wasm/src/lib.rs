//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Each export takes plain strings and returns a pretty-printed JSON report.

use ideal_core::completions::{norm_gap_report, GapConfig};
use ideal_core::dynamics::{dn_report, FiniteSystem};
use ideal_core::notation::{parse_element, parse_function};
use ideal_core::pd::pd_window_check;
use ideal_core::{GroupModel, IdealSpec, DEFAULT_BUDGET};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Largest radius the page accepts; keeps a browser tab responsive.
pub const MAX_RADIUS: u32 = 6;

fn model(group: &str) -> Result<GroupModel, String> {
    group.trim().parse().map_err(|e: ideal_core::Error| e.to_string())
}

fn check_radius(radius: u32) -> Result<(), String> {
    if radius > MAX_RADIUS {
        return Err(format!("radius {radius} is above the demo limit of {MAX_RADIUS}"));
    }
    Ok(())
}

fn pretty(v: serde_json::Value) -> Result<String, String> {
    serde_json::to_string_pretty(&v).map_err(|e| e.to_string())
}

/// Window PSD check of a function on the ball of the given radius.
pub fn pd_check_json(group: &str, function: &str, radius: u32) -> Result<String, String> {
    check_radius(radius)?;
    let m = model(group)?;
    let h = parse_function(m, function).map_err(|e| e.to_string())?;
    let ball = m.ball(radius, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    let r = pd_window_check(&h, ball.elements(), 1e-8).map_err(|e| e.to_string())?;
    pretty(json!({"group": m.to_string(), "function": h.label(), "radius": radius, "passed": r.passed(), "report": r}))
}

/// Trivial, reduced and GNS norms of an element side by side.
pub fn norm_gap_json(group: &str, element: &str, radius: u32, ideal: &str) -> Result<String, String> {
    check_radius(radius)?;
    let m = model(group)?;
    let x = parse_element(m, element).map_err(|e| e.to_string())?;
    let d: IdealSpec = ideal.trim().parse().map_err(|e: ideal_core::Error| e.to_string())?;
    let cfg = GapConfig { radius, gns_window_limit: 200, ..GapConfig::default() };
    let r = norm_gap_report(&x, d, &cfg).map_err(|e| e.to_string())?;
    pretty(json!(r))
}

/// Envelopes and fixed vectors for a system given as JSON.
pub fn dn_report_json(system: &str) -> Result<String, String> {
    let sys = FiniteSystem::parse_json(system).map_err(|e| e.to_string())?;
    let r = dn_report(&sys).map_err(|e| e.to_string())?;
    pretty(json!(r))
}

#[wasm_bindgen]
pub fn pd_check(group: &str, function: &str, radius: u32) -> Result<String, JsError> {
    pd_check_json(group, function, radius).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn norm_gap(group: &str, element: &str, radius: u32, ideal: &str) -> Result<String, JsError> {
    norm_gap_json(group, element, radius, ideal).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn dynamics_report(system: &str) -> Result<String, JsError> {
    dn_report_json(system).map_err(|e| JsError::new(&e))
}
