//! Side-by-side norm comparison in the full, reduced and ideal completions.

use serde::Serialize;

use super::gns::{gns_norm_lower, DENSE_LIMIT};
use super::norms::{
    radial_coefficients, reduced_norm_lower_with, reduced_upper_bound, trivial_norm, BoundKind, NormEstimate,
    POWER_ITERATION_CAP, POWER_ITERATION_TOL,
};
use crate::error::{Error, Result};
use crate::group::DEFAULT_BUDGET;
use crate::pd::{ideal_membership, GroupFunction, IdealSpec, Verdict};
use crate::ring::GroupRingElement;

#[derive(Clone, Debug)]
pub struct GapConfig {
    /// radius of the regular-representation compression
    pub radius: u32,
    /// a gap smaller than this is treated as truncation error
    pub gap_tol: f64,
    /// margin required before an exact value is declared different from a bound
    pub exact_tol: f64,
    /// relative Rayleigh-quotient change at which the power iteration stops
    pub eig_tol: f64,
    /// largest dense GNS window; windows are shrunk until they fit
    pub gns_window_limit: usize,
    /// functions to try; `None` picks a standard family for the ideal
    pub family: Option<Vec<GroupFunction>>,
    pub budget: usize,
}

impl Default for GapConfig {
    fn default() -> Self {
        Self { radius: 8, gap_tol: 0.05, exact_tol: 1e-6, eig_tol: POWER_ITERATION_TOL, gns_window_limit: 800, family: None, budget: DEFAULT_BUDGET }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GnsEntry {
    pub function: String,
    pub membership: Verdict,
    pub estimate: Option<NormEstimate>,
    pub skipped: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct NormGapReport {
    pub model: String,
    pub element: String,
    pub ideal: IdealSpec,
    pub trivial: NormEstimate,
    pub reduced_lower: NormEstimate,
    pub reduced_upper: Option<NormEstimate>,
    pub gns: Vec<GnsEntry>,
    pub best_gns: Option<NormEstimate>,
    /// trivial value is exact and beats the reduced upper bound by more than `exact_tol`
    pub gap: bool,
    /// some GNS lower bound beats the reduced upper bound by more than `exact_tol`
    pub ideal_exceeds_reduced: bool,
    /// the reduced lower bound is within `gap_tol` of the trivial value
    pub reduced_within_gap_tol: bool,
    pub gap_tol: f64,
    pub exact_tol: f64,
}

/// Standard test functions for an ideal, before the membership filter.
pub fn default_family(model: crate::GroupModel, ideal: IdealSpec) -> Result<Vec<GroupFunction>> {
    let haagerup = || [0.5, 1.0, 2.0, 4.0, 8.0].iter().map(|&n| GroupFunction::haagerup(model, n)).collect::<Result<Vec<_>>>();
    match ideal {
        IdealSpec::CC => (1..=4).map(|n| GroupFunction::folner_box(model, n)).collect(),
        IdealSpec::Linf => {
            let mut v = haagerup()?;
            v.push(GroupFunction::one(model));
            Ok(v)
        }
        _ => haagerup(),
    }
}

pub fn norm_gap_report(x: &GroupRingElement, ideal: IdealSpec, config: &GapConfig) -> Result<NormGapReport> {
    let model = x.model();
    let trivial = trivial_norm(x);
    let reduced_lower = reduced_norm_lower_with(x, config.radius, config.budget, config.eig_tol, POWER_ITERATION_CAP)?;
    let reduced_upper = reduced_upper_bound(x)?;
    let family = match &config.family {
        Some(f) => f.clone(),
        None => default_family(model, ideal)?,
    };
    let r = x.support_radius();
    let radial_x = radial_coefficients(x).is_some() && model.is_free();
    let mut dense_radius = config.radius;
    while dense_radius > 0
        && (model.ball_size(dense_radius) > config.gns_window_limit as u128
            || model.ball_size(dense_radius + r) > DENSE_LIMIT as u128)
    {
        dense_radius -= 1;
    }
    let mut gns = Vec::with_capacity(family.len());
    for h in &family {
        if h.model() != model {
            return Err(Error::ModelMismatch { left: model.to_string(), right: h.model().to_string() });
        }
        let membership = ideal_membership(h, ideal)?.verdict;
        let mut entry = GnsEntry { function: h.label().to_string(), membership, estimate: None, skipped: None };
        if membership != Verdict::Member {
            entry.skipped = Some(format!("not certified to lie in {ideal}"));
        } else {
            let radius = if radial_x && h.is_radial() { config.radius } else { dense_radius };
            match gns_norm_lower(h, x, radius) {
                Ok(e) => entry.estimate = Some(e),
                Err(e @ (Error::NotPositive { .. } | Error::NotHermitian { .. })) => {
                    entry.skipped = Some(format!("Gram matrix rejected: {e}"))
                }
                Err(e) => return Err(e),
            }
        }
        gns.push(entry);
    }
    let best_gns = gns
        .iter()
        .filter_map(|g| g.estimate.clone())
        .max_by(|a, b| a.value.total_cmp(&b.value));
    let upper = reduced_upper.as_ref().map(|u| u.value);
    let gap = trivial.bound_kind == BoundKind::Exact && upper.is_some_and(|u| trivial.value - u > config.exact_tol);
    let ideal_exceeds_reduced =
        upper.is_some_and(|u| best_gns.as_ref().is_some_and(|g| g.value - u > config.exact_tol));
    let reduced_within_gap_tol = trivial.value - reduced_lower.value <= config.gap_tol;
    Ok(NormGapReport {
        model: model.to_string(),
        element: x.to_string(),
        ideal,
        trivial,
        reduced_lower,
        reduced_upper,
        gns,
        best_gns,
        gap,
        ideal_exceeds_reduced,
        reduced_within_gap_tol,
        gap_tol: config.gap_tol,
        exact_tol: config.exact_tol,
    })
}
