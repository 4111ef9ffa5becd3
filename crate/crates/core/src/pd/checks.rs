//! Window checks for positive definiteness and conditionally negative type.

use std::collections::HashSet;

use faer::Mat;
use serde::Serialize;

use super::GroupFunction;
use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::linalg::{self, PsdReport, C};

/// Default relative tolerance for PSD checks.
pub const DEFAULT_PSD_TOL: f64 = 1e-8;

fn validate_window(h: &GroupFunction, elements: &[GroupElement]) -> Result<()> {
    let mut seen = HashSet::with_capacity(elements.len());
    for s in elements {
        if s.model() != h.model() {
            return Err(Error::ModelMismatch { left: h.model().to_string(), right: s.model().to_string() });
        }
        if !seen.insert(s) {
            return Err(Error::InvalidArgument(format!("window lists {s} twice")));
        }
    }
    Ok(())
}

/// `M[i][j] = h(s_i s_j⁻¹)`.
pub fn pd_matrix(h: &GroupFunction, elements: &[GroupElement]) -> Result<Mat<C>> {
    validate_window(h, elements)?;
    let model = h.model();
    let inv: Vec<GroupElement> = elements.iter().map(|s| model.inverse(s)).collect();
    h.kernel(&inv, &inv)
}

/// Passes iff `[h(s_i s_j⁻¹)]` is Hermitian and `λ_min ≥ −tol·(1 + ‖M‖_∞)`.
pub fn pd_window_check(h: &GroupFunction, elements: &[GroupElement], tol: f64) -> Result<PsdReport> {
    linalg::psd_check(&pd_matrix(h, elements)?, tol)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CndOutcome {
    Pass,
    Fail,
    /// `ψ` is not real, not symmetric or nonzero at the identity on the window.
    PreconditionFailed,
}

#[derive(Clone, Debug, Serialize)]
pub struct CndReport {
    pub outcome: CndOutcome,
    pub size: usize,
    /// `max c*Nc` over unit vectors with `Σ c_i = 0` (0 when negative).
    pub max_violation: f64,
    pub allowance: f64,
    pub tolerance: f64,
    pub detail: Option<String>,
}

impl CndReport {
    pub fn passed(&self) -> bool {
        self.outcome == CndOutcome::Pass
    }
}

/// Passes iff `c*Nc ≤ tol·(1 + ‖N‖_∞)` for every `c` with `Σ c_i = 0`, where
/// `N[i][j] = ψ(s_i s_j⁻¹)`; computed as a PSD check of `−PNP`.
pub fn cnd_window_check(psi: &GroupFunction, elements: &[GroupElement], tol: f64) -> Result<CndReport> {
    let n_mat = pd_matrix(psi, elements)?;
    let n = elements.len();
    let allowance = tol * (1.0 + linalg::norm_inf(&n_mat));
    let fail = |detail: String| CndReport {
        outcome: CndOutcome::PreconditionFailed,
        size: n,
        max_violation: f64::NAN,
        allowance,
        tolerance: tol,
        detail: Some(detail),
    };
    let e = psi.model().identity();
    let at_e = psi.eval_checked(&e)?;
    if at_e.norm() > allowance {
        return Ok(fail(format!("psi(e) = {at_e} is not 0")));
    }
    for i in 0..n {
        for j in 0..n {
            let v = n_mat[(i, j)];
            if v.im.abs() > allowance {
                return Ok(fail(format!("psi({}·{}^-1) = {v} is not real", elements[i], elements[j])));
            }
            if (v - n_mat[(j, i)]).norm() > allowance {
                return Ok(fail(format!(
                    "psi is not symmetric: psi({0}·{1}^-1) differs from psi({1}·{0}^-1)",
                    elements[i], elements[j]
                )));
            }
        }
    }
    // P = I − 11ᵀ/n, and −PNP must be PSD
    let row: Vec<f64> = (0..n).map(|i| (0..n).map(|j| n_mat[(i, j)].re).sum::<f64>() / n as f64).collect();
    let total: f64 = row.iter().sum::<f64>() / n as f64;
    let centered = Mat::from_fn(n, n, |i, j| C::new(-(n_mat[(i, j)].re - row[i] - row[j] + total), 0.0));
    let eig = linalg::hermitian_eigenvalues(&centered)?;
    let violation = (-eig.first().copied().unwrap_or(0.0)).max(0.0);
    Ok(CndReport {
        outcome: if violation <= allowance { CndOutcome::Pass } else { CndOutcome::Fail },
        size: n,
        max_violation: violation,
        allowance,
        tolerance: tol,
        detail: None,
    })
}
