//! Schur multipliers, state composition and equality certificates.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{GroupElement, DEFAULT_BUDGET};
use crate::linalg::C;
use crate::pd::{ideal_membership, pd_window_check, GroupFunction, IdealSpec, Verdict, DEFAULT_PSD_TOL};
use crate::ring::GroupRingElement;

/// `Σ α_s s ↦ Σ α_s h(s) s`.
pub fn schur_multiply(h: &GroupFunction, x: &GroupRingElement) -> Result<GroupRingElement> {
    if h.model() != x.model() {
        return Err(Error::ModelMismatch { left: h.model().to_string(), right: x.model().to_string() });
    }
    let terms = x.terms().map(|(s, a)| Ok((s.clone(), a * h.eval_checked(s)?))).collect::<Result<Vec<_>>>()?;
    GroupRingElement::from_terms(x.model(), terms)
}

/// `φ·h` for a normalized `φ`.
pub fn state_compose(phi: &GroupFunction, h: &GroupFunction) -> Result<GroupFunction> {
    let at_e = phi.eval_checked(&phi.model().identity())?;
    if (at_e - C::new(1.0, 0.0)).norm() > 1e-12 {
        return Err(Error::InvalidArgument(format!("state must satisfy phi(e) = 1, got {at_e}")));
    }
    let label = format!("{}·{}", phi.label(), h.label());
    Ok(phi.product(h)?.with_label(label))
}

#[derive(Clone, Debug, Serialize)]
pub struct SchurCheck {
    pub phi_passed: bool,
    pub h_passed: bool,
    pub product_passed: bool,
    pub product_min_eigenvalue: f64,
}

/// [`state_compose`] with the Schur product theorem checked on a window:
/// an error is returned if both factors pass and the product does not.
pub fn state_compose_checked(
    phi: &GroupFunction,
    h: &GroupFunction,
    window: &[GroupElement],
    tol: f64,
) -> Result<(GroupFunction, SchurCheck)> {
    let product = state_compose(phi, h)?;
    let a = pd_window_check(phi, window, tol)?;
    let b = pd_window_check(h, window, tol)?;
    let p = pd_window_check(&product, window, tol)?;
    if a.passed() && b.passed() && !p.passed() {
        return Err(Error::Consistency(format!(
            "Schur product of two positive definite functions failed its window check (λ_min = {})",
            p.min_eigenvalue
        )));
    }
    let check = SchurCheck {
        phi_passed: a.passed(),
        h_passed: b.passed(),
        product_passed: p.passed(),
        product_min_eigenvalue: p.min_eigenvalue,
    };
    Ok((product, check))
}

#[derive(Clone, Debug, Serialize)]
pub struct FunctionCheck {
    pub function: String,
    pub pd_passed: bool,
    pub pd_min_eigenvalue: f64,
    pub membership: Verdict,
    pub membership_witness: String,
    /// `max_{|s| ≤ R_conv} |h(s) − 1|`
    pub deviation: f64,
    /// the same maximum sphere by sphere
    pub sphere_deviation: Vec<f64>,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct EqualityCertificate {
    pub ideal: IdealSpec,
    pub label: String,
    pub accepted: bool,
    pub r_conv: u32,
    pub checks: Vec<FunctionCheck>,
    pub failures: Vec<String>,
}

pub fn witness_label(ideal: IdealSpec) -> String {
    match ideal {
        IdealSpec::CC => "amenability witness".into(),
        IdealSpec::C0 => "Haagerup witness".into(),
        IdealSpec::TIdeal => "Property-(T)-ideal witness".into(),
        other => format!("{other} completion witness"),
    }
}

/// Linear schedule from 1 down to 0.2; a single function gets 0.2.
pub fn default_thresholds(len: usize) -> Vec<f64> {
    if len == 1 {
        return vec![0.2];
    }
    (0..len).map(|i| 1.0 - 0.8 * i as f64 / (len - 1) as f64).collect()
}

/// Checks that a family of positive definite functions in `D` converges to 1
/// on `B_{R_conv}`: each member must pass the window PD check, be certified
/// in `D`, and stay within its threshold of 1; deviations must not grow.
pub fn equality_certificate(
    ideal: IdealSpec,
    family: &[GroupFunction],
    r_conv: u32,
    thresholds: &[f64],
) -> Result<EqualityCertificate> {
    if family.is_empty() {
        return Err(Error::InvalidArgument("family is empty".into()));
    }
    if thresholds.len() != family.len() {
        return Err(Error::InvalidArgument(format!(
            "{} thresholds given for {} functions",
            thresholds.len(),
            family.len()
        )));
    }
    if thresholds.windows(2).any(|w| w[1] > w[0]) || thresholds.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::InvalidArgument("thresholds must be positive and nonincreasing".into()));
    }
    let model = family[0].model();
    let ball = model.ball(r_conv, DEFAULT_BUDGET)?;
    let mut checks = Vec::with_capacity(family.len());
    let mut failures = Vec::new();
    let mut prev_dev = f64::INFINITY;
    for (h, &threshold) in family.iter().zip(thresholds) {
        if h.model() != model {
            return Err(Error::ModelMismatch { left: model.to_string(), right: h.model().to_string() });
        }
        let name = h.label().to_string();
        let pd = pd_window_check(h, ball.elements(), DEFAULT_PSD_TOL)?;
        let mem = ideal_membership(h, ideal)?;
        let mut sphere_deviation = vec![0.0f64; r_conv as usize + 1];
        for s in ball.elements() {
            let d = (h.eval_checked(s)? - C::new(1.0, 0.0)).norm();
            let k = s.word_length() as usize;
            sphere_deviation[k] = sphere_deviation[k].max(d);
        }
        let deviation = sphere_deviation.iter().copied().fold(0.0, f64::max);
        let mut passed = true;
        if !pd.passed() {
            passed = false;
            failures.push(format!("{name}: window PD check failed (λ_min = {:.3e})", pd.min_eigenvalue));
        }
        if mem.verdict != Verdict::Member {
            passed = false;
            failures.push(format!("{name}: membership in {ideal} is {:?} ({})", mem.verdict, mem.witness));
        }
        if !(deviation < threshold) {
            passed = false;
            failures.push(format!("{name}: max |h(s) − 1| = {deviation:.6} is not below {threshold}"));
        }
        if deviation > prev_dev + 1e-12 {
            passed = false;
            failures.push(format!("{name}: deviation {deviation:.6} grew from {prev_dev:.6}"));
        }
        prev_dev = deviation;
        checks.push(FunctionCheck {
            function: name,
            pd_passed: pd.passed(),
            pd_min_eigenvalue: pd.min_eigenvalue,
            membership: mem.verdict,
            membership_witness: mem.witness,
            deviation,
            sphere_deviation,
            threshold,
            passed,
        });
    }
    Ok(EqualityCertificate {
        ideal,
        label: witness_label(ideal),
        accepted: failures.is_empty(),
        r_conv,
        checks,
        failures,
    })
}
