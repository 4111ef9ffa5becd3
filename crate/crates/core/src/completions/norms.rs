//! Norm estimates in the regular and trivial representations.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{Ball, GroupKind};
use crate::linalg::{self, C, ZERO};
use crate::ring::GroupRingElement;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    LowerBound,
    UpperBound,
    Exact,
}

/// A norm value together with the direction in which it is certified.
#[derive(Clone, Debug, Serialize)]
pub struct NormEstimate {
    pub method: String,
    pub radius: Option<u32>,
    pub value: f64,
    pub bound_kind: BoundKind,
    pub tolerances: Tolerances,
    /// `false` when an iteration cap was hit before the tolerance was met
    pub converged: bool,
    pub iterations: Option<usize>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Tolerances {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eigenvalue: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psd: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<f64>,
}

impl NormEstimate {
    pub(crate) fn new(method: &str, radius: Option<u32>, value: f64, bound_kind: BoundKind) -> Self {
        Self {
            method: method.into(),
            radius,
            value,
            bound_kind,
            tolerances: Tolerances::default(),
            converged: true,
            iterations: None,
        }
    }
}

/// Left multiplication `L_x: ℓ²(B_R) → ℓ²(B_{R+r})`, `r` the support radius of `x`.
#[derive(Clone, Debug)]
pub struct ConvolutionOperator {
    x: GroupRingElement,
    domain: Ball,
    codomain: Ball,
    coeffs: Vec<C>,
    /// `targets[s * k + u]` is the codomain index of `u·s`
    targets: Vec<u32>,
}

impl ConvolutionOperator {
    pub fn new(x: &GroupRingElement, radius: u32, budget: usize) -> Result<Self> {
        let model = x.model();
        let r = x.support_radius();
        let codomain = model.ball(radius + r, budget)?;
        let domain = model.ball(radius, budget)?;
        let (coeffs, targets) = neighbour_table(x, &domain, &codomain);
        Ok(Self { x: x.clone(), domain, codomain, coeffs, targets })
    }

    pub fn element(&self) -> &GroupRingElement {
        &self.x
    }

    pub fn domain(&self) -> &Ball {
        &self.domain
    }

    pub fn codomain(&self) -> &Ball {
        &self.codomain
    }

    /// Entry `(t, s) = α_{ts⁻¹}`.
    pub fn entry(&self, t: usize, s: usize) -> C {
        let k = self.coeffs.len();
        (0..k).filter(|&u| self.targets[s * k + u] as usize == t).map(|u| self.coeffs[u]).sum()
    }

    pub fn apply(&self, v: &[C]) -> Vec<C> {
        let k = self.coeffs.len();
        let mut out = vec![ZERO; self.codomain.len()];
        for (s, &vs) in v.iter().enumerate() {
            for u in 0..k {
                out[self.targets[s * k + u] as usize] += self.coeffs[u] * vs;
            }
        }
        out
    }

    pub fn apply_adjoint(&self, w: &[C]) -> Vec<C> {
        let k = self.coeffs.len();
        (0..self.domain.len())
            .map(|s| (0..k).map(|u| self.coeffs[u].conj() * w[self.targets[s * k + u] as usize]).sum())
            .collect()
    }
}

const OUTSIDE: u32 = u32::MAX;

fn neighbour_table(x: &GroupRingElement, domain: &Ball, codomain: &Ball) -> (Vec<C>, Vec<u32>) {
    let model = x.model();
    let terms: Vec<_> = x.terms().map(|(u, a)| (u.clone(), *a)).collect();
    let k = terms.len();
    let mut targets = vec![OUTSIDE; domain.len() * k];
    for (si, s) in domain.elements().iter().enumerate() {
        for (ui, (u, _)) in terms.iter().enumerate() {
            if let Some(t) = codomain.index_of(&model.compose_unchecked(u, s)) {
                targets[si * k + ui] = t as u32;
            }
        }
    }
    (terms.into_iter().map(|(_, a)| a).collect(), targets)
}

pub const POWER_ITERATION_CAP: usize = 10_000;
pub const POWER_ITERATION_TOL: f64 = 1e-8;

/// `‖L_x|_{ℓ²(B_R)}‖`, the top singular value of the compression, by power
/// iteration on `P_R L_{x*x} P_R` (which equals `P_R L_x* L_x P_R`). Every
/// iterate is a Rayleigh quotient, so the value is a lower bound for
/// `‖λ(x)‖` whether or not the iteration converged.
pub fn reduced_norm_lower(x: &GroupRingElement, radius: u32, budget: usize) -> Result<NormEstimate> {
    reduced_norm_lower_with(x, radius, budget, POWER_ITERATION_TOL, POWER_ITERATION_CAP)
}

pub fn reduced_norm_lower_with(
    x: &GroupRingElement,
    radius: u32,
    budget: usize,
    rel_tol: f64,
    cap: usize,
) -> Result<NormEstimate> {
    let model = x.model();
    let mut est = NormEstimate::new("power-iteration", Some(radius), 0.0, BoundKind::LowerBound);
    est.tolerances.eigenvalue = Some(rel_tol);
    if x.is_empty() {
        est.iterations = Some(0);
        return Ok(est);
    }
    let ball = model.ball(radius, budget)?;
    let y = x.adjoint().mul(x)?;
    let (coeffs, targets) = neighbour_table(&y, &ball, &ball);
    let k = coeffs.len();
    let n = ball.len();
    let apply = |v: &[C]| -> Vec<C> {
        let mut out = vec![ZERO; n];
        for (s, &vs) in v.iter().enumerate() {
            if vs == ZERO {
                continue;
            }
            for u in 0..k {
                let t = targets[s * k + u];
                if t != OUTSIDE {
                    out[t as usize] += coeffs[u] * vs;
                }
            }
        }
        out
    };
    // δ_e plus a small fixed-stream perturbation
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut v: Vec<C> = crate::rep::gaussian_vector(n, &mut rng).into_iter().map(|z| z * 1e-3).collect();
    v[0] += C::new(1.0, 0.0);
    let nv = linalg::norm(&v);
    v.iter_mut().for_each(|z| *z /= nv);
    let mut best = 0.0f64;
    let mut prev = f64::NAN;
    let mut iterations = 0;
    let mut converged = false;
    for it in 1..=cap {
        let w = apply(&v);
        let rayleigh = linalg::dot(&w, &v).re;
        best = best.max(rayleigh);
        iterations = it;
        let nw = linalg::norm(&w);
        if nw == 0.0 {
            converged = true;
            break;
        }
        if (rayleigh - prev).abs() <= rel_tol * rayleigh.abs() {
            converged = true;
            break;
        }
        prev = rayleigh;
        v = w.into_iter().map(|z| z / nw).collect();
    }
    est.value = best.max(0.0).sqrt();
    est.converged = converged;
    est.iterations = Some(iterations);
    Ok(est)
}

/// `Σ_k (k+1)‖x·χ_{S_k}‖₂`, an upper bound for `‖λ(x)‖` on free groups.
pub fn haagerup_upper_bound(x: &GroupRingElement) -> Result<NormEstimate> {
    if !x.model().is_free() {
        return Err(Error::Unsupported(format!("the Haagerup inequality bound needs a free group, not {}", x.model())));
    }
    let r = x.support_radius() as usize;
    let mut sq = vec![0.0f64; r + 1];
    for (s, a) in x.terms() {
        sq[s.word_length() as usize] += a.norm_sqr();
    }
    let value = sq.iter().enumerate().map(|(k, v)| (k + 1) as f64 * v.sqrt()).sum();
    Ok(NormEstimate::new("haagerup-inequality", None, value, BoundKind::UpperBound))
}

/// `|Σ_s α_s|`, the norm in the trivial representation. It equals the full
/// norm when every coefficient is a nonnegative real.
pub fn trivial_norm(x: &GroupRingElement) -> NormEstimate {
    let value = x.coefficient_sum().norm();
    let nonneg = x.terms().all(|(_, a)| a.im == 0.0 && a.re >= 0.0);
    let kind = if nonneg { BoundKind::Exact } else { BoundKind::LowerBound };
    NormEstimate::new("trivial-representation", None, value, kind)
}

/// Coefficients of `x` in the sphere basis `χ_k = Σ_{|s|=k} s`, when `x` is radial.
pub fn radial_coefficients(x: &GroupRingElement) -> Option<Vec<C>> {
    let model = x.model();
    let r = x.support_radius();
    let mut coeffs = vec![ZERO; r as usize + 1];
    let mut counts = vec![0u128; r as usize + 1];
    let mut seen = vec![false; r as usize + 1];
    for (s, a) in x.terms() {
        let k = s.word_length() as usize;
        if seen[k] && coeffs[k] != *a {
            return None;
        }
        seen[k] = true;
        coeffs[k] = *a;
        counts[k] += 1;
    }
    for k in 0..=r {
        if seen[k as usize] && counts[k as usize] != model.sphere_count(k) {
            return None;
        }
    }
    Some(coeffs)
}

/// Exact `‖λ(x)‖` for radial `x` on a free group, up to a certified relative
/// error: `x = p(χ₁)` and `λ(χ₁)` has spectrum `[-2√q, 2√q]`, so the norm is
/// `sup |p|` there. The sup is sampled on a uniform grid and inflated by the
/// Markov-inequality factor `1/(1 − d²/N)`.
pub fn radial_spectral_bound(x: &GroupRingElement) -> Result<NormEstimate> {
    let model = x.model();
    let GroupKind::Free { rank } = model.kind() else {
        return Err(Error::Unsupported(format!("the radial spectral bound needs a free group, not {model}")));
    };
    let a = radial_coefficients(x).ok_or_else(|| Error::Unsupported("element is not radial".into()))?;
    let d = a.len() - 1;
    let q = 2.0 * rank as f64 - 1.0;
    let half_width = 2.0 * q.sqrt();
    let eval = |t: f64| -> C {
        // χ_0 = 1, χ_1 = t, χ_2 = t² − 2m, χ_{k+1} = tχ_k − qχ_{k−1}
        let mut acc = a[0];
        let (mut prev, mut cur) = (1.0, t);
        for (k, ak) in a.iter().enumerate().skip(1) {
            acc += ak * cur;
            let next = if k == 1 { t * cur - 2.0 * rank as f64 * prev } else { t * cur - q * prev };
            prev = cur;
            cur = next;
        }
        acc
    };
    let grid = (4_000_000usize).max(4_000 * d * d);
    let mut best: f64 = 0.0;
    for i in 0..=grid {
        let t = -half_width + 2.0 * half_width * i as f64 / grid as f64;
        best = best.max(eval(t).norm());
    }
    let markov = (d * d) as f64 / grid as f64;
    let value = best / (1.0 - markov);
    let mut est = NormEstimate::new("radial-spectral", None, value, BoundKind::UpperBound);
    est.tolerances.eigenvalue = Some(markov);
    Ok(est)
}

/// Best available upper bound for `‖λ(x)‖` on free groups.
pub fn reduced_upper_bound(x: &GroupRingElement) -> Result<Option<NormEstimate>> {
    if !x.model().is_free() {
        return Ok(None);
    }
    let h = haagerup_upper_bound(x)?;
    if radial_coefficients(x).is_some() {
        let r = radial_spectral_bound(x)?;
        if r.value < h.value {
            return Ok(Some(r));
        }
    }
    Ok(Some(h))
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{GroupModel, DEFAULT_BUDGET};

    fn f2() -> GroupModel {
        GroupModel::free(2).unwrap()
    }

    #[test]
    fn identity_has_norm_one() {
        for m in ["F2", "Z2", "Dinf", "ZmodN:4"] {
            let m: GroupModel = m.parse().unwrap();
            let e = GroupRingElement::identity(m);
            let r = reduced_norm_lower(&e, 3, DEFAULT_BUDGET).unwrap();
            assert!((r.value - 1.0).abs() < 1e-12);
            assert_eq!(trivial_norm(&e).bound_kind, BoundKind::Exact);
        }
    }

    #[test]
    fn haagerup_bounds() {
        let m = f2();
        let gensum = GroupRingElement::generator_sum(m);
        assert_eq!(haagerup_upper_bound(&GroupRingElement::identity(m)).unwrap().value, 1.0);
        assert_eq!(haagerup_upper_bound(&GroupRingElement::parse(m, "a").unwrap()).unwrap().value, 2.0);
        assert_eq!(haagerup_upper_bound(&gensum).unwrap().value, 4.0);
        assert!(haagerup_upper_bound(&GroupRingElement::generator_sum(GroupModel::free_abelian(2).unwrap())).is_err());
    }

    #[test]
    fn radial_bound_is_kesten() {
        let gensum = GroupRingElement::generator_sum(f2());
        let b = radial_spectral_bound(&gensum).unwrap();
        let kesten = 2.0 * 3f64.sqrt();
        assert!(b.value >= kesten && b.value < kesten * (1.0 + 1e-6));
    }

    #[test]
    fn trivial_norm_cancellation() {
        let x = GroupRingElement::parse(f2(), "a - e").unwrap();
        let t = trivial_norm(&x);
        assert_eq!(t.value, 0.0);
        assert_eq!(t.bound_kind, BoundKind::LowerBound);
    }

    #[test]
    fn operator_entries_and_adjoint() {
        let x = GroupRingElement::parse(f2(), "a + 2b^-1 - (0+1i)ab").unwrap();
        let op = ConvolutionOperator::new(&x, 2, DEFAULT_BUDGET).unwrap();
        let m = f2();
        for (si, s) in op.domain().elements().iter().enumerate().take(9) {
            for (ti, t) in op.codomain().elements().iter().enumerate() {
                let want = x.coefficient(&m.compose(t, &m.inverse(s)).unwrap());
                assert_eq!(op.entry(ti, si), want);
            }
        }
        let v: Vec<C> = (0..op.domain().len()).map(|i| C::new(i as f64, 1.0)).collect();
        let w: Vec<C> = (0..op.codomain().len()).map(|i| C::new(1.0, -(i as f64))).collect();
        let lhs = linalg::dot(&op.apply(&v), &w);
        let rhs = linalg::dot(&v, &op.apply_adjoint(&w));
        assert!((lhs - rhs).norm() < 1e-9 * lhs.norm());
    }
}
