//! Ideals of `ℓ∞(Γ)`, `ℓ^p` norms with certified tails, and three-valued
//! membership.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use super::{GroupFunction, SupDecay, TailCertificate};
use crate::error::{Error, Result};
use crate::group::{GroupKind, GroupModel, DEFAULT_BUDGET};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum IdealSpec {
    /// finitely supported functions
    CC,
    /// functions vanishing at infinity
    C0,
    Lp(f64),
    Linf,
    /// `∩_{ε>0} ℓ^{2+ε}`
    L2Plus,
    /// functions with `inf_{s∉F} |f(s)| = 0` for every finite `F`
    TIdeal,
}

impl fmt::Display for IdealSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IdealSpec::CC => write!(f, "cc"),
            IdealSpec::C0 => write!(f, "c0"),
            IdealSpec::Lp(p) => write!(f, "l{p}"),
            IdealSpec::Linf => write!(f, "linf"),
            IdealSpec::L2Plus => write!(f, "l2plus"),
            IdealSpec::TIdeal => write!(f, "t"),
        }
    }
}

impl Serialize for IdealSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for IdealSpec {
    type Err = Error;

    /// Accepts `cc`, `c0`, `linf`, `l2plus`, `t`, and `lp:<p>` or `l<p>`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        let bad = |reason: &str| Error::Parse { input: s.to_string(), reason: reason.to_string() };
        match t.as_str() {
            "cc" | "c_c" => Ok(IdealSpec::CC),
            "c0" | "c_0" => Ok(IdealSpec::C0),
            "linf" => Ok(IdealSpec::Linf),
            "l2plus" | "l2+" => Ok(IdealSpec::L2Plus),
            "t" | "tideal" => Ok(IdealSpec::TIdeal),
            _ => {
                let p = t
                    .strip_prefix("lp:")
                    .or_else(|| t.strip_prefix('l'))
                    .ok_or_else(|| bad("expected cc, c0, lp:<p>, linf, l2plus or t"))?;
                let p: f64 = p.parse().map_err(|_| bad("malformed exponent"))?;
                if !(p >= 1.0 && p.is_finite()) {
                    return Err(bad("the exponent p must lie in [1, ∞)"));
                }
                Ok(IdealSpec::Lp(p))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Finite,
    Divergent,
    Undecided,
}

#[derive(Clone, Debug, Serialize)]
pub struct LpReport {
    pub p: f64,
    pub radius: u32,
    /// `Σ_{|s| ≤ R} |h(s)|^p`
    pub partial: f64,
    /// upper bound for `Σ_{|s| > R} |h(s)|^p`; `None` when no finite bound is available
    pub tail_bound: Option<f64>,
    pub total: Option<f64>,
    pub status: LpStatus,
    pub witness: String,
}

/// `Σ_{|s|≤R} |h(s)|^p` exactly, plus a certified bound on the rest.
pub fn lp_norm(h: &GroupFunction, p: f64, radius: u32) -> Result<LpReport> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidArgument(format!("p = {p} must lie in [1, ∞)")));
    }
    let model = h.model();
    let partial = sphere_sums(h, p, 0, radius)?;
    let finite = |tail: f64, witness: String| LpReport {
        p,
        radius,
        partial,
        tail_bound: Some(tail),
        total: Some(partial + tail),
        status: LpStatus::Finite,
        witness,
    };
    let open = |status: LpStatus, witness: String| LpReport {
        p,
        radius,
        partial,
        tail_bound: None,
        total: None,
        status,
        witness,
    };
    if let Some(diam) = model.diameter() {
        let tail = if radius >= diam { 0.0 } else { sphere_sums(h, p, radius + 1, diam)? };
        return Ok(finite(tail, format!("finite group of diameter {diam}")));
    }
    Ok(match h.tail() {
        TailCertificate::FiniteSupport { radius: r0 } => {
            let tail = if radius >= *r0 { 0.0 } else { sphere_sums(h, p, radius + 1, *r0)? };
            finite(tail, format!("finite support within radius {r0}"))
        }
        TailCertificate::ExpDecay { amplitude, ratio, floor } => {
            let x = ratio.powf(p);
            let growth = model.growth_constant();
            if growth * x < 1.0 {
                let tail = exp_tail(model, amplitude.powf(p), x, radius);
                finite(tail, format!("|h(s)| ≤ {amplitude}·{ratio}^|s| and {growth}·{ratio}^{p} = {} < 1", growth * x))
            } else if *floor > 0.0 && model.growth_rate() * x >= 1.0 {
                open(
                    LpStatus::Divergent,
                    format!(
                        "|h(s)| ≥ {floor}·{ratio}^|s| and growth rate {}·{ratio}^{p} = {} ≥ 1",
                        model.growth_rate(),
                        model.growth_rate() * x
                    ),
                )
            } else {
                open(
                    LpStatus::Undecided,
                    format!("growth constant {growth}·{ratio}^{p} = {} ≥ 1 and no divergence witness", growth * x),
                )
            }
        }
        TailCertificate::SphereSup { bounds, beyond, .. } if *beyond == 0.0 => {
            let mut tail = 0.0;
            for k in (radius + 1)..(bounds.len() as u32) {
                tail += model.sphere_count(k) as f64 * bounds[k as usize].powf(p);
            }
            finite(tail, format!("sphere suprema vanish beyond radius {}", bounds.len()))
        }
        TailCertificate::BoundedBelow { epsilon, radius: r } => open(
            LpStatus::Divergent,
            format!("|h(s)| ≥ {epsilon} for all |s| > {r} on an infinite group"),
        ),
        TailCertificate::SphereSup { .. } => {
            open(LpStatus::Undecided, "sphere suprema bounded but not summable from the certificate".into())
        }
        TailCertificate::None => open(LpStatus::Undecided, "no tail certificate".into()),
    })
}

/// `Σ_{from ≤ |s| ≤ to} |h(s)|^p`, sphere by sphere for radial functions.
fn sphere_sums(h: &GroupFunction, p: f64, from: u32, to: u32) -> Result<f64> {
    if from > to {
        return Ok(0.0);
    }
    let model = h.model();
    if h.is_radial() {
        let mut total = 0.0;
        for k in from..=to {
            let count = model.sphere_count(k);
            if count == 0 {
                continue;
            }
            let v = h.radial_value(k).expect("radial").norm();
            h.tail().check_at(k, v, || format!("the sphere of radius {k}"))?;
            total += count as f64 * v.powf(p);
        }
        return Ok(total);
    }
    let ball = model.ball(to, DEFAULT_BUDGET)?;
    let mut total = 0.0;
    for s in &ball.elements()[ball.sphere_start(from)..] {
        total += h.eval_checked(s)?.norm().powf(p);
    }
    Ok(total)
}

/// `Σ_{k>R} s(k)·a·x^k` where `C·x < 1`.
fn exp_tail(model: GroupModel, a: f64, x: f64, radius: u32) -> f64 {
    match model.kind() {
        GroupKind::Free { rank } => {
            // s(k) = 2m q^{k-1}
            let q = 2.0 * rank as f64 - 1.0;
            let qx = q * x;
            2.0 * rank as f64 * a * x * qx.powi(radius as i32) / (1.0 - qx)
        }
        GroupKind::InfiniteDihedral => 2.0 * a * x.powi(radius as i32 + 1) / (1.0 - x),
        _ => {
            // polynomial growth: sum until the geometric remainder bound is negligible
            let c = model.growth_constant();
            let cx = c * x;
            let mut total = 0.0;
            let mut k = radius + 1;
            loop {
                total += model.sphere_count(k) as f64 * a * x.powi(k as i32);
                let rest = a * cx.powi(k as i32 + 1) / (1.0 - cx);
                if rest <= 1e-17 * total || k > radius + 1_000_000 {
                    return total + rest;
                }
                k += 1;
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Member,
    NonMember,
    Undecided,
}

#[derive(Clone, Debug, Serialize)]
pub struct Membership {
    pub ideal: IdealSpec,
    pub function: String,
    pub verdict: Verdict,
    pub witness: String,
}

/// Classifies `h` against `D` from its certificate; never guesses.
pub fn ideal_membership(h: &GroupFunction, ideal: IdealSpec) -> Result<Membership> {
    use TailCertificate as T;
    use Verdict::*;
    let out = |verdict: Verdict, witness: String| {
        Ok(Membership { ideal, function: h.label().to_string(), verdict, witness })
    };
    let model = h.model();
    if model.is_finite() {
        return out(Member, format!("{model} is finite, so every function is finitely supported"));
    }
    let tail = h.tail();
    let bounded_below = match tail {
        T::BoundedBelow { epsilon, radius } => Some(format!("|h(s)| ≥ {epsilon} for |s| > {radius}")),
        T::ExpDecay { ratio, floor, .. } if *floor > 0.0 && *ratio >= 1.0 => {
            Some(format!("|h(s)| ≥ {floor}·{ratio}^|s| ≥ {floor}"))
        }
        _ => None,
    };
    match ideal {
        IdealSpec::CC => match tail {
            T::FiniteSupport { radius } => out(Member, format!("h vanishes beyond radius {radius}")),
            T::ExpDecay { floor, ratio, .. } if *floor > 0.0 => {
                out(NonMember, format!("|h(s)| ≥ {floor}·{ratio}^|s| > 0 everywhere"))
            }
            _ => match bounded_below {
                Some(w) => out(NonMember, w),
                None => out(Undecided, "certificate does not bound the support".into()),
            },
        },
        IdealSpec::C0 => {
            if let Some(w) = vanishing_witness(tail) {
                return out(Member, w);
            }
            match bounded_below {
                Some(w) => out(NonMember, w),
                None => out(Undecided, "certificate does not force decay".into()),
            }
        }
        IdealSpec::Lp(p) => {
            let r = lp_norm(h, p, 0)?;
            let verdict = match r.status {
                super::LpStatus::Finite => Member,
                super::LpStatus::Divergent => NonMember,
                super::LpStatus::Undecided => Undecided,
            };
            out(verdict, r.witness)
        }
        IdealSpec::Linf => {
            if let Some(b) = h.sup_bound().or(tail.sup_bound()) {
                out(Member, format!("|h| ≤ {b}"))
            } else if let T::FiniteSupport { radius } = tail {
                out(Member, format!("finitely many nonzero values within radius {radius}"))
            } else if h.known_unbounded() {
                out(NonMember, "h is the word length, which is unbounded".into())
            } else {
                out(Undecided, "no uniform bound is known".into())
            }
        }
        IdealSpec::L2Plus => match tail {
            T::FiniteSupport { radius } => out(Member, format!("h vanishes beyond radius {radius}")),
            T::SphereSup { beyond, bounds, .. } if *beyond == 0.0 => {
                out(Member, format!("h vanishes beyond radius {}", bounds.len()))
            }
            T::ExpDecay { ratio, floor, .. } => {
                let growth = model.growth_constant();
                let rate = model.growth_rate();
                if growth * ratio * ratio <= 1.0 {
                    out(Member, format!("{growth}·{ratio}^p < 1 for every p > 2"))
                } else if *floor > 0.0 && rate * ratio * ratio > 1.0 {
                    out(NonMember, format!("|h(s)| ≥ {floor}·{ratio}^|s| and {rate}·{ratio}^p ≥ 1 for p near 2"))
                } else {
                    out(Undecided, format!("{growth}·{ratio}^2 > 1 without a matching lower bound"))
                }
            }
            _ => match bounded_below {
                Some(w) => out(NonMember, w),
                None => out(Undecided, "certificate does not control ℓ^p norms".into()),
            },
        },
        IdealSpec::TIdeal => {
            if let Some(w) = vanishing_witness(tail) {
                return out(Member, w);
            }
            if let T::SphereSup { decay: SupDecay::VanishingSubsequence, .. } = tail {
                return out(Member, "sphere suprema have a subsequence tending to 0".into());
            }
            match bounded_below {
                Some(w) => out(NonMember, w),
                None => out(Undecided, "certificate gives no decay along any subsequence".into()),
            }
        }
    }
}

fn vanishing_witness(tail: &TailCertificate) -> Option<String> {
    use TailCertificate as T;
    match tail {
        T::FiniteSupport { radius } => Some(format!("h vanishes beyond radius {radius}")),
        T::ExpDecay { amplitude, ratio, .. } if *ratio < 1.0 => Some(format!("|h(s)| ≤ {amplitude}·{ratio}^|s|")),
        T::SphereSup { beyond, .. } if *beyond == 0.0 => Some("sphere suprema are eventually 0".into()),
        T::SphereSup { decay: SupDecay::Vanishing, .. } => Some("sphere suprema tend to 0".into()),
        _ => None,
    }
}
