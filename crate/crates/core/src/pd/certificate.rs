//! Tail certificates: closed-form information about a function outside any
//! finite window, used to decide ideal membership.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::linalg::C;

/// Behaviour of per-sphere suprema beyond the listed radii.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupDecay {
    Unknown,
    /// sphere suprema tend to zero
    Vanishing,
    /// some subsequence of sphere suprema tends to zero
    VanishingSubsequence,
}

/// What is known about `|h(s)|` for large `|s|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailCertificate {
    None,
    /// `h(s) = 0` whenever `|s| > radius`.
    FiniteSupport { radius: u32 },
    /// `floor·ratio^|s| ≤ |h(s)| ≤ amplitude·ratio^|s|`; `floor = 0` means no lower bound.
    ExpDecay { amplitude: f64, ratio: f64, floor: f64 },
    /// `sup_{|s|=k} |h(s)| ≤ bounds[k]` for `k < bounds.len()`, `≤ beyond` afterwards.
    SphereSup { bounds: Vec<f64>, beyond: f64, decay: SupDecay },
    /// `|h(s)| ≥ epsilon` whenever `|s| > radius`.
    BoundedBelow { epsilon: f64, radius: u32 },
}

const REL_SLACK: f64 = 1e-9;
const ABS_SLACK: f64 = 1e-12;

impl TailCertificate {
    pub fn exp_decay(amplitude: f64, ratio: f64) -> Self {
        TailCertificate::ExpDecay { amplitude, ratio, floor: 0.0 }
    }

    /// Upper bound on `|h|` over the sphere of radius `k`, if any.
    pub fn upper_at(&self, k: u32) -> Option<f64> {
        match self {
            TailCertificate::None | TailCertificate::BoundedBelow { .. } => None,
            TailCertificate::FiniteSupport { radius } => (k > *radius).then_some(0.0),
            TailCertificate::ExpDecay { amplitude, ratio, .. } => Some(amplitude * ratio.powi(k as i32)),
            TailCertificate::SphereSup { bounds, beyond, .. } => {
                Some(bounds.get(k as usize).copied().unwrap_or(*beyond))
            }
        }
    }

    /// Lower bound on `|h|` over the sphere of radius `k`, if any.
    pub fn lower_at(&self, k: u32) -> Option<f64> {
        match self {
            TailCertificate::ExpDecay { ratio, floor, .. } if *floor > 0.0 => Some(floor * ratio.powi(k as i32)),
            TailCertificate::BoundedBelow { epsilon, radius } if k > *radius => Some(*epsilon),
            _ => None,
        }
    }

    /// Uniform bound on `|h|` derivable from the certificate alone.
    pub fn sup_bound(&self) -> Option<f64> {
        match self {
            TailCertificate::ExpDecay { amplitude, ratio, .. } if *ratio <= 1.0 => Some(*amplitude),
            TailCertificate::SphereSup { bounds, beyond, .. } => Some(bounds.iter().copied().fold(*beyond, f64::max)),
            _ => None,
        }
    }

    /// Checks a single evaluation against the certificate.
    pub fn check(&self, s: &GroupElement, value: C) -> Result<()> {
        self.check_at(s.word_length(), value.norm(), || s.to_string())
    }

    /// Checks `|h| = v` somewhere on the sphere of radius `k`.
    pub fn check_at(&self, k: u32, v: f64, place: impl Fn() -> String) -> Result<()> {
        if let Some(up) = self.upper_at(k) {
            if v > up * (1.0 + REL_SLACK) + ABS_SLACK {
                return Err(Error::CertificateViolation {
                    element: place(),
                    detail: format!("|h| = {v:e} exceeds the certified bound {up:e}"),
                });
            }
        }
        if let Some(low) = self.lower_at(k) {
            if v < low * (1.0 - REL_SLACK) - ABS_SLACK {
                return Err(Error::CertificateViolation {
                    element: place(),
                    detail: format!("|h| = {v:e} is below the certified floor {low:e}"),
                });
            }
        }
        Ok(())
    }

    /// Certificate of `c·h`.
    pub fn scaled(&self, c: f64) -> Self {
        let c = c.abs();
        match self {
            _ if c == 0.0 => TailCertificate::FiniteSupport { radius: 0 },
            TailCertificate::None => TailCertificate::None,
            TailCertificate::FiniteSupport { radius } => TailCertificate::FiniteSupport { radius: *radius },
            TailCertificate::ExpDecay { amplitude, ratio, floor } => {
                TailCertificate::ExpDecay { amplitude: amplitude * c, ratio: *ratio, floor: floor * c }
            }
            TailCertificate::SphereSup { bounds, beyond, decay } => TailCertificate::SphereSup {
                bounds: bounds.iter().map(|b| b * c).collect(),
                beyond: beyond * c,
                decay: *decay,
            },
            TailCertificate::BoundedBelow { epsilon, radius } => {
                TailCertificate::BoundedBelow { epsilon: epsilon * c, radius: *radius }
            }
        }
    }

    /// Certificate of the pointwise product, given optional uniform bounds of
    /// the two factors.
    pub fn product(a: &Self, sup_a: Option<f64>, b: &Self, sup_b: Option<f64>) -> Self {
        use TailCertificate as T;
        match (a, b) {
            (T::FiniteSupport { radius: r1 }, T::FiniteSupport { radius: r2 }) => T::FiniteSupport { radius: (*r1).min(*r2) },
            (T::FiniteSupport { radius }, _) | (_, T::FiniteSupport { radius }) => T::FiniteSupport { radius: *radius },
            (
                T::ExpDecay { amplitude: a1, ratio: c1, floor: f1 },
                T::ExpDecay { amplitude: a2, ratio: c2, floor: f2 },
            ) => T::ExpDecay { amplitude: a1 * a2, ratio: c1 * c2, floor: f1 * f2 },
            (T::ExpDecay { amplitude, ratio, .. }, _) => match sup_b {
                Some(m) => T::ExpDecay { amplitude: amplitude * m, ratio: *ratio, floor: 0.0 },
                None => T::None,
            },
            (_, T::ExpDecay { amplitude, ratio, .. }) => match sup_a {
                Some(m) => T::ExpDecay { amplitude: amplitude * m, ratio: *ratio, floor: 0.0 },
                None => T::None,
            },
            (
                T::SphereSup { bounds: b1, beyond: x1, decay: d1 },
                T::SphereSup { bounds: b2, beyond: x2, decay: d2 },
            ) => {
                let len = b1.len().max(b2.len());
                let at = |b: &Vec<f64>, x: f64, k: usize| b.get(k).copied().unwrap_or(x);
                let decay = match (d1, d2) {
                    (SupDecay::Vanishing, _) | (_, SupDecay::Vanishing) => SupDecay::Vanishing,
                    _ => SupDecay::Unknown,
                };
                T::SphereSup {
                    bounds: (0..len).map(|k| at(b1, *x1, k) * at(b2, *x2, k)).collect(),
                    beyond: x1 * x2,
                    decay,
                }
            }
            (T::SphereSup { bounds, beyond, decay }, _) => match sup_b {
                Some(m) => T::SphereSup { bounds: bounds.iter().map(|x| x * m).collect(), beyond: beyond * m, decay: *decay },
                None => T::None,
            },
            (_, T::SphereSup { bounds, beyond, decay }) => match sup_a {
                Some(m) => T::SphereSup { bounds: bounds.iter().map(|x| x * m).collect(), beyond: beyond * m, decay: *decay },
                None => T::None,
            },
            (T::BoundedBelow { epsilon: e1, radius: r1 }, T::BoundedBelow { epsilon: e2, radius: r2 }) => {
                T::BoundedBelow { epsilon: e1 * e2, radius: (*r1).max(*r2) }
            }
            _ => T::None,
        }
    }

    /// Certificate of `h^k`.
    pub fn power(&self, k: u32) -> Self {
        use TailCertificate as T;
        let k_i = k as i32;
        match self {
            T::None => T::None,
            T::FiniteSupport { radius } => T::FiniteSupport { radius: *radius },
            T::ExpDecay { amplitude, ratio, floor } => T::ExpDecay {
                amplitude: amplitude.powi(k_i),
                ratio: ratio.powi(k_i),
                floor: floor.powi(k_i),
            },
            T::SphereSup { bounds, beyond, decay } => T::SphereSup {
                bounds: bounds.iter().map(|b| b.powi(k_i)).collect(),
                beyond: beyond.powi(k_i),
                decay: *decay,
            },
            T::BoundedBelow { epsilon, radius } => T::BoundedBelow { epsilon: epsilon.powi(k_i), radius: *radius },
        }
    }

    /// Certificate of a translate `s ↦ h(g⁻¹s)` or `s ↦ h(sg)` with `|g| = shift`.
    pub fn translated(&self, shift: u32) -> Self {
        use TailCertificate as T;
        let d = shift as i32;
        match self {
            T::None => T::None,
            T::FiniteSupport { radius } => T::FiniteSupport { radius: radius + shift },
            T::ExpDecay { amplitude, ratio, floor } => T::ExpDecay {
                amplitude: amplitude * ratio.powi(-d),
                ratio: *ratio,
                floor: floor * ratio.powi(d),
            },
            T::SphereSup { bounds, beyond, decay } => {
                let at = |j: i64| -> f64 {
                    if j < 0 {
                        0.0
                    } else {
                        bounds.get(j as usize).copied().unwrap_or(*beyond)
                    }
                };
                let len = bounds.len() + shift as usize;
                let new_bounds = (0..len as i64)
                    .map(|k| ((k - d as i64)..=(k + d as i64)).map(at).fold(0.0, f64::max))
                    .collect();
                T::SphereSup { bounds: new_bounds, beyond: *beyond, decay: *decay }
            }
            T::BoundedBelow { epsilon, radius } => T::BoundedBelow { epsilon: *epsilon, radius: radius + shift },
        }
    }
}
