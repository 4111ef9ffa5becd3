//! Radon–Nikodym cocycles, the covariant representation on `L²(X, μ)`,
//! envelopes and fixed vectors.

use faer::Mat;
use serde::Serialize;

use super::FiniteSystem;
use crate::error::{Error, Result};
use crate::group::{GroupElement, DEFAULT_BUDGET};
use crate::linalg::{self, C, ZERO};
use crate::rep::FiniteUnitaryRep;

/// Tolerance for the exact identities of this module.
pub const EXACT_TOL: f64 = 1e-12;

/// `ρ_s(x) = μ(s⁻¹.x)/μ(x)` for the action `(s.f)(x) = f(s⁻¹.x)`, checked
/// against `∫ f dμ = ∫ (s.f) ρ_s dμ` for every `f = δ_y`.
pub fn radon_nikodym(system: &FiniteSystem, s: &GroupElement) -> Result<Vec<f64>> {
    system.check_model(s)?;
    let mu = system.measure();
    let s_inv = system.model().inverse(s);
    let back = system.permutation_of(&s_inv);
    let rho: Vec<f64> = (0..system.points()).map(|x| mu[back[x]] / mu[x]).collect();
    // ∫ (s.δ_y) ρ_s dμ = Σ_{x : s⁻¹.x = y} ρ_s(x) μ(x)
    let mut rhs = vec![0.0; system.points()];
    for x in 0..system.points() {
        rhs[back[x]] += rho[x] * mu[x];
    }
    for (y, (&lhs, &r)) in mu.iter().zip(&rhs).enumerate() {
        if (lhs - r).abs() > EXACT_TOL * lhs.max(1.0) {
            return Err(Error::Consistency(format!(
                "defining identity fails for f = δ_{y} and s = {s}: {lhs} vs {r}"
            )));
        }
    }
    Ok(rho)
}

/// The cocycle `s ↦ ρ_s`, stored on generators and extended by the chain
/// rule `ρ_{st}(x) = ρ_s(x)·ρ_t(s⁻¹.x)`.
#[derive(Clone, Debug)]
pub struct Cocycle {
    system: FiniteSystem,
    /// indexed by letter code
    letters: Vec<Vec<f64>>,
}

impl Cocycle {
    pub fn new(system: &FiniteSystem) -> Result<Self> {
        let model = system.model();
        let letters = (0..2 * model.num_generators())
            .map(|code| {
                let g = model.generator(code / 2)?;
                let s = if code % 2 == 0 { g } else { model.inverse(&g) };
                radon_nikodym(system, &s)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { system: system.clone(), letters })
    }

    pub fn generator_values(&self, generator: usize) -> &[f64] {
        &self.letters[2 * generator]
    }

    /// `ρ_s` from the generator values by the chain rule.
    pub fn rho(&self, s: &GroupElement) -> Result<Vec<f64>> {
        self.system.check_model(s)?;
        let letters = s.letters();
        let model = self.system.model();
        Ok((0..self.system.points())
            .map(|x| {
                let mut y = x;
                let mut acc = 1.0;
                for &l in &letters {
                    acc *= self.letters[l as usize][y];
                    // move to l⁻¹.y
                    let inv = model.inverse(&model.letter(l).expect("valid letter"));
                    y = self.system.act(&inv, y);
                }
                acc
            })
            .collect())
    }

    /// `max_x |ρ_{st}(x) − ρ_s(x)·ρ_t(s⁻¹.x)|`, all three from the direct formula.
    pub fn chain_rule_defect(&self, s: &GroupElement, t: &GroupElement) -> Result<f64> {
        let model = self.system.model();
        let st = model.compose(s, t)?;
        let (rs, rt, rst) = (
            radon_nikodym(&self.system, s)?,
            radon_nikodym(&self.system, t)?,
            radon_nikodym(&self.system, &st)?,
        );
        let s_inv = model.inverse(s);
        Ok((0..self.system.points())
            .map(|x| (rst[x] - rs[x] * rt[self.system.act(&s_inv, x)]).abs())
            .fold(0.0, f64::max))
    }
}

/// `(U_s f)(x) = f(s⁻¹.x)·ρ_s(x)^{1/2}` and `M_f` on `L²(X, μ)`, in the
/// basis of point masses.
#[derive(Clone, Debug)]
pub struct CovariantRep {
    system: FiniteSystem,
}

fn max_abs(m: &Mat<C>) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            worst = worst.max(m[(i, j)].norm());
        }
    }
    worst
}

impl CovariantRep {
    pub fn system(&self) -> &FiniteSystem {
        &self.system
    }

    pub fn u(&self, s: &GroupElement) -> Result<Mat<C>> {
        let rho = radon_nikodym(&self.system, s)?;
        let back = self.system.permutation_of(&self.system.model().inverse(s));
        let n = self.system.points();
        Ok(Mat::from_fn(n, n, |x, y| if back[x] == y { C::new(rho[x].sqrt(), 0.0) } else { ZERO }))
    }

    pub fn multiplication(&self, f: &[C]) -> Mat<C> {
        let n = self.system.points();
        Mat::from_fn(n, n, |i, j| if i == j { f[i] } else { ZERO })
    }

    /// The adjoint in `L²(μ)`: `T† = D⁻¹ T* D` with `D = diag(μ)`.
    pub fn adjoint(&self, t: &Mat<C>) -> Mat<C> {
        let mu = self.system.measure();
        Mat::from_fn(t.nrows(), t.ncols(), |i, j| t[(j, i)].conj() * mu[j] / mu[i])
    }

    /// `max |U_s†U_s − I|`.
    pub fn unitarity_defect(&self, s: &GroupElement) -> Result<f64> {
        let u = self.u(s)?;
        let p = self.adjoint(&u) * &u;
        let n = self.system.points();
        Ok(max_abs(&Mat::from_fn(n, n, |i, j| p[(i, j)] - if i == j { C::new(1.0, 0.0) } else { ZERO })))
    }

    /// `max |U_s M_f U_s† − M_{s.f}|`.
    pub fn covariance_defect(&self, s: &GroupElement, f: &[C]) -> Result<f64> {
        let u = self.u(s)?;
        let lhs = &u * self.multiplication(f) * self.adjoint(&u);
        let back = self.system.permutation_of(&self.system.model().inverse(s));
        let sf: Vec<C> = (0..self.system.points()).map(|x| f[back[x]]).collect();
        let rhs = self.multiplication(&sf);
        Ok(max_abs(&(lhs - rhs)))
    }

    /// `max |U_{st} − U_s U_t|`.
    pub fn homomorphism_defect(&self, s: &GroupElement, t: &GroupElement) -> Result<f64> {
        let st = self.system.model().compose(s, t)?;
        Ok(max_abs(&(self.u(&st)? - self.u(s)? * self.u(t)?)))
    }

    /// The same representation in the orthonormal basis `δ_x/√μ(x)`.
    pub fn to_unitary_rep(&self) -> Result<FiniteUnitaryRep> {
        let model = self.system.model();
        let mu = self.system.measure();
        let images = (0..model.num_generators())
            .map(|i| {
                let u = self.u(&model.generator(i)?)?;
                Ok(Mat::from_fn(u.nrows(), u.ncols(), |x, y| u[(x, y)] * (mu[x] / mu[y]).sqrt()))
            })
            .collect::<Result<Vec<_>>>()?;
        FiniteUnitaryRep::new(model, images)
    }

    /// Smallest eigenvalue of `Σ_s (I − U_s)†(I − U_s)` over the symmetric
    /// generators, with the minimizing vector as a function on `X`
    /// (unit norm in `L²(μ)`).
    pub fn spectral_gap(&self) -> Result<SpectralGap> {
        let mut gap = spectral_gap(&self.to_unitary_rep()?)?;
        let mu = self.system.measure();
        for (v, m) in gap.vector.iter_mut().zip(mu) {
            *v /= m.sqrt();
        }
        Ok(gap)
    }

    /// `Σ_s ‖U_s f − f‖² / ‖f‖²` in `L²(μ)` over the symmetric generators.
    pub fn invariance_defect(&self, f: &[C]) -> Result<f64> {
        let mu = self.system.measure();
        let norm2 = |v: &[C]| v.iter().zip(mu).map(|(z, m)| z.norm_sqr() * m).sum::<f64>();
        let base = norm2(f);
        if base == 0.0 {
            return Err(Error::InvalidArgument("zero vector".into()));
        }
        let mut total = 0.0;
        for s in self.system.model().symmetric_generators() {
            let uf = linalg::mat_vec(&self.u(&s)?, f);
            let diff: Vec<C> = uf.iter().zip(f).map(|(a, b)| a - b).collect();
            total += norm2(&diff);
        }
        Ok(total / base)
    }
}

/// Builds the covariant pair and verifies unitarity, covariance on point
/// masses and `U_{st} = U_s U_t` on generator pairs; any failure is an
/// internal inconsistency.
pub fn covariant_rep(system: &FiniteSystem) -> Result<CovariantRep> {
    let rep = CovariantRep { system: system.clone() };
    let gens = system.model().symmetric_generators();
    let n = system.points();
    for s in &gens {
        let d = rep.unitarity_defect(s)?;
        if d > EXACT_TOL {
            return Err(Error::Consistency(format!("U_{s} is not unitary on L²(μ): defect {d:e}")));
        }
        for y in 0..n {
            let f: Vec<C> = (0..n).map(|x| if x == y { C::new(1.0, 0.0) } else { ZERO }).collect();
            let d = rep.covariance_defect(s, &f)?;
            if d > EXACT_TOL {
                return Err(Error::Consistency(format!("covariance fails for U_{s} and δ_{y}: defect {d:e}")));
            }
        }
        for t in &gens {
            let d = rep.homomorphism_defect(s, t)?;
            if d > EXACT_TOL {
                return Err(Error::Consistency(format!("U_{s}U_{t} differs from U_({s}{t}): defect {d:e}")));
            }
        }
    }
    Ok(rep)
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralGap {
    pub lambda_min: f64,
    #[serde(serialize_with = "crate::dynamics::serialize_complex_vec")]
    pub vector: Vec<C>,
    /// `λ_min ≤ FIXED_TOL`: the vector is a common fixed vector
    pub fixed: bool,
}

pub const FIXED_TOL: f64 = 1e-10;

/// Smallest eigenvalue of `Σ_s (I − π(s))*(I − π(s))` over the symmetric
/// generators, with a unit minimizing vector whose largest entry is real
/// and positive.
pub fn spectral_gap(rep: &FiniteUnitaryRep) -> Result<SpectralGap> {
    let model = rep.model();
    let d = rep.dim();
    let mut op = Mat::<C>::zeros(d, d);
    for s in model.symmetric_generators() {
        let u = rep.evaluate_word(&s)?;
        let m = Mat::from_fn(d, d, |i, j| if i == j { C::new(1.0, 0.0) } else { ZERO }) - u;
        op += m.adjoint() * &m;
    }
    let (vals, vecs) = linalg::hermitian_eigen(&linalg::symmetrize(&op))?;
    let lambda_min = vals[0].max(0.0);
    let mut vector: Vec<C> = (0..d).map(|i| vecs[(i, 0)]).collect();
    let pivot = vector.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap_or(ZERO);
    if pivot != ZERO {
        let phase = pivot.conj() / pivot.norm();
        vector.iter_mut().for_each(|v| *v *= phase);
    }
    Ok(SpectralGap { lambda_min, vector, fixed: lambda_min <= FIXED_TOL })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnvelopeScope {
    /// `s` ranges over `ball(R)`
    Ball(u32),
    /// `s` ranges over the whole group, through the orbits
    All,
}

#[derive(Clone, Debug, Serialize)]
pub struct Envelopes {
    pub scope: String,
    /// `ρ̄(x) = sup_s ρ_s(x)`
    pub upper: Vec<f64>,
    /// `ρ̲(x) = inf_s ρ_s(x)`
    pub lower: Vec<f64>,
    pub upper_attained_at: Vec<String>,
    pub lower_attained_at: Vec<String>,
    pub upper_integral: f64,
    pub lower_integral: f64,
    /// for ball scopes: whether radius `R−1` already gives the same envelopes
    pub stabilized: Option<bool>,
}

fn envelope_pass(system: &FiniteSystem, elements: &[GroupElement]) -> Result<(Vec<(f64, String)>, Vec<(f64, String)>)> {
    let n = system.points();
    let mut up = vec![(f64::NEG_INFINITY, String::new()); n];
    let mut low = vec![(f64::INFINITY, String::new()); n];
    for s in elements {
        let rho = radon_nikodym(system, s)?;
        for x in 0..n {
            if rho[x] > up[x].0 {
                up[x] = (rho[x], s.to_string());
            }
            if rho[x] < low[x].0 {
                low[x] = (rho[x], s.to_string());
            }
        }
    }
    Ok((up, low))
}

/// Pointwise sup and inf of `ρ_s(x)` over the scope, with attaining elements
/// and integrals against `μ`. The identity is always in scope, so
/// `ρ̲ ≤ 1 ≤ ρ̄`.
pub fn envelopes(system: &FiniteSystem, scope: EnvelopeScope) -> Result<Envelopes> {
    let mu = system.measure();
    let n = system.points();
    let model = system.model();
    let (up, low, stabilized, label) = match scope {
        EnvelopeScope::Ball(r) => {
            let ball = model.ball(r, DEFAULT_BUDGET)?;
            let (up, low) = envelope_pass(system, ball.elements())?;
            let stabilized = if r == 0 {
                None
            } else {
                let (up0, low0) = envelope_pass(system, &ball.elements()[..ball.sphere_start(r)])?;
                Some(up.iter().zip(&up0).all(|(a, b)| a.0 == b.0) && low.iter().zip(&low0).all(|(a, b)| a.0 == b.0))
            };
            (up, low, stabilized, format!("ball({r})"))
        }
        EnvelopeScope::All => {
            // ρ_s(x) depends on s only through y = s⁻¹.x, which ranges over the orbit of x
            let mut up = Vec::with_capacity(n);
            let mut low = Vec::with_capacity(n);
            for x in 0..n {
                let mut best = (f64::NEG_INFINITY, String::new());
                let mut worst = (f64::INFINITY, String::new());
                for (y, w) in system.orbit(x) {
                    let v = mu[y] / mu[x];
                    let s = model.inverse(&w).to_string();
                    if v > best.0 {
                        best = (v, s.clone());
                    }
                    if v < worst.0 {
                        worst = (v, s);
                    }
                }
                up.push(best);
                low.push(worst);
            }
            (up, low, None, "all".to_string())
        }
    };
    let upper: Vec<f64> = up.iter().map(|p| p.0).collect();
    let lower: Vec<f64> = low.iter().map(|p| p.0).collect();
    Ok(Envelopes {
        scope: label,
        upper_integral: upper.iter().zip(mu).map(|(a, m)| a * m).sum(),
        lower_integral: lower.iter().zip(mu).map(|(a, m)| a * m).sum(),
        upper,
        lower,
        upper_attained_at: up.into_iter().map(|p| p.1).collect(),
        lower_attained_at: low.into_iter().map(|p| p.1).collect(),
        stabilized,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Candidate {
    pub name: String,
    pub vector: Vec<f64>,
    /// `Σ_s ‖U_s f − f‖²/‖f‖²`
    pub defect: f64,
    pub fixed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DnReport {
    pub system: String,
    pub points: usize,
    pub envelopes: Envelopes,
    pub upper_integrable: bool,
    pub lower_positive: bool,
    pub caveat: String,
    pub candidates: Vec<Candidate>,
    pub lambda_min: f64,
    pub fixed_vector_exists: bool,
    #[serde(serialize_with = "crate::dynamics::serialize_complex_vec")]
    pub fixed_vector: Vec<C>,
}

/// Envelopes, candidate invariant vectors and the fixed space of the
/// covariant representation.
pub fn dn_report(system: &FiniteSystem) -> Result<DnReport> {
    let env = envelopes(system, EnvelopeScope::All)?;
    let rep = covariant_rep(system)?;
    let gap = rep.spectral_gap()?;
    let mu = system.measure();
    let named = [
        ("sqrt(upper envelope)", env.upper.iter().map(|v| v.sqrt()).collect::<Vec<_>>()),
        ("sqrt(lower envelope)", env.lower.iter().map(|v| v.sqrt()).collect()),
        ("mu^(-1/2)", mu.iter().map(|m| m.powf(-0.5)).collect()),
    ];
    let candidates = named
        .into_iter()
        .map(|(name, v)| {
            let f: Vec<C> = v.iter().map(|&a| C::new(a, 0.0)).collect();
            let defect = rep.invariance_defect(&f)?;
            Ok(Candidate { name: name.into(), vector: v, defect, fixed: defect <= FIXED_TOL })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DnReport {
        system: system.model().to_string(),
        points: system.points(),
        upper_integrable: env.upper_integral.is_finite(),
        lower_positive: env.lower.iter().all(|&v| v > 0.0),
        caveat: "on a finite space the upper envelope is always integrable and the lower envelope always positive".into(),
        envelopes: env,
        candidates,
        lambda_min: gap.lambda_min,
        fixed_vector_exists: gap.fixed,
        fixed_vector: gap.vector,
    })
}
