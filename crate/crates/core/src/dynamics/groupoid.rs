//! Functions on the transformation groupoid `X ⋊ Γ`, their positivity,
//! Schur multipliers and action-level certificates.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use faer::Mat;
use serde::Serialize;

use super::cocycle::CovariantRep;
use super::FiniteSystem;
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupModel, DEFAULT_BUDGET};
use crate::linalg::{self, PsdReport, C, ZERO};
use crate::pd::{ideal_membership, GroupFunction, IdealSpec, TailCertificate, Verdict, DEFAULT_PSD_TOL};

type KernelFn = dyn Fn(usize, &GroupElement) -> C + Send + Sync;

#[derive(Clone)]
enum Node {
    Lift(GroupFunction),
    Custom(Arc<KernelFn>),
    Product(Arc<GroupoidFunction>, Arc<GroupoidFunction>),
}

/// `h: X × Γ → C` with a tail certificate in `s`, uniform over `x`.
#[derive(Clone)]
pub struct GroupoidFunction {
    model: GroupModel,
    points: usize,
    node: Node,
    tail: TailCertificate,
    label: String,
}

impl fmt::Debug for GroupoidFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupoidFunction({} on {} points of {})", self.label, self.points, self.model)
    }
}

impl GroupoidFunction {
    /// `h̃(x, s) = h(s)`.
    pub fn lift(h: &GroupFunction, points: usize) -> Self {
        Self {
            model: h.model(),
            points,
            tail: h.tail().clone(),
            label: format!("lift({})", h.label()),
            node: Node::Lift(h.clone()),
        }
    }

    pub fn custom(
        model: GroupModel,
        points: usize,
        label: impl Into<String>,
        tail: TailCertificate,
        f: impl Fn(usize, &GroupElement) -> C + Send + Sync + 'static,
    ) -> Self {
        Self { model, points, node: Node::Custom(Arc::new(f)), tail, label: label.into() }
    }

    pub fn one(model: GroupModel, points: usize) -> Self {
        Self::lift(&GroupFunction::one(model), points)
    }

    /// Pointwise product.
    pub fn product(&self, other: &Self) -> Result<Self> {
        if self.model != other.model || self.points != other.points {
            return Err(Error::ModelMismatch {
                left: format!("{} on {} points", self.model, self.points),
                right: format!("{} on {} points", other.model, other.points),
            });
        }
        let tail = TailCertificate::product(&self.tail, self.tail.sup_bound(), &other.tail, other.tail.sup_bound());
        Ok(Self {
            model: self.model,
            points: self.points,
            node: Node::Product(Arc::new(self.clone()), Arc::new(other.clone())),
            tail,
            label: format!("{}*{}", self.label, other.label),
        })
    }

    pub fn model(&self) -> GroupModel {
        self.model
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn tail(&self) -> &TailCertificate {
        &self.tail
    }

    pub fn eval(&self, x: usize, s: &GroupElement) -> C {
        match &self.node {
            Node::Lift(h) => h.eval(s),
            Node::Custom(f) => f(x, s),
            Node::Product(a, b) => a.eval(x, s) * b.eval(x, s),
        }
    }

    /// Evaluation with the point, model and tail certificate checked.
    pub fn eval_checked(&self, x: usize, s: &GroupElement) -> Result<C> {
        if x >= self.points {
            return Err(Error::InvalidArgument(format!("point {x} is outside 0..{}", self.points)));
        }
        if s.model() != self.model {
            return Err(Error::ModelMismatch { left: self.model.to_string(), right: s.model().to_string() });
        }
        let v = self.eval(x, s);
        self.tail.check(s, v)?;
        Ok(v)
    }

    fn check_system(&self, system: &FiniteSystem) -> Result<()> {
        if system.model() != self.model || system.points() != self.points {
            return Err(Error::ModelMismatch {
                left: format!("{} on {} points", self.model, self.points),
                right: format!("{} on {} points", system.model(), system.points()),
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GroupoidPdReport {
    pub per_point: Vec<PsdReport>,
    pub failing_points: Vec<usize>,
    pub passed: bool,
}

/// For each `x`, PSD-checks `M_x[i][j] = h(s_i.x, s_i s_j⁻¹)`.
pub fn groupoid_pd_check(
    h: &GroupoidFunction,
    system: &FiniteSystem,
    elements: &[GroupElement],
    tol: f64,
) -> Result<GroupoidPdReport> {
    h.check_system(system)?;
    let model = h.model;
    let mut seen = std::collections::HashSet::new();
    for s in elements {
        system.check_model(s)?;
        if !seen.insert(s) {
            return Err(Error::InvalidArgument(format!("window lists {s} twice")));
        }
    }
    let n = elements.len();
    let inv: Vec<GroupElement> = elements.iter().map(|s| model.inverse(s)).collect();
    let diffs: Vec<GroupElement> =
        (0..n * n).map(|k| model.compose_unchecked(&elements[k / n], &inv[k % n])).collect();
    let moved: Vec<Vec<usize>> = elements.iter().map(|s| system.permutation_of(s)).collect();
    let mut per_point = Vec::with_capacity(system.points());
    let mut failing_points = Vec::new();
    for x in 0..system.points() {
        let mut m = Mat::<C>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = h.eval_checked(moved[i][x], &diffs[i * n + j])?;
            }
        }
        let report = linalg::psd_check(&m, tol)?;
        if !report.passed() {
            failing_points.push(x);
        }
        per_point.push(report);
    }
    Ok(GroupoidPdReport { passed: failing_points.is_empty(), per_point, failing_points })
}

/// `Σ f_s s` in the convolution algebra, each `f_s` a function on `X`.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossedElement {
    model: GroupModel,
    points: usize,
    terms: BTreeMap<GroupElement, Vec<C>>,
}

impl CrossedElement {
    pub fn new(model: GroupModel, points: usize, terms: impl IntoIterator<Item = (GroupElement, Vec<C>)>) -> Result<Self> {
        let mut map: BTreeMap<GroupElement, Vec<C>> = BTreeMap::new();
        for (s, f) in terms {
            if s.model() != model {
                return Err(Error::ModelMismatch { left: model.to_string(), right: s.model().to_string() });
            }
            if f.len() != points {
                return Err(Error::InvalidArgument(format!("coefficient of {s} has {} entries, expected {points}", f.len())));
            }
            let slot = map.entry(s).or_insert_with(|| vec![ZERO; points]);
            for (a, b) in slot.iter_mut().zip(&f) {
                *a += b;
            }
        }
        map.retain(|_, f| f.iter().any(|z| *z != ZERO));
        Ok(Self { model, points, terms: map })
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GroupElement, &Vec<C>)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, s: &GroupElement) -> Option<&Vec<C>> {
        self.terms.get(s)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// `m_h(Σ f_s s) = Σ f_s·h(·, s) s`.
pub fn groupoid_schur_multiply(h: &GroupoidFunction, a: &CrossedElement) -> Result<CrossedElement> {
    if h.model != a.model || h.points != a.points {
        return Err(Error::ModelMismatch { left: h.model.to_string(), right: a.model.to_string() });
    }
    let terms = a
        .terms
        .iter()
        .map(|(s, f)| {
            let g = f.iter().enumerate().map(|(x, v)| Ok(v * h.eval_checked(x, s)?)).collect::<Result<Vec<_>>>()?;
            Ok((s.clone(), g))
        })
        .collect::<Result<Vec<_>>>()?;
    CrossedElement::new(a.model, a.points, terms)
}

/// `k(x, s) = h(x, s)·(U_s v)(x)·conj(v(x))·μ(x)`, so that
/// `φ_v(m_h(Σ f_s s)) = Σ_s Σ_x f_s(x)·k(x, s)` for the vector state `φ_v` of
/// the covariant representation.
pub fn state_kernel(h: &GroupoidFunction, rep: &CovariantRep, v: &[C]) -> Result<GroupoidFunction> {
    let system = rep.system().clone();
    h.check_system(&system)?;
    if v.len() != system.points() {
        return Err(Error::InvalidArgument(format!("vector has {} entries, expected {}", v.len(), system.points())));
    }
    let v: Vec<C> = v.to_vec();
    let h2 = h.clone();
    let label = format!("state_kernel({})", h.label);
    Ok(GroupoidFunction::custom(system.model(), system.points(), label, TailCertificate::None, move |x, s| {
        let model = system.model();
        let back = system.act(&model.inverse(s), x);
        let mu = system.measure();
        let uv = v[back] * (mu[back] / mu[x]).sqrt();
        h2.eval(x, s) * uv * v[x].conj() * mu[x]
    }))
}

/// `s ↦ φ_v(m_h(1·s)) = Σ_x k(x, s)`, the group-indexed state kernel.
pub fn state_function(h: &GroupoidFunction, rep: &CovariantRep, v: &[C]) -> Result<GroupFunction> {
    let k = state_kernel(h, rep, v)?;
    let n = k.points;
    let label = format!("phi_v∘m_h({})", h.label);
    Ok(GroupFunction::custom(k.model, label, TailCertificate::None, move |s| (0..n).map(|x| k.eval(x, s)).sum()))
}

/// `H(s) = max_x |h(x, s)|`, carrying the certificate of `h`.
pub fn sup_norm_profile(h: &GroupoidFunction) -> GroupFunction {
    let h2 = h.clone();
    let n = h.points;
    let label = format!("sup_x|{}|", h.label);
    GroupFunction::custom(h.model, label, h.tail.clone(), move |s| {
        C::new((0..n).map(|x| h2.eval(x, s).norm()).fold(0.0, f64::max), 0.0)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionKind {
    Amenable,
    ATmenable,
}

impl ActionKind {
    pub fn ideal(&self) -> IdealSpec {
        match self {
            ActionKind::Amenable => IdealSpec::CC,
            ActionKind::ATmenable => IdealSpec::C0,
        }
    }
}

impl std::str::FromStr for ActionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "amenable" => Ok(ActionKind::Amenable),
            "atmenable" | "a-t-menable" => Ok(ActionKind::ATmenable),
            _ => Err(Error::Parse { input: s.into(), reason: "expected amenable or atmenable".into() }),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ActionCheck {
    pub function: String,
    pub pd_passed: bool,
    pub failing_points: Vec<usize>,
    pub profile_membership: Verdict,
    pub profile_witness: String,
    /// `max_{x, |s| ≤ R_conv} |h(x, s) − 1|`
    pub deviation: f64,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ActionCertificate {
    pub kind: ActionKind,
    pub label: String,
    pub accepted: bool,
    pub r_conv: u32,
    pub checks: Vec<ActionCheck>,
    pub failures: Vec<String>,
}

/// Accepts iff every `h_n` is groupoid-PD on `ball(R_conv)`, its sup-norm
/// profile is certified in `C_c` (amenable) or `c₀` (a-T-menable), and
/// `max_{x,|s|≤R_conv}|h_n(x,s) − 1|` stays below a nonincreasing schedule
/// without growing.
pub fn action_certificate(
    kind: ActionKind,
    system: &FiniteSystem,
    family: &[GroupoidFunction],
    r_conv: u32,
    thresholds: &[f64],
) -> Result<ActionCertificate> {
    if family.is_empty() {
        return Err(Error::InvalidArgument("family is empty".into()));
    }
    if thresholds.len() != family.len() {
        return Err(Error::InvalidArgument(format!("{} thresholds given for {} functions", thresholds.len(), family.len())));
    }
    if thresholds.windows(2).any(|w| w[1] > w[0]) || thresholds.iter().any(|t| !(*t > 0.0)) {
        return Err(Error::InvalidArgument("thresholds must be positive and nonincreasing".into()));
    }
    let ball = system.model().ball(r_conv, DEFAULT_BUDGET)?;
    let ideal = kind.ideal();
    let mut checks = Vec::new();
    let mut failures = Vec::new();
    let mut prev = f64::INFINITY;
    for (h, &threshold) in family.iter().zip(thresholds) {
        let name = h.label().to_string();
        let pd = groupoid_pd_check(h, system, ball.elements(), DEFAULT_PSD_TOL)?;
        let mem = ideal_membership(&sup_norm_profile(h), ideal)?;
        let mut deviation = 0.0f64;
        for s in ball.elements() {
            for x in 0..system.points() {
                deviation = deviation.max((h.eval_checked(x, s)? - C::new(1.0, 0.0)).norm());
            }
        }
        let mut passed = true;
        if !pd.passed {
            passed = false;
            failures.push(format!("{name}: not positive definite at points {:?}", pd.failing_points));
        }
        if mem.verdict != Verdict::Member {
            passed = false;
            failures.push(format!("{name}: sup-norm profile membership in {ideal} is {:?} ({})", mem.verdict, mem.witness));
        }
        if !(deviation < threshold) {
            passed = false;
            failures.push(format!("{name}: max |h(x,s) − 1| = {deviation:.6} is not below {threshold}"));
        }
        if deviation > prev + 1e-12 {
            passed = false;
            failures.push(format!("{name}: deviation {deviation:.6} grew from {prev:.6}"));
        }
        prev = deviation;
        checks.push(ActionCheck {
            function: name,
            pd_passed: pd.passed,
            failing_points: pd.failing_points,
            profile_membership: mem.verdict,
            profile_witness: mem.witness,
            deviation,
            threshold,
            passed,
        });
    }
    let label = match kind {
        ActionKind::Amenable => "amenable action witness",
        ActionKind::ATmenable => "a-T-menable action witness",
    };
    Ok(ActionCertificate { kind, label: label.into(), accepted: failures.is_empty(), r_conv, checks, failures })
}
