//! Complex-valued functions on a group, built as expression trees so that
//! tail certificates and kernel matrices can be derived structurally.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::sync::Arc;

use faer::Mat;

use super::certificate::TailCertificate;
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupKind, GroupModel, DEFAULT_BUDGET};
use crate::linalg::{C, ONE, ZERO};
use crate::rep::FiniteUnitaryRep;

type EvalFn = dyn Fn(&GroupElement) -> C + Send + Sync;
type ProfileFn = dyn Fn(u32) -> C + Send + Sync;

#[derive(Clone)]
enum Node {
    Delta,
    Constant(C),
    WordLength,
    Radial(Arc<ProfileFn>),
    Folner(Arc<HashSet<GroupElement>>),
    Table(Arc<BTreeMap<GroupElement, C>>),
    Coefficient { rep: Arc<FiniteUnitaryRep>, xi: Arc<Vec<C>>, eta: Arc<Vec<C>> },
    Product(Arc<GroupFunction>, Arc<GroupFunction>),
    Power(Arc<GroupFunction>, u32),
    /// `exp(-t·ψ)`
    Exp(Arc<GroupFunction>, f64),
    /// `s ↦ h(g⁻¹s)`
    TranslateLeft(GroupElement, Arc<GroupFunction>),
    /// `s ↦ h(sg)`
    TranslateRight(Arc<GroupFunction>, GroupElement),
    Custom(Arc<EvalFn>),
}

/// A function `Γ → C` with a tail certificate and a provenance label.
#[derive(Clone)]
pub struct GroupFunction {
    model: GroupModel,
    node: Node,
    tail: TailCertificate,
    label: String,
    sup: Option<f64>,
}

impl fmt::Debug for GroupFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupFunction({} on {}, tail {:?})", self.label, self.model, self.tail)
    }
}

/// The family constructors accepted by [`GroupFunction::family`].
#[derive(Clone, Debug)]
pub enum Family {
    /// `e^{-|s|/n}`
    Haagerup(f64),
    /// `e^{-tψ}`
    Schoenberg(GroupFunction, f64),
    /// `|F ∩ sF| / |F|`
    Folner(Vec<GroupElement>),
}

impl GroupFunction {
    fn build(model: GroupModel, node: Node, tail: TailCertificate, label: String, sup: Option<f64>) -> Self {
        Self { model, node, tail, label, sup }
    }

    /// `δ_e`.
    pub fn delta(model: GroupModel) -> Self {
        Self::build(model, Node::Delta, TailCertificate::FiniteSupport { radius: 0 }, "delta".into(), Some(1.0))
    }

    pub fn constant(model: GroupModel, c: C) -> Self {
        let tail = if c.norm() > 0.0 {
            TailCertificate::BoundedBelow { epsilon: c.norm(), radius: 0 }
        } else {
            TailCertificate::FiniteSupport { radius: 0 }
        };
        Self::build(model, Node::Constant(c), tail, format!("constant({c})"), Some(c.norm()))
    }

    /// The constant function 1.
    pub fn one(model: GroupModel) -> Self {
        Self::constant(model, ONE).with_label("one")
    }

    /// `s ↦ |s|`.
    pub fn word_length(model: GroupModel) -> Self {
        let tail = if model.is_finite() {
            TailCertificate::FiniteSupport { radius: model.diameter().unwrap_or(0) }
        } else {
            TailCertificate::BoundedBelow { epsilon: 1.0, radius: 0 }
        };
        let sup = model.diameter().map(f64::from);
        Self::build(model, Node::WordLength, tail, "wordlength".into(), sup)
    }

    /// `s ↦ profile(|s|)`.
    pub fn radial(
        model: GroupModel,
        label: impl Into<String>,
        tail: TailCertificate,
        profile: impl Fn(u32) -> C + Send + Sync + 'static,
    ) -> Self {
        let sup = tail.sup_bound();
        Self::build(model, Node::Radial(Arc::new(profile)), tail, label.into(), sup)
    }

    /// Finitely supported function given by a table; the certificate defaults
    /// to finite support at the largest tabulated radius.
    pub fn table(
        model: GroupModel,
        entries: impl IntoIterator<Item = (GroupElement, C)>,
        tail: Option<TailCertificate>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (s, v) in entries {
            if s.model() != model {
                return Err(Error::ModelMismatch { left: model.to_string(), right: s.model().to_string() });
            }
            if v != ZERO {
                map.insert(s, v);
            }
        }
        let radius = map.keys().map(|s| s.word_length()).max().unwrap_or(0);
        let sup = map.values().map(|v| v.norm()).fold(0.0, f64::max);
        let tail = tail.unwrap_or(TailCertificate::FiniteSupport { radius });
        let f = Self::build(model, Node::Table(Arc::new(map)), tail, "table".into(), Some(sup));
        if let Node::Table(map) = &f.node {
            for (s, v) in map.iter() {
                f.tail.check(s, *v)?;
            }
        }
        Ok(f)
    }

    /// Arbitrary evaluation rule. The certificate is trusted and checked
    /// lazily on every evaluation made through the checked entry points.
    pub fn custom(
        model: GroupModel,
        label: impl Into<String>,
        tail: TailCertificate,
        f: impl Fn(&GroupElement) -> C + Send + Sync + 'static,
    ) -> Self {
        let sup = tail.sup_bound();
        Self::build(model, Node::Custom(Arc::new(f)), tail, label.into(), sup)
    }

    pub(crate) fn coefficient(rep: Arc<FiniteUnitaryRep>, xi: Vec<C>, eta: Vec<C>, tail: TailCertificate) -> Self {
        let model = rep.model();
        let sup = tail.sup_bound();
        let label = format!("coefficient(dim={})", rep.dim());
        Self::build(model, Node::Coefficient { rep, xi: Arc::new(xi), eta: Arc::new(eta) }, tail, label, sup)
    }

    /// Named families with their certificates.
    pub fn family(model: GroupModel, family: Family) -> Result<Self> {
        match family {
            Family::Haagerup(n) => {
                if !(n > 0.0 && n.is_finite()) {
                    return Err(Error::InvalidArgument(format!("haagerup parameter n = {n} must be positive")));
                }
                Ok(Self::word_length(model).exp_neg(1.0 / n)?.with_label(format!("haagerup(n={n})")))
            }
            Family::Schoenberg(psi, t) => {
                if !(t > 0.0 && t.is_finite()) {
                    return Err(Error::InvalidArgument(format!("schoenberg parameter t = {t} must be positive")));
                }
                if psi.model != model {
                    return Err(Error::ModelMismatch { left: model.to_string(), right: psi.model.to_string() });
                }
                let label = format!("schoenberg({},t={t})", psi.label);
                Ok(psi.exp_neg(t)?.with_label(label))
            }
            Family::Folner(set) => {
                if set.is_empty() {
                    return Err(Error::InvalidArgument("Følner set must be nonempty".into()));
                }
                let mut diam = 0;
                for f in &set {
                    if f.model() != model {
                        return Err(Error::ModelMismatch { left: model.to_string(), right: f.model().to_string() });
                    }
                    for g in &set {
                        diam = diam.max(model.compose_unchecked(f, &model.inverse(g)).word_length());
                    }
                }
                let set: HashSet<GroupElement> = set.into_iter().collect();
                let label = format!("folner(|F|={})", set.len());
                Ok(Self::build(
                    model,
                    Node::Folner(Arc::new(set)),
                    TailCertificate::FiniteSupport { radius: diam },
                    label,
                    Some(1.0),
                ))
            }
        }
    }

    /// `e^{-|s|/n}`.
    pub fn haagerup(model: GroupModel, n: f64) -> Result<Self> {
        Self::family(model, Family::Haagerup(n))
    }

    /// `|F ∩ sF| / |F|` for the box `{0..n-1}^rank` on free abelian and
    /// cyclic models, and for the ball of radius `n` elsewhere.
    pub fn folner_box(model: GroupModel, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("box size must be at least 1".into()));
        }
        let set: Vec<GroupElement> = match model.kind() {
            GroupKind::FreeAbelian { rank } => {
                let mut out = vec![Vec::new()];
                for _ in 0..rank {
                    out = out
                        .into_iter()
                        .flat_map(|v: Vec<i32>| {
                            (0..n as i32).map(move |x| {
                                let mut w = v.clone();
                                w.push(x);
                                w
                            })
                        })
                        .collect();
                }
                out.iter().map(|v| model.from_exponents(v)).collect::<Result<_>>()?
            }
            GroupKind::FiniteCyclic { .. } => {
                let mut v: Vec<GroupElement> = (0..n as i64).map(|r| model.from_residue(r)).collect::<Result<_>>()?;
                v.sort();
                v.dedup();
                v
            }
            _ => model.ball(n, DEFAULT_BUDGET)?.elements().to_vec(),
        };
        Ok(Self::family(model, Family::Folner(set))?.with_label(format!("folner(box={n})")))
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Replaces the certificate; it is checked lazily like any other.
    pub fn with_tail(mut self, tail: TailCertificate) -> Self {
        self.sup = self.sup.or(tail.sup_bound());
        self.tail = tail;
        self
    }

    pub fn model(&self) -> GroupModel {
        self.model
    }

    pub fn tail(&self) -> &TailCertificate {
        &self.tail
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// A uniform bound on `|h|`, when one is known.
    pub fn sup_bound(&self) -> Option<f64> {
        self.sup
    }

    /// Whether `|h|` is known to be unbounded.
    pub fn known_unbounded(&self) -> bool {
        matches!(self.node, Node::WordLength) && !self.model.is_finite()
    }

    fn same_model(&self, other: &GroupFunction) -> Result<()> {
        if self.model != other.model {
            return Err(Error::ModelMismatch { left: self.model.to_string(), right: other.model.to_string() });
        }
        Ok(())
    }

    /// Raw evaluation without certificate checking.
    pub fn eval(&self, s: &GroupElement) -> C {
        match &self.node {
            Node::Delta => {
                if s.is_identity() {
                    ONE
                } else {
                    ZERO
                }
            }
            Node::Constant(c) => *c,
            Node::WordLength => C::new(s.word_length() as f64, 0.0),
            Node::Radial(p) => p(s.word_length()),
            Node::Folner(set) => {
                // |F ∩ sF| = #{f ∈ F : s⁻¹f ∈ F}
                let si = self.model.inverse(s);
                let hits = set.iter().filter(|f| set.contains(&self.model.compose_unchecked(&si, f))).count();
                C::new(hits as f64 / set.len() as f64, 0.0)
            }
            Node::Table(map) => map.get(s).copied().unwrap_or(ZERO),
            Node::Coefficient { rep, xi, eta } => crate::linalg::dot(&rep.apply_unchecked(s, xi), eta),
            Node::Product(a, b) => a.eval(s) * b.eval(s),
            Node::Power(a, k) => a.eval(s).powu(*k),
            Node::Exp(a, t) => (-a.eval(s) * *t).exp(),
            Node::TranslateLeft(g, a) => a.eval(&self.model.compose_unchecked(&self.model.inverse(g), s)),
            Node::TranslateRight(a, g) => a.eval(&self.model.compose_unchecked(s, g)),
            Node::Custom(f) => f(s),
        }
    }

    /// Evaluation checked against the tail certificate.
    pub fn eval_checked(&self, s: &GroupElement) -> Result<C> {
        if s.model() != self.model {
            return Err(Error::ModelMismatch { left: self.model.to_string(), right: s.model().to_string() });
        }
        let v = self.eval(s);
        self.tail.check(s, v)?;
        Ok(v)
    }

    /// Value on the sphere of radius `k` when the function depends only on
    /// word length.
    pub fn radial_value(&self, k: u32) -> Option<C> {
        match &self.node {
            Node::Delta => Some(if k == 0 { ONE } else { ZERO }),
            Node::Constant(c) => Some(*c),
            Node::WordLength => Some(C::new(k as f64, 0.0)),
            Node::Radial(p) => Some(p(k)),
            Node::Product(a, b) => Some(a.radial_value(k)? * b.radial_value(k)?),
            Node::Power(a, n) => Some(a.radial_value(k)?.powu(*n)),
            Node::Exp(a, t) => Some((-a.radial_value(k)? * *t).exp()),
            _ => None,
        }
    }

    pub fn is_radial(&self) -> bool {
        match &self.node {
            Node::Delta | Node::Constant(_) | Node::WordLength | Node::Radial(_) => true,
            Node::Product(a, b) => a.is_radial() && b.is_radial(),
            Node::Power(a, _) | Node::Exp(a, _) => a.is_radial(),
            _ => false,
        }
    }

    /// Pointwise product.
    pub fn product(&self, other: &GroupFunction) -> Result<Self> {
        self.same_model(other)?;
        let tail = match (&self.node, &other.node) {
            (_, Node::Constant(c)) => self.tail.scaled(c.norm()),
            (Node::Constant(c), _) => other.tail.scaled(c.norm()),
            _ => TailCertificate::product(&self.tail, self.sup, &other.tail, other.sup),
        };
        let sup = match (self.sup, other.sup) {
            (Some(a), Some(b)) => Some(a * b),
            _ => tail.sup_bound(),
        };
        let label = format!("{}*{}", self.label, other.label);
        Ok(Self::build(self.model, Node::Product(Arc::new(self.clone()), Arc::new(other.clone())), tail, label, sup))
    }

    /// Pointwise power `h^k`, `k ≥ 1`.
    pub fn power(&self, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("power exponent must be at least 1".into()));
        }
        let label = format!("({})^{k}", self.label);
        let sup = self.sup.map(|b| b.powi(k as i32));
        Ok(Self::build(self.model, Node::Power(Arc::new(self.clone()), k), self.tail.power(k), label, sup))
    }

    /// `e^{-tψ}`.
    pub fn exp_neg(&self, t: f64) -> Result<Self> {
        let tail = match &self.node {
            Node::WordLength if self.model.is_finite() => {
                TailCertificate::FiniteSupport { radius: self.model.diameter().unwrap_or(0) }
            }
            Node::WordLength => {
                let c = (-t).exp();
                TailCertificate::ExpDecay { amplitude: 1.0, ratio: c, floor: 1.0 }
            }
            _ => TailCertificate::None,
        };
        let sup = match &self.node {
            Node::WordLength => Some(1.0),
            _ => None,
        };
        let label = format!("exp(-{t}*{})", self.label);
        Ok(Self::build(self.model, Node::Exp(Arc::new(self.clone()), t), tail, label, sup))
    }

    /// `(g·h)(s) = h(g⁻¹s)`.
    pub fn translate_left(&self, g: &GroupElement) -> Result<Self> {
        self.check_element(g)?;
        let tail = self.tail.translated(g.word_length());
        let label = format!("{g}.{}", self.label);
        Ok(Self::build(self.model, Node::TranslateLeft(g.clone(), Arc::new(self.clone())), tail, label, self.sup))
    }

    /// `(h·g)(s) = h(sg)`.
    pub fn translate_right(&self, g: &GroupElement) -> Result<Self> {
        self.check_element(g)?;
        let tail = self.tail.translated(g.word_length());
        let label = format!("{}.{g}", self.label);
        Ok(Self::build(self.model, Node::TranslateRight(Arc::new(self.clone()), g.clone()), tail, label, self.sup))
    }

    /// `f* ∗ f` with `f*(s) = conj f(s⁻¹)`; requires a finite-support certificate.
    pub fn adjoint_convolve(&self) -> Result<Self> {
        let TailCertificate::FiniteSupport { radius } = self.tail else {
            return Err(Error::Unsupported(format!(
                "{} has no finite-support certificate; f*∗f needs a finite support",
                self.label
            )));
        };
        let support = self.support_values(radius)?;
        // (f*∗f)(s) = Σ_u conj f(u) f(us)
        let mut out: BTreeMap<GroupElement, C> = BTreeMap::new();
        for (u, fu) in &support {
            let ui = self.model.inverse(u);
            for (w, fw) in &support {
                *out.entry(self.model.compose_unchecked(&ui, w)).or_insert(ZERO) += fu.conj() * fw;
            }
        }
        let label = format!("adjoint_convolve({})", self.label);
        let f = Self::table(self.model, out, Some(TailCertificate::FiniteSupport { radius: 2 * radius }))?;
        Ok(f.with_label(label))
    }

    /// Nonzero values on the ball of radius `radius`, checked.
    pub fn support_values(&self, radius: u32) -> Result<Vec<(GroupElement, C)>> {
        if let Node::Table(map) = &self.node {
            return Ok(map.iter().filter(|(s, _)| s.word_length() <= radius).map(|(s, v)| (s.clone(), *v)).collect());
        }
        let ball = self.model.ball(radius, DEFAULT_BUDGET)?;
        let mut out = Vec::new();
        for s in ball.elements() {
            let v = self.eval_checked(s)?;
            if v != ZERO {
                out.push((s.clone(), v));
            }
        }
        Ok(out)
    }

    fn check_element(&self, g: &GroupElement) -> Result<()> {
        if g.model() != self.model {
            return Err(Error::ModelMismatch { left: self.model.to_string(), right: g.model().to_string() });
        }
        Ok(())
    }

    /// Kernel matrix `K[i][j] = h(rows_i⁻¹ cols_j)`, each entry checked
    /// against the tail certificate.
    pub fn kernel(&self, rows: &[GroupElement], cols: &[GroupElement]) -> Result<Mat<C>> {
        for s in rows.iter().chain(cols) {
            self.check_element(s)?;
        }
        let k = self.kernel_raw(rows, cols);
        if !matches!(self.tail, TailCertificate::None) {
            for (j, c) in cols.iter().enumerate() {
                for (i, r) in rows.iter().enumerate() {
                    let d = self.model.distance(r, c);
                    let v = k[(i, j)].norm();
                    let up = self.tail.upper_at(d);
                    let low = self.tail.lower_at(d);
                    let bad = up.is_some_and(|u| v > u * (1.0 + 1e-9) + 1e-12)
                        || low.is_some_and(|l| v < l * (1.0 - 1e-9) - 1e-12);
                    if bad {
                        let s = self.model.compose_unchecked(&self.model.inverse(r), c);
                        self.tail.check(&s, k[(i, j)])?;
                    }
                }
            }
        }
        Ok(k)
    }

    fn kernel_raw(&self, rows: &[GroupElement], cols: &[GroupElement]) -> Mat<C> {
        let (m, n) = (rows.len(), cols.len());
        let model = self.model;
        if self.is_radial() {
            let max_d = rows.iter().map(|r| r.word_length()).max().unwrap_or(0)
                + cols.iter().map(|c| c.word_length()).max().unwrap_or(0);
            let profile: Vec<C> = (0..=max_d).map(|k| self.radial_value(k).expect("radial")).collect();
            return Mat::from_fn(m, n, |i, j| profile[model.distance(&rows[i], &cols[j]) as usize]);
        }
        match &self.node {
            Node::Coefficient { rep, xi, eta } => {
                // h(r⁻¹c) = (π_r η)* (π_c ξ)
                let pr: Vec<Vec<C>> = rows.iter().map(|r| rep.apply_unchecked(r, eta)).collect();
                let pc: Vec<Vec<C>> = cols.iter().map(|c| rep.apply_unchecked(c, xi)).collect();
                Mat::from_fn(m, n, |i, j| crate::linalg::dot(&pc[j], &pr[i]))
            }
            Node::Product(a, b) => {
                let (ka, kb) = (a.kernel_raw(rows, cols), b.kernel_raw(rows, cols));
                Mat::from_fn(m, n, |i, j| ka[(i, j)] * kb[(i, j)])
            }
            Node::Power(a, p) => {
                let ka = a.kernel_raw(rows, cols);
                Mat::from_fn(m, n, |i, j| ka[(i, j)].powu(*p))
            }
            Node::Exp(a, t) => {
                let ka = a.kernel_raw(rows, cols);
                Mat::from_fn(m, n, |i, j| (-ka[(i, j)] * *t).exp())
            }
            Node::TranslateLeft(g, a) => {
                // h(g⁻¹r⁻¹c) = h((rg)⁻¹c)
                let shifted: Vec<GroupElement> = rows.iter().map(|r| model.compose_unchecked(r, g)).collect();
                a.kernel_raw(&shifted, cols)
            }
            Node::TranslateRight(a, g) => {
                let shifted: Vec<GroupElement> = cols.iter().map(|c| model.compose_unchecked(c, g)).collect();
                a.kernel_raw(rows, &shifted)
            }
            _ => {
                let inv: Vec<GroupElement> = rows.iter().map(|r| model.inverse(r)).collect();
                Mat::from_fn(m, n, |i, j| self.eval(&model.compose_unchecked(&inv[i], &cols[j])))
            }
        }
    }

    /// Observed per-sphere suprema of `|h|` on the ball of radius `radius`.
    pub fn sphere_sup_profile(&self, radius: u32) -> Result<Vec<f64>> {
        if self.is_radial() {
            return Ok((0..=radius).map(|k| self.radial_value(k).expect("radial").norm()).collect());
        }
        let ball = self.model.ball(radius, DEFAULT_BUDGET)?;
        (0..=radius)
            .map(|k| {
                ball.sphere(k)
                    .iter()
                    .map(|s| self.eval_checked(s).map(|v| v.norm()))
                    .try_fold(0.0, |acc, v| v.map(|v| f64::max(acc, v)))
            })
            .collect()
    }
}
