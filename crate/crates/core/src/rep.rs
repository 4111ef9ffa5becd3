//! Finite-dimensional unitary representations, matrix coefficients and
//! truncated GNS windows.

use std::sync::Arc;

use faer::Mat;
use rand::distr::Uniform;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Ball, GroupElement, GroupKind, GroupModel, Letter, DEFAULT_BUDGET};
use crate::linalg::{self, PsdOutcome, PsdReport, C, ONE, ZERO};
use crate::pd::{GroupFunction, SupDecay, TailCertificate};

const UNITARY_TOL: f64 = 1e-10;

/// A unitary representation given by its generator images.
#[derive(Clone, Debug)]
pub struct FiniteUnitaryRep {
    model: GroupModel,
    dim: usize,
    images: Vec<Mat<C>>,
    inverses: Vec<Mat<C>>,
}

fn identity(d: usize) -> Mat<C> {
    Mat::from_fn(d, d, |i, j| if i == j { ONE } else { ZERO })
}

fn max_dev(a: &Mat<C>, b: &Mat<C>) -> f64 {
    let mut worst: f64 = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    worst
}

impl FiniteUnitaryRep {
    /// Validates unitarity and the defining relations of the model.
    pub fn new(model: GroupModel, images: Vec<Mat<C>>) -> Result<Self> {
        if images.len() != model.num_generators() as usize {
            return Err(Error::InvalidArgument(format!(
                "{} generator images given, {model} has {}",
                images.len(),
                model.num_generators()
            )));
        }
        let dim = images.first().map(|m| m.nrows()).unwrap_or(0);
        if dim == 0 {
            return Err(Error::InvalidArgument("representation dimension must be at least 1".into()));
        }
        let id = identity(dim);
        for (g, m) in images.iter().enumerate() {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::InvalidArgument(format!("generator {g} image is not {dim}x{dim}")));
            }
            let dev = max_dev(&(m.adjoint() * m), &id);
            if dev > UNITARY_TOL {
                return Err(Error::InvalidArgument(format!(
                    "image of {} is not unitary (deviation {dev:e})",
                    model.generator_symbol(g as u32)
                )));
            }
        }
        let inverses = images.iter().map(|m| m.adjoint().to_owned()).collect();
        let rep = Self { model, dim, images, inverses };
        rep.check_relations()?;
        Ok(rep)
    }

    fn check_relations(&self) -> Result<()> {
        let id = identity(self.dim);
        let fail = |name: String, dev: f64| {
            Err(Error::InvalidArgument(format!("relation {name} violated by {dev:e}")))
        };
        match self.model.kind() {
            GroupKind::Free { .. } => {}
            GroupKind::FreeAbelian { rank } => {
                for i in 0..rank as usize {
                    for j in (i + 1)..rank as usize {
                        let ab = &self.images[i] * &self.images[j];
                        let ba = &self.images[j] * &self.images[i];
                        let dev = max_dev(&ab, &ba);
                        if dev > UNITARY_TOL {
                            let (a, b) = (self.model.generator_symbol(i as u32), self.model.generator_symbol(j as u32));
                            return fail(format!("{a}{b}{a}^-1{b}^-1"), dev);
                        }
                    }
                }
            }
            GroupKind::FiniteCyclic { order } => {
                let mut p = id.clone();
                for _ in 0..order {
                    p = &p * &self.images[0];
                }
                let dev = max_dev(&p, &id);
                if dev > UNITARY_TOL * order as f64 {
                    return fail(format!("a^{order}"), dev);
                }
            }
            GroupKind::InfiniteDihedral => {
                for (g, name) in [(0, "s^2"), (1, "t^2")] {
                    let dev = max_dev(&(&self.images[g] * &self.images[g]), &id);
                    if dev > UNITARY_TOL {
                        return fail(name.into(), dev);
                    }
                }
            }
        }
        Ok(())
    }

    /// The trivial representation on `C^dim`.
    pub fn trivial(model: GroupModel, dim: usize) -> Result<Self> {
        Self::new(model, vec![identity(dim); model.num_generators() as usize])
    }

    /// One-dimensional representation sending generator `i` to `exp(i·angles[i])`.
    pub fn character(model: GroupModel, angles: &[f64]) -> Result<Self> {
        let images = angles.iter().map(|&t| Mat::from_fn(1, 1, |_, _| C::from_polar(1.0, t))).collect();
        Self::new(model, images)
    }

    /// Haar-random generator images drawn from a ChaCha8 stream seeded by
    /// `seed`. Non-free models get images conjugated from diagonal matrices
    /// so that the defining relations hold exactly.
    pub fn random(model: GroupModel, dim: usize, seed: u64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("representation dimension must be at least 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let phase = Uniform::new(0.0, std::f64::consts::TAU).expect("valid range");
        let images = match model.kind() {
            GroupKind::Free { rank } => (0..rank).map(|_| haar_unitary(dim, &mut rng)).collect(),
            GroupKind::FreeAbelian { rank } => {
                let u = haar_unitary(dim, &mut rng);
                (0..rank)
                    .map(|_| {
                        let d: Vec<C> = (0..dim).map(|_| C::from_polar(1.0, phase.sample(&mut rng))).collect();
                        conjugate_diagonal(&u, &d)
                    })
                    .collect()
            }
            GroupKind::FiniteCyclic { order } => {
                let u = haar_unitary(dim, &mut rng);
                let root = Uniform::new(0, order).expect("order ≥ 1");
                let d: Vec<C> = (0..dim)
                    .map(|_| C::from_polar(1.0, std::f64::consts::TAU * root.sample(&mut rng) as f64 / order as f64))
                    .collect();
                vec![conjugate_diagonal(&u, &d)]
            }
            GroupKind::InfiniteDihedral => (0..2)
                .map(|_| {
                    let u = haar_unitary(dim, &mut rng);
                    let d: Vec<C> = (0..dim)
                        .map(|_| if rng.random_bool(0.5) { ONE } else { -ONE })
                        .collect();
                    conjugate_diagonal(&u, &d)
                })
                .collect(),
        };
        Self::new(model, images)
    }

    pub fn model(&self) -> GroupModel {
        self.model
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn images(&self) -> &[Mat<C>] {
        &self.images
    }

    fn letter_matrix(&self, l: Letter) -> &Mat<C> {
        if l % 2 == 0 {
            &self.images[(l / 2) as usize]
        } else {
            &self.inverses[(l / 2) as usize]
        }
    }

    /// `π(s)` as a matrix.
    pub fn evaluate_word(&self, s: &GroupElement) -> Result<Mat<C>> {
        self.same_model(s)?;
        let mut m = identity(self.dim);
        for l in s.letters() {
            m = &m * self.letter_matrix(l);
        }
        Ok(m)
    }

    /// `π(s) v`.
    pub fn apply(&self, s: &GroupElement, v: &[C]) -> Result<Vec<C>> {
        self.same_model(s)?;
        if v.len() != self.dim {
            return Err(Error::InvalidArgument(format!("vector of length {} for a {}-dimensional representation", v.len(), self.dim)));
        }
        Ok(self.apply_unchecked(s, v))
    }

    pub(crate) fn apply_unchecked(&self, s: &GroupElement, v: &[C]) -> Vec<C> {
        let mut out = v.to_vec();
        for l in s.letters().into_iter().rev() {
            out = linalg::mat_vec(self.letter_matrix(l), &out);
        }
        out
    }

    /// Generator-wise Kronecker product.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        self.same_model_rep(other)?;
        let images = self.images.iter().zip(&other.images).map(|(a, b)| kron(a, b)).collect();
        Self::new(self.model, images)
    }

    /// Generator-wise block-diagonal sum.
    pub fn direct_sum(reps: &[Self]) -> Result<Self> {
        let first = reps.first().ok_or_else(|| Error::InvalidArgument("empty direct sum".into()))?;
        for r in reps {
            first.same_model_rep(r)?;
        }
        let dim: usize = reps.iter().map(|r| r.dim).sum();
        let images = (0..first.images.len())
            .map(|g| {
                let mut m = Mat::<C>::zeros(dim, dim);
                let mut off = 0;
                for r in reps {
                    for j in 0..r.dim {
                        for i in 0..r.dim {
                            m[(off + i, off + j)] = r.images[g][(i, j)];
                        }
                    }
                    off += r.dim;
                }
                m
            })
            .collect();
        Self::new(first.model, images)
    }

    fn same_model(&self, s: &GroupElement) -> Result<()> {
        if s.model() != self.model {
            return Err(Error::ModelMismatch { left: self.model.to_string(), right: s.model().to_string() });
        }
        Ok(())
    }

    fn same_model_rep(&self, other: &Self) -> Result<()> {
        if other.model != self.model {
            return Err(Error::ModelMismatch { left: self.model.to_string(), right: other.model.to_string() });
        }
        Ok(())
    }

    pub fn to_json(&self) -> RepJson {
        RepJson {
            group: self.model.to_string(),
            dim: self.dim,
            generators: self
                .images
                .iter()
                .map(|m| {
                    (0..self.dim)
                        .flat_map(|i| (0..self.dim).map(move |j| (i, j)))
                        .map(|(i, j)| [m[(i, j)].re, m[(i, j)].im])
                        .collect()
                })
                .collect(),
        }
    }

    pub fn from_json(json: &RepJson) -> Result<Self> {
        let model: GroupModel = json.group.parse()?;
        let d = json.dim;
        let images = json
            .generators
            .iter()
            .enumerate()
            .map(|(g, entries)| {
                if entries.len() != d * d {
                    return Err(Error::InvalidArgument(format!("generator {g}: expected {} entries, found {}", d * d, entries.len())));
                }
                Ok(Mat::from_fn(d, d, |i, j| {
                    let [re, im] = entries[i * d + j];
                    C::new(re, im)
                }))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(model, images)
    }
}

/// Serialized representation: generator matrices row-major as `[re, im]` pairs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RepJson {
    pub group: String,
    pub dim: usize,
    pub generators: Vec<Vec<[f64; 2]>>,
}

fn kron(a: &Mat<C>, b: &Mat<C>) -> Mat<C> {
    let (p, q) = (a.nrows(), b.nrows());
    Mat::from_fn(p * q, p * q, |i, j| a[(i / q, j / q)] * b[(i % q, j % q)])
}

fn conjugate_diagonal(u: &Mat<C>, d: &[C]) -> Mat<C> {
    let n = d.len();
    let ud = Mat::from_fn(n, n, |i, j| u[(i, j)] * d[j]);
    &ud * u.adjoint()
}

pub(crate) fn gaussian_vector(n: usize, rng: &mut ChaCha8Rng) -> Vec<C> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    (0..n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            C::new(re * s, im * s)
        })
        .collect()
}

/// Haar unitary: Gram–Schmidt on a complex Ginibre matrix, which yields the
/// QR factor with positive diagonal in `R`.
fn haar_unitary(n: usize, rng: &mut ChaCha8Rng) -> Mat<C> {
    let mut cols: Vec<Vec<C>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v = gaussian_vector(n, rng);
        for _ in 0..2 {
            for q in &cols {
                let c = linalg::dot(&v, q);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= c * qi;
                }
            }
        }
        let nv = linalg::norm(&v);
        if nv > 1e-8 {
            cols.push(v.into_iter().map(|x| x / nv).collect());
        }
    }
    Mat::from_fn(n, n, |i, j| cols[j][i])
}

/// `s ↦ ⟨π(s)ξ, η⟩ = η* π(s) ξ`.
pub fn matrix_coefficient(rep: &FiniteUnitaryRep, xi: &[C], eta: &[C]) -> Result<GroupFunction> {
    if xi.len() != rep.dim || eta.len() != rep.dim {
        return Err(Error::InvalidArgument(format!(
            "vectors of length {} and {} for a {}-dimensional representation",
            xi.len(),
            eta.len(),
            rep.dim
        )));
    }
    let bound = linalg::norm(xi) * linalg::norm(eta);
    let tail = TailCertificate::SphereSup { bounds: Vec::new(), beyond: bound, decay: SupDecay::Unknown };
    Ok(GroupFunction::coefficient(Arc::new(rep.clone()), xi.to_vec(), eta.to_vec(), tail))
}

/// `h(s) = ⟨π(s)v, v⟩` for a Haar-random `π` of dimension `dim` and a random
/// unit vector `v`, both from the stream seeded by `seed`.
pub fn random_pd(model: GroupModel, dim: usize, seed: u64) -> Result<GroupFunction> {
    let rep = FiniteUnitaryRep::random(model, dim, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let v = gaussian_vector(dim, &mut rng);
    let n = linalg::norm(&v);
    let v: Vec<C> = v.into_iter().map(|x| x / n).collect();
    Ok(matrix_coefficient(&rep, &v, &v)?.with_label(format!("random_pd(dim={dim},seed={seed})")))
}

/// Truncated GNS construction of a positive definite function on `B_R`,
/// padded to `B_{R+r}` so that `π_g` is defined for `|g| ≤ r`.
#[derive(Clone, Debug)]
pub struct GnsWindow {
    h: GroupFunction,
    ball: Ball,
    padded: Ball,
    pad: u32,
    padded_gram: Mat<C>,
    gram: Mat<C>,
    report: PsdReport,
    cutoff: f64,
    rank: usize,
    eigen: (Vec<f64>, Mat<C>),
}

impl GnsWindow {
    pub fn new(h: &GroupFunction, radius: u32, pad: u32, tol: f64) -> Result<Self> {
        let model = h.model();
        let padded = model.ball(radius + pad, DEFAULT_BUDGET)?;
        let padded_gram = h.kernel(padded.elements(), padded.elements())?;
        let report = linalg::psd_check(&padded_gram, tol)?;
        match report.outcome {
            PsdOutcome::Positive => {}
            PsdOutcome::NonHermitian => {
                return Err(Error::NotHermitian { defect: report.hermitian_defect, allowance: report.allowance })
            }
            PsdOutcome::Indefinite => return Err(Error::NotPositive { min_eigenvalue: report.min_eigenvalue }),
        }
        let ball = model.ball(radius, DEFAULT_BUDGET)?;
        let n = ball.len();
        let gram = Mat::from_fn(n, n, |i, j| padded_gram[(i, j)]);
        let eigen = linalg::hermitian_eigen(&linalg::symmetrize(&gram))?;
        let cutoff = 1e-10 * eigen.0.last().copied().unwrap_or(0.0).max(0.0);
        let rank = eigen.0.iter().filter(|&&l| l > cutoff).count();
        Ok(Self { h: h.clone(), ball, padded, pad, padded_gram, gram, report, cutoff, rank, eigen })
    }

    pub fn function(&self) -> &GroupFunction {
        &self.h
    }

    pub fn ball(&self) -> &Ball {
        &self.ball
    }

    pub fn padded_ball(&self) -> &Ball {
        &self.padded
    }

    /// `G[t][s] = h(t⁻¹s)` on `B_R`.
    pub fn gram(&self) -> &Mat<C> {
        &self.gram
    }

    pub fn padded_gram(&self) -> &Mat<C> {
        &self.padded_gram
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn psd_report(&self) -> &PsdReport {
        &self.report
    }

    fn check_shift(&self, g: &GroupElement) -> Result<()> {
        if g.word_length() > self.pad {
            return Err(Error::InvalidArgument(format!(
                "|{g}| = {} exceeds the padding {}",
                g.word_length(),
                self.pad
            )));
        }
        Ok(())
    }

    /// `π_g ξ` for `ξ` over `B_R`, as an exact coefficient vector over `B_{R+r}`.
    pub fn translate(&self, g: &GroupElement, xi: &[C]) -> Result<Vec<C>> {
        self.check_shift(g)?;
        let model = self.ball.model();
        let mut out = vec![ZERO; self.padded.len()];
        for (s, &a) in self.ball.elements().iter().zip(xi) {
            if a != ZERO {
                let gs = model.compose(g, s)?;
                let idx = self.padded.index_of(&gs).expect("|gs| ≤ R + r");
                out[idx] += a;
            }
        }
        Ok(out)
    }

    /// Gram inner product `⟨ξ, η⟩ = η* G ξ` over the padded ball.
    pub fn inner_padded(&self, xi: &[C], eta: &[C]) -> C {
        let gxi = linalg::mat_vec(&self.padded_gram, xi);
        linalg::dot(&gxi, eta)
    }

    /// `⟨ξ, η⟩ = η* G ξ` over `B_R`.
    pub fn inner(&self, xi: &[C], eta: &[C]) -> C {
        linalg::dot(&linalg::mat_vec(&self.gram, xi), eta)
    }

    /// `⟨π_g ξ, η⟩` for `ξ, η` over `B_R`.
    pub fn coefficient(&self, g: &GroupElement, xi: &[C], eta: &[C]) -> Result<C> {
        let shifted = self.translate(g, xi)?;
        let mut eta_p = vec![ZERO; self.padded.len()];
        eta_p[..eta.len()].copy_from_slice(eta);
        Ok(self.inner_padded(&shifted, &eta_p))
    }

    /// `F_g[t][s] = ⟨π_g δ_s, δ_t⟩ = h(t⁻¹ g s)` over `B_R`.
    pub fn form(&self, g: &GroupElement) -> Result<Mat<C>> {
        self.check_shift(g)?;
        let model = self.ball.model();
        let gi = model.inverse(g);
        let rows: Vec<GroupElement> = self.ball.elements().iter().map(|t| model.compose_unchecked(&gi, t)).collect();
        self.h.kernel(&rows, self.ball.elements())
    }

    /// Compressed operator `G⁺ F_g` in coefficient coordinates, with `G⁺`
    /// the pseudo-inverse on the numerical range of `G`.
    pub fn operator(&self, g: &GroupElement) -> Result<Mat<C>> {
        let f = self.form(g)?;
        let (vals, vecs) = &self.eigen;
        let n = self.ball.len();
        let keep: Vec<usize> = (0..n).filter(|&k| vals[k] > self.cutoff).collect();
        let q = Mat::from_fn(n, keep.len(), |i, j| vecs[(i, keep[j])]);
        let qd = Mat::from_fn(n, keep.len(), |i, j| vecs[(i, keep[j])] / vals[keep[j]]);
        Ok(&qd * (q.adjoint() * &f))
    }
}
