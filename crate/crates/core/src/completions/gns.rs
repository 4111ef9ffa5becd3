//! Lower bounds for `‖π_h(x)‖` from truncated GNS windows.

use faer::Mat;

use super::norms::{radial_coefficients, BoundKind, NormEstimate};
use crate::error::{Error, Result};
use crate::group::{Ball, GroupKind, DEFAULT_BUDGET};
use crate::linalg::{self, C, ZERO};
use crate::pd::{GroupFunction, DEFAULT_PSD_TOL};
use crate::ring::GroupRingElement;

/// Largest padded window handled by the dense route.
pub const DENSE_LIMIT: usize = 5_000;
const CUTOFF_REL: f64 = 1e-10;
const LANCZOS_TOL: f64 = 1e-7;
const LANCZOS_STEPS: usize = 300;
const CHOLESKY_PIVOT_REL: f64 = 1e-8;

/// Reusable window data for one function `h`: the padded Gram
/// `G'[t][s] = h(t⁻¹s)` on `B_{R+pad}` and the eigen-decomposition of its
/// restriction to `B_R`.
pub struct GnsContext {
    h: GroupFunction,
    radius: u32,
    pad: u32,
    ball: Ball,
    padded: Ball,
    padded_gram: Mat<C>,
    factor: Factor,
}

enum Factor {
    /// `G_R = LL*` with a well-conditioned `L`, stored column-major
    Cholesky(Vec<C>),
    Eigen { vals: Vec<f64>, vecs: Mat<C> },
}

fn column_major(m: &Mat<C>) -> Vec<C> {
    let (r, c) = (m.nrows(), m.ncols());
    let mut out = Vec::with_capacity(r * c);
    for j in 0..c {
        out.extend((0..r).map(|i| m[(i, j)]));
    }
    out
}

fn forward_solve(l: &[C], b: &mut [C]) {
    let n = b.len();
    for j in 0..n {
        let col = &l[j * n..(j + 1) * n];
        b[j] /= col[j];
        let z = b[j];
        for (bi, &li) in b[j + 1..].iter_mut().zip(&col[j + 1..]) {
            *bi -= li * z;
        }
    }
}

fn backward_solve_adjoint(l: &[C], b: &mut [C]) {
    let n = b.len();
    for j in (0..n).rev() {
        let col = &l[j * n..(j + 1) * n];
        let acc: C = b[j + 1..].iter().zip(&col[j + 1..]).map(|(&bi, li)| li.conj() * bi).sum();
        b[j] = (b[j] - acc) / col[j].conj();
    }
}

fn mat_vec_cm(a: &[C], v: &[C]) -> Vec<C> {
    let n = v.len();
    let rows = a.len() / n;
    let mut out = vec![ZERO; rows];
    for (j, &vj) in v.iter().enumerate() {
        for (o, &aij) in out.iter_mut().zip(&a[j * rows..(j + 1) * rows]) {
            *o += aij * vj;
        }
    }
    out
}

impl GnsContext {
    pub fn new(h: &GroupFunction, radius: u32, pad: u32) -> Result<Self> {
        let model = h.model();
        let size = model.ball_size(radius + pad);
        if size > DENSE_LIMIT as u128 {
            return Err(Error::DenseLimit { dim: size.min(usize::MAX as u128) as usize, limit: DENSE_LIMIT });
        }
        let padded = model.ball(radius + pad, DEFAULT_BUDGET)?;
        let ball = model.ball(radius, DEFAULT_BUDGET)?;
        let padded_gram = h.kernel(padded.elements(), padded.elements())?;
        let n = ball.len();
        // balls are prefixes of larger balls in the canonical order
        let g = Mat::from_fn(n, n, |i, j| padded_gram[(i, j)]);
        let defect = linalg::hermitian_defect(&g);
        let allowance = DEFAULT_PSD_TOL * (1.0 + linalg::norm_inf(&g));
        if defect > allowance {
            return Err(Error::NotHermitian { defect, allowance });
        }
        let g = linalg::symmetrize(&g);
        let factor = match g.llt(faer::Side::Lower) {
            Ok(llt) => {
                let l = llt.L().to_owned();
                let diag: Vec<f64> = (0..n).map(|i| l[(i, i)].re).collect();
                let (lo, hi) = diag.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &d| (a.min(d), b.max(d)));
                if lo * lo > CHOLESKY_PIVOT_REL * hi * hi {
                    Some(Factor::Cholesky(column_major(&l)))
                } else {
                    None
                }
            }
            Err(_) => None,
        };
        let factor = match factor {
            Some(f) => f,
            None => {
                let (vals, vecs) = linalg::hermitian_eigen(&g)?;
                let min_eigenvalue = vals.first().copied().unwrap_or(0.0);
                if min_eigenvalue < -allowance {
                    return Err(Error::NotPositive { min_eigenvalue });
                }
                Factor::Eigen { vals, vecs }
            }
        };
        Ok(Self { h: h.clone(), radius, pad, ball, padded, padded_gram, factor })
    }

    pub fn function(&self) -> &GroupFunction {
        &self.h
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    /// `A[t][s] = Σ_{u,v} conj(α_v) α_u G'[vt, us]`, the form of `L_x* G' L_x` on `B_R`.
    fn pulled_back_form(&self, x: &GroupRingElement) -> Result<Mat<C>> {
        let model = self.h.model();
        let terms: Vec<_> = x.terms().map(|(u, a)| (u.clone(), *a)).collect();
        let k = terms.len();
        let n = self.ball.len();
        let mut idx = vec![0usize; n * k];
        for (si, s) in self.ball.elements().iter().enumerate() {
            for (ui, (u, _)) in terms.iter().enumerate() {
                idx[si * k + ui] = self
                    .padded
                    .index_of(&model.compose_unchecked(u, s))
                    .ok_or_else(|| Error::Consistency(format!("{u}·{s} left the padded window")))?;
            }
        }
        let big = self.padded.len();
        let g = &self.padded_gram;
        let mut a = Mat::<C>::zeros(n, n);
        let mut gl = vec![ZERO; big];
        for s in 0..n {
            // column s of G'L
            gl.iter_mut().for_each(|z| *z = ZERO);
            for u in 0..k {
                let col = g.col(idx[s * k + u]).try_as_col_major().expect("owned matrices are column-major").as_slice();
                let c = terms[u].1;
                for (z, &w) in gl.iter_mut().zip(col) {
                    *z += c * w;
                }
            }
            for t in 0..n {
                let mut acc = ZERO;
                for v in 0..k {
                    acc += terms[v].1.conj() * gl[idx[t * k + v]];
                }
                a[(t, s)] = acc;
            }
        }
        Ok(a)
    }

    pub fn norm_lower(&self, x: &GroupRingElement) -> Result<NormEstimate> {
        if x.model() != self.h.model() {
            return Err(Error::ModelMismatch { left: self.h.model().to_string(), right: x.model().to_string() });
        }
        if x.support_radius() > self.pad {
            return Err(Error::InvalidArgument(format!(
                "element has support radius {} but the window is padded by {}",
                x.support_radius(),
                self.pad
            )));
        }
        let a = self.pulled_back_form(x)?;
        let top = match &self.factor {
            Factor::Eigen { vals, vecs } => linalg::top_generalized_with(&a, vals, vecs, CUTOFF_REL, LANCZOS_TOL)?,
            Factor::Cholesky(l) => {
                let n = self.ball.len();
                let a = column_major(&a);
                let start: Vec<C> = (0..n).map(|i| C::new(1.0 + 0.1 * ((i * 7919) % 13) as f64, 0.0)).collect();
                // L⁻¹ A L⁻* has the same spectrum as the pencil (A, LL*)
                let (theta, _) = linalg::lanczos_top(n, &start, LANCZOS_TOL, LANCZOS_STEPS, |w| {
                    let mut y = w.to_vec();
                    backward_solve_adjoint(l, &mut y);
                    let mut z = mat_vec_cm(&a, &y);
                    forward_solve(l, &mut z);
                    z
                })?;
                theta
            }
        };
        let mut est = NormEstimate::new("gns-window", Some(self.radius), top.max(0.0).sqrt(), BoundKind::LowerBound);
        est.tolerances.cutoff = Some(CUTOFF_REL);
        est.tolerances.psd = Some(DEFAULT_PSD_TOL);
        est.tolerances.eigenvalue = Some(LANCZOS_TOL);
        Ok(est)
    }
}

/// Norm of `π_h(x)` compressed to the window `B_R`: the square root of the
/// top generalized eigenvalue of `(L_x* G_{R+r} L_x, G_R)`. A lower bound
/// for `‖x‖_D` whenever `h ∈ D`.
///
/// Radial `h` and `x` on a free group are handled on the span of the sphere
/// indicators, which keeps large radii cheap.
pub fn gns_norm_lower(h: &GroupFunction, x: &GroupRingElement, radius: u32) -> Result<NormEstimate> {
    if x.model() != h.model() {
        return Err(Error::ModelMismatch { left: h.model().to_string(), right: x.model().to_string() });
    }
    if h.is_radial() && h.model().is_free() {
        if let Some(coeffs) = radial_coefficients(x) {
            return radial_gns(h, &coeffs, radius);
        }
    }
    GnsContext::new(h, radius, x.support_radius())?.norm_lower(x)
}

/// Number of words `s` with `|s| = k` sharing exactly `c` leading letters with
/// a fixed word of length `j`, in the free group of rank `m`.
fn prefix_pairs(m: u32, j: u32, k: u32, c: u32) -> f64 {
    let q = (2 * m - 1) as f64;
    if c > j.min(k) {
        return 0.0;
    }
    if c == k {
        return 1.0;
    }
    if c == j {
        let first = if j == 0 { (2 * m) as f64 } else { q };
        return first * q.powi((k - j - 1) as i32);
    }
    let first = if c == 0 { q } else { q - 1.0 };
    first * q.powi((k - c - 1) as i32)
}

fn radial_gns(h: &GroupFunction, x: &[C], radius: u32) -> Result<NormEstimate> {
    let model = h.model();
    let GroupKind::Free { rank: m } = model.kind() else { unreachable!("caller checks the model") };
    let r = (x.len() - 1) as u32;
    let top = (radius + r) as usize;
    let q = (2 * m - 1) as f64;
    let size: Vec<f64> = (0..=top as u32).map(|k| model.sphere_count(k) as f64).collect();
    let profile: Vec<C> =
        (0..=2 * top as u32).map(|d| h.radial_value(d).expect("radial function")).collect();
    for (d, v) in profile.iter().enumerate() {
        h.tail().check_at(d as u32, v.norm(), || format!("{} at word length {d}", h.label()))?;
    }
    // Gram of the normalised sphere indicators χ_k/√|S_k|
    let gram = Mat::from_fn(top + 1, top + 1, |j, k| {
        let (j32, k32) = (j as u32, k as u32);
        let mut acc = ZERO;
        for c in 0..=j32.min(k32) {
            acc += profile[(j32 + k32 - 2 * c) as usize] * prefix_pairs(m, j32, k32, c);
        }
        acc * (size[j] / size[k]).sqrt()
    });
    let allowance = DEFAULT_PSD_TOL * (1.0 + linalg::norm_inf(&gram));
    let defect = linalg::hermitian_defect(&gram);
    if defect > allowance {
        return Err(Error::NotHermitian { defect, allowance });
    }
    let min_eigenvalue = linalg::hermitian_eigenvalues(&linalg::symmetrize(&gram))?[0];
    if min_eigenvalue < -allowance {
        return Err(Error::NotPositive { min_eigenvalue });
    }
    // multiplication by x on the sphere basis: χ_j·χ_k via χ₁χ_k = χ_{k+1} + qχ_{k−1}
    let mul_chi1 = |v: &[C]| -> Vec<C> {
        let mut out = vec![ZERO; v.len() + 1];
        for (k, &c) in v.iter().enumerate() {
            if c == ZERO {
                continue;
            }
            out[k + 1] += c;
            if k == 1 {
                out[0] += c * (2 * m) as f64;
            } else if k > 1 {
                out[k - 1] += c * q;
            }
        }
        out
    };
    let n = radius as usize + 1;
    let mut columns: Vec<Vec<C>> = Vec::with_capacity(n);
    for k in 0..n {
        let mut basis = vec![ZERO; k + 1];
        basis[k] = C::new(1.0, 0.0);
        let mut prev = basis.clone();
        let mut cur = mul_chi1(&basis);
        let mut acc = vec![ZERO; top + 1];
        for (i, &b) in basis.iter().enumerate() {
            acc[i] += x[0] * b;
        }
        for (j, &a) in x.iter().enumerate().skip(1) {
            for (i, &c) in cur.iter().enumerate() {
                acc[i] += a * c;
            }
            let mut next = mul_chi1(&cur);
            let back = if j == 1 { (2 * m) as f64 } else { q };
            for (i, &p) in prev.iter().enumerate() {
                next[i] -= p * back;
            }
            prev = cur;
            cur = next;
        }
        columns.push(acc);
    }
    // rescale to the normalised basis
    let l = Mat::from_fn(top + 1, n, |i, k| columns[k][i] * (size[i] / size[k]).sqrt());
    let a = l.adjoint() * &gram * &l;
    let g = Mat::from_fn(n, n, |i, j| gram[(i, j)]);
    let value = linalg::top_generalized_eigenvalue(&a, &g, CUTOFF_REL, LANCZOS_TOL)?;
    let mut est = NormEstimate::new("gns-radial", Some(radius), value.max(0.0).sqrt(), BoundKind::LowerBound);
    est.tolerances.cutoff = Some(CUTOFF_REL);
    est.tolerances.psd = Some(DEFAULT_PSD_TOL);
    Ok(est)
}
