//! Dense Hermitian linear algebra on top of `faer`.

use faer::{Col, Mat, Side};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

pub type C = Complex64;

pub(crate) const ZERO: C = C::new(0.0, 0.0);
pub(crate) const ONE: C = C::new(1.0, 0.0);

/// `max_{i,j} |M_ij − conj(M_ji)|`.
pub fn hermitian_defect(m: &Mat<C>) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for j in 0..n {
        for i in j..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Maximum absolute row sum.
pub fn norm_inf(m: &Mat<C>) -> f64 {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `(M + M*) / 2`.
pub fn symmetrize(m: &Mat<C>) -> Mat<C> {
    let n = m.nrows();
    Mat::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5)
}

/// Eigenvalues of a Hermitian matrix in nondecreasing order.
pub fn hermitian_eigenvalues(m: &Mat<C>) -> Result<Vec<f64>> {
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    m.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Numerical(format!("eigenvalue iteration failed: {e:?}")))
}

/// Eigen-decomposition of a Hermitian matrix: eigenvalues ascending and the
/// matching orthonormal eigenvectors as columns.
pub fn hermitian_eigen(m: &Mat<C>) -> Result<(Vec<f64>, Mat<C>)> {
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Numerical(format!("eigen-decomposition failed: {e:?}")))?;
    let values = evd.S().column_vector().iter().map(|x| x.re).collect();
    Ok((values, evd.U().to_owned()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PsdOutcome {
    Positive,
    Indefinite,
    NonHermitian,
}

/// Outcome of a positive-semidefiniteness check with relative tolerance
/// `λ_min ≥ −tol·(1 + ‖M‖_∞)`.
#[derive(Clone, Debug, Serialize)]
pub struct PsdReport {
    pub outcome: PsdOutcome,
    pub size: usize,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub hermitian_defect: f64,
    pub allowance: f64,
    pub tolerance: f64,
}

impl PsdReport {
    pub fn passed(&self) -> bool {
        self.outcome == PsdOutcome::Positive
    }
}

pub fn psd_check(m: &Mat<C>, tol: f64) -> Result<PsdReport> {
    let allowance = tol * (1.0 + norm_inf(m));
    let defect = hermitian_defect(m);
    let size = m.nrows();
    if defect > allowance {
        return Ok(PsdReport {
            outcome: PsdOutcome::NonHermitian,
            size,
            min_eigenvalue: f64::NAN,
            max_eigenvalue: f64::NAN,
            hermitian_defect: defect,
            allowance,
            tolerance: tol,
        });
    }
    let eig = hermitian_eigenvalues(&symmetrize(m))?;
    let min = eig.first().copied().unwrap_or(0.0);
    let max = eig.last().copied().unwrap_or(0.0);
    Ok(PsdReport {
        outcome: if min >= -allowance { PsdOutcome::Positive } else { PsdOutcome::Indefinite },
        size,
        min_eigenvalue: min,
        max_eigenvalue: max,
        hermitian_defect: defect,
        allowance,
        tolerance: tol,
    })
}

pub(crate) fn dot(a: &[C], b: &[C]) -> C {
    // ⟨a, b⟩ = Σ a_i conj(b_i)
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

pub(crate) fn norm(a: &[C]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn mat_vec(m: &Mat<C>, v: &[C]) -> Vec<C> {
    let col = Col::from_fn(v.len(), |i| v[i]);
    let out = m * &col;
    (0..out.nrows()).map(|i| out[i]).collect()
}

pub(crate) fn adjoint_vec(m: &Mat<C>, v: &[C]) -> Vec<C> {
    let col = Col::from_fn(v.len(), |i| v[i]);
    let out = m.adjoint() * &col;
    (0..out.nrows()).map(|i| out[i]).collect()
}

/// Largest eigenvalue of the Hermitian operator `apply` on `C^n` by Lanczos
/// with full reorthogonalization. The returned Ritz value never exceeds the
/// true top eigenvalue.
pub(crate) fn lanczos_top(
    n: usize,
    start: &[C],
    rel_tol: f64,
    max_steps: usize,
    mut apply: impl FnMut(&[C]) -> Vec<C>,
) -> Result<(f64, Vec<C>)> {
    if n == 0 {
        return Ok((0.0, Vec::new()));
    }
    let s_norm = norm(start);
    if s_norm == 0.0 {
        return Err(Error::Numerical("Lanczos start vector is zero".into()));
    }
    let mut basis: Vec<Vec<C>> = vec![start.iter().map(|x| x / s_norm).collect()];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let steps = max_steps.min(n);
    let mut best = (f64::NEG_INFINITY, basis[0].clone());
    for step in 0..steps {
        let q = &basis[step];
        let mut w = apply(q);
        let alpha = dot(&w, q).re;
        alphas.push(alpha);
        // full reorthogonalization, twice for stability
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&w, b);
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= c * bi;
                }
            }
        }
        let beta = norm(&w);
        let m = alphas.len();
        let t = Mat::from_fn(m, m, |i, j| {
            if i == j {
                C::new(alphas[i], 0.0)
            } else if i + 1 == j {
                C::new(betas[i], 0.0)
            } else if j + 1 == i {
                C::new(betas[j], 0.0)
            } else {
                ZERO
            }
        });
        let (vals, vecs) = hermitian_eigen(&t)?;
        let theta = vals[m - 1];
        let last = vecs[(m - 1, m - 1)].norm();
        let residual = beta * last;
        if theta > best.0 || step + 1 == steps || residual <= rel_tol * theta.abs().max(1e-300) || beta <= 1e-14 * theta.abs().max(1.0) {
            let mut ritz = vec![ZERO; n];
            for (k, b) in basis.iter().enumerate() {
                let c = vecs[(k, m - 1)];
                for (r, bi) in ritz.iter_mut().zip(b) {
                    *r += c * bi;
                }
            }
            best = (theta, ritz);
        }
        if residual <= rel_tol * theta.abs().max(1e-300) || beta <= 1e-14 * theta.abs().max(1.0) {
            break;
        }
        betas.push(beta);
        basis.push(w.iter().map(|x| x / beta).collect());
    }
    Ok(best)
}

/// Largest generalized eigenvalue of the pencil `(A, G)` with `G` Hermitian
/// positive semidefinite, restricted to the numerical range of `G`
/// (eigenvalues above `cutoff_rel · λ_max(G)`).
pub fn top_generalized_eigenvalue(a: &Mat<C>, g: &Mat<C>, cutoff_rel: f64, rel_tol: f64) -> Result<f64> {
    let (vals, vecs) = hermitian_eigen(&symmetrize(g))?;
    top_generalized_with(a, &vals, &vecs, cutoff_rel, rel_tol)
}

/// As [`top_generalized_eigenvalue`] with a precomputed eigen-decomposition of `G`.
pub fn top_generalized_with(a: &Mat<C>, g_vals: &[f64], g_vecs: &Mat<C>, cutoff_rel: f64, rel_tol: f64) -> Result<f64> {
    let n = a.nrows();
    let lmax = g_vals.last().copied().unwrap_or(0.0);
    if lmax <= 0.0 {
        return Ok(0.0);
    }
    let keep: Vec<usize> = (0..g_vals.len()).filter(|&i| g_vals[i] > cutoff_rel * lmax).collect();
    let k = keep.len();
    // T = Q_k Λ_k^{-1/2}
    let t = Mat::from_fn(n, k, |i, j| g_vecs[(i, keep[j])] / g_vals[keep[j]].sqrt());
    if k <= 400 {
        let m = t.adjoint() * a * &t;
        let vals = hermitian_eigenvalues(&symmetrize(&m))?;
        return Ok(vals.last().copied().unwrap_or(0.0));
    }
    let start: Vec<C> = (0..k).map(|i| C::new(1.0 + 0.1 * ((i * 7919) % 13) as f64, 0.0)).collect();
    let (theta, _) = lanczos_top(k, &start, rel_tol, 300, |w| {
        let tw = mat_vec(&t, w);
        let atw = mat_vec(a, &tw);
        adjoint_vec(&t, &atw)
    })?;
    Ok(theta)
}
