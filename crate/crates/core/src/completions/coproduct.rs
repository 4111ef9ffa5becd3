//! The coproduct `Δ(s) = s ⊗ s` on the group ring.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupModel};
use crate::linalg::{C, ZERO};
use crate::ring::GroupRingElement;

/// A finite sum of simple tensors `g₁ ⊗ … ⊗ g_k` of group elements.
#[derive(Clone, PartialEq)]
pub struct TensorElement {
    model: GroupModel,
    arity: usize,
    terms: BTreeMap<Vec<GroupElement>, C>,
}

impl TensorElement {
    pub fn zero(model: GroupModel, arity: usize) -> Self {
        Self { model, arity, terms: BTreeMap::new() }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[GroupElement], &C)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), v))
    }

    pub fn coefficient(&self, key: &[GroupElement]) -> C {
        self.terms.get(key).copied().unwrap_or(ZERO)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, key: Vec<GroupElement>, a: C) {
        assert_eq!(key.len(), self.arity, "tensor term has the wrong arity");
        let slot = self.terms.entry(key).or_insert(ZERO);
        *slot += a;
        if *slot == ZERO {
            self.terms.retain(|_, v| *v != ZERO);
        }
    }

    /// Applies `Δ` to the tensor factor at `position`.
    pub fn coproduct_at(&self, position: usize) -> Result<Self> {
        if position >= self.arity {
            return Err(Error::InvalidArgument(format!("no tensor factor {position} in arity {}", self.arity)));
        }
        let mut out = Self::zero(self.model, self.arity + 1);
        for (key, a) in &self.terms {
            let mut k = key.clone();
            k.insert(position, key[position].clone());
            out.add_term(k, *a);
        }
        Ok(out)
    }

    /// `(Σ c_{g,h} g ⊗ h)·(y ⊗ e)`.
    pub fn mul_left_factor(&self, y: &GroupRingElement) -> Result<Self> {
        if self.arity != 2 {
            return Err(Error::InvalidArgument("right multiplication by y ⊗ e needs a tensor square".into()));
        }
        let mut out = Self::zero(self.model, 2);
        for (key, a) in &self.terms {
            for (t, b) in y.terms() {
                out.add_term(vec![self.model.compose(&key[0], t)?, key[1].clone()], a * b);
            }
        }
        Ok(out)
    }
}

impl fmt::Display for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (key, a)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let names: Vec<String> = key.iter().map(|g| g.to_string()).collect();
            if *a == C::new(1.0, 0.0) {
                write!(f, "{}", names.join("⊗"))?;
            } else {
                write!(f, "({a})·{}", names.join("⊗"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TensorElement({self})")
    }
}

/// `Δ(Σ α_s s) = Σ α_s s ⊗ s`.
pub fn coproduct(x: &GroupRingElement) -> TensorElement {
    let mut out = TensorElement::zero(x.model(), 2);
    for (s, a) in x.terms() {
        out.add_term(vec![s.clone(), s.clone()], *a);
    }
    out
}

/// `(Δ ⊗ id)Δ(x) = (id ⊗ Δ)Δ(x)`, compared exactly.
pub fn is_coassociative(x: &GroupRingElement) -> Result<bool> {
    let d = coproduct(x);
    Ok(d.coproduct_at(0)? == d.coproduct_at(1)?)
}

/// Exact rank of a sparse real matrix given by rows, by Gaussian elimination
/// with partial pivoting.
pub fn sparse_rank(rows: &[Vec<(usize, f64)>], ncols: usize) -> usize {
    let mut dense: Vec<Vec<f64>> = rows
        .iter()
        .filter(|r| !r.is_empty())
        .map(|r| {
            let mut v = vec![0.0; ncols];
            for &(j, a) in r {
                v[j] += a;
            }
            v
        })
        .collect();
    let mut rank = 0;
    for col in 0..ncols {
        let Some(p) = (rank..dense.len())
            .filter(|&i| dense[i][col].abs() > 1e-12)
            .max_by(|&a, &b| dense[a][col].abs().total_cmp(&dense[b][col].abs()))
        else {
            continue;
        };
        dense.swap(rank, p);
        let pivot = dense[rank].clone();
        for row in dense.iter_mut().skip(rank + 1) {
            let f = row[col] / pivot[col];
            if f != 0.0 {
                for (x, y) in row.iter_mut().zip(&pivot).skip(col) {
                    *x -= f * y;
                }
            }
        }
        rank += 1;
    }
    rank
}

#[derive(Clone, Debug, Serialize)]
pub struct CoproductReport {
    pub model: String,
    pub radius: u32,
    pub samples: usize,
    pub coassociative: usize,
    pub density_rank: usize,
    pub expected_rank: usize,
    pub full_rank: bool,
}

/// Largest coordinate space `|B_R|²` the rank check will build.
pub const DENSITY_LIMIT: usize = 40_000;

/// Co-associativity on `samples` seeded random elements of `ℂ[B_R]`, and the
/// rank of `{Δ(s)(t ⊗ e) = st ⊗ s : s ∈ B_R, t ∈ B_{2R}}` on `B_R ⊗ B_R`.
pub fn coproduct_checks(model: GroupModel, radius: u32, samples: usize, seed: u64, budget: usize) -> Result<CoproductReport> {
    let ball = model.ball(radius, budget)?;
    let n = ball.len();
    if n * n > DENSITY_LIMIT {
        return Err(Error::DenseLimit { dim: n * n, limit: DENSITY_LIMIT });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coassociative = 0;
    for _ in 0..samples {
        let k = rng.random_range(1..=n.min(6));
        let terms: Vec<_> = (0..k)
            .map(|_| {
                let s = ball.get(rng.random_range(0..n)).clone();
                (s, C::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)))
            })
            .collect();
        let x = GroupRingElement::from_terms(model, terms)?;
        if is_coassociative(&x)? {
            coassociative += 1;
        }
    }
    let wide = model.ball(2 * radius, budget)?;
    let mut rows = Vec::with_capacity(n * wide.len());
    for s in ball.elements() {
        let delta = coproduct(&GroupRingElement::basis(s));
        for t in wide.elements() {
            let v = delta.mul_left_factor(&GroupRingElement::basis(t))?;
            let row: Vec<(usize, f64)> = v
                .terms()
                .filter_map(|(key, a)| {
                    let i = ball.index_of(&key[0])?;
                    let j = ball.index_of(&key[1])?;
                    Some((i * n + j, a.re))
                })
                .collect();
            rows.push(row);
        }
    }
    let density_rank = sparse_rank(&rows, n * n);
    Ok(CoproductReport {
        model: model.to_string(),
        radius,
        samples,
        coassociative,
        density_rank,
        expected_rank: n * n,
        full_rank: density_rank == n * n,
    })
}
