//! Group actions on finite sets with a full-support probability measure.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupKind, GroupModel, Letter};

/// Tolerance on `Σ μ(x) = 1`.
pub const MEASURE_SUM_TOL: f64 = 1e-12;

/// `Γ ↷ {0..N−1}` given by generator permutations, with a measure `μ > 0`.
#[derive(Clone, Debug)]
pub struct FiniteSystem {
    model: GroupModel,
    points: usize,
    /// `perms[i][x] = g_i.x`
    perms: Vec<Vec<usize>>,
    inverse_perms: Vec<Vec<usize>>,
    measure: Vec<f64>,
}

/// The ingestion format: permutations are 0-based image lists keyed by
/// generator symbol.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemJson {
    pub group: String,
    pub points: usize,
    pub action: BTreeMap<String, Vec<usize>>,
    pub measure: Vec<f64>,
}

fn invalid(msg: String) -> Error {
    Error::InvalidSystem(msg)
}

fn compose(p: &[usize], q: &[usize]) -> Vec<usize> {
    // (p∘q)(x) = p(q(x))
    q.iter().map(|&y| p[y]).collect()
}

fn invert(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (x, &y) in p.iter().enumerate() {
        inv[y] = x;
    }
    inv
}

impl FiniteSystem {
    /// Validates bijectivity, the relations of the model, positivity and
    /// normalization of the measure.
    pub fn new(model: GroupModel, perms: Vec<Vec<usize>>, measure: Vec<f64>) -> Result<Self> {
        let points = measure.len();
        if points == 0 {
            return Err(invalid("measure: the space needs at least one point".into()));
        }
        let k = model.num_generators() as usize;
        if perms.len() != k {
            return Err(invalid(format!("action: {model} has {k} generators, {} permutations given", perms.len())));
        }
        for (i, p) in perms.iter().enumerate() {
            let name = model.generator_symbol(i as u32);
            if p.len() != points {
                return Err(invalid(format!("action.{name}: has {} entries, expected {points}", p.len())));
            }
            let mut seen = vec![None; points];
            for (x, &y) in p.iter().enumerate() {
                if y >= points {
                    return Err(invalid(format!("action.{name}[{x}]: image {y} is outside 0..{}", points - 1)));
                }
                if let Some(prev) = seen[y] {
                    return Err(invalid(format!("action.{name}[{x}]: image {y} already used at position {prev}")));
                }
                seen[y] = Some(x);
            }
        }
        let identity: Vec<usize> = (0..points).collect();
        match model.kind() {
            GroupKind::Free { .. } => {}
            GroupKind::FreeAbelian { .. } => {
                for i in 0..k {
                    for j in i + 1..k {
                        if compose(&perms[i], &perms[j]) != compose(&perms[j], &perms[i]) {
                            return Err(invalid(format!(
                                "action: {} and {} do not commute",
                                model.generator_symbol(i as u32),
                                model.generator_symbol(j as u32)
                            )));
                        }
                    }
                }
            }
            GroupKind::FiniteCyclic { order } => {
                let mut p = identity.clone();
                for _ in 0..order {
                    p = compose(&perms[0], &p);
                }
                if p != identity {
                    return Err(invalid(format!("action.a: the permutation does not satisfy a^{order} = e")));
                }
            }
            GroupKind::InfiniteDihedral => {
                for (i, p) in perms.iter().enumerate() {
                    if compose(p, p) != identity {
                        let name = model.generator_symbol(i as u32);
                        return Err(invalid(format!("action.{name}: the permutation is not an involution")));
                    }
                }
            }
        }
        for (x, &m) in measure.iter().enumerate() {
            if !(m > 0.0 && m.is_finite()) {
                return Err(invalid(format!("measure[{x}]: {m} is not strictly positive")));
            }
        }
        let total: f64 = measure.iter().sum();
        if (total - 1.0).abs() > MEASURE_SUM_TOL {
            return Err(invalid(format!("measure: sums to {total}, not 1")));
        }
        let inverse_perms = perms.iter().map(|p| invert(p)).collect();
        Ok(Self { model, points, perms, inverse_perms, measure })
    }

    pub fn from_json(json: &SystemJson) -> Result<Self> {
        let model: GroupModel = json.group.parse()?;
        if json.points != json.measure.len() {
            return Err(invalid(format!("measure: has {} entries but points = {}", json.measure.len(), json.points)));
        }
        let k = model.num_generators();
        for key in json.action.keys() {
            let ok = key.chars().count() == 1 && (0..k).any(|i| key.starts_with(model.generator_symbol(i)));
            if !ok {
                return Err(invalid(format!("action.{key}: {model} has no generator named {key:?}")));
            }
        }
        let perms = (0..k)
            .map(|i| {
                let name = model.generator_symbol(i).to_string();
                json.action.get(&name).cloned().ok_or_else(|| invalid(format!("action.{name}: missing")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(model, perms, json.measure.clone())
    }

    pub fn parse_json(text: &str) -> Result<Self> {
        let json: SystemJson =
            serde_json::from_str(text).map_err(|e| Error::Parse { input: "system JSON".into(), reason: e.to_string() })?;
        Self::from_json(&json)
    }

    pub fn to_json(&self) -> SystemJson {
        SystemJson {
            group: self.model.to_string(),
            points: self.points,
            action: (0..self.perms.len())
                .map(|i| (self.model.generator_symbol(i as u32).to_string(), self.perms[i].clone()))
                .collect(),
            measure: self.measure.clone(),
        }
    }

    /// A seeded random action satisfying the model's relations, with a random
    /// full-support measure.
    pub fn random(model: GroupModel, points: usize, seed: u64) -> Result<Self> {
        if points == 0 {
            return Err(Error::InvalidArgument("a system needs at least one point".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let random_perm = |rng: &mut ChaCha8Rng| {
            let mut p: Vec<usize> = (0..points).collect();
            p.shuffle(rng);
            p
        };
        let perms = match model.kind() {
            GroupKind::Free { rank } => (0..rank).map(|_| random_perm(&mut rng)).collect(),
            GroupKind::FreeAbelian { rank } => {
                // powers of one permutation commute
                let sigma = random_perm(&mut rng);
                (0..rank)
                    .map(|_| {
                        let e = rng.random_range(0..4);
                        (0..e).fold((0..points).collect::<Vec<_>>(), |p, _| compose(&sigma, &p))
                    })
                    .collect()
            }
            GroupKind::FiniteCyclic { order } => {
                let divisors: Vec<usize> = (1..=order as usize).filter(|d| order as usize % d == 0).collect();
                let mut order_pts: Vec<usize> = (0..points).collect();
                order_pts.shuffle(&mut rng);
                let mut p: Vec<usize> = (0..points).collect();
                let mut i = 0;
                while i < points {
                    let fits: Vec<usize> = divisors.iter().copied().filter(|&d| d <= points - i).collect();
                    let len = fits[rng.random_range(0..fits.len())];
                    let cycle = &order_pts[i..i + len];
                    for j in 0..len {
                        p[cycle[j]] = cycle[(j + 1) % len];
                    }
                    i += len;
                }
                vec![p]
            }
            GroupKind::InfiniteDihedral => (0..2)
                .map(|_| {
                    let mut order_pts: Vec<usize> = (0..points).collect();
                    order_pts.shuffle(&mut rng);
                    let mut p: Vec<usize> = (0..points).collect();
                    for pair in order_pts.chunks(2) {
                        if pair.len() == 2 && rng.random_bool(0.7) {
                            p[pair[0]] = pair[1];
                            p[pair[1]] = pair[0];
                        }
                    }
                    p
                })
                .collect(),
        };
        let raw: Vec<f64> = (0..points).map(|_| rng.random_range(0.05..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let measure = raw.iter().map(|m| m / total).collect();
        Self::new(model, perms, measure)
    }

    pub fn model(&self) -> GroupModel {
        self.model
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn measure(&self) -> &[f64] {
        &self.measure
    }

    pub fn permutation(&self, generator: usize) -> &[usize] {
        &self.perms[generator]
    }

    fn act_letter(&self, letter: Letter, x: usize) -> usize {
        let g = (letter / 2) as usize;
        if letter % 2 == 0 {
            self.perms[g][x]
        } else {
            self.inverse_perms[g][x]
        }
    }

    /// `s.x`, applying the letters of `s` right to left.
    pub fn act(&self, s: &GroupElement, x: usize) -> usize {
        s.letters().iter().rev().fold(x, |y, &l| self.act_letter(l, y))
    }

    /// The permutation `x ↦ s.x`.
    pub fn permutation_of(&self, s: &GroupElement) -> Vec<usize> {
        let letters = s.letters();
        (0..self.points).map(|x| letters.iter().rev().fold(x, |y, &l| self.act_letter(l, y))).collect()
    }

    pub(crate) fn check_model(&self, s: &GroupElement) -> Result<()> {
        if s.model() != self.model {
            return Err(Error::ModelMismatch { left: self.model.to_string(), right: s.model().to_string() });
        }
        Ok(())
    }

    /// Orbit of `x`, each point paired with an element `w` with `w.x = y`.
    pub fn orbit(&self, x: usize) -> Vec<(usize, GroupElement)> {
        let mut seen = vec![false; self.points];
        seen[x] = true;
        let mut out = vec![(x, self.model.identity())];
        let mut head = 0;
        let gens = self.model.symmetric_generators();
        while head < out.len() {
            let (y, w) = out[head].clone();
            for g in &gens {
                let z = self.act(g, y);
                if !seen[z] {
                    seen[z] = true;
                    out.push((z, self.model.compose_unchecked(g, &w)));
                }
            }
            head += 1;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_and_errors() {
        let text = r#"{"group":"Z","points":2,"action":{"a":[1,0]},"measure":[0.3333333333333333,0.6666666666666667]}"#;
        let sys = FiniteSystem::parse_json(text).unwrap();
        assert_eq!(sys.points(), 2);
        let again = FiniteSystem::from_json(&sys.to_json()).unwrap();
        assert_eq!(again.measure(), sys.measure());
        let cases = [
            (r#"{"group":"Z","points":2,"action":{"a":[1,1]},"measure":[0.5,0.5]}"#, "action.a[1]"),
            (r#"{"group":"Z","points":2,"action":{"a":[1,2]},"measure":[0.5,0.5]}"#, "action.a[1]"),
            (r#"{"group":"Z","points":2,"action":{"a":[1,0]},"measure":[0.5,0.6]}"#, "sums to"),
            (r#"{"group":"Z","points":2,"action":{"a":[1,0]},"measure":[1.0,0.0]}"#, "measure[1]"),
            (r#"{"group":"Z","points":2,"action":{"a":[1,0],"b":[0,1]},"measure":[0.5,0.5]}"#, "action.b"),
            (r#"{"group":"F2","points":2,"action":{"a":[1,0]},"measure":[0.5,0.5]}"#, "action.b: missing"),
            (r#"{"group":"ZmodN:3","points":2,"action":{"a":[1,0]},"measure":[0.5,0.5]}"#, "a^3"),
            (r#"{"group":"Z2","points":3,"action":{"a":[1,0,2],"b":[0,2,1]},"measure":[0.2,0.3,0.5]}"#, "commute"),
        ];
        for (text, needle) in cases {
            let err = FiniteSystem::parse_json(text).unwrap_err().to_string();
            assert!(err.contains(needle), "{err} lacks {needle}");
        }
    }

    #[test]
    fn random_systems_satisfy_relations() {
        for (i, m) in ["F2", "Z2", "ZmodN:6", "Dinf", "Z"].iter().enumerate() {
            let m: GroupModel = m.parse().unwrap();
            for seed in 0..5 {
                FiniteSystem::random(m, 3 + i + seed as usize, seed).unwrap();
            }
        }
    }

    #[test]
    fn action_composes() {
        let m = GroupModel::free(2).unwrap();
        let sys = FiniteSystem::random(m, 7, 3).unwrap();
        let s = m.parse_element("ab^-1").unwrap();
        let t = m.parse_element("ba").unwrap();
        let st = m.compose(&s, &t).unwrap();
        for x in 0..7 {
            assert_eq!(sys.act(&st, x), sys.act(&s, sys.act(&t, x)));
        }
        for (y, w) in sys.orbit(2) {
            assert_eq!(sys.act(&w, 2), y);
        }
    }
}
