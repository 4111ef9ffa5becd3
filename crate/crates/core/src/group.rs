//! Exact models of finitely generated groups.
//!
//! Every element is stored in a canonical normal form so that equality of
//! elements is equality of representations:
//!
//! * free groups: freely reduced words,
//! * free abelian groups: exponent vectors,
//! * finite cyclic groups: residues,
//! * the infinite dihedral group: alternating words in the involutions `s`, `t`.
//!
//! Words are written over letter codes: generator `i` is `2i`, its inverse is
//! `2i + 1`. Balls are enumerated in (length, lexicographic-by-letter-code)
//! order, which makes every window indexing reproducible.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Default element budget for ball enumeration.
pub const DEFAULT_BUDGET: usize = 2_000_000;

/// Letter code: generator `i` is `2i`, its inverse `2i + 1`.
pub type Letter = u32;

type Repr = SmallVec<[i32; 6]>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupKind {
    Free { rank: u32 },
    FreeAbelian { rank: u32 },
    FiniteCyclic { order: u32 },
    InfiniteDihedral,
}

/// A finitely generated group together with its symmetric generating set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupModel {
    kind: GroupKind,
}

/// An element of a [`GroupModel`], in normal form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    model: GroupModel,
    repr: Repr,
}

impl GroupModel {
    pub fn free(rank: u32) -> Result<Self> {
        if rank == 0 || rank > 26 {
            return Err(Error::InvalidModel(format!("free group rank {rank} not in 1..=26")));
        }
        Ok(Self { kind: GroupKind::Free { rank } })
    }

    pub fn free_abelian(rank: u32) -> Result<Self> {
        if rank == 0 || rank > 26 {
            return Err(Error::InvalidModel(format!("free abelian rank {rank} not in 1..=26")));
        }
        Ok(Self { kind: GroupKind::FreeAbelian { rank } })
    }

    pub fn cyclic(order: u32) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidModel("cyclic group order must be at least 1".into()));
        }
        Ok(Self { kind: GroupKind::FiniteCyclic { order } })
    }

    pub fn infinite_dihedral() -> Self {
        Self { kind: GroupKind::InfiniteDihedral }
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.kind, GroupKind::FiniteCyclic { .. })
    }

    pub fn is_free(&self) -> bool {
        matches!(self.kind, GroupKind::Free { .. })
    }

    pub fn num_generators(&self) -> u32 {
        match self.kind {
            GroupKind::Free { rank } | GroupKind::FreeAbelian { rank } => rank,
            GroupKind::FiniteCyclic { .. } => 1,
            GroupKind::InfiniteDihedral => 2,
        }
    }

    /// Printable symbol of generator `i`.
    pub fn generator_symbol(&self, i: u32) -> char {
        match self.kind {
            GroupKind::InfiniteDihedral => ['s', 't'][i as usize],
            _ => (b'a' + i as u8) as char,
        }
    }

    fn symbol_index(&self, c: char) -> Option<u32> {
        (0..self.num_generators()).find(|&i| self.generator_symbol(i) == c)
    }

    /// Whether generator `i` is its own inverse.
    fn is_involution(&self, i: u32) -> bool {
        match self.kind {
            GroupKind::InfiniteDihedral => true,
            GroupKind::FiniteCyclic { order } => order <= 2 && i == 0,
            _ => false,
        }
    }

    pub fn identity(&self) -> GroupElement {
        let repr = match self.kind {
            GroupKind::FreeAbelian { rank } => SmallVec::from_elem(0, rank as usize),
            GroupKind::FiniteCyclic { .. } => SmallVec::from_elem(0, 1),
            _ => SmallVec::new(),
        };
        GroupElement { model: *self, repr }
    }

    /// The element represented by a single letter.
    pub fn letter(&self, letter: Letter) -> Result<GroupElement> {
        if letter / 2 >= self.num_generators() {
            return Err(Error::InvalidArgument(format!(
                "letter code {letter} out of range for {self}"
            )));
        }
        let mut e = self.identity();
        self.push_letter(&mut e.repr, letter);
        Ok(e)
    }

    /// Generator `i` as an element.
    pub fn generator(&self, i: u32) -> Result<GroupElement> {
        self.letter(2 * i)
    }

    /// The symmetric generating set `S = S⁻¹`, identity excluded, in ball order.
    pub fn symmetric_generators(&self) -> Vec<GroupElement> {
        let mut out: Vec<GroupElement> = Vec::new();
        for g in 0..self.num_generators() {
            for inv in 0..2 {
                let e = self.letter(2 * g + inv).expect("generator in range");
                if !e.is_identity() && !out.contains(&e) {
                    out.push(e);
                }
            }
        }
        out.sort();
        out
    }

    fn push_letter(&self, repr: &mut Repr, letter: Letter) {
        let g = letter / 2;
        let inverse = letter % 2 == 1;
        match self.kind {
            GroupKind::Free { .. } => {
                let code = letter as i32;
                if repr.last() == Some(&(code ^ 1)) {
                    repr.pop();
                } else {
                    repr.push(code);
                }
            }
            GroupKind::InfiniteDihedral => {
                let code = (2 * g) as i32;
                if repr.last() == Some(&code) {
                    repr.pop();
                } else {
                    repr.push(code);
                }
            }
            GroupKind::FreeAbelian { .. } => {
                repr[g as usize] += if inverse { -1 } else { 1 };
            }
            GroupKind::FiniteCyclic { order } => {
                let n = order as i64;
                let step = if inverse { n - 1 } else { 1 };
                repr[0] = ((repr[0] as i64 + step) % n) as i32;
            }
        }
    }

    /// Reduces an arbitrary word to its normal form.
    pub fn from_letters(&self, letters: &[Letter]) -> Result<GroupElement> {
        let mut e = self.identity();
        for &l in letters {
            if l / 2 >= self.num_generators() {
                return Err(Error::InvalidArgument(format!(
                    "letter code {l} out of range for {self}"
                )));
            }
            self.push_letter(&mut e.repr, l);
        }
        Ok(e)
    }

    /// Builds a free abelian element from its exponent vector.
    pub fn from_exponents(&self, exponents: &[i32]) -> Result<GroupElement> {
        match self.kind {
            GroupKind::FreeAbelian { rank } if exponents.len() == rank as usize => Ok(GroupElement {
                model: *self,
                repr: exponents.iter().copied().collect(),
            }),
            _ => Err(Error::InvalidArgument(format!(
                "exponent vector of length {} does not fit {self}",
                exponents.len()
            ))),
        }
    }

    /// Builds a cyclic-group element from any integer representative.
    pub fn from_residue(&self, r: i64) -> Result<GroupElement> {
        match self.kind {
            GroupKind::FiniteCyclic { order } => {
                let n = order as i64;
                Ok(GroupElement {
                    model: *self,
                    repr: SmallVec::from_elem(r.rem_euclid(n) as i32, 1),
                })
            }
            _ => Err(Error::InvalidArgument(format!("{self} has no residues"))),
        }
    }

    fn check(&self, e: &GroupElement) -> Result<()> {
        if e.model != *self {
            return Err(Error::ModelMismatch {
                left: self.to_string(),
                right: e.model.to_string(),
            });
        }
        Ok(())
    }

    /// The product `ab` in normal form.
    pub fn compose(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.compose_unchecked(a, b))
    }

    pub(crate) fn compose_unchecked(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        let mut repr = a.repr.clone();
        match self.kind {
            GroupKind::Free { .. } => {
                for &c in &b.repr {
                    if repr.last() == Some(&(c ^ 1)) {
                        repr.pop();
                    } else {
                        repr.push(c);
                    }
                }
            }
            GroupKind::InfiniteDihedral => {
                for &c in &b.repr {
                    if repr.last() == Some(&c) {
                        repr.pop();
                    } else {
                        repr.push(c);
                    }
                }
            }
            GroupKind::FreeAbelian { .. } => {
                for (x, y) in repr.iter_mut().zip(&b.repr) {
                    *x += *y;
                }
            }
            GroupKind::FiniteCyclic { order } => {
                repr[0] = ((repr[0] as i64 + b.repr[0] as i64) % order as i64) as i32;
            }
        }
        GroupElement { model: *self, repr }
    }

    pub fn inverse(&self, a: &GroupElement) -> GroupElement {
        let repr = match self.kind {
            GroupKind::Free { .. } => a.repr.iter().rev().map(|c| c ^ 1).collect(),
            GroupKind::InfiniteDihedral => a.repr.iter().rev().copied().collect(),
            GroupKind::FreeAbelian { .. } => a.repr.iter().map(|x| -x).collect(),
            GroupKind::FiniteCyclic { order } => {
                SmallVec::from_elem(((order as i64 - a.repr[0] as i64) % order as i64) as i32, 1)
            }
        };
        GroupElement { model: *self, repr }
    }

    /// `|a⁻¹ b|`, the left-invariant word distance.
    pub fn distance(&self, a: &GroupElement, b: &GroupElement) -> u32 {
        match self.kind {
            GroupKind::Free { .. } | GroupKind::InfiniteDihedral => {
                let lcp = a.repr.iter().zip(&b.repr).take_while(|(x, y)| x == y).count();
                (a.repr.len() + b.repr.len() - 2 * lcp) as u32
            }
            GroupKind::FreeAbelian { .. } => a
                .repr
                .iter()
                .zip(&b.repr)
                .map(|(x, y)| (x - y).unsigned_abs())
                .sum(),
            GroupKind::FiniteCyclic { order } => {
                let d = (b.repr[0] as i64 - a.repr[0] as i64).rem_euclid(order as i64) as u32;
                d.min(order - d)
            }
        }
    }

    /// Number of elements of word length exactly `k` (closed form).
    pub fn sphere_count(&self, k: u32) -> u128 {
        if k == 0 {
            return 1;
        }
        match self.kind {
            GroupKind::Free { rank } => {
                let q = 2 * rank as u128 - 1;
                (2 * rank as u128).saturating_mul(q.saturating_pow(k - 1))
            }
            GroupKind::FreeAbelian { rank } => {
                let n = rank as u128;
                let k = k as u128;
                let mut total: u128 = 0;
                for i in 1..=n.min(k) {
                    let term = (1u128 << i)
                        .saturating_mul(binomial(n, i))
                        .saturating_mul(binomial(k - 1, i - 1));
                    total = total.saturating_add(term);
                }
                total
            }
            GroupKind::FiniteCyclic { order } => {
                let (n, k) = (order as u128, k as u128);
                if 2 * k < n {
                    2
                } else if 2 * k == n {
                    1
                } else {
                    0
                }
            }
            GroupKind::InfiniteDihedral => 2,
        }
    }

    /// Number of elements of word length at most `radius` (closed form).
    pub fn ball_size(&self, radius: u32) -> u128 {
        match self.kind {
            GroupKind::FiniteCyclic { order } => {
                let r = radius as u128;
                (2 * r + 1).min(order as u128)
            }
            _ => (0..=radius).fold(0u128, |acc, k| acc.saturating_add(self.sphere_count(k))),
        }
    }

    /// Largest word length, if the group is finite.
    pub fn diameter(&self) -> Option<u32> {
        match self.kind {
            GroupKind::FiniteCyclic { order } => Some(order / 2),
            _ => None,
        }
    }

    /// `sup_{k ≥ 1} sphere_count(k)^{1/k}`: the smallest `C` with `#S_k ≤ C^k` for every `k`.
    pub fn growth_constant(&self) -> f64 {
        match self.kind {
            GroupKind::Free { rank } => 2.0 * rank as f64,
            GroupKind::FiniteCyclic { order } => match order {
                1 => 0.0,
                2 => 1.0,
                _ => 2.0,
            },
            GroupKind::InfiniteDihedral => 2.0,
            // Polynomial growth: the supremum is attained at small k.
            GroupKind::FreeAbelian { .. } => (1..=256u32)
                .map(|k| (self.sphere_count(k) as f64).powf(1.0 / k as f64))
                .fold(0.0, f64::max),
        }
    }

    /// `lim sphere_count(k)^{1/k}`, the exponential growth rate.
    pub fn growth_rate(&self) -> f64 {
        match self.kind {
            GroupKind::Free { rank } => 2.0 * rank as f64 - 1.0,
            GroupKind::FiniteCyclic { .. } => 0.0,
            GroupKind::FreeAbelian { .. } | GroupKind::InfiniteDihedral => 1.0,
        }
    }

    /// Enumerates the ball of radius `radius` in canonical order.
    pub fn ball(&self, radius: u32, budget: usize) -> Result<Ball> {
        let predicted = self.ball_size(radius);
        if predicted > budget as u128 {
            return Err(Error::BudgetExceeded { radius, predicted, budget });
        }
        let mut elements: Vec<GroupElement> = Vec::with_capacity(predicted as usize);
        let mut sphere_starts = vec![0usize];
        elements.push(self.identity());
        match self.kind {
            GroupKind::Free { rank } => {
                let mut start = 0;
                for k in 1..=radius {
                    sphere_starts.push(elements.len());
                    let end = elements.len();
                    for i in start..end {
                        let base = elements[i].repr.clone();
                        for code in 0..(2 * rank) as i32 {
                            if base.last() == Some(&(code ^ 1)) {
                                continue;
                            }
                            let mut repr = base.clone();
                            repr.push(code);
                            elements.push(GroupElement { model: *self, repr });
                        }
                    }
                    start = end;
                    debug_assert_eq!(elements.len() - start, self.sphere_count(k) as usize);
                }
            }
            GroupKind::InfiniteDihedral => {
                for k in 1..=radius {
                    sphere_starts.push(elements.len());
                    for first in [0i32, 2] {
                        let repr = (0..k as usize)
                            .map(|j| if j % 2 == 0 { first } else { 2 - first })
                            .collect();
                        elements.push(GroupElement { model: *self, repr });
                    }
                }
            }
            GroupKind::FiniteCyclic { order } => {
                let mut rest: Vec<GroupElement> = (1..order as i64)
                    .map(|r| self.from_residue(r).expect("cyclic"))
                    .filter(|e| e.word_length() <= radius)
                    .collect();
                rest.sort();
                let mut k = 0;
                for e in rest {
                    while k < e.word_length() {
                        sphere_starts.push(elements.len());
                        k += 1;
                    }
                    elements.push(e);
                }
                while k < radius {
                    sphere_starts.push(elements.len());
                    k += 1;
                }
            }
            GroupKind::FreeAbelian { rank } => {
                let mut sphere: Vec<GroupElement> = vec![self.identity()];
                for k in 1..=radius {
                    sphere_starts.push(elements.len());
                    let mut next: HashSet<GroupElement> = HashSet::new();
                    for e in &sphere {
                        for g in 0..rank as usize {
                            for step in [-1i32, 1] {
                                let mut repr = e.repr.clone();
                                repr[g] += step;
                                let cand = GroupElement { model: *self, repr };
                                if cand.word_length() == k {
                                    next.insert(cand);
                                }
                            }
                        }
                    }
                    let mut next: Vec<GroupElement> = next.into_iter().collect();
                    next.sort();
                    elements.extend(next.iter().cloned());
                    sphere = next;
                }
            }
        }
        sphere_starts.push(elements.len());
        let lookup = if self.is_free() {
            Lookup::FreeRank
        } else {
            Lookup::Map(elements.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect())
        };
        Ok(Ball { model: *self, radius, elements, sphere_starts, lookup })
    }

    /// Sphere counts over `1..=k_max` by enumeration, and the smallest `C` with
    /// `#S_k ≤ C^k` on that window.
    pub fn growth_check(&self, k_max: u32, budget: usize) -> Result<GrowthReport> {
        if k_max == 0 {
            return Err(Error::InvalidArgument("growth window must have K ≥ 1".into()));
        }
        let ball = self.ball(k_max, budget)?;
        let sphere_counts: Vec<u64> = (1..=k_max).map(|k| ball.sphere(k).len() as u64).collect();
        let constant = sphere_counts
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let k = (i + 1) as f64;
                if i == 0 {
                    c as f64
                } else {
                    (c as f64).powf(1.0 / k)
                }
            })
            .fold(0.0, f64::max);
        Ok(GrowthReport { k_max, constant, sphere_counts })
    }

    /// Parses an element in generator notation: `e`, `ab^-1a`, `a^3b^-2`.
    pub fn parse_element(&self, text: &str) -> Result<GroupElement> {
        let err = |reason: &str| Error::Parse { input: text.to_string(), reason: reason.to_string() };
        let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if t == "e" || t == "1" || t.is_empty() {
            return Ok(self.identity());
        }
        let chars: Vec<char> = t.chars().collect();
        let mut letters: Vec<Letter> = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let g = self
                .symbol_index(chars[i])
                .ok_or_else(|| err(&format!("unknown generator {:?}", chars[i])))?;
            i += 1;
            let mut power: i64 = 1;
            if i < chars.len() && chars[i] == '^' {
                i += 1;
                let start = i;
                if i < chars.len() && (chars[i] == '-' || chars[i] == '+') {
                    i += 1;
                }
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                power = s.parse().map_err(|_| err("malformed exponent"))?;
            }
            let letter = if power < 0 { 2 * g + 1 } else { 2 * g };
            if power.unsigned_abs() > 1_000_000 {
                return Err(err("exponent too large"));
            }
            letters.extend(std::iter::repeat_n(letter, power.unsigned_abs() as usize));
        }
        self.from_letters(&letters)
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r.saturating_mul(n - i) / (i + 1);
    }
    r
}

impl fmt::Display for GroupModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            GroupKind::Free { rank } => write!(f, "F{rank}"),
            GroupKind::FreeAbelian { rank: 1 } => write!(f, "Z"),
            GroupKind::FreeAbelian { rank } => write!(f, "Z{rank}"),
            GroupKind::FiniteCyclic { order } => write!(f, "ZmodN:{order}"),
            GroupKind::InfiniteDihedral => write!(f, "Dinf"),
        }
    }
}

impl FromStr for GroupModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidModel(format!("unknown group name {s:?}"));
        let s = s.trim();
        if s == "Dinf" {
            return Ok(Self::infinite_dihedral());
        }
        if s == "Z" {
            return Self::free_abelian(1);
        }
        if let Some(n) = s.strip_prefix("ZmodN:") {
            return Self::cyclic(n.parse().map_err(|_| bad())?);
        }
        if let Some(n) = s.strip_prefix('F') {
            return Self::free(n.parse().map_err(|_| bad())?);
        }
        if let Some(n) = s.strip_prefix('Z') {
            return Self::free_abelian(n.parse().map_err(|_| bad())?);
        }
        Err(bad())
    }
}

impl GroupElement {
    pub fn model(&self) -> GroupModel {
        self.model
    }

    pub fn is_identity(&self) -> bool {
        match self.model.kind {
            GroupKind::Free { .. } | GroupKind::InfiniteDihedral => self.repr.is_empty(),
            _ => self.repr.iter().all(|&x| x == 0),
        }
    }

    pub fn word_length(&self) -> u32 {
        match self.model.kind {
            GroupKind::Free { .. } | GroupKind::InfiniteDihedral => self.repr.len() as u32,
            GroupKind::FreeAbelian { .. } => self.repr.iter().map(|x| x.unsigned_abs()).sum(),
            GroupKind::FiniteCyclic { order } => {
                let r = self.repr[0] as u32;
                r.min(order - r)
            }
        }
    }

    /// The normal-form word as letter codes.
    pub fn letters(&self) -> Vec<Letter> {
        match self.model.kind {
            GroupKind::Free { .. } | GroupKind::InfiniteDihedral => {
                self.repr.iter().map(|&c| c as Letter).collect()
            }
            GroupKind::FreeAbelian { .. } => {
                let mut out = Vec::new();
                for (g, &x) in self.repr.iter().enumerate() {
                    let code = 2 * g as Letter + u32::from(x < 0);
                    out.extend(std::iter::repeat_n(code, x.unsigned_abs() as usize));
                }
                out
            }
            GroupKind::FiniteCyclic { order } => {
                let r = self.repr[0] as u32;
                if 2 * r <= order {
                    vec![0; r as usize]
                } else {
                    vec![1; (order - r) as usize]
                }
            }
        }
    }

    /// Exponent vector of a free abelian element.
    pub fn exponents(&self) -> Option<&[i32]> {
        matches!(self.model.kind, GroupKind::FreeAbelian { .. }).then_some(&self.repr[..])
    }

    /// Residue of a cyclic-group element.
    pub fn residue(&self) -> Option<u32> {
        matches!(self.model.kind, GroupKind::FiniteCyclic { .. }).then_some(self.repr[0] as u32)
    }
}

impl Ord for GroupElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.model.cmp(&other.model).then_with(|| match self.model.kind {
            GroupKind::Free { .. } | GroupKind::InfiniteDihedral => {
                self.repr.len().cmp(&other.repr.len()).then_with(|| self.repr.cmp(&other.repr))
            }
            _ => self
                .word_length()
                .cmp(&other.word_length())
                .then_with(|| self.letters().cmp(&other.letters())),
        })
    }
}

impl PartialOrd for GroupElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letters = self.letters();
        if letters.is_empty() {
            return write!(f, "e");
        }
        let mut i = 0;
        while i < letters.len() {
            let l = letters[i];
            let mut run = 1;
            while i + run < letters.len() && letters[i + run] == l {
                run += 1;
            }
            let sym = self.model.generator_symbol(l / 2);
            let inverse = l % 2 == 1 && !self.model.is_involution(l / 2);
            match (run, inverse) {
                (1, false) => write!(f, "{sym}")?,
                (1, true) => write!(f, "{sym}^-1")?,
                (n, false) => write!(f, "{sym}^{n}")?,
                (n, true) => write!(f, "{sym}^-{n}")?,
            }
            i += run;
        }
        Ok(())
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.model, self)
    }
}

/// Result of [`GroupModel::growth_check`].
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct GrowthReport {
    pub k_max: u32,
    pub constant: f64,
    pub sphere_counts: Vec<u64>,
}

#[derive(Clone, Debug)]
enum Lookup {
    FreeRank,
    Map(HashMap<GroupElement, usize>),
}

/// All elements of word length at most `radius`, in canonical order.
#[derive(Clone, Debug)]
pub struct Ball {
    model: GroupModel,
    radius: u32,
    elements: Vec<GroupElement>,
    sphere_starts: Vec<usize>,
    lookup: Lookup,
}

impl Ball {
    pub fn model(&self) -> GroupModel {
        self.model
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn get(&self, i: usize) -> &GroupElement {
        &self.elements[i]
    }

    /// Elements of length exactly `k` (empty beyond the radius).
    pub fn sphere(&self, k: u32) -> &[GroupElement] {
        if k > self.radius {
            return &[];
        }
        let k = k as usize;
        &self.elements[self.sphere_starts[k]..self.sphere_starts[k + 1]]
    }

    /// Number of elements with length `< k`.
    pub fn sphere_start(&self, k: u32) -> usize {
        self.sphere_starts[(k.min(self.radius + 1)) as usize]
    }

    /// Position of `e` in the ball, or `None` if it lies outside.
    pub fn index_of(&self, e: &GroupElement) -> Option<usize> {
        if e.model != self.model {
            return None;
        }
        match &self.lookup {
            Lookup::Map(map) => map.get(e).copied(),
            Lookup::FreeRank => {
                let k = e.repr.len() as u32;
                if k > self.radius {
                    return None;
                }
                let GroupKind::Free { rank } = self.model.kind else { unreachable!() };
                let q = (2 * rank - 1) as usize;
                let mut r = 0usize;
                let mut prev: Option<i32> = None;
                for &l in &e.repr {
                    let less = match prev {
                        None => l as usize,
                        Some(p) => l as usize - usize::from((p ^ 1) < l),
                    };
                    r = r * q + less;
                    prev = Some(l);
                }
                Some(self.sphere_starts[k as usize] + r)
            }
        }
    }
}

/// A homomorphism specified on generators, checked on the defining relators.
#[derive(Clone, Debug)]
pub struct Homomorphism {
    source: GroupModel,
    target: GroupModel,
    images: Vec<GroupElement>,
}

impl Homomorphism {
    pub fn new(source: GroupModel, target: GroupModel, images: Vec<GroupElement>) -> Result<Self> {
        if images.len() != source.num_generators() as usize {
            return Err(Error::InvalidArgument(format!(
                "{} generator images given, {source} has {}",
                images.len(),
                source.num_generators()
            )));
        }
        for img in &images {
            target.check(img)?;
        }
        let hom = Self { source, target, images };
        for (name, relator) in hom.relators() {
            if !hom.apply_letters(&relator).is_identity() {
                return Err(Error::InvalidHomomorphism { relator: name });
            }
        }
        Ok(hom)
    }

    /// Maps `Fm → Zm` sending each generator to the matching unit vector.
    pub fn abelianization(source: GroupModel) -> Result<Self> {
        let target = GroupModel::free_abelian(source.num_generators())?;
        let images = (0..source.num_generators())
            .map(|g| target.generator(g))
            .collect::<Result<Vec<_>>>()?;
        Self::new(source, target, images)
    }

    pub fn source(&self) -> GroupModel {
        self.source
    }

    pub fn target(&self) -> GroupModel {
        self.target
    }

    fn relators(&self) -> Vec<(String, Vec<Letter>)> {
        let m = self.source;
        match m.kind {
            GroupKind::Free { .. } => Vec::new(),
            GroupKind::FreeAbelian { rank } => {
                let mut out = Vec::new();
                for i in 0..rank {
                    for j in (i + 1)..rank {
                        let (a, b) = (m.generator_symbol(i), m.generator_symbol(j));
                        out.push((format!("{a}{b}{a}^-1{b}^-1"), vec![2 * i, 2 * j, 2 * i + 1, 2 * j + 1]));
                    }
                }
                out
            }
            GroupKind::FiniteCyclic { order } => vec![(format!("a^{order}"), vec![0; order as usize])],
            GroupKind::InfiniteDihedral => vec![("s^2".into(), vec![0, 0]), ("t^2".into(), vec![2, 2])],
        }
    }

    fn apply_letters(&self, letters: &[Letter]) -> GroupElement {
        let t = self.target;
        let mut acc = t.identity();
        for &l in letters {
            let img = &self.images[(l / 2) as usize];
            let img = if l % 2 == 1 { t.inverse(img) } else { img.clone() };
            acc = t.compose_unchecked(&acc, &img);
        }
        acc
    }

    pub fn apply(&self, s: &GroupElement) -> Result<GroupElement> {
        self.source.check(s)?;
        Ok(self.apply_letters(&s.letters()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> GroupModel {
        GroupModel::free(2).unwrap()
    }

    #[test]
    fn free_reduction() {
        let g = f2();
        let a = g.parse_element("a").unwrap();
        let ai = g.parse_element("a^-1").unwrap();
        assert!(g.compose(&a, &ai).unwrap().is_identity());
        let x = g.parse_element("ab").unwrap();
        let y = g.parse_element("b^-1a").unwrap();
        assert_eq!(g.compose(&x, &y).unwrap(), g.parse_element("a^2").unwrap());
        assert_eq!(g.parse_element("aba^-1").unwrap().word_length(), 3);
        assert_eq!(g.parse_element("abb^-1a").unwrap().word_length(), 2);
    }

    #[test]
    fn abelian_addition() {
        let z2 = GroupModel::free_abelian(2).unwrap();
        let x = z2.from_exponents(&[1, 0]).unwrap();
        let y = z2.from_exponents(&[0, 1]).unwrap();
        assert_eq!(z2.compose(&x, &y).unwrap().exponents(), Some(&[1, 1][..]));
        assert_eq!(z2.from_exponents(&[3, -2]).unwrap().word_length(), 5);
        assert_eq!(z2.parse_element("a^3b^-2").unwrap().exponents(), Some(&[3, -2][..]));
    }

    #[test]
    fn mixed_models_are_rejected() {
        let g = f2();
        let z = GroupModel::free_abelian(2).unwrap();
        let err = g.compose(&g.identity(), &z.identity()).unwrap_err();
        assert!(matches!(err, Error::ModelMismatch { .. }));
    }

    #[test]
    fn ball_sizes() {
        assert_eq!(f2().ball(2, DEFAULT_BUDGET).unwrap().len(), 17);
        assert_eq!(GroupModel::free_abelian(2).unwrap().ball(1, DEFAULT_BUDGET).unwrap().len(), 5);
        for m in ["F2", "Z2", "ZmodN:5", "Dinf", "F3", "Z"] {
            let m: GroupModel = m.parse().unwrap();
            let b = m.ball(0, DEFAULT_BUDGET).unwrap();
            assert_eq!(b.len(), 1);
            assert!(b.get(0).is_identity());
        }
    }

    #[test]
    fn budget_is_enforced_with_prediction() {
        match f2().ball(14, DEFAULT_BUDGET) {
            Err(Error::BudgetExceeded { predicted, .. }) => assert_eq!(predicted, 2 * 3u128.pow(14) - 1),
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn growth_constants() {
        let r = f2().growth_check(6, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.constant, 4.0);
        assert_eq!(r.sphere_counts, vec![4, 12, 36, 108, 324, 972]);
        let r = GroupModel::free_abelian(2).unwrap().growth_check(6, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.constant, 4.0);
        assert_eq!(r.sphere_counts, vec![4, 8, 12, 16, 20, 24]);
        let r = GroupModel::cyclic(5).unwrap().growth_check(6, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.constant, 2.0);
        assert_eq!(r.sphere_counts, vec![2, 2, 0, 0, 0, 0]);
    }

    #[test]
    fn free_rank_matches_enumeration() {
        let b = GroupModel::free(3).unwrap().ball(4, DEFAULT_BUDGET).unwrap();
        for (i, e) in b.elements().iter().enumerate() {
            assert_eq!(b.index_of(e), Some(i));
        }
    }

    #[test]
    fn display_round_trips() {
        for name in ["F2", "Z2", "ZmodN:7", "Dinf", "Z"] {
            let m: GroupModel = name.parse().unwrap();
            assert_eq!(m.to_string(), name);
            for e in m.ball(3, DEFAULT_BUDGET).unwrap().elements() {
                assert_eq!(&m.parse_element(&e.to_string()).unwrap(), e, "{name} {e}");
            }
        }
    }

    #[test]
    fn abelianization_kills_commutators() {
        let h = Homomorphism::abelianization(f2()).unwrap();
        let c = f2().parse_element("aba^-1b^-1").unwrap();
        assert!(h.apply(&c).unwrap().is_identity());
    }

    #[test]
    fn relator_violations_are_named() {
        let z2 = GroupModel::free_abelian(2).unwrap();
        let imgs = vec![f2().generator(0).unwrap(), f2().generator(1).unwrap()];
        match Homomorphism::new(z2, f2(), imgs) {
            Err(Error::InvalidHomomorphism { relator }) => assert_eq!(relator, "aba^-1b^-1"),
            other => panic!("{other:?}"),
        }
    }
}
