//! Finitely supported formal sums `Σ α_s s` in the complex group ring.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupModel, Homomorphism};

/// A finitely supported element of the group ring. Zero coefficients are
/// never stored; terms iterate in ball order.
#[derive(Clone, PartialEq)]
pub struct GroupRingElement {
    model: GroupModel,
    terms: BTreeMap<GroupElement, Complex64>,
}

impl GroupRingElement {
    pub fn zero(model: GroupModel) -> Self {
        Self { model, terms: BTreeMap::new() }
    }

    pub fn identity(model: GroupModel) -> Self {
        Self::basis(&model.identity())
    }

    pub fn basis(s: &GroupElement) -> Self {
        let mut x = Self::zero(s.model());
        x.add_term(s.clone(), Complex64::new(1.0, 0.0));
        x
    }

    /// `Σ_{s ∈ S} s` over the symmetric generating set.
    pub fn generator_sum(model: GroupModel) -> Self {
        let mut x = Self::zero(model);
        for s in model.symmetric_generators() {
            x.add_term(s, Complex64::new(1.0, 0.0));
        }
        x
    }

    pub fn from_terms(model: GroupModel, terms: impl IntoIterator<Item = (GroupElement, Complex64)>) -> Result<Self> {
        let mut x = Self::zero(model);
        for (s, a) in terms {
            if s.model() != model {
                return Err(Error::ModelMismatch { left: model.to_string(), right: s.model().to_string() });
            }
            x.add_term(s, a);
        }
        Ok(x)
    }

    /// Parses `gensum`, `e`, or a sum such as `a + 2b - 0.5a^-1 + (1+2i)ab`.
    pub fn parse(model: GroupModel, text: &str) -> Result<Self> {
        let t = text.trim();
        if t == "gensum" {
            return Ok(Self::generator_sum(model));
        }
        let err = |reason: &str| Error::Parse { input: text.to_string(), reason: reason.to_string() };
        let mut x = Self::zero(model);
        let chars: Vec<char> = t.chars().filter(|c| !c.is_whitespace()).collect();
        if chars.is_empty() {
            return Err(err("empty element"));
        }
        let mut i = 0;
        while i < chars.len() {
            let mut sign = 1.0;
            while i < chars.len() && (chars[i] == '+' || chars[i] == '-') {
                if chars[i] == '-' {
                    sign = -sign;
                }
                i += 1;
            }
            let mut coeff = Complex64::new(1.0, 0.0);
            let mut has_coeff = false;
            if i < chars.len() && chars[i] == '(' {
                has_coeff = true;
                let close = chars[i..].iter().position(|&c| c == ')').ok_or_else(|| err("unclosed ("))? + i;
                let inner: String = chars[i + 1..close].iter().collect();
                coeff = parse_complex(&inner).ok_or_else(|| err("bad complex coefficient"))?;
                i = close + 1;
                if i < chars.len() && (chars[i] == '*' || chars[i] == '·') {
                    i += 1;
                }
            } else {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                if i > start {
                    has_coeff = true;
                    let s: String = chars[start..i].iter().collect();
                    coeff = Complex64::new(s.parse().map_err(|_| err("bad coefficient"))?, 0.0);
                    if i < chars.len() && (chars[i] == '*' || chars[i] == '·') {
                        i += 1;
                    }
                }
            }
            let start = i;
            // A word ends at the next top-level sign that is not part of an exponent.
            while i < chars.len() && !((chars[i] == '+' || chars[i] == '-') && chars[i - 1] != '^') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            if word.is_empty() && !has_coeff {
                return Err(err("missing term"));
            }
            let s = if word.is_empty() { model.identity() } else { model.parse_element(&word)? };
            x.add_term(s, coeff * sign);
        }
        Ok(x)
    }

    pub fn model(&self) -> GroupModel {
        self.model
    }

    pub fn add_term(&mut self, s: GroupElement, a: Complex64) {
        debug_assert_eq!(s.model(), self.model);
        match self.terms.entry(s) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += a;
                if o.get().norm() == 0.0 {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                if a.norm() != 0.0 {
                    v.insert(a);
                }
            }
        }
    }

    pub fn coefficient(&self, s: &GroupElement) -> Complex64 {
        self.terms.get(s).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GroupElement, &Complex64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest word length in the support (0 for the zero element).
    pub fn support_radius(&self) -> u32 {
        self.terms.keys().map(|s| s.word_length()).max().unwrap_or(0)
    }

    /// `Σ α_s`, the value under the trivial representation.
    pub fn coefficient_sum(&self) -> Complex64 {
        self.terms.values().sum()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = Self::zero(self.model);
        for (s, a) in &self.terms {
            out.add_term(s.clone(), a * c);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_model(other)?;
        let mut out = self.clone();
        for (s, a) in &other.terms {
            out.add_term(s.clone(), *a);
        }
        Ok(out)
    }

    /// Convolution product `x · y`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_model(other)?;
        let mut out = Self::zero(self.model);
        for (s, a) in &self.terms {
            for (t, b) in &other.terms {
                out.add_term(self.model.compose_unchecked(s, t), a * b);
            }
        }
        Ok(out)
    }

    /// `x* = Σ conj(α_s) s⁻¹`.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(self.model);
        for (s, a) in &self.terms {
            out.add_term(self.model.inverse(s), a.conj());
        }
        out
    }

    /// `‖x‖₂` of the coefficient vector.
    pub fn l2_norm(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Pushes the element forward along a homomorphism, combining colliding images.
    pub fn pushforward(&self, hom: &Homomorphism) -> Result<Self> {
        if hom.source() != self.model {
            return Err(Error::ModelMismatch { left: hom.source().to_string(), right: self.model.to_string() });
        }
        let mut out = Self::zero(hom.target());
        for (s, a) in &self.terms {
            out.add_term(hom.apply(s)?, *a);
        }
        Ok(out)
    }

    fn same_model(&self, other: &Self) -> Result<()> {
        if self.model != other.model {
            return Err(Error::ModelMismatch { left: self.model.to_string(), right: other.model.to_string() });
        }
        Ok(())
    }
}

pub(crate) fn parse_complex(s: &str) -> Option<Complex64> {
    let s = s.trim();
    if let Ok(re) = s.parse::<f64>() {
        return Some(Complex64::new(re, 0.0));
    }
    let body = s.strip_suffix('i')?;
    // split at the last sign that is not the leading one or part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && bytes[k - 1] != b'e' && bytes[k - 1] != b'E');
    match split {
        Some(k) => {
            let re: f64 = body[..k].parse().ok()?;
            let im_s = &body[k..];
            let im: f64 = match im_s {
                "+" => 1.0,
                "-" => -1.0,
                _ => im_s.parse().ok()?,
            };
            Some(Complex64::new(re, im))
        }
        None => {
            let im: f64 = match body {
                "" | "+" => 1.0,
                "-" => -1.0,
                _ => body.parse().ok()?,
            };
            Some(Complex64::new(0.0, im))
        }
    }
}

impl fmt::Debug for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (s, a)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if a.im == 0.0 {
                write!(f, "{}·{}", a.re, s)?;
            } else {
                write!(f, "({}{:+}i)·{}", a.re, a.im, s)?;
            }
        }
        Ok(())
    }
}
