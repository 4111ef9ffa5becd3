//! Text notation for functions and group-ring elements.
//!
//! Functions: `delta`, `one`, `wordlength`, `haagerup:n=2`, `folner:box=3`,
//! `schoenberg:wordlength,t=0.5`, `random:dim=4,seed=42`, or a JSON table
//! `{"values": {"e": 1, "a": [0.5, 0.1]}, "certificate": {...}}`.
//!
//! Elements: `gensum` (the sum of the symmetric generators), or a linear
//! combination such as `2e + a - (0+1i)ab^-1`.

use std::collections::BTreeMap;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::group::GroupModel;
use crate::linalg::C;
use crate::pd::{GroupFunction, TailCertificate};
use crate::rep::random_pd;
use crate::ring::GroupRingElement;

fn parse_error(input: &str, reason: impl Into<String>) -> Error {
    Error::Parse { input: input.to_string(), reason: reason.into() }
}

/// `key=value` pairs after the colon.
fn parameters<'a>(input: &str, body: &'a str) -> Result<BTreeMap<&'a str, &'a str>> {
    let mut out = BTreeMap::new();
    for part in body.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (k, v) = part.split_once('=').ok_or_else(|| parse_error(input, format!("expected key=value, found {part:?}")))?;
        if out.insert(k.trim(), v.trim()).is_some() {
            return Err(parse_error(input, format!("parameter {k} given twice")));
        }
    }
    Ok(out)
}

fn take<T: std::str::FromStr>(input: &str, params: &mut BTreeMap<&str, &str>, key: &str) -> Result<T> {
    let v = params.remove(key).ok_or_else(|| parse_error(input, format!("missing parameter {key}")))?;
    v.parse().map_err(|_| parse_error(input, format!("parameter {key} = {v:?} is malformed")))
}

fn no_leftovers(input: &str, params: &BTreeMap<&str, &str>) -> Result<()> {
    match params.keys().next() {
        Some(k) => Err(parse_error(input, format!("unknown parameter {k}"))),
        None => Ok(()),
    }
}

/// Parses a named function; JSON tables start with `{`.
pub fn parse_function(model: GroupModel, text: &str) -> Result<GroupFunction> {
    let input = text.trim();
    if input.starts_with('{') {
        return parse_function_json(model, input);
    }
    let (name, body) = input.split_once(':').unwrap_or((input, ""));
    match name {
        "delta" | "one" | "wordlength" if !body.is_empty() => {
            Err(parse_error(input, format!("{name} takes no parameters")))
        }
        "delta" => Ok(GroupFunction::delta(model)),
        "one" => Ok(GroupFunction::one(model)),
        "wordlength" => Ok(GroupFunction::word_length(model)),
        "haagerup" => {
            let mut p = parameters(input, body)?;
            let n: f64 = take(input, &mut p, "n")?;
            no_leftovers(input, &p)?;
            GroupFunction::haagerup(model, n)
        }
        "folner" => {
            let mut p = parameters(input, body)?;
            let n: u32 = take(input, &mut p, "box")?;
            no_leftovers(input, &p)?;
            GroupFunction::folner_box(model, n)
        }
        "schoenberg" => {
            let (psi, rest) = body.split_once(',').unwrap_or((body, ""));
            let psi = parse_function(model, psi)?;
            let mut p = parameters(input, rest)?;
            let t: f64 = take(input, &mut p, "t")?;
            no_leftovers(input, &p)?;
            GroupFunction::family(model, crate::pd::Family::Schoenberg(psi, t))
        }
        "random" => {
            let mut p = parameters(input, body)?;
            let dim: usize = take(input, &mut p, "dim")?;
            let seed: u64 = take(input, &mut p, "seed")?;
            no_leftovers(input, &p)?;
            random_pd(model, dim, seed)
        }
        _ => Err(parse_error(
            input,
            "expected delta, one, wordlength, haagerup:n=.., folner:box=.., schoenberg:<psi>,t=.., random:dim=..,seed=.. or a JSON table",
        )),
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum JsonValue {
    Real(f64),
    Complex([f64; 2]),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctionJson {
    group: Option<String>,
    label: Option<String>,
    values: BTreeMap<String, JsonValue>,
    certificate: TailCertificate,
}

/// A finitely tabulated function (zero off the table) with an explicit
/// certificate block.
pub fn parse_function_json(model: GroupModel, text: &str) -> Result<GroupFunction> {
    let json: FunctionJson = serde_json::from_str(text).map_err(|e| Error::Parse {
        input: "function JSON".into(),
        reason: format!("line {}, column {}: {e}", e.line(), e.column()),
    })?;
    if let Some(g) = &json.group {
        let declared: GroupModel = g.parse()?;
        if declared != model {
            return Err(Error::ModelMismatch { left: model.to_string(), right: declared.to_string() });
        }
    }
    let mut entries = Vec::with_capacity(json.values.len());
    for (word, v) in &json.values {
        let s = model
            .parse_element(word)
            .map_err(|e| Error::Parse { input: format!("values.{word}"), reason: e.to_string() })?;
        let c = match v {
            JsonValue::Real(r) => C::new(*r, 0.0),
            JsonValue::Complex([re, im]) => C::new(*re, *im),
        };
        entries.push((s, c));
    }
    let h = GroupFunction::table(model, entries, Some(json.certificate))?;
    Ok(match json.label {
        Some(l) => h.with_label(l),
        None => h,
    })
}

/// `gensum`, or a linear combination of words.
pub fn parse_element(model: GroupModel, text: &str) -> Result<GroupRingElement> {
    match text.trim() {
        "gensum" => Ok(GroupRingElement::generator_sum(model)),
        other => GroupRingElement::parse(model, other),
    }
}
