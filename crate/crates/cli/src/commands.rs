use clap::ValueEnum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use ideal_core::completions::{
    coproduct_checks, default_thresholds, equality_certificate, gns_norm_lower, haagerup_upper_bound, norm_gap_report,
    reduced_norm_lower_with, GapConfig, POWER_ITERATION_CAP,
};
use ideal_core::dynamics::{
    action_certificate, covariant_rep, dn_report, envelopes, groupoid_pd_check, radon_nikodym, ActionKind, Cocycle,
    EnvelopeScope, FiniteSystem, GroupoidFunction,
};
use ideal_core::linalg::C;
use ideal_core::notation::{parse_element, parse_function};
use ideal_core::pd::{cnd_window_check, ideal_membership, lp_norm, pd_window_check, LpStatus, Verdict};
use ideal_core::{Error, GroupFunction, GroupModel, GroupRingElement, IdealSpec};

use crate::{Command, RunConfig};

type Outcome = Result<(Value, bool), String>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DynamicsOp {
    /// validation plus cocycle, unitarity and covariance defects
    Summary,
    /// ρ_s on every point for s in the ball
    Cocycle,
    Envelopes,
    SpectralGap,
    DnReport,
    /// groupoid positive-definiteness of a lifted function
    PdCheck,
}

const DEFECT_TOL: f64 = 1e-12;

fn to_value<T: Serialize>(v: &T) -> Result<Value, String> {
    serde_json::to_value(v).map_err(|e| e.to_string())
}

fn err(e: Error) -> String {
    e.to_string()
}

fn group(text: &str) -> Result<GroupModel, String> {
    text.parse().map_err(err)
}

/// Inline notation, or `@path` for a JSON table on disk.
fn function(model: GroupModel, text: &str) -> Result<GroupFunction, String> {
    match text.strip_prefix('@') {
        Some(path) => {
            let body = std::fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?;
            parse_function(model, &body).map_err(|e| format!("{path}: {e}"))
        }
        None => parse_function(model, text).map_err(err),
    }
}

fn element(model: GroupModel, text: &str) -> Result<GroupRingElement, String> {
    parse_element(model, text).map_err(err)
}

/// A JSON file, or `random:group=<G>,points=<N>` drawn with the run seed.
fn system(text: &str, seed: u64) -> Result<FiniteSystem, String> {
    if let Some(body) = text.strip_prefix("random:") {
        let mut model = None;
        let mut points = None;
        for part in body.split(',') {
            match part.split_once('=') {
                Some(("group", g)) => model = Some(group(g)?),
                Some(("points", n)) => points = Some(n.parse::<usize>().map_err(|_| format!("bad point count {n:?}"))?),
                _ => return Err(format!("cannot parse {text:?}: expected random:group=<G>,points=<N>")),
            }
        }
        let (Some(m), Some(n)) = (model, points) else {
            return Err(format!("cannot parse {text:?}: expected random:group=<G>,points=<N>"));
        };
        return FiniteSystem::random(m, n, seed).map_err(err);
    }
    let body = std::fs::read_to_string(text).map_err(|e| format!("cannot read {text}: {e}"))?;
    FiniteSystem::parse_json(&body).map_err(|e| format!("{text}: {e}"))
}

fn envelope(command: &str, config: &RunConfig, input: Value, passed: bool, report: Value) -> Value {
    json!({
        "schema": 1,
        "command": command,
        "config": {
            "psd_tol": config.psd_tol,
            "eig_tol": config.eig_tol,
            "gap_tol": config.gap_tol,
            "budget": config.budget,
            "seed": config.seed,
        },
        "input": input,
        "passed": passed,
        "report": report,
    })
}

pub fn run(command: &Command, config: &RunConfig) -> Outcome {
    let (name, input, report, passed) = match command {
        Command::PdCheck { group: g, function: f, radius } => {
            let m = group(g)?;
            let h = function(m, f)?;
            let ball = m.ball(*radius, config.budget).map_err(err)?;
            let r = pd_window_check(&h, ball.elements(), config.psd_tol).map_err(err)?;
            let input = json!({"group": m.to_string(), "function": h.label(), "radius": radius});
            ("pd-check", input, to_value(&r)?, r.passed())
        }
        Command::CndCheck { group: g, function: f, radius } => {
            let m = group(g)?;
            let psi = function(m, f)?;
            let ball = m.ball(*radius, config.budget).map_err(err)?;
            let r = cnd_window_check(&psi, ball.elements(), config.psd_tol).map_err(err)?;
            let input = json!({"group": m.to_string(), "function": psi.label(), "radius": radius});
            ("cnd-check", input, to_value(&r)?, r.passed())
        }
        Command::Ideal { group: g, function: f, ideal } => {
            let m = group(g)?;
            let h = function(m, f)?;
            let d: IdealSpec = ideal.parse().map_err(err)?;
            let r = ideal_membership(&h, d).map_err(err)?;
            let input = json!({"group": m.to_string(), "function": h.label(), "ideal": d.to_string()});
            ("ideal", input, to_value(&r)?, r.verdict == Verdict::Member)
        }
        Command::LpNorm { group: g, function: f, p, radius } => {
            let m = group(g)?;
            let h = function(m, f)?;
            let r = lp_norm(&h, *p, *radius).map_err(err)?;
            let input = json!({"group": m.to_string(), "function": h.label(), "p": p, "radius": radius});
            ("lp-norm", input, to_value(&r)?, r.status == LpStatus::Finite)
        }
        Command::Gns { group: g, function: f, element: x, radius } => {
            let m = group(g)?;
            let h = function(m, f)?;
            let x = element(m, x)?;
            let input = json!({"group": m.to_string(), "function": h.label(), "element": x.to_string(), "radius": radius});
            let reduced = reduced_norm_lower_with(&x, *radius, config.budget, config.eig_tol, POWER_ITERATION_CAP)
                .map_err(err)?;
            // the Haagerup bound caps the GNS norm only for functions in ℓ²
            let l2 = ideal_membership(&h, IdealSpec::Lp(2.0)).map_err(err)?.verdict == Verdict::Member;
            let upper = if m.is_free() && l2 { Some(haagerup_upper_bound(&x).map_err(err)?) } else { None };
            let (report, passed) = match gns_norm_lower(&h, &x, *radius) {
                Ok(est) => {
                    let consistent = upper.as_ref().is_none_or(|u| est.value <= u.value + 1e-6);
                    let report = json!({
                        "gns_lower": to_value(&est)?,
                        "reduced_lower": to_value(&reduced)?,
                        "certified_l2": l2,
                        "haagerup_upper": to_value(&upper)?,
                        "below_haagerup_bound": upper.as_ref().map(|_| consistent),
                        "rejected": null,
                    });
                    (report, consistent)
                }
                Err(e @ (Error::NotPositive { .. } | Error::NotHermitian { .. })) => {
                    let report = json!({
                        "gns_lower": null,
                        "reduced_lower": to_value(&reduced)?,
                        "certified_l2": l2,
                        "haagerup_upper": to_value(&upper)?,
                        "below_haagerup_bound": null,
                        "rejected": e.to_string(),
                    });
                    (report, false)
                }
                Err(e) => return Err(err(e)),
            };
            ("gns", input, report, passed)
        }
        Command::NormGap { group: g, element: x, radius, ideal, functions } => {
            let m = group(g)?;
            let x = element(m, x)?;
            let d: IdealSpec = ideal.parse().map_err(err)?;
            let family = if functions.is_empty() {
                None
            } else {
                Some(functions.iter().map(|f| function(m, f)).collect::<Result<Vec<_>, _>>()?)
            };
            let cfg = GapConfig {
                radius: *radius,
                gap_tol: config.gap_tol,
                eig_tol: config.eig_tol,
                family,
                budget: config.budget,
                ..GapConfig::default()
            };
            let r = norm_gap_report(&x, d, &cfg).map_err(err)?;
            let input = json!({"group": m.to_string(), "element": x.to_string(), "radius": radius, "ideal": d.to_string()});
            ("norm-gap", input, to_value(&r)?, true)
        }
        Command::Certificate { group: g, ideal, system: sys, kind, functions, r_conv, thresholds } => {
            return certificate(config, g.as_deref(), ideal.as_deref(), sys.as_deref(), kind.as_deref(), functions, *r_conv, thresholds);
        }
        Command::Coproduct { group: g, radius, samples } => {
            let m = group(g)?;
            let r = coproduct_checks(m, *radius, *samples, config.seed, config.budget).map_err(err)?;
            let passed = r.coassociative == r.samples && r.full_rank;
            let input = json!({"group": m.to_string(), "radius": radius, "samples": samples});
            ("coproduct", input, to_value(&r)?, passed)
        }
        Command::Growth { group: g, max_radius } => {
            let m = group(g)?;
            let r = m.growth_check(*max_radius, config.budget).map_err(err)?;
            let bound = m.growth_constant();
            let passed = r.constant <= bound + 1e-12;
            let mut report = to_value(&r)?;
            report["model_constant"] = json!(bound);
            report["growth_rate"] = json!(m.growth_rate());
            let input = json!({"group": m.to_string(), "max_radius": max_radius});
            ("growth", input, report, passed)
        }
        Command::Dynamics { system: s, op, radius, function: f } => {
            let sys = system(s, config.seed)?;
            let (report, passed) = dynamics(config, &sys, *op, *radius, f.as_deref())?;
            let input = json!({"system": to_value(&sys.to_json())?, "op": op, "radius": radius});
            ("dynamics", input, report, passed)
        }
        Command::DnReport { system: s } => {
            let sys = system(s, config.seed)?;
            let r = dn_report(&sys).map_err(err)?;
            let input = json!({"system": to_value(&sys.to_json())?});
            ("dn-report", input, to_value(&r)?, r.fixed_vector_exists)
        }
    };
    Ok((envelope(name, config, input, passed, report), passed))
}

fn default_certificate_family(model: GroupModel, ideal: IdealSpec) -> Result<Vec<GroupFunction>, String> {
    match ideal {
        IdealSpec::CC => (2..=6).map(|n| GroupFunction::folner_box(model, n).map_err(err)).collect(),
        _ => (1..=5).map(|n| GroupFunction::haagerup(model, n as f64).map_err(err)).collect(),
    }
}

#[allow(clippy::too_many_arguments)]
fn certificate(
    config: &RunConfig,
    g: Option<&str>,
    ideal: Option<&str>,
    sys: Option<&str>,
    kind: Option<&str>,
    functions: &[String],
    r_conv: u32,
    thresholds: &[f64],
) -> Outcome {
    let schedule = |len: usize| if thresholds.is_empty() { default_thresholds(len) } else { thresholds.to_vec() };
    let (input, report, passed) = match sys {
        Some(path) => {
            if g.is_some() || ideal.is_some() {
                return Err("--system takes --kind, not --group or --ideal".into());
            }
            let kind: ActionKind = kind.ok_or("action certificates need --kind amenable|atmenable")?.parse().map_err(err)?;
            let sys = system(path, config.seed)?;
            let m = sys.model();
            let base = if functions.is_empty() {
                default_certificate_family(m, kind.ideal())?
            } else {
                functions.iter().map(|f| function(m, f)).collect::<Result<Vec<_>, _>>()?
            };
            let family: Vec<_> = base.iter().map(|h| GroupoidFunction::lift(h, sys.points())).collect();
            let c = action_certificate(kind, &sys, &family, r_conv, &schedule(family.len())).map_err(err)?;
            let input = json!({"system": to_value(&sys.to_json())?, "kind": kind, "r_conv": r_conv});
            (input, to_value(&c)?, c.accepted)
        }
        None => {
            if kind.is_some() {
                return Err("--kind applies to action certificates; pass --system".into());
            }
            let m = group(g.ok_or("--group is required")?)?;
            let d: IdealSpec = ideal.ok_or("--ideal is required")?.parse().map_err(err)?;
            let family = if functions.is_empty() {
                default_certificate_family(m, d)?
            } else {
                functions.iter().map(|f| function(m, f)).collect::<Result<Vec<_>, _>>()?
            };
            let c = equality_certificate(d, &family, r_conv, &schedule(family.len())).map_err(err)?;
            let input = json!({"group": m.to_string(), "ideal": d.to_string(), "r_conv": r_conv});
            (input, to_value(&c)?, c.accepted)
        }
    };
    Ok((envelope("certificate", config, input, passed, report), passed))
}

fn seeded_vector(n: usize, seed: u64) -> Vec<C> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()
}

fn dynamics(config: &RunConfig, sys: &FiniteSystem, op: DynamicsOp, radius: Option<u32>, f: Option<&str>) -> Outcome {
    let m = sys.model();
    let ball = || m.ball(radius.unwrap_or(2), config.budget).map_err(err);
    Ok(match op {
        DynamicsOp::Summary => {
            let ball = ball()?;
            let cocycle = Cocycle::new(sys).map_err(err)?;
            let rep = covariant_rep(sys).map_err(err)?;
            let f = seeded_vector(sys.points(), config.seed);
            let (mut unitarity, mut covariance, mut homomorphism, mut chain) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
            for s in ball.elements() {
                unitarity = unitarity.max(rep.unitarity_defect(s).map_err(err)?);
                covariance = covariance.max(rep.covariance_defect(s, &f).map_err(err)?);
                for t in ball.elements() {
                    homomorphism = homomorphism.max(rep.homomorphism_defect(s, t).map_err(err)?);
                    chain = chain.max(cocycle.chain_rule_defect(s, t).map_err(err)?);
                }
            }
            let generators: Vec<Value> = (0..m.num_generators())
                .map(|i| json!({"generator": m.generator_symbol(i).to_string(), "rho": cocycle.generator_values(i as usize)}))
                .collect();
            let passed = [unitarity, covariance, homomorphism, chain].iter().all(|d| *d <= DEFECT_TOL);
            let report = json!({
                "generators": generators,
                "window": ball.len(),
                "unitarity_defect": unitarity,
                "covariance_defect": covariance,
                "homomorphism_defect": homomorphism,
                "chain_rule_defect": chain,
                "tolerance": DEFECT_TOL,
            });
            (report, passed)
        }
        DynamicsOp::Cocycle => {
            let ball = ball()?;
            let rows = ball
                .elements()
                .iter()
                .map(|s| Ok(json!({"element": s.to_string(), "rho": radon_nikodym(sys, s).map_err(err)?})))
                .collect::<Result<Vec<_>, String>>()?;
            (json!({"values": rows}), true)
        }
        DynamicsOp::Envelopes => {
            let scope = radius.map_or(EnvelopeScope::All, EnvelopeScope::Ball);
            let e = envelopes(sys, scope).map_err(err)?;
            let passed = e.stabilized.unwrap_or(true);
            (to_value(&e)?, passed)
        }
        DynamicsOp::SpectralGap => {
            let gap = covariant_rep(sys).map_err(err)?.spectral_gap().map_err(err)?;
            let vector: Vec<[f64; 2]> = gap.vector.iter().map(|c| [c.re, c.im]).collect();
            let report = json!({"lambda_min": gap.lambda_min, "fixed": gap.fixed, "vector": vector});
            (report, gap.fixed)
        }
        DynamicsOp::DnReport => {
            let r = dn_report(sys).map_err(err)?;
            (to_value(&r)?, r.fixed_vector_exists)
        }
        DynamicsOp::PdCheck => {
            let h = function(m, f.ok_or("--op pd-check needs --function")?)?;
            let lift = GroupoidFunction::lift(&h, sys.points());
            let r = groupoid_pd_check(&lift, sys, ball()?.elements(), config.psd_tol).map_err(err)?;
            let mut report = to_value(&r)?;
            report["function"] = json!(h.label());
            (report, r.passed)
        }
    })
}
