//! Worked values checked against closed forms and direct counts.

use ideal_core::completions::{
    default_thresholds, equality_certificate, gns_norm_lower, haagerup_upper_bound, norm_gap_report, reduced_norm_lower,
    schur_multiply, state_compose, trivial_norm, BoundKind, GapConfig,
};
use ideal_core::dynamics::{
    action_certificate, covariant_rep, dn_report, envelopes, groupoid_pd_check, groupoid_schur_multiply, radon_nikodym,
    sup_norm_profile, ActionKind, CrossedElement, EnvelopeScope, FiniteSystem, GroupoidFunction,
};
use ideal_core::linalg::C;
use ideal_core::pd::{cnd_window_check, ideal_membership, lp_norm, pd_window_check, Family, LpStatus, Verdict};
use ideal_core::rep::{matrix_coefficient, random_pd};
use ideal_core::{
    Error, FiniteUnitaryRep, GnsWindow, GroupFunction, GroupModel, GroupRingElement, Homomorphism, IdealSpec,
    TailCertificate, DEFAULT_BUDGET,
};

fn f2() -> GroupModel {
    GroupModel::free(2).unwrap()
}

fn z2() -> GroupModel {
    GroupModel::free_abelian(2).unwrap()
}

fn el(m: GroupModel, w: &str) -> ideal_core::GroupElement {
    m.parse_element(w).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn group_arithmetic() {
    let m = f2();
    assert!(m.compose(&el(m, "a"), &el(m, "a^-1")).unwrap().is_identity());
    assert_eq!(m.compose(&el(m, "ab"), &el(m, "b^-1a")).unwrap(), el(m, "a^2"));
    let z = z2();
    let sum = z.compose(&z.from_exponents(&[1, 0]).unwrap(), &z.from_exponents(&[0, 1]).unwrap()).unwrap();
    assert_eq!(sum, z.from_exponents(&[1, 1]).unwrap());
    assert_eq!(el(m, "aba^-1").word_length(), 3);
    assert_eq!(el(m, "abb^-1a").word_length(), 2);
    assert_eq!(z.from_exponents(&[3, -2]).unwrap().word_length(), 5);
    assert!(matches!(m.compose(&el(m, "a"), &el(z, "a")), Err(Error::ModelMismatch { .. })));
}

#[test]
fn growth_constants() {
    let r = f2().growth_check(6, DEFAULT_BUDGET).unwrap();
    let expected: Vec<u64> = (1..=6).map(|k| 4 * 3u64.pow(k - 1)).collect();
    assert_eq!(r.sphere_counts, expected);
    assert_eq!(r.constant, 4.0);
    let r = z2().growth_check(6, DEFAULT_BUDGET).unwrap();
    assert_eq!(r.sphere_counts, (1..=6).map(|k| 4 * k).collect::<Vec<u64>>());
    assert_eq!(r.constant, 4.0);
    let r = GroupModel::cyclic(5).unwrap().growth_check(6, DEFAULT_BUDGET).unwrap();
    assert_eq!(r.constant, 2.0);
}

#[test]
fn homomorphisms() {
    let m = f2();
    let ab = Homomorphism::abelianization(m).unwrap();
    let comm = GroupRingElement::parse(m, "aba^-1b^-1").unwrap().pushforward(&ab).unwrap();
    assert_eq!(comm, GroupRingElement::identity(z2()));
    let x = GroupRingElement::generator_sum(m).pushforward(&ab).unwrap();
    assert_eq!(x, GroupRingElement::generator_sum(z2()));
    let id = Homomorphism::new(m, m, vec![el(m, "a"), el(m, "b")]).unwrap();
    let y = GroupRingElement::parse(m, "2ab - (0+1i)b^-1").unwrap();
    assert_eq!(y.pushforward(&id).unwrap(), y);
    let z = GroupModel::cyclic(3).unwrap();
    let bad = Homomorphism::new(z, GroupModel::free_abelian(1).unwrap(), vec![el(GroupModel::free_abelian(1).unwrap(), "a")]);
    assert!(matches!(bad, Err(Error::InvalidHomomorphism { .. })));
}

#[test]
fn positive_definiteness_examples() {
    let m = f2();
    let b3 = m.ball(3, DEFAULT_BUDGET).unwrap();
    for h in [GroupFunction::delta(m), GroupFunction::one(m), GroupFunction::haagerup(m, 1.0).unwrap()] {
        assert!(pd_window_check(&h, b3.elements(), 1e-8).unwrap().passed(), "{}", h.label());
    }
    let zero = GroupFunction::constant(m, C::new(0.0, 0.0));
    assert!(cnd_window_check(&zero, b3.elements(), 1e-8).unwrap().passed());
    let len = GroupFunction::word_length(m);
    assert!(cnd_window_check(&len, b3.elements(), 1e-8).unwrap().passed());
    for t in [0.1, 1.0, 10.0] {
        assert!(pd_window_check(&len.exp_neg(t).unwrap(), b3.elements(), 1e-8).unwrap().passed());
    }
    let neg = GroupFunction::custom(m, "-|s|", TailCertificate::None, |s| C::new(-(s.word_length() as f64), 0.0));
    let b2 = m.ball(2, DEFAULT_BUDGET).unwrap();
    assert!(!cnd_window_check(&neg, b2.elements(), 1e-8).unwrap().passed());
}

#[test]
fn family_values() {
    let m = f2();
    let h = GroupFunction::haagerup(m, 1.0).unwrap();
    assert!(close(h.eval(&el(m, "ab")).re, (-2f64).exp(), 1e-15));
    let z = z2();
    let square: Vec<_> = [[0, 0], [1, 0], [0, 1], [1, 1]].iter().map(|e| z.from_exponents(e).unwrap()).collect();
    let f = GroupFunction::family(z, Family::Folner(square)).unwrap();
    assert_eq!(f.eval(&z.from_exponents(&[1, 0]).unwrap()), C::new(0.5, 0.0));
    let s = GroupFunction::family(m, Family::Schoenberg(GroupFunction::word_length(m), 3.0)).unwrap();
    assert_eq!(s.eval(&m.identity()), C::new(1.0, 0.0));

    let prod = h.product(&GroupFunction::one(m)).unwrap();
    let b2 = m.ball(2, DEFAULT_BUDGET).unwrap();
    for s in b2.elements() {
        assert_eq!(prod.eval(s), h.eval(s));
    }
    let atom = GroupFunction::table(m, [(el(m, "a"), C::new(1.0, 0.0))], None).unwrap();
    let ac = atom.adjoint_convolve().unwrap();
    for s in b2.elements() {
        assert_eq!(ac.eval(s), GroupFunction::delta(m).eval(s));
    }
    assert!(matches!(h.adjoint_convolve(), Err(Error::Unsupported(_))));
    let h3 = GroupFunction::haagerup(m, 3.0).unwrap();
    let cube = h3.power(3).unwrap();
    for s in b2.elements() {
        assert!(close(cube.eval(s).re, h.eval(s).re, 1e-15));
    }
}

#[test]
fn lp_examples() {
    let m = f2();
    let h = GroupFunction::haagerup(m, 1.0).unwrap();
    let r = lp_norm(&h, 2.0, 20).unwrap();
    let q = (-2f64).exp();
    assert_eq!(r.status, LpStatus::Finite);
    assert!(close(r.total.unwrap(), 1.0 + 4.0 * q / (1.0 - 3.0 * q), 1e-12));
    assert!(close(r.total.unwrap(), 1.91136, 1e-5));
    assert_eq!(lp_norm(&h, 1.0, 10).unwrap().status, LpStatus::Divergent);
    for p in [1.0, 2.5, 7.0] {
        let d = lp_norm(&GroupFunction::delta(m), p, 3).unwrap();
        assert_eq!((d.total, d.tail_bound), (Some(1.0), Some(0.0)));
    }
}

#[test]
fn membership_examples() {
    let m = f2();
    for n in [1.0, 4.0] {
        let h = GroupFunction::haagerup(m, n).unwrap();
        assert_eq!(ideal_membership(&h, IdealSpec::C0).unwrap().verdict, Verdict::Member);
    }
    assert_eq!(ideal_membership(&GroupFunction::one(m), IdealSpec::TIdeal).unwrap().verdict, Verdict::NonMember);
    let f = GroupFunction::folner_box(z2(), 3).unwrap();
    assert_eq!(ideal_membership(&f, IdealSpec::CC).unwrap().verdict, Verdict::Member);
    // translation leaves the verdict unchanged
    let g = el(m, "ab^-1");
    let h = GroupFunction::haagerup(m, 2.0).unwrap();
    for d in [IdealSpec::CC, IdealSpec::C0, IdealSpec::Lp(3.0), IdealSpec::TIdeal] {
        let base = ideal_membership(&h, d).unwrap().verdict;
        assert_eq!(ideal_membership(&h.translate_left(&g).unwrap(), d).unwrap().verdict, base, "{d}");
        assert_eq!(ideal_membership(&h.translate_right(&g).unwrap(), d).unwrap().verdict, base, "{d}");
    }
}

#[test]
fn representation_examples() {
    let m = f2();
    let rep = FiniteUnitaryRep::random(m, 4, 3).unwrap();
    let id = rep.evaluate_word(&m.identity()).unwrap();
    for i in 0..4 {
        for j in 0..4 {
            assert_eq!(id[(i, j)], C::new(if i == j { 1.0 } else { 0.0 }, 0.0));
        }
    }
    let z = GroupModel::free_abelian(1).unwrap();
    let theta = 0.7;
    let chi = FiniteUnitaryRep::character(z, &[theta]).unwrap();
    let v = chi.evaluate_word(&z.from_exponents(&[5]).unwrap()).unwrap()[(0, 0)];
    assert!((v - C::from_polar(1.0, 5.0 * theta)).norm() < 1e-12);
    let both = chi.tensor(&FiniteUnitaryRep::character(z, &[0.4]).unwrap()).unwrap();
    let v = both.evaluate_word(&z.from_exponents(&[3]).unwrap()).unwrap()[(0, 0)];
    assert!((v - C::from_polar(1.0, 3.0 * 1.1)).norm() < 1e-12);

    let triv = FiniteUnitaryRep::trivial(m, 1).unwrap();
    let one = matrix_coefficient(&triv, &[C::new(1.0, 0.0)], &[C::new(1.0, 0.0)]).unwrap();
    let b3 = m.ball(3, DEFAULT_BUDGET).unwrap();
    for s in b3.elements() {
        assert_eq!(one.eval(s), C::new(1.0, 0.0));
    }
    let unit: Vec<C> = (0..4).map(|_| C::new(0.5, 0.0)).collect();
    let h = matrix_coefficient(&rep, &unit, &unit).unwrap();
    assert!(close(h.eval(&m.identity()).re, 1.0, 1e-12));
    for s in b3.elements() {
        assert!(h.eval(s).norm() <= 1.0 + 1e-12);
    }
    for seed in [0, 9] {
        let chi = random_pd(m, 1, seed).unwrap();
        for s in b3.elements() {
            assert!(close(chi.eval(s).norm(), 1.0, 1e-12));
        }
    }
    let h42 = random_pd(m, 4, 42).unwrap();
    let r = pd_window_check(&h42, b3.elements(), 1e-8).unwrap();
    assert!(r.passed() && r.min_eigenvalue >= -1e-10);
    let again = random_pd(m, 4, 42).unwrap();
    for s in b3.elements() {
        assert_eq!(h42.eval(s), again.eval(s));
    }
}

#[test]
fn gns_window_examples() {
    let m = f2();
    let w = GnsWindow::new(&GroupFunction::delta(m), 2, 1, 1e-8).unwrap();
    let n = w.ball().len();
    for i in 0..n {
        for j in 0..n {
            assert_eq!(w.gram()[(i, j)], C::new(if i == j { 1.0 } else { 0.0 }, 0.0));
        }
    }
    // δ_e: π_a restricted to the window is the truncated left-translation permutation
    let a = el(m, "a");
    let op = w.operator(&a).unwrap();
    for (s_idx, s) in w.ball().elements().iter().enumerate() {
        let target = w.ball().index_of(&m.compose(&a, s).unwrap());
        for t_idx in 0..n {
            let want = if Some(t_idx) == target { 1.0 } else { 0.0 };
            assert!((op[(t_idx, s_idx)] - C::new(want, 0.0)).norm() < 1e-12);
        }
    }
    let w1 = GnsWindow::new(&GroupFunction::one(m), 2, 1, 1e-8).unwrap();
    assert_eq!(w1.rank(), 1);
    let h = GroupFunction::haagerup(m, 1.0).unwrap();
    let w = GnsWindow::new(&h, 3, 1, 1e-8).unwrap();
    let mut delta = vec![C::new(0.0, 0.0); w.ball().len()];
    delta[0] = C::new(1.0, 0.0);
    assert!(close(w.coefficient(&a, &delta, &delta).unwrap().re, (-1f64).exp(), 1e-15));
    let bad = GroupFunction::word_length(m);
    assert!(matches!(GnsWindow::new(&bad, 1, 1, 1e-8), Err(Error::NotPositive { .. })));
}

#[test]
fn norm_examples() {
    let m = f2();
    let x = GroupRingElement::generator_sum(m);
    let z = GroupModel::free_abelian(1).unwrap();
    let u = GroupRingElement::generator_sum(z);
    assert!(reduced_norm_lower(&u, 100, DEFAULT_BUDGET).unwrap().value >= 1.99);
    for model in [m, z2(), GroupModel::cyclic(4).unwrap(), GroupModel::infinite_dihedral()] {
        let e = GroupRingElement::identity(model);
        assert!(close(reduced_norm_lower(&e, 3, DEFAULT_BUDGET).unwrap().value, 1.0, 1e-12));
        let t = trivial_norm(&e);
        assert_eq!((t.value, t.bound_kind), (1.0, BoundKind::Exact));
    }
    assert_eq!(haagerup_upper_bound(&GroupRingElement::identity(m)).unwrap().value, 1.0);
    assert_eq!(haagerup_upper_bound(&GroupRingElement::parse(m, "a").unwrap()).unwrap().value, 2.0);
    let hb = haagerup_upper_bound(&x).unwrap().value;
    assert!(close(hb, 4.0, 1e-12) && hb >= 2.0 * 3f64.sqrt());
    assert!(matches!(haagerup_upper_bound(&GroupRingElement::generator_sum(z2())), Err(Error::Unsupported(_))));
    let t = trivial_norm(&x);
    assert_eq!((t.value, t.bound_kind), (4.0, BoundKind::Exact));
    let t = trivial_norm(&GroupRingElement::parse(m, "a - e").unwrap());
    assert_eq!((t.value, t.bound_kind), (0.0, BoundKind::LowerBound));

    let delta = gns_norm_lower(&GroupFunction::delta(m), &x, 5).unwrap().value;
    let reduced = reduced_norm_lower(&x, 5, DEFAULT_BUDGET).unwrap().value;
    assert!(close(delta, reduced, 1e-6));
    assert!(close(gns_norm_lower(&GroupFunction::one(m), &x, 3).unwrap().value, 4.0, 1e-9));
    let v = gns_norm_lower(&GroupFunction::haagerup(m, 4.0).unwrap(), &x, 8).unwrap().value;
    assert!(v > 3.4642 && v <= 4.0 + 1e-9, "{v}");
}

#[test]
fn gap_report_examples() {
    let cfg = GapConfig { radius: 6, ..GapConfig::default() };
    let r = norm_gap_report(&GroupRingElement::generator_sum(f2()), IdealSpec::C0, &cfg).unwrap();
    assert_eq!(r.trivial.value, 4.0);
    assert!(r.reduced_upper.unwrap().value <= 3.4642);
    assert!(r.gap);
    let cfg = GapConfig { radius: 50, family: Some(vec![GroupFunction::folner_box(z2(), 3).unwrap()]), ..GapConfig::default() };
    let r = norm_gap_report(&GroupRingElement::generator_sum(z2()), IdealSpec::CC, &cfg).unwrap();
    assert!(r.reduced_lower.value >= 3.95 && !r.gap && r.reduced_within_gap_tol);
}

#[test]
fn multiplier_examples() {
    let m = f2();
    let phi = state_compose(&random_pd(m, 3, 7).unwrap(), &GroupFunction::haagerup(m, 2.0).unwrap()).unwrap();
    assert!(pd_window_check(&phi, m.ball(3, DEFAULT_BUDGET).unwrap().elements(), 1e-8).unwrap().passed());
    let x = GroupRingElement::parse(m, "(2+1i)e - a + 3ab").unwrap();
    assert_eq!(schur_multiply(&GroupFunction::delta(m), &x).unwrap(), GroupRingElement::parse(m, "(2+1i)e").unwrap());

    let z = z2();
    let folner: Vec<_> = (2..=10).map(|n| GroupFunction::folner_box(z, n).unwrap()).collect();
    let c = equality_certificate(IdealSpec::CC, &folner, 1, &default_thresholds(9)).unwrap();
    assert!(c.accepted && c.label == "amenability witness", "{:?}", c.failures);
    let haag: Vec<_> = (1..=10).map(|n| GroupFunction::haagerup(m, n as f64).unwrap()).collect();
    let c = equality_certificate(IdealSpec::C0, &haag, 1, &default_thresholds(10)).unwrap();
    assert!(c.accepted && c.label == "Haagerup witness", "{:?}", c.failures);
    let c = equality_certificate(IdealSpec::CC, &haag, 1, &default_thresholds(10)).unwrap();
    assert!(!c.accepted);
    let c = equality_certificate(IdealSpec::TIdeal, &haag, 1, &default_thresholds(10)).unwrap();
    assert_eq!(c.label, "Property-(T)-ideal witness");
}

fn swap() -> FiniteSystem {
    FiniteSystem::new(GroupModel::free_abelian(1).unwrap(), vec![vec![1, 0]], vec![1.0 / 3.0, 2.0 / 3.0]).unwrap()
}

fn rotation() -> FiniteSystem {
    FiniteSystem::new(GroupModel::cyclic(3).unwrap(), vec![vec![1, 2, 0]], vec![1.0 / 3.0; 3]).unwrap()
}

#[test]
fn cocycle_examples() {
    let rot = rotation();
    for s in rot.model().ball(1, DEFAULT_BUDGET).unwrap().elements() {
        assert_eq!(radon_nikodym(&rot, s).unwrap(), vec![1.0; 3]);
    }
    let sys = swap();
    let a = sys.model().generator(0).unwrap();
    let rho = radon_nikodym(&sys, &a).unwrap();
    assert_eq!(rho, vec![2.0, 0.5]);
    // ∫ f dμ with f = δ_0 equals ρ(1) μ(1)
    assert!(close(1.0 / 3.0, rho[1] * sys.measure()[1], 1e-15));
    assert_eq!(radon_nikodym(&sys, &sys.model().identity()).unwrap(), vec![1.0, 1.0]);

    let u = covariant_rep(&rot).unwrap().u(&rot.model().generator(0).unwrap()).unwrap();
    for i in 0..3 {
        let row: f64 = (0..3).map(|j| u[(i, j)].re).sum();
        assert_eq!(row, 1.0);
    }
    let one = FiniteSystem::new(GroupModel::free(2).unwrap(), vec![vec![0], vec![0]], vec![1.0]).unwrap();
    let r = dn_report(&one).unwrap();
    assert_eq!(r.envelopes.upper, vec![1.0]);
    assert_eq!(r.envelopes.lower, vec![1.0]);
    assert!(r.fixed_vector_exists);
}

#[test]
fn envelope_examples() {
    let e = envelopes(&rotation(), EnvelopeScope::All).unwrap();
    assert_eq!((e.upper, e.lower), (vec![1.0; 3], vec![1.0; 3]));
    let e = envelopes(&swap(), EnvelopeScope::All).unwrap();
    assert_eq!((e.upper.clone(), e.lower.clone()), (vec![2.0, 1.0], vec![1.0, 0.5]));
    assert!(close(e.upper_integral, 2.0 / 3.0 + 2.0 / 3.0, 1e-15));
    let r = dn_report(&rotation()).unwrap();
    assert!(r.fixed_vector_exists && close(r.envelopes.upper_integral, 1.0, 1e-15));
    let r = dn_report(&swap()).unwrap();
    let ratio = r.fixed_vector[0] / r.fixed_vector[1];
    assert!((ratio - C::new(2f64.sqrt(), 0.0)).norm() < 1e-12);
}

#[test]
fn groupoid_examples() {
    let m = f2();
    let sys = FiniteSystem::random(m, 5, 21).unwrap();
    let b2 = m.ball(2, DEFAULT_BUDGET).unwrap();
    assert!(groupoid_pd_check(&GroupoidFunction::one(m, 5), &sys, b2.elements(), 1e-8).unwrap().passed);
    let lift = GroupoidFunction::lift(&GroupFunction::haagerup(m, 2.0).unwrap(), 5);
    assert!(groupoid_pd_check(&lift, &sys, b2.elements(), 1e-8).unwrap().passed);

    let s = el(m, "ab");
    let a = CrossedElement::new(m, 5, [(s.clone(), vec![C::new(1.0, 0.0); 5])]).unwrap();
    let scaled = groupoid_schur_multiply(&lift, &a).unwrap();
    for v in scaled.coefficient(&s).unwrap() {
        assert!(close(v.re, (-1f64).exp(), 1e-15));
    }
    assert_eq!(groupoid_schur_multiply(&GroupoidFunction::one(m, 5), &a).unwrap(), a);

    let n = 4;
    let weights = GroupoidFunction::custom(m, n, "weights", TailCertificate::FiniteSupport { radius: 0 }, move |x, s| {
        if s.is_identity() {
            C::new((x + 1) as f64 / n as f64, 0.0)
        } else {
            C::new(0.0, 0.0)
        }
    });
    let profile = sup_norm_profile(&weights);
    assert_eq!(profile.eval(&m.identity()), C::new(1.0, 0.0));
    assert_eq!(profile.eval(&s), C::new(0.0, 0.0));
    assert_eq!(*profile.tail(), TailCertificate::FiniteSupport { radius: 0 });

    let rot = rotation();
    let z3 = rot.model();
    let fam: Vec<_> = (2..=3).map(|k| GroupoidFunction::lift(&GroupFunction::folner_box(z3, k).unwrap(), 3)).collect();
    assert!(action_certificate(ActionKind::Amenable, &rot, &fam, 1, &[0.9, 0.8]).unwrap().accepted);
}
