use std::f64::consts::PI;

use kzassoc::coeff::qi;
use kzassoc::holonomy::{
    kz_associator, kz_associator_extrapolated, kz_associator_numeric, ode_transport,
    ConnectionPath, KzSchedule,
};
use kzassoc::lemurakami::{log_phi_symbolic, phi_numeric, AdmissibleSeq, MzvSymbol};
use kzassoc::lie::LyndonWord;
use kzassoc::mzv::omega;
use kzassoc::{NumericSeries, Word};

const ZETA3: f64 = 1.202_056_903_159_594_3;

fn w(v: &[u8]) -> Word {
    Word::new(v.to_vec())
}

fn lm(degree: usize) -> NumericSeries {
    phi_numeric(degree, |s| omega(s, 1e-11)).unwrap()
}

fn max_diff(a: &NumericSeries, b: &NumericSeries) -> f64 {
    Word::all_up_to(2, a.degree())
        .iter()
        .map(|u| (a.coeff(u) - b.coeff(u)).abs())
        .fold(0.0, f64::max)
}

#[test]
fn expansion_has_known_low_degree_terms() {
    let phi = lm(3);
    let z2 = PI * PI / 6.0;
    let expected: [(&[u8], f64); 9] = [
        (&[], 1.0),
        (&[0, 1], -z2),
        (&[1, 0], z2),
        (&[0, 0, 1], -ZETA3),
        (&[0, 1, 0], 2.0 * ZETA3),
        (&[1, 0, 0], -ZETA3),
        (&[0, 1, 1], ZETA3),
        (&[1, 0, 1], -2.0 * ZETA3),
        (&[1, 1, 0], ZETA3),
    ];
    for (word, value) in expected {
        assert!((phi.coeff(&w(word)) - value).abs() < 1e-9, "{word:?}");
    }
    for word in [&[0u8][..], &[1], &[0, 0], &[1, 1], &[0, 0, 0], &[1, 1, 1]] {
        assert_eq!(phi.coeff(&w(word)), 0.0);
    }
}

#[test]
fn numeric_expansion_is_grouplike_and_its_log_primitive() {
    let phi = lm(4);
    assert!(phi.grouplike_residual() <= 1e-8);
    let log = log_phi_symbolic(4).evaluate(|s| omega(s, 1e-11)).unwrap();
    assert!(log.expand().primitive_residual() <= 1e-8);
}

#[test]
fn log_in_degree_two() {
    let log = log_phi_symbolic(2);
    let l01 = LyndonWord::new(w(&[0, 1])).unwrap();
    let s = MzvSymbol(AdmissibleSeq::new(vec![1, 0]).unwrap());
    assert_eq!(log.coeff(&l01, &s), qi(1));
    assert_eq!(log.terms().count(), 1);
    assert!(log_phi_symbolic(1).is_zero());
}

#[test]
fn ode_associator_matches_expansion_through_degree_four() {
    let ode = kz_associator_extrapolated(4, &KzSchedule::default()).unwrap();
    assert!(max_diff(&ode.value, &lm(4)) <= 1e-4);
    assert!(ode.error_bound <= 1e-6);
}

#[test]
fn extrapolation_is_stable_under_halving() {
    let a = kz_associator_extrapolated(3, &KzSchedule::default()).unwrap();
    let b = kz_associator_extrapolated(
        3,
        &KzSchedule {
            eps: 5e-4,
            ..KzSchedule::default()
        },
    )
    .unwrap();
    assert!(max_diff(&a.value, &b.value) <= 1e-5);
}

#[test]
fn orientation_is_pinned_by_degree_two() {
    let phi = kz_associator(2, 1e-3, 20_000, 2).unwrap();
    let z2 = PI * PI / 6.0;
    assert!((phi.coeff(&w(&[0, 1])) + z2).abs() < 1e-6);
    let flipped = phi.inverse_unipotent().unwrap();
    assert!((flipped.coeff(&w(&[0, 1])) - z2).abs() < 1e-6);
}

#[test]
fn plain_regularization_is_the_order_zero_case() {
    let a = kz_associator_numeric(3, 1e-2, 2000).unwrap();
    let b = kz_associator(3, 1e-2, 2000, 0).unwrap();
    assert_eq!(a, b);
    // The uncorrected error decays only like ε log ε.
    assert!(max_diff(&a, &lm(3)) > 1e-3);
}

#[test]
fn logistic_variable_gives_the_same_transport() {
    let eps: f64 = 0.05;
    let direct = ode_transport(&ConnectionPath::kz(), eps, 1.0 - eps, 40_000, 4).unwrap();
    let s0 = (eps / (1.0 - eps)).ln();
    let logistic = ode_transport(&ConnectionPath::kz_logistic(), s0, -s0, 4000, 4).unwrap();
    assert!(direct.max_abs_diff(&logistic) < 1e-9);
}

#[test]
fn domain_errors() {
    assert!(kz_associator_numeric(3, 0.0, 100).is_err());
    assert!(kz_associator_numeric(3, 0.5, 100).is_err());
    assert!(kz_associator_extrapolated(
        3,
        &KzSchedule {
            ratio: 1.5,
            ..KzSchedule::default()
        }
    )
    .is_err());
    assert!(ode_transport(&ConnectionPath::kz(), 0.5, 1.0, 100, 2).is_err());
}
