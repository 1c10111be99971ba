//! Acceptance criteria. Each test prints one PASS/FAIL line and then
//! asserts the same condition.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use kzassoc::cbh::{cbh_map, cbh_map_series};
use kzassoc::holonomy::{
    kz_associator_extrapolated, log_holonomy_cbh, ode_transport, ConnectionPath, KzSchedule,
    SimplexIntegrator,
};
use kzassoc::lemurakami::{
    admissible_seqs, cbh_map_symbolic, log_phi_symbolic, phi_numeric, phi_symbolic,
};
use kzassoc::lie::{eulerian_projection, lie_project_p, lyndon_words_up_to, witt_dimension};
use kzassoc::mzv::{mzv_quadrature, mzv_series, omega, word_to_composition};
use kzassoc::verify::{piecewise_oracle, random_lie};
use kzassoc::{Coefficient, LieElement, NumericSeries, Series, Word, Q};

fn report(id: u32, title: &str, ok: bool, detail: String, elapsed: Duration, limit_secs: u64) {
    let in_time = elapsed.as_secs_f64() < limit_secs as f64;
    let verdict = if ok && in_time { "PASS" } else { "FAIL" };
    println!(
        "{verdict} criterion {id} ({title}): {detail}; {:.2}s of {limit_secs}s",
        elapsed.as_secs_f64()
    );
    assert!(ok, "criterion {id} failed: {detail}");
    assert!(in_time, "criterion {id} exceeded {limit_secs}s");
}

fn max_diff(a: &NumericSeries, b: &NumericSeries) -> (f64, Word) {
    let mut worst = (0.0, Word::empty());
    for w in Word::all_up_to(2, a.degree()) {
        let d = (a.coeff(&w) - b.coeff(&w)).abs();
        if d > worst.0 {
            worst = (d, w);
        }
    }
    worst
}

#[test]
fn criterion_1_cbh_inverts_exp() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut failures = Vec::new();
    for i in 0..50 {
        let alphabet = 2 + i % 2;
        let degree = 2 + i % 5;
        let l = random_lie(&mut rng, alphabet, degree, 0.3);
        let x = l.expand().exp().unwrap();
        if cbh_map(&x) != l {
            failures.push(i);
        }
    }
    report(
        1,
        "cbh(exp l) = l, exact",
        failures.is_empty(),
        format!("50 random elements over 2 and 3 letters, degree <= 6, failures {failures:?}"),
        start.elapsed(),
        60,
    );
}

#[test]
fn criterion_2_projection_equals_cbh() {
    let start = Instant::now();
    let words: Vec<Word> = Word::all_up_to(2, 5)
        .into_iter()
        .filter(|w| !w.is_empty())
        .collect();
    let mut bad = Vec::new();
    for w in &words {
        let x = Series::monomial(2, 5, w.clone(), Q::from_integer(1.into()));
        let c = cbh_map(&x);
        if lie_project_p(&x) != c
            || eulerian_projection(&x) != cbh_map_series(&x)
            || c.expand() != cbh_map_series(&x)
        {
            bad.push(w.to_string());
        }
    }
    report(
        2,
        "p = cbh = eulerian, exact",
        words.len() == 62 && bad.is_empty(),
        format!("{} words of length <= 5, mismatches {bad:?}", words.len()),
        start.elapsed(),
        30,
    );
}

#[test]
fn criterion_3_grouplike_characterization() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut exp_fail, mut spoil_pass, mut spoiled) = (0, 0, 0);
    for i in 0..20 {
        let alphabet = 2 + i % 2;
        let degree = 2 + i % 3;
        let l = random_lie(&mut rng, alphabet, degree, 0.5).expand();
        assert!(l.is_primitive());
        let x = l.exp().unwrap();
        if !x.is_grouplike() {
            exp_fail += 1;
        }
        for len in 2..=degree {
            for w in Word::all_of_length(alphabet, len) {
                let mut y = x.clone();
                y.add_term(w, &Q::new(1.into(), 7.into()));
                spoiled += 1;
                if y.is_grouplike() {
                    spoil_pass += 1;
                }
            }
        }
    }
    report(
        3,
        "group-like characterization",
        exp_fail == 0 && spoil_pass == 0,
        format!("20 exponentials, {exp_fail} not group-like; {spoiled} single-term perturbations, {spoil_pass} undetected"),
        start.elapsed(),
        10,
    );
}

#[test]
fn criterion_4_mzv_cross_validation() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut bounds_ok = true;
    let mut count = 0;
    for n in 2..=4 {
        for a in admissible_seqs(n) {
            let (c, sign) = word_to_composition(&a);
            let q = mzv_quadrature(&a, 1e-9).unwrap();
            let s = mzv_series(&c, 1e-12).unwrap();
            bounds_ok &= q.error_bound <= 1e-8 && s.error_bound <= 1e-8;
            worst = worst.max((q.value - sign as f64 * s.value).abs());
            count += 1;
        }
    }
    let basel = mzv_quadrature(&admissible_seqs(2)[0], 1e-11).unwrap().value;
    let basel_err = (basel + PI * PI / 6.0).abs();
    report(
        4,
        "MZV quadrature vs series",
        count == 7 && bounds_ok && worst <= 1e-8 && basel_err <= 1e-10,
        format!("{count} words, max |quadrature - sign*series| = {worst:.1e} (<= 1e-8), |ω(1,0) + π²/6| = {basel_err:.1e} (<= 1e-10)"),
        start.elapsed(),
        30,
    );
}

#[test]
fn criterion_5_associator_expansion_vs_ode() {
    let start = Instant::now();
    let schedule = KzSchedule::default();
    assert_eq!(
        (schedule.eps, schedule.ratio, schedule.steps),
        (1e-3, 0.5, 20_000)
    );
    let ode = kz_associator_extrapolated(3, &schedule).unwrap();
    let lm = phi_numeric(3, |s| omega(s, 1e-11)).unwrap();
    let (diff, worst) = max_diff(&ode.value, &lm);
    let a0a1 = ode.value.coeff(&Word::new(vec![0, 1]));
    let zeta_err = (a0a1 + PI * PI / 6.0).abs();
    let plain = kz_associator_extrapolated(
        3,
        &KzSchedule {
            boundary_order: 0,
            ..schedule
        },
    )
    .unwrap();
    let (plain_diff, _) = max_diff(&plain.value, &lm);
    report(
        5,
        "expansion vs ODE associator",
        diff <= 1e-4 && zeta_err <= 1e-4,
        format!(
            "N = 3, ε = 1e-3 and 5e-4, 20000 steps: max coefficient residual {diff:.1e} at {worst} (<= 1e-4), \
             A_0A_1 = {a0a1:.9} (|+ζ(2)| = {zeta_err:.1e}); plain ε-truncation gives {plain_diff:.1e}"
        ),
        start.elapsed(),
        120,
    );
}

#[test]
fn criterion_6_log_of_associator() {
    let start = Instant::now();
    let symbolic_ok: Vec<bool> = (1..=5)
        .map(|n| log_phi_symbolic(n) == cbh_map_symbolic(&phi_symbolic(n)))
        .collect();
    let phi = phi_numeric(4, |s| omega(s, 1e-11)).unwrap();
    let log_numeric = phi.log().unwrap();
    let log_symbolic = log_phi_symbolic(4).evaluate(|s| omega(s, 1e-11)).unwrap();
    let (diff, worst) = max_diff(&log_numeric, &log_symbolic.expand());
    report(
        6,
        "log Φ = cbh(Φ)",
        symbolic_ok.iter().all(|&b| b) && diff <= 1e-6,
        format!("symbolic N = 1..5 {symbolic_ok:?}; numeric N = 4 residual {diff:.1e} at {worst} (<= 1e-6)"),
        start.elapsed(),
        60,
    );
}

#[test]
fn criterion_7_holonomy_logarithm() {
    let start = Instant::now();
    let integrator = SimplexIntegrator::default();

    let piecewise =
        ConnectionPath::piecewise_constant(vec![0.5], vec![vec![1.0, 0.0], vec![0.0, 1.0]])
            .unwrap();
    let got = log_holonomy_cbh(&piecewise, 0.0, 1.0, &integrator, 4).unwrap();
    let exact = piecewise_oracle(4).map_coeffs(f64::from_q);
    let piecewise_err = got.value.max_abs_diff(&exact);

    let smooth = ConnectionPath::random_polynomial(2, 3, 99);
    let got = log_holonomy_cbh(&smooth, 0.0, 1.0, &integrator, 4).unwrap();
    let transport = ode_transport(&smooth, 0.0, 1.0, 2000, 4).unwrap();
    let log_ode = LieElement::decompose(&transport.log().unwrap()).0;
    let smooth_err = got.value.max_abs_diff(&log_ode);

    let constant = ConnectionPath::constant(vec![0.25, -1.5]);
    let got = log_holonomy_cbh(&constant, 0.0, 1.0, &integrator, 4).unwrap();
    let constant_err = got.value.expand().max_abs_diff(&constant.value(0.0, 4));

    report(
        7,
        "CBH integral for log of holonomy",
        piecewise_err <= 1e-8 && smooth_err <= 1e-6 && constant_err <= 1e-10,
        format!(
            "N = 4: piecewise {piecewise_err:.1e} (<= 1e-8), random cubic vs log ODE {smooth_err:.1e} (<= 1e-6), \
             constant {constant_err:.1e} (<= 1e-10)"
        ),
        start.elapsed(),
        120,
    );
}

#[test]
fn criterion_8_structural_counts() {
    let start = Instant::now();
    let count = |alphabet: usize, max: usize| {
        let mut c = vec![0u64; max];
        for l in lyndon_words_up_to(alphabet, max) {
            c[l.len() - 1] += 1;
        }
        c
    };
    let two = count(2, 8);
    let three = count(3, 6);
    let witt_two: Vec<u64> = (1..=8).map(|d| witt_dimension(2, d)).collect();
    let witt_three: Vec<u64> = (1..=6).map(|d| witt_dimension(3, d)).collect();
    let admissible: Vec<usize> = (2..=8).map(|n| admissible_seqs(n).len()).collect();
    let ok = two == [2, 1, 2, 3, 6, 9, 18, 30]
        && witt_two == two
        && three == [3, 3, 8, 18, 48, 116]
        && witt_three == three
        && admissible
            .iter()
            .zip(2..=8)
            .all(|(&c, n)| c == 1 << (n - 2));
    report(
        8,
        "Lyndon, Witt and admissible counts",
        ok,
        format!("two letters {two:?}, three letters {three:?}, admissible {admissible:?}"),
        start.elapsed(),
        5,
    );
}
