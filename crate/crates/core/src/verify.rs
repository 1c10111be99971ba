//! Verification suites and their reports.
//!
//! Each suite compares two independent constructions and records the
//! residual against a fixed threshold. Reports are deterministic: the same
//! configuration and seed produce the same document.

use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cbh::{cbh_map, cbh_map_series};
use crate::coeff::{Coefficient, Q};
use crate::error::{Error, Result};
use crate::holonomy::{
    chen_series, kz_associator_extrapolated, log_holonomy_cbh, log_holonomy_cbh_direct,
    ode_transport, ConnectionPath, KzSchedule, SimplexIntegrator,
};
use crate::lemurakami::{
    admissible_seqs, cbh_map_symbolic, log_phi_symbolic, phi_numeric, phi_symbolic, MzvSymbol,
};
use crate::lie::{
    eulerian_projection, lie_project_p, lyndon_words_up_to, witt_dimension, LieElement,
};
use crate::mzv::{mzv_quadrature, mzv_series, omega, word_to_composition};
use crate::series::{NumericSeries, Series};
use crate::word::Word;

pub const SUITES: [&str; 8] = [
    "corollary",
    "grouplike",
    "lemma-holonomy",
    "lm-vs-ode",
    "mzv-cross",
    "pn-cbh",
    "prop1",
    "witt",
];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyConfig {
    /// Overrides each suite's default degree.
    pub degree: Option<usize>,
    /// Overrides the alphabet sizes of the randomized exact suites.
    pub alphabet: Option<usize>,
    /// Tolerance for MZV evaluations feeding numeric associators.
    pub tol: f64,
    /// First point of the `ε` schedule; the second is `eps / 2`.
    pub eps: f64,
    pub steps: usize,
    pub seed: u64,
    /// Number of random samples in the randomized suites.
    pub trials: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            degree: None,
            alphabet: None,
            tol: 1e-11,
            eps: 1e-3,
            steps: 20_000,
            seed: 7,
            trials: 50,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub status: Status,
    pub residual: f64,
    pub threshold: f64,
    pub detail: String,
}

impl CheckRecord {
    /// Passes iff `residual ≤ threshold`.
    pub fn measured(
        name: impl Into<String>,
        residual: f64,
        threshold: f64,
        detail: String,
    ) -> Self {
        let status = if residual <= threshold {
            Status::Pass
        } else {
            Status::Fail
        };
        CheckRecord {
            name: name.into(),
            status,
            residual,
            threshold,
            detail,
        }
    }

    pub fn error(name: impl Into<String>, err: &Error) -> Self {
        CheckRecord {
            name: name.into(),
            status: Status::Error,
            residual: f64::NAN,
            threshold: f64::NAN,
            detail: err.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Totals {
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub command: String,
    pub config: serde_json::Value,
    pub checks: Vec<CheckRecord>,
    pub totals: Totals,
    pub status: Status,
}

impl VerificationReport {
    pub fn new(
        command: impl Into<String>,
        config: serde_json::Value,
        mut checks: Vec<CheckRecord>,
    ) -> Self {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        let count = |s| checks.iter().filter(|c| c.status == s).count();
        let totals = Totals {
            passed: count(Status::Pass),
            failed: count(Status::Fail),
            errors: count(Status::Error),
        };
        let status = if totals.errors > 0 {
            Status::Error
        } else if totals.failed > 0 {
            Status::Fail
        } else {
            Status::Pass
        };
        VerificationReport {
            command: command.into(),
            config,
            checks,
            totals,
            status,
        }
    }
}

/// Runs one suite by name; `"all"` runs every suite.
pub fn run_suite(name: &str, cfg: &VerifyConfig) -> Result<Vec<CheckRecord>> {
    let run = |f: fn(&VerifyConfig) -> Result<Vec<CheckRecord>>, label: &str| {
        f(cfg).unwrap_or_else(|e| vec![CheckRecord::error(label, &e)])
    };
    Ok(match name {
        "prop1" => run(prop1, "prop1"),
        "pn-cbh" => run(pn_cbh, "pn-cbh"),
        "grouplike" => run(grouplike, "grouplike"),
        "mzv-cross" => run(mzv_cross, "mzv-cross"),
        "lm-vs-ode" => run(lm_vs_ode, "lm-vs-ode"),
        "corollary" => run(corollary, "corollary"),
        "lemma-holonomy" => run(lemma_holonomy, "lemma-holonomy"),
        "witt" => run(witt, "witt"),
        "all" => {
            let mut out = Vec::new();
            for s in SUITES {
                out.extend(run_suite(s, cfg)?);
            }
            out
        }
        other => {
            return Err(Error::Domain(format!(
                "unknown suite {other:?}; expected one of {} or all",
                SUITES.join(", ")
            )))
        }
    })
}

fn random_rational(rng: &mut impl Rng) -> Q {
    let num: i64 = loop {
        let n = rng.gen_range(-10..=10);
        if n != 0 {
            break n;
        }
    };
    Q::new(num.into(), rng.gen_range(1i64..=10).into())
}

/// A Lie element with each Lyndon coordinate present with probability
/// `density` and coefficients `p/q`, `0 < |p| ≤ 10`, `1 ≤ q ≤ 10`.
pub fn random_lie(rng: &mut impl Rng, alphabet: usize, degree: usize, density: f64) -> LieElement {
    let mut out = LieElement::zero(alphabet, degree);
    let basis = lyndon_words_up_to(alphabet, degree);
    for l in &basis {
        if rng.gen_bool(density) {
            out.add_coord(l.clone(), &random_rational(rng));
        }
    }
    if out.is_zero() {
        let l = basis.choose(rng).expect("non-empty basis");
        out.add_coord(l.clone(), &random_rational(rng));
    }
    out
}

fn lie_mismatches(a: &LieElement, b: &LieElement) -> usize {
    a.expand()
        .try_sub(&b.expand())
        .map(|d| d.len())
        .unwrap_or(usize::MAX)
}

/// Alphabet and degree of the `i`-th random sample.
fn sample_shape(cfg: &VerifyConfig, i: usize, max_degree: usize) -> (usize, usize) {
    let alphabet = cfg.alphabet.unwrap_or(2 + i % 2);
    let degree = 2 + i % (max_degree - 1);
    (alphabet, degree)
}

/// `cbh_map(exp ℓ) = ℓ` exactly for random Lie elements `ℓ`.
pub fn prop1(cfg: &VerifyConfig) -> Result<Vec<CheckRecord>> {
    let max_degree = cfg.degree.unwrap_or(6).max(2);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut bad = 0usize;
    let mut first_bad = String::new();
    for i in 0..cfg.trials {
        let (alphabet, degree) = sample_shape(cfg, i, max_degree);
        let l = random_lie(&mut rng, alphabet, degree, 0.3);
        let x = l.expand().exp()?;
        let back = cbh_map(&x);
        let m = lie_mismatches(&back, &l);
        if m > 0 && first_bad.is_empty() {
            first_bad = format!("sample {i} (alphabet {alphabet}, degree {degree})");
        }
        bad += m;
    }
    let detail = if first_bad.is_empty() {
        format!("{} samples, degrees 2..={max_degree}, exact", cfg.trials)
    } else {
        format!("first mismatch at {first_bad}")
    };
    Ok(vec![CheckRecord::measured(
        "prop1/cbh-of-exp",
        bad as f64,
        0.0,
        detail,
    )])
}

/// `p = cbh = eulerian` on every word over two letters up to the degree.
pub fn pn_cbh(cfg: &VerifyConfig) -> Result<Vec<CheckRecord>> {
    let degree = cfg.degree.unwrap_or(5);
    let mut p_bad = 0usize;
    let mut e_bad = 0usize;
    let words = Word::all_up_to(2, degree);
    let words: Vec<Word> = words.into_iter().filter(|w| !w.is_empty()).collect();
    for w in &words {
        let x = Series::monomial(2, degree, w.clone(), Q::from_integer(1.into()));
        let c = cbh_map(&x);
        if lie_project_p(&x) != c {
            p_bad += 1;
        }
        if eulerian_projection(&x) != cbh_map_series(&x) {
            e_bad += 1;
        }
    }
    let n = words.len();
    Ok(vec![
        CheckRecord::measured(
            "pn-cbh/projection",
            p_bad as f64,
            0.0,
            format!("{n} words of length 1..={degree}, mismatching words counted"),
        ),
        CheckRecord::measured(
            "pn-cbh/eulerian",
            e_bad as f64,
            0.0,
            format!("{n} words of length 1..={degree}, mismatching words counted"),
        ),
    ])
}

/// Exponentials of primitives are group-like; one extra word term breaks it.
pub fn grouplike(cfg: &VerifyConfig) -> Result<Vec<CheckRecord>> {
    let max_degree = cfg.degree.unwrap_or(5).max(2);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1));
    let (mut not_primitive, mut not_grouplike, mut undetected) = (0usize, 0usize, 0usize);
    for i in 0..cfg.trials {
        let (alphabet, degree) = sample_shape(cfg, i, max_degree);
        let l = random_lie(&mut rng, alphabet, degree, 0.5).expand();
        if !l.is_primitive() {
            not_primitive += 1;
        }
        let x = l.exp()?;
        if !x.is_grouplike() {
            not_grouplike += 1;
        }
        let len = rng.gen_range(2..=degree);
        let letters = (0..len).map(|_| rng.gen_range(0..alphabet) as u8).collect();
        let mut spoiled = x.clone();
        spoiled.add_term(Word::new(letters), &random_rational(&mut rng));
        if spoiled.is_grouplike() {
            undetected += 1;
        }
    }
    let detail = |what: &str| format!("{} samples, {what}", cfg.trials);
    Ok(vec![
        CheckRecord::measured(
            "grouplike/primitive",
            not_primitive as f64,
            0.0,
            detail("Lie elements failing Δℓ = ℓ⊗1 + 1⊗ℓ"),
        ),
        CheckRecord::measured(
            "grouplike/exp",
            not_grouplike as f64,
            0.0,
            detail("exponentials failing Δ(X) = X⊗X"),
        ),
        CheckRecord::measured(
            "grouplike/spurious-term",
            undetected as f64,
            0.0,
            detail("perturbed exponentials still passing"),
        ),
    ])
}

/// Quadrature against the signed series value for every admissible word.
pub fn mzv_cross(cfg: &VerifyConfig) -> Result<Vec<CheckRecord>> {
    let max_len = cfg.degree.unwrap_or(4);
    let mut out = Vec::new();
    for n in 2..=max_len {
        for a in admissible_seqs(n) {
            let (c, sign) = word_to_composition(&a);
            let name = format!("mzv-cross/{a}");
            let result =
                mzv_quadrature(&a, 1e-9).and_then(|q| mzv_series(&c, 1e-12).map(|s| (q, s)));
            match result {
                Ok((q, s)) => {
                    let diff = (q.value - sign as f64 * s.value).abs();
                    out.push(CheckRecord::measured(
                        name,
                        diff,
                        1e-8,
                        format!(
                            "quadrature {:.12} ± {:.1e}, {}{c} = {:.12} ± {:.1e}",
                            q.value,
                            q.error_bound,
                            if sign < 0 { "-" } else { "+" },
                            sign as f64 * s.value,
                            s.error_bound
                        ),
                    ));
                }
                Err(e) => out.push(CheckRecord::error(name, &e)),
            }
        }
    }
    let basel = mzv_quadrature(&admissible_seqs(2)[0], 1e-11)?;
    out.push(CheckRecord::measured(
        "mzv-cross/basel",
        (basel.value + PI * PI / 6.0).abs(),
        1e-10,
        format!("ω(1,0) = {:.15}", basel.value),
    ));
    Ok(out)
}

/// Numeric `Φ` from the symbolic expansion, with symbols evaluated by quadrature.
pub fn phi_from_symbols(degree: usize, tol: f64) -> Result<NumericSeries> {
    phi_numeric(degree, |s: &MzvSymbol| omega(s, tol))
}

fn max_word_diff(a: &NumericSeries, b: &NumericSeries, max_len: usize) -> (f64, Word) {
    let mut worst = (0.0, Word::empty());
    for w in Word::all_up_to(a.alphabet(), max_len) {
        let d = (a.coeff(&w) - b.coeff(&w)).abs();
        if d > worst.0 {
            worst = (d, w);
        }
    }
    worst
}

/// The ODE associator against the symbolic expansion, coefficient-wise.
pub fn lm_vs_ode(cfg: &VerifyConfig) -> Result<Vec<CheckRecord>> {
    let degree = cfg.degree.unwrap_or(3);
    let schedule = KzSchedule {
        eps: cfg.eps,
        steps: cfg.steps,
        ..KzSchedule::default()
    };
    let lm = phi_from_symbols(degree, cfg.tol)?;
    let ode = kz_associator_extrapolated(degree, &schedule)?;
    let (diff, worst) = max_word_diff(&ode.value, &lm, degree);
    let plain = kz_associator_extrapolated(
        degree,
        &KzSchedule {
            boundary_order: 0,
            ..schedule
        },
    )?;
    let (plain_diff, _) = max_word_diff(&plain.value, &lm, degree);
    let mut out = vec![CheckRecord::measured(
        "lm-vs-ode/coefficients",
        diff,
        1e-4,
        format!(
            "degree {degree}, ε = {} and {}, {} steps, boundary order {}, extrapolation bound {:.1e}, worst word {worst}; plain ε-truncation with the same extrapolation {plain_diff:.2e}",
            schedule.eps,
            schedule.eps * schedule.ratio,
            schedule.steps,
            schedule.boundary_order,
            ode.error_bound
        ),
    )];
    let zeta2 = PI * PI / 6.0;
    if degree >= 2 {
        let a0a1 = ode.value.coeff(&Word::new(vec![0, 1]));
        out.push(CheckRecord::measured(
            "lm-vs-ode/zeta2",
            (a0a1 + zeta2).abs(),
            1e-4,
            format!("A_0A_1 coefficient {a0a1:.10}"),
        ));
        // The inverse orientation G_0^{-1}G_1 flips the sign of the degree-2 term.
        let inverse = ode.value.inverse_unipotent()?;
        let (inv_diff, _) = max_word_diff(&inverse, &lm, degree);
        out.push(CheckRecord::measured(
            "lm-vs-ode/orientation",
            diff,
            1e-4,
            format!("G_1^-1 G_0 residual {diff:.2e}; G_0^-1 G_1 residual {inv_diff:.2e}"),
        ));
    }
    let halved = KzSchedule {
        eps: schedule.eps / 2.0,
        ..schedule
    };
    let ode_half = kz_associator_extrapolated(degree, &halved)?;
    let (stability, _) = max_word_diff(&ode.value, &ode_half.value, degree.min(3));
    out.push(CheckRecord::measured(
        "lm-vs-ode/eps-stability",
        stability,
        1e-5,
        format!(
            "extrapolations from ε = {} and {}",
            schedule.eps, halved.eps
        ),
    ));
    Ok(out)
}

/// `log Φ` assembled from `CBH` images agrees with `cbh(Φ)` symbolically,
/// and with the algebra logarithm of the numeric `Φ`.
pub fn corollary(cfg: &VerifyConfig) -> Result<Vec<CheckRecord>> {
    let symbolic_degree = cfg.degree.unwrap_or(5);
    let mut bad = Vec::new();
    for n in 1..=symbolic_degree {
        if log_phi_symbolic(n) != cbh_map_symbolic(&phi_symbolic(n)) {
            bad.push(n);
        }
    }
    let mut out = vec![CheckRecord::measured(
        "corollary/symbolic",
        bad.len() as f64,
        0.0,
        if bad.is_empty() {
            format!("degrees 1..={symbolic_degree} identical")
        } else {
            format!("degrees {bad:?} differ")
        },
    )];
    let numeric_degree = cfg.degree.unwrap_or(4);
    let phi = phi_from_symbols(numeric_degree, cfg.tol)?;
    let log_numeric = phi.log()?;
    let lie = log_phi_symbolic(numeric_degree).evaluate(|s| omega(s, cfg.tol))?;
    let (diff, worst) = max_word_diff(&log_numeric, &lie.expand(), numeric_degree);
    out.push(CheckRecord::measured(
        "corollary/numeric",
        diff,
        1e-6,
        format!("degree {numeric_degree}, worst word {worst}"),
    ));
    out.push(CheckRecord::measured(
        "corollary/primitive",
        lie.expand().primitive_residual(),
        1e-8,
        format!("degree {numeric_degree} numeric log Φ under the float coproduct"),
    ));
    Ok(out)
}

fn piecewise_path() -> ConnectionPath {
    ConnectionPath::piecewise_constant(vec![0.5], vec![vec![1.0, 0.0], vec![0.0, 1.0]])
        .expect("valid pieces")
}

/// `log exp(x_1/2)·exp(x_0/2)` computed exactly.
pub fn piecewise_oracle(degree: usize) -> LieElement {
    let half = Q::new(1.into(), 2.into());
    let e1 = Series::monomial(2, degree, Word::letter(1), half.clone())
        .exp()
        .expect("nilpotent");
    let e0 = Series::monomial(2, degree, Word::letter(0), half)
        .exp()
        .expect("nilpotent");
    LieElement::from_series(&(&e1 * &e0).log().expect("unipotent"))
        .expect("log of group-like is Lie")
}

/// The CBH integral formula for `log H` on three kinds of paths.
pub fn lemma_holonomy(cfg: &VerifyConfig) -> Result<Vec<CheckRecord>> {
    let degree = cfg.degree.unwrap_or(4);
    let integrator = SimplexIntegrator::default();
    let mut out = Vec::new();

    let piecewise = log_holonomy_cbh(&piecewise_path(), 0.0, 1.0, &integrator, degree)?;
    let exact = piecewise_oracle(degree).map_coeffs(f64::from_q);
    out.push(CheckRecord::measured(
        "lemma-holonomy/piecewise",
        piecewise.value.max_abs_diff(&exact),
        1e-8,
        format!("x_0 on [0,1/2], x_1 on [1/2,1], degree {degree}"),
    ));

    let smooth = ConnectionPath::random_polynomial(2, 3, cfg.seed);
    let via_cbh = log_holonomy_cbh(&smooth, 0.0, 1.0, &integrator, degree)?;
    let transport = ode_transport(&smooth, 0.0, 1.0, cfg.steps.max(1), degree)?;
    let log_ode = LieElement::decompose(&transport.log()?).0;
    out.push(CheckRecord::measured(
        "lemma-holonomy/smooth",
        via_cbh.value.max_abs_diff(&log_ode),
        1e-6,
        format!(
            "random cubic path (seed {}), {} RK4 steps",
            cfg.seed, cfg.steps
        ),
    ));

    let chen = chen_series(&smooth, 0.0, 1.0, &integrator, degree)?;
    out.push(CheckRecord::measured(
        "lemma-holonomy/chen-grouplike",
        chen.value.grouplike_residual(),
        1e-8,
        "Chen series of the random path".into(),
    ));

    let direct_degree = degree.min(3);
    let direct = log_holonomy_cbh_direct(&smooth, 0.0, 1.0, &integrator, direct_degree)?;
    let chen_form = log_holonomy_cbh(&smooth, 0.0, 1.0, &integrator, direct_degree)?;
    let bound = direct.error_bound + chen_form.error_bound;
    out.push(CheckRecord::measured(
        "lemma-holonomy/direct",
        direct.value.max_abs_diff(&chen_form.value),
        bound.max(1e-12),
        format!("simplex quadrature of CBH_n at degree {direct_degree}"),
    ));

    let constant = ConnectionPath::constant(vec![0.6, -0.4]);
    let log_const = log_holonomy_cbh(&constant, 0.0, 1.0, &integrator, degree)?;
    out.push(CheckRecord::measured(
        "lemma-holonomy/constant",
        log_const
            .value
            .expand()
            .max_abs_diff(&constant.value(0.0, degree)),
        1e-10,
        "h = 0.6 x_0 - 0.4 x_1".into(),
    ));
    Ok(out)
}

/// Lyndon basis sizes against the Witt formula, and admissible counts.
pub fn witt(_cfg: &VerifyConfig) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for (alphabet, max) in [(2usize, 8usize), (3, 6)] {
        let basis = lyndon_words_up_to(alphabet, max);
        let mut counts = vec![0u64; max];
        for l in &basis {
            counts[l.len() - 1] += 1;
        }
        let witt: Vec<u64> = (1..=max).map(|d| witt_dimension(alphabet, d)).collect();
        let off = counts.iter().zip(&witt).filter(|(a, b)| a != b).count();
        out.push(CheckRecord::measured(
            format!("witt/alphabet-{alphabet}"),
            off as f64,
            0.0,
            format!("lyndon {counts:?}, witt {witt:?}"),
        ));
    }
    let admissible: Vec<usize> = (2..=8).map(|n| admissible_seqs(n).len()).collect();
    let off = admissible
        .iter()
        .zip(2..=8)
        .filter(|(&c, n)| c != 1 << (n - 2))
        .count();
    out.push(CheckRecord::measured(
        "witt/admissible",
        off as f64,
        0.0,
        format!("counts {admissible:?} for n = 2..=8"),
    ));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_totals_and_order() {
        let checks = vec![
            CheckRecord::measured("b", 1.0, 0.5, String::new()),
            CheckRecord::measured("a", 0.0, 0.5, String::new()),
        ];
        let r = VerificationReport::new("verify", serde_json::Value::Null, checks);
        assert_eq!(r.checks[0].name, "a");
        assert_eq!(r.totals.passed, 1);
        assert_eq!(r.totals.failed, 1);
        assert_eq!(r.status, Status::Fail);
    }

    #[test]
    fn unknown_suite() {
        assert!(run_suite("nope", &VerifyConfig::default()).is_err());
    }

    #[test]
    fn witt_suite_passes() {
        let checks = witt(&VerifyConfig::default()).unwrap();
        assert!(
            checks.iter().all(|c| c.status == Status::Pass),
            "{checks:?}"
        );
    }

    #[test]
    fn random_lie_is_deterministic() {
        let a = random_lie(&mut ChaCha8Rng::seed_from_u64(3), 2, 4, 0.5);
        let b = random_lie(&mut ChaCha8Rng::seed_from_u64(3), 2, 4, 0.5);
        assert_eq!(a, b);
        assert!(!a.is_zero());
    }
}
