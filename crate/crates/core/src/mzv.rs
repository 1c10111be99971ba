//! Numeric values of the iterated integrals
//! `ω_a = ∫_{0≤t_1≤…≤t_n≤1} ω_{a_1}(t_1) ⋯ ω_{a_n}(t_n)` with
//! `ω_0 = dt/t`, `ω_1 = dt/(t-1)`, by two independent routes:
//!
//! * direct panel quadrature of the iterated integral, and
//! * nested multiple-zeta sums, accelerated by splitting the path at `1/2`.
//!
//! The dictionary `ω_a = sign · ζ(s)` between the two is calibrated against
//! the quadrature and pinned by tests.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lemurakami::{AdmissibleSeq, MzvSymbol};
use crate::quadrature::PanelGrid;

/// Exponents `(s_1, …, s_k)` of `ζ(s) = Σ_{n_1>…>n_k≥1} Π n_j^{-s_j}`, `s_1 ≥ 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Composition(Vec<u32>);

impl Composition {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        match parts.first() {
            None => Err(Error::Domain("empty composition".into())),
            Some(&s) if s < 2 => Err(Error::Domain(format!(
                "ζ{parts:?} diverges: the first exponent must be at least 2"
            ))),
            _ if parts.contains(&0) => Err(Error::Domain(format!(
                "composition {parts:?} has a zero part"
            ))),
            _ => Ok(Composition(parts)),
        }
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn weight(&self) -> usize {
        self.0.iter().map(|&s| s as usize).sum()
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "ζ({})", parts.join(","))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Series,
    Quadrature,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub value: f64,
    pub error_bound: f64,
    pub method: Method,
}

/// Reads `a` as blocks `1 0^{m}`; the blocks, taken right to left, give
/// the exponents `m + 1`. The sign is `(-1)^{#1s}`, one per `ω_1 = -dt/(1-t)`.
pub fn word_to_composition(a: &AdmissibleSeq) -> (Composition, i8) {
    let mut blocks: Vec<u32> = Vec::new();
    for &b in a.bits() {
        if b == 1 {
            blocks.push(1);
        } else {
            *blocks.last_mut().expect("admissible words start with 1") += 1;
        }
    }
    let ones = blocks.len();
    blocks.reverse();
    let sign = if ones.is_multiple_of(2) { 1 } else { -1 };
    (
        Composition::new(blocks).expect("admissible words end with 0"),
        sign,
    )
}

/// Letters of the positive iterated-integral word: `Y = dt/(1-t)`, `X = dt/t`.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Form {
    X,
    Y,
}

/// `∫_0^{1/2}` of a word of forms (innermost first) as `Σ_n c_n 2^{-n}`.
///
/// The coefficients are nested harmonic-type sums with `0 ≤ c_n ≤ 1`,
/// so truncating after `terms` coefficients leaves a tail below `2^{-terms}`.
fn half_integral(word: &[Form], terms: usize) -> f64 {
    if word.is_empty() {
        return 1.0;
    }
    let mut c = vec![0.0f64; terms + 1];
    c[0] = 1.0;
    for &form in word {
        let mut next = vec![0.0f64; terms + 1];
        match form {
            Form::Y => {
                let mut prefix = 0.0;
                for n in 1..=terms {
                    prefix += c[n - 1];
                    next[n] = prefix / n as f64;
                }
            }
            Form::X => {
                debug_assert_eq!(c[0], 0.0, "dt/t cannot be the innermost form");
                for n in 1..=terms {
                    next[n] = c[n] / n as f64;
                }
            }
        }
        c = next;
    }
    let mut scale = 1.0;
    let mut sum = 0.0;
    for &cn in &c[1..] {
        scale *= 0.5;
        sum += cn * scale;
    }
    sum
}

const SERIES_TERM_CAP: usize = 10_000_000;

/// `ζ(s)` with a rigorous truncation bound.
///
/// The iterated integral `∫_0^1 Y X^{s_k-1} ⋯ Y X^{s_1-1}` is split at `1/2`;
/// both halves become multiple polylogarithm sums at `1/2` (the upper half
/// after `t ↦ 1-t`), which converge geometrically.
pub fn mzv_series(c: &Composition, tol: f64) -> Result<EvalResult> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let mut word = Vec::with_capacity(c.weight());
    for &s in c.parts().iter().rev() {
        word.push(Form::Y);
        word.extend(std::iter::repeat_n(Form::X, s as usize - 1));
    }
    let w = word.len();
    // Each factor is at most ζ-sized (< 2 for these words) and each split
    // product carries two truncation errors.
    let needed = ((4.0 * (w + 1) as f64 / tol).log2().ceil().max(0.0) as usize) + 8;
    if needed > SERIES_TERM_CAP {
        return Err(Error::Resource {
            value: f64::NAN,
            bound: f64::INFINITY,
            tol,
        });
    }
    let terms = needed.max(60);
    let tail = 0.5f64.powi(terms as i32);
    let mut value = 0.0;
    let mut bound = 0.0;
    for j in 0..=w {
        let head = half_integral(&word[..j], terms);
        let reflected: Vec<Form> = word[j..]
            .iter()
            .rev()
            .map(|f| match f {
                Form::X => Form::Y,
                Form::Y => Form::X,
            })
            .collect();
        let tail_part = half_integral(&reflected, terms);
        value += head * tail_part;
        let eh = if j == 0 { 0.0 } else { tail };
        let et = if j == w { 0.0 } else { tail };
        bound += eh * (tail_part + et) + head * et;
    }
    // Prefix sums of length n lose at most n ulps per level.
    bound += 2.0 * f64::EPSILON * (w as f64 + 1.0) * value.abs() * terms as f64;
    if bound > tol {
        return Err(Error::Resource { value, bound, tol });
    }
    Ok(EvalResult {
        value,
        error_bound: bound,
        method: Method::Series,
    })
}

fn iterated_integral(a: &AdmissibleSeq, grid: &PanelGrid) -> f64 {
    let mut current = vec![1.0; grid.len()];
    let n = a.len();
    for (k, &b) in a.bits().iter().enumerate() {
        let integrand: Vec<f64> = current
            .iter()
            .zip(&grid.points)
            .map(|(v, &(t, c))| if b == 0 { v / t } else { -v / c })
            .collect();
        if k + 1 == n {
            return grid.integral(&integrand);
        }
        current = grid.antiderivative(&integrand);
    }
    unreachable!("admissible words are non-empty")
}

/// `ω_a` by panel quadrature on grids refined geometrically toward 0 and 1.
///
/// The reported bound is the difference between two grids of different
/// order and grading, plus the neglected contribution of the panel that
/// touches `t = 1`.
pub fn mzv_quadrature(a: &AdmissibleSeq, tol: f64) -> Result<EvalResult> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let n = a.len();
    let attempts = [(16, 0.25, 28, 22, 0.18, 24), (24, 0.2, 26, 32, 0.15, 22)];
    let mut best = None;
    for &(p1, r1, l1, p2, r2, l2) in &attempts {
        let coarse = iterated_integral(a, &PanelGrid::graded_unit(p1, r1, l1));
        let fine = iterated_integral(a, &PanelGrid::graded_unit(p2, r2, l2));
        let delta = 0.5 * f64::max(r1.powi(l1 as i32), r2.powi(l2 as i32));
        let log_term = 1.0 + delta.ln().abs();
        let factorial: f64 = (1..n).map(|k| k as f64).product();
        let endpoint = 10.0 * delta * log_term.powi(n as i32 - 1) / factorial;
        let bound = (fine - coarse).abs() + endpoint + 8.0 * f64::EPSILON * fine.abs() * n as f64;
        if bound <= tol {
            return Ok(EvalResult {
                value: fine,
                error_bound: bound,
                method: Method::Quadrature,
            });
        }
        best = Some((fine, bound));
    }
    let (value, bound) = best.expect("at least one attempt");
    Err(Error::Resource { value, bound, tol })
}

/// Evaluator for formal symbols, using the quadrature as ground truth.
pub fn omega(symbol: &MzvSymbol, tol: f64) -> Result<f64> {
    mzv_quadrature(symbol.seq(), tol).map(|r| r.value)
}

/// Evaluator using the series route through the calibrated dictionary.
pub fn omega_series(symbol: &MzvSymbol, tol: f64) -> Result<f64> {
    let (c, sign) = word_to_composition(symbol.seq());
    mzv_series(&c, tol).map(|r| sign as f64 * r.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const ZETA3: f64 = 1.202_056_903_159_594_3;

    fn seq(v: &[u8]) -> AdmissibleSeq {
        AdmissibleSeq::new(v.to_vec()).unwrap()
    }

    #[test]
    fn dictionary_examples() {
        assert_eq!(
            word_to_composition(&seq(&[1, 0])),
            (Composition(vec![2]), -1)
        );
        assert_eq!(
            word_to_composition(&seq(&[1, 0, 0])),
            (Composition(vec![3]), -1)
        );
        assert_eq!(
            word_to_composition(&seq(&[1, 1, 0])),
            (Composition(vec![2, 1]), 1)
        );
        assert_eq!(
            word_to_composition(&seq(&[1, 1, 0, 0])),
            (Composition(vec![3, 1]), 1)
        );
        assert_eq!(
            word_to_composition(&seq(&[1, 0, 1, 0])).0,
            Composition(vec![2, 2])
        );
    }

    #[test]
    fn composition_validation() {
        assert!(Composition::new(vec![1, 2]).is_err());
        assert!(Composition::new(vec![]).is_err());
        assert!(Composition::new(vec![2, 0]).is_err());
        assert_eq!(Composition::new(vec![2, 1]).unwrap().weight(), 3);
    }

    #[test]
    fn series_values() {
        let z2 = mzv_series(&Composition(vec![2]), 1e-12).unwrap();
        assert!((z2.value - PI * PI / 6.0).abs() < 1e-12);
        assert!(z2.error_bound <= 1e-12);
        let z3 = mzv_series(&Composition(vec![3]), 1e-12).unwrap();
        assert!((z3.value - ZETA3).abs() < 1e-12);
        let z21 = mzv_series(&Composition(vec![2, 1]), 1e-12).unwrap();
        assert!((z21.value - ZETA3).abs() < 1e-12);
        // ζ(4) = π⁴/90 and ζ(3,1) = π⁴/360
        let z4 = mzv_series(&Composition(vec![4]), 1e-12).unwrap();
        assert!((z4.value - PI.powi(4) / 90.0).abs() < 1e-12);
        let z31 = mzv_series(&Composition(vec![3, 1]), 1e-12).unwrap();
        assert!((z31.value - PI.powi(4) / 360.0).abs() < 1e-12);
    }

    #[test]
    fn quadrature_values() {
        let cases = [
            (&[1u8, 0][..], -PI * PI / 6.0),
            (&[1, 0, 0], -ZETA3),
            (&[1, 1, 0], ZETA3),
        ];
        for (bits, expected) in cases {
            let r = mzv_quadrature(&seq(bits), 1e-10).unwrap();
            assert!((r.value - expected).abs() < 1e-10, "{bits:?}: {}", r.value);
            assert!(r.error_bound <= 1e-10);
            assert_eq!(r.method, Method::Quadrature);
        }
    }

    #[test]
    fn bad_tolerance() {
        assert!(mzv_series(&Composition(vec![2]), 0.0).is_err());
        assert!(mzv_quadrature(&seq(&[1, 0]), -1.0).is_err());
        assert!(matches!(
            mzv_series(&Composition(vec![2]), 1e-300),
            Err(Error::Resource { .. })
        ));
    }
}
