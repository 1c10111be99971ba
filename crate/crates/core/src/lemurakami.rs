//! The Le–Murakami expansion of the KZ associator in formal MZV symbols
//! `ω_a`, indexed by admissible binary sequences, and its logarithm
//! obtained by applying `cbh` symbol by symbol.
//!
//! Words are over `{A_0, A_1}` with letter `0 ↦ A_0` and `1 ↦ A_1`, and are
//! stored as written, left to right.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_traits::{One, Zero};

use crate::cbh::cbh_map;
use crate::coeff::{qi, Q};
use crate::error::{Error, Result};
use crate::lie::{LieElement, LyndonWord};
use crate::series::{NumericSeries, Series};
use crate::word::Word;

/// A sequence `(a_1, …, a_n) ∈ {0,1}^n` with `a_1 = 1` and `a_n = 0`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AdmissibleSeq(Vec<u8>);

impl AdmissibleSeq {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::Domain(format!("{bits:?} is not a binary sequence")));
        }
        match (bits.first(), bits.last()) {
            (Some(1), Some(0)) => Ok(AdmissibleSeq(bits)),
            (Some(1), _) => Err(Error::Domain(format!(
                "{} is not admissible (a_n must be 0)",
                join_bits(&bits)
            ))),
            _ => Err(Error::Domain(format!(
                "{} is not admissible (a_1 must be 1)",
                join_bits(&bits)
            ))),
        }
    }

    /// Parses a comma-separated bit string such as `"1,0,0"`.
    pub fn parse(s: &str) -> Result<Self> {
        let bits = s
            .split(',')
            .map(|t| match t.trim() {
                "0" => Ok(0),
                "1" => Ok(1),
                other => Err(Error::Domain(format!("invalid bit {other:?} in {s:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::new(bits)
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

fn join_bits(bits: &[u8]) -> String {
    bits.iter().map(u8::to_string).collect::<Vec<_>>().join(",")
}

impl fmt::Display for AdmissibleSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&join_bits(&self.0))
    }
}

impl fmt::Debug for AdmissibleSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

impl Ord for AdmissibleSeq {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for AdmissibleSeq {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// The formal symbol `ω_{a_1,…,a_n}`. Distinct sequences are independent symbols.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MzvSymbol(pub AdmissibleSeq);

impl MzvSymbol {
    pub fn seq(&self) -> &AdmissibleSeq {
        &self.0
    }
}

impl fmt::Display for MzvSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ω({})", self.0)
    }
}

impl fmt::Debug for MzvSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// All admissible sequences of length `n`, lexicographically.
pub fn admissible_seqs(n: usize) -> Vec<AdmissibleSeq> {
    if n < 2 {
        return Vec::new();
    }
    (0..1u64 << (n - 2))
        .map(|m| {
            let mut bits = vec![1u8];
            bits.extend((0..n - 2).rev().map(|i| (m >> i & 1) as u8));
            bits.push(0);
            AdmissibleSeq(bits)
        })
        .collect()
}

/// The integers `C^a_{i_1…i_n}`, keyed by the word `A_{i_n} ⋯ A_{i_1}`.
///
/// Expands `Σ_{S,T} (-1)^{|S|+|T|} A_1^{|T|} A(a)^{S,T} A_0^{|S|}` with
/// `S ⊆ {α : a_α = 0}`, `T ⊆ {β : a_β = 1}`, and `A(a)^{S,T}` the product of
/// `A_{a_α}` over `α ∉ S ∪ T` taken with `α` decreasing.
pub fn c_coefficients(a: &AdmissibleSeq) -> BTreeMap<Word, i64> {
    let bits = a.bits();
    let n = bits.len();
    let zeros: Vec<usize> = (0..n).filter(|&i| bits[i] == 0).collect();
    let ones: Vec<usize> = (0..n).filter(|&i| bits[i] == 1).collect();
    let mut out: BTreeMap<Word, i64> = BTreeMap::new();
    for s_mask in 0..1u64 << zeros.len() {
        for t_mask in 0..1u64 << ones.len() {
            let mut removed = vec![false; n];
            let mut card_s = 0;
            let mut card_t = 0;
            for (k, &i) in zeros.iter().enumerate() {
                if s_mask >> k & 1 == 1 {
                    removed[i] = true;
                    card_s += 1;
                }
            }
            for (k, &i) in ones.iter().enumerate() {
                if t_mask >> k & 1 == 1 {
                    removed[i] = true;
                    card_t += 1;
                }
            }
            let mut letters = vec![1u8; card_t];
            letters.extend((0..n).rev().filter(|&i| !removed[i]).map(|i| bits[i]));
            letters.extend(std::iter::repeat_n(0u8, card_s));
            let sign = if (card_s + card_t) % 2 == 0 { 1 } else { -1 };
            *out.entry(Word::new(letters)).or_insert(0) += sign;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

/// A truncated series over `{A_0, A_1}` whose coefficients are rational
/// combinations of MZV symbols; `constant` is the coefficient of the empty word.
#[derive(Clone, PartialEq, Debug)]
pub struct SymbolicSeries {
    degree: usize,
    constant: Q,
    terms: BTreeMap<Word, BTreeMap<MzvSymbol, Q>>,
}

impl SymbolicSeries {
    pub fn new(degree: usize, constant: Q) -> Self {
        SymbolicSeries {
            degree,
            constant,
            terms: BTreeMap::new(),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn constant(&self) -> &Q {
        &self.constant
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &BTreeMap<MzvSymbol, Q>)> {
        self.terms.iter()
    }

    pub fn coeff(&self, w: &Word, s: &MzvSymbol) -> Q {
        self.terms
            .get(w)
            .and_then(|m| m.get(s))
            .cloned()
            .unwrap_or_else(Q::zero)
    }

    /// Adds `c·s·w`. The symbol weight must equal the word length.
    pub fn add_term(&mut self, w: Word, s: MzvSymbol, c: &Q) -> Result<()> {
        if s.0.len() != w.len() {
            return Err(Error::Domain(format!(
                "symbol {s} of weight {} cannot multiply a word of length {}",
                s.0.len(),
                w.len()
            )));
        }
        if w.len() > self.degree || c.is_zero() || w.min_alphabet() > 2 {
            return Ok(());
        }
        let inner = self.terms.entry(w.clone()).or_default();
        let e = inner.entry(s.clone()).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            inner.remove(&s);
            if inner.is_empty() {
                self.terms.remove(&w);
            }
        }
        Ok(())
    }

    pub fn symbols(&self) -> BTreeSet<MzvSymbol> {
        self.terms
            .values()
            .flat_map(|m| m.keys().cloned())
            .collect()
    }

    /// The rational series multiplying one symbol.
    pub fn component(&self, s: &MzvSymbol) -> Series {
        let mut out = Series::zero(2, self.degree);
        for (w, m) in &self.terms {
            if let Some(c) = m.get(s) {
                out.add_term(w.clone(), c);
            }
        }
        out
    }

    /// Substitutes numeric values for the symbols.
    pub fn evaluate(
        &self,
        mut eval: impl FnMut(&MzvSymbol) -> Result<f64>,
    ) -> Result<NumericSeries> {
        let values = evaluate_symbols(self.symbols(), &mut eval)?;
        let mut out = NumericSeries::scalar(2, self.degree, f64_of(&self.constant));
        for (w, m) in &self.terms {
            let v: f64 = m.iter().map(|(s, c)| f64_of(c) * values[s]).sum();
            out.add_term(w.clone(), &v);
        }
        Ok(out)
    }
}

fn f64_of(q: &Q) -> f64 {
    <f64 as crate::coeff::Coefficient>::from_q(q)
}

fn evaluate_symbols(
    symbols: BTreeSet<MzvSymbol>,
    eval: &mut impl FnMut(&MzvSymbol) -> Result<f64>,
) -> Result<HashMap<MzvSymbol, f64>> {
    symbols
        .into_iter()
        .map(|s| {
            eval(&s)
                .map(|v| (s.clone(), v))
                .map_err(|e| Error::Evaluation {
                    symbol: s.0.to_string(),
                    source: Box::new(e),
                })
        })
        .collect()
}

/// A truncated Lie series over `{A_0, A_1}` in Lyndon coordinates with
/// coefficients in formal MZV symbols.
#[derive(Clone, PartialEq, Debug)]
pub struct SymbolicLieSeries {
    degree: usize,
    terms: BTreeMap<LyndonWord, BTreeMap<MzvSymbol, Q>>,
}

impl SymbolicLieSeries {
    pub fn zero(degree: usize) -> Self {
        SymbolicLieSeries {
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&LyndonWord, &BTreeMap<MzvSymbol, Q>)> {
        self.terms.iter()
    }

    pub fn coeff(&self, l: &LyndonWord, s: &MzvSymbol) -> Q {
        self.terms
            .get(l)
            .and_then(|m| m.get(s))
            .cloned()
            .unwrap_or_else(Q::zero)
    }

    pub fn add_term(&mut self, l: LyndonWord, s: &MzvSymbol, c: &Q) {
        if c.is_zero() || l.len() > self.degree {
            return;
        }
        let inner = self.terms.entry(l.clone()).or_default();
        let e = inner.entry(s.clone()).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            inner.remove(s);
            if inner.is_empty() {
                self.terms.remove(&l);
            }
        }
    }

    fn add_lie(&mut self, s: &MzvSymbol, lie: &LieElement, scale: &Q) {
        for (l, c) in lie.coords() {
            self.add_term(l.clone(), s, &(c * scale));
        }
    }

    pub fn symbols(&self) -> BTreeSet<MzvSymbol> {
        self.terms
            .values()
            .flat_map(|m| m.keys().cloned())
            .collect()
    }

    pub fn component(&self, s: &MzvSymbol) -> LieElement {
        LieElement::from_coords(
            2,
            self.degree,
            self.terms
                .iter()
                .filter_map(|(l, m)| m.get(s).map(|c| (l.clone(), c.clone()))),
        )
        .expect("stored Lyndon words fit the alphabet")
    }

    pub fn evaluate(
        &self,
        mut eval: impl FnMut(&MzvSymbol) -> Result<f64>,
    ) -> Result<LieElement<f64>> {
        let values = evaluate_symbols(self.symbols(), &mut eval)?;
        let mut out = LieElement::zero(2, self.degree);
        for (l, m) in &self.terms {
            let v: f64 = m.iter().map(|(s, c)| f64_of(c) * values[s]).sum();
            out.add_coord(l.clone(), &v);
        }
        Ok(out)
    }
}

/// `Φ = 1 + Σ_{2≤n≤N} Σ_{a admissible} ω_a Σ_i C^a_i A_{i_n} ⋯ A_{i_1}`.
pub fn phi_symbolic(degree: usize) -> SymbolicSeries {
    let mut out = SymbolicSeries::new(degree, Q::one());
    for n in 2..=degree {
        for a in admissible_seqs(n) {
            let sym = MzvSymbol(a.clone());
            for (w, c) in c_coefficients(&a) {
                out.add_term(w, sym.clone(), &qi(c))
                    .expect("coefficient words have the symbol's weight");
            }
        }
    }
    out
}

/// `cbh` applied to each symbol's rational component; the constant maps to zero.
pub fn cbh_map_symbolic(x: &SymbolicSeries) -> SymbolicLieSeries {
    let mut out = SymbolicLieSeries::zero(x.degree);
    for s in x.symbols() {
        out.add_lie(&s, &cbh_map(&x.component(&s)), &Q::one());
    }
    out
}

/// `log Φ = Σ_n Σ_a Σ_i ω_a C^a_i CBH_n(A_{i_n}, …, A_{i_1})`, assembled one
/// word at a time.
pub fn log_phi_symbolic(degree: usize) -> SymbolicLieSeries {
    let mut out = SymbolicLieSeries::zero(degree);
    let mut word_images: HashMap<Word, LieElement> = HashMap::new();
    for n in 2..=degree {
        for a in admissible_seqs(n) {
            let sym = MzvSymbol(a.clone());
            for (w, c) in c_coefficients(&a) {
                let image = word_images
                    .entry(w.clone())
                    .or_insert_with(|| cbh_map(&Series::monomial(2, degree, w, Q::one())));
                out.add_lie(&sym, image, &qi(c));
            }
        }
    }
    out
}

/// Numeric associator from the symbolic expansion: `phi_symbolic(N)` with each symbol
/// replaced by `eval(symbol)`.
pub fn phi_numeric(
    degree: usize,
    eval: impl FnMut(&MzvSymbol) -> Result<f64>,
) -> Result<NumericSeries> {
    phi_symbolic(degree).evaluate(eval)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(v: &[u8]) -> Word {
        Word::from(v)
    }

    fn seq(v: &[u8]) -> AdmissibleSeq {
        AdmissibleSeq::new(v.to_vec()).unwrap()
    }

    #[test]
    fn admissible_enumeration() {
        assert!(admissible_seqs(1).is_empty());
        assert_eq!(admissible_seqs(2), vec![seq(&[1, 0])]);
        assert_eq!(admissible_seqs(3), vec![seq(&[1, 0, 0]), seq(&[1, 1, 0])]);
        assert_eq!(admissible_seqs(5).len(), 8);
    }

    #[test]
    fn admissibility_errors() {
        assert!(AdmissibleSeq::new(vec![0, 1])
            .unwrap_err()
            .to_string()
            .contains("a_1"));
        assert!(AdmissibleSeq::new(vec![1, 1])
            .unwrap_err()
            .to_string()
            .contains("a_n"));
        assert!(AdmissibleSeq::new(vec![1]).is_err());
        assert!(AdmissibleSeq::parse("1,x").is_err());
        assert_eq!(AdmissibleSeq::parse("1, 0,0").unwrap(), seq(&[1, 0, 0]));
    }

    #[test]
    fn c_coefficients_degree_two() {
        let c = c_coefficients(&seq(&[1, 0]));
        assert_eq!(c.len(), 2);
        assert_eq!(c[&w(&[0, 1])], 1);
        assert_eq!(c[&w(&[1, 0])], -1);
        assert_eq!(c.values().sum::<i64>(), 0);
    }

    #[test]
    fn c_coefficients_are_bounded() {
        for n in 2..=7 {
            for a in admissible_seqs(n) {
                let total: i64 = c_coefficients(&a).values().map(|c| c.abs()).sum();
                assert!(total <= 4i64.pow(n as u32));
            }
        }
    }

    #[test]
    fn phi_symbolic_low_degrees() {
        let p1 = phi_symbolic(1);
        assert!(p1.terms().next().is_none());
        assert_eq!(p1.constant(), &Q::one());

        let p2 = phi_symbolic(2);
        let s = MzvSymbol(seq(&[1, 0]));
        assert_eq!(p2.coeff(&w(&[0, 1]), &s), qi(1));
        assert_eq!(p2.coeff(&w(&[1, 0]), &s), qi(-1));
        assert_eq!(p2.terms().count(), 2);

        let p3 = phi_symbolic(3);
        let deg3: BTreeSet<MzvSymbol> = p3
            .terms()
            .filter(|(w, _)| w.len() == 3)
            .flat_map(|(_, m)| m.keys().cloned())
            .collect();
        let expected: BTreeSet<MzvSymbol> = [seq(&[1, 0, 0]), seq(&[1, 1, 0])]
            .into_iter()
            .map(MzvSymbol)
            .collect();
        assert_eq!(deg3, expected);
    }

    #[test]
    fn log_phi_low_degrees() {
        assert!(log_phi_symbolic(1).is_zero());
        let l2 = log_phi_symbolic(2);
        let s = MzvSymbol(seq(&[1, 0]));
        let l01 = LyndonWord::new(w(&[0, 1])).unwrap();
        assert_eq!(l2.coeff(&l01, &s), qi(1));
        assert_eq!(l2.terms().count(), 1);
    }

    #[test]
    fn weight_mismatch_is_rejected() {
        let mut s = SymbolicSeries::new(3, Q::one());
        let err = s.add_term(w(&[0, 1, 1]), MzvSymbol(seq(&[1, 0])), &qi(1));
        assert!(err.is_err());
    }

    #[test]
    fn evaluation_errors_name_the_symbol() {
        let err = phi_numeric(3, |s| {
            if s.0.len() == 3 {
                Err(Error::Domain("no value".into()))
            } else {
                Ok(1.0)
            }
        })
        .unwrap_err();
        assert!(err.to_string().contains("1,0,0"), "{err}");
    }

    #[test]
    fn phi_numeric_degree_zero() {
        let p = phi_numeric(0, |_| Ok(0.0)).unwrap();
        assert_eq!(p, NumericSeries::one(2, 0));
    }
}
