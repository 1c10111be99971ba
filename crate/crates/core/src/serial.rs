//! JSON documents for series, Lie elements and their symbolic and numeric
//! variants. Terms are listed by word length, then lexicographically;
//! rationals are written as decimal strings `num`/`den`.

use std::collections::BTreeSet;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::coeff::Q;
use crate::error::{Error, Result};
use crate::lemurakami::{AdmissibleSeq, MzvSymbol, SymbolicLieSeries, SymbolicSeries};
use crate::lie::{LieElement, LyndonWord, BASIS_CONVENTION};
use crate::series::{NumericSeries, Series};
use crate::word::Word;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RationalTerm {
    pub word: Vec<u8>,
    pub num: String,
    pub den: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FloatTerm {
    pub word: Vec<u8>,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolRecord {
    pub seq: String,
    pub num: String,
    pub den: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolicTerm {
    pub word: Vec<u8>,
    pub symbols: Vec<SymbolRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesDoc {
    pub alphabet: usize,
    pub degree: usize,
    pub terms: Vec<RationalTerm>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LieDoc {
    pub alphabet: usize,
    pub degree: usize,
    pub basis: String,
    pub terms: Vec<RationalTerm>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericDoc {
    pub alphabet: usize,
    pub degree: usize,
    pub tolerance: f64,
    pub terms: Vec<FloatTerm>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumericLieDoc {
    pub alphabet: usize,
    pub degree: usize,
    pub basis: String,
    pub tolerance: f64,
    pub terms: Vec<FloatTerm>,
}

/// The constant term, if any, is the record with the empty word and `seq: ""`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolicDoc {
    pub degree: usize,
    pub terms: Vec<SymbolicTerm>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolicLieDoc {
    pub degree: usize,
    pub basis: String,
    pub terms: Vec<SymbolicTerm>,
}

pub fn to_json<T: Serialize>(doc: &T, pretty: bool) -> String {
    let out = if pretty {
        serde_json::to_string_pretty(doc)
    } else {
        serde_json::to_string(doc)
    };
    out.expect("documents contain only strings, integers and finite floats")
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
}

fn rational_parts(c: &Q) -> (String, String) {
    (c.numer().to_string(), c.denom().to_string())
}

fn parse_rational(num: &str, den: &str) -> Result<Q> {
    let n = BigInt::from_str(num).map_err(|_| Error::Format(format!("bad numerator {num:?}")))?;
    let d = BigInt::from_str(den).map_err(|_| Error::Format(format!("bad denominator {den:?}")))?;
    if d == BigInt::from(0) {
        return Err(Error::Format("zero denominator".into()));
    }
    Ok(Q::new(n, d))
}

fn check_word(word: &[u8], alphabet: usize, degree: usize) -> Result<Word> {
    if let Some(&l) = word.iter().find(|&&l| l as usize >= alphabet) {
        return Err(Error::Format(format!(
            "letter {l} outside an alphabet of size {alphabet}"
        )));
    }
    if word.len() > degree {
        return Err(Error::Format(format!(
            "word of length {} exceeds degree {degree}",
            word.len()
        )));
    }
    Ok(Word::new(word.to_vec()))
}

fn check_unique<'a>(words: impl Iterator<Item = &'a Vec<u8>>) -> Result<()> {
    let mut seen = BTreeSet::new();
    for w in words {
        if !seen.insert(w) {
            return Err(Error::Format(format!("duplicate word {w:?}")));
        }
    }
    Ok(())
}

fn check_basis(basis: &str) -> Result<()> {
    if basis != BASIS_CONVENTION {
        return Err(Error::Format(format!(
            "unknown basis convention {basis:?}, expected {BASIS_CONVENTION:?}"
        )));
    }
    Ok(())
}

fn lyndon(word: Word) -> Result<LyndonWord> {
    LyndonWord::new(word).map_err(|e| Error::Format(e.to_string()))
}

fn finite(v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Format(format!("non-finite coefficient {v}")))
    }
}

/// Lyndon coordinates listed by (length, lex) of the underlying words.
fn sorted_coords<C: crate::coeff::Coefficient>(x: &LieElement<C>) -> Vec<(&LyndonWord, &C)> {
    let mut coords: Vec<_> = x.coords().collect();
    coords.sort_by(|a, b| a.0.word().cmp(b.0.word()));
    coords
}

impl SeriesDoc {
    pub fn from_series(x: &Series) -> Self {
        SeriesDoc {
            alphabet: x.alphabet(),
            degree: x.degree(),
            terms: x
                .terms()
                .map(|(w, c)| {
                    let (num, den) = rational_parts(c);
                    RationalTerm {
                        word: w.letters().to_vec(),
                        num,
                        den,
                    }
                })
                .collect(),
        }
    }

    pub fn to_series(&self) -> Result<Series> {
        check_unique(self.terms.iter().map(|t| &t.word))?;
        let mut out = Series::zero(self.alphabet, self.degree);
        for t in &self.terms {
            let w = check_word(&t.word, self.alphabet, self.degree)?;
            out.add_term(w, &parse_rational(&t.num, &t.den)?);
        }
        Ok(out)
    }
}

impl LieDoc {
    pub fn from_lie(x: &LieElement) -> Self {
        LieDoc {
            alphabet: x.alphabet(),
            degree: x.degree(),
            basis: BASIS_CONVENTION.to_string(),
            terms: sorted_coords(x)
                .into_iter()
                .map(|(l, c)| {
                    let (num, den) = rational_parts(c);
                    RationalTerm {
                        word: l.word().letters().to_vec(),
                        num,
                        den,
                    }
                })
                .collect(),
        }
    }

    pub fn to_lie(&self) -> Result<LieElement> {
        check_basis(&self.basis)?;
        check_unique(self.terms.iter().map(|t| &t.word))?;
        let mut out = LieElement::zero(self.alphabet, self.degree);
        for t in &self.terms {
            let l = lyndon(check_word(&t.word, self.alphabet, self.degree)?)?;
            out.add_coord(l, &parse_rational(&t.num, &t.den)?);
        }
        Ok(out)
    }
}

impl NumericDoc {
    pub fn from_series(x: &NumericSeries, tolerance: f64) -> Self {
        NumericDoc {
            alphabet: x.alphabet(),
            degree: x.degree(),
            tolerance,
            terms: x
                .terms()
                .map(|(w, &value)| FloatTerm {
                    word: w.letters().to_vec(),
                    value,
                })
                .collect(),
        }
    }

    pub fn to_series(&self) -> Result<NumericSeries> {
        check_unique(self.terms.iter().map(|t| &t.word))?;
        let mut out = Series::zero(self.alphabet, self.degree);
        for t in &self.terms {
            let w = check_word(&t.word, self.alphabet, self.degree)?;
            out.add_term(w, &finite(t.value)?);
        }
        Ok(out)
    }
}

impl NumericLieDoc {
    pub fn from_lie(x: &LieElement<f64>, tolerance: f64) -> Self {
        NumericLieDoc {
            alphabet: x.alphabet(),
            degree: x.degree(),
            basis: BASIS_CONVENTION.to_string(),
            tolerance,
            terms: sorted_coords(x)
                .into_iter()
                .map(|(l, &value)| FloatTerm {
                    word: l.word().letters().to_vec(),
                    value,
                })
                .collect(),
        }
    }

    pub fn to_lie(&self) -> Result<LieElement<f64>> {
        check_basis(&self.basis)?;
        check_unique(self.terms.iter().map(|t| &t.word))?;
        let mut out = LieElement::zero(self.alphabet, self.degree);
        for t in &self.terms {
            let l = lyndon(check_word(&t.word, self.alphabet, self.degree)?)?;
            out.add_coord(l, &finite(t.value)?);
        }
        Ok(out)
    }
}

fn symbol_records<'a>(m: impl Iterator<Item = (&'a MzvSymbol, &'a Q)>) -> Vec<SymbolRecord> {
    m.map(|(s, c)| {
        let (num, den) = rational_parts(c);
        SymbolRecord {
            seq: s.seq().to_string(),
            num,
            den,
        }
    })
    .collect()
}

fn parse_symbol(seq: &str) -> Result<MzvSymbol> {
    AdmissibleSeq::parse(seq)
        .map(MzvSymbol)
        .map_err(|e| Error::Format(e.to_string()))
}

impl SymbolicDoc {
    pub fn from_symbolic(x: &SymbolicSeries) -> Self {
        let mut terms = Vec::new();
        if !num_traits::Zero::is_zero(x.constant()) {
            let (num, den) = rational_parts(x.constant());
            terms.push(SymbolicTerm {
                word: Vec::new(),
                symbols: vec![SymbolRecord {
                    seq: String::new(),
                    num,
                    den,
                }],
            });
        }
        terms.extend(x.terms().map(|(w, m)| SymbolicTerm {
            word: w.letters().to_vec(),
            symbols: symbol_records(m.iter()),
        }));
        SymbolicDoc {
            degree: x.degree(),
            terms,
        }
    }

    pub fn to_symbolic(&self) -> Result<SymbolicSeries> {
        check_unique(self.terms.iter().map(|t| &t.word))?;
        let mut constant = Q::from_integer(0.into());
        let mut body = Vec::new();
        for t in &self.terms {
            let w = check_word(&t.word, 2, self.degree)?;
            for r in &t.symbols {
                let c = parse_rational(&r.num, &r.den)?;
                if w.is_empty() {
                    if !r.seq.is_empty() {
                        return Err(Error::Format(format!(
                            "constant term carries symbol {:?}",
                            r.seq
                        )));
                    }
                    constant += c;
                } else {
                    body.push((w.clone(), parse_symbol(&r.seq)?, c));
                }
            }
        }
        let mut out = SymbolicSeries::new(self.degree, constant);
        for (w, s, c) in body {
            out.add_term(w, s, &c)
                .map_err(|e| Error::Format(e.to_string()))?;
        }
        Ok(out)
    }
}

impl SymbolicLieDoc {
    pub fn from_symbolic(x: &SymbolicLieSeries) -> Self {
        let mut terms: Vec<_> = x.terms().collect();
        terms.sort_by(|a, b| a.0.word().cmp(b.0.word()));
        SymbolicLieDoc {
            degree: x.degree(),
            basis: BASIS_CONVENTION.to_string(),
            terms: terms
                .into_iter()
                .map(|(l, m)| SymbolicTerm {
                    word: l.word().letters().to_vec(),
                    symbols: symbol_records(m.iter()),
                })
                .collect(),
        }
    }

    pub fn to_symbolic(&self) -> Result<SymbolicLieSeries> {
        check_basis(&self.basis)?;
        check_unique(self.terms.iter().map(|t| &t.word))?;
        let mut out = SymbolicLieSeries::zero(self.degree);
        for t in &self.terms {
            let l = lyndon(check_word(&t.word, 2, self.degree)?)?;
            for r in &t.symbols {
                let s = parse_symbol(&r.seq)?;
                if s.seq().len() != l.len() {
                    return Err(Error::Format(format!(
                        "symbol {s} has weight {} but multiplies {l}",
                        s.seq().len()
                    )));
                }
                out.add_term(l.clone(), &s, &parse_rational(&r.num, &r.den)?);
            }
        }
        Ok(out)
    }
}
