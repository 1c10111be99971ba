//! The degree-truncated free associative algebra `F_n` and its unshuffle
//! coproduct, for which every generator is primitive.
//!
//! A [`Series`] lives in a fixed truncation `F_n / F_n^{>N}`; binary
//! operations require both operands to agree on `n` and `N`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::coeff::{factorial, Coefficient, Q};
use crate::error::{Error, Result};
use crate::word::Word;

/// A truncated noncommutative power series `Σ c_w w` with `|w| ≤ N`.
///
/// Zero coefficients are never stored, so structural equality is equality
/// of series.
#[derive(Clone, PartialEq)]
pub struct Series<C: Coefficient = Q> {
    alphabet: usize,
    degree: usize,
    terms: BTreeMap<Word, C>,
}

/// Floating-point series, used for numeric transports and substituted MZVs.
pub type NumericSeries = Series<f64>;

impl<C: Coefficient> Series<C> {
    pub fn zero(alphabet: usize, degree: usize) -> Self {
        assert!(alphabet > 0, "alphabet must be non-empty");
        Series {
            alphabet,
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(alphabet: usize, degree: usize) -> Self {
        Self::scalar(alphabet, degree, C::one())
    }

    pub fn scalar(alphabet: usize, degree: usize, c: C) -> Self {
        Self::monomial(alphabet, degree, Word::empty(), c)
    }

    /// The generator `x_i`.
    pub fn generator(alphabet: usize, degree: usize, i: u8) -> Self {
        assert!(
            (i as usize) < alphabet,
            "letter {i} outside alphabet {alphabet}"
        );
        Self::monomial(alphabet, degree, Word::letter(i), C::one())
    }

    /// `c·w`, or zero when `w` is longer than the truncation degree.
    pub fn monomial(alphabet: usize, degree: usize, w: Word, c: C) -> Self {
        let mut s = Self::zero(alphabet, degree);
        s.add_term(w, &c);
        s
    }

    /// Builds a series from explicit terms, summing repeated words.
    pub fn from_terms<I>(alphabet: usize, degree: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Word, C)>,
    {
        if alphabet == 0 {
            return Err(Error::Structural("alphabet must be non-empty".into()));
        }
        let mut s = Self::zero(alphabet, degree);
        for (w, c) in terms {
            if w.min_alphabet() > alphabet {
                return Err(Error::Domain(format!(
                    "word {w} uses a letter outside an alphabet of size {alphabet}"
                )));
            }
            if w.len() > degree {
                return Err(Error::Domain(format!(
                    "word {w} exceeds truncation degree {degree}"
                )));
            }
            s.add_term(w, &c);
        }
        Ok(s)
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Terms in (length, lexicographic) order.
    pub fn terms(&self) -> impl Iterator<Item = (&Word, &C)> {
        self.terms.iter()
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, w: &Word) -> C {
        self.terms.get(w).cloned().unwrap_or_else(C::zero)
    }

    pub fn constant_term(&self) -> C {
        self.coeff(&Word::empty())
    }

    /// Adds `c·w` in place, dropping words beyond the truncation and pruning zeros.
    pub fn add_term(&mut self, w: Word, c: &C) {
        if w.len() > self.degree || c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c.clone());
            }
        }
    }

    fn check_compatible(&self, other: &Self, op: &str) -> Result<()> {
        if self.alphabet != other.alphabet || self.degree != other.degree {
            return Err(Error::Structural(format!(
                "{op}: operands live in (alphabet {}, degree {}) and (alphabet {}, degree {})",
                self.alphabet, self.degree, other.alphabet, other.degree
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other, "add")?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other, "sub")?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), &-c.clone());
        }
        Ok(out)
    }

    /// Concatenation product, truncated at the common degree.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other, "mul")?;
        let mut out = Self::zero(self.alphabet, self.degree);
        // Terms are sorted by length, so the inner loop stops at the first
        // word that would overflow the truncation.
        for (u, a) in &self.terms {
            let room = self.degree - u.len();
            for (v, b) in other.terms.iter().take_while(|(v, _)| v.len() <= room) {
                out.add_term(u.concat(v), &a.mul_ref(b));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero(self.alphabet, self.degree);
        for (w, a) in &self.terms {
            out.add_term(w.clone(), &a.mul_ref(c));
        }
        out
    }

    pub fn map_coeffs<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> Series<D> {
        let mut out = Series::<D>::zero(self.alphabet, self.degree);
        for (w, c) in &self.terms {
            out.add_term(w.clone(), &f(c));
        }
        out
    }

    /// Re-truncates at `degree`; raising the degree leaves the terms unchanged.
    pub fn with_degree(&self, degree: usize) -> Self {
        Series {
            alphabet: self.alphabet,
            degree,
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| w.len() <= degree)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    /// Embeds into a larger alphabet (letters keep their indices).
    pub fn with_alphabet(&self, alphabet: usize) -> Self {
        assert!(alphabet >= self.alphabet);
        Series {
            alphabet,
            degree: self.degree,
            terms: self.terms.clone(),
        }
    }

    /// The part of degree exactly `d`.
    pub fn homogeneous(&self, d: usize) -> Self {
        self.filter(|w| w.len() == d)
    }

    pub fn filter(&self, keep: impl Fn(&Word) -> bool) -> Self {
        Series {
            alphabet: self.alphabet,
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| keep(w))
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    /// Keeps exactly the words in which letter `i` occurs `d[i]` times.
    pub fn multidegree_component(&self, d: &[usize]) -> Result<Self> {
        if d.len() != self.alphabet {
            return Err(Error::Structural(format!(
                "multidegree of length {} for alphabet {}",
                d.len(),
                self.alphabet
            )));
        }
        Ok(self.filter(|w| w.multidegree(self.alphabet) == d))
    }

    /// `Σ_{k≤N} ℓ^k / k!`; requires a vanishing constant term.
    pub fn exp(&self) -> Result<Self> {
        if !self.constant_term().is_zero() {
            return Err(Error::Domain(format!(
                "exp needs a zero constant term, found {:?}",
                self.constant_term()
            )));
        }
        let mut out = Self::one(self.alphabet, self.degree);
        let mut power = Self::one(self.alphabet, self.degree);
        for k in 1..=self.degree {
            power = power.try_mul(self)?;
            if power.is_zero() {
                break;
            }
            let inv = C::from_q(&Q::new(1.into(), factorial(k)));
            out = out.try_add(&power.scale(&inv))?;
        }
        Ok(out)
    }

    /// `Σ_{k≤N} (-1)^{k-1} (X-1)^k / k`; requires constant term exactly one.
    pub fn log(&self) -> Result<Self> {
        if self.constant_term() != C::one() {
            return Err(Error::Domain(format!(
                "log needs constant term 1, found {:?}",
                self.constant_term()
            )));
        }
        let x = self.try_sub(&Self::one(self.alphabet, self.degree))?;
        let mut out = Self::zero(self.alphabet, self.degree);
        let mut power = Self::one(self.alphabet, self.degree);
        for k in 1..=self.degree {
            power = power.try_mul(&x)?;
            if power.is_zero() {
                break;
            }
            let sign = if k % 2 == 1 { 1 } else { -1 };
            let c = C::from_q(&Q::new(sign.into(), (k as i64).into()));
            out = out.try_add(&power.scale(&c))?;
        }
        Ok(out)
    }

    /// Inverse of an element with constant term one, `Σ_k (1 - X)^k`.
    pub fn inverse_unipotent(&self) -> Result<Self> {
        if self.constant_term() != C::one() {
            return Err(Error::Domain(format!(
                "inverse needs constant term 1, found {:?}",
                self.constant_term()
            )));
        }
        let one = Self::one(self.alphabet, self.degree);
        let y = one.try_sub(self)?;
        let mut out = one.clone();
        let mut power = one;
        for _ in 1..=self.degree {
            power = power.try_mul(&y)?;
            out = out.try_add(&power)?;
        }
        Ok(out)
    }

    /// `[a, b] = ab - ba`.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        self.try_mul(other)?.try_sub(&other.try_mul(self)?)
    }

    /// Largest coefficient magnitude of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut m: f64 = 0.0;
        for (w, c) in &self.terms {
            let mut d = c.clone();
            if let Some(o) = other.terms.get(w) {
                d -= o;
            }
            m = m.max(d.magnitude());
        }
        for (w, c) in &other.terms {
            if !self.terms.contains_key(w) {
                m = m.max(c.magnitude());
            }
        }
        m
    }

    /// The unshuffle coproduct: `Δ(w) = Σ_S w|_S ⊗ w|_{S^c}` over position subsets.
    pub fn coproduct(&self) -> TensorSeries<C> {
        let mut out = TensorSeries::zero(self.alphabet, self.degree);
        for (w, c) in &self.terms {
            let n = w.len();
            let full = (1u64 << n) - 1;
            for mask in 0..=full {
                out.add_term(w.subword(mask), w.subword(full ^ mask), c);
            }
        }
        out
    }

    /// `X ⊗ Y`, truncated at total degree `N`.
    pub fn outer(&self, other: &Self) -> TensorSeries<C> {
        let mut out = TensorSeries::zero(self.alphabet, self.degree);
        for (u, a) in &self.terms {
            let room = self.degree - u.len();
            for (v, b) in other.terms.iter().take_while(|(v, _)| v.len() <= room) {
                out.add_term(u.clone(), v.clone(), &a.mul_ref(b));
            }
        }
        out
    }

    /// The first pair `(u, v)` where `Δ(X)` and `X ⊗ X` differ, with both
    /// coefficients, or `None` when `X` satisfies `Δ(X) = X ⊗ X`.
    pub fn grouplike_defect(&self) -> Option<((Word, Word), C, C)> {
        if self.constant_term() != C::one() {
            return Some((
                (Word::empty(), Word::empty()),
                self.constant_term(),
                C::one(),
            ));
        }
        self.coproduct().first_difference(&self.outer(self))
    }

    /// Exact group-like test: constant term one and `Δ(X) = X ⊗ X`.
    pub fn is_grouplike(&self) -> bool {
        self.grouplike_defect().is_none()
    }

    /// `max |Δ(X) - X ⊗ X|` together with `|c_∅ - 1|`, for float series.
    pub fn grouplike_residual(&self) -> f64 {
        let mut c0 = self.constant_term();
        c0 -= &C::one();
        c0.magnitude()
            .max(self.coproduct().max_abs_diff(&self.outer(self)))
    }

    /// `max |Δ(X) - (X ⊗ 1 + 1 ⊗ X)|`.
    pub fn primitive_residual(&self) -> f64 {
        let mut expected = TensorSeries::zero(self.alphabet, self.degree);
        for (w, c) in &self.terms {
            expected.add_term(w.clone(), Word::empty(), c);
            expected.add_term(Word::empty(), w.clone(), c);
        }
        self.coproduct().max_abs_diff(&expected)
    }

    /// Exact primitivity test `Δ(X) = X ⊗ 1 + 1 ⊗ X`.
    pub fn is_primitive(&self) -> bool {
        let mut expected = TensorSeries::zero(self.alphabet, self.degree);
        for (w, c) in &self.terms {
            expected.add_term(w.clone(), Word::empty(), c);
            expected.add_term(Word::empty(), w.clone(), c);
        }
        self.coproduct().first_difference(&expected).is_none()
    }
}

impl<C: Coefficient + fmt::Display> fmt::Display for Series<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})·{w}")?;
        }
        Ok(())
    }
}

impl<C: Coefficient> fmt::Debug for Series<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Series")
            .field("alphabet", &self.alphabet)
            .field("degree", &self.degree)
            .field("terms", &self.terms)
            .finish()
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $try:ident) => {
        impl<C: Coefficient> $tr<&Series<C>> for &Series<C> {
            type Output = Series<C>;
            fn $method(self, rhs: &Series<C>) -> Series<C> {
                self.$try(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl<C: Coefficient> $tr<Series<C>> for Series<C> {
            type Output = Series<C>;
            fn $method(self, rhs: Series<C>) -> Series<C> {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl<C: Coefficient> Neg for &Series<C> {
    type Output = Series<C>;
    fn neg(self) -> Series<C> {
        self.scale(&-C::one())
    }
}

impl<C: Coefficient> Neg for Series<C> {
    type Output = Series<C>;
    fn neg(self) -> Series<C> {
        -&self
    }
}

/// Elements of `F_n ⊗ F_n` truncated at total degree `N`.
#[derive(Clone, PartialEq, Debug)]
pub struct TensorSeries<C: Coefficient = Q> {
    alphabet: usize,
    degree: usize,
    terms: BTreeMap<(Word, Word), C>,
}

impl<C: Coefficient> TensorSeries<C> {
    pub fn zero(alphabet: usize, degree: usize) -> Self {
        TensorSeries {
            alphabet,
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn add_term(&mut self, u: Word, v: Word, c: &C) {
        if u.len() + v.len() > self.degree || c.is_zero() {
            return;
        }
        let key = (u, v);
        match self.terms.get_mut(&key) {
            Some(x) => {
                *x += c;
                if x.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c.clone());
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Word, Word), &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, u: &Word, v: &Word) -> C {
        self.terms
            .get(&(u.clone(), v.clone()))
            .cloned()
            .unwrap_or_else(C::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// First key (in sorted order) where the two tensors differ.
    pub fn first_difference(&self, other: &Self) -> Option<((Word, Word), C, C)> {
        let mut keys: Vec<&(Word, Word)> = self.terms.keys().chain(other.terms.keys()).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter().find_map(|k| {
            let a = self.terms.get(k).cloned().unwrap_or_else(C::zero);
            let b = other.terms.get(k).cloned().unwrap_or_else(C::zero);
            (a != b).then(|| (k.clone(), a, b))
        })
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut m: f64 = 0.0;
        for (k, c) in &self.terms {
            let mut d = c.clone();
            if let Some(o) = other.terms.get(k) {
                d -= o;
            }
            m = m.max(d.magnitude());
        }
        for (k, c) in &other.terms {
            if !self.terms.contains_key(k) {
                m = m.max(c.magnitude());
            }
        }
        m
    }
}
