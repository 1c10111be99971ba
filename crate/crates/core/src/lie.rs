//! The free Lie algebra `f_n ⊂ F_n` in the Lyndon basis, and the projection
//! `p_n : F_n → f_n` obtained by inverting symmetrization `S(f_n) → F_n`.
//!
//! Basis conventions: a Lyndon word `w = uv` with `v` its longest proper
//! Lyndon suffix brackets to `P_w = [P_u, P_v]`. The expansion of `P_w`
//! contains `w` with coefficient one and otherwise only words that are
//! lexicographically larger, which makes conversion from words to Lyndon
//! coordinates a triangular sweep.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::coeff::{Coefficient, Q};
use crate::error::{Error, Result};
use crate::linalg;
use crate::memo::Memo;
use crate::series::Series;
use crate::word::Word;

/// Name of the basis convention, recorded in serialized Lie elements.
pub const BASIS_CONVENTION: &str = "lyndon-lex-standard-factorization";

pub fn is_lyndon(w: &[u8]) -> bool {
    let n = w.len();
    n > 0 && (1..n).all(|i| w[i..].iter().chain(&w[..i]).cmp(w.iter()) == Ordering::Greater)
}

/// A Lyndon word. Ordered lexicographically (not length-first).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LyndonWord(Word);

impl LyndonWord {
    pub fn new(w: Word) -> Result<Self> {
        if is_lyndon(w.letters()) {
            Ok(LyndonWord(w))
        } else {
            Err(Error::Domain(format!("{w} is not a Lyndon word")))
        }
    }

    pub fn word(&self) -> &Word {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `w = uv` with `v` the longest proper Lyndon suffix; `None` for letters.
    pub fn standard_factorization(&self) -> Option<(LyndonWord, LyndonWord)> {
        let l = self.0.letters();
        (1..l.len()).find(|&i| is_lyndon(&l[i..])).map(|i| {
            (
                LyndonWord(Word::from(&l[..i])),
                LyndonWord(Word::from(&l[i..])),
            )
        })
    }
}

impl Ord for LyndonWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.lex_cmp(&other.0)
    }
}

impl PartialOrd for LyndonWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for LyndonWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L[")?;
        for l in self.0.letters() {
            write!(f, "{l}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for LyndonWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.standard_factorization() {
            None => write!(f, "x{}", self.0.letters()[0]),
            Some((u, v)) => write!(f, "[{u},{v}]"),
        }
    }
}

/// All Lyndon words of length `1..=max_len`, in lexicographic order (Duval).
pub fn lyndon_words_up_to(alphabet: usize, max_len: usize) -> Vec<LyndonWord> {
    let mut out = Vec::new();
    if alphabet == 0 || max_len == 0 {
        return out;
    }
    let top = alphabet as i16 - 1;
    let mut w: Vec<i16> = vec![-1];
    while !w.is_empty() {
        *w.last_mut().unwrap() += 1;
        out.push(LyndonWord(Word::new(w.iter().map(|&l| l as u8).collect())));
        let m = w.len();
        while w.len() < max_len {
            w.push(w[w.len() - m]);
        }
        while w.last() == Some(&top) {
            w.pop();
        }
    }
    out
}

/// Lyndon words of length exactly `degree`, sorted.
pub fn lyndon_basis(alphabet: usize, degree: usize) -> Vec<LyndonWord> {
    if degree == 0 {
        return Vec::new();
    }
    lyndon_words_up_to(alphabet, degree)
        .into_iter()
        .filter(|l| l.len() == degree)
        .collect()
}

fn mobius(mut n: u64) -> i64 {
    let mut sign = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

/// Witt's formula `(1/d) Σ_{e|d} μ(e) n^{d/e}`.
pub fn witt_dimension(alphabet: usize, degree: usize) -> u64 {
    let d = degree as u64;
    let sum: i128 = (1..=d)
        .filter(|e| d.is_multiple_of(*e))
        .map(|e| mobius(e) as i128 * (alphabet as i128).pow((d / e) as u32))
        .sum();
    (sum / d as i128) as u64
}

type Poly = Vec<(Word, Q)>;

fn bracket_cache() -> &'static Memo<Word, Poly> {
    static CACHE: OnceLock<Memo<Word, Poly>> = OnceLock::new();
    CACHE.get_or_init(Memo::new)
}

fn poly_mul(a: &Poly, b: &Poly, sign: i32, out: &mut BTreeMap<Word, Q>) {
    for (u, x) in a {
        for (v, y) in b {
            let c = x * y;
            let e = out.entry(u.concat(v)).or_insert_with(Q::zero);
            if sign > 0 {
                *e += c;
            } else {
                *e -= c;
            }
        }
    }
}

/// Expansion of the bracketing `P_w` as (word, coefficient) pairs in
/// (length, lex) order. Independent of the ambient alphabet.
pub(crate) fn bracket_expansion(l: &LyndonWord) -> Arc<Poly> {
    bracket_cache().get_or_insert_with(&l.0, || match l.standard_factorization() {
        None => vec![(l.0.clone(), Q::one())],
        Some((u, v)) => {
            let pu = bracket_expansion(&u);
            let pv = bracket_expansion(&v);
            let mut acc = BTreeMap::new();
            poly_mul(&pu, &pv, 1, &mut acc);
            poly_mul(&pv, &pu, -1, &mut acc);
            acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
        }
    })
}

/// `P_w` as a series in the free algebra on `alphabet` letters, truncated at `|w|`.
pub fn bracketing(l: &LyndonWord, alphabet: usize) -> Series {
    Series::from_terms(alphabet, l.len(), bracket_expansion(l).iter().cloned())
        .expect("Lyndon word letters must fit the alphabet")
}

/// An element of the truncated free Lie algebra, in Lyndon coordinates.
#[derive(Clone, PartialEq)]
pub struct LieElement<C: Coefficient = Q> {
    alphabet: usize,
    degree: usize,
    coords: BTreeMap<LyndonWord, C>,
}

impl<C: Coefficient> LieElement<C> {
    pub fn zero(alphabet: usize, degree: usize) -> Self {
        LieElement {
            alphabet,
            degree,
            coords: BTreeMap::new(),
        }
    }

    pub fn from_coords<I>(alphabet: usize, degree: usize, coords: I) -> Result<Self>
    where
        I: IntoIterator<Item = (LyndonWord, C)>,
    {
        let mut out = Self::zero(alphabet, degree);
        for (l, c) in coords {
            if l.len() > degree || l.0.min_alphabet() > alphabet {
                return Err(Error::Domain(format!(
                    "Lyndon word {l:?} does not fit (alphabet {alphabet}, degree {degree})"
                )));
            }
            out.add_coord(l, &c);
        }
        Ok(out)
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coords(&self) -> impl Iterator<Item = (&LyndonWord, &C)> {
        self.coords.iter()
    }

    pub fn coeff(&self, l: &LyndonWord) -> C {
        self.coords.get(l).cloned().unwrap_or_else(C::zero)
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn add_coord(&mut self, l: LyndonWord, c: &C) {
        if c.is_zero() || l.len() > self.degree {
            return;
        }
        let e = self.coords.entry(l.clone()).or_insert_with(C::zero);
        *e += c;
        if e.is_zero() {
            self.coords.remove(&l);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (l, c) in &other.coords {
            out.add_coord(l.clone(), c);
        }
        out
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero(self.alphabet, self.degree);
        for (l, a) in &self.coords {
            out.add_coord(l.clone(), &a.mul_ref(c));
        }
        out
    }

    pub fn map_coeffs<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> LieElement<D> {
        let mut out = LieElement::zero(self.alphabet, self.degree);
        for (l, c) in &self.coords {
            out.add_coord(l.clone(), &f(c));
        }
        out
    }

    /// `Σ c_l P_l` as a series.
    pub fn expand(&self) -> Series<C> {
        let mut out = Series::zero(self.alphabet, self.degree);
        for (l, c) in &self.coords {
            for (w, b) in bracket_expansion(l).iter() {
                out.add_term(w.clone(), &C::from_q(b).mul_ref(c));
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut m: f64 = 0.0;
        for (l, c) in &self.coords {
            let mut d = c.clone();
            d -= &other.coeff(l);
            m = m.max(d.magnitude());
        }
        for (l, c) in &other.coords {
            if !self.coords.contains_key(l) {
                m = m.max(c.magnitude());
            }
        }
        m
    }

    /// Rewrites a series in Lyndon coordinates by the triangular sweep.
    ///
    /// Returns the coordinates of the Lie part together with the remainder
    /// that is not in the span of the Lyndon brackets. The constant term
    /// always lands in the remainder. For float input the remainder holds
    /// rounding noise; for exact input it is zero iff the series is Lie.
    pub fn decompose(series: &Series<C>) -> (Self, Series<C>) {
        let mut rem: BTreeMap<LexKey, C> = series
            .terms()
            .map(|(w, c)| (LexKey(w.clone()), c.clone()))
            .collect();
        let mut lie = Self::zero(series.alphabet(), series.degree());
        let mut leftover = Series::zero(series.alphabet(), series.degree());
        while let Some((LexKey(w), c)) = rem.pop_first() {
            if !is_lyndon(w.letters()) {
                leftover.add_term(w, &c);
                continue;
            }
            let l = LyndonWord(w);
            for (u, b) in bracket_expansion(&l)
                .iter()
                .skip_while(|(u, _)| u == l.word())
            {
                let key = LexKey(u.clone());
                let e = rem.entry(key).or_insert_with(C::zero);
                *e -= &C::from_q(b).mul_ref(&c);
                if e.is_zero() {
                    rem.remove(&LexKey(u.clone()));
                }
            }
            lie.add_coord(l, &c);
        }
        (lie, leftover)
    }

    /// Exact conversion; fails if the series is not a Lie polynomial.
    pub fn from_series(series: &Series<C>) -> Result<Self> {
        let (lie, rem) = Self::decompose(series);
        if rem.is_zero() {
            Ok(lie)
        } else {
            Err(Error::Domain(format!(
                "series is not a Lie polynomial ({} residual terms)",
                rem.len()
            )))
        }
    }
}

impl<C: Coefficient> fmt::Debug for LieElement<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LieElement")
            .field("alphabet", &self.alphabet)
            .field("degree", &self.degree)
            .field("coords", &self.coords)
            .finish()
    }
}

impl<C: Coefficient + fmt::Display> fmt::Display for LieElement<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coords.is_empty() {
            return write!(f, "0");
        }
        let mut items: Vec<_> = self.coords.iter().collect();
        items.sort_by(|a, b| a.0.word().cmp(b.0.word()));
        for (i, (l, c)) in items.into_iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})·{l}")?;
        }
        Ok(())
    }
}

#[derive(Clone, PartialEq, Eq)]
struct LexKey(Word);

impl Ord for LexKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.lex_cmp(&other.0)
    }
}

impl PartialOrd for LexKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A commutative monomial `ℓ_1 ⋯ ℓ_k` in `S(f_n)`, stored nonincreasing.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PbwMonomial(Vec<LyndonWord>);

impl PbwMonomial {
    pub fn new(mut factors: Vec<LyndonWord>) -> Self {
        factors.sort_by(|a, b| b.cmp(a));
        PbwMonomial(factors)
    }

    pub fn factors(&self) -> &[LyndonWord] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(LyndonWord::len).sum()
    }
}

impl Ord for PbwMonomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for PbwMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Steps `v` to the next permutation in lexicographic order.
fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let Some(i) = (0..v.len() - 1).rev().find(|&i| v[i] < v[i + 1]) else {
        return false;
    };
    let j = (i + 1..v.len()).rev().find(|&j| v[i] < v[j]).unwrap();
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

/// `(1/k!) Σ_σ P_{ℓ_σ(1)} ⋯ P_{ℓ_σ(k)}`.
///
/// Each distinct arrangement of a multiset occurs equally often among the
/// `k!` permutations, so averaging over distinct arrangements is the same sum.
pub fn symmetrize(m: &PbwMonomial, alphabet: usize) -> Series {
    let degree = m.degree();
    let mut order: Vec<usize> = (0..m.0.len()).collect();
    // Work with indices of equal factors collapsed, so permutations are distinct.
    for i in 1..order.len() {
        if m.0[i] == m.0[i - 1] {
            order[i] = order[i - 1];
        }
    }
    let mut acc = Series::zero(alphabet, degree);
    let mut count = 0u64;
    loop {
        let mut prod = Series::one(alphabet, degree);
        for &i in &order {
            prod = &prod * &bracketing(&m.0[i], alphabet).with_degree(degree);
        }
        acc = &acc + &prod;
        count += 1;
        if !next_permutation(&mut order) {
            break;
        }
    }
    acc.scale(&Q::new(1.into(), count.into()))
}

/// Coordinates of `p(w)` for every word `w` of one degree.
struct ProjectionTable {
    images: HashMap<Word, Vec<(LyndonWord, Q)>>,
}

fn projection_cache() -> &'static Memo<(usize, usize), ProjectionTable> {
    static CACHE: OnceLock<Memo<(usize, usize), ProjectionTable>> = OnceLock::new();
    CACHE.get_or_init(Memo::new)
}

fn content(w: &Word, alphabet: usize) -> Vec<usize> {
    w.multidegree(alphabet)
}

/// PBW monomials (nonincreasing Lyndon sequences) with the given multidegree.
fn pbw_monomials(candidates: &[LyndonWord], target: &[usize], alphabet: usize) -> Vec<PbwMonomial> {
    // candidates are sorted decreasing; indices are chosen nondecreasing.
    fn go(
        cands: &[(LyndonWord, Vec<usize>)],
        start: usize,
        remaining: &mut Vec<usize>,
        current: &mut Vec<LyndonWord>,
        out: &mut Vec<PbwMonomial>,
    ) {
        if remaining.iter().all(|&r| r == 0) {
            out.push(PbwMonomial(current.clone()));
            return;
        }
        for i in start..cands.len() {
            let (l, c) = &cands[i];
            if c.iter().zip(remaining.iter()).all(|(a, b)| a <= b) {
                for (r, a) in remaining.iter_mut().zip(c) {
                    *r -= a;
                }
                current.push(l.clone());
                go(cands, i, remaining, current, out);
                current.pop();
                for (r, a) in remaining.iter_mut().zip(c) {
                    *r += a;
                }
            }
        }
    }
    let mut cands: Vec<(LyndonWord, Vec<usize>)> = candidates
        .iter()
        .map(|l| (l.clone(), content(l.word(), alphabet)))
        .filter(|(_, c)| c.iter().zip(target).all(|(a, b)| a <= b))
        .collect();
    cands.sort_by(|a, b| b.0.cmp(&a.0));
    let mut out = Vec::new();
    go(&cands, 0, &mut target.to_vec(), &mut Vec::new(), &mut out);
    out
}

fn build_projection_table(alphabet: usize, degree: usize) -> ProjectionTable {
    let lyndon = lyndon_words_up_to(alphabet, degree);
    let mut blocks: BTreeMap<Vec<usize>, Vec<Word>> = BTreeMap::new();
    for w in Word::all_of_length(alphabet, degree) {
        blocks.entry(content(&w, alphabet)).or_default().push(w);
    }
    let mut images = HashMap::new();
    for (md, words) in blocks {
        let monomials = pbw_monomials(&lyndon, &md, alphabet);
        assert_eq!(
            monomials.len(),
            words.len(),
            "PBW monomials must form a basis of each multidegree block"
        );
        let index: HashMap<&Word, usize> = words.iter().enumerate().map(|(i, w)| (w, i)).collect();
        let n = words.len();
        // Column j holds symmetrize(m_j), scaled by an integer so the entries are integral.
        let mut matrix = vec![vec![BigInt::zero(); n]; n];
        let mut col_scale = Vec::with_capacity(n);
        for (j, m) in monomials.iter().enumerate() {
            let s = symmetrize(m, alphabet);
            let lcm = s
                .terms()
                .fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
            for (w, c) in s.terms() {
                let v = c * Q::from_integer(lcm.clone());
                matrix[index[w]][j] = v.to_integer();
            }
            col_scale.push(Q::from_integer(lcm));
        }
        let inv =
            linalg::inverse(&matrix).expect("symmetrization change of basis must be invertible");
        for (i, w) in words.iter().enumerate() {
            let coords: Vec<(LyndonWord, Q)> = monomials
                .iter()
                .enumerate()
                .filter(|(_, m)| m.0.len() == 1)
                .map(|(j, m)| (m.0[0].clone(), &col_scale[j] * &inv[j][i]))
                .filter(|(_, c)| !c.is_zero())
                .collect();
            images.insert(w.clone(), coords);
        }
    }
    ProjectionTable { images }
}

/// The projection `p : F_n → f_n`: write each graded piece in the
/// symmetrized PBW basis and keep the `S^1` component. `p(1) = 0`.
pub fn lie_project_p(x: &Series) -> LieElement {
    let mut out = LieElement::zero(x.alphabet(), x.degree());
    for d in 1..=x.degree() {
        let part = x.homogeneous(d);
        if part.is_zero() {
            continue;
        }
        let table = projection_cache().get_or_insert_with(&(x.alphabet(), d), || {
            build_projection_table(x.alphabet(), d)
        });
        for (w, c) in part.terms() {
            for (l, a) in &table.images[w] {
                out.add_coord(l.clone(), &(a * c));
            }
        }
    }
    out
}

/// Sum over ordered partitions of the positions of `w` into `k` nonempty
/// blocks of the concatenated subwords, for every `k ≥ 1`.
fn ordered_partition_products(
    w: &Word,
    memo: &mut HashMap<Word, Vec<BTreeMap<Word, Q>>>,
) -> Vec<BTreeMap<Word, Q>> {
    if let Some(v) = memo.get(w) {
        return v.clone();
    }
    let n = w.len();
    // result[k-1] = Σ over partitions into k blocks
    let mut result: Vec<BTreeMap<Word, Q>> = vec![BTreeMap::new(); n.max(1)];
    if n > 0 {
        result[0].insert(w.clone(), Q::one());
        let full = (1u64 << n) - 1;
        for first in 1..full {
            let head = w.subword(first);
            let tail = w.subword(full ^ first);
            let sub = ordered_partition_products(&tail, memo);
            for (k, terms) in sub.iter().enumerate() {
                for (t, c) in terms {
                    *result[k + 1].entry(head.concat(t)).or_insert_with(Q::zero) += c;
                }
            }
        }
    }
    memo.insert(w.clone(), result.clone());
    result
}

/// The Eulerian idempotent `e₁ = Σ_k ((-1)^{k-1}/k) m^{(k-1)} ∘ π^{⊗k} ∘ Δ^{(k-1)}`,
/// the convolution logarithm of the identity.
pub fn eulerian_projection(x: &Series) -> Series {
    let mut out = Series::zero(x.alphabet(), x.degree());
    let mut memo = HashMap::new();
    for (w, c) in x.terms() {
        if w.is_empty() {
            continue;
        }
        let parts = ordered_partition_products(w, &mut memo);
        for (k, terms) in parts.iter().enumerate() {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            let weight = Q::new(sign.into(), ((k + 1) as i64).into()) * c;
            for (t, a) in terms {
                out.add_term(t.clone(), &(a * &weight));
            }
        }
    }
    out
}

/// Membership test for `f_n`: `Δ(X) = X ⊗ 1 + 1 ⊗ X`.
pub fn is_primitive<C: Coefficient>(x: &Series<C>) -> bool {
    x.is_primitive()
}

/// Rank of the bracketings `P_l` of all Lyndon words of one degree, viewed
/// as vectors in the word basis. Equals the Witt dimension iff they are
/// linearly independent.
pub fn bracketing_rank(alphabet: usize, degree: usize) -> usize {
    let basis = lyndon_basis(alphabet, degree);
    let words = Word::all_of_length(alphabet, degree);
    let index: HashMap<&Word, usize> = words.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let rows: Vec<Vec<BigInt>> = basis
        .iter()
        .map(|l| {
            let mut row = vec![BigInt::zero(); words.len()];
            for (w, c) in bracket_expansion(l).iter() {
                row[index[w]] = c.to_integer();
            }
            row
        })
        .collect();
    linalg::rank(&rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{q, qi};

    fn lw(v: &[u8]) -> LyndonWord {
        LyndonWord::new(Word::from(v)).unwrap()
    }

    fn w(v: &[u8]) -> Word {
        Word::from(v)
    }

    #[test]
    fn lyndon_basis_examples() {
        assert_eq!(lyndon_basis(2, 1), vec![lw(&[0]), lw(&[1])]);
        assert_eq!(lyndon_basis(2, 2), vec![lw(&[0, 1])]);
        assert_eq!(lyndon_basis(2, 5).len(), 6);
        assert_eq!(witt_dimension(2, 5), 6);
        assert_eq!(witt_dimension(2, 2), 1);
    }

    #[test]
    fn lyndon_predicate() {
        assert!(is_lyndon(&[0, 0, 1]));
        assert!(is_lyndon(&[0, 1, 1]));
        assert!(!is_lyndon(&[0, 1, 0]));
        assert!(!is_lyndon(&[0, 0]));
        assert!(!is_lyndon(&[]));
        assert!(LyndonWord::new(w(&[1, 0])).is_err());
    }

    #[test]
    fn standard_factorization_takes_longest_suffix() {
        // 0101 is periodic and 101 is not Lyndon, so the suffix is 01.
        let (u, v) = lw(&[0, 0, 1, 0, 1]).standard_factorization().unwrap();
        assert_eq!((u, v), (lw(&[0, 0, 1]), lw(&[0, 1])));
        assert!(lw(&[1]).standard_factorization().is_none());
    }

    #[test]
    fn bracketing_examples() {
        assert_eq!(bracketing(&lw(&[0]), 2), Series::generator(2, 1, 0));
        let b01 = Series::from_terms(2, 2, [(w(&[0, 1]), qi(1)), (w(&[1, 0]), qi(-1))]).unwrap();
        assert_eq!(bracketing(&lw(&[0, 1]), 2), b01);
        // [x0,[x0,x1]] = x0x0x1 - 2 x0x1x0 + x1x0x0
        let b001 = Series::from_terms(
            2,
            3,
            [
                (w(&[0, 0, 1]), qi(1)),
                (w(&[0, 1, 0]), qi(-2)),
                (w(&[1, 0, 0]), qi(1)),
            ],
        )
        .unwrap();
        assert_eq!(bracketing(&lw(&[0, 0, 1]), 2), b001);
    }

    #[test]
    fn symmetrize_examples() {
        let m1 = PbwMonomial::new(vec![lw(&[0, 1])]);
        assert_eq!(symmetrize(&m1, 2), bracketing(&lw(&[0, 1]), 2));
        let m2 = PbwMonomial::new(vec![lw(&[0]), lw(&[0])]);
        assert_eq!(
            symmetrize(&m2, 2),
            Series::monomial(2, 2, w(&[0, 0]), qi(1))
        );
        let m3 = PbwMonomial::new(vec![lw(&[0]), lw(&[1])]);
        let expected =
            Series::from_terms(2, 2, [(w(&[0, 1]), q(1, 2)), (w(&[1, 0]), q(1, 2))]).unwrap();
        assert_eq!(symmetrize(&m3, 2), expected);
    }

    #[test]
    fn projection_examples() {
        let x0 = Series::generator(2, 2, 0);
        let p = lie_project_p(&x0);
        assert_eq!(p.expand(), x0);
        assert!(lie_project_p(&Series::monomial(2, 2, w(&[0, 0]), qi(1))).is_zero());
        let p01 = lie_project_p(&Series::monomial(2, 2, w(&[0, 1]), qi(1)));
        assert_eq!(p01.coeff(&lw(&[0, 1])), q(1, 2));
        assert_eq!(p01.len(), 1);
        assert!(lie_project_p(&Series::one(2, 3)).is_zero());
    }

    #[test]
    fn eulerian_examples() {
        let x0 = Series::generator(2, 2, 0);
        assert_eq!(eulerian_projection(&x0), x0);
        let e = eulerian_projection(&Series::monomial(2, 2, w(&[0, 1]), qi(1)));
        assert_eq!(e, bracketing(&lw(&[0, 1]), 2).scale(&q(1, 2)));
        assert!(eulerian_projection(&Series::one(2, 2)).is_zero());
    }

    #[test]
    fn primitive_examples() {
        assert!(is_primitive(&Series::<Q>::generator(2, 3, 0)));
        assert!(is_primitive(&bracketing(&lw(&[0, 1]), 2).with_degree(3)));
        assert!(!is_primitive(&Series::monomial(2, 3, w(&[0, 1]), qi(1))));
    }

    #[test]
    fn decompose_rejects_non_lie() {
        let s = Series::monomial(2, 2, w(&[0, 1]), qi(1));
        assert!(LieElement::from_series(&s).is_err());
        let b = bracketing(&lw(&[0, 0, 1]), 2);
        let l = LieElement::from_series(&b).unwrap();
        assert_eq!(l.len(), 1);
        assert_eq!(l.coeff(&lw(&[0, 0, 1])), qi(1));
    }

    #[test]
    fn brackets_are_independent() {
        for d in 1..=6 {
            assert_eq!(bracketing_rank(2, d) as u64, witt_dimension(2, d));
        }
    }
}
