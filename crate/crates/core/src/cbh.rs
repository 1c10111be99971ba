//! The multilinear Campbell–Baker–Hausdorff polynomials `CBH_k` and the
//! linear map `cbh_n : F_n → f_n` sending `x_{i_1}⋯x_{i_k}` to
//! `CBH_k(x_{i_1}, …, x_{i_k})` and `1` to `0`.

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use rayon::prelude::*;

use crate::coeff::{Coefficient, Q};
use crate::error::{Error, Result};
use crate::lie::LieElement;
use crate::memo::Memo;
use crate::series::Series;
use crate::word::Word;

/// `CBH_k(y_1, …, y_k)` in Lyndon coordinates and as a sum over permutation words.
pub struct CbhEntry {
    pub lie: LieElement,
    /// `(π, c_π)` with `CBH_k = Σ c_π y_{π(1)} ⋯ y_{π(k)}`.
    pub expansion: Vec<(Vec<u8>, Q)>,
}

fn cbh_table() -> &'static Memo<usize, CbhEntry> {
    static TABLE: OnceLock<Memo<usize, CbhEntry>> = OnceLock::new();
    TABLE.get_or_init(Memo::new)
}

fn letter_mask(w: &Word) -> Option<u32> {
    let mut m = 0u32;
    for &l in w.letters() {
        let bit = 1u32 << l;
        if m & bit != 0 {
            return None;
        }
        m |= bit;
    }
    Some(m)
}

/// Product in `F_k` modulo the two-sided ideal spanned by words with a
/// repeated letter. The multilinear part of any product is unaffected.
fn product_mod_repeats(a: &Series, b: &Series) -> Series {
    let bs: Vec<(u32, &Word, &Q)> = b
        .terms()
        .filter_map(|(w, c)| letter_mask(w).map(|m| (m, w, c)))
        .collect();
    let mut out = Series::zero(a.alphabet(), a.degree());
    for (u, x) in a.terms() {
        let Some(mu) = letter_mask(u) else { continue };
        for &(mv, v, y) in &bs {
            if mu & mv == 0 {
                out.add_term(u.concat(v), &(x * y));
            }
        }
    }
    out
}

fn reduce(s: &Series) -> Series {
    s.filter(|w| letter_mask(w).is_some())
}

fn compute_entry(k: usize) -> CbhEntry {
    let one = Series::one(k, k);
    // exp(y_1) ⋯ exp(y_k), computed with truncated exponentials.
    let mut prod = one.clone();
    for i in 0..k {
        let e = Series::generator(k, k, i as u8)
            .exp()
            .expect("generator has no constant term");
        prod = product_mod_repeats(&prod, &reduce(&e));
    }
    // log(X) = Σ (-1)^{j-1} (X-1)^j / j
    let x = &prod - &one;
    let mut log = Series::zero(k, k);
    let mut power = one;
    for j in 1..=k {
        power = product_mod_repeats(&power, &x);
        let sign = if j % 2 == 1 { 1 } else { -1 };
        log = &log + &power.scale(&Q::new(sign.into(), (j as i64).into()));
    }
    let multilinear = log
        .multidegree_component(&vec![1; k])
        .expect("multidegree has alphabet length");
    let lie = LieElement::from_series(&multilinear)
        .expect("the multilinear part of a logarithm of group-likes is Lie");
    let expansion = multilinear
        .terms()
        .map(|(w, c)| (w.letters().to_vec(), c.clone()))
        .collect();
    CbhEntry { lie, expansion }
}

/// The table entry for arity `k`, computed once per process.
pub fn cbh_entry(k: usize) -> Arc<CbhEntry> {
    assert!(k >= 1, "CBH_k needs k ≥ 1");
    assert!(k <= 16, "arity {k} exceeds the supported range");
    cbh_table().get_or_insert_with(&k, || compute_entry(k))
}

/// `CBH_k(y_1, …, y_k)` as a Lie element on `k` letters, truncated at degree `k`.
pub fn cbh_multilinear(k: usize) -> LieElement {
    cbh_entry(k).lie.clone()
}

/// `cbh_n(X)` expanded as a series in `F_n`.
pub fn cbh_map_series<C: Coefficient>(x: &Series<C>) -> Series<C> {
    let alphabet = x.alphabet();
    let degree = x.degree();
    // Substitution preserves letter content, so blocks of equal content are independent.
    let mut blocks: BTreeMap<Vec<usize>, Vec<(&Word, &C)>> = BTreeMap::new();
    for (w, c) in x.terms().filter(|(w, _)| !w.is_empty()) {
        blocks
            .entry(w.multidegree(alphabet))
            .or_default()
            .push((w, c));
    }
    let mut coeffs: BTreeMap<usize, Vec<C>> = BTreeMap::new();
    for len in blocks.keys().map(|md| md.iter().sum::<usize>()) {
        coeffs.entry(len).or_insert_with(|| {
            cbh_entry(len)
                .expansion
                .iter()
                .map(|(_, c)| C::from_q(c))
                .collect()
        });
    }
    let partials: Vec<Series<C>> = blocks
        .into_par_iter()
        .map(|(md, words)| {
            let k: usize = md.iter().sum();
            let entry = cbh_entry(k);
            let cs = &coeffs[&k];
            let mut acc: BTreeMap<Word, C> = BTreeMap::new();
            for (w, c) in words {
                let letters = w.letters();
                for ((perm, _), a) in entry.expansion.iter().zip(cs) {
                    let target = Word::new(perm.iter().map(|&p| letters[p as usize]).collect());
                    *acc.entry(target).or_insert_with(C::zero) += &a.mul_ref(c);
                }
            }
            Series::from_terms(alphabet, degree, acc).expect("substitution stays in the algebra")
        })
        .collect();
    partials
        .into_iter()
        .fold(Series::zero(alphabet, degree), |a, b| &a + &b)
}

/// `cbh_n(X)` in Lyndon coordinates.
///
/// The result is Lie by construction; float input only introduces rounding
/// noise outside the Lyndon span, which is discarded.
pub fn cbh_map<C: Coefficient>(x: &Series<C>) -> LieElement<C> {
    LieElement::decompose(&cbh_map_series(x)).0
}

/// `log X` computed as `cbh_n(X)`, after checking that `X` is group-like.
pub fn log_via_cbh(x: &Series) -> Result<LieElement> {
    if let Some(((u, v), lhs, rhs)) = x.grouplike_defect() {
        return Err(Error::NotGroupLike {
            left: u.into_letters(),
            right: v.into_letters(),
            coproduct: lhs.to_string(),
            product: rhs.to_string(),
        });
    }
    Ok(cbh_map(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{q, qi};
    use crate::lie::{bracketing, LyndonWord};

    fn lw(v: &[u8]) -> LyndonWord {
        LyndonWord::new(Word::from(v)).unwrap()
    }

    #[test]
    fn low_arity_values() {
        let c1 = cbh_multilinear(1);
        assert_eq!(c1.expand(), Series::generator(1, 1, 0));
        let c2 = cbh_multilinear(2);
        assert_eq!(c2.len(), 1);
        assert_eq!(c2.coeff(&lw(&[0, 1])), q(1, 2));
    }

    #[test]
    fn arity_three_is_multilinear_and_primitive() {
        let c3 = cbh_multilinear(3).expand();
        assert!(c3.is_primitive());
        assert!(c3.terms().all(|(w, _)| w.multidegree(3) == vec![1, 1, 1]));
        // Hand expansion of Σ (-1)^{j-1}/j (X-1)^j with X-1 = Σ increasing words:
        // abc = 1 - 2/2 + 1/3, cba = 1/3, one-descent words = -1/2 + 1/3.
        assert_eq!(c3.coeff(&Word::from(&[0u8, 1, 2][..])), q(1, 3));
        assert_eq!(c3.coeff(&Word::from(&[2u8, 1, 0][..])), q(1, 3));
        assert_eq!(c3.coeff(&Word::from(&[1u8, 0, 2][..])), q(-1, 6));
    }

    #[test]
    fn cbh_map_examples() {
        assert!(cbh_map(&Series::<Q>::one(2, 3)).is_zero());
        let m01 = Series::monomial(2, 2, Word::from(&[0u8, 1][..]), qi(1));
        let l = cbh_map(&m01);
        assert_eq!(l.expand(), bracketing(&lw(&[0, 1]), 2).scale(&q(1, 2)));
        let m00 = Series::monomial(2, 2, Word::from(&[0u8, 0][..]), qi(1));
        assert!(cbh_map(&m00).is_zero());
    }

    #[test]
    fn log_via_cbh_examples() {
        let x0 = Series::<Q>::generator(2, 4, 0);
        assert_eq!(log_via_cbh(&x0.exp().unwrap()).unwrap().expand(), x0);
        let g = x0.with_degree(2).exp().unwrap() * Series::generator(2, 2, 1).exp().unwrap();
        let l = log_via_cbh(&g).unwrap();
        assert_eq!(l.coeff(&lw(&[0])), qi(1));
        assert_eq!(l.coeff(&lw(&[1])), qi(1));
        assert_eq!(l.coeff(&lw(&[0, 1])), q(1, 2));
        assert_eq!(l.len(), 3);
    }

    #[test]
    fn non_grouplike_is_rejected_with_coefficient() {
        let bad = &Series::one(2, 3) + &Series::monomial(2, 3, Word::from(&[0u8, 1][..]), qi(1));
        match log_via_cbh(&bad) {
            Err(Error::NotGroupLike {
                left,
                right,
                coproduct,
                product,
            }) => {
                assert_eq!((left, right), (vec![0], vec![1]));
                assert_eq!((coproduct.as_str(), product.as_str()), ("1", "0"));
            }
            other => panic!("expected NotGroupLike, got {other:?}"),
        }
    }
}
