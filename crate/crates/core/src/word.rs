//! Words over a finite alphabet `{0, …, n-1}`.

use std::cmp::Ordering;
use std::fmt;

/// A word in the free monoid on `n` letters.
///
/// Words are ordered first by length, then lexicographically, so a sorted
/// map of words iterates degree by degree.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: Vec<u8>) -> Self {
        Word(letters)
    }

    pub fn letter(i: u8) -> Self {
        Word(vec![i])
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<u8> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Largest letter index plus one, or zero for the empty word.
    pub fn min_alphabet(&self) -> usize {
        self.0.iter().map(|&l| l as usize + 1).max().unwrap_or(0)
    }

    /// Number of occurrences of each letter, as a vector of length `alphabet`.
    pub fn multidegree(&self, alphabet: usize) -> Vec<usize> {
        let mut d = vec![0; alphabet];
        for &l in &self.0 {
            d[l as usize] += 1;
        }
        d
    }

    /// The subword at the positions whose bit is set in `mask`.
    pub fn subword(&self, mask: u64) -> Word {
        Word(
            self.0
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &l)| l)
                .collect(),
        )
    }

    /// Plain lexicographic comparison, ignoring length first.
    pub fn lex_cmp(&self, other: &Word) -> Ordering {
        self.0.cmp(&other.0)
    }

    /// All words of length exactly `len` over `alphabet` letters, in lexicographic order.
    pub fn all_of_length(alphabet: usize, len: usize) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        for _ in 0..len {
            let mut next = Vec::with_capacity(out.len() * alphabet);
            for w in &out {
                for a in 0..alphabet {
                    let mut v = w.0.clone();
                    v.push(a as u8);
                    next.push(Word(v));
                }
            }
            out = next;
        }
        out
    }

    /// All words of length at most `max_len`, sorted by (length, lex).
    pub fn all_up_to(alphabet: usize, max_len: usize) -> Vec<Word> {
        (0..=max_len)
            .flat_map(|d| Word::all_of_length(alphabet, d))
            .collect()
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<Vec<u8>> for Word {
    fn from(v: Vec<u8>) -> Self {
        Word(v)
    }
}

impl From<&[u8]> for Word {
    fn from(v: &[u8]) -> Self {
        Word(v.to_vec())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "·")?;
            }
            write!(f, "x{l}")?;
        }
        Ok(())
    }
}
