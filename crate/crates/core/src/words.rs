//! Words over a finite alphabet and depth-first enumeration of their
//! products.
//!
//! A word `(i_1, ..., i_n)` denotes the product `A_{i_n} ... A_{i_1}`: the
//! first letter acts first. Enumeration walks the word tree depth first in
//! lexicographic order and caches the product of every prefix, so each
//! extension costs one multiplication and memory stays proportional to the
//! depth.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::ops::Range;

use crate::error::{Error, Result};

/// Finite index sequence into an alphabet; never empty.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    indices: Vec<usize>,
}

impl Word {
    pub fn new(indices: Vec<usize>, alphabet_len: usize) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::Validation("a word has length at least 1".into()));
        }
        if let Some(&index) = indices.iter().find(|&&i| i >= alphabet_len) {
            return Err(Error::IndexOutOfRange { index, len: alphabet_len });
        }
        Ok(Word { indices })
    }

    pub(crate) fn from_indices_unchecked(indices: Vec<usize>) -> Self {
        Word { indices }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.indices.len()
    }
}

/// A finite alphabet whose letters multiply.
pub trait WordAlphabet {
    type Elem: Clone;

    fn size(&self) -> usize;

    fn letter(&self, i: usize) -> Self::Elem;

    /// `letter * prefix`: the new letter acts after the prefix.
    fn append(&self, prefix: &Self::Elem, letter: usize) -> Self::Elem;

    /// Exact zero elements absorb every extension.
    fn is_zero(&self, _elem: &Self::Elem) -> bool {
        false
    }

    fn product(&self, word: &Word) -> Result<Self::Elem> {
        let len = self.size();
        if let Some(&index) = word.indices().iter().find(|&&i| i >= len) {
            return Err(Error::IndexOutOfRange { index, len });
        }
        let mut it = word.indices().iter();
        let first = *it.next().expect("words are nonempty");
        Ok(it.fold(self.letter(first), |acc, &i| self.append(&acc, i)))
    }

    /// Products of every prefix, `prefixes[j]` being the first `j + 1` letters.
    fn prefix_products(&self, word: &Word) -> Result<Vec<Self::Elem>> {
        let len = self.size();
        if let Some(&index) = word.indices().iter().find(|&&i| i >= len) {
            return Err(Error::IndexOutOfRange { index, len });
        }
        let mut out: Vec<Self::Elem> = Vec::with_capacity(word.len());
        for &i in word.indices() {
            let next = match out.last() {
                None => self.letter(i),
                Some(prev) => self.append(prev, i),
            };
            out.push(next);
        }
        Ok(out)
    }
}

pub trait WordVisitor<E> {
    /// Called once per word of length `1..=depth` in lexicographic order.
    fn visit(&mut self, word: &[usize], elem: &E);

    /// Called instead of descending below a zero product at `prefix`;
    /// every extension up to `depth` is zero as well.
    fn zero_subtree(&mut self, _prefix: &[usize], _depth: usize) {}
}

/// Number of complete levels whose words fit in `budget` products.
pub fn levels_within_budget(alphabet_size: usize, n_max: usize, budget: u64) -> usize {
    let mut total: u64 = 0;
    let mut level: u64 = 1;
    for n in 1..=n_max {
        level = level.saturating_mul(alphabet_size as u64);
        total = total.saturating_add(level);
        if total > budget {
            return n - 1;
        }
    }
    n_max
}

/// Depth-first walk over all words of length `1..=depth` whose first letter
/// lies in `first_letters`. Splitting `first_letters` gives disjoint
/// subtrees that can be walked independently and merged.
pub fn for_each_word<A, V>(alphabet: &A, depth: usize, first_letters: Range<usize>, visitor: &mut V)
where
    A: WordAlphabet,
    V: WordVisitor<A::Elem>,
{
    if depth == 0 {
        return;
    }
    let mut word = Vec::with_capacity(depth);
    for first in first_letters {
        let elem = alphabet.letter(first);
        word.push(first);
        descend(alphabet, depth, &mut word, &elem, visitor);
        word.pop();
    }
}

fn descend<A, V>(alphabet: &A, depth: usize, word: &mut Vec<usize>, elem: &A::Elem, visitor: &mut V)
where
    A: WordAlphabet,
    V: WordVisitor<A::Elem>,
{
    visitor.visit(word, elem);
    if word.len() == depth {
        return;
    }
    if alphabet.is_zero(elem) {
        visitor.zero_subtree(word, depth);
        return;
    }
    for letter in 0..alphabet.size() {
        let next = alphabet.append(elem, letter);
        word.push(letter);
        descend(alphabet, depth, word, &next, visitor);
        word.pop();
    }
}

/// Best value seen at one level together with the word attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelBest {
    pub value: f64,
    pub word: Vec<usize>,
}

impl LevelBest {
    /// Larger value wins; ties go to the lexicographically least word. The
    /// rule is associative and commutative, so merge order does not matter.
    fn beats(&self, other: &LevelBest) -> bool {
        match self.value.partial_cmp(&other.value) {
            Some(Ordering::Greater) => true,
            Some(Ordering::Less) => false,
            _ => self.word < other.word,
        }
    }
}

/// Per-level maxima, indexed by word length minus one.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelMax {
    levels: Vec<Option<LevelBest>>,
}

impl LevelMax {
    pub fn new(depth: usize) -> Self {
        LevelMax { levels: alloc::vec![None; depth] }
    }

    pub fn offer(&mut self, word: &[usize], value: f64) {
        let slot = &mut self.levels[word.len() - 1];
        match slot {
            Some(best) if best.value > value => {}
            Some(best) if best.value == value && best.word.as_slice() <= word => {}
            _ => *slot = Some(LevelBest { value, word: word.to_vec() }),
        }
    }

    /// Offers `value` at every level below `prefix` down to `depth`, with the
    /// lexicographically least extension (`prefix` followed by zeros).
    pub fn offer_subtree(&mut self, prefix: &[usize], depth: usize, value: f64) {
        let mut word = prefix.to_vec();
        while word.len() < depth {
            word.push(0);
            self.offer(&word, value);
        }
    }

    pub fn merge(&mut self, other: &LevelMax) {
        for (mine, theirs) in self.levels.iter_mut().zip(&other.levels) {
            if let Some(t) = theirs {
                match mine {
                    Some(m) if !t.beats(m) => {}
                    _ => *mine = Some(t.clone()),
                }
            }
        }
    }

    pub fn levels(&self) -> &[Option<LevelBest>] {
        &self.levels
    }

    pub fn values(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.as_ref().map_or(0.0, |b| b.value)).collect()
    }

    pub fn words(&self) -> Vec<Word> {
        self.levels
            .iter()
            .map(|l| Word::from_indices_unchecked(l.as_ref().map(|b| b.word.clone()).unwrap_or_default()))
            .collect()
    }
}
