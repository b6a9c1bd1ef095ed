//! Free graded noncommutative words in the generators `x_i`.

use std::cmp::Ordering;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A monomial of the free algebra, stored as generator indices.
///
/// Ordered by length first, then lexicographically.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<u16>);

impl Word {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn letter(i: usize) -> Self {
        Self(vec![i as u16])
    }

    pub fn from_letters<I: IntoIterator<Item = usize>>(it: I) -> Self {
        Self(it.into_iter().map(|i| i as u16).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|&i| i as usize)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// `prefix · middle · suffix` where `prefix = self[..at]`, `suffix = self[at+1..]`.
    pub fn splice(&self, at: usize, middle: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + middle.len());
        v.extend_from_slice(&self.0[..at]);
        v.extend_from_slice(&middle.0);
        v.extend_from_slice(&self.0[at + 1..]);
        Word(v)
    }

    pub fn split_at(&self, k: usize) -> (Word, Word) {
        (Word(self.0[..k].to_vec()), Word(self.0[k..].to_vec()))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

/// The generators `x_1, …, x_r` with their degrees.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generators {
    names: Vec<String>,
    degrees: Vec<i32>,
}

impl Generators {
    pub fn new(names: Vec<String>, degrees: Vec<i32>) -> Self {
        assert_eq!(names.len(), degrees.len());
        Self { names, degrees }
    }

    /// Generators dual to cohomology classes of the given degrees:
    /// `|x_i| = 1 - |e^i|`, named `x1, x2, …`.
    pub fn dual_to(class_degrees: &[i32]) -> Self {
        Self {
            names: (1..=class_degrees.len()).map(|i| format!("x{i}")).collect(),
            degrees: class_degrees.iter().map(|d| 1 - d).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn degree(&self, i: usize) -> i32 {
        self.degrees[i]
    }

    pub fn degrees(&self) -> &[i32] {
        &self.degrees
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn word_degree(&self, w: &Word) -> Result<i32> {
        w.letters().map(|i| self.degrees.get(i).copied().ok_or(Error::UnknownGenerator(i))).sum()
    }

    /// Degree of a word whose letters are known to be valid.
    pub(crate) fn deg(&self, w: &Word) -> i32 {
        w.letters().map(|i| self.degrees[i]).sum()
    }

    pub fn all_negative(&self) -> bool {
        self.degrees.iter().all(|&d| d <= -1)
    }

    pub fn format_word(&self, w: &Word) -> String {
        if w.is_empty() {
            return "1".into();
        }
        w.letters().map(|i| self.names[i].as_str()).collect::<Vec<_>>().join(" ")
    }

    /// All words of degree exactly `degree` and length at most `max_len`,
    /// in (length, lexicographic) order. Requires every generator to have
    /// negative degree so that the set is finite.
    pub fn words_of_degree(&self, degree: i32, max_len: usize) -> Vec<Word> {
        assert!(self.all_negative(), "word enumeration needs negatively graded generators");
        let mut memo: HashMap<(i32, usize), Vec<Word>> = HashMap::new();
        let mut out = self.enumerate(degree, max_len, &mut memo);
        out.sort();
        out
    }

    fn enumerate(&self, degree: i32, max_len: usize, memo: &mut HashMap<(i32, usize), Vec<Word>>) -> Vec<Word> {
        if degree == 0 {
            return vec![Word::empty()];
        }
        if degree > 0 || max_len == 0 {
            return Vec::new();
        }
        if let Some(v) = memo.get(&(degree, max_len)) {
            return v.clone();
        }
        let mut out = Vec::new();
        for (i, &g) in self.degrees.iter().enumerate() {
            for tail in self.enumerate(degree - g, max_len - 1, memo) {
                let mut v = Vec::with_capacity(tail.len() + 1);
                v.push(i as u16);
                v.extend_from_slice(&tail.0);
                out.push(Word(v));
            }
        }
        memo.insert((degree, max_len), out.clone());
        out
    }

    /// All words of length at most `max_len` (any degree), sorted.
    pub fn words_up_to_len(&self, max_len: usize) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        let mut layer = vec![Word::empty()];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for w in &layer {
                for i in 0..self.len() {
                    next.push(w.concat(&Word::letter(i)));
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out.sort();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cp(n: usize) -> Generators {
        Generators::dual_to(&(1..=n).map(|i| 2 * i as i32).collect::<Vec<_>>())
    }

    #[test]
    fn degrees() {
        let g = Generators::dual_to(&[3]);
        assert_eq!(g.word_degree(&Word::empty()).unwrap(), 0);
        assert_eq!(g.word_degree(&Word::letter(0)).unwrap(), -2);
        let g = cp(2);
        assert_eq!(g.word_degree(&Word::from_letters([0, 1])).unwrap(), -4);
        assert_eq!(g.word_degree(&Word::letter(5)), Err(Error::UnknownGenerator(5)));
    }

    #[test]
    fn ordering_is_length_then_lex() {
        let mut v = vec![Word::from_letters([1]), Word::from_letters([0, 0]), Word::empty(), Word::from_letters([0])];
        v.sort();
        assert_eq!(v, vec![Word::empty(), Word::from_letters([0]), Word::from_letters([1]), Word::from_letters([0, 0])]);
    }

    #[test]
    fn enumeration_matches_composition_count() {
        // Degrees -1, -3: number of words of degree -m is the number of
        // compositions of m into parts 1 and 3.
        let g = cp(2);
        let mut c = vec![0u64; 20];
        c[0] = 1;
        for m in 1..20 {
            c[m] = c[m - 1] + if m >= 3 { c[m - 3] } else { 0 };
        }
        for m in 0..20 {
            let ws = g.words_of_degree(-(m as i32), 64);
            assert_eq!(ws.len() as u64, c[m], "degree -{m}");
            assert!(ws.iter().all(|w| g.deg(w) == -(m as i32)));
        }
    }
}
