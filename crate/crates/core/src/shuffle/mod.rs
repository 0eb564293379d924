//! Shuffle-product membership.
//!
//! A target word `t` is in the shuffle of `s_1, ..., s_m` when its letters
//! can be partitioned among the sources so that each source is read left to
//! right. Positions are 0-based in memory; the JSON witness format uses
//! 1-based `[source, letter, target]` triples.

mod reduction;
mod solve;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub use reduction::{
    block_offsets, reduce_nnccm_to_shuffle, run_from_witness, witness_from_run, ReductionError,
    ReductionMeta,
};
pub use solve::{brute_shuffle, shuffle_dp};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Word(Vec<char>);

impl Word {
    pub fn new(letters: Vec<char>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Concatenation of `(letter, count)` runs.
    pub fn from_runs<I: IntoIterator<Item = (char, usize)>>(runs: I) -> Self {
        let mut letters = Vec::new();
        for (c, len) in runs {
            letters.extend(std::iter::repeat_n(c, len));
        }
        Word(letters)
    }

    pub fn letters(&self) -> &[char] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count(&self, letter: char) -> usize {
        self.0.iter().filter(|&&c| c == letter).count()
    }

    /// Maximal single-letter runs as `(letter, start, len)`.
    pub fn blocks(&self) -> Vec<Block> {
        let mut out: Vec<Block> = Vec::new();
        for (pos, &c) in self.0.iter().enumerate() {
            match out.last_mut() {
                Some(b) if b.letter == c => b.len += 1,
                _ => out.push(Block {
                    letter: c,
                    start: pos,
                    len: 1,
                }),
            }
        }
        out
    }

    /// The single letter of a nonempty uniform word.
    pub fn uniform_letter(&self) -> Option<char> {
        let first = *self.0.first()?;
        self.0.iter().all(|&c| c == first).then_some(first)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Block {
    pub letter: char,
    pub start: usize,
    pub len: usize,
}

impl Block {
    pub fn end(&self) -> usize {
        self.start + self.len
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.0 {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(Word(s.chars().collect()))
    }
}

impl From<&str> for Word {
    fn from(s: &str) -> Self {
        Word(s.chars().collect())
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Ok(Word::from(s.as_str()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShuffleInstance {
    pub sources: Vec<Word>,
    pub target: Word,
}

impl ShuffleInstance {
    pub fn new(sources: Vec<Word>, target: Word) -> Self {
        ShuffleInstance { sources, target }
    }

    pub fn from_strs(sources: &[&str], target: &str) -> Self {
        ShuffleInstance {
            sources: sources.iter().map(|s| Word::from(*s)).collect(),
            target: Word::from(target),
        }
    }

    /// Letters occurring anywhere in the instance, sorted.
    pub fn alphabet(&self) -> Vec<char> {
        let set: BTreeSet<char> = self
            .sources
            .iter()
            .chain(std::iter::once(&self.target))
            .flat_map(|w| w.letters().iter().copied())
            .collect();
        set.into_iter().collect()
    }

    pub fn source_len(&self) -> usize {
        self.sources.iter().map(Word::len).sum()
    }
}

/// `assignment[i][p]` is the target position of letter `p` of source `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterleavingWitness {
    pub assignment: Vec<Vec<usize>>,
}

impl InterleavingWitness {
    pub fn triples(&self) -> Vec<[usize; 3]> {
        let mut out = Vec::new();
        for (i, positions) in self.assignment.iter().enumerate() {
            for (p, &t) in positions.iter().enumerate() {
                out.push([i + 1, p + 1, t + 1]);
            }
        }
        out
    }

    /// Rebuilds a witness from 1-based triples. Every `(source, letter)`
    /// pair up to the largest mentioned must be present exactly once.
    pub fn from_triples(triples: &[[usize; 3]]) -> Result<Self, WitnessError> {
        let sources = triples.iter().map(|t| t[0]).max().unwrap_or(0);
        let mut slots: Vec<Vec<Option<usize>>> = vec![Vec::new(); sources];
        for &[i, p, t] in triples {
            if i == 0 || p == 0 || t == 0 {
                return Err(WitnessError::ZeroIndex);
            }
            let row = &mut slots[i - 1];
            if row.len() < p {
                row.resize(p, None);
            }
            if row[p - 1].replace(t - 1).is_some() {
                return Err(WitnessError::DuplicatePair { word: i, letter: p });
            }
        }
        let assignment = slots
            .into_iter()
            .enumerate()
            .map(|(i, row)| {
                row.into_iter()
                    .enumerate()
                    .map(|(p, t)| t.ok_or(WitnessError::MissingPair { word: i + 1, letter: p + 1 }))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(InterleavingWitness { assignment })
    }
}

impl Serialize for InterleavingWitness {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.triples().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for InterleavingWitness {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let triples = Vec::<[usize; 3]>::deserialize(deserializer)?;
        InterleavingWitness::from_triples(&triples).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WitnessError {
    #[error("witness covers {got} sources, instance has {expected}")]
    SourceCount { got: usize, expected: usize },
    #[error("source {word}: witness covers {got} letters, word has {expected}")]
    SourceLength {
        word: usize,
        got: usize,
        expected: usize,
    },
    #[error("source {word} letter {letter}: target position {position} beyond |t| = {target_len}")]
    OutOfRange {
        word: usize,
        letter: usize,
        position: usize,
        target_len: usize,
    },
    #[error("triples use 1-based indices; got a zero")]
    ZeroIndex,
    #[error("pair (source {word}, letter {letter}) assigned twice")]
    DuplicatePair { word: usize, letter: usize },
    #[error("pair (source {word}, letter {letter}) has no assignment")]
    MissingPair { word: usize, letter: usize },
}

/// Checks bijectivity, per-source monotonicity and letter agreement.
/// Shape problems and out-of-range targets are errors; a well-shaped map that
/// violates the interleaving conditions yields `Ok(false)`.
pub fn verify_witness(inst: &ShuffleInstance, w: &InterleavingWitness) -> Result<bool, WitnessError> {
    if w.assignment.len() != inst.sources.len() {
        return Err(WitnessError::SourceCount {
            got: w.assignment.len(),
            expected: inst.sources.len(),
        });
    }
    let t = inst.target.letters();
    for (i, (positions, word)) in w.assignment.iter().zip(&inst.sources).enumerate() {
        if positions.len() != word.len() {
            return Err(WitnessError::SourceLength {
                word: i + 1,
                got: positions.len(),
                expected: word.len(),
            });
        }
        if let Some((p, &pos)) = positions.iter().enumerate().find(|(_, &pos)| pos >= t.len()) {
            return Err(WitnessError::OutOfRange {
                word: i + 1,
                letter: p + 1,
                position: pos + 1,
                target_len: t.len(),
            });
        }
    }
    if inst.source_len() != t.len() {
        return Ok(false);
    }
    let mut used = vec![false; t.len()];
    for (positions, word) in w.assignment.iter().zip(&inst.sources) {
        if positions.windows(2).any(|p| p[0] >= p[1]) {
            return Ok(false);
        }
        for (&pos, &letter) in positions.iter().zip(word.letters()) {
            if t[pos] != letter || std::mem::replace(&mut used[pos], true) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Random instance over `alphabet`. Half the time the target is a genuine
/// interleaving of the sources, otherwise a random permutation of their
/// letters (membership then mostly fails).
pub fn random_instance<R: Rng + ?Sized>(
    rng: &mut R,
    alphabet: &[char],
    sources: usize,
    max_total: usize,
) -> ShuffleInstance {
    let mut words: Vec<Vec<char>> = vec![Vec::new(); sources];
    let total = rng.gen_range(0..=max_total);
    for _ in 0..total {
        let i = rng.gen_range(0..sources);
        words[i].push(alphabet[rng.gen_range(0..alphabet.len())]);
    }
    let mut target = Vec::with_capacity(total);
    if rng.gen_bool(0.5) {
        let mut cursor = vec![0usize; sources];
        while target.len() < total {
            let i = rng.gen_range(0..sources);
            if cursor[i] < words[i].len() {
                target.push(words[i][cursor[i]]);
                cursor[i] += 1;
            }
        }
    } else {
        target = words.iter().flatten().copied().collect();
        for i in (1..target.len()).rev() {
            target.swap(i, rng.gen_range(0..=i));
        }
    }
    ShuffleInstance {
        sources: words.into_iter().map(Word::new).collect(),
        target: Word::new(target),
    }
}
