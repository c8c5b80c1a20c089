//! Subsets of the ground set `{0, .., n-1}` as fixed-width bit vectors.
//!
//! The canonical total order on sets is the numeric value of the bit vector,
//! so a strict subset always sorts strictly below its supersets. That order
//! is the final tie-breaking key of the agent's demand.

use std::cmp::Ordering;
use std::fmt;

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

/// A subset of a ground set of fixed size `n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ActionSet {
    n: usize,
    words: Box<[u64]>,
}

fn word_count(n: usize) -> usize {
    n.div_ceil(64)
}

impl ActionSet {
    pub fn empty(n: usize) -> Self {
        ActionSet {
            n,
            words: vec![0; word_count(n)].into_boxed_slice(),
        }
    }

    pub fn full(n: usize) -> Self {
        let mut set = ActionSet::empty(n);
        for i in 0..n {
            set.insert(i);
        }
        set
    }

    pub fn singleton(n: usize, index: usize) -> Self {
        let mut set = ActionSet::empty(n);
        set.insert(index);
        set
    }

    pub fn from_indices(n: usize, indices: &[usize]) -> Self {
        let mut set = ActionSet::empty(n);
        for &i in indices {
            set.insert(i);
        }
        set
    }

    /// Builds the set whose numeric value is `mask`. Requires `n <= 64`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        assert!(n <= 64, "mask constructor limited to 64 elements");
        assert!(n == 64 || mask < (1u64 << n), "mask outside ground set");
        let mut set = ActionSet::empty(n);
        if !set.words.is_empty() {
            set.words[0] = mask;
        }
        set
    }

    /// Numeric value of the bit vector. Requires `n <= 64`.
    pub fn to_mask(&self) -> u64 {
        assert!(self.n <= 64, "mask accessor limited to 64 elements");
        self.words.first().copied().unwrap_or(0)
    }

    /// Overwrites the set with the given mask in place. Requires `n <= 64`.
    pub fn set_mask(&mut self, mask: u64) {
        debug_assert!(self.n <= 64 && (self.n == 64 || mask < (1u64 << self.n)));
        if let Some(word) = self.words.first_mut() {
            *word = mask;
        }
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn contains(&self, index: usize) -> bool {
        assert!(
            index < self.n,
            "index {index} outside ground set of size {}",
            self.n
        );
        self.words[index / 64] & (1u64 << (index % 64)) != 0
    }

    pub fn insert(&mut self, index: usize) {
        assert!(
            index < self.n,
            "index {index} outside ground set of size {}",
            self.n
        );
        self.words[index / 64] |= 1u64 << (index % 64);
    }

    pub fn remove(&mut self, index: usize) {
        assert!(
            index < self.n,
            "index {index} outside ground set of size {}",
            self.n
        );
        self.words[index / 64] &= !(1u64 << (index % 64));
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn union(&self, other: &ActionSet) -> ActionSet {
        debug_assert_eq!(self.n, other.n);
        let words = self
            .words
            .iter()
            .zip(other.words.iter())
            .map(|(a, b)| a | b)
            .collect();
        ActionSet { n: self.n, words }
    }

    pub fn intersection(&self, other: &ActionSet) -> ActionSet {
        debug_assert_eq!(self.n, other.n);
        let words = self
            .words
            .iter()
            .zip(other.words.iter())
            .map(|(a, b)| a & b)
            .collect();
        ActionSet { n: self.n, words }
    }

    pub fn difference(&self, other: &ActionSet) -> ActionSet {
        debug_assert_eq!(self.n, other.n);
        let words = self
            .words
            .iter()
            .zip(other.words.iter())
            .map(|(a, b)| a & !b)
            .collect();
        ActionSet { n: self.n, words }
    }

    pub fn is_subset_of(&self, other: &ActionSet) -> bool {
        debug_assert_eq!(self.n, other.n);
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & !b == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&i| self.contains(i))
    }

    pub fn indices(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl PartialOrd for ActionSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ActionSet {
    fn cmp(&self, other: &Self) -> Ordering {
        debug_assert_eq!(self.n, other.n, "comparing sets over different ground sets");
        for (a, b) in self.words.iter().rev().zip(other.words.iter().rev()) {
            match a.cmp(b) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

impl fmt::Display for ActionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for ActionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for ActionSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let indices = self.indices();
        let mut seq = serializer.serialize_seq(Some(indices.len()))?;
        for i in indices {
            seq.serialize_element(&i)?;
        }
        seq.end()
    }
}
