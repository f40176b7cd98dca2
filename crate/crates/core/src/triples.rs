//! Index triples `i < j < k` and bitset-backed sets of them.
//!
//! Triples over `{0..=n}` are numbered in lexicographic order, so iterating
//! the bits of a [`TripleSet`] from low to high visits its members
//! lexicographically. A `u128` holds every triple for `n <= MAX_N`.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest ambient dimension whose triples fit in a [`TripleSet`].
pub const MAX_N: usize = 9;

/// A strictly increasing index triple, naming the coordinate plane `P(i,j,k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "[usize; 3]", try_from = "[usize; 3]")]
pub struct Triple {
    i: usize,
    j: usize,
    k: usize,
}

impl Triple {
    pub fn new(i: usize, j: usize, k: usize) -> Result<Self> {
        if i < j && j < k {
            Ok(Triple { i, j, k })
        } else {
            Err(Error::InvalidTriple(i, j, k))
        }
    }

    /// Builds the triple from three distinct indices in any order.
    pub fn sorted(a: usize, b: usize, c: usize) -> Result<Self> {
        let mut v = [a, b, c];
        v.sort_unstable();
        Triple::new(v[0], v[1], v[2])
    }

    pub fn indices(&self) -> [usize; 3] {
        [self.i, self.j, self.k]
    }

    pub fn i(&self) -> usize {
        self.i
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn contains(&self, x: usize) -> bool {
        self.i == x || self.j == x || self.k == x
    }

    /// Bitmask of the three indices.
    pub fn mask(&self) -> u32 {
        (1 << self.i) | (1 << self.j) | (1 << self.k)
    }
}

impl From<Triple> for [usize; 3] {
    fn from(t: Triple) -> Self {
        t.indices()
    }
}

impl TryFrom<[usize; 3]> for Triple {
    type Error = Error;

    fn try_from(v: [usize; 3]) -> Result<Self> {
        Triple::new(v[0], v[1], v[2])
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.i, self.j, self.k)
    }
}

/// Lexicographic numbering of the pairs and triples of `{0..=n}`.
#[derive(Debug)]
pub struct Layout {
    n: usize,
    triples: Vec<Triple>,
    triple_index: Vec<u8>,
    pairs: Vec<(usize, usize)>,
    pair_index: Vec<u8>,
}

impl Layout {
    fn build(n: usize) -> Self {
        let size = n + 1;
        let mut triples = Vec::new();
        let mut triple_index = vec![u8::MAX; size * size * size];
        for i in 0..size {
            for j in i + 1..size {
                for k in j + 1..size {
                    triple_index[(i * size + j) * size + k] = triples.len() as u8;
                    triples.push(Triple { i, j, k });
                }
            }
        }
        let mut pairs = Vec::new();
        let mut pair_index = vec![u8::MAX; size * size];
        for i in 0..size {
            for j in i + 1..size {
                pair_index[i * size + j] = pairs.len() as u8;
                pairs.push((i, j));
            }
        }
        Layout {
            n,
            triples,
            triple_index,
            pairs,
            pair_index,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn num_triples(&self) -> usize {
        self.triples.len()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn num_pairs(&self) -> usize {
        self.pairs.len()
    }

    /// Position of `t` in lexicographic order. `t` must lie in `{0..=n}`.
    pub fn triple_index(&self, t: Triple) -> usize {
        let s = self.n + 1;
        self.triple_index[(t.i * s + t.j) * s + t.k] as usize
    }

    /// Index of the sorted triple on three distinct indices.
    pub fn triple_index_unordered(&self, a: usize, b: usize, c: usize) -> usize {
        let mut v = [a, b, c];
        v.sort_unstable();
        let s = self.n + 1;
        self.triple_index[(v[0] * s + v[1]) * s + v[2]] as usize
    }

    /// Index of the pair `{a, b}` (`a != b`, any order).
    pub fn pair_index(&self, a: usize, b: usize) -> usize {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        self.pair_index[lo * (self.n + 1) + hi] as usize
    }
}

/// Cached layout for dimension `n`. Panics if `n > MAX_N`.
pub fn layout(n: usize) -> &'static Layout {
    static LAYOUTS: OnceLock<Vec<Layout>> = OnceLock::new();
    assert!(n <= MAX_N, "dimension {n} exceeds MAX_N = {MAX_N}");
    &LAYOUTS.get_or_init(|| (0..=MAX_N).map(Layout::build).collect())[n]
}

pub(crate) fn check_dimension(n: usize) -> Result<()> {
    if n > MAX_N {
        Err(Error::DimensionTooLarge { n, max: MAX_N })
    } else {
        Ok(())
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// A set of triples over `{0..=n}`, iterated lexicographically.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct TripleSet {
    n: usize,
    bits: u128,
}

impl TripleSet {
    pub fn empty(n: usize) -> Self {
        assert!(n <= MAX_N, "dimension {n} exceeds MAX_N = {MAX_N}");
        TripleSet { n, bits: 0 }
    }

    /// Every triple of `{0..=n}`.
    pub fn full(n: usize) -> Self {
        TripleSet {
            n,
            bits: full_mask(layout(n).num_triples()),
        }
    }

    pub fn from_bits(n: usize, bits: u128) -> Self {
        debug_assert_eq!(bits & !full_mask(layout(n).num_triples()), 0);
        TripleSet { n, bits }
    }

    pub fn from_triples<I: IntoIterator<Item = Triple>>(n: usize, triples: I) -> Result<Self> {
        check_dimension(n)?;
        let mut set = TripleSet::empty(n);
        for t in triples {
            set.insert(t)?;
        }
        Ok(set)
    }

    /// Convenience constructor from index arrays.
    pub fn from_arrays(n: usize, triples: &[[usize; 3]]) -> Result<Self> {
        let ts = triples
            .iter()
            .map(|&v| Triple::try_from(v))
            .collect::<Result<Vec<_>>>()?;
        TripleSet::from_triples(n, ts)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bits(&self) -> u128 {
        self.bits
    }

    pub fn insert(&mut self, t: Triple) -> Result<bool> {
        if t.k > self.n {
            return Err(Error::IndexOutOfRange {
                index: t.k,
                n: self.n,
            });
        }
        let bit = 1u128 << layout(self.n).triple_index(t);
        let fresh = self.bits & bit == 0;
        self.bits |= bit;
        Ok(fresh)
    }

    pub fn contains(&self, t: Triple) -> bool {
        t.k <= self.n && self.bits & (1u128 << layout(self.n).triple_index(t)) != 0
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = Triple> + '_ {
        let triples = layout(self.n).triples();
        BitIter(self.bits).map(move |idx| triples[idx])
    }

    pub fn to_vec(&self) -> Vec<Triple> {
        self.iter().collect()
    }

    pub fn union(&self, other: &TripleSet) -> TripleSet {
        debug_assert_eq!(self.n, other.n);
        TripleSet::from_bits(self.n, self.bits | other.bits)
    }

    pub fn intersection(&self, other: &TripleSet) -> TripleSet {
        debug_assert_eq!(self.n, other.n);
        TripleSet::from_bits(self.n, self.bits & other.bits)
    }

    pub fn difference(&self, other: &TripleSet) -> TripleSet {
        debug_assert_eq!(self.n, other.n);
        TripleSet::from_bits(self.n, self.bits & !other.bits)
    }

    /// All triples of `{0..=n}` not in `self`.
    pub fn complement(&self) -> TripleSet {
        TripleSet::from_bits(self.n, TripleSet::full(self.n).bits & !self.bits)
    }

    pub fn is_subset(&self, other: &TripleSet) -> bool {
        self.n == other.n && self.bits & !other.bits == 0
    }

    /// Triples all of whose indices lie in `mask`.
    pub fn restricted_to(&self, mask: u32) -> TripleSet {
        let bits = BitIter(self.bits)
            .filter(|&idx| {
                let m = layout(self.n).triples()[idx].mask();
                m & !mask == 0
            })
            .fold(0u128, |acc, idx| acc | (1u128 << idx));
        TripleSet::from_bits(self.n, bits)
    }

    /// Re-embeds the set in dimension `n`, mapping old index `a` to
    /// `mapping[a]`. The mapping must be injective.
    pub fn relabel(&self, n: usize, mapping: &[usize]) -> Result<TripleSet> {
        let mut out = TripleSet::empty(n);
        for t in self.iter() {
            let [a, b, c] = t.indices();
            let image = Triple::sorted(mapping[a], mapping[b], mapping[c])?;
            out.insert(image)?;
        }
        Ok(out)
    }
}

impl fmt::Debug for TripleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TripleSet(n={}, ", self.n)?;
        f.debug_set().entries(self.iter().map(|t| t.indices())).finish()?;
        write!(f, ")")
    }
}

impl fmt::Display for TripleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (pos, t) in self.iter().enumerate() {
            if pos > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Serialize, Deserialize)]
struct TripleSetRepr {
    n: usize,
    triples: Vec<Triple>,
}

impl Serialize for TripleSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        TripleSetRepr {
            n: self.n,
            triples: self.to_vec(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TripleSet {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = TripleSetRepr::deserialize(deserializer)?;
        TripleSet::from_triples(repr.n, repr.triples).map_err(serde::de::Error::custom)
    }
}

pub(crate) fn full_mask(len: usize) -> u128 {
    if len >= 128 {
        u128::MAX
    } else {
        (1u128 << len) - 1
    }
}

/// Iterates the positions of set bits, low to high.
pub(crate) struct BitIter(pub u128);

impl Iterator for BitIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let idx = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(idx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_is_lexicographic() {
        for n in 2..=MAX_N {
            let l = layout(n);
            assert_eq!(l.num_triples(), binomial(n + 1, 3));
            assert_eq!(l.num_pairs(), binomial(n + 1, 2));
            assert!(l.triples().windows(2).all(|w| w[0] < w[1]));
            for (idx, &t) in l.triples().iter().enumerate() {
                assert_eq!(l.triple_index(t), idx);
            }
        }
    }

    #[test]
    fn triple_rejects_unordered() {
        assert!(Triple::new(0, 2, 1).is_err());
        assert!(Triple::new(1, 1, 2).is_err());
        assert_eq!(Triple::sorted(4, 0, 2).unwrap(), Triple::new(0, 2, 4).unwrap());
    }

    #[test]
    fn insert_checks_range() {
        let mut s = TripleSet::empty(3);
        assert!(s.insert(Triple::new(1, 2, 4).unwrap()).is_err());
        assert!(s.insert(Triple::new(1, 2, 3).unwrap()).unwrap());
        assert!(!s.insert(Triple::new(1, 2, 3).unwrap()).unwrap());
    }

    #[test]
    fn iteration_order_and_complement() {
        let s = TripleSet::from_arrays(3, &[[1, 2, 3], [0, 1, 2]]).unwrap();
        let v: Vec<_> = s.iter().map(|t| t.indices()).collect();
        assert_eq!(v, vec![[0, 1, 2], [1, 2, 3]]);
        let c = s.complement();
        assert_eq!(
            c.iter().map(|t| t.indices()).collect::<Vec<_>>(),
            vec![[0, 1, 3], [0, 2, 3]]
        );
    }

    #[test]
    fn json_shape() {
        let s = TripleSet::from_arrays(3, &[[0, 1, 3], [0, 2, 3]]).unwrap();
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, r#"{"n":3,"triples":[[0,1,3],[0,2,3]]}"#);
        let back: TripleSet = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<TripleSet>(r#"{"n":3,"triples":[[0,3,1]]}"#).is_err());
    }

    #[test]
    fn restriction_and_relabel() {
        let s = TripleSet::full(4);
        let r = s.restricted_to(0b01111);
        assert_eq!(r.len(), 4);
        let moved = TripleSet::from_arrays(2, &[[0, 1, 2]])
            .unwrap()
            .relabel(4, &[4, 2, 3])
            .unwrap();
        assert_eq!(moved.to_vec(), vec![Triple::new(2, 3, 4).unwrap()]);
    }
}
