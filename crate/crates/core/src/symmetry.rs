//! The action of `Sym(n+1)` on triple sets: orbits and canonical forms.
//!
//! Canonical forms are brute-force minima over the whole group. With at most
//! 720 permutations for the dimensions we enumerate, that is cheap enough and
//! leaves nothing clever to get wrong.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::triples::{layout, BitIter, TripleSet};

/// Largest dimension with precomputed permutation tables (`7! = 5040`).
pub const MAX_SYM_N: usize = 6;

#[derive(Debug)]
pub struct SymmetricGroup {
    n: usize,
    perms: Vec<Vec<usize>>,
    triple_maps: Vec<Vec<u8>>,
}

impl SymmetricGroup {
    fn build(n: usize) -> Self {
        let lay = layout(n);
        let perms = permutations(n + 1);
        let triple_maps = perms
            .iter()
            .map(|p| {
                lay.triples()
                    .iter()
                    .map(|t| {
                        let [a, b, c] = t.indices();
                        lay.triple_index_unordered(p[a], p[b], p[c]) as u8
                    })
                    .collect()
            })
            .collect();
        SymmetricGroup {
            n,
            perms,
            triple_maps,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.perms.len()
    }

    /// Permutation number `p`, as the image list `i -> perm[i]`.
    pub fn perm(&self, p: usize) -> &[usize] {
        &self.perms[p]
    }

    /// Image of a triple bitset under permutation number `p`.
    pub fn apply_bits(&self, p: usize, bits: u128) -> u128 {
        let map = &self.triple_maps[p];
        BitIter(bits).fold(0u128, |acc, idx| acc | (1u128 << map[idx]))
    }

    pub fn apply(&self, p: usize, set: &TripleSet) -> TripleSet {
        debug_assert_eq!(set.n(), self.n);
        TripleSet::from_bits(self.n, self.apply_bits(p, set.bits()))
    }

    /// Distinct images of `bits`, in increasing numeric order.
    pub fn orbit_bits(&self, bits: u128) -> BTreeSet<u128> {
        (0..self.order()).map(|p| self.apply_bits(p, bits)).collect()
    }

    /// Lexicographically least image, with the index of a permutation
    /// attaining it.
    pub fn canonical_bits(&self, bits: u128) -> (u128, usize) {
        let mut best = bits;
        let mut best_p = 0;
        for p in 1..self.order() {
            let image = self.apply_bits(p, bits);
            if lex_cmp(image, best) == Ordering::Less {
                best = image;
                best_p = p;
            }
        }
        (best, best_p)
    }
}

/// Cached group tables for dimension `n` (`n <= MAX_SYM_N`).
pub fn symmetric_group(n: usize) -> Result<&'static SymmetricGroup> {
    static GROUPS: [OnceLock<SymmetricGroup>; MAX_SYM_N + 1] = [const { OnceLock::new() }; MAX_SYM_N + 1];
    if n > MAX_SYM_N {
        return Err(Error::DimensionTooLarge { n, max: MAX_SYM_N });
    }
    Ok(GROUPS[n].get_or_init(|| SymmetricGroup::build(n)))
}

/// All permutations of `0..size` in lexicographic order (identity first).
pub fn permutations(size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..size).collect();
    loop {
        out.push(current.clone());
        // next lexicographic permutation
        let Some(i) = (1..size).rev().find(|&i| current[i - 1] < current[i]) else {
            break;
        };
        let pivot = i - 1;
        let j = (pivot + 1..size).rev().find(|&j| current[j] > current[pivot]).unwrap();
        current.swap(pivot, j);
        current[i..].reverse();
    }
    out
}

/// Compares two triple bitsets as their lexicographically sorted triple lists.
pub fn lex_cmp(a: u128, b: u128) -> Ordering {
    let diff = a ^ b;
    if diff == 0 {
        return Ordering::Equal;
    }
    let low = diff.trailing_zeros();
    let above = if low == 127 { 0 } else { u128::MAX << (low + 1) };
    if a & (1u128 << low) != 0 {
        // `a` continues with triple `low`; `b` continues with something larger, or stops.
        if b & above != 0 {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    } else if a & above != 0 {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}

/// Lexicographically least image of `set` under `Sym(n+1)`.
pub fn canonical_form(set: &TripleSet) -> Result<TripleSet> {
    let group = symmetric_group(set.n())?;
    Ok(TripleSet::from_bits(set.n(), group.canonical_bits(set.bits()).0))
}

/// A permutation `p` (as an image list) with `p(from) = to`, if the two sets
/// lie in one orbit.
pub fn find_isomorphism(from: &TripleSet, to: &TripleSet) -> Result<Option<Vec<usize>>> {
    if from.n() != to.n() || from.len() != to.len() {
        return Ok(None);
    }
    let group = symmetric_group(from.n())?;
    Ok((0..group.order())
        .find(|&p| group.apply_bits(p, from.bits()) == to.bits())
        .map(|p| group.perm(p).to_vec()))
}
