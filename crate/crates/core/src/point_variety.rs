//! Point varieties as unions of coordinate subspaces.
//!
//! The point variety of a quantum polynomial algebra is cut out by the cubic
//! monomials `u_i u_j u_k` over the triples whose principal minor does not
//! have rank one. A coordinate subspace `P(S)` lies in it exactly when every
//! triple inside `S` is good, so the irreducible components are the maximal
//! such `S`.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::QMatrix;
use crate::triples::{binomial, layout, Triple, TripleSet};

/// Largest dimension accepted by [`monomial_variety_check`].
pub const MAX_CHECK_N: usize = 6;

/// The coordinate subspace spanned by `delta_i`, `i in S`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Flat(u32);

impl Flat {
    pub fn from_mask(mask: u32) -> Self {
        assert!(mask != 0, "a flat spans at least one coordinate point");
        Flat(mask)
    }

    pub fn from_indices(indices: &[usize]) -> Self {
        Flat::from_mask(indices.iter().fold(0, |m, &i| m | (1 << i)))
    }

    pub fn mask(&self) -> u32 {
        self.0
    }

    pub fn indices(&self) -> Vec<usize> {
        (0..32).filter(|i| self.0 & (1 << i) != 0).collect()
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Projective dimension, `|S| - 1`.
    pub fn dimension(&self) -> usize {
        self.len() - 1
    }

    pub fn contains(&self, other: &Flat) -> bool {
        other.0 & !self.0 == 0
    }

    pub fn contains_triple(&self, t: Triple) -> bool {
        t.mask() & !self.0 == 0
    }
}

impl fmt::Display for Flat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.indices().iter().map(|i| i.to_string()).collect();
        write!(f, "P({})", parts.join(","))
    }
}

impl fmt::Debug for Flat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for Flat {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.indices().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Flat {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        if v.is_empty() || v.iter().any(|&i| i >= 32) {
            return Err(serde::de::Error::custom("flat indices must be nonempty and < 32"));
        }
        Ok(Flat::from_indices(&v))
    }
}

/// Irreducible components of a point variety together with its type.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Configuration {
    #[serde(skip)]
    n: usize,
    components: Vec<Flat>,
    #[serde(rename = "type")]
    type_vector: Vec<usize>,
}

impl Configuration {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Components ordered by decreasing dimension, then lexicographically.
    pub fn components(&self) -> &[Flat] {
        &self.components
    }

    /// `(c_n, c_{n-1}, ..., c_1)`, `c_d` counting components of dimension `d`.
    pub fn type_vector(&self) -> &[usize] {
        &self.type_vector
    }

    /// True when the point variety is all of `P^n`.
    pub fn is_whole_space(&self) -> bool {
        self.components.len() == 1 && self.components[0].len() == self.n + 1
    }

    /// Checks the structural invariants against the good set the
    /// configuration was computed from.
    pub fn check(&self, good: &TripleSet) -> Result<()> {
        let fail = |msg: String| Err(Error::Verification(msg));
        for (a, fa) in self.components.iter().enumerate() {
            if fa.dimension() == 0 {
                return fail(format!("zero-dimensional component {fa}"));
            }
            for fb in &self.components[a + 1..] {
                if fa.contains(fb) || fb.contains(fa) {
                    return fail(format!("components {fa} and {fb} are nested"));
                }
            }
        }
        for &(i, j) in layout(self.n).pairs() {
            let pair = Flat::from_indices(&[i, j]);
            if !self.components.iter().any(|c| c.contains(&pair)) {
                return fail(format!("line P({i},{j}) is not covered"));
            }
        }
        let mut faces = TripleSet::empty(self.n);
        for c in &self.components {
            for &t in layout(self.n).triples() {
                if c.contains_triple(t) {
                    if !good.contains(t) {
                        return fail(format!("component {c} contains non-good triple {t}"));
                    }
                    faces.insert(t)?;
                }
            }
        }
        if faces != *good {
            return fail(format!("faces {faces} differ from good set {good}"));
        }
        Ok(())
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.components.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(" ∪ "))
    }
}

/// Triples whose principal `3 x 3` minor has rank one.
pub fn good_triples(q: &QMatrix) -> TripleSet {
    let lay = layout(q.n());
    let bits = lay
        .triples()
        .iter()
        .enumerate()
        .filter(|(_, &t)| q.b_scalar(t).is_one())
        .fold(0u128, |acc, (idx, _)| acc | (1u128 << idx));
    TripleSet::from_bits(q.n(), bits)
}

/// Whether the principal minor of `q` on the indices of `flat` has rank one.
pub fn is_rank_one(q: &QMatrix, flat: &Flat) -> bool {
    layout(q.n())
        .triples()
        .iter()
        .filter(|&&t| flat.contains_triple(t))
        .all(|&t| q.b_scalar(t).is_one())
}

/// `flat[mask]` for every subset of `{0..=n}`: all triples inside are good.
fn flat_table(good: &TripleSet) -> Vec<bool> {
    let n = good.n();
    let lay = layout(n);
    let size = 1usize << (n + 1);
    let mut table = vec![false; size];
    for mask in 1..size {
        if mask.count_ones() <= 2 {
            table[mask] = true;
            continue;
        }
        let high = usize::BITS - 1 - mask.leading_zeros();
        let rest = mask & !(1 << high);
        if !table[rest] {
            continue;
        }
        let members: Vec<usize> = (0..high as usize).filter(|&i| rest & (1 << i) != 0).collect();
        table[mask] = members.iter().enumerate().all(|(p, &a)| {
            members[p + 1..]
                .iter()
                .all(|&b| good.bits() & (1u128 << lay.triple_index_unordered(a, b, high as usize)) != 0)
        });
    }
    table
}

/// Maximal flats and type vector of the point variety with good set `good`.
pub fn components(good: &TripleSet) -> Configuration {
    let n = good.n();
    let table = flat_table(good);
    let mut comps: Vec<Flat> = (1..table.len())
        .filter(|&mask| table[mask] && (0..=n).all(|v| mask & (1 << v) != 0 || !table[mask | (1 << v)]))
        .map(|mask| Flat::from_mask(mask as u32))
        .collect();
    comps.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.indices().cmp(&b.indices())));
    let mut type_vector = vec![0; n];
    // zero-dimensional components only arise for n = 0
    for c in comps.iter().filter(|c| c.dimension() >= 1) {
        type_vector[n - c.dimension()] += 1;
    }
    Configuration {
        n,
        components: comps,
        type_vector,
    }
}

/// Triples indexing the cubic monomials `u_i u_j u_k` that generate the
/// defining ideal.
pub fn ideal_generators(good: &TripleSet) -> Vec<Triple> {
    good.complement().to_vec()
}

/// Checks that the zero set of the monomial ideal equals the union of the
/// component flats. Every coordinate support pattern is tested exhaustively;
/// `samples` additional random integer points are evaluated directly.
pub fn monomial_variety_check(good: &TripleSet, samples: usize) -> Result<bool> {
    let n = good.n();
    if n > MAX_CHECK_N {
        return Err(Error::DimensionTooLarge { n, max: MAX_CHECK_N });
    }
    let config = components(good);
    let generators = ideal_generators(good);
    let in_union = |support: u32| config.components().iter().any(|c| support & !c.mask() == 0);
    let vanishes = |support: u32| generators.iter().all(|t| t.mask() & !support != 0);

    for support in 1u32..(1 << (n + 1)) {
        if vanishes(support) != in_union(support) {
            return Ok(false);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 + n as u64);
    for _ in 0..samples {
        let point: Vec<i64> = (0..=n)
            .map(|_| if rng.random_bool(0.5) { 0 } else { rng.random_range(1..=9) * if rng.random_bool(0.5) { 1 } else { -1 } })
            .collect();
        if point.iter().all(|&v| v == 0) {
            continue;
        }
        let on_variety = generators.iter().all(|t| {
            let [i, j, k] = t.indices();
            point[i] as i128 * point[j] as i128 * point[k] as i128 == 0
        });
        let support = point
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .fold(0u32, |m, (i, _)| m | (1 << i));
        if on_variety != in_union(support) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `sum_d c_d * C(d+1, 2)`: lines counted with multiplicity over components.
pub fn covered_line_count(config: &Configuration) -> usize {
    config.components().iter().map(|c| binomial(c.len(), 2)).sum()
}
