//! Collections of coordinate planes missing from a point variety.
//!
//! A collection `C` is adequate when for every index `i` and every plane
//! `P(j,k,l)` in `C`, some `P(i,u,v)` with `{u,v} ⊂ {j,k,l}` is also in `C`
//! (when `i` is one of `j,k,l` the plane itself witnesses this). It is dense
//! when some coordinate line lies in at least `n - 2` of its planes. The
//! complement of the good triples of any defining matrix is adequate.

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symmetry::{lex_cmp, symmetric_group};
use crate::triples::{full_mask, layout, BitIter, TripleSet, MAX_N};

/// Largest dimension for exhaustive enumeration (`2^20` subsets at `n = 5`).
pub const MAX_ENUM_N: usize = 5;

/// A set of coordinate planes `P(i,j,k)` of `P^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Collection {
    triples: TripleSet,
}

impl Collection {
    pub fn new(triples: TripleSet) -> Self {
        Collection { triples }
    }

    pub fn empty(n: usize) -> Self {
        Collection::new(TripleSet::empty(n))
    }

    pub fn n(&self) -> usize {
        self.triples.n()
    }

    pub fn triples(&self) -> &TripleSet {
        &self.triples
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn is_adequate(&self) -> bool {
        is_adequate_bits(self.n(), self.triples.bits())
    }

    pub fn is_dense(&self) -> bool {
        is_dense(self)
    }

    pub fn canonical_form(&self) -> Result<Collection> {
        canonical_form(self)
    }
}

impl From<TripleSet> for Collection {
    fn from(triples: TripleSet) -> Self {
        Collection::new(triples)
    }
}

/// For each member triple `t` and outside index `i`: the mask of the three
/// triples `{i,u,v}`, `{u,v} ⊂ t`, one of which must be present.
struct AdequacyTable {
    witnesses: Vec<Vec<u128>>,
}

fn adequacy_table(n: usize) -> &'static AdequacyTable {
    static TABLES: OnceLock<Vec<AdequacyTable>> = OnceLock::new();
    &TABLES.get_or_init(|| {
        (0..=MAX_N)
            .map(|n| {
                let lay = layout(n);
                let witnesses = lay
                    .triples()
                    .iter()
                    .map(|t| {
                        let [j, k, l] = t.indices();
                        (0..=n)
                            .filter(|&i| !t.contains(i))
                            .map(|i| {
                                (1u128 << lay.triple_index_unordered(i, j, k))
                                    | (1u128 << lay.triple_index_unordered(i, j, l))
                                    | (1u128 << lay.triple_index_unordered(i, k, l))
                            })
                            .collect()
                    })
                    .collect();
                AdequacyTable { witnesses }
            })
            .collect()
    })[n]
}

pub(crate) fn is_adequate_bits(n: usize, bits: u128) -> bool {
    let table = adequacy_table(n);
    BitIter(bits).all(|t| table.witnesses[t].iter().all(|&w| bits & w != 0))
}

pub fn is_adequate(c: &Collection) -> bool {
    c.is_adequate()
}

/// Some pair `i < j` lies in at least `n - 2` members.
pub fn is_dense(c: &Collection) -> bool {
    densest_pair(c).is_some_and(|(_, count)| count + 2 >= c.n())
}

/// The lexicographically first pair lying in the most members, with its
/// count. `None` when `n < 1`.
pub fn densest_pair(c: &Collection) -> Option<((usize, usize), usize)> {
    let n = c.n();
    let mut best: Option<((usize, usize), usize)> = None;
    for &(i, j) in layout(n).pairs() {
        let count = c.triples.iter().filter(|t| t.contains(i) && t.contains(j)).count();
        if best.is_none_or(|(_, b)| count > b) {
            best = Some(((i, j), count));
        }
    }
    best
}

/// The lexicographically least image of `c` under `Sym(n+1)`.
pub fn canonical_form(c: &Collection) -> Result<Collection> {
    Ok(Collection::new(crate::symmetry::canonical_form(&c.triples)?))
}

/// One orbit of adequate collections.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    #[serde(flatten)]
    pub representative: Collection,
    pub orbit_size: usize,
    pub dense: bool,
}

/// All adequate collections of `P^n` up to relabeling of the variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitCatalog {
    pub n: usize,
    pub entries: Vec<CatalogEntry>,
    pub total: usize,
}

impl OrbitCatalog {
    pub fn representatives(&self) -> impl Iterator<Item = &Collection> {
        self.entries.iter().map(|e| &e.representative)
    }

    pub fn orbit_sizes(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.orbit_size).collect()
    }

    pub fn num_orbits(&self) -> usize {
        self.entries.len()
    }
}

/// Groups the members of a `Sym(n+1)`-invariant family of triple sets into
/// orbits. Returns `(canonical bits, orbit size)` sorted by size then
/// lexicographically.
pub(crate) fn orbits_of(n: usize, members: &[u128]) -> Result<Vec<(u128, usize)>> {
    let group = symmetric_group(n)?;
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for &bits in members {
        if seen.contains(&bits) {
            continue;
        }
        let orbit = group.orbit_bits(bits);
        let canonical = *orbit
            .iter()
            .min_by(|a, b| lex_cmp(**a, **b))
            .expect("orbit contains its seed");
        out.push((canonical, orbit.len()));
        seen.extend(orbit);
    }
    out.sort_by(|a, b| a.0.count_ones().cmp(&b.0.count_ones()).then(lex_cmp(a.0, b.0)));
    Ok(out)
}

/// Exhaustive scan of all `2^C(n+1,3)` collections.
pub fn enumerate_adequate(n: usize) -> Result<OrbitCatalog> {
    if n > MAX_ENUM_N {
        return Err(Error::DimensionTooLarge { n, max: MAX_ENUM_N });
    }
    let num = layout(n).num_triples();
    let limit = full_mask(num);
    let adequate: Vec<u128> = (0..=limit)
        .into_par_iter()
        .filter(|&bits| is_adequate_bits(n, bits))
        .collect();
    let total = adequate.len();
    let entries = orbits_of(n, &adequate)?
        .into_iter()
        .map(|(bits, size)| {
            let representative = Collection::new(TripleSet::from_bits(n, bits));
            CatalogEntry {
                dense: representative.is_dense(),
                representative,
                orbit_size: size,
            }
        })
        .collect();
    Ok(OrbitCatalog { n, entries, total })
}

/// Canonical representatives of the nonempty adequate classes that are not
/// dense.
pub fn non_dense_adequate(n: usize) -> Result<Vec<Collection>> {
    Ok(enumerate_adequate(n)?
        .entries
        .into_iter()
        .filter(|e| !e.dense && !e.representative.is_empty())
        .map(|e| e.representative)
        .collect())
}
