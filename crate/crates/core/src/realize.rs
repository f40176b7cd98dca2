//! Constructing defining matrices with a prescribed point variety.
//!
//! Dense adequate collections are realized by the inductive construction:
//! move the densest coordinate line to `(0, n)`, realize the planes avoiding
//! `n` recursively, then fill the last column so that exactly the required
//! planes through `n` become good. Non-dense collections in `P^5` are matched
//! against the two known exceptional matrices. Every result is re-checked
//! through [`good_triples`].

use std::collections::{BTreeSet, VecDeque};

use rayon::prelude::*;
use serde::Serialize;

use crate::collections::{densest_pair, enumerate_adequate, Collection, MAX_ENUM_N};
use crate::degeneration::{lcm, torsion_choices, torus_point};
use crate::error::{Error, Result};
use crate::lattice::{closure, span, Quotient};
use crate::named;
use crate::point_variety::good_triples;
use crate::scalar::{GeneratorTable, GroupScalar, QMatrix, DEFAULT_MODULUS};
use crate::symmetry::find_isomorphism;
use crate::triples::{layout, TripleSet};

const M: u32 = DEFAULT_MODULUS;

/// How a realizing matrix was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Empty collection: a rank-one matrix.
    RankOne,
    /// The inductive construction for dense collections.
    DenseExtension,
    /// Relabeled copy of the three-solids matrix.
    ThreeSolids,
    /// Relabeled copy of the ten-planes matrix.
    TenPlanes,
    /// Generic point of the sub-torus cut out by the target's good set,
    /// used when the construction above does not reach the target.
    GenericPoint,
}

#[derive(Clone, Debug)]
pub struct RealizationResult {
    pub matrix: QMatrix,
    /// Planes missing from the point variety of `matrix`.
    pub achieved: Collection,
    pub target: Collection,
    pub success: bool,
    pub method: Method,
}

/// Outcome of realizing every adequate class of one dimension.
#[derive(Clone, Debug)]
pub struct RealizationSummary {
    pub n: usize,
    pub results: Vec<RealizationResult>,
}

impl RealizationSummary {
    pub fn successes(&self) -> usize {
        self.results.iter().filter(|r| r.success).count()
    }

    pub fn total(&self) -> usize {
        self.results.len()
    }

    pub fn failures(&self) -> impl Iterator<Item = &RealizationResult> {
        self.results.iter().filter(|r| !r.success)
    }

    /// Successes not produced by the inductive construction or its trivial
    /// base case.
    pub fn fallbacks(&self) -> impl Iterator<Item = &RealizationResult> {
        self.results
            .iter()
            .filter(|r| r.success && !matches!(r.method, Method::RankOne | Method::DenseExtension))
    }
}

/// Source of fresh generators `g0, g1, ...`.
#[derive(Default)]
struct Fresh {
    used: usize,
}

impl Fresh {
    fn next(&mut self) -> GroupScalar {
        let s = GroupScalar::generator(format!("g{}", self.used), M);
        self.used += 1;
        s
    }
}

/// Full antisymmetric matrix under construction.
#[derive(Clone)]
struct Grid {
    q: Vec<Vec<GroupScalar>>,
}

impl Grid {
    fn new(n: usize) -> Self {
        Grid { q: vec![vec![GroupScalar::one(M); n + 1]; n + 1] }
    }

    fn from_matrix(m: &QMatrix) -> Self {
        let mut g = Grid::new(m.n());
        for i in 0..=m.n() {
            for j in i + 1..=m.n() {
                g.set(i, j, m.upper(i, j).clone());
            }
        }
        g
    }

    fn get(&self, i: usize, j: usize) -> &GroupScalar {
        &self.q[i][j]
    }

    fn set(&mut self, i: usize, j: usize, v: GroupScalar) {
        self.q[j][i] = v.inverse();
        self.q[i][j] = v;
    }

    fn n(&self) -> usize {
        self.q.len() - 1
    }

    /// `out[perm[i]][perm[j]] = self[i][j]`.
    fn permuted(&self, perm: &[usize]) -> Grid {
        let mut out = Grid::new(self.n());
        for i in 0..=self.n() {
            for j in 0..=self.n() {
                out.q[perm[i]][perm[j]] = self.q[i][j].clone();
            }
        }
        out
    }

    fn into_matrix(self) -> Result<QMatrix> {
        let n = self.n();
        let names: BTreeSet<String> = self
            .q
            .iter()
            .flatten()
            .flat_map(|s| s.exponents().keys().cloned())
            .collect();
        let table = GeneratorTable::new(names, M)?;
        let entries = layout(n).pairs().iter().map(|&(i, j)| ((i, j), self.q[i][j].clone()));
        QMatrix::from_upper(n, table, entries.collect::<Vec<_>>())
    }
}

fn mul(a: &GroupScalar, b: &GroupScalar) -> GroupScalar {
    a.combine(b, 1)
}

fn rank_one(n: usize, fresh: &mut Fresh) -> Grid {
    let g: Vec<GroupScalar> = (0..=n).map(|_| fresh.next()).collect();
    let mut grid = Grid::new(n);
    for i in 0..=n {
        for j in i + 1..=n {
            grid.set(i, j, g[i].combine(&g[j], -1));
        }
    }
    grid
}

fn exceptional(c: &TripleSet, fresh: &mut Fresh) -> Result<(Grid, Method)> {
    let candidates = [
        (named::three_solids_collection(), Method::ThreeSolids),
        (named::ten_planes_collection(), Method::TenPlanes),
    ];
    for (known, method) in candidates {
        if let Some(perm) = find_isomorphism(&known, c)? {
            let matrix = match method {
                Method::ThreeSolids => {
                    let name = fresh.next().to_string();
                    named::three_solids_p5_with(&name)
                }
                _ => named::ten_planes_p5(),
            };
            return Ok((Grid::from_matrix(&matrix.permuted(&perm)?), method));
        }
    }
    Err(Error::Precondition(format!("no construction for the non-dense collection {c}")))
}

/// The construction proper. `c` is the set of planes to keep out.
fn construct(c: &TripleSet, fresh: &mut Fresh) -> Result<(Grid, Method)> {
    let n = c.n();
    if c.is_empty() {
        return Ok((rank_one(n, fresh), Method::RankOne));
    }
    let coll = Collection::new(*c);
    if !coll.is_dense() {
        return exceptional(c, fresh);
    }
    let ((a, b), _) = densest_pair(&coll).expect("nonempty collection has pairs");
    extend(c, (a, b), fresh)
}

/// Lines `(a, b)` lying in at least `n - 2` planes of `c`.
fn dense_lines(c: &TripleSet) -> Vec<(usize, usize)> {
    let n = c.n();
    layout(n)
        .pairs()
        .iter()
        .copied()
        .filter(|&(a, b)| c.iter().filter(|t| t.contains(a) && t.contains(b)).count() + 2 >= n)
        .collect()
}

/// Realizes `c` with the line `(a, b)` playing the role of `(0, n)`.
fn extend(c: &TripleSet, (a, b): (usize, usize), fresh: &mut Fresh) -> Result<(Grid, Method)> {
    let n = c.n();

    // move the densest line to (0, n)
    let mut perm = vec![0; n + 1];
    perm[a] = 0;
    perm[b] = n;
    let mut next = 1;
    for (i, slot) in perm.iter_mut().enumerate() {
        if i != a && i != b {
            *slot = next;
            next += 1;
        }
    }
    let moved = c.relabel(n, &perm)?;
    let has = |i: usize, j: usize, k: usize| {
        let t = crate::triples::Triple::sorted(i, j, k).expect("distinct indices");
        moved.contains(t)
    };

    let mut grid = Grid::new(n);
    if n == 2 {
        grid.set(0, 1, fresh.next());
    } else {
        let identity: Vec<usize> = (0..=n).collect();
        let inner_set = moved.restricted_to((1u32 << n) - 1).relabel(n - 1, &identity)?;
        let (inner, _) = construct(&inner_set, fresh)?;
        for i in 0..n {
            for j in i + 1..n {
                grid.set(i, j, inner.get(i, j).clone());
            }
        }
    }

    // last column on 1..n-1: q_pn = q_pq q_qn along every required plane
    // (p,q,n), propagated over a spanning forest with one fresh root per tree
    let mut column: Vec<Option<GroupScalar>> = vec![None; n];
    for root in 1..n {
        if column[root].is_some() {
            continue;
        }
        column[root] = Some(fresh.next());
        let mut queue = VecDeque::from([root]);
        while let Some(q) = queue.pop_front() {
            for p in 1..n {
                if p == q || column[p].is_some() || has(p, q, n) {
                    continue;
                }
                let y = mul(grid.get(p, q), column[q].as_ref().expect("visited"));
                column[p] = Some(y);
                queue.push_back(p);
            }
        }
    }
    for (p, y) in column.iter().enumerate().skip(1) {
        grid.set(p, n, y.clone().expect("every vertex visited"));
    }

    let open: Vec<usize> = (1..n).filter(|&i| !has(0, i, n)).collect();
    let corner = match open.as_slice() {
        [] => fresh.next(),
        [i] => mul(grid.get(0, *i), grid.get(*i, n)),
        _ => return Err(Error::Precondition("densest line misses more than one plane".into())),
    };
    grid.set(0, n, corner);

    let mut inverse = vec![0; n + 1];
    for (i, &p) in perm.iter().enumerate() {
        inverse[p] = i;
    }
    Ok((grid.permuted(&inverse), Method::DenseExtension))
}

/// A point of `V(J)` whose good set is exactly `closed`: the generic point of
/// one coset of the identity component. Fails when every coset acquires
/// extra good triples, or when `closed` is not closed.
pub fn generic_point_of_node(closed: &TripleSet) -> Result<QMatrix> {
    if closure(closed) != *closed {
        return Err(Error::Precondition(format!("{closed} is not closed")));
    }
    let quotient = Quotient::of(&span(closed))?;
    let orders = quotient.torsion_orders();
    let modulus = orders.iter().fold(M as i64, |m, &d| lcm(m, d));
    let modulus = u32::try_from(modulus).map_err(|_| Error::Overflow)?;
    for choice in torsion_choices(&orders) {
        let q = torus_point(&quotient, &choice, modulus, "g")?;
        if good_triples(&q) == *closed {
            return Ok(q);
        }
    }
    Err(Error::Verification(format!("no coset of V({closed}) has exactly these good triples")))
}

fn finish(matrix: QMatrix, target: Collection, method: Method) -> RealizationResult {
    let achieved = Collection::new(good_triples(&matrix).complement());
    RealizationResult { success: achieved == target, matrix, achieved, target, method }
}

/// Realizes `c` as the collection of planes missing from a point variety.
pub fn realize(c: &Collection) -> Result<RealizationResult> {
    let n = c.n();
    if n > MAX_ENUM_N {
        return Err(Error::DimensionTooLarge { n, max: MAX_ENUM_N });
    }
    if n < 2 {
        return Err(Error::Precondition("need at least three variables".into()));
    }
    if !c.is_adequate() {
        return Err(Error::NotAdequate);
    }
    let (grid, method) = construct(c.triples(), &mut Fresh::default())?;
    let result = finish(grid.into_matrix()?, *c, method);
    if result.success {
        return Ok(result);
    }
    if method == Method::DenseExtension {
        // the densest line is one choice among several admissible ones
        for line in dense_lines(c.triples()) {
            let (grid, method) = extend(c.triples(), line, &mut Fresh::default())?;
            let other = finish(grid.into_matrix()?, *c, method);
            if other.success {
                return Ok(other);
            }
        }
    }
    match generic_point_of_node(&c.triples().complement()) {
        Ok(q) => Ok(finish(q, *c, Method::GenericPoint)),
        Err(_) => Ok(result),
    }
}

/// Realizes one representative of every adequate class in dimension `n`.
pub fn realize_all(n: usize) -> Result<RealizationSummary> {
    let catalog = enumerate_adequate(n)?;
    let results = catalog
        .entries
        .par_iter()
        .map(|e| realize(&e.representative))
        .collect::<Result<Vec<_>>>()?;
    Ok(RealizationSummary { n, results })
}
