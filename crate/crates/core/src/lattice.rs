//! The integer character lattice behind the parameter torus.
//!
//! The torus of defining matrices has coordinates `q_ij`, `i < j`, so its
//! characters form `Z^{C(n+1,2)}`. Each triple contributes the character
//! `b_ijk = e_ij + e_jk - e_ik`. For a triple set `J`, the sub-torus `V(J)`
//! cut out by `b_t = 1, t in J` is determined by the subgroup `span(J)`
//! (not its saturation: torsion cosets are genuine parameter values), and
//! `V(J) = V(K)` exactly when the spans agree.
//!
//! Lattice arithmetic is plain `i64` with overflow checks; the matrices
//! involved are at most 20 x 15 with entries in `{-1, 0, 1}`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::triples::{layout, Triple, TripleSet};

/// A character of the parameter torus, coordinates indexed by pairs `i < j`
/// in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CharVector {
    n: usize,
    coords: Vec<i64>,
}

impl CharVector {
    pub fn zero(n: usize) -> Self {
        CharVector {
            n,
            coords: vec![0; layout(n).num_pairs()],
        }
    }

    pub fn from_coords(n: usize, coords: Vec<i64>) -> Result<Self> {
        if coords.len() != layout(n).num_pairs() {
            return Err(Error::Precondition(format!(
                "character of dimension {} needs {} coordinates",
                n,
                layout(n).num_pairs()
            )));
        }
        Ok(CharVector { n, coords })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    /// Coordinate at the pair `{i, j}`.
    pub fn at(&self, i: usize, j: usize) -> i64 {
        self.coords[layout(self.n).pair_index(i, j)]
    }

    pub fn add(&self, other: &CharVector) -> CharVector {
        CharVector {
            n: self.n,
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &CharVector) -> CharVector {
        CharVector {
            n: self.n,
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }
}

/// `e_ij + e_jk - e_ik`.
pub fn triple_char(t: Triple, n: usize) -> CharVector {
    let lay = layout(n);
    let mut v = CharVector::zero(n);
    let [i, j, k] = t.indices();
    v.coords[lay.pair_index(i, j)] += 1;
    v.coords[lay.pair_index(j, k)] += 1;
    v.coords[lay.pair_index(i, k)] -= 1;
    v
}

fn checked_axpy(target: &mut [i64], factor: i64, source: &[i64]) -> Result<()> {
    // target -= factor * source
    for (t, &s) in target.iter_mut().zip(source) {
        let prod = factor.checked_mul(s).ok_or(Error::Overflow)?;
        *t = t.checked_sub(prod).ok_or(Error::Overflow)?;
    }
    Ok(())
}

/// Row-style Hermite normal form. Returns the nonzero rows and their pivot
/// columns; pivots are positive and entries above a pivot are reduced into
/// `[0, pivot)`.
pub fn hermite_normal_form(mut rows: Vec<Vec<i64>>, cols: usize) -> Result<(Vec<Vec<i64>>, Vec<usize>)> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        loop {
            let Some(p) = (r..rows.len())
                .filter(|&i| rows[i][c] != 0)
                .min_by_key(|&i| rows[i][c].unsigned_abs())
            else {
                break;
            };
            rows.swap(r, p);
            let mut clean = true;
            for s in r + 1..rows.len() {
                if rows[s][c] != 0 {
                    let q = rows[s][c] / rows[r][c];
                    let (head, tail) = rows.split_at_mut(s);
                    checked_axpy(&mut tail[0], q, &head[r])?;
                    if tail[0][c] != 0 {
                        clean = false;
                    }
                }
            }
            if clean {
                break;
            }
        }
        if rows[r][c] == 0 {
            continue;
        }
        if rows[r][c] < 0 {
            for v in rows[r].iter_mut() {
                *v = v.checked_neg().ok_or(Error::Overflow)?;
            }
        }
        let pivot = rows[r][c];
        for s in 0..r {
            let q = rows[s][c].div_euclid(pivot);
            if q != 0 {
                let (head, tail) = rows.split_at_mut(r);
                checked_axpy(&mut head[s], q, &tail[0])?;
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    Ok((rows, pivots))
}

/// A subgroup of the character lattice, held in Hermite normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubLattice {
    n: usize,
    basis: Vec<Vec<i64>>,
    pivots: Vec<usize>,
}

impl SubLattice {
    /// The subgroup generated by `generators`.
    pub fn generated_by(n: usize, generators: impl IntoIterator<Item = CharVector>) -> Result<Self> {
        let rows: Vec<Vec<i64>> = generators.into_iter().map(|v| v.coords).collect();
        let (basis, pivots) = hermite_normal_form(rows, layout(n).num_pairs())?;
        Ok(SubLattice { n, basis, pivots })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// The unique HNF basis rows.
    pub fn basis(&self) -> &[Vec<i64>] {
        &self.basis
    }

    /// Exact membership: is `v` an integer combination of the basis?
    pub fn member(&self, v: &CharVector) -> bool {
        debug_assert_eq!(v.n, self.n);
        let mut rest = v.coords.clone();
        for (row, &c) in self.basis.iter().zip(&self.pivots) {
            let pivot = row[c];
            if rest[c] % pivot != 0 {
                return false;
            }
            let q = rest[c] / pivot;
            if q != 0 && checked_axpy(&mut rest, q, row).is_err() {
                return false;
            }
        }
        rest.iter().all(|&x| x == 0)
    }

    /// Subgroup inclusion `self <= other`.
    pub fn is_sublattice_of(&self, other: &SubLattice) -> bool {
        self.basis.iter().all(|row| {
            other.member(&CharVector {
                n: self.n,
                coords: row.clone(),
            })
        })
    }
}

/// The subgroup generated by the characters of `j`.
pub fn span(j: &TripleSet) -> SubLattice {
    SubLattice::generated_by(j.n(), j.iter().map(|t| triple_char(t, j.n())))
        .expect("triple characters stay far from i64 overflow")
}

/// `{t : b_t in span(J)}`: the largest triple set defining the same sub-torus.
pub fn closure(j: &TripleSet) -> TripleSet {
    let lattice = span(j);
    closure_in(&lattice, j)
}

fn closure_in(lattice: &SubLattice, j: &TripleSet) -> TripleSet {
    let n = j.n();
    let lay = layout(n);
    let mut bits = j.bits();
    for (idx, &t) in lay.triples().iter().enumerate() {
        if bits & (1u128 << idx) == 0 && lattice.member(&triple_char(t, n)) {
            bits |= 1u128 << idx;
        }
    }
    TripleSet::from_bits(n, bits)
}

pub fn is_closed(j: &TripleSet) -> bool {
    closure(j) == *j
}

/// Least superset of `j` closed under the four-term rule: among the four
/// triples on any four indices, three force the fourth.
pub fn lemma2_saturate(j: &TripleSet) -> TripleSet {
    let n = j.n();
    let lay = layout(n);
    let mut bits = j.bits();
    let mut quads = Vec::new();
    for a in 0..=n {
        for b in a + 1..=n {
            for c in b + 1..=n {
                for d in c + 1..=n {
                    quads.push([
                        lay.triple_index_unordered(a, b, c),
                        lay.triple_index_unordered(a, b, d),
                        lay.triple_index_unordered(a, c, d),
                        lay.triple_index_unordered(b, c, d),
                    ]);
                }
            }
        }
    }
    loop {
        let before = bits;
        for quad in &quads {
            let mask = quad.iter().fold(0u128, |m, &i| m | (1u128 << i));
            if (bits & mask).count_ones() == 3 {
                bits |= mask;
            }
        }
        if bits == before {
            return TripleSet::from_bits(n, bits);
        }
    }
}

/// `dim V(J) - n`: the torus dimension left after the free action of the
/// `n`-dimensional kernel torus.
pub fn node_label(j: &TripleSet) -> usize {
    let n = j.n();
    layout(n).num_pairs() - span(j).rank() - n
}

/// Smith form of an integer matrix together with the column transform.
#[derive(Clone, Debug)]
pub struct SmithForm {
    /// Nonzero diagonal entries, each dividing the next.
    pub invariant_factors: Vec<i64>,
    /// Unimodular `V` with `A V = U^-1 D`.
    pub column_transform: Vec<Vec<i64>>,
}

/// Smith normal form of the `rows x cols` matrix `a`, tracking the column
/// operations.
pub fn smith_normal_form(a: &[Vec<i64>], cols: usize) -> Result<SmithForm> {
    let mut a: Vec<Vec<i64>> = a.to_vec();
    let rows = a.len();
    let mut v: Vec<Vec<i64>> = (0..cols)
        .map(|i| (0..cols).map(|j| i64::from(i == j)).collect())
        .collect();
    let mut diag = Vec::new();

    let col_op = |m: &mut Vec<Vec<i64>>, dst: usize, q: i64, src: usize| -> Result<()> {
        // column dst -= q * column src
        for row in m.iter_mut() {
            let prod = q.checked_mul(row[src]).ok_or(Error::Overflow)?;
            row[dst] = row[dst].checked_sub(prod).ok_or(Error::Overflow)?;
        }
        Ok(())
    };
    let swap_cols = |m: &mut Vec<Vec<i64>>, x: usize, y: usize| {
        for row in m.iter_mut() {
            row.swap(x, y);
        }
    };

    for k in 0..rows.min(cols) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in k..rows {
                for j in k..cols {
                    if a[i][j] != 0 && best.is_none_or(|(bi, bj)| a[i][j].unsigned_abs() < a[bi][bj].unsigned_abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return Ok(SmithForm {
                    invariant_factors: diag,
                    column_transform: v,
                });
            };
            a.swap(k, pi);
            swap_cols(&mut a, k, pj);
            swap_cols(&mut v, k, pj);

            let pivot = a[k][k];
            let mut dirty = false;
            for i in k + 1..rows {
                if a[i][k] != 0 {
                    let q = a[i][k] / pivot;
                    let (head, tail) = a.split_at_mut(i);
                    checked_axpy(&mut tail[0], q, &head[k])?;
                    dirty |= a[i][k] != 0;
                }
            }
            for j in k + 1..cols {
                if a[k][j] != 0 {
                    let q = a[k][j] / pivot;
                    col_op(&mut a, j, q, k)?;
                    col_op(&mut v, j, q, k)?;
                    dirty |= a[k][j] != 0;
                }
            }
            if dirty {
                continue;
            }
            // enforce the divisibility chain
            let offender = (k + 1..rows).find(|&i| (k + 1..cols).any(|j| a[i][j] % pivot != 0));
            match offender {
                Some(i) => {
                    let (head, tail) = a.split_at_mut(i);
                    checked_axpy(&mut head[k], -1, &tail[0])?;
                }
                None => break,
            }
        }
        if a[k][k] < 0 {
            for x in a[k].iter_mut() {
                *x = -*x;
            }
        }
        diag.push(a[k][k]);
    }
    Ok(SmithForm {
        invariant_factors: diag,
        column_transform: v,
    })
}

/// The quotient `Z^N / M` of the character lattice by a subgroup, as
/// `(Z/d_1 + ... + Z/d_r) + Z^{N-r}` in the coordinates `w = x V`.
#[derive(Clone, Debug)]
pub struct Quotient {
    n: usize,
    factors: Vec<i64>,
    transform: Vec<Vec<i64>>,
}

impl Quotient {
    pub fn of(lattice: &SubLattice) -> Result<Self> {
        let cols = layout(lattice.n).num_pairs();
        let smith = smith_normal_form(&lattice.basis, cols)?;
        Ok(Quotient {
            n: lattice.n,
            factors: smith.invariant_factors,
            transform: smith.column_transform,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Invariant factors `d_1 | d_2 | ... | d_r` of the subgroup.
    pub fn invariant_factors(&self) -> &[i64] {
        &self.factors
    }

    /// Nontrivial torsion orders `d_i > 1`.
    pub fn torsion_orders(&self) -> Vec<i64> {
        self.factors.iter().copied().filter(|&d| d > 1).collect()
    }

    pub fn free_rank(&self) -> usize {
        self.transform.len() - self.factors.len()
    }

    pub fn ambient_rank(&self) -> usize {
        self.transform.len()
    }

    /// Coordinates `x V` of a character.
    pub fn coordinates(&self, x: &[i64]) -> Vec<i64> {
        let cols = self.transform.len();
        (0..cols)
            .map(|c| x.iter().zip(&self.transform).map(|(xi, row)| xi * row[c]).sum())
            .collect()
    }

    /// Row `p` of `V`: the coordinates of the basis character `e_p`.
    pub fn basis_coordinates(&self, p: usize) -> &[i64] {
        &self.transform[p]
    }

    /// Membership through the Smith coordinates; agrees with
    /// [`SubLattice::member`].
    pub fn is_trivial_class(&self, x: &[i64]) -> bool {
        let w = self.coordinates(x);
        let r = self.factors.len();
        w[..r].iter().zip(&self.factors).all(|(wi, d)| wi % d == 0) && w[r..].iter().all(|&wi| wi == 0)
    }
}
