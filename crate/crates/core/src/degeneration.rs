//! Degeneration graphs of quantum polynomial algebras.
//!
//! Nodes are the distinct sub-tori `V(J)` of the parameter torus up to
//! relabeling the variables. Each is represented by its closed triple set
//! `closure(J)`, the set of planes forced into the point variety. An arrow
//! `u -> v` means the sub-torus of `v` is strictly contained in that of `u`
//! (some relabeling of `v`'s closed set strictly contains `u`'s); arrows are
//! transitively reduced.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::collections::{orbits_of, MAX_ENUM_N};
use crate::error::{Error, Result};
use crate::lattice::{closure, node_label, span, triple_char, Quotient, SubLattice, CharVector};
use crate::point_variety::components;
use crate::scalar::{GeneratorTable, GroupScalar, QMatrix, DEFAULT_MODULUS};
use crate::symmetry::symmetric_group;
use crate::triples::{full_mask, layout, TripleSet};

/// Dimensions up to which node enumeration runs by default; `n = 5` is the
/// long-running mode.
pub const QUICK_N: usize = 4;

/// One node of a degeneration graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegNode {
    /// Display name, `<label>` or `<label>_<letter>` when labels repeat.
    pub name: String,
    /// Canonical closed triple set.
    #[serde(rename = "closed_set")]
    pub closed_set: TripleSet,
    /// Torus dimension minus the free kernel-torus directions.
    pub label: usize,
    #[serde(rename = "type")]
    pub type_vector: Vec<usize>,
    pub orbit_size: usize,
}

impl DegNode {
    fn build(closed_set: TripleSet, orbit_size: usize) -> Self {
        DegNode {
            name: String::new(),
            label: node_label(&closed_set),
            type_vector: components(&closed_set).type_vector().to_vec(),
            closed_set,
            orbit_size,
        }
    }

    /// `"<name> (t_n,...,t_1)"`, the caption used in DOT output.
    pub fn caption(&self) -> String {
        let ty: Vec<String> = self.type_vector.iter().map(|c| c.to_string()).collect();
        format!("{} ({})", self.name, ty.join(","))
    }
}

/// A transitively reduced degeneration graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegGraph {
    pub n: usize,
    pub nodes: Vec<DegNode>,
    /// `(from, to)` node indices: the torus of `to` lies strictly inside the
    /// torus of `from`.
    pub arrows: Vec<(usize, usize)>,
}

/// Ganter's next-closure: the lectically next closed set after `current`.
fn next_closed(current: u128, num: usize, close: &impl Fn(u128) -> u128) -> Option<u128> {
    let mut a = current;
    for i in (0..num).rev() {
        let bit = 1u128 << i;
        if a & bit != 0 {
            a &= !bit;
        } else {
            let b = close(a | bit);
            let low = bit - 1;
            if b & low == a & low {
                return Some(b);
            }
        }
    }
    None
}

/// Every closed triple set over `{0..=n}`, by next-closure traversal.
pub fn closed_sets(n: usize) -> Vec<TripleSet> {
    let num = layout(n).num_triples();
    let close = |bits: u128| closure(&TripleSet::from_bits(n, bits)).bits();
    let mut out = Vec::new();
    let mut current = close(0);
    loop {
        out.push(TripleSet::from_bits(n, current));
        match next_closed(current, num, &close) {
            Some(next) => current = next,
            None => break,
        }
    }
    out
}

/// Every closed triple set, by scanning all subsets. Only for small `n`.
pub fn closed_sets_by_scan(n: usize) -> Result<Vec<TripleSet>> {
    if n > QUICK_N {
        return Err(Error::DimensionTooLarge { n, max: QUICK_N });
    }
    let limit = full_mask(layout(n).num_triples());
    Ok((0..=limit)
        .map(|bits| TripleSet::from_bits(n, bits))
        .filter(|s| closure(s) == *s)
        .collect())
}

fn check_budget(n: usize, long: bool) -> Result<()> {
    let max = if long { MAX_ENUM_N } else { QUICK_N };
    if n > max {
        return Err(Error::DimensionTooLarge { n, max });
    }
    Ok(())
}

/// Nodes of the degeneration graph, ordered by `(label, closed set)`.
/// `long` admits `n = 5`.
pub fn enumerate_nodes(n: usize, long: bool) -> Result<Vec<DegNode>> {
    check_budget(n, long)?;
    let closed: Vec<u128> = closed_sets(n).iter().map(|s| s.bits()).collect();
    let mut nodes: Vec<DegNode> = orbits_of(n, &closed)?
        .into_iter()
        .map(|(bits, size)| DegNode::build(TripleSet::from_bits(n, bits), size))
        .collect();
    nodes.sort_by(|a, b| {
        a.label
            .cmp(&b.label)
            .then_with(|| crate::symmetry::lex_cmp(a.closed_set.bits(), b.closed_set.bits()))
    });
    assign_names(&mut nodes);
    Ok(nodes)
}

fn assign_names(nodes: &mut [DegNode]) {
    let mut per_label: BTreeMap<usize, usize> = BTreeMap::new();
    for node in nodes.iter() {
        *per_label.entry(node.label).or_default() += 1;
    }
    let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
    for node in nodes.iter_mut() {
        let pos = seen.entry(node.label).or_default();
        node.name = if per_label[&node.label] > 1 {
            format!("{}_{}", node.label, letter(*pos))
        } else {
            node.label.to_string()
        };
        *pos += 1;
    }
}

fn letter(pos: usize) -> String {
    let mut s = String::new();
    let mut p = pos;
    loop {
        s.insert(0, (b'a' + (p % 26) as u8) as char);
        if p < 26 {
            break;
        }
        p = p / 26 - 1;
    }
    s
}

/// Drops every arrow implied by a two-step path. `relation` must be a
/// strict partial order given as an adjacency matrix.
pub fn transitive_reduction(relation: &[Vec<bool>]) -> Vec<(usize, usize)> {
    let size = relation.len();
    let mut out = Vec::new();
    for u in 0..size {
        for v in 0..size {
            if relation[u][v] && !(0..size).any(|w| relation[u][w] && relation[w][v]) {
                out.push((u, v));
            }
        }
    }
    out
}

/// The degeneration graph for dimension `n`.
pub fn build_graph(n: usize, long: bool) -> Result<DegGraph> {
    let nodes = enumerate_nodes(n, long)?;
    graph_from_nodes(n, nodes)
}

/// Arrows between already enumerated nodes.
pub fn graph_from_nodes(n: usize, nodes: Vec<DegNode>) -> Result<DegGraph> {
    let group = symmetric_group(n)?;
    let orbits: Vec<Vec<u128>> = nodes
        .iter()
        .map(|node| group.orbit_bits(node.closed_set.bits()).into_iter().collect())
        .collect();
    let relation: Vec<Vec<bool>> = nodes
        .iter()
        .map(|u| {
            let ub = u.closed_set.bits();
            orbits
                .iter()
                .map(|images| {
                    images
                        .iter()
                        .any(|&img| img != ub && ub & !img == 0)
                })
                .collect()
        })
        .collect();
    let arrows = transitive_reduction(&relation);
    Ok(DegGraph { n, nodes, arrows })
}

impl DegGraph {
    pub fn successors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.arrows.iter().filter(move |a| a.0 == u).map(|a| a.1)
    }

    pub fn predecessors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.arrows.iter().filter(move |a| a.1 == v).map(|a| a.0)
    }

    /// Nodes without outgoing arrows.
    pub fn terminal_nodes(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&u| self.successors(u).next().is_none()).collect()
    }

    /// Nodes without incoming arrows.
    pub fn source_nodes(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&v| self.predecessors(v).next().is_none()).collect()
    }

    /// Nodes of label 0: families of the minimal dimension `n`.
    pub fn endpoints(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&u| self.nodes[u].label == 0).collect()
    }

    pub fn is_acyclic(&self) -> bool {
        // arrows only ever go to strictly larger closed sets
        self.arrows
            .iter()
            .all(|&(u, v)| self.nodes[u].closed_set.len() < self.nodes[v].closed_set.len())
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "digraph degeneration_p{} {{", self.n);
        let _ = writeln!(out, "  node [shape=plaintext];");
        for (idx, node) in self.nodes.iter().enumerate() {
            let _ = writeln!(out, "  n{idx} [label=\"{}\"];", node.caption());
        }
        for &(u, v) in &self.arrows {
            let _ = writeln!(out, "  n{u} -> n{v};");
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph serializes")
    }
}

/// Endpoints of the degeneration graph: nodes of label 0, i.e. closed sets
/// whose family is an orbit of the kernel torus (finitely many up to it).
pub fn sinks(n: usize, long: bool) -> Result<Vec<DegNode>> {
    Ok(enumerate_nodes(n, long)?.into_iter().filter(|node| node.label == 0).collect())
}

/// Points of the sub-torus cut out by a character subgroup, one per coset of
/// its identity component.
#[derive(Clone, Debug)]
pub struct SolutionSet {
    /// Dimension of each coset (number of free parameters).
    pub free_dimension: usize,
    /// Nontrivial invariant factors of the constraint lattice.
    pub torsion_orders: Vec<i64>,
    /// One matrix per coset; free parameters appear as generators `f0, f1, ...`.
    pub solutions: Vec<QMatrix>,
}

impl SolutionSet {
    pub fn is_finite(&self) -> bool {
        self.free_dimension == 0
    }
}

pub(crate) fn lcm(a: i64, b: i64) -> i64 {
    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 { a.abs() } else { gcd(b, a % b) }
    }
    a / gcd(a, b) * b
}

/// Builds the point of `V(M)` that sends the `i`-th torsion coordinate to
/// `w^{k_i m / d_i}` and the free coordinates to fresh generators.
pub(crate) fn torus_point(quotient: &Quotient, choice: &[i64], modulus: u32, free_prefix: &str) -> Result<QMatrix> {
    let n = quotient.n();
    let factors = quotient.invariant_factors();
    let r = factors.len();
    let free_names: Vec<String> = (0..quotient.free_rank()).map(|i| format!("{free_prefix}{i}")).collect();
    let table = GeneratorTable::new(free_names.iter().cloned(), modulus)?;
    let mut q = QMatrix::ones(n, table)?;
    let torsion_slots: Vec<usize> = (0..r).filter(|&i| factors[i] > 1).collect();
    for (p, &(i, j)) in layout(n).pairs().iter().enumerate() {
        let coords = quotient.basis_coordinates(p);
        let mut torsion = 0i64;
        for (slot, &c) in torsion_slots.iter().enumerate() {
            torsion += coords[c] * choice[slot] * (modulus as i64 / factors[c]);
        }
        let exponents = free_names.iter().enumerate().map(|(f, name)| (name.clone(), coords[r + f]));
        q.set(i, j, GroupScalar::from_parts(exponents, torsion, modulus))?;
    }
    Ok(q)
}

/// All tuples `k` with `0 <= k_i < orders[i]`, in lexicographic order.
pub(crate) fn torsion_choices(orders: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for &d in orders {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..d).map(move |k| {
                    let mut v = prefix.clone();
                    v.push(k);
                    v
                })
            })
            .collect();
    }
    out
}

/// Solves `b_t = 1` for `t in good` together with `q_p = 1` for the pinned
/// pairs, exactly, over roots of unity and free parameters.
pub fn forced_solutions(good: &TripleSet, normalization: &[(usize, usize)]) -> Result<SolutionSet> {
    let n = good.n();
    let lay = layout(n);
    let mut pinned = Vec::new();
    for &(i, j) in normalization {
        if i >= j || j > n {
            return Err(Error::InconsistentNormalization(format!("pair ({i},{j}) is not a valid i < j <= {n}")));
        }
        let mut e = CharVector::zero(n);
        let coords = {
            let mut c = e.coords().to_vec();
            c[lay.pair_index(i, j)] = 1;
            c
        };
        e = CharVector::from_coords(n, coords)?;
        pinned.push(e);
    }
    // each pin must use up one direction of the kernel torus, not constrain
    // the characters b_t themselves
    let all = span(&TripleSet::full(n));
    let with_pins = SubLattice::generated_by(n, all_chars(n).chain(pinned.iter().cloned()))?;
    if with_pins.rank() != all.rank() + pinned.len() {
        return Err(Error::InconsistentNormalization(
            "pinned entries are not independent modulo the triple characters".into(),
        ));
    }

    let constraints = SubLattice::generated_by(n, good.iter().map(|t| triple_char(t, n)).chain(pinned))?;
    let quotient = Quotient::of(&constraints)?;
    let orders = quotient.torsion_orders();
    let modulus = orders.iter().fold(DEFAULT_MODULUS as i64, |m, &d| lcm(m, d));
    let modulus = u32::try_from(modulus).map_err(|_| Error::Overflow)?;
    let solutions = torsion_choices(&orders)
        .iter()
        .map(|choice| torus_point(&quotient, choice, modulus, "f"))
        .collect::<Result<Vec<_>>>()?;
    Ok(SolutionSet {
        free_dimension: quotient.free_rank(),
        torsion_orders: orders,
        solutions,
    })
}

fn all_chars(n: usize) -> impl Iterator<Item = CharVector> {
    layout(n).triples().iter().map(move |&t| triple_char(t, n))
}

/// Pins `q_{i,n} = 1` for `i < n`, the gauge fixing of the kernel torus.
pub fn last_column_normalization(n: usize) -> Vec<(usize, usize)> {
    (0..n).map(|i| (i, n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::named;
    use crate::point_variety::good_triples;

    #[test]
    fn next_closure_agrees_with_scan() {
        for n in 2..=4 {
            let mut a: Vec<u128> = closed_sets(n).iter().map(|s| s.bits()).collect();
            let mut b: Vec<u128> = closed_sets_by_scan(n).unwrap().iter().map(|s| s.bits()).collect();
            a.sort_unstable();
            b.sort_unstable();
            assert_eq!(a, b, "n = {n}");
        }
    }

    #[test]
    fn p2_nodes() {
        let nodes = enumerate_nodes(2, false).unwrap();
        assert_eq!(nodes.len(), 2);
        assert_eq!((nodes[0].label, nodes[0].type_vector.clone()), (0, vec![1, 0]));
        assert_eq!((nodes[1].label, nodes[1].type_vector.clone()), (1, vec![0, 3]));
    }

    #[test]
    fn p3_chain() {
        let g = build_graph(3, false).unwrap();
        let summary: Vec<_> = g.nodes.iter().map(|v| (v.label, v.type_vector.clone())).collect();
        assert_eq!(
            summary,
            vec![(0, vec![1, 0, 0]), (1, vec![0, 2, 1]), (2, vec![0, 1, 3]), (3, vec![0, 0, 6])]
        );
        let mut arrows = g.arrows.clone();
        arrows.sort();
        assert_eq!(arrows, vec![(1, 0), (2, 1), (3, 2)]);
        assert_eq!(g.terminal_nodes(), vec![0]);
        assert_eq!(g.source_nodes(), vec![3]);
    }

    #[test]
    fn budget() {
        assert!(enumerate_nodes(5, false).is_err());
        assert!(enumerate_nodes(6, true).is_err());
    }

    #[test]
    fn reduction_of_chain() {
        let rel = vec![
            vec![false, true, true],
            vec![false, false, true],
            vec![false, false, false],
        ];
        assert_eq!(transitive_reduction(&rel), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn letters() {
        assert_eq!(letter(0), "a");
        assert_eq!(letter(25), "z");
        assert_eq!(letter(26), "aa");
    }

    #[test]
    fn forced_values_for_ten_planes() {
        let sol = forced_solutions(&named::ten_planes_good_set(), &last_column_normalization(5)).unwrap();
        assert!(sol.is_finite());
        assert_eq!(sol.torsion_orders, vec![2]);
        assert_eq!(sol.solutions.len(), 2);
        let mut signs = Vec::new();
        for q in &sol.solutions {
            for (i, j) in [(0, 2), (1, 3), (2, 4), (0, 3), (1, 4)] {
                assert!(q.entry(i, j).unwrap().is_one());
            }
            let a = q.entry(0, 1).unwrap();
            assert_eq!(q.entry(2, 3).unwrap(), a);
            for (i, j) in [(1, 2), (3, 4), (0, 4)] {
                assert_eq!(q.entry(i, j).unwrap(), a.inverse());
            }
            assert_eq!(a.try_mul(&a).unwrap(), GroupScalar::one(2));
            signs.push(a.torsion());
        }
        signs.sort();
        assert_eq!(signs, vec![0, 1]);
        // the nontrivial solution has exactly the ten planes
        let minus = sol.solutions.iter().find(|q| !q.entry(0, 1).unwrap().is_one()).unwrap();
        assert_eq!(good_triples(minus), named::ten_planes_good_set());
    }

    #[test]
    fn forced_values_for_commutative() {
        let sol = forced_solutions(&TripleSet::full(4), &last_column_normalization(4)).unwrap();
        assert!(sol.is_finite());
        assert_eq!(sol.solutions.len(), 1);
        assert_eq!(good_triples(&sol.solutions[0]), TripleSet::full(4));
        assert!(layout(4).pairs().iter().all(|&(i, j)| sol.solutions[0].entry(i, j).unwrap().is_one()));
    }

    #[test]
    fn forced_values_for_empty() {
        let sol = forced_solutions(&TripleSet::empty(3), &[]).unwrap();
        assert_eq!(sol.free_dimension, 6);
        assert_eq!(sol.solutions.len(), 1);
        assert!(good_triples(&sol.solutions[0]).is_empty());
    }

    #[test]
    fn forced_rejects_bad_pins() {
        assert!(matches!(
            forced_solutions(&TripleSet::empty(3), &[(2, 1)]),
            Err(Error::InconsistentNormalization(_))
        ));
        // pinning a whole triangle constrains b_012, not just the gauge
        assert!(matches!(
            forced_solutions(&TripleSet::empty(3), &[(0, 1), (1, 2), (0, 2)]),
            Err(Error::InconsistentNormalization(_))
        ));
    }
}
