//! Fixed matrices and collections with known point varieties.

use crate::scalar::{GeneratorTable, GroupScalar, QMatrix, DEFAULT_MODULUS};
use crate::triples::TripleSet;

const M: u32 = DEFAULT_MODULUS;

fn parse(s: &str) -> GroupScalar {
    GroupScalar::parse(s, M).expect("literal scalar")
}

/// Four variables, generic `a, b, c, x`: the point variety is
/// `P(0,1,2) u P(1,2,3) u P(0,3)`; setting `x = ac` makes it all of `P^3`.
pub fn two_planes_p3() -> QMatrix {
    let table = GeneratorTable::new(["a", "b", "c", "x"], M).expect("table");
    QMatrix::from_upper(
        3,
        table,
        [
            ((0, 1), parse("a")),
            ((0, 2), parse("b")),
            ((0, 3), parse("x")),
            ((1, 2), parse("a^-1*b")),
            ((1, 3), parse("c")),
            ((2, 3), parse("a*b^-1*c")),
        ],
    )
    .expect("valid matrix")
}

/// Six variables in blocks `{0,1}, {2,3}, {4,5}`; `q_ij = x` between the
/// first and last block, 1 elsewhere. Point variety: three `P^3`'s.
pub fn three_solids_p5() -> QMatrix {
    three_solids_p5_with("x")
}

pub fn three_solids_p5_with(generator: &str) -> QMatrix {
    let table = GeneratorTable::new([generator], M).expect("table");
    let x = GroupScalar::generator(generator, M);
    QMatrix::from_upper(
        5,
        table,
        [(0, 4), (0, 5), (1, 4), (1, 5)].map(|p| (p, x.clone())),
    )
    .expect("valid matrix")
}

/// Six variables, all entries `+-1`: exactly ten coordinate planes.
pub fn ten_planes_p5() -> QMatrix {
    let table = GeneratorTable::torsion_only(M).expect("table");
    let minus = GroupScalar::minus_one(M).expect("even modulus");
    QMatrix::from_upper(
        5,
        table,
        [(0, 1), (0, 4), (1, 2), (2, 3), (3, 4)].map(|p| (p, minus.clone())),
    )
    .expect("valid matrix")
}

/// The complement of the good triples of [`three_solids_p5`]: adequate but
/// not dense.
pub fn three_solids_collection() -> TripleSet {
    TripleSet::from_arrays(
        5,
        &[
            [0, 2, 4],
            [0, 2, 5],
            [0, 3, 4],
            [0, 3, 5],
            [1, 2, 4],
            [1, 2, 5],
            [1, 3, 4],
            [1, 3, 5],
        ],
    )
    .expect("valid triples")
}

/// The complement of the good triples of [`ten_planes_p5`]: adequate but not
/// dense.
pub fn ten_planes_collection() -> TripleSet {
    TripleSet::from_arrays(
        5,
        &[
            [0, 1, 3],
            [0, 1, 5],
            [0, 2, 4],
            [0, 4, 5],
            [0, 2, 3],
            [1, 2, 4],
            [1, 2, 5],
            [1, 3, 4],
            [2, 3, 5],
            [3, 4, 5],
        ],
    )
    .expect("valid triples")
}

/// The ten planes contained in the point variety of [`ten_planes_p5`].
pub fn ten_planes_good_set() -> TripleSet {
    TripleSet::from_arrays(
        5,
        &[
            [0, 1, 2],
            [1, 2, 3],
            [2, 3, 4],
            [0, 3, 4],
            [0, 1, 4],
            [0, 2, 5],
            [1, 3, 5],
            [2, 4, 5],
            [0, 3, 5],
            [1, 4, 5],
        ],
    )
    .expect("valid triples")
}
