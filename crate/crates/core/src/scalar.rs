//! Exact arithmetic for the parameters `q_ij`.
//!
//! Every entry of a defining matrix is an element of a finitely generated
//! abelian group `Z^{generators} x Z/m`, written multiplicatively: a sparse
//! exponent vector over named free generators times a power of a primitive
//! `m`-th root of unity `w`. Equality of scalars is structural equality of
//! canonical forms, so every rank-one test is an exact group identity.
//! A "generic" value is simply a generator that occurs nowhere else.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::triples::{check_dimension, layout, Triple};

/// Name reserved for the distinguished root of unity in compact strings.
pub const TORSION_SYMBOL: &str = "w";

/// Default torsion modulus: `w = -1`.
pub const DEFAULT_MODULUS: u32 = 2;

/// The free generators and torsion order of a scalar group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorTable {
    names: Vec<String>,
    torsion_modulus: u32,
}

impl GeneratorTable {
    pub fn new<I, S>(names: I, torsion_modulus: u32) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        if torsion_modulus == 0 {
            return Err(Error::InvalidTable("torsion modulus must be positive".into()));
        }
        let mut table = GeneratorTable {
            names: Vec::new(),
            torsion_modulus,
        };
        for name in names {
            table.add(name.into())?;
        }
        Ok(table)
    }

    /// Table with no free generators.
    pub fn torsion_only(torsion_modulus: u32) -> Result<Self> {
        GeneratorTable::new(Vec::<String>::new(), torsion_modulus)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn torsion_modulus(&self) -> u32 {
        self.torsion_modulus
    }

    pub fn contains(&self, name: &str) -> bool {
        self.names.iter().any(|n| n == name)
    }

    /// Registers a new generator. Duplicates and the torsion symbol are rejected.
    pub fn add(&mut self, name: String) -> Result<()> {
        if !valid_name(&name) || name == TORSION_SYMBOL {
            return Err(Error::InvalidTable(format!("invalid generator name `{name}`")));
        }
        if self.contains(&name) {
            return Err(Error::InvalidTable(format!("duplicate generator `{name}`")));
        }
        self.names.push(name);
        Ok(())
    }

    /// Union of two tables over the same torsion modulus.
    pub fn merged(&self, other: &GeneratorTable) -> Result<GeneratorTable> {
        if self.torsion_modulus != other.torsion_modulus {
            return Err(Error::ModulusMismatch(self.torsion_modulus, other.torsion_modulus));
        }
        let mut out = self.clone();
        for name in &other.names {
            if !out.contains(name) {
                out.names.push(name.clone());
            }
        }
        Ok(out)
    }

    /// Checks that `s` is an element of the group this table describes.
    pub fn validate(&self, s: &GroupScalar) -> Result<()> {
        if s.modulus != self.torsion_modulus {
            return Err(Error::ModulusMismatch(s.modulus, self.torsion_modulus));
        }
        for name in s.exponents.keys() {
            if !self.contains(name) {
                return Err(Error::UnknownGenerator(name.clone()));
            }
        }
        Ok(())
    }

    /// Product of two scalars, both of which must belong to this table.
    pub fn mul(&self, a: &GroupScalar, b: &GroupScalar) -> Result<GroupScalar> {
        self.validate(a)?;
        self.validate(b)?;
        a.try_mul(b)
    }
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

/// An element `w^torsion * prod g^e` of `Z^{generators} x Z/m`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupScalar {
    exponents: BTreeMap<String, i64>,
    torsion: u32,
    modulus: u32,
}

impl GroupScalar {
    pub fn one(modulus: u32) -> Self {
        assert!(modulus > 0, "torsion modulus must be positive");
        GroupScalar {
            exponents: BTreeMap::new(),
            torsion: 0,
            modulus,
        }
    }

    pub fn generator(name: impl Into<String>, modulus: u32) -> Self {
        GroupScalar::generator_pow(name, 1, modulus)
    }

    pub fn generator_pow(name: impl Into<String>, exponent: i64, modulus: u32) -> Self {
        let mut s = GroupScalar::one(modulus);
        if exponent != 0 {
            s.exponents.insert(name.into(), exponent);
        }
        s
    }

    /// `w^k`, a power of the distinguished root of unity.
    pub fn root_of_unity(k: i64, modulus: u32) -> Self {
        let mut s = GroupScalar::one(modulus);
        s.torsion = k.rem_euclid(modulus as i64) as u32;
        s
    }

    /// `-1`, available when the modulus is even.
    pub fn minus_one(modulus: u32) -> Result<Self> {
        if !modulus.is_multiple_of(2) {
            return Err(Error::Parse(format!("-1 is not in Z/{modulus}")));
        }
        Ok(GroupScalar::root_of_unity((modulus / 2) as i64, modulus))
    }

    /// Canonicalizing constructor: zero exponents are dropped, torsion reduced.
    pub fn from_parts<I, S>(exponents: I, torsion: i64, modulus: u32) -> Self
    where
        I: IntoIterator<Item = (S, i64)>,
        S: Into<String>,
    {
        let mut s = GroupScalar::root_of_unity(torsion, modulus);
        for (name, e) in exponents {
            *s.exponents.entry(name.into()).or_insert(0) += e;
        }
        s.exponents.retain(|_, e| *e != 0);
        s
    }

    pub fn exponents(&self) -> &BTreeMap<String, i64> {
        &self.exponents
    }

    pub fn exponent(&self, name: &str) -> i64 {
        self.exponents.get(name).copied().unwrap_or(0)
    }

    pub fn torsion(&self) -> u32 {
        self.torsion
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn is_one(&self) -> bool {
        self.exponents.is_empty() && self.torsion == 0
    }

    pub fn try_mul(&self, other: &GroupScalar) -> Result<GroupScalar> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch(self.modulus, other.modulus));
        }
        Ok(self.combine(other, 1))
    }

    /// `self * other^sign`; moduli must agree.
    pub(crate) fn combine(&self, other: &GroupScalar, sign: i64) -> GroupScalar {
        debug_assert_eq!(self.modulus, other.modulus);
        let mut out = self.clone();
        for (name, e) in &other.exponents {
            let slot = out.exponents.entry(name.clone()).or_insert(0);
            *slot += sign * e;
            if *slot == 0 {
                out.exponents.remove(name);
            }
        }
        let m = self.modulus as i64;
        out.torsion = (self.torsion as i64 + sign * other.torsion as i64).rem_euclid(m) as u32;
        out
    }

    pub fn inverse(&self) -> GroupScalar {
        self.pow(-1)
    }

    pub fn pow(&self, e: i64) -> GroupScalar {
        if e == 0 {
            return GroupScalar::one(self.modulus);
        }
        GroupScalar {
            exponents: self.exponents.iter().map(|(k, v)| (k.clone(), v * e)).collect(),
            torsion: (self.torsion as i64 * e).rem_euclid(self.modulus as i64) as u32,
            modulus: self.modulus,
        }
    }

    /// Parses the compact form, e.g. `a*b^-1*w`, `w^3`, `-1` or `1`.
    pub fn parse(text: &str, modulus: u32) -> Result<GroupScalar> {
        let text = text.trim();
        let mut out = GroupScalar::one(modulus);
        if text.is_empty() {
            return Err(Error::Parse("empty scalar".into()));
        }
        for token in text.split('*') {
            let token = token.trim();
            let factor = match token {
                "1" => GroupScalar::one(modulus),
                "-1" => GroupScalar::minus_one(modulus)?,
                _ => {
                    let (base, exp) = match token.split_once('^') {
                        Some((b, e)) => {
                            let e = e
                                .trim()
                                .parse::<i64>()
                                .map_err(|_| Error::Parse(format!("bad exponent in `{token}`")))?;
                            (b.trim(), e)
                        }
                        None => (token, 1),
                    };
                    if base == TORSION_SYMBOL {
                        GroupScalar::root_of_unity(exp, modulus)
                    } else if valid_name(base) {
                        GroupScalar::generator_pow(base, exp, modulus)
                    } else {
                        return Err(Error::Parse(format!("bad factor `{token}`")));
                    }
                }
            };
            out = out.combine(&factor, 1);
        }
        Ok(out)
    }

    /// Value under an assignment of nonzero rationals, with `w = -1`.
    pub fn evaluate(&self, assignment: &BTreeMap<String, BigRational>) -> Result<BigRational> {
        let mut value = match (self.modulus, self.torsion) {
            (_, 0) => BigRational::one(),
            (2, 1) => -BigRational::one(),
            (m, _) => return Err(Error::TorsionNotRational(m)),
        };
        for (name, &e) in &self.exponents {
            let base = assignment
                .get(name)
                .ok_or_else(|| Error::MissingAssignment(name.clone()))?;
            if base.is_zero() {
                return Err(Error::ZeroAssignment(name.clone()));
            }
            let p = pow_rational(base, e.unsigned_abs());
            value *= if e < 0 { p.recip() } else { p };
        }
        Ok(value)
    }
}

fn pow_rational(base: &BigRational, e: u64) -> BigRational {
    let mut acc = BigRational::one();
    let mut b = base.clone();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &b;
        }
        b = &b * &b;
        e >>= 1;
    }
    acc
}

impl fmt::Display for GroupScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut factors = Vec::new();
        for (name, &e) in &self.exponents {
            factors.push(if e == 1 { name.clone() } else { format!("{name}^{e}") });
        }
        match self.torsion {
            0 => {}
            1 => factors.push(TORSION_SYMBOL.to_string()),
            k => factors.push(format!("{TORSION_SYMBOL}^{k}")),
        }
        write!(f, "{}", factors.join("*"))
    }
}

impl fmt::Debug for GroupScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} (mod {})", self.modulus)
    }
}

/// Product of two scalars over a shared generator table.
pub fn scalar_mul(table: &GeneratorTable, a: &GroupScalar, b: &GroupScalar) -> Result<GroupScalar> {
    table.mul(a, b)
}

/// A multiplicatively antisymmetric `(n+1) x (n+1)` matrix: only the strict
/// upper triangle is stored, `q_ii = 1` and `q_ji = q_ij^-1` are implied.
#[derive(Clone, PartialEq, Eq)]
pub struct QMatrix {
    n: usize,
    upper: Vec<GroupScalar>,
    table: GeneratorTable,
}

impl QMatrix {
    /// The commutative matrix (all entries 1).
    pub fn ones(n: usize, table: GeneratorTable) -> Result<Self> {
        check_dimension(n)?;
        let m = table.torsion_modulus();
        Ok(QMatrix {
            n,
            upper: vec![GroupScalar::one(m); layout(n).num_pairs()],
            table,
        })
    }

    /// Builds a matrix from its strict upper triangle; missing entries are 1.
    pub fn from_upper(
        n: usize,
        table: GeneratorTable,
        entries: impl IntoIterator<Item = ((usize, usize), GroupScalar)>,
    ) -> Result<Self> {
        let mut q = QMatrix::ones(n, table)?;
        for ((i, j), s) in entries {
            q.set(i, j, s)?;
        }
        Ok(q)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn table(&self) -> &GeneratorTable {
        &self.table
    }

    pub fn modulus(&self) -> u32 {
        self.table.torsion_modulus()
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i > self.n {
            Err(Error::IndexOutOfRange { index: i, n: self.n })
        } else {
            Ok(())
        }
    }

    /// Sets `q_ij` for `i < j` (and therefore `q_ji`).
    pub fn set(&mut self, i: usize, j: usize, value: GroupScalar) -> Result<()> {
        self.check_index(i)?;
        self.check_index(j)?;
        if i >= j {
            return Err(Error::Precondition(format!("upper entry needs i < j, got ({i},{j})")));
        }
        self.table.validate(&value)?;
        let idx = layout(self.n).pair_index(i, j);
        self.upper[idx] = value;
        Ok(())
    }

    /// `q_ij` for any `0 <= i, j <= n`.
    pub fn entry(&self, i: usize, j: usize) -> Result<GroupScalar> {
        self.check_index(i)?;
        self.check_index(j)?;
        Ok(self.entry_unchecked(i, j))
    }

    pub(crate) fn entry_unchecked(&self, i: usize, j: usize) -> GroupScalar {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => GroupScalar::one(self.modulus()),
            std::cmp::Ordering::Less => self.upper[layout(self.n).pair_index(i, j)].clone(),
            std::cmp::Ordering::Greater => self.upper[layout(self.n).pair_index(i, j)].inverse(),
        }
    }

    /// Upper entry `q_ij`, `i < j`, by reference.
    pub fn upper(&self, i: usize, j: usize) -> &GroupScalar {
        debug_assert!(i < j && j <= self.n);
        &self.upper[layout(self.n).pair_index(i, j)]
    }

    /// `b_ijk = q_ij q_jk q_ik^-1`; equals 1 exactly when the principal minor
    /// on `{i, j, k}` has rank one.
    pub fn b_scalar(&self, t: Triple) -> GroupScalar {
        let [i, j, k] = t.indices();
        self.upper(i, j)
            .combine(self.upper(j, k), 1)
            .combine(self.upper(i, k), -1)
    }

    /// The matrix `Q'` with `q'_{p(i) p(j)} = q_ij`.
    pub fn permuted(&self, perm: &[usize]) -> Result<QMatrix> {
        let mut out = QMatrix::ones(self.n, self.table.clone())?;
        for i in 0..=self.n {
            for j in i + 1..=self.n {
                let (a, b) = (perm[i], perm[j]);
                let v = self.upper(i, j).clone();
                if a < b {
                    out.set(a, b, v)?;
                } else {
                    out.set(b, a, v.inverse())?;
                }
            }
        }
        Ok(out)
    }

    /// Exact rational matrix under `assignment`, reading `w` as `-1`.
    pub fn instantiate(&self, assignment: &BTreeMap<String, BigRational>) -> Result<Vec<Vec<BigRational>>> {
        let m = self.modulus();
        if m > 2 {
            return Err(Error::TorsionNotRational(m));
        }
        for name in self.table.names() {
            match assignment.get(name) {
                None => return Err(Error::MissingAssignment(name.clone())),
                Some(v) if v.is_zero() => return Err(Error::ZeroAssignment(name.clone())),
                _ => {}
            }
        }
        let size = self.n + 1;
        let mut out = vec![vec![BigRational::one(); size]; size];
        for i in 0..size {
            for j in i + 1..size {
                let v = self.upper(i, j).evaluate(assignment)?;
                out[j][i] = v.recip();
                out[i][j] = v;
            }
        }
        Ok(out)
    }

    pub fn to_file(&self) -> MatrixFile {
        let mut upper = BTreeMap::new();
        for &(i, j) in layout(self.n).pairs() {
            let s = self.upper(i, j);
            upper.insert(
                format!("{i},{j}"),
                EntryRepr::Full {
                    torsion: s.torsion() as i64,
                    exponents: s.exponents().clone(),
                },
            );
        }
        MatrixFile {
            n: self.n,
            torsion_modulus: self.modulus(),
            generators: self.table.names().to_vec(),
            upper,
        }
    }

    pub fn from_file(file: &MatrixFile) -> Result<QMatrix> {
        let table = GeneratorTable::new(file.generators.iter().cloned(), file.torsion_modulus)?;
        let m = file.torsion_modulus;
        let mut q = QMatrix::ones(file.n, table)?;
        for (key, repr) in &file.upper {
            let (i, j) = parse_pair_key(key)?;
            let value = match repr {
                EntryRepr::Compact(text) => GroupScalar::parse(text, m)?,
                EntryRepr::Full { torsion, exponents } => {
                    GroupScalar::from_parts(exponents.iter().map(|(k, v)| (k.clone(), *v)), *torsion, m)
                }
            };
            q.set(i, j, value)?;
        }
        Ok(q)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("matrix serializes")
    }

    pub fn from_json(text: &str) -> Result<QMatrix> {
        let file: MatrixFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        QMatrix::from_file(&file)
    }
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "QMatrix n={} over {:?}", self.n, self.table)?;
        write!(f, "{self}")
    }
}

impl fmt::Display for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<Vec<String>> = (0..=self.n)
            .map(|i| (0..=self.n).map(|j| self.entry_unchecked(i, j).to_string()).collect())
            .collect();
        let width = cells.iter().flatten().map(|c| c.len()).max().unwrap_or(1);
        for row in cells {
            let line: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
            writeln!(f, "[ {} ]", line.join("  "))?;
        }
        Ok(())
    }
}

fn parse_pair_key(key: &str) -> Result<(usize, usize)> {
    let bad = || Error::Parse(format!("bad entry key `{key}`, expected \"i,j\""));
    let (a, b) = key.split_once(',').ok_or_else(bad)?;
    let i = a.trim().parse().map_err(|_| bad())?;
    let j = b.trim().parse().map_err(|_| bad())?;
    Ok((i, j))
}

/// On-disk JSON layout of a defining matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub n: usize,
    pub torsion_modulus: u32,
    #[serde(default)]
    pub generators: Vec<String>,
    #[serde(default)]
    pub upper: BTreeMap<String, EntryRepr>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EntryRepr {
    Compact(String),
    Full {
        #[serde(default)]
        torsion: i64,
        #[serde(default)]
        exponents: BTreeMap<String, i64>,
    },
}

/// Integer helper for building rational assignments.
pub fn rational(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// `b_ijk` of an instantiated matrix.
pub fn rational_b(matrix: &[Vec<BigRational>], t: Triple) -> BigRational {
    let [i, j, k] = t.indices();
    &matrix[i][j] * &matrix[j][k] / &matrix[i][k]
}

/// True when all entries are nonzero and `m_ji = m_ij^-1`, `m_ii = 1`.
pub fn is_antisymmetric(matrix: &[Vec<BigRational>]) -> bool {
    let size = matrix.len();
    (0..size).all(|i| {
        matrix[i][i].is_one()
            && (0..size).all(|j| !matrix[i][j].is_zero() && (&matrix[i][j] * &matrix[j][i]).is_one())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::named;

    fn g(name: &str) -> GroupScalar {
        GroupScalar::generator(name, 2)
    }

    #[test]
    fn inverse_pair_multiplies_to_one() {
        let x = g("x");
        assert!(x.try_mul(&x.inverse()).unwrap().is_one());
    }

    #[test]
    fn torsion_order_two() {
        let w = GroupScalar::root_of_unity(1, 2);
        assert!(w.try_mul(&w).unwrap().is_one());
        assert_eq!(GroupScalar::minus_one(2).unwrap(), w);
    }

    #[test]
    fn exponent_addition() {
        let lhs = g("a").combine(&g("b"), -1);
        let rhs = g("b").combine(&g("c"), 1);
        let prod = lhs.try_mul(&rhs).unwrap();
        assert_eq!(prod, GroupScalar::from_parts([("a", 1), ("c", 1)], 0, 2));
        assert_eq!(prod.exponent("b"), 0);
        assert!(!prod.exponents().contains_key("b"));
    }

    #[test]
    fn table_mul_rejects_foreign_scalars() {
        let table = GeneratorTable::new(["a", "b"], 2).unwrap();
        assert!(scalar_mul(&table, &g("a"), &g("b")).is_ok());
        assert!(matches!(scalar_mul(&table, &g("a"), &g("z")), Err(Error::UnknownGenerator(_))));
        let other = GroupScalar::generator("a", 3);
        assert!(matches!(scalar_mul(&table, &g("a"), &other), Err(Error::ModulusMismatch(_, _))));
        assert!(g("a").try_mul(&other).is_err());
    }

    #[test]
    fn table_validation() {
        assert!(GeneratorTable::new(["a", "a"], 2).is_err());
        assert!(GeneratorTable::new(["w"], 2).is_err());
        assert!(GeneratorTable::new(["a"], 0).is_err());
        assert!(GeneratorTable::new(["2x"], 2).is_err());
    }

    #[test]
    fn compact_round_trip() {
        let s = GroupScalar::parse("a*b^-1*w", 2).unwrap();
        assert_eq!(s.exponent("a"), 1);
        assert_eq!(s.exponent("b"), -1);
        assert_eq!(s.torsion(), 1);
        assert_eq!(s.to_string(), "a*b^-1*w");
        assert_eq!(GroupScalar::parse(&s.to_string(), 2).unwrap(), s);
        assert!(GroupScalar::parse("a*a^-1", 2).unwrap().is_one());
        assert_eq!(GroupScalar::parse("w^3", 4).unwrap().torsion(), 3);
        assert_eq!(GroupScalar::parse("-1", 4).unwrap().torsion(), 2);
        assert!(GroupScalar::parse("-1", 3).is_err());
        assert!(GroupScalar::parse("a^x", 2).is_err());
        assert!(GroupScalar::parse("", 2).is_err());
    }

    #[test]
    fn entries_of_two_plane_matrix() {
        let q = named::two_planes_p3();
        assert_eq!(q.entry(0, 1).unwrap(), g("a"));
        assert!(q.entry(2, 2).unwrap().is_one());
        assert_eq!(q.entry(1, 0).unwrap(), g("a").inverse());
        assert!(q.entry(0, 4).is_err());
    }

    #[test]
    fn b_scalar_examples() {
        let q = named::two_planes_p3();
        assert!(q.b_scalar(Triple::new(0, 1, 2).unwrap()).is_one());
        let b013 = q.b_scalar(Triple::new(0, 1, 3).unwrap());
        assert_eq!(b013, GroupScalar::from_parts([("a", 1), ("c", 1), ("x", -1)], 0, 2));
        let ones = QMatrix::ones(4, GeneratorTable::torsion_only(2).unwrap()).unwrap();
        assert!(layout(4).triples().iter().all(|&t| ones.b_scalar(t).is_one()));
    }

    #[test]
    fn instantiate_substitutes() {
        let q = named::two_planes_p3();
        let assignment: BTreeMap<String, BigRational> = [("a", 2), ("b", 3), ("c", 5), ("x", 7)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), rational(v)))
            .collect();
        let m = q.instantiate(&assignment).unwrap();
        assert_eq!(m[0][3], rational(7));
        assert!(is_antisymmetric(&m));

        // x = ac forces b_013 = 1, matching the symbolic specialization
        let mut special = assignment.clone();
        special.insert("x".into(), rational(10));
        let m = q.instantiate(&special).unwrap();
        assert!(rational_b(&m, Triple::new(0, 1, 3).unwrap()).is_one());

        let mut missing = assignment.clone();
        missing.remove("c");
        assert!(matches!(q.instantiate(&missing), Err(Error::MissingAssignment(_))));
        missing.insert("c".into(), rational(0));
        assert!(matches!(q.instantiate(&missing), Err(Error::ZeroAssignment(_))));
    }

    #[test]
    fn instantiate_sign_matrix() {
        let q = named::ten_planes_p5();
        let m = q.instantiate(&BTreeMap::new()).unwrap();
        let printed = [
            [1, -1, 1, 1, -1, 1],
            [-1, 1, -1, 1, 1, 1],
            [1, -1, 1, -1, 1, 1],
            [1, 1, -1, 1, -1, 1],
            [-1, 1, 1, -1, 1, 1],
            [1, 1, 1, 1, 1, 1],
        ];
        for i in 0..6 {
            for j in 0..6 {
                assert_eq!(m[i][j], rational(printed[i][j]), "entry ({i},{j})");
            }
        }
    }

    #[test]
    fn instantiate_rejects_higher_torsion() {
        let q = QMatrix::ones(2, GeneratorTable::torsion_only(3).unwrap()).unwrap();
        assert!(matches!(q.instantiate(&BTreeMap::new()), Err(Error::TorsionNotRational(3))));
    }

    #[test]
    fn json_round_trip_and_compact_input() {
        let q = named::two_planes_p3();
        let back = QMatrix::from_json(&q.to_json()).unwrap();
        assert_eq!(back, q);

        let text = r#"{"n": 2, "torsion_modulus": 2, "generators": ["a", "b"],
                      "upper": {"0,1": "a*b^-1*w", "1,2": {"torsion": 3, "exponents": {"b": 2, "a": 0}}}}"#;
        let q = QMatrix::from_json(text).unwrap();
        assert_eq!(q.entry(0, 1).unwrap().to_string(), "a*b^-1*w");
        assert_eq!(q.entry(1, 2).unwrap().to_string(), "b^2*w");
        assert!(q.entry(0, 2).unwrap().is_one());

        let unknown = r#"{"n": 2, "torsion_modulus": 2, "generators": [], "upper": {"0,1": "z"}}"#;
        assert!(matches!(QMatrix::from_json(unknown), Err(Error::UnknownGenerator(_))));
        let lower = r#"{"n": 2, "torsion_modulus": 2, "upper": {"1,0": "1"}}"#;
        assert!(QMatrix::from_json(lower).is_err());
    }

    #[test]
    fn permuting_relabels_good_triples() {
        let q = named::two_planes_p3();
        let p = q.permuted(&[3, 2, 1, 0]).unwrap();
        // (0,1,2) -> (1,2,3), (1,2,3) -> (0,1,2)
        assert!(p.b_scalar(Triple::new(1, 2, 3).unwrap()).is_one());
        assert!(p.b_scalar(Triple::new(0, 1, 2).unwrap()).is_one());
        assert!(!p.b_scalar(Triple::new(0, 1, 3).unwrap()).is_one());
        assert_eq!(p.entry(3, 2).unwrap(), q.entry(0, 1).unwrap());
    }
}
