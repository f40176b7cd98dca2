//! Point varieties of quantum polynomial algebras.
//!
//! A quantum polynomial algebra on `n + 1` variables is given by a
//! multiplicatively antisymmetric matrix `Q`. Its reduced point variety is a
//! union of coordinate subspaces of `P^n` determined by which principal
//! `3 x 3` minors of `Q` have rank one. This crate computes those varieties
//! exactly, classifies which configurations can occur, builds the
//! degeneration graphs between them and constructs matrices realizing a
//! given configuration.

pub mod collections;
pub mod degeneration;
pub mod error;
pub mod lattice;
pub mod named;
pub mod point_variety;
pub mod realize;
pub mod scalar;
pub mod symmetry;
pub mod triples;

pub use collections::{Collection, OrbitCatalog};
pub use degeneration::{DegGraph, DegNode};
pub use error::{Error, Result};
pub use lattice::{CharVector, SubLattice};
pub use point_variety::{Configuration, Flat};
pub use realize::RealizationResult;
pub use scalar::{GeneratorTable, GroupScalar, QMatrix};
pub use triples::{Triple, TripleSet};
