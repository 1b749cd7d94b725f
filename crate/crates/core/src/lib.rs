//! Exact lattice machinery for certifying upper bounds on the chromatic
//! number of Euclidean space via sublattice colorings.
//!
//! The pipeline: build a lattice (catalog or file), compute its Voronoi
//! cell and covering radius exactly, derive the forbidden node set, then
//! verify candidate sublattices against it or search for low-index ones.
//! A separate rule engine certifies dilation, Eisenstein, lattice-sum and
//! laminated-recursion bounds that need no cell computations.

// Index-style loops mirror the matrix notation throughout.
#![allow(clippy::needless_range_loop)]

pub mod bounds;
pub mod error;
pub mod exactlin;
pub mod forbidden;
pub mod lattice;
pub mod polytope;
pub mod search;
pub mod subverify;
pub mod symmetry;

pub use error::{Error, Result};
