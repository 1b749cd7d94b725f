//! Exact rational and integer linear algebra: solving, determinants,
//! inverses, the Moore-Penrose pseudoinverse for full-column-rank matrices,
//! and the near-symmetric column Hermite normal form.

mod hnf;
mod matrix;
mod rat;

pub use hnf::{hnf_basis_of_generators, hnf_modified, IntMatrix};
pub use matrix::{
    determinant, dot, inverse, pseudoinverse, rational_four_squares, solve, vec_add, vec_scale,
    vec_sub, RatMatrix, RatVector,
};
pub use rat::Rat;
