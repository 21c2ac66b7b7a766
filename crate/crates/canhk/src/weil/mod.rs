//! Fiberwise Weil algebra: free graded-commutative algebra on symmetric
//! and exterior generator families, graded derivations with both gradings
//! tracked, and the curvature-driven construction of the square-zero
//! derivation.

pub mod derivation;
pub mod element;
pub mod grading;
pub mod recursion;

pub use derivation::{check_weakly_hodge, dump_derivation, GradedDerivation, Parity};
pub use element::{Monomial, WeilElement};
pub use grading::{boundary_injectivity, enumerate_pieces, piece_basis, BoundaryComponent, PieceId};
pub use recursion::{
    anticommutator_sigma_matrix, curvature_action, d2_from_curvature, even_step, odd_step,
    sigma_d_residual, verify_d_square, DSeries, ModuleMatrix, RecursionError,
};
