//! Canonical hypercomplex structure on the total space of the conjugate
//! tangent bundle of a Kähler manifold.
//!
//! The crate has four computational layers:
//!
//! * [`fgen`] — the generating function `f` of the fiberwise recursion,
//!   with exact rational coefficients, its defining recurrence and ODE
//!   residuals, and evaluation on scalars and endomorphisms.
//! * [`weil`] — the fiberwise Weil algebra: a free graded-commutative
//!   algebra on symmetric and exterior generators, graded derivations on
//!   it, the operators `C` and `sigma`, and the degree-by-degree
//!   construction of the square-zero derivation `D` from curvature data.
//! * [`geometry`] — point models of constant-holomorphic-sectional-curvature
//!   Kähler manifolds with validated curvature symmetries, affine-chart
//!   metric/connection data, and the curvature operator `A`.
//! * [`hstruct`] — the field-level structure on the total space: the
//!   endomorphism triple `(I, J, K)` over chart points, normalization and
//!   integrability residuals, and the empirical selection of the series
//!   variant and contraction convention.
//!
//! [`report`] collects structured verification output shared by the test
//! suites and the command-line front end.

pub mod fgen;
pub mod geometry;
pub mod hstruct;
pub mod linalg;
pub mod report;
pub mod weil;

pub use num_complex::Complex64;
