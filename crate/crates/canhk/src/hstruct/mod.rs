//! The structure on the total space as a field over charts: the
//! endomorphism triple at fiber points, normalization and integrability
//! residuals, the metric-level forms, and the empirical selection of the
//! series variant and contraction convention.

pub mod calabi;
pub mod checks;
pub mod field;
pub mod select;

pub use checks::{closedness_residual, nijenhuis_residual, normalization_residual, omega_from};
pub use field::{QuatTriple, StructureField};
pub use select::{select_variant, SelectError};
