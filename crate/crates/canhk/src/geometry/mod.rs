//! Model Kähler geometries: curvature tensors with validated symmetries at
//! a point, chart-level metric and connection data, and the curvature
//! operator acting on the cotangent fiber of the total space.

pub mod a_op;
pub mod chart;
pub mod model;

pub use a_op::{a_module_at, a_module_from_rop, a_operator, a_operator_full, Slot};
pub use chart::{ChartModel, FiberPoint};
pub use model::{chn, cpn, flat, ricci, validate, GeometryError, KahlerModel, ModelKind};
