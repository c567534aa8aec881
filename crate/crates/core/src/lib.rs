//! Routing a mothership and a fleet of drones that must (partially) traverse
//! a set of target graphs.
//!
//! The crate provides the instance model and generator, the mixed-integer
//! second-order-cone formulation (synchronous and asynchronous) with LP
//! emission, a convex solver for the continuous subproblem left after fixing
//! every binary decision, an exhaustive solver plus a grid oracle for tiny
//! instances, the five-step matheuristic, and an independent validator.

pub mod convex_sub;
pub mod error;
pub mod exact;
pub mod geometry;
pub mod instance;
pub mod matheuristic;
pub mod model_ir;
pub mod solution;
mod textfmt;
pub mod validate;

#[cfg(test)]
pub(crate) mod fixtures;

pub use error::{Error, Result};
pub use geometry::{dist, BBox, Point, Segment};
pub use instance::{Instance, TargetEdge, TargetGraph, VisitMode};
pub use matheuristic::{run_matheuristic, MatheuristicParams};
pub use model_ir::{build_model, emit_lp, Model, ModelOptions, Subtour};
pub use solution::{EdgeVisit, Mode, Operation, Solution, Stage};
pub use validate::{check_solution, ValidationReport};
