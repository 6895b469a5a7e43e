//! Atomic measures on matrix space, exact commutation checks, and construction of
//! non-trivial commuting measures by linear programming.

mod construct;
mod measure;
mod simplex;

pub use construct::{
    cone_family, construct_nontrivial, construct_on_cone, CandidateSampler, ConeConstruction, ConeSampler,
    ConstructionConfig, ConstructionOutcome, SphereSampler, MAX_FAMILY_MINORS,
};
pub use measure::{
    is_null_lagrangian, is_null_lagrangian_f64, DiscreteMeasure, FloatMeasure, FloatNullLagrangianReport,
    NullLagrangianReport,
};
pub use simplex::{farkas_solve, FarkasOutcome, FarkasProblem};
