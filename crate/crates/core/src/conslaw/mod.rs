//! The 2×2 conservation-law manifold in 3×2 matrices: parametrizations, the five-atom
//! construction of commuting measures near a point where the flux increases, and sign
//! evidence where it decreases.

mod five_atom;
mod flux;

use serde::Serialize;

pub use five_atom::{
    build_atoms, dyadic_theta, five_atom_measure, iterate_weights, negative_branch_evidence, p1, p1_alpha,
    push_forward_to_k1, solve_linear_weights, three_minors, FiveAtomSystem, IterationOptions, IterationResult,
    K1Point, PushForward, SignReport, TraceStep, COMMUTATION_TOL,
};
pub use flux::{parse_expr, Expr, FluxFunction};

use crate::error::Result;
use crate::measures::{FloatMeasure, FloatNullLagrangianReport};

/// Mass parameter: a value, or half of the admissible bound ε₀.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EpsChoice {
    Auto,
    Value(f64),
}

#[derive(Clone, Debug, Serialize)]
pub struct K1Run {
    pub system: FiveAtomSystem,
    pub iteration: IterationResult,
    pub measure: FloatMeasure,
    pub measure_check: FloatNullLagrangianReport,
    pub pushed: PushForward,
}

/// build_atoms → iterate_weights → five_atom_measure → push_forward_to_k1.
pub fn run_k1(flux: &FluxFunction, alpha: [f64; 2], s0: f64, t0: f64, eps: EpsChoice, opts: &IterationOptions) -> Result<K1Run> {
    let system = build_atoms(flux, alpha, s0, t0)?;
    let eps = match eps {
        EpsChoice::Auto => system.eps0 / 2.0,
        EpsChoice::Value(e) => e,
    };
    let iteration = iterate_weights(&system, eps, opts)?;
    let (measure, measure_check) = five_atom_measure(&system, &iteration)?;
    let pushed = push_forward_to_k1(&measure, flux, alpha, 1e-9)?;
    Ok(K1Run { system, iteration, measure, measure_check, pushed })
}
