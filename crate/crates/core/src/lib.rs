//! Two-sided bounds for the trapezoid-rule error of positive functions.
//!
//! The classical trapezoid inequality controls the error
//! `(f(a)+f(b))/2 - (1/(b-a)) ∫ f` one-sidedly through `||f''||_inf`. For
//! positive absolutely continuous `f` there is a sharper statement: some
//! interior point `x` (a mean-value point of an auxiliary split-average
//! function) yields a two-sided envelope built only from `∫ f`, `f(x)`, and
//! the split geometry `M = max(x-a, b-x)`, `m = min(x-a, b-x)`. This crate
//! computes that envelope numerically and exercises everything around it:
//!
//! - [`expr`]: a minimal parser, evaluator, and symbolic differentiator for
//!   functions of one variable `s`.
//! - [`quad`]: the adaptive-Simpson oracle used for every integral, the
//!   composite trapezoid/Simpson rules, and sup-norm derivative estimates.
//! - [`meanvalue`]: the split-average function `F`, its analytic
//!   derivative, and the solver for the mean-value equation.
//! - [`bounds`]: the envelope, its closed-form width, the rearranged
//!   integral sandwich, the Simpson-exactness class test, and the classical
//!   comparison bounds.
//! - [`means`]: the bivariate mean catalogue (`A`, `G`, `H`, `M_r`, `I`,
//!   `L`, `L_p`), the chain `H <= G <= L <= I <= A`, and the worked
//!   special-means applications.
//! - [`report`]: report assembly for the `trapbound` CLI with a stable
//!   JSON schema and CSV format.

pub mod bounds;
pub mod expr;
pub mod means;
pub mod meanvalue;
pub mod quad;
pub mod report;

pub use bounds::{
    alt_form_bounds, classical_trap_bound, envelope, gap_delta, geometry, hermite_hadamard_check,
    intermediate_sandwich_check, psi, simpson_exactness, BoundsError, Envelope, Geometry, PsiValue,
    SimpsonCheck,
};
pub use expr::{DiffError, EvalError, Expr, FunctionDef, ParseError};
pub use means::{
    application_check, mean, mean_axioms_check, mean_chain_check, Application, MeanError, MeanKind,
    MeanPair,
};
pub use meanvalue::{
    average_gap, average_gap_derivative, secant_slope, solve_mvt, MeanValuePoint, MvtError,
    SolveOptions,
};
pub use quad::{
    composite_simpson, composite_trapezoid, integrate, sup_abs_derivative, Interval, QuadError,
    QuadResult,
};

use thiserror::Error;

/// Any error the crate can produce, for callers that drive whole pipelines.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Diff(#[from] DiffError),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Mvt(#[from] MvtError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Mean(#[from] MeanError),
    #[error(transparent)]
    Corpus(#[from] report::CorpusError),
}
