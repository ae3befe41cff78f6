//! Discrete rational minimax approximation in the complex plane.
//!
//! Given samples `(x_j, f_j)`, `j = 1..m`, and a type `(n1, n2)`, the crate
//! looks for `p/q` with `deg p <= n1`, `deg q <= n2` minimizing
//! `max_j |f_j - p(x_j)/q(x_j)|`. Instead of attacking that non-convex problem
//! directly it maximizes the concave dual function
//!
//! ```text
//! d2(w) = min { sum_j w_j |f_j q(x_j) - p(x_j)|^2  :  sum_j w_j |q(x_j)|^2 = 1 }
//! ```
//!
//! over the probability simplex, with a Lawson-type multiplicative weight
//! update ([`solvers::d_lawson`]). Weak duality `sqrt(d2(w)) <= e(xi)` holds for
//! every weight vector, so the relative gap between the two sides certifies how
//! far the recovered approximant can be from the global minimax solution
//! ([`dualcore::certify_ruttan`]).
//!
//! All polynomial bases are built with a weighted Arnoldi process
//! ([`orthobasis`]), never with an explicit Vandermonde matrix, and the stored
//! Hessenberg recurrences are replayed to evaluate the approximant at new
//! points.

pub mod benchmarks;
pub mod dualcore;
pub mod error;
mod linalg;
pub mod orthobasis;
pub mod problems;
pub mod solvers;

pub use nalgebra::Complex;

/// Complex double used throughout.
pub type C64 = Complex<f64>;

pub use dualcore::{
    certify_ruttan, eval_d2, eval_d2_oracle, eval_d2_weights, gradient, hessian, Certificate,
    DualEvaluation, Gradient, HessianResult, OracleResult, SimplexWeights,
};
pub use error::{DualError, ProblemError, SolveError};
pub use orthobasis::{weighted_arnoldi, KrylovBasis};
pub use problems::{generate_nodes, sample, FunctionId, NodeScheme, SampleSet};
pub use solvers::{
    d_lawson, filter_nodes, lawson_update, sk_iteration, ssk_iteration, Approximant, Method,
    SolveOutcome, SolveTrace, SolverConfig, TraceRecord,
};
