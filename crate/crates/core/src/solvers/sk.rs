//! Sanathanan–Koerner iteration and its stabilized variant.
//!
//! Each step solves the linearized problem `min |W^{1/2} (F q - p)|` with the
//! denominator coefficients normalized in the orthonormal Arnoldi basis, for
//! weights built from the previous denominator. SK weights every node by
//! `1 / |q^(k)|^2` directly; S-SK keeps a cumulative weight `w` that it
//! divides by the denominator expressed in the current scaled basis, and
//! builds the bases from `w` itself.

use crate::dualcore::{eval_d2_weights, normalize, DualEvaluation, SimplexWeights};
use crate::error::{DualError, SolveError};
use crate::linalg::accurate_sum;
use crate::problems::SampleSet;
use crate::solvers::{
    check_size, Approximant, SolveOutcome, SolveTrace, SolverConfig, TraceRecord,
};
use crate::C64;

/// Stop once the weighted change of the approximant falls below this.
pub const SK_STEP_TOL: f64 = 1e-11;

pub fn sk_iteration(
    samples: &SampleSet,
    n1: usize,
    n2: usize,
    cfg: &SolverConfig,
) -> Result<SolveOutcome, SolveError> {
    // Squared weights 1/|q|^2, stored normalized.
    run(
        samples,
        n1,
        n2,
        cfg,
        |_, ev| ev.q_vals.iter().map(|q| 1.0 / q.norm_sqr()).collect(),
        |w| w.to_vec(),
        |w| w.iter().map(|v| v.sqrt()).collect(),
    )
}

pub fn ssk_iteration(
    samples: &SampleSet,
    n1: usize,
    n2: usize,
    cfg: &SolverConfig,
) -> Result<SolveOutcome, SolveError> {
    // Cumulative w; the Arnoldi seed is w itself, i.e. W = w^2.
    run(
        samples,
        n1,
        n2,
        cfg,
        |w, ev| {
            w.iter()
                .zip(&ev.q_vals)
                .map(|(&wj, qj)| if wj == 0.0 { 0.0 } else { wj / (qj * wj).norm() })
                .collect()
        },
        |w| w.iter().map(|v| v * v).collect(),
        |w| w.iter().map(|v| v.sqrt()).collect(),
    )
}

/// Shared loop. `next` maps the current weights and evaluation to the
/// unnormalized next weights, `squared` gives the weights handed to the dual
/// evaluation, `stop_scale` the diagonal of the stopping norm.
fn run(
    samples: &SampleSet,
    n1: usize,
    n2: usize,
    cfg: &SolverConfig,
    next: impl Fn(&[f64], &DualEvaluation) -> Vec<f64>,
    squared: impl Fn(&[f64]) -> Vec<f64>,
    stop_scale: impl Fn(&[f64]) -> Vec<f64>,
) -> Result<SolveOutcome, SolveError> {
    cfg.validate()?;
    check_size(samples, n1, n2)?;
    let m = samples.len();
    let mut trace = SolveTrace::default();
    let mut w = vec![1.0 / m as f64; m];
    let mut prev_xi: Option<Vec<C64>> = None;
    let mut best: Option<(f64, DualEvaluation, Vec<f64>)> = None;
    for k in 0..cfg.k_max {
        let ev = match eval_d2_weights(samples, &squared(&w), n1, n2) {
            Ok(ev) => ev,
            Err(source) => return Err(SolveError::Aborted { source, trace }),
        };
        let max_err = ev.max_err();
        trace.records.push(TraceRecord {
            k,
            sqrt_d2: f64::NAN,
            max_err,
            gap: f64::NAN,
            active_count: ev.active.len(),
        });
        let xi = ev.xi_vals();
        let done = match &prev_xi {
            Some(prev) => {
                let s = stop_scale(&w);
                let change: f64 =
                    (0..m).map(|j| (s[j] * (xi[j] - prev[j]).norm()).powi(2)).sum::<f64>().sqrt();
                change <= SK_STEP_TOL
            }
            None => false,
        };
        let mut raw = next(&w, &ev);
        if best.as_ref().is_none_or(|b| max_err < b.0) {
            trace.best_k = k;
            best = Some((max_err, ev, w.clone()));
        }
        if done {
            break;
        }
        substitute_infinite(&mut raw);
        let sum = accurate_sum(&raw);
        if !(sum > 0.0 && sum.is_finite()) {
            return Err(SolveError::Aborted { source: DualError::ZeroWeights, trace });
        }
        w = normalize(raw, sum);
        prev_xi = Some(xi);
    }
    let (_, evaluation, w) = best.expect("k_max >= 1");
    let weights = SimplexWeights::from_unnormalized(squared(&w))
        .map_err(|source| SolveError::Aborted { source, trace: trace.clone() })?;
    Ok(SolveOutcome {
        approximant: Approximant::from_evaluation(&evaluation, samples),
        trace,
        certificate: None,
        evaluation,
        weights,
    })
}

/// Replaces `+inf` (from pole-adjacent denominators) by the largest finite value.
fn substitute_infinite(v: &mut [f64]) {
    let max = v.iter().filter(|x| x.is_finite()).fold(0.0_f64, |a, &b| a.max(b));
    let fill = if max > 0.0 { max } else { 1.0 };
    for x in v.iter_mut() {
        if !x.is_finite() {
            *x = fill;
        }
    }
}
