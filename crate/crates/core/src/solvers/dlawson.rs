//! The d-Lawson iteration: Lawson reweighting driven by the dual function.

use crate::dualcore::{certify_ruttan, eval_d2_with, normalize, DualEvaluation, SimplexWeights};
use crate::error::SolveError;
use crate::linalg::accurate_sum;
use crate::problems::SampleSet;
use crate::solvers::{
    check_size, Approximant, SolveOutcome, SolveTrace, SolverConfig, TraceRecord,
};

#[derive(Debug, Clone, PartialEq)]
pub struct LawsonUpdate {
    pub weights: SimplexWeights,
    /// Every active residual was zero; `weights` is the input unchanged.
    pub converged_interpolation: bool,
}

/// `w'_j ∝ w_j r_j^beta`, renormalized onto the simplex. Infinite residuals
/// are replaced by the largest finite one; zero weights stay zero.
pub fn lawson_update(w: &SimplexWeights, residual: &[f64], beta: f64) -> LawsonUpdate {
    assert_eq!(w.len(), residual.len(), "weights and residuals differ in length");
    let finite_max = residual.iter().filter(|r| r.is_finite()).fold(0.0_f64, |a, &b| a.max(b));
    let unchanged = LawsonUpdate { weights: w.clone(), converged_interpolation: true };
    if finite_max == 0.0 && residual.iter().all(|r| r.is_finite()) {
        return unchanged;
    }
    // Residuals are scaled to at most one so that w_j r_j cannot overflow.
    let scale = if finite_max > 0.0 { finite_max } else { 1.0 };
    let new: Vec<f64> = w
        .weights()
        .iter()
        .zip(residual)
        .map(|(&wj, &rj)| {
            if wj == 0.0 {
                return 0.0;
            }
            let r = if rj.is_finite() { rj / scale } else { 1.0 };
            if beta == 1.0 {
                wj * r
            } else {
                wj * r.powf(beta)
            }
        })
        .collect();
    let sum = accurate_sum(&new);
    if sum == 0.0 || !sum.is_finite() {
        return unchanged;
    }
    LawsonUpdate {
        weights: SimplexWeights::from_normalized(normalize(new, sum)),
        converged_interpolation: false,
    }
}

/// Zeroes weights below `eps_w` and renormalizes, unless fewer than `floor`
/// active nodes would survive, in which case `w` is returned as is.
pub fn filter_nodes(w: &SimplexWeights, eps_w: f64, floor: usize) -> SimplexWeights {
    let weights = w.weights();
    let survivors = w.active().iter().filter(|&&j| weights[j] >= eps_w).count();
    if survivors == w.active().len() || survivors < floor.max(1) {
        return w.clone();
    }
    let kept: Vec<f64> = weights.iter().map(|&v| if v >= eps_w { v } else { 0.0 }).collect();
    let sum = accurate_sum(&kept);
    SimplexWeights::from_normalized(normalize(kept, sum))
}

/// d-Lawson from uniform weights.
pub fn d_lawson(
    samples: &SampleSet,
    n1: usize,
    n2: usize,
    cfg: &SolverConfig,
) -> Result<SolveOutcome, SolveError> {
    d_lawson_seeded(samples, n1, n2, cfg, SimplexWeights::uniform(samples.len()))
}

/// d-Lawson started from `w0`.
pub fn d_lawson_seeded(
    samples: &SampleSet,
    n1: usize,
    n2: usize,
    cfg: &SolverConfig,
    w0: SimplexWeights,
) -> Result<SolveOutcome, SolveError> {
    cfg.validate()?;
    check_size(samples, n1, n2)?;
    if w0.len() != samples.len() {
        return Err(SolveError::Config(format!(
            "seed weights have {} entries for {} samples",
            w0.len(),
            samples.len()
        )));
    }
    let floor = n1 + n2 + 2;
    let parallel = !cfg.deterministic_reduction;
    let mut trace = SolveTrace::default();
    let mut best: Option<(f64, DualEvaluation, SimplexWeights)> = None;
    let mut w = w0;
    let mut k = 0;
    loop {
        w = filter_nodes(&w, cfg.eps_w, floor);
        let ev = match eval_d2_with(samples, &w, n1, n2, parallel) {
            Ok(ev) => ev,
            Err(source) => return Err(SolveError::Aborted { source, trace }),
        };
        let gap = ev.gap();
        trace.records.push(TraceRecord {
            k,
            sqrt_d2: ev.sqrt_d2(),
            max_err: ev.max_err(),
            gap,
            active_count: w.active().len(),
        });
        let improves = best.as_ref().is_none_or(|b| gap < b.0);
        if improves {
            trace.best_k = k;
        }
        let stop = gap < cfg.eps_r || k >= cfg.k_max;
        let update = if stop { None } else { Some(lawson_update(&w, &ev.residual, cfg.beta)) };
        if improves {
            best = Some((gap, ev, w.clone()));
        }
        match update {
            Some(u) if !u.converged_interpolation => w = u.weights,
            _ => break,
        }
        k += 1;
    }

    let (_, evaluation, weights) = best.expect("at least one iterate");
    let certificate = certify_ruttan(samples, &weights, &evaluation, cfg.eps_r)
        .map_err(|source| SolveError::Aborted { source, trace: trace.clone() })?;
    Ok(SolveOutcome {
        approximant: Approximant::from_evaluation(&evaluation, samples),
        trace,
        certificate: Some(certificate),
        evaluation,
        weights,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{generate_nodes, sample, FunctionId, NodeScheme};

    fn sw(v: &[f64]) -> SimplexWeights {
        SimplexWeights::from_unnormalized(v.to_vec()).unwrap()
    }

    #[test]
    fn update_examples() {
        let u = lawson_update(&sw(&[0.5, 0.5]), &[1.0, 1.0], 1.0);
        assert_eq!(u.weights.weights(), &[0.5, 0.5]);
        let u = lawson_update(&sw(&[0.5, 0.5]), &[2.0, 0.0], 1.0);
        assert_eq!(u.weights.weights(), &[1.0, 0.0]);
        let u = lawson_update(&sw(&[0.25; 4]), &[1.0, 2.0, 3.0, 4.0], 0.5);
        // sqrt(r) / sum(sqrt(r)), evaluated independently.
        let s: f64 = (1..=4).map(|r| (r as f64).sqrt()).sum();
        for (j, v) in u.weights.weights().iter().enumerate() {
            assert!((v - ((j + 1) as f64).sqrt() / s).abs() < 1e-15);
        }
        let expect = [0.16270, 0.23009, 0.28181, 0.32540];
        for (v, e) in u.weights.weights().iter().zip(expect) {
            assert!((v - e).abs() < 5e-6);
        }
    }

    #[test]
    fn update_interpolation_and_poles() {
        let w = sw(&[0.2, 0.3, 0.5]);
        let u = lawson_update(&w, &[0.0, 0.0, 0.0], 1.0);
        assert!(u.converged_interpolation);
        assert_eq!(u.weights, w);
        let u = lawson_update(&w, &[1.0, f64::INFINITY, 2.0], 1.0);
        let expect = [0.2, 0.6, 1.0].map(|v: f64| v / 1.8);
        for (v, e) in u.weights.weights().iter().zip(expect) {
            assert!((v - e).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_weights_are_absorbing() {
        let u = lawson_update(&sw(&[0.0, 0.5, 0.5]), &[10.0, 1.0, 1.0], 1.0);
        assert_eq!(u.weights.weights()[0], 0.0);
    }

    #[test]
    fn filter_examples() {
        let w = sw(&[0.5, 0.5, 1e-50]);
        let f = filter_nodes(&w, 1e-40, 2);
        assert_eq!(f.active(), &[0, 1]);
        assert_eq!(f.weights(), &[0.5, 0.5, 0.0]);
        assert_eq!(filter_nodes(&w, 0.0, 2), w);
        let u = SimplexWeights::uniform(5);
        assert_eq!(filter_nodes(&u, 1.0, 4), u);
    }

    #[test]
    fn rejects_small_problems() {
        let x = generate_nodes(&NodeScheme::Equispaced { a: -1.0, b: 1.0, m: 5 }).unwrap();
        let s = sample(&FunctionId::Abs, &x).unwrap();
        assert!(matches!(
            d_lawson(&s, 2, 2, &SolverConfig::default()),
            Err(SolveError::TooFewNodes { required: 6, got: 5, .. })
        ));
    }

    #[test]
    fn small_abs_run() {
        let x = generate_nodes(&NodeScheme::Equispaced { a: -1.0, b: 1.0, m: 201 }).unwrap();
        let s = sample(&FunctionId::Abs, &x).unwrap();
        let out = d_lawson(&s, 2, 2, &SolverConfig::default()).unwrap();
        let t = &out.trace;
        assert!(t.records.len() <= 41);
        for r in &t.records {
            assert!(r.sqrt_d2 <= r.max_err * (1.0 + 1e-10));
        }
        let best = t.records.iter().map(|r| r.gap).fold(f64::INFINITY, f64::min);
        assert_eq!(t.best().unwrap().gap, best);
        let cert = out.certificate.unwrap();
        assert_eq!(cert.gap, best);
        let back = out.approximant.evaluate(s.x());
        for j in 0..s.len() {
            let r = (s.f()[j] - back[j]).norm();
            assert!((r - out.evaluation.residual[j]).abs() <= 1e-10);
        }
    }
}
