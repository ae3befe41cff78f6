//! The dual function `d2(w)` and everything derived from it.
//!
//! With `Q_p`, `Q_q` orthonormal bases of `sqrt(W) Psi` and `sqrt(W) Phi`,
//! `sqrt(d2(w))` is the smallest singular value of `(I - Q_p Q_p^H) F Q_q`,
//! and the minimizing numerator/denominator are recovered in orthonormal
//! coordinates as `b_hat` (right singular vector) and `a_hat = Q_p^H F Q_q b_hat`.

mod certificate;
mod derivatives;
mod oracle;

use nalgebra::{DMatrix, DVector};

pub use certificate::{certify_ruttan, lambda_min_self_test, Certificate};
pub use derivatives::{gradient, hessian, Gradient, HessianResult};
pub use oracle::{eval_d2_oracle, OracleResult, ORACLE_MAX_DEGREE, ORACLE_MAX_NODES};

use crate::error::DualError;
use crate::linalg::{accurate_sum, smallest_singular};
use crate::orthobasis::{weighted_arnoldi_with, KrylovBasis};
use crate::problems::SampleSet;
use crate::C64;

/// Denominator magnitude at or below which a node is treated as a pole.
pub const POLE_THRESHOLD: f64 = 1e-300;
/// Relative separation of the two smallest singular values below which the
/// minimum is reported as multiple.
pub const MULTIPLICITY_RTOL: f64 = 1e-10;

/// A point of the probability simplex. Zero entries are inactive nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexWeights {
    w: Vec<f64>,
    active: Vec<usize>,
}

impl SimplexWeights {
    pub fn uniform(m: usize) -> Self {
        Self::from_normalized(vec![1.0 / m as f64; m])
    }

    /// Validates a weight vector that should already sum to one (up to
    /// `1e-12`) and renormalizes it exactly.
    pub fn new(w: Vec<f64>) -> Result<Self, DualError> {
        check_nonnegative(&w)?;
        let sum = accurate_sum(&w);
        if sum == 0.0 {
            return Err(DualError::ZeroWeights);
        }
        if (sum - 1.0).abs() > 1e-12 {
            return Err(DualError::InvalidWeights(format!("weights sum to {sum}, not 1")));
        }
        Ok(Self::from_normalized(normalize(w, sum)))
    }

    /// Scales a nonnegative, nonzero vector onto the simplex.
    pub fn from_unnormalized(w: Vec<f64>) -> Result<Self, DualError> {
        check_nonnegative(&w)?;
        let sum = accurate_sum(&w);
        if sum == 0.0 {
            return Err(DualError::ZeroWeights);
        }
        Ok(Self::from_normalized(normalize(w, sum)))
    }

    pub(crate) fn from_normalized(w: Vec<f64>) -> Self {
        let active = (0..w.len()).filter(|&j| w[j] > 0.0).collect();
        SimplexWeights { w, active }
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    /// Indices with strictly positive weight, ascending.
    pub fn active(&self) -> &[usize] {
        &self.active
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    /// `|sum(w) - 1|`, computed with compensated summation.
    pub fn simplex_defect(&self) -> f64 {
        (accurate_sum(&self.w) - 1.0).abs()
    }
}

fn check_nonnegative(w: &[f64]) -> Result<(), DualError> {
    if let Some(j) = w.iter().position(|v| !v.is_finite()) {
        return Err(DualError::NonFinite { index: j });
    }
    if let Some(j) = w.iter().position(|&v| v < 0.0) {
        return Err(DualError::InvalidWeights(format!("negative weight {} at index {j}", w[j])));
    }
    Ok(())
}

pub(crate) fn normalize(mut w: Vec<f64>, sum: f64) -> Vec<f64> {
    for v in &mut w {
        *v /= sum;
    }
    w
}

/// Everything computed at one weight vector.
#[derive(Debug, Clone)]
pub struct DualEvaluation {
    pub n1: usize,
    pub n2: usize,
    pub d2: f64,
    /// Numerator coefficients in the orthonormal basis `Q_p`.
    pub hat_a: DVector<C64>,
    /// Denominator coefficients in `Q_q`, `|hat_b| = 1`.
    pub hat_b: DVector<C64>,
    /// Numerator values at all sample nodes.
    pub p_vals: Vec<C64>,
    /// Denominator values at all sample nodes, `sum_j w_j |q_j|^2 = 1`.
    pub q_vals: Vec<C64>,
    /// `|f_j - p_j / q_j|` at all sample nodes, `+inf` at pole-adjacent nodes.
    pub residual: Vec<f64>,
    pub basis_p: KrylovBasis,
    pub basis_q: KrylovBasis,
    /// Nodes the bases were built on (`w_j > 0`).
    pub active: Vec<usize>,
    /// Singular values of `(I - Q_p Q_p^H) F Q_q`, ascending.
    pub singular_values: Vec<f64>,
    pub multiple_minimum: bool,
    pub pole_adjacent: Vec<usize>,
    /// `S_qp^H = Q_p^H F Q_q`.
    pub(crate) s_qp_h: DMatrix<C64>,
    /// `S_F = Q_q^H |F|^2 Q_q`.
    pub(crate) s_f: DMatrix<C64>,
    /// `f_j q_j - p_j` at all sample nodes.
    pub(crate) lin_residual: Vec<C64>,
}

impl DualEvaluation {
    pub fn sqrt_d2(&self) -> f64 {
        self.d2.sqrt()
    }

    /// `e(xi)`: the largest residual over all sample nodes.
    pub fn max_err(&self) -> f64 {
        self.residual.iter().fold(0.0_f64, |a, &b| a.max(b))
    }

    /// Largest finite residual, used in place of pole-adjacent nodes.
    pub fn max_finite_residual(&self) -> f64 {
        self.residual.iter().filter(|r| r.is_finite()).fold(0.0_f64, |a, &b| a.max(b))
    }

    /// Relative gap `|sqrt(d2) - e| / e` (`1` when `e` is infinite, and the
    /// absolute `sqrt(d2)` when `e = 0`).
    pub fn gap(&self) -> f64 {
        duality_gap(self.sqrt_d2(), self.max_err())
    }

    /// Approximant values `p_j / q_j` at all sample nodes.
    pub fn xi_vals(&self) -> Vec<C64> {
        self.p_vals.iter().zip(&self.q_vals).map(|(p, q)| p / q).collect()
    }
}

pub(crate) fn duality_gap(sqrt_d2: f64, max_err: f64) -> f64 {
    if max_err.is_infinite() {
        1.0
    } else if max_err > 0.0 {
        (sqrt_d2 - max_err).abs() / max_err
    } else {
        sqrt_d2
    }
}

/// Evaluates `d2(w)` on the active nodes of `w` for type `(n1, n2)`.
pub fn eval_d2(
    samples: &SampleSet,
    w: &SimplexWeights,
    n1: usize,
    n2: usize,
) -> Result<DualEvaluation, DualError> {
    eval_d2_with(samples, w, n1, n2, false)
}

/// [`eval_d2`] with optional parallel inner products in the Arnoldi sweeps.
pub fn eval_d2_with(
    samples: &SampleSet,
    w: &SimplexWeights,
    n1: usize,
    n2: usize,
    parallel: bool,
) -> Result<DualEvaluation, DualError> {
    if w.len() != samples.len() {
        return Err(DualError::WeightLength { weights: w.len(), samples: samples.len() });
    }
    evaluate(samples, w.weights(), w.active(), n1, n2, parallel)
}

/// `d2` at an arbitrary nonnegative weight vector, not necessarily on the
/// simplex (`d2` is invariant under positive scaling of `w`).
pub fn eval_d2_weights(
    samples: &SampleSet,
    w: &[f64],
    n1: usize,
    n2: usize,
) -> Result<DualEvaluation, DualError> {
    if w.len() != samples.len() {
        return Err(DualError::WeightLength { weights: w.len(), samples: samples.len() });
    }
    check_nonnegative(w)?;
    let active: Vec<usize> = (0..w.len()).filter(|&j| w[j] > 0.0).collect();
    evaluate(samples, w, &active, n1, n2, false)
}

fn evaluate(
    samples: &SampleSet,
    w: &[f64],
    active: &[usize],
    n1: usize,
    n2: usize,
    parallel: bool,
) -> Result<DualEvaluation, DualError> {
    if active.is_empty() {
        return Err(DualError::ZeroWeights);
    }
    if active.len() < n2 + 1 {
        return Err(DualError::TooFewActive { required: n2 + 1, active: active.len() });
    }
    let x = samples.x();
    let f = samples.f();
    let xa: Vec<C64> = active.iter().map(|&j| x[j]).collect();
    let fa: Vec<C64> = active.iter().map(|&j| f[j]).collect();
    let sqrt_w: Vec<f64> = active.iter().map(|&j| w[j].sqrt()).collect();

    let basis_p = weighted_arnoldi_with(&xa, &sqrt_w, n1, parallel)?;
    let basis_q = weighted_arnoldi_with(&xa, &sqrt_w, n2, parallel)?;
    if basis_p.rank() == 0 || basis_q.rank() == 0 {
        return Err(DualError::TotalBreakdown);
    }
    let qp = basis_p.q();
    let qq = basis_q.q();

    let mut fqq = qq.clone();
    for (r, fr) in fa.iter().enumerate() {
        let mut row = fqq.row_mut(r);
        row *= *fr;
    }
    // Project out span(Q_p) twice; the second sweep cleans up cancellation
    // when F Q_q lies nearly inside span(Q_p).
    let mut s_qp_h = qp.ad_mul(&fqq);
    let mut proj = &fqq - qp * &s_qp_h;
    let correction = qp.ad_mul(&proj);
    proj -= qp * &correction;
    s_qp_h += correction;

    let svd = smallest_singular(&proj);
    let sigma_min = svd.sigmas[0];
    let d2 = sigma_min * sigma_min;
    let multiple_minimum =
        svd.sigmas.len() > 1 && svd.sigmas[1] - svd.sigmas[0] <= MULTIPLICITY_RTOL * svd.sigmas[1];
    let hat_b = svd.right_vector;
    let hat_a = &s_qp_h * &hat_b;
    let s_f = fqq.ad_mul(&fqq);

    let m = samples.len();
    let mut p_vals = vec![C64::new(0.0, 0.0); m];
    let mut q_vals = vec![C64::new(0.0, 0.0); m];
    let pa = qp * &hat_a;
    let qa = qq * &hat_b;
    for (r, &j) in active.iter().enumerate() {
        p_vals[j] = pa[r] / sqrt_w[r];
        q_vals[j] = qa[r] / sqrt_w[r];
    }
    if active.len() < m {
        let mut is_active = vec![false; m];
        for &j in active {
            is_active[j] = true;
        }
        let inactive: Vec<usize> = (0..m).filter(|&j| !is_active[j]).collect();
        let y: Vec<C64> = inactive.iter().map(|&j| x[j]).collect();
        let pv = basis_p.reevaluate(&y) * &hat_a / C64::new(basis_p.seed_norm(), 0.0);
        let qv = basis_q.reevaluate(&y) * &hat_b / C64::new(basis_q.seed_norm(), 0.0);
        for (r, &j) in inactive.iter().enumerate() {
            p_vals[j] = pv[r];
            q_vals[j] = qv[r];
        }
    }

    let (residual, pole_adjacent) = residuals(f, &p_vals, &q_vals);
    let lin_residual = (0..m).map(|j| f[j] * q_vals[j] - p_vals[j]).collect();

    Ok(DualEvaluation {
        n1,
        n2,
        d2,
        hat_a,
        hat_b,
        p_vals,
        q_vals,
        residual,
        basis_p,
        basis_q,
        active: active.to_vec(),
        singular_values: svd.sigmas,
        multiple_minimum,
        pole_adjacent,
        s_qp_h,
        s_f,
        lin_residual,
    })
}

/// `|f - p/q|` with `+inf` where `|q| <= POLE_THRESHOLD`.
pub(crate) fn residuals(f: &[C64], p: &[C64], q: &[C64]) -> (Vec<f64>, Vec<usize>) {
    let mut poles = Vec::new();
    let r = f
        .iter()
        .zip(p.iter().zip(q))
        .enumerate()
        .map(|(j, (fj, (pj, qj)))| {
            if qj.norm() <= POLE_THRESHOLD {
                poles.push(j);
                f64::INFINITY
            } else {
                (fj - pj / qj).norm()
            }
        })
        .collect();
    (r, poles)
}
