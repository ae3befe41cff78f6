//! First and second derivatives of `d2` with respect to the weights.

use nalgebra::DMatrix;

use crate::dualcore::{DualEvaluation, SimplexWeights};
use crate::error::DualError;
use crate::linalg::{c, hermitian_eigen};
use crate::problems::SampleSet;
use crate::C64;

/// Eigenvalues of `D` below this fraction of the largest are treated as zero.
pub const KERNEL_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    /// `|f_j q_j - p_j|^2 - d2 |q_j|^2` for every sample node.
    pub values: Vec<f64>,
    /// The smallest singular value was (numerically) multiple, so `values`
    /// is only a subgradient candidate.
    pub nonsmooth: bool,
}

/// Gradient of `d2` at the weights `ev` was computed from.
pub fn gradient(ev: &DualEvaluation, w: &SimplexWeights) -> Result<Gradient, DualError> {
    if w.len() != ev.q_vals.len() {
        return Err(DualError::WeightLength { weights: w.len(), samples: ev.q_vals.len() });
    }
    Ok(Gradient { values: gradient_values(ev), nonsmooth: ev.multiple_minimum })
}

fn gradient_values(ev: &DualEvaluation) -> Vec<f64> {
    ev.lin_residual
        .iter()
        .zip(&ev.q_vals)
        .map(|(r, q)| r.norm_sqr() - ev.d2 * q.norm_sqr())
        .collect()
}

#[derive(Debug, Clone)]
pub struct HessianResult {
    /// Symmetric `m x m` Hessian.
    pub matrix: DMatrix<f64>,
    /// Number of eigenvalues of `D` dropped from the pseudo-inverse.
    pub kernel_dim: usize,
    /// Set when `kernel_dim` exceeds the expected one, or `d2` is not simple.
    pub flagged: bool,
    /// `|H - H^T|_F / |H|_F` before symmetrization.
    pub presym_defect: f64,
}

/// Hessian of `d2` at the weights `ev` was computed from.
pub fn hessian(
    samples: &SampleSet,
    w: &SimplexWeights,
    ev: &DualEvaluation,
) -> Result<HessianResult, DualError> {
    let m = samples.len();
    if w.len() != m || ev.q_vals.len() != m {
        return Err(DualError::WeightLength { weights: w.len(), samples: m });
    }
    let f = samples.f();
    let k1 = ev.basis_p.rank();
    let k2 = ev.basis_q.rank();
    let k = k1 + k2;
    let grad = gradient_values(ev);

    // D = [[I, -S_qp^H], [-S_qp, S_F - d2 I]].
    let mut d = DMatrix::<C64>::zeros(k, k);
    for i in 0..k1 {
        d[(i, i)] = c(1.0);
    }
    for i in 0..k1 {
        for j in 0..k2 {
            d[(i, k1 + j)] = -ev.s_qp_h[(i, j)];
            d[(k1 + j, i)] = -ev.s_qp_h[(i, j)].conj();
        }
    }
    for i in 0..k2 {
        for j in 0..k2 {
            d[(k1 + i, k1 + j)] = ev.s_f[(i, j)];
        }
        d[(k1 + i, k1 + i)] -= c(ev.d2);
    }
    let (lambda, v) = hermitian_eigen(&d);
    let lmax = lambda.iter().fold(0.0_f64, |a, &b| a.max(b.abs()));
    let keep: Vec<usize> = (0..k).filter(|&i| lambda[i].abs() > KERNEL_RTOL * lmax).collect();
    let kernel_dim = k - keep.len();

    // W^{-1/2} Q at every node, from the recurrences.
    let lp = ev.basis_p.reevaluate(samples.x()) / c(ev.basis_p.seed_norm());
    let lq = ev.basis_q.reevaluate(samples.x()) / c(ev.basis_q.seed_norm());
    let mut r3 = DMatrix::<C64>::zeros(m, k);
    for j in 0..m {
        let rc = ev.lin_residual[j].conj();
        let cb = rc * f[j] - c(ev.d2) * ev.q_vals[j].conj();
        for i in 0..k1 {
            r3[(j, i)] = -rc * lp[(j, i)];
        }
        for i in 0..k2 {
            r3[(j, k1 + i)] = cb * lq[(j, i)] - c(grad[j]) * ev.hat_b[i].conj();
        }
    }
    // R3 D^+ R3^H = (R3 V_r diag(1/l)) (R3 V_r)^H.
    let v_r = v.select_columns(&keep);
    let rv = &r3 * &v_r;
    let mut rvs = rv.clone();
    for (col, &i) in keep.iter().enumerate() {
        let mut cl = rvs.column_mut(col);
        cl /= c(lambda[i]);
    }
    let core = rvs * rv.adjoint();

    let u: Vec<f64> = ev.q_vals.iter().map(|q| q.norm_sqr()).collect();
    let h = DMatrix::<f64>::from_fn(m, m, |i, j| {
        -2.0 * core[(i, j)].re - grad[i] * u[j] - u[i] * grad[j]
    });
    let hnorm = h.norm();
    let presym_defect = if hnorm > 0.0 { (&h - h.transpose()).norm() / hnorm } else { 0.0 };
    let matrix = (&h + h.transpose()) * 0.5;
    Ok(HessianResult {
        matrix,
        kernel_dim,
        flagged: kernel_dim > 1 || ev.multiple_minimum,
        presym_defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dualcore::eval_d2;

    #[test]
    fn gradient_vanishes_when_interpolating() {
        let x: Vec<C64> = (0..4).map(|j| c(j as f64)).collect();
        let f: Vec<C64> = x.iter().map(|v| (v + 1.0) / (v + 2.0)).collect();
        let s = SampleSet::new(x, f).unwrap();
        let w = SimplexWeights::uniform(4);
        let ev = eval_d2(&s, &w, 1, 1).unwrap();
        let g = gradient(&ev, &w).unwrap();
        assert!(g.values.iter().all(|v| v.abs() < 1e-20), "{:?}", g.values);
    }

    #[test]
    fn euler_identity_and_symmetry() {
        let x: Vec<C64> = (0..10).map(|j| c(-1.0 + j as f64 * 2.0 / 9.0)).collect();
        let f: Vec<C64> = x.iter().map(|v| c(v.re.abs())).collect();
        let s = SampleSet::new(x, f).unwrap();
        let w = SimplexWeights::from_unnormalized((1..=10).map(|j| j as f64).collect()).unwrap();
        let ev = eval_d2(&s, &w, 2, 2).unwrap();
        let g = gradient(&ev, &w).unwrap();
        let euler: f64 = g.values.iter().zip(w.weights()).map(|(a, b)| a * b).sum();
        assert!(euler.abs() <= 1e-12 * ev.d2.max(1.0));
        let h = hessian(&s, &w, &ev).unwrap();
        assert!(h.presym_defect <= 1e-8, "{}", h.presym_defect);
        assert_eq!(h.matrix, h.matrix.transpose());
    }
}
