//! Strong-duality gap and the Ruttan positive-semidefiniteness check.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dualcore::{duality_gap, DualEvaluation, SimplexWeights};
use crate::error::DualError;
use crate::linalg::{c, hermitian_eigen};
use crate::problems::SampleSet;
use crate::C64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub gap: f64,
    pub sqrt_d2: f64,
    pub max_err: f64,
    /// Smallest eigenvalue of `[[I, -S_qp^H], [-S_qp, S_F - e^2 I]]`.
    pub lambda_min: f64,
    pub satisfied: bool,
    /// Nodes carrying positive weight.
    pub support: Vec<usize>,
    /// The smallest singular value was multiple.
    #[serde(default)]
    pub multiple_minimum: bool,
    /// `e = 0`: the gap is the absolute `sqrt(d2)`.
    #[serde(default)]
    pub interpolation: bool,
}

pub fn certify_ruttan(
    samples: &SampleSet,
    w: &SimplexWeights,
    ev: &DualEvaluation,
    eps_r: f64,
) -> Result<Certificate, DualError> {
    if w.len() != samples.len() || ev.residual.len() != samples.len() {
        return Err(DualError::WeightLength { weights: w.len(), samples: samples.len() });
    }
    let sqrt_d2 = ev.sqrt_d2();
    let max_err = ev.max_err();
    let gap = duality_gap(sqrt_d2, max_err);
    let lambda_min =
        if max_err.is_finite() { lambda_min_at(ev, max_err * max_err) } else { f64::NEG_INFINITY };
    Ok(Certificate {
        gap,
        sqrt_d2,
        max_err,
        lambda_min,
        satisfied: gap <= eps_r,
        support: w.active().to_vec(),
        multiple_minimum: ev.multiple_minimum,
        interpolation: max_err == 0.0,
    })
}

/// `lambda_min` with `d2` itself in place of `e^2`. The form is positive
/// semidefinite there, so this should be nonnegative up to rounding.
pub fn lambda_min_self_test(ev: &DualEvaluation) -> f64 {
    lambda_min_at(ev, ev.d2)
}

/// Smallest eigenvalue of the congruent form with `e2` in place of `e^2`.
pub(crate) fn lambda_min_at(ev: &DualEvaluation, e2: f64) -> f64 {
    let k1 = ev.s_qp_h.nrows();
    let k2 = ev.s_qp_h.ncols();
    let k = k1 + k2;
    let mut d = DMatrix::<C64>::zeros(k, k);
    for i in 0..k1 {
        d[(i, i)] = c(1.0);
        for j in 0..k2 {
            d[(i, k1 + j)] = -ev.s_qp_h[(i, j)];
            d[(k1 + j, i)] = -ev.s_qp_h[(i, j)].conj();
        }
    }
    for i in 0..k2 {
        for j in 0..k2 {
            d[(k1 + i, k1 + j)] = ev.s_f[(i, j)];
        }
        d[(k1 + i, k1 + i)] -= c(e2);
    }
    hermitian_eigen(&d).0[0]
}
