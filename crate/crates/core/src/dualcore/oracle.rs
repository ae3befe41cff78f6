//! Reference evaluation of `d2(w)` through monomial bases.
//!
//! Deliberately shares nothing with the Arnoldi/SVD route besides the
//! dense factorizations: the bases come from a Householder QR of the scaled
//! Vandermonde matrices and `d2` is the smallest eigenvalue of the Schur
//! complement `S_F - S_qp S_qp^H`. Monomials condition badly as the degree
//! grows, so this is only meant for small problems.

use nalgebra::DMatrix;

use crate::dualcore::SimplexWeights;
use crate::error::DualError;
use crate::linalg::hermitian_eigen;
use crate::problems::SampleSet;
use crate::C64;

/// Above this many active nodes the oracle result carries a warning.
pub const ORACLE_MAX_NODES: usize = 200;
/// Above this degree the oracle result carries a warning.
pub const ORACLE_MAX_DEGREE: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub d2: f64,
    /// Set when the problem is outside the size the oracle is trusted for.
    pub warning: Option<String>,
}

pub fn eval_d2_oracle(
    samples: &SampleSet,
    w: &SimplexWeights,
    n1: usize,
    n2: usize,
) -> Result<OracleResult, DualError> {
    if w.len() != samples.len() {
        return Err(DualError::WeightLength { weights: w.len(), samples: samples.len() });
    }
    let active = w.active();
    if active.is_empty() {
        return Err(DualError::ZeroWeights);
    }
    if active.len() < n2 + 1 {
        return Err(DualError::TooFewActive { required: n2 + 1, active: active.len() });
    }
    let ma = active.len();
    let x: Vec<C64> = active.iter().map(|&j| samples.x()[j]).collect();
    let f: Vec<C64> = active.iter().map(|&j| samples.f()[j]).collect();
    let s: Vec<f64> = active.iter().map(|&j| w.weights()[j].sqrt()).collect();

    let qp = scaled_vandermonde(&x, &s, n1).qr().q();
    let qq = scaled_vandermonde(&x, &s, n2).qr().q();
    let fqq = DMatrix::from_fn(ma, qq.ncols(), |r, c| f[r] * qq[(r, c)]);
    let s_f = fqq.adjoint() * &fqq;
    let s_qp = fqq.adjoint() * &qp;
    let schur = s_f - &s_qp * s_qp.adjoint();
    let (values, _) = hermitian_eigen(&schur);
    let d2 = values[0].max(0.0);

    let warning = if ma > ORACLE_MAX_NODES || n1.max(n2) > ORACLE_MAX_DEGREE {
        Some(format!(
            "oracle used with {ma} nodes and degree {}; monomial bases are unreliable beyond {} nodes or degree {}",
            n1.max(n2),
            ORACLE_MAX_NODES,
            ORACLE_MAX_DEGREE
        ))
    } else {
        None
    };
    Ok(OracleResult { d2, warning })
}

fn scaled_vandermonde(x: &[C64], s: &[f64], n: usize) -> DMatrix<C64> {
    let mut v = DMatrix::zeros(x.len(), n + 1);
    for (r, (&xr, &sr)) in x.iter().zip(s).enumerate() {
        let mut p = C64::new(sr, 0.0);
        for c in 0..=n {
            v[(r, c)] = p;
            p *= xr;
        }
    }
    v
}
