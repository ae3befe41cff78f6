//! Orthonormal bases of weighted Krylov subspaces.
//!
//! For nodes `x` and a seed `s`, the Krylov space `K_k(diag(x), s)` equals the
//! column space of `diag(s) V` with `V` the Vandermonde matrix of `x`. Arnoldi
//! with modified Gram-Schmidt (plus one reorthogonalization sweep) builds an
//! orthonormal basis `Q` of it without ever forming `V`, and records the
//! Hessenberg coefficients `H` with `diag(x) Q[:, ..k-1] = Q H`.
//!
//! Replaying the same recurrence at other nodes `y`, starting from the
//! all-ones vector, gives a (non-orthonormal) polynomial basis `L` of the same
//! polynomial space, normalized so that `diag(s) L = |s| Q` at `y = x`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::DualError;
use crate::linalg::{inner, norm2, norm2_real};
use crate::C64;

const BREAKDOWN_RTOL: f64 = 1e-14;
const BREAKDOWN_ATOL: f64 = 1e-300;

/// Hessenberg recurrence of an Arnoldi run: enough to evaluate the basis
/// polynomials anywhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RecurrenceJson", into = "RecurrenceJson")]
pub struct Recurrence {
    /// `rank x (rank - 1)` upper Hessenberg matrix.
    h: DMatrix<C64>,
    seed_norm: f64,
}

#[derive(Serialize, Deserialize)]
struct RecurrenceJson {
    rank: usize,
    seed_norm: f64,
    /// Row-major `[re, im]` pairs.
    h: Vec<[f64; 2]>,
}

impl From<Recurrence> for RecurrenceJson {
    fn from(r: Recurrence) -> Self {
        let k = r.rank();
        let mut h = Vec::with_capacity(k * k.saturating_sub(1));
        for i in 0..k {
            for j in 0..k.saturating_sub(1) {
                let z = r.h[(i, j)];
                h.push([z.re, z.im]);
            }
        }
        RecurrenceJson { rank: k, seed_norm: r.seed_norm, h }
    }
}

impl TryFrom<RecurrenceJson> for Recurrence {
    type Error = String;

    fn try_from(js: RecurrenceJson) -> Result<Self, Self::Error> {
        let k = js.rank;
        if k == 0 {
            return Err("recurrence rank must be positive".into());
        }
        let cols = k - 1;
        if js.h.len() != k * cols {
            return Err(format!(
                "recurrence of rank {k} needs {} coefficients, found {}",
                k * cols,
                js.h.len()
            ));
        }
        if !(js.seed_norm > 0.0 && js.seed_norm.is_finite()) {
            return Err(format!("seed_norm must be positive and finite, got {}", js.seed_norm));
        }
        if js.h.iter().flatten().any(|v| !v.is_finite()) {
            return Err("recurrence coefficients must be finite".into());
        }
        let h = DMatrix::from_fn(k, cols, |i, j| {
            let [re, im] = js.h[i * cols + j];
            C64::new(re, im)
        });
        if (0..cols).any(|j| h[(j + 1, j)].norm() == 0.0) {
            return Err("recurrence has a zero subdiagonal entry".into());
        }
        Ok(Recurrence { h, seed_norm: js.seed_norm })
    }
}

impl Recurrence {
    pub fn rank(&self) -> usize {
        self.h.nrows()
    }

    pub fn seed_norm(&self) -> f64 {
        self.seed_norm
    }

    pub fn hessenberg(&self) -> &DMatrix<C64> {
        &self.h
    }

    /// Basis values `L` (`y.len() x rank`) at new nodes, `L e_1 = 1`.
    pub fn reevaluate(&self, y: &[C64]) -> DMatrix<C64> {
        let k = self.rank();
        let mut l = DMatrix::<C64>::zeros(y.len(), k);
        l.column_mut(0).fill(C64::new(1.0, 0.0));
        for j in 0..k.saturating_sub(1) {
            let hsub = self.h[(j + 1, j)];
            for r in 0..y.len() {
                let mut v = y[r] * l[(r, j)];
                for i in 0..=j {
                    v -= self.h[(i, j)] * l[(r, i)];
                }
                l[(r, j + 1)] = v / hsub;
            }
        }
        l
    }

    /// Like [`Recurrence::reevaluate`] but only the first `width` columns.
    pub fn reevaluate_cols(&self, y: &[C64], width: usize) -> Result<DMatrix<C64>, DualError> {
        if width > self.rank() {
            return Err(DualError::RankTooSmall { rank: self.rank(), requested: width });
        }
        let l = self.reevaluate(y);
        Ok(l.columns(0, width).into_owned())
    }
}

/// Orthonormal basis `Q` of a weighted Krylov space with its recurrence.
#[derive(Debug, Clone, PartialEq)]
pub struct KrylovBasis {
    q: DMatrix<C64>,
    recurrence: Recurrence,
}

impl Serialize for KrylovBasis {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.recurrence.serialize(serializer)
    }
}

impl KrylovBasis {
    /// `m x rank` matrix with orthonormal columns.
    pub fn q(&self) -> &DMatrix<C64> {
        &self.q
    }

    pub fn rank(&self) -> usize {
        self.q.ncols()
    }

    pub fn seed_norm(&self) -> f64 {
        self.recurrence.seed_norm
    }

    pub fn hessenberg(&self) -> &DMatrix<C64> {
        &self.recurrence.h
    }

    pub fn recurrence(&self) -> &Recurrence {
        &self.recurrence
    }

    pub fn into_recurrence(self) -> Recurrence {
        self.recurrence
    }

    pub fn reevaluate(&self, y: &[C64]) -> DMatrix<C64> {
        self.recurrence.reevaluate(y)
    }

    pub fn reevaluate_cols(&self, y: &[C64], width: usize) -> Result<DMatrix<C64>, DualError> {
        self.recurrence.reevaluate_cols(y, width)
    }
}

/// Arnoldi on `diag(x)` started from `s`, for degree `n` (at most `n + 1`
/// columns). The basis is truncated at the first breakdown.
pub fn weighted_arnoldi(x: &[C64], s: &[f64], n: usize) -> Result<KrylovBasis, DualError> {
    weighted_arnoldi_with(x, s, n, false)
}

/// [`weighted_arnoldi`] with optional parallel inner products.
pub fn weighted_arnoldi_with(
    x: &[C64],
    s: &[f64],
    n: usize,
    parallel: bool,
) -> Result<KrylovBasis, DualError> {
    let m = x.len();
    if s.len() != m {
        return Err(DualError::SeedLength { seed: s.len(), nodes: m });
    }
    if let Some(index) = x.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(DualError::NonFinite { index });
    }
    if let Some(index) = s.iter().position(|v| !v.is_finite()) {
        return Err(DualError::NonFinite { index });
    }
    let seed_norm = norm2_real(s);
    if seed_norm == 0.0 {
        return Err(DualError::EmptySeed);
    }

    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n + 1);
    cols.push(s.iter().map(|&v| C64::new(v / seed_norm, 0.0)).collect());
    let mut h = DMatrix::<C64>::zeros(n + 1, n);
    let mut built = 0;
    for j in 0..n {
        let mut v: Vec<C64> = x.iter().zip(&cols[j]).map(|(xi, qi)| xi * qi).collect();
        let base = norm2(&v);
        for _sweep in 0..2 {
            for (i, qi) in cols.iter().enumerate() {
                let coef = inner(qi, &v, parallel);
                for (vr, qr) in v.iter_mut().zip(qi) {
                    *vr -= coef * qr;
                }
                h[(i, j)] += coef;
            }
        }
        let beta = norm2(&v);
        if beta <= BREAKDOWN_RTOL * base + BREAKDOWN_ATOL {
            break;
        }
        h[(j + 1, j)] = C64::new(beta, 0.0);
        let inv = 1.0 / beta;
        cols.push(v.into_iter().map(|z| z * inv).collect());
        built = j + 1;
    }
    let k = built + 1;
    let q = DMatrix::from_fn(m, k, |r, c| cols[c][r]);
    let h = h.view((0, 0), (k, built)).into_owned();
    Ok(KrylovBasis { q, recurrence: Recurrence { h, seed_norm } })
}
