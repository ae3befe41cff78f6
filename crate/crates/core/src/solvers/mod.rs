//! d-Lawson and the Sanathanan–Koerner baselines.

mod dlawson;
mod sk;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use dlawson::{d_lawson, d_lawson_seeded, filter_nodes, lawson_update, LawsonUpdate};
pub use sk::{sk_iteration, ssk_iteration, SK_STEP_TOL};

use crate::dualcore::{Certificate, DualEvaluation, SimplexWeights};
use crate::error::SolveError;
use crate::orthobasis::Recurrence;
use crate::problems::SampleSet;
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    DLawson,
    SK,
    SSK,
}

impl Method {
    pub fn parse(s: &str) -> Option<Method> {
        match s.to_ascii_lowercase().as_str() {
            "dlawson" | "d-lawson" | "d_lawson" => Some(Method::DLawson),
            "sk" => Some(Method::SK),
            "ssk" | "s-sk" | "s_sk" => Some(Method::SSK),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::DLawson => "dlawson",
            Method::SK => "sk",
            Method::SSK => "ssk",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Lawson exponent in `(0, 1]`.
    pub beta: f64,
    /// Relative duality-gap tolerance.
    pub eps_r: f64,
    /// Weights below this are filtered out.
    pub eps_w: f64,
    pub k_max: usize,
    pub method: Method,
    /// Sequential inner products (bit-reproducible). `false` allows rayon.
    pub deterministic_reduction: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            beta: 1.0,
            eps_r: 1e-5,
            eps_w: 1e-40,
            k_max: 40,
            method: Method::DLawson,
            deterministic_reduction: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolveError> {
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(SolveError::Config(format!("beta must lie in (0, 1], got {}", self.beta)));
        }
        if self.eps_r.is_nan() || self.eps_r <= 0.0 || self.eps_r.is_infinite() {
            return Err(SolveError::Config(format!("eps_r must be positive, got {}", self.eps_r)));
        }
        if self.eps_w.is_nan() || self.eps_w < 0.0 || self.eps_w.is_infinite() {
            return Err(SolveError::Config(format!(
                "eps_w must be nonnegative, got {}",
                self.eps_w
            )));
        }
        if self.k_max < 1 {
            return Err(SolveError::Config("k_max must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub k: usize,
    /// `NaN` for the SK baselines, which have no dual value.
    pub sqrt_d2: f64,
    pub max_err: f64,
    pub gap: f64,
    pub active_count: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveTrace {
    pub records: Vec<TraceRecord>,
    /// Index of the returned iterate: smallest gap for d-Lawson, smallest
    /// `max_err` for SK/S-SK. Earliest wins ties.
    pub best_k: usize,
}

impl SolveTrace {
    pub fn best(&self) -> Option<&TraceRecord> {
        self.records.get(self.best_k)
    }

    /// Number of `k` with `sqrt_d2[k] < sqrt_d2[k-1] - tol`.
    pub fn monotonicity_violations(&self, tol: f64) -> usize {
        self.records.windows(2).filter(|p| p[1].sqrt_d2 < p[0].sqrt_d2 - tol).count()
    }
}

/// A rational approximant `p/q` stored as Arnoldi recurrences plus
/// coefficients, evaluable at arbitrary points.
#[derive(Debug, Clone, PartialEq)]
pub struct Approximant {
    pub n1: usize,
    pub n2: usize,
    pub recurrence_p: Recurrence,
    pub recurrence_q: Recurrence,
    pub hat_a: DVector<C64>,
    pub hat_b: DVector<C64>,
    /// Hex SHA-256 of the sample nodes the approximant was fitted on.
    pub source_nodes_digest: String,
}

impl Approximant {
    pub fn from_evaluation(ev: &DualEvaluation, samples: &SampleSet) -> Self {
        Approximant {
            n1: ev.n1,
            n2: ev.n2,
            recurrence_p: ev.basis_p.recurrence().clone(),
            recurrence_q: ev.basis_q.recurrence().clone(),
            hat_a: ev.hat_a.clone(),
            hat_b: ev.hat_b.clone(),
            source_nodes_digest: nodes_digest(samples.x()),
        }
    }

    /// Numerator and denominator values at `y`, with the scaling of the
    /// fit (`sum_j w_j |q(x_j)|^2 = 1`).
    pub fn evaluate_pq(&self, y: &[C64]) -> (Vec<C64>, Vec<C64>) {
        let p = self.recurrence_p.reevaluate(y) * &self.hat_a
            / C64::new(self.recurrence_p.seed_norm(), 0.0);
        let q = self.recurrence_q.reevaluate(y) * &self.hat_b
            / C64::new(self.recurrence_q.seed_norm(), 0.0);
        (p.iter().copied().collect(), q.iter().copied().collect())
    }

    /// `p(y) / q(y)`.
    pub fn evaluate(&self, y: &[C64]) -> Vec<C64> {
        let (p, q) = self.evaluate_pq(y);
        p.iter().zip(&q).map(|(a, b)| a / b).collect()
    }
}

pub fn nodes_digest(x: &[C64]) -> String {
    let mut h = Sha256::new();
    for v in x {
        h.update(v.re.to_le_bytes());
        h.update(v.im.to_le_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Serialize, Deserialize)]
struct ApproximantJson {
    n1: usize,
    n2: usize,
    recurrence_p: Recurrence,
    recurrence_q: Recurrence,
    hat_a: Vec<[f64; 2]>,
    hat_b: Vec<[f64; 2]>,
    source_nodes_digest: String,
}

fn pairs(v: &DVector<C64>) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn unpairs(v: &[[f64; 2]]) -> DVector<C64> {
    DVector::from_iterator(v.len(), v.iter().map(|p| C64::new(p[0], p[1])))
}

impl Serialize for Approximant {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ApproximantJson {
            n1: self.n1,
            n2: self.n2,
            recurrence_p: self.recurrence_p.clone(),
            recurrence_q: self.recurrence_q.clone(),
            hat_a: pairs(&self.hat_a),
            hat_b: pairs(&self.hat_b),
            source_nodes_digest: self.source_nodes_digest.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Approximant {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = ApproximantJson::deserialize(d)?;
        if j.hat_a.len() != j.recurrence_p.rank() || j.hat_b.len() != j.recurrence_q.rank() {
            return Err(serde::de::Error::custom(
                "coefficient length does not match recurrence rank",
            ));
        }
        Ok(Approximant {
            n1: j.n1,
            n2: j.n2,
            recurrence_p: j.recurrence_p,
            recurrence_q: j.recurrence_q,
            hat_a: unpairs(&j.hat_a),
            hat_b: unpairs(&j.hat_b),
            source_nodes_digest: j.source_nodes_digest,
        })
    }
}

/// The result of a solve: the chosen iterate and how the run went.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub approximant: Approximant,
    pub trace: SolveTrace,
    /// Only d-Lawson produces a certificate.
    pub certificate: Option<Certificate>,
    /// Dual evaluation at the returned iterate.
    pub evaluation: DualEvaluation,
    /// Weights at the returned iterate.
    pub weights: SimplexWeights,
}

impl SolveOutcome {
    /// `|f_j - xi_j|` at the returned iterate, over all sample nodes.
    pub fn residual(&self) -> &[f64] {
        &self.evaluation.residual
    }

    pub fn max_err(&self) -> f64 {
        self.evaluation.max_err()
    }
}

/// Runs `cfg.method`.
pub fn solve(
    samples: &SampleSet,
    n1: usize,
    n2: usize,
    cfg: &SolverConfig,
) -> Result<SolveOutcome, SolveError> {
    match cfg.method {
        Method::DLawson => d_lawson(samples, n1, n2, cfg),
        Method::SK => sk_iteration(samples, n1, n2, cfg),
        Method::SSK => ssk_iteration(samples, n1, n2, cfg),
    }
}

pub(crate) fn check_size(samples: &SampleSet, n1: usize, n2: usize) -> Result<(), SolveError> {
    let required = n1 + n2 + 2;
    if samples.len() < required {
        return Err(SolveError::TooFewNodes { n1, n2, required, got: samples.len() });
    }
    Ok(())
}
