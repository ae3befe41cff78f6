//! Benchmark functions, node schemes and sample sets.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::ProblemError;
use crate::C64;

/// Scalar function evaluated at the sample nodes.
#[derive(Clone)]
pub enum FunctionId {
    /// `|x|` on `[-1, 1]`.
    Abs,
    /// `sqrt(x)` on `[1e-8, 1]`.
    Sqrt,
    /// `-1 / log|x|` on `[-0.1, 0.1]`, with the value at `0` set to `0`.
    InvLog,
    /// `t / sinh(t)`, `t = 100 pi (x^2 - 0.36)`, with the value at `+-0.6` set to `1`.
    SinhRatio,
    /// `tan z` on the unit circle.
    Tan,
    /// `log(1 + z/2)` on the unit circle.
    Log1HalfZ,
    /// `(1 + 2z)^(-1/2)` on the right half circle.
    InvSqrt1p2z,
    /// `(1 + z^4)^(1/2)` on the tanh-clustered arc.
    Sqrt1pZ4,
    Custom(Arc<dyn Fn(C64) -> C64 + Send + Sync>),
}

impl fmt::Debug for FunctionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionId::Custom(_) => f.write_str("Custom(..)"),
            other => f.write_str(other.name()),
        }
    }
}

impl FunctionId {
    pub const BENCHMARKS: [FunctionId; 8] = [
        FunctionId::Abs,
        FunctionId::Sqrt,
        FunctionId::InvLog,
        FunctionId::SinhRatio,
        FunctionId::Tan,
        FunctionId::Log1HalfZ,
        FunctionId::InvSqrt1p2z,
        FunctionId::Sqrt1pZ4,
    ];

    pub fn custom(f: impl Fn(C64) -> C64 + Send + Sync + 'static) -> Self {
        FunctionId::Custom(Arc::new(f))
    }

    /// CLI name, `f1`..`f8`.
    pub fn name(&self) -> &'static str {
        match self {
            FunctionId::Abs => "f1",
            FunctionId::Sqrt => "f2",
            FunctionId::InvLog => "f3",
            FunctionId::SinhRatio => "f4",
            FunctionId::Tan => "f5",
            FunctionId::Log1HalfZ => "f6",
            FunctionId::InvSqrt1p2z => "f7",
            FunctionId::Sqrt1pZ4 => "f8",
            FunctionId::Custom(_) => "custom",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::BENCHMARKS.iter().find(|f| f.name() == name).cloned()
    }

    /// Whether the function is a real function of a real variable.
    pub fn is_real(&self) -> bool {
        matches!(
            self,
            FunctionId::Abs | FunctionId::Sqrt | FunctionId::InvLog | FunctionId::SinhRatio
        )
    }

    /// The default node scheme used by the benchmark tables.
    pub fn default_scheme(&self, m: usize) -> Option<NodeScheme> {
        Some(match self {
            FunctionId::Abs | FunctionId::SinhRatio => {
                NodeScheme::Equispaced { a: -1.0, b: 1.0, m }
            }
            FunctionId::Sqrt => NodeScheme::Equispaced { a: 1e-8, b: 1.0, m },
            FunctionId::InvLog => NodeScheme::Equispaced { a: -0.1, b: 0.1, m },
            FunctionId::Tan | FunctionId::Log1HalfZ => NodeScheme::UnitCircle { m },
            FunctionId::InvSqrt1p2z => NodeScheme::HalfCircle { m },
            FunctionId::Sqrt1pZ4 => NodeScheme::TanhArc { m },
            FunctionId::Custom(_) => return None,
        })
    }

    /// Evaluates the function, applying the removable-singularity patches.
    pub fn eval(&self, z: C64) -> C64 {
        let one = C64::new(1.0, 0.0);
        match self {
            FunctionId::Abs => C64::new(z.re.abs(), 0.0),
            FunctionId::Sqrt => C64::new(z.re.sqrt(), 0.0),
            FunctionId::InvLog => {
                if z.re == 0.0 {
                    C64::new(0.0, 0.0)
                } else {
                    C64::new(-1.0 / z.re.abs().ln(), 0.0)
                }
            }
            FunctionId::SinhRatio => {
                if z.re == 0.6 || z.re == -0.6 {
                    one
                } else {
                    C64::new(sinh_ratio(100.0 * PI * (z.re * z.re - 0.36)), 0.0)
                }
            }
            FunctionId::Tan => z.tan(),
            FunctionId::Log1HalfZ => (one + z * 0.5).ln(),
            FunctionId::InvSqrt1p2z => one / (one + z * 2.0).sqrt(),
            FunctionId::Sqrt1pZ4 => (one + z.powi(4)).sqrt(),
            FunctionId::Custom(f) => f(z),
        }
    }
}

/// `t / sinh t`, switching to its Taylor expansion near the removable singularity.
fn sinh_ratio(t: f64) -> f64 {
    if t.abs() < 1e-8 {
        1.0 - t * t / 6.0
    } else {
        t / t.sinh()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NodeScheme {
    /// `m` equally spaced points from `a` to `b`, both endpoints included.
    Equispaced {
        a: f64,
        b: f64,
        m: usize,
    },
    /// `z_j = exp(-pi i + 2 pi i j / m)`, `j = 0..m-1`.
    UnitCircle {
        m: usize,
    },
    /// `z_j = exp(-pi i / 2 + j pi i / m)`, `j = 0..=m` (`m + 1` nodes).
    HalfCircle {
        m: usize,
    },
    /// `z_j = exp(i pi/4 tanh(-12 + 24 j / m))`, `j = 0..=m` (`m + 1` nodes).
    TanhArc {
        m: usize,
    },
    Explicit(Vec<C64>),
}

impl NodeScheme {
    /// Parses `equispaced:A:B:M`, `unit_circle:M`, `half_circle:M` or
    /// `tanh_arc:M`. `file:PATH` schemes are resolved by the caller.
    pub fn parse(text: &str) -> Result<Self, String> {
        let parts: Vec<&str> = text.split(':').collect();
        let count = |s: &str| s.parse::<usize>().map_err(|e| format!("bad node count `{s}`: {e}"));
        let real = |s: &str| s.parse::<f64>().map_err(|e| format!("bad endpoint `{s}`: {e}"));
        match parts.as_slice() {
            ["equispaced", a, b, m] => Ok(NodeScheme::Equispaced { a: real(a)?, b: real(b)?, m: count(m)? }),
            ["unit_circle", m] => Ok(NodeScheme::UnitCircle { m: count(m)? }),
            ["half_circle", m] => Ok(NodeScheme::HalfCircle { m: count(m)? }),
            ["tanh_arc", m] => Ok(NodeScheme::TanhArc { m: count(m)? }),
            _ => Err(format!(
                "unknown scheme `{text}` (expected equispaced:A:B:M, unit_circle:M, half_circle:M, tanh_arc:M or file:PATH)"
            )),
        }
    }
}

/// Generates the nodes of a scheme in index order.
pub fn generate_nodes(scheme: &NodeScheme) -> Result<Vec<C64>, ProblemError> {
    let nodes = match *scheme {
        NodeScheme::Equispaced { a, b, m } => {
            check_count(m)?;
            if a.partial_cmp(&b) != Some(std::cmp::Ordering::Less) {
                return Err(ProblemError::EmptyInterval { a, b });
            }
            let d = (m - 1) as f64;
            // Convex combination of the endpoints: hits interior points with
            // short binary expansions (0, +-0.6 on a 2001-point grid) exactly.
            (0..m).map(|j| C64::new((a * (d - j as f64) + b * j as f64) / d, 0.0)).collect()
        }
        NodeScheme::UnitCircle { m } => {
            check_count(m)?;
            (0..m).map(|j| C64::from_polar(1.0, -PI + 2.0 * PI * j as f64 / m as f64)).collect()
        }
        NodeScheme::HalfCircle { m } => {
            check_count(m)?;
            (0..=m).map(|j| C64::from_polar(1.0, -PI / 2.0 + j as f64 * PI / m as f64)).collect()
        }
        NodeScheme::TanhArc { m } => {
            check_count(m)?;
            (0..=m)
                .map(|j| {
                    C64::from_polar(1.0, PI / 4.0 * (-12.0 + 24.0 * j as f64 / m as f64).tanh())
                })
                .collect()
        }
        NodeScheme::Explicit(ref nodes) => {
            check_count(nodes.len())?;
            nodes.clone()
        }
    };
    check_nodes(&nodes)?;
    Ok(nodes)
}

fn check_count(m: usize) -> Result<(), ProblemError> {
    if m < 2 {
        return Err(ProblemError::TooFewNodes { required: 2, got: m });
    }
    Ok(())
}

/// Finite and pairwise distinct.
fn check_nodes(nodes: &[C64]) -> Result<(), ProblemError> {
    if let Some(index) = nodes.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(ProblemError::NonFiniteNode { index });
    }
    let mut order: Vec<usize> = (0..nodes.len()).collect();
    order.sort_by(|&i, &j| {
        nodes[i].re.total_cmp(&nodes[j].re).then(nodes[i].im.total_cmp(&nodes[j].im))
    });
    for pair in order.windows(2) {
        if nodes[pair[0]] == nodes[pair[1]] {
            let (first, second) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            return Err(ProblemError::DuplicateNodes { first, second });
        }
    }
    Ok(())
}

/// Nodes `x` with sampled values `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    x: Vec<C64>,
    f: Vec<C64>,
}

impl SampleSet {
    pub fn new(x: Vec<C64>, f: Vec<C64>) -> Result<Self, ProblemError> {
        if x.len() != f.len() {
            return Err(ProblemError::LengthMismatch { nodes: x.len(), values: f.len() });
        }
        check_nodes(&x)?;
        if let Some(index) = f.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(ProblemError::NonFiniteValue { index });
        }
        Ok(SampleSet { x, f })
    }

    pub fn x(&self) -> &[C64] {
        &self.x
    }

    pub fn f(&self) -> &[C64] {
        &self.f
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Keeps the samples at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> SampleSet {
        SampleSet {
            x: indices.iter().map(|&i| self.x[i]).collect(),
            f: indices.iter().map(|&i| self.f[i]).collect(),
        }
    }
}

/// Samples `fid` at `nodes`.
pub fn sample(fid: &FunctionId, nodes: &[C64]) -> Result<SampleSet, ProblemError> {
    let f = nodes.iter().map(|&z| fid.eval(z)).collect();
    SampleSet::new(nodes.to_vec(), f)
}
