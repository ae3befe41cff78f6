//! Small dense helpers shared by the basis and dual modules.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::C64;

const PAR_CHUNK: usize = 512;

/// `sum_i conj(a_i) * b_i`.
///
/// The sequential path always reduces left to right, so results are
/// bit-reproducible. The parallel path lets rayon pick the combination order.
pub(crate) fn inner(a: &[C64], b: &[C64], parallel: bool) -> C64 {
    debug_assert_eq!(a.len(), b.len());
    if parallel && a.len() > 2 * PAR_CHUNK {
        a.par_chunks(PAR_CHUNK)
            .zip(b.par_chunks(PAR_CHUNK))
            .map(|(ca, cb)| inner(ca, cb, false))
            .sum()
    } else {
        a.iter().zip(b).fold(C64::new(0.0, 0.0), |acc, (x, y)| acc + x.conj() * y)
    }
}

/// Euclidean norm with scaling, safe for entries near the under/overflow limits.
pub(crate) fn norm2(a: &[C64]) -> f64 {
    let scale = a.iter().fold(0.0_f64, |s, z| s.max(z.re.abs()).max(z.im.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let ssq: f64 = a
        .iter()
        .map(|z| {
            let (r, i) = (z.re / scale, z.im / scale);
            r * r + i * i
        })
        .sum();
    scale * ssq.sqrt()
}

pub(crate) fn norm2_real(a: &[f64]) -> f64 {
    let scale = a.iter().fold(0.0_f64, |s, v| s.max(v.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let ssq: f64 = a.iter().map(|v| (v / scale) * (v / scale)).sum();
    scale * ssq.sqrt()
}

/// Compensated (Neumaier) summation.
pub(crate) fn accurate_sum(values: &[f64]) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for &v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Singular values in ascending order together with the right singular vector
/// of the smallest one.
pub(crate) struct SmallestSingular {
    pub sigmas: Vec<f64>,
    pub right_vector: DVector<C64>,
}

pub(crate) fn smallest_singular(m: &DMatrix<C64>) -> SmallestSingular {
    let ncols = m.ncols();
    assert!(ncols > 0, "smallest_singular on an empty matrix");
    if m.nrows() == 0 {
        let mut v = DVector::zeros(ncols);
        v[0] = C64::new(1.0, 0.0);
        return SmallestSingular { sigmas: vec![0.0; ncols], right_vector: v };
    }
    // Reduce a tall matrix to its triangular factor first; the right singular
    // vectors are unchanged and the SVD works on a k x k problem.
    let core = if m.nrows() > ncols { m.clone().qr().r() } else { m.clone() };
    let wide = core.nrows() < ncols;
    let svd = core.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
    let mut sigmas: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    // A wide matrix has a right null space that the thin SVD leaves out.
    let right_vector = if wide {
        sigmas.insert(0, 0.0);
        null_vector(&v_t, ncols)
    } else {
        v_t.row(order[0]).adjoint()
    };
    sigmas.resize(ncols, 0.0);
    SmallestSingular { sigmas, right_vector }
}

/// A unit vector orthogonal to every row of `v_t` (which has fewer rows than
/// columns).
fn null_vector(v_t: &DMatrix<C64>, ncols: usize) -> DVector<C64> {
    for e in 0..ncols {
        let mut v = DVector::<C64>::zeros(ncols);
        v[e] = C64::new(1.0, 0.0);
        for _ in 0..2 {
            for r in 0..v_t.nrows() {
                let row = v_t.row(r).adjoint();
                let h = row.dotc(&v);
                v -= row * h;
            }
        }
        let n = v.norm();
        if n > 1e-8 {
            return v / C64::new(n, 0.0);
        }
    }
    unreachable!("a wide matrix always has a right null vector")
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub(crate) fn hermitian_eigen(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let sym = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub(crate) fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}
