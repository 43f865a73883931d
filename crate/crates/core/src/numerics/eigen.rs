//! Symmetric eigendecomposition by cyclic Jacobi rotations.

use std::cmp::Ordering;

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Eigenvalues with matching unit eigenvectors (column `k` pairs with value `k`).
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPairs {
    pub eigenvalues: Array1<f64>,
    pub eigenvectors: Array2<f64>,
}

impl EigenPairs {
    /// The first `k` eigenvectors as an `m x k` matrix.
    pub fn leading(&self, k: usize) -> Array2<f64> {
        self.eigenvectors.slice(ndarray::s![.., ..k]).to_owned()
    }
}

/// Full spectrum of a symmetric matrix, ordered by decreasing magnitude.
///
/// Equal magnitudes are ordered by decreasing signed value. The input is
/// symmetrized as `(M + M^T) / 2` before rotating.
pub fn sym_eigen(m: &Array2<f64>) -> Result<EigenPairs> {
    let (values, vectors) = raw_eigen(m)?;
    let scale = values
        .iter()
        .fold(0.0f64, |a, x| a.max(x.abs()))
        .max(f64::MIN_POSITIVE);
    // quantized magnitude so that rounding noise does not break ties
    let key = |x: f64| (x.abs() / scale * 1e12).round() as i64;

    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| {
        key(values[b])
            .cmp(&key(values[a]))
            .then_with(|| values[b].total_cmp(&values[a]))
            .then(a.cmp(&b))
    });
    Ok(reorder(&values, &vectors, &idx))
}

/// Spectrum ordered by decreasing signed eigenvalue.
pub fn sym_eigen_signed(m: &Array2<f64>) -> Result<EigenPairs> {
    let (values, vectors) = raw_eigen(m)?;
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    Ok(reorder(&values, &vectors, &idx))
}

fn reorder(values: &[f64], vectors: &Array2<f64>, idx: &[usize]) -> EigenPairs {
    let n = values.len();
    let eigenvalues = Array1::from_iter(idx.iter().map(|&i| values[i]));
    let mut eigenvectors = Array2::zeros((n, n));
    for (dst, &src) in idx.iter().enumerate() {
        eigenvectors.column_mut(dst).assign(&vectors.column(src));
    }
    EigenPairs {
        eigenvalues,
        eigenvectors,
    }
}

fn raw_eigen(m: &Array2<f64>) -> Result<(Vec<f64>, Array2<f64>)> {
    let (rows, cols) = m.dim();
    if rows != cols {
        return Err(Error::Input(format!(
            "eigendecomposition needs a square matrix, got {rows}x{cols}"
        )));
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::Input("matrix has non-finite entries".into()));
    }
    let n = rows;
    let mut a: Vec<f64> = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            a.push(0.5 * (m[[i, j]] + m[[j, i]]));
        }
    }
    let mut v = identity(n);
    jacobi(&mut a, &mut v, n);
    let values = (0..n).map(|i| a[i * n + i]).collect();
    Ok((
        values,
        Array2::from_shape_vec((n, n), v).expect("n*n buffer"),
    ))
}

pub(crate) fn identity(n: usize) -> Vec<f64> {
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    v
}

/// Diagonalizes the row-major symmetric `a` in place, accumulating rotations
/// into the row-major `v` (columns are eigenvectors). Returns the sweep count.
pub(crate) fn jacobi(a: &mut [f64], v: &mut [f64], n: usize) -> usize {
    let total: f64 = a.iter().map(|x| x * x).sum();
    if total == 0.0 {
        return 0;
    }
    let threshold = total * 1e-32;
    for sweep in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if off <= threshold {
            return sweep;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let (app, aqq) = (a[p * n + p], a[q * n + q]);
                // skip rotations that cannot change the diagonal at working precision
                if sweep > 3 && apq.abs() * 1e18 < app.abs().min(aqq.abs()) {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = match theta.partial_cmp(&0.0) {
                    Some(Ordering::Less) => -1.0 / (-theta + (theta * theta + 1.0).sqrt()),
                    _ => 1.0 / (theta + (theta * theta + 1.0).sqrt()),
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k * n + p], a[k * n + q]);
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p * n + k], a[q * n + k]);
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    let (vkp, vkq) = (v[k * n + p], v[k * n + q]);
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    MAX_SWEEPS
}
