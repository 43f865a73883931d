//! ADMM solver for the clustering SDP
//!
//! ```text
//! maximize   trace(S X)
//! subject to X >= 0 (entrywise), X PSD, X 1 = 1, trace(X) = K
//! ```
//!
//! The feasible set is split into the PSD cone and the polytope
//! `{X >= 0, X 1 = 1, trace(X) = K}`. Each set gets its own copy of the
//! variable (`Y` and `Z`); the consensus variable `X` is the average of the
//! dual-shifted copies. The PSD projection clamps negative eigenvalues, the
//! polytope projection alternates (Dykstra) between the affine constraints
//! and the nonnegative orthant. Both copies are over-relaxed towards the
//! previous consensus before averaging.

use ndarray::{Array2, Zip};
use serde::{Deserialize, Serialize};

use super::{check_cluster_count, SimilarityMatrix};
use crate::error::{Error, Result};
use crate::numerics::{identity, jacobi};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SdpParams {
    /// Stop once both residuals drop below this value.
    pub tol: f64,
    pub max_iter: usize,
    /// Initial ADMM penalty.
    pub rho: f64,
    /// Residual balancing period; 0 disables it.
    pub adapt_every: usize,
    /// Dykstra sweeps per polytope projection.
    pub dykstra_iter: usize,
    /// Over-relaxation factor in (0, 2); 1 is plain ADMM.
    pub relaxation: f64,
}

impl Default for SdpParams {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            max_iter: 20_000,
            rho: 1.0,
            adapt_every: 50,
            dykstra_iter: 100,
            relaxation: 1.6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SdpDiagnostics {
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub objective: f64,
    pub rho: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpSolution {
    pub x: Array2<f64>,
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub objective: f64,
}

impl SdpSolution {
    pub fn diagnostics(&self, rho: f64) -> SdpDiagnostics {
        SdpDiagnostics {
            iterations: self.iterations,
            primal_residual: self.primal_residual,
            dual_residual: self.dual_residual,
            objective: self.objective,
            rho,
        }
    }

    /// Largest violation among the four constraint families:
    /// `(negative entry, negative eigenvalue, row sum, trace)`.
    pub fn constraint_violations(&self, k: usize) -> Result<[f64; 4]> {
        let x = &self.x;
        let neg_entry = x.iter().fold(0.0f64, |a, &v| a.max(-v));
        let (values, _) = eigen_raw(x, None);
        let neg_eig = values.iter().fold(0.0f64, |a, &v| a.max(-v));
        let row = x
            .rows()
            .into_iter()
            .fold(0.0f64, |a, r| a.max((r.sum() - 1.0).abs()));
        let trace = (x.diag().sum() - k as f64).abs();
        Ok([neg_entry, neg_eig, row, trace])
    }
}

/// `X_ij = 1 / |C|` when `i` and `j` share cluster `C`, else 0.
pub fn normalized_clustering_matrix(labels: &[usize]) -> Array2<f64> {
    let m = labels.len();
    let k = labels.iter().max().map_or(0, |&l| l + 1);
    let mut sizes = vec![0usize; k];
    for &l in labels {
        sizes[l] += 1;
    }
    Array2::from_shape_fn((m, m), |(i, j)| {
        if labels[i] == labels[j] {
            1.0 / sizes[labels[i]] as f64
        } else {
            0.0
        }
    })
}

fn frob_diff(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    Zip::from(a)
        .and(b)
        .fold(0.0, |acc, &x, &y| acc + (x - y) * (x - y))
        .sqrt()
}

fn inner(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    Zip::from(a).and(b).fold(0.0, |acc, &x, &y| acc + x * y)
}

/// Eigendecomposition of a symmetric matrix, optionally warm-started from a
/// previous eigenbasis (columns of `basis`). Returns values and the basis.
fn eigen_raw(m: &Array2<f64>, basis: Option<&Array2<f64>>) -> (Vec<f64>, Array2<f64>) {
    let n = m.nrows();
    let rotated = match basis {
        Some(v) => v.t().dot(m).dot(v),
        None => m.clone(),
    };
    let mut a: Vec<f64> = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            a.push(0.5 * (rotated[[i, j]] + rotated[[j, i]]));
        }
    }
    let mut v = identity(n);
    jacobi(&mut a, &mut v, n);
    let values = (0..n).map(|i| a[i * n + i]).collect();
    let local = Array2::from_shape_vec((n, n), v).expect("n*n buffer");
    let vectors = match basis {
        Some(b) => b.dot(&local),
        None => local,
    };
    (values, vectors)
}

struct PsdProjector {
    basis: Option<Array2<f64>>,
}

impl PsdProjector {
    fn project(&mut self, m: &Array2<f64>) -> Array2<f64> {
        let (values, vectors) = eigen_raw(m, self.basis.as_ref());
        let n = m.nrows();
        let mut scaled = vectors.clone();
        for (k, &lambda) in values.iter().enumerate() {
            let c = lambda.max(0.0);
            scaled.column_mut(k).mapv_inplace(|x| x * c);
        }
        let out = scaled.dot(&vectors.t());
        self.basis = Some(vectors);
        // symmetrize away rounding
        Array2::from_shape_fn((n, n), |(i, j)| 0.5 * (out[[i, j]] + out[[j, i]]))
    }
}

/// Projection of a symmetric matrix onto `{X symmetric, X 1 = 1, trace(X) = K}`.
///
/// The correction has the form `l 1^T + 1 l^T + mu I`; `l` and `mu` solve
/// the constraint equations in closed form.
fn project_affine(x: &Array2<f64>, k: usize) -> Array2<f64> {
    let m = x.nrows();
    let mf = m as f64;
    let r: Vec<f64> = x.rows().into_iter().map(|row| 1.0 - row.sum()).collect();
    let r_total: f64 = r.iter().sum();
    let trace = x.diag().sum();
    let mu = if m > 1 {
        (k as f64 - trace - r_total / mf) / (mf - 1.0)
    } else {
        0.0
    };
    let s = 0.5 * (r_total / mf - mu);
    let lambda: Vec<f64> = r.iter().map(|ri| (ri - s - mu) / mf).collect();
    let mut out = x.clone();
    for i in 0..m {
        for j in 0..m {
            out[[i, j]] += lambda[i] + lambda[j];
        }
        out[[i, i]] += mu;
    }
    out
}

fn affine_violation(x: &Array2<f64>, k: usize) -> f64 {
    let row = x
        .rows()
        .into_iter()
        .fold(0.0f64, |a, r| a.max((r.sum() - 1.0).abs()));
    row.max((x.diag().sum() - k as f64).abs())
}

/// Dykstra alternation between the affine set and the nonnegative orthant.
fn project_polytope(x: &Array2<f64>, k: usize, sweeps: usize, tol: f64) -> Array2<f64> {
    let mut cur = x.clone();
    let mut q = Array2::<f64>::zeros(x.dim());
    // the affine set needs no Dykstra correction
    for _ in 0..sweeps.max(1) {
        let y = project_affine(&cur, k);
        let shifted = &y + &q;
        let next = shifted.mapv(|v| v.max(0.0));
        q = &shifted - &next;
        let change = frob_diff(&next, &cur);
        cur = next;
        if change <= tol && affine_violation(&cur, k) <= tol {
            break;
        }
    }
    cur
}

/// Solves the clustering SDP for the similarity matrix `s` with `k` clusters.
pub fn solve_sdp(s: &SimilarityMatrix, k: usize, params: &SdpParams) -> Result<SdpSolution> {
    let m = s.len();
    check_cluster_count(k, m)?;
    let positive = |x: f64| x > 0.0;
    if !positive(params.tol)
        || params.max_iter == 0
        || !positive(params.rho)
        || !(positive(params.relaxation) && params.relaxation < 2.0)
    {
        return Err(Error::Input(format!(
            "invalid SDP solver settings {params:?}"
        )));
    }
    let sim = s.values();
    let mf = m as f64;
    let kf = k as f64;

    // feasible start: K/m on the diagonal, the remaining row mass spread evenly
    let off = (1.0 - kf / mf) / (mf - 1.0);
    let mut x = Array2::from_shape_fn((m, m), |(i, j)| if i == j { kf / mf } else { off });
    let mut u = Array2::<f64>::zeros((m, m));
    let mut w = Array2::<f64>::zeros((m, m));
    let mut z = x.clone();
    let mut rho = params.rho;
    let mut psd = PsdProjector { basis: None };
    let inner_tol = params.tol * 1e-3;

    let mut primal = f64::INFINITY;
    let mut dual = f64::INFINITY;
    let mut iterations = 0;
    while iterations < params.max_iter {
        iterations += 1;
        let y_in = &x - &u + &sim.mapv(|v| v / rho);
        let y = psd.project(&y_in);
        z = project_polytope(&(&x - &w), k, params.dykstra_iter, inner_tol);
        let alpha = params.relaxation;
        let yh = &y * alpha + &x * (1.0 - alpha);
        let zh = &z * alpha + &x * (1.0 - alpha);
        let x_new = ((&yh + &u) + (&zh + &w)).mapv(|v| 0.5 * v);
        u += &(&yh - &x_new);
        w += &(&zh - &x_new);

        // the copy gap bounds how far the returned Z is from the PSD cone
        let consensus = (frob_diff(&y, &x_new).powi(2) + frob_diff(&z, &x_new).powi(2)).sqrt();
        primal = consensus.max(frob_diff(&y, &z));
        dual = rho * std::f64::consts::SQRT_2 * frob_diff(&x_new, &x);
        x = x_new;

        if primal.max(dual) <= params.tol {
            break;
        }
        if params.adapt_every > 0 && iterations % params.adapt_every == 0 {
            if primal > 10.0 * dual {
                rho *= 2.0;
                u.mapv_inplace(|v| v / 2.0);
                w.mapv_inplace(|v| v / 2.0);
            } else if dual > 10.0 * primal {
                rho /= 2.0;
                u.mapv_inplace(|v| v * 2.0);
                w.mapv_inplace(|v| v * 2.0);
            }
        }
    }

    // Z satisfies the polytope constraints and is within the primal residual of the PSD copy.
    let solution = SdpSolution {
        objective: inner(sim, &z),
        x: z,
        iterations,
        primal_residual: primal,
        dual_residual: dual,
    };
    let worst = primal.max(dual);
    if worst > 10.0 * params.tol {
        return Err(Error::Convergence(solution.diagnostics(rho)));
    }
    if worst > params.tol {
        log::warn!(
            "SDP stopped at the iteration cap with residual {worst:.3e} (tolerance {:.1e})",
            params.tol
        );
    }
    Ok(solution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use approx::assert_abs_diff_eq;
    use rand::Rng as _;

    fn block_similarity(labels: &[usize], within: f64, across: f64) -> SimilarityMatrix {
        let m = labels.len();
        SimilarityMatrix::new(Array2::from_shape_fn((m, m), |(i, j)| {
            if i == j {
                1.0
            } else if labels[i] == labels[j] {
                within
            } else {
                across
            }
        }))
        .unwrap()
    }

    fn assert_feasible(sol: &SdpSolution, k: usize, tol: f64) {
        let v = sol.constraint_violations(k).unwrap();
        for (name, x) in ["entry", "eigen", "row", "trace"].iter().zip(v) {
            assert!(x <= tol, "{name} violation {x:e}");
        }
    }

    #[test]
    fn affine_projection_satisfies_constraints() {
        let mut r = rng::rng_from_seed(3);
        for m in 2..9 {
            let mut a = Array2::zeros((m, m));
            for i in 0..m {
                for j in i..m {
                    let v: f64 = r.random_range(-1.0..1.0);
                    a[[i, j]] = v;
                    a[[j, i]] = v;
                }
            }
            let p = project_affine(&a, 2);
            assert!(affine_violation(&p, 2) < 1e-12);
            // projecting a feasible point is a no-op
            let pp = project_affine(&p, 2);
            assert!(frob_diff(&p, &pp) < 1e-12);
        }
    }

    #[test]
    fn ideal_blocks_recover_normalized_clustering_matrix() {
        let labels = [0, 0, 0, 1, 1, 1];
        let s = block_similarity(&labels, 1.0, (-5.0f64).exp());
        let sol = solve_sdp(&s, 2, &SdpParams::default()).unwrap();
        let target = normalized_clustering_matrix(&labels);
        assert!(
            frob_diff(&sol.x, &target) <= 1e-3,
            "{}",
            frob_diff(&sol.x, &target)
        );
        assert_feasible(&sol, 2, 1e-6);
    }

    #[test]
    fn constant_similarity_has_constant_objective() {
        let s = SimilarityMatrix::new(Array2::ones((5, 5))).unwrap();
        for k in 2..=4 {
            let sol = solve_sdp(&s, k, &SdpParams::default()).unwrap();
            assert_abs_diff_eq!(sol.objective, 5.0, epsilon = 1e-5);
            assert_feasible(&sol, k, 1e-6);
        }
    }

    #[test]
    fn two_graphs_two_clusters_gives_identity() {
        let s = SimilarityMatrix::new(ndarray::array![[1.0, 0.3], [0.3, 1.0]]).unwrap();
        let sol = solve_sdp(&s, 2, &SdpParams::default()).unwrap();
        assert!(frob_diff(&sol.x, &Array2::eye(2)) < 1e-5);
    }

    #[test]
    fn iteration_cap_reports_diagnostics() {
        let labels = [0, 0, 1, 1, 2, 2, 0];
        let s = block_similarity(&labels, 0.9, 0.2);
        let params = SdpParams {
            max_iter: 2,
            ..SdpParams::default()
        };
        match solve_sdp(&s, 3, &params) {
            Err(Error::Convergence(d)) => assert_eq!(d.iterations, 2),
            other => panic!("expected convergence error, got {other:?}"),
        }
    }

    #[test]
    fn normalized_matrix_shape() {
        let x = normalized_clustering_matrix(&[0, 1, 0]);
        assert_eq!(x[[0, 2]], 0.5);
        assert_eq!(x[[1, 1]], 1.0);
        assert_eq!(x[[0, 1]], 0.0);
    }
}
