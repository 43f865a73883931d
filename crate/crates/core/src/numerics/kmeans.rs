//! Lloyd's k-means with k-means++ seeding and restarts.

use ndarray::{Array2, ArrayView1};
use rand::Rng as _;
use rayon::prelude::*;

use super::ClusterAssignment;
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMeansConfig {
    pub restarts: usize,
    pub max_iter: usize,
    /// Stop once the objective improves by less than this fraction.
    pub tol: f64,
}

impl Default for KMeansConfig {
    fn default() -> Self {
        Self {
            restarts: 10,
            max_iter: 300,
            tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansFit {
    pub assignment: ClusterAssignment,
    pub centroids: Array2<f64>,
    /// Within-cluster sum of squared distances.
    pub inertia: f64,
    pub iterations: usize,
}

/// Clusters the rows of `points` into `k` groups; best of `restarts` runs.
pub fn kmeans(
    points: &Array2<f64>,
    k: usize,
    seed: u64,
    restarts: usize,
) -> Result<ClusterAssignment> {
    let config = KMeansConfig {
        restarts,
        ..KMeansConfig::default()
    };
    kmeans_with(points, k, seed, &config).map(|fit| fit.assignment)
}

pub fn kmeans_with(
    points: &Array2<f64>,
    k: usize,
    seed: u64,
    config: &KMeansConfig,
) -> Result<KMeansFit> {
    let m = points.nrows();
    if k == 0 || k > m {
        return Err(Error::Size(format!(
            "k-means needs 1 <= K <= m, got K = {k} with m = {m} points"
        )));
    }
    if points.iter().any(|x| !x.is_finite()) {
        return Err(Error::Input(
            "k-means points have non-finite coordinates".into(),
        ));
    }
    let restarts = config.restarts.max(1);
    let fits: Vec<KMeansFit> = (0..restarts)
        .into_par_iter()
        .map(|r| lloyd(points, k, rng::derive_seed(seed, r as u64), config))
        .collect();
    // first restart wins ties, independent of scheduling
    let best = fits
        .into_iter()
        .reduce(|best, fit| {
            if fit.inertia < best.inertia {
                fit
            } else {
                best
            }
        })
        .expect("at least one restart");
    Ok(best)
}

fn sq_dist(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn plus_plus_init(points: &Array2<f64>, k: usize, rng: &mut rng::Rng) -> Array2<f64> {
    let m = points.nrows();
    let mut centroids = Array2::zeros((k, points.ncols()));
    let first = rng.random_range(0..m);
    centroids.row_mut(0).assign(&points.row(first));
    let mut nearest: Vec<f64> = (0..m)
        .map(|i| sq_dist(points.row(i), points.row(first)))
        .collect();
    for c in 1..k {
        let total: f64 = nearest.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = m - 1;
            for (i, &d) in nearest.iter().enumerate() {
                acc += d;
                if acc > target && d > 0.0 {
                    pick = i;
                    break;
                }
            }
            pick
        } else {
            // every point already coincides with a centre
            rng.random_range(0..m)
        };
        centroids.row_mut(c).assign(&points.row(pick));
        for (i, d) in nearest.iter_mut().enumerate() {
            *d = d.min(sq_dist(points.row(i), points.row(pick)));
        }
    }
    centroids
}

fn assign(points: &Array2<f64>, centroids: &Array2<f64>, labels: &mut [usize]) -> f64 {
    let mut inertia = 0.0;
    for (i, label) in labels.iter_mut().enumerate() {
        let (mut best, mut best_d) = (0, f64::INFINITY);
        for c in 0..centroids.nrows() {
            let d = sq_dist(points.row(i), centroids.row(c));
            if d < best_d {
                best = c;
                best_d = d;
            }
        }
        *label = best;
        inertia += best_d;
    }
    inertia
}

fn lloyd(points: &Array2<f64>, k: usize, seed: u64, config: &KMeansConfig) -> KMeansFit {
    let mut rng = rng::rng_from_seed(seed);
    let (m, dim) = points.dim();
    let mut centroids = plus_plus_init(points, k, &mut rng);
    let mut labels = vec![0; m];
    let mut inertia = assign(points, &centroids, &mut labels);
    let mut iterations = 0;

    while iterations < config.max_iter {
        iterations += 1;
        let mut sums = Array2::<f64>::zeros((k, dim));
        let mut counts = vec![0usize; k];
        for (i, &l) in labels.iter().enumerate() {
            sums.row_mut(l).scaled_add(1.0, &points.row(i));
            counts[l] += 1;
        }
        for (c, &count) in counts.iter().enumerate() {
            // empty clusters keep their previous centre
            if count > 0 {
                centroids
                    .row_mut(c)
                    .assign(&sums.row(c).mapv(|x| x / count as f64));
            }
        }
        let previous = inertia;
        let old_labels = labels.clone();
        inertia = assign(points, &centroids, &mut labels);
        debug_assert!(
            inertia <= previous * (1.0 + 1e-12) + 1e-12,
            "k-means objective increased: {previous} -> {inertia}"
        );
        if labels == old_labels || previous - inertia <= config.tol * previous {
            break;
        }
    }
    KMeansFit {
        assignment: ClusterAssignment::new_unchecked(labels, k),
        centroids,
        inertia,
        iterations,
    }
}
