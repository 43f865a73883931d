//! Log-moment baseline: embed each graph by its log spectral moments and
//! cluster the Euclidean distances with the DSC pipeline.

use ndarray::Array2;
use rayon::prelude::*;

use super::{check_cluster_count, dsc_from_distances, DistanceMatrix};
use crate::error::Result;
use crate::graph::Graph;
use crate::numerics::ClusterAssignment;
use crate::transform::{log_moments, LogMoment};

/// Moment count used by the baseline.
pub const NCLM_MOMENTS: usize = 8;

/// Euclidean distances between log-moment vectors over the components
/// defined for both graphs of a pair.
pub fn log_moment_distances(graphs: &[Graph], moments: usize) -> Result<DistanceMatrix> {
    let embeddings: Vec<Vec<LogMoment>> = graphs
        .par_iter()
        .map(|g| log_moments(g, moments))
        .collect::<Result<_>>()?;
    let m = graphs.len();
    let mut values = Array2::zeros((m, m));
    for i in 0..m {
        for j in i + 1..m {
            let sq: f64 = embeddings[i]
                .iter()
                .zip(&embeddings[j])
                .filter_map(|(a, b)| Some((a.value()? - b.value()?).powi(2)))
                .sum();
            values[[i, j]] = sq.sqrt();
            values[[j, i]] = sq.sqrt();
        }
    }
    DistanceMatrix::new(values)
}

pub fn nclm(graphs: &[Graph], k: usize, moments: usize, seed: u64) -> Result<ClusterAssignment> {
    check_cluster_count(k, graphs.len())?;
    let d = log_moment_distances(graphs, moments)?;
    dsc_from_distances(&d, k, seed)
}
