use ndarray::Array2;

use super::{check_cluster_count, distance_matrix, DistanceMatrix};
use crate::error::Result;
use crate::graph::Graph;
use crate::numerics::{kmeans, sym_eigen, ClusterAssignment, KMeansConfig};

/// Distance-based spectral clustering.
///
/// Builds the pairwise distance matrix, keeps the `k` eigenvectors whose
/// eigenvalues are largest in magnitude and runs k-means on the rows.
/// An ideal rank-`k` distance matrix has exactly `k` nonzero eigenvalues and
/// its eigenvectors are constant on each cluster.
pub fn dsc(graphs: &[Graph], k: usize, n0: usize, seed: u64) -> Result<ClusterAssignment> {
    check_cluster_count(k, graphs.len())?;
    let d = distance_matrix(graphs, n0)?;
    dsc_from_distances(&d, k, seed)
}

pub fn dsc_from_distances(d: &DistanceMatrix, k: usize, seed: u64) -> Result<ClusterAssignment> {
    check_cluster_count(k, d.len())?;
    let eig = sym_eigen(d.values())?;
    spectral_embedding_labels(&eig.leading(k), k, seed)
}

/// k-means on the rows of an `m x k` spectral embedding.
pub fn spectral_embedding_labels(
    embedding: &Array2<f64>,
    k: usize,
    seed: u64,
) -> Result<ClusterAssignment> {
    kmeans(embedding, k, seed, KMeansConfig::default().restarts)
}
