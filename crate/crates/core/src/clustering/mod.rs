//! Clustering populations of graphs: distance-based spectral clustering (DSC)
//! and similarity-based SDP clustering (SSDP), plus the log-moment baseline.

mod distance;
mod dsc;
mod nclm;
mod sdp;
mod similarity;
mod ssdp;

pub use distance::{distance_matrix, distance_matrix_from_histograms, DistanceMatrix};
pub use dsc::{dsc, dsc_from_distances, spectral_embedding_labels};
pub use nclm::{log_moment_distances, nclm, NCLM_MOMENTS};
pub use sdp::{normalized_clustering_matrix, solve_sdp, SdpDiagnostics, SdpParams, SdpSolution};
pub use similarity::{
    similarity_matrix, similarity_with, Bandwidth, Kernel, SimilarityMatrix, DEFAULT_NEIGHBOR_RANK,
};
pub use ssdp::{ssdp, ssdp_from_similarity, ssdp_with, SsdpConfig};

use crate::error::{Error, Result};

pub(crate) fn check_cluster_count(k: usize, m: usize) -> Result<()> {
    if k < 2 || k > m {
        return Err(Error::Size(format!(
            "clustering needs 2 <= K <= m, got K = {k} for m = {m} graphs"
        )));
    }
    Ok(())
}
