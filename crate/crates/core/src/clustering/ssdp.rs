use super::{
    check_cluster_count, distance_matrix, similarity_with, solve_sdp, spectral_embedding_labels,
    Bandwidth, Kernel, SdpParams, SimilarityMatrix, DEFAULT_NEIGHBOR_RANK,
};
use crate::error::Result;
use crate::graph::Graph;
use crate::numerics::{sym_eigen_signed, ClusterAssignment};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsdpConfig {
    /// `None` selects the default rank (5, lowered to `m - 1` for small populations).
    pub neighbor_rank: Option<usize>,
    /// Shared bandwidth instead of the adaptive per-graph rule.
    pub uniform_sigma: Option<f64>,
    pub kernel: Kernel,
    pub sdp: SdpParams,
}

impl Default for SsdpConfig {
    fn default() -> Self {
        Self {
            neighbor_rank: None,
            uniform_sigma: None,
            // the unsquared exponent is nearly diagonal at graph-distance scales
            kernel: Kernel::SquaredDistance,
            sdp: SdpParams::default(),
        }
    }
}

impl SsdpConfig {
    fn bandwidth(&self, m: usize) -> Bandwidth {
        match self.uniform_sigma {
            Some(sigma) => Bandwidth::Uniform(sigma),
            None => Bandwidth::Adaptive {
                neighbor_rank: self
                    .neighbor_rank
                    .unwrap_or(DEFAULT_NEIGHBOR_RANK.min(m.saturating_sub(1))),
            },
        }
    }
}

/// Similarity-based SDP clustering with default settings.
pub fn ssdp(graphs: &[Graph], k: usize, n0: usize, seed: u64) -> Result<ClusterAssignment> {
    ssdp_with(graphs, k, n0, seed, &SsdpConfig::default())
}

pub fn ssdp_with(
    graphs: &[Graph],
    k: usize,
    n0: usize,
    seed: u64,
    config: &SsdpConfig,
) -> Result<ClusterAssignment> {
    check_cluster_count(k, graphs.len())?;
    let d = distance_matrix(graphs, n0)?;
    let s = similarity_with(&d, config.bandwidth(d.len()), config.kernel)?;
    ssdp_from_similarity(&s, k, seed, &config.sdp)
}

/// Solves the SDP for `s` and spectrally rounds the solution into `k` clusters.
pub fn ssdp_from_similarity(
    s: &SimilarityMatrix,
    k: usize,
    seed: u64,
    params: &SdpParams,
) -> Result<ClusterAssignment> {
    let solution = solve_sdp(s, k, params)?;
    // the solution is PSD, so signed and magnitude order agree
    let eig = sym_eigen_signed(&solution.x)?;
    spectral_embedding_labels(&eig.leading(k), k, seed)
}
