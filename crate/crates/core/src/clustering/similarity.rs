use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::DistanceMatrix;
use crate::error::{Error, Result};

/// Neighbour rank used for local bandwidths unless overridden.
pub const DEFAULT_NEIGHBOR_RANK: usize = 5;

/// How the per-graph bandwidths `sigma_i` are chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bandwidth {
    /// `sigma_i` is the distance from graph `i` to its `rank`-th nearest neighbour.
    Adaptive { neighbor_rank: usize },
    /// One shared bandwidth for every graph.
    Uniform(f64),
}

/// Which power of the distance enters the exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Kernel {
    /// `exp(-D_ij / (sigma_i * sigma_j))`
    #[default]
    #[serde(rename = "distance")]
    Distance,
    /// `exp(-D_ij^2 / (sigma_i * sigma_j))`, the locally scaled Gaussian.
    #[serde(rename = "squared")]
    SquaredDistance,
}

impl Kernel {
    fn weight(self, d: f64, scale: f64) -> f64 {
        match self {
            Kernel::Distance => (-d / scale).exp(),
            Kernel::SquaredDistance => (-d * d / scale).exp(),
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kernel::Distance => "distance",
            Kernel::SquaredDistance => "squared",
        })
    }
}

impl FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "distance" => Ok(Kernel::Distance),
            "squared" => Ok(Kernel::SquaredDistance),
            other => Err(Error::Input(format!(
                "unknown kernel {other:?}, expected distance or squared"
            ))),
        }
    }
}

/// Symmetric similarity matrix with unit diagonal and entries in `(0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    values: Array2<f64>,
    sigmas: Vec<f64>,
}

impl SimilarityMatrix {
    /// Wraps a precomputed similarity matrix. Entries must lie in `(0, 1]`
    /// with a unit diagonal.
    pub fn new(values: Array2<f64>) -> Result<Self> {
        let (rows, cols) = values.dim();
        if rows != cols {
            return Err(Error::Input(format!(
                "similarity matrix must be square, got {rows}x{cols}"
            )));
        }
        for ((i, j), &x) in values.indexed_iter() {
            if !(x > 0.0 && x <= 1.0) || x != values[[j, i]] || (i == j && x != 1.0) {
                return Err(Error::Input(format!(
                    "similarity ({i}, {j}) = {x} breaks symmetry, (0, 1] range or unit diagonal"
                )));
            }
        }
        Ok(Self {
            values,
            sigmas: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.values.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    /// Bandwidths used to build the matrix (empty for wrapped matrices).
    pub fn sigmas(&self) -> &[f64] {
        &self.sigmas
    }
}

/// Similarity matrix with adaptive bandwidths at the given neighbour rank.
pub fn similarity_matrix(d: &DistanceMatrix, neighbor_rank: usize) -> Result<SimilarityMatrix> {
    similarity_with(d, Bandwidth::Adaptive { neighbor_rank }, Kernel::Distance)
}

pub fn similarity_with(
    d: &DistanceMatrix,
    bandwidth: Bandwidth,
    kernel: Kernel,
) -> Result<SimilarityMatrix> {
    let m = d.len();
    let sigmas = match bandwidth {
        Bandwidth::Uniform(sigma) => {
            if !(sigma.is_finite() && sigma > 0.0) {
                return Err(Error::Input(format!(
                    "uniform bandwidth must be positive, got {sigma}"
                )));
            }
            vec![sigma; m]
        }
        Bandwidth::Adaptive { neighbor_rank } => {
            if neighbor_rank == 0 || neighbor_rank >= m {
                return Err(Error::Size(format!(
                    "neighbour rank must satisfy 1 <= rank < m, got rank = {neighbor_rank} for m = {m}"
                )));
            }
            (0..m)
                .map(|i| local_bandwidth(d, i, neighbor_rank))
                .collect::<Result<_>>()?
        }
    };
    let mut values = Array2::from_elem((m, m), 1.0);
    for i in 0..m {
        for j in i + 1..m {
            let s = kernel.weight(d.get(i, j), sigmas[i] * sigmas[j]);
            // keep strictly positive even for huge scaled distances
            let s = s.max(f64::MIN_POSITIVE);
            values[[i, j]] = s;
            values[[j, i]] = s;
        }
    }
    Ok(SimilarityMatrix { values, sigmas })
}

/// Distance to the `rank`-th nearest other graph; falls back to the nearest
/// non-duplicate when that distance is zero.
fn local_bandwidth(d: &DistanceMatrix, i: usize, rank: usize) -> Result<f64> {
    let mut row: Vec<f64> = (0..d.len())
        .filter(|&j| j != i)
        .map(|j| d.get(i, j))
        .collect();
    row.sort_by(f64::total_cmp);
    let sigma = row[rank - 1];
    if sigma > 0.0 {
        return Ok(sigma);
    }
    row.into_iter().find(|&x| x > 0.0).ok_or_else(|| {
        Error::DegeneratePopulation(format!("graph {i} has zero distance to every other graph"))
    })
}
