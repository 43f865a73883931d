//! Dense numerical kernels used by the clustering and evaluation code.

mod ari;
mod eigen;
mod hungarian;
mod kmeans;

pub use ari::ari;
pub(crate) use eigen::{identity, jacobi};
pub use eigen::{sym_eigen, sym_eigen_signed, EigenPairs};
pub use hungarian::{confusion_matrix, hungarian_error, min_cost_assignment, misclustered};
pub use kmeans::{kmeans, kmeans_with, KMeansConfig, KMeansFit};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard cluster labels in `0..k`. Not every label has to be used.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterAssignment {
    labels: Vec<usize>,
    k: usize,
}

impl ClusterAssignment {
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if let Some(&bad) = labels.iter().find(|&&l| l >= k) {
            return Err(Error::Input(format!("label {bad} is outside 0..{k}")));
        }
        Ok(Self { labels, k })
    }

    pub(crate) fn new_unchecked(labels: Vec<usize>, k: usize) -> Self {
        debug_assert!(labels.iter().all(|&l| l < k));
        Self { labels, k }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Sizes of clusters `0..k`, including empty ones.
    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }
}
