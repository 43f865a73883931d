use ndarray::Array2;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::transform::{histogram, Histogram};

/// Symmetric, nonnegative pairwise distances with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    values: Array2<f64>,
}

impl DistanceMatrix {
    pub fn new(values: Array2<f64>) -> Result<Self> {
        let (rows, cols) = values.dim();
        if rows != cols {
            return Err(Error::Input(format!(
                "distance matrix must be square, got {rows}x{cols}"
            )));
        }
        for ((i, j), &x) in values.indexed_iter() {
            if !x.is_finite() || x < 0.0 {
                return Err(Error::Input(format!(
                    "distance ({i}, {j}) = {x} is not a nonnegative number"
                )));
            }
            if x != values[[j, i]] {
                return Err(Error::Input(format!(
                    "distance matrix is not symmetric at ({i}, {j})"
                )));
            }
            if i == j && x != 0.0 {
                return Err(Error::Input(format!(
                    "distance matrix has nonzero diagonal at {i}"
                )));
            }
        }
        Ok(Self { values })
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

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[[i, j]]
    }
}

/// All pairwise graph distances at block count `n0`.
///
/// Each histogram is computed once; pairs are evaluated in parallel.
pub fn distance_matrix(graphs: &[Graph], n0: usize) -> Result<DistanceMatrix> {
    if graphs.len() < 2 {
        return Err(Error::Size(format!(
            "a distance matrix needs at least 2 graphs, got {}",
            graphs.len()
        )));
    }
    let histograms: Vec<Histogram> = graphs
        .par_iter()
        .map(|g| histogram(g, n0))
        .collect::<Result<_>>()?;
    distance_matrix_from_histograms(&histograms)
}

pub fn distance_matrix_from_histograms(histograms: &[Histogram]) -> Result<DistanceMatrix> {
    let m = histograms.len();
    let pairs: Vec<(usize, usize)> = (0..m)
        .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
        .collect();
    let dists: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| histograms[i].distance(&histograms[j]))
        .collect::<Result<_>>()?;
    let mut values = Array2::zeros((m, m));
    for (&(i, j), &d) in pairs.iter().zip(&dists) {
        values[[i, j]] = d;
        values[[j, i]] = d;
    }
    Ok(DistanceMatrix { values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::graph_distance;

    #[test]
    fn duplicates_give_zero_matrix() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (3, 4)]).unwrap();
        let d = distance_matrix(&[g.clone(), g.clone(), g], 2).unwrap();
        assert!(d.values().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn two_graphs() {
        let a = Graph::complete(6).unwrap();
        let b = Graph::from_edges(7, [(0, 1), (2, 3)]).unwrap();
        let d = distance_matrix(&[a.clone(), b.clone()], 3).unwrap();
        assert_eq!(d.get(0, 1), graph_distance(&a, &b, 3).unwrap());
        assert_eq!(d.get(1, 0), d.get(0, 1));
        assert_eq!(d.get(0, 0), 0.0);
    }

    #[test]
    fn propagates_size_errors() {
        let a = Graph::complete(3).unwrap();
        let b = Graph::complete(10).unwrap();
        assert!(matches!(distance_matrix(&[a, b], 4), Err(Error::Size(_))));
        assert!(distance_matrix(&[Graph::complete(3).unwrap()], 1).is_err());
    }

    #[test]
    fn validation() {
        assert!(DistanceMatrix::new(ndarray::array![[0.0, 1.0], [2.0, 0.0]]).is_err());
        assert!(DistanceMatrix::new(ndarray::array![[1.0, 1.0], [1.0, 0.0]]).is_err());
        assert!(DistanceMatrix::new(ndarray::array![[0.0, -1.0], [-1.0, 0.0]]).is_err());
        assert!(DistanceMatrix::new(ndarray::array![[0.0, 1.0], [1.0, 0.0]]).is_ok());
    }
}
