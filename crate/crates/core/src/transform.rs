//! Degree-sorted block histograms and the graph distance built on them.
//!
//! A graph on `n` nodes is relabelled so that degrees are non-decreasing,
//! the first `n0 * h` nodes (with `h = floor(n / n0)`) are cut into `n0`
//! consecutive blocks of `h` nodes, and each block pair is summarised by its
//! edge density. The resulting `n0 x n0` matrix estimates the block average
//! of the generating graphon, which makes graphs of different sizes directly
//! comparable.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// An `n0 x n0` symmetric matrix of block densities in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    values: Array2<f64>,
}

impl Histogram {
    pub fn from_values(values: Array2<f64>) -> Result<Self> {
        let (rows, cols) = values.dim();
        if rows != cols || rows == 0 {
            return Err(Error::Input(format!(
                "histogram must be a non-empty square matrix, got {rows}x{cols}"
            )));
        }
        for ((i, j), &x) in values.indexed_iter() {
            if !(0.0..=1.0).contains(&x) || x != values[[j, i]] {
                return Err(Error::Input(format!(
                    "histogram entry ({i}, {j}) = {x} breaks symmetry or [0, 1] range"
                )));
            }
        }
        Ok(Self { values })
    }

    pub fn n0(&self) -> usize {
        self.values.nrows()
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn into_values(self) -> Array2<f64> {
        self.values
    }

    /// `(1 / n0) * ||self - other||_F`.
    pub fn distance(&self, other: &Histogram) -> Result<f64> {
        if self.n0() != other.n0() {
            return Err(Error::Size(format!(
                "histograms have different sizes ({} and {})",
                self.n0(),
                other.n0()
            )));
        }
        let sq: f64 = self
            .values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        Ok(sq.sqrt() / self.n0() as f64)
    }
}

/// Node order with non-decreasing degrees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortPermutation {
    order: Vec<usize>,
}

impl SortPermutation {
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// `rank[v]` is the position of node `v` in the sorted order.
    pub fn ranks(&self) -> Vec<usize> {
        let mut rank = vec![0; self.order.len()];
        for (pos, &v) in self.order.iter().enumerate() {
            rank[v] = pos;
        }
        rank
    }
}

/// Stable ascending sort of nodes by degree; ties keep their original order.
pub fn degree_sort(g: &Graph) -> SortPermutation {
    let mut order: Vec<usize> = (0..g.node_count()).collect();
    order.sort_by_key(|&v| g.degree(v));
    SortPermutation { order }
}

/// Block-density histogram of `g` with `n0` blocks per side.
///
/// The `n - n0 * h` highest-ranked nodes of the sorted order are dropped.
pub fn histogram(g: &Graph, n0: usize) -> Result<Histogram> {
    let n = g.node_count();
    if n0 == 0 || n0 > n {
        return Err(Error::Size(format!(
            "histogram needs 1 <= n0 <= n, got n0 = {n0} for a graph with n = {n} nodes"
        )));
    }
    let h = n / n0;
    let kept = n0 * h;
    let rank = degree_sort(g).ranks();

    let mut counts = Array2::<f64>::zeros((n0, n0));
    for (u, v) in g.edges() {
        let (ru, rv) = (rank[u], rank[v]);
        if ru < kept && rv < kept {
            let (bu, bv) = (ru / h, rv / h);
            // both (u, v) and (v, u) entries of the adjacency fall in the block sums
            counts[[bu, bv]] += 1.0;
            counts[[bv, bu]] += 1.0;
        }
    }
    let scale = (h * h) as f64;
    counts.mapv_inplace(|c| c / scale);
    Ok(Histogram { values: counts })
}

/// Graph distance `(1 / n0) * ||A_1 - A_2||_F` between block histograms.
pub fn graph_distance(g1: &Graph, g2: &Graph, n0: usize) -> Result<f64> {
    histogram(g1, n0)?.distance(&histogram(g2, n0)?)
}

/// Default block count `floor(sqrt(n / log10 n))` for a smallest graph of `n` nodes.
///
/// Base-10 logarithms reproduce the published choices `n0 = 5` at `n = 50`
/// and `n0 = 7` at `n = 100`.
pub fn default_n0(n: usize) -> usize {
    if n < 3 {
        return 1;
    }
    let n = n as f64;
    ((n / n.log10()).sqrt().floor() as usize).max(1)
}

/// One component of a log-moment embedding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogMoment {
    Defined(f64),
    /// `trace((A / n)^i)` was zero, so its logarithm does not exist.
    Undefined,
}

impl LogMoment {
    pub fn value(self) -> Option<f64> {
        match self {
            LogMoment::Defined(x) => Some(x),
            LogMoment::Undefined => None,
        }
    }
}

/// `log trace((A / n)^i)` for `i = 1..=moments`.
pub fn log_moments(g: &Graph, moments: usize) -> Result<Vec<LogMoment>> {
    if moments == 0 {
        return Err(Error::Size("log moments need at least one moment".into()));
    }
    let n = g.node_count() as f64;
    let scaled = g.to_dense().mapv(|x| x / n);
    let mut power = scaled.clone();
    let mut out = Vec::with_capacity(moments);
    for i in 0..moments {
        if i > 0 {
            power = power.dot(&scaled);
        }
        // all factors are nonnegative, so a zero trace is computed as exactly zero
        let trace = power.diag().sum();
        out.push(if trace > 0.0 {
            LogMoment::Defined(trace.ln())
        } else {
            LogMoment::Undefined
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    fn path3() -> Graph {
        Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn degree_sort_examples() {
        assert_eq!(degree_sort(&path3()).order(), &[0, 2, 1]);
        assert_eq!(
            degree_sort(&Graph::empty(4).unwrap()).order(),
            &[0, 1, 2, 3]
        );
        let star = Graph::from_edges(4, [(3, 0), (3, 1), (3, 2)]).unwrap();
        assert_eq!(degree_sort(&star).order(), &[0, 1, 2, 3]);
    }

    #[test]
    fn histogram_of_complete_graph() {
        let h = histogram(&Graph::complete(4).unwrap(), 2).unwrap();
        assert_eq!(h.values(), &array![[0.5, 1.0], [1.0, 0.5]]);
    }

    #[test]
    fn histogram_of_empty_graph() {
        let h = histogram(&Graph::empty(10).unwrap(), 3).unwrap();
        assert_eq!(h.values(), &Array2::<f64>::zeros((3, 3)));
    }

    #[test]
    fn full_resolution_histogram_is_sorted_adjacency() {
        let g = path3();
        let h = histogram(&g, 3).unwrap();
        let order = degree_sort(&g).order().to_vec();
        let a = g.to_dense();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(h.values()[[i, j]], a[[order[i], order[j]]]);
            }
        }
    }

    #[test]
    fn leftover_nodes_are_dropped() {
        // n = 5, n0 = 2: h = 2, the top-degree node (the hub) is discarded.
        let star = Graph::from_edges(5, [(4, 0), (4, 1), (4, 2), (4, 3), (0, 1)]).unwrap();
        let h = histogram(&star, 2).unwrap();
        // sorted: 2,3 (deg 1), 0,1 (deg 2), 4; only edge (0,1) survives, inside block 1
        assert_eq!(h.values(), &array![[0.0, 0.0], [0.0, 0.5]]);
    }

    #[test]
    fn oversized_block_count_is_rejected() {
        let err = histogram(&path3(), 4).unwrap_err();
        assert!(matches!(err, Error::Size(ref m) if m.contains("n0 = 4") && m.contains("n = 3")));
        assert!(graph_distance(&path3(), &Graph::complete(10).unwrap(), 5).is_err());
    }

    #[test]
    fn complete_versus_empty() {
        let d = graph_distance(&Graph::complete(8).unwrap(), &Graph::empty(8).unwrap(), 2).unwrap();
        let expected = 0.5 * (2.0 * 0.5625f64 + 2.0).sqrt();
        assert_abs_diff_eq!(d, expected, epsilon = 1e-15);
        assert_abs_diff_eq!(d, 0.8839, epsilon = 1e-4);
    }

    #[test]
    fn identical_graphs_have_zero_distance() {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (2, 3), (0, 5)]).unwrap();
        for n0 in 1..=6 {
            assert_eq!(graph_distance(&g, &g, n0).unwrap(), 0.0);
        }
    }

    #[test]
    fn default_block_counts() {
        assert_eq!(default_n0(50), 5);
        assert_eq!(default_n0(100), 7);
        assert_eq!(default_n0(500), 13);
        assert_eq!(default_n0(1600), 22);
        assert_eq!(default_n0(3), 2);
        assert_eq!(default_n0(1), 1);
    }

    #[test]
    fn log_moments_of_complete_graph() {
        let m = log_moments(&Graph::complete(4).unwrap(), 2).unwrap();
        assert_eq!(m[0], LogMoment::Undefined);
        assert_abs_diff_eq!(
            m[1].value().unwrap(),
            (12.0f64 / 16.0).ln(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn log_moments_degenerate_cases() {
        let m = log_moments(&Graph::empty(5).unwrap(), 3).unwrap();
        assert!(m.iter().all(|x| *x == LogMoment::Undefined));

        let c4 = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let m = log_moments(&c4, 3).unwrap();
        assert_abs_diff_eq!(m[1].value().unwrap(), (8.0f64 / 16.0).ln(), epsilon = 1e-14);
        // bipartite: no closed walks of odd length
        assert_eq!(m[2], LogMoment::Undefined);
        assert!(log_moments(&c4, 0).is_err());
    }
}
