//! Simple undirected graphs without vertex labels.

use ndarray::Array2;

use crate::error::{Error, Result};

/// A simple undirected graph on nodes `0..n`.
///
/// Neighbour lists are kept sorted and free of duplicates, the adjacency is
/// symmetric and there are no self-loops. Every constructor checks this.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    neighbors: Vec<Vec<u32>>,
    edge_count: usize,
    source_id: Option<String>,
}

impl Graph {
    /// Graph on `n` nodes with no edges.
    pub fn empty(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Input("a graph needs at least one node".into()));
        }
        Ok(Self {
            neighbors: vec![Vec::new(); n],
            edge_count: 0,
            source_id: None,
        })
    }

    pub fn complete(n: usize) -> Result<Self> {
        let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
        Self::from_edges(n, edges)
    }

    /// Builds a graph from an edge iterator.
    ///
    /// Reciprocal and repeated edges collapse into one undirected edge.
    /// Self-loops and endpoints `>= n` are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Self::empty(n)?;
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Input(format!(
                    "edge ({u}, {v}) has an endpoint outside 0..{n}"
                )));
            }
            if u == v {
                return Err(Error::Input(format!("self-loop at node {u}")));
            }
            g.neighbors[u].push(v as u32);
            g.neighbors[v].push(u as u32);
        }
        g.normalize();
        Ok(g)
    }

    /// Builds a graph from a dense 0/1 matrix. The matrix must be symmetric with a zero diagonal.
    pub fn from_adjacency(adjacency: &Array2<u8>) -> Result<Self> {
        let (rows, cols) = adjacency.dim();
        if rows != cols {
            return Err(Error::Input(format!(
                "adjacency must be square, got {rows}x{cols}"
            )));
        }
        let mut edges = Vec::new();
        for i in 0..rows {
            if adjacency[[i, i]] != 0 {
                return Err(Error::Input(format!("nonzero diagonal at node {i}")));
            }
            for j in i + 1..rows {
                let (a, b) = (adjacency[[i, j]], adjacency[[j, i]]);
                if a != b || a > 1 {
                    return Err(Error::Input(format!(
                        "adjacency is not a symmetric 0/1 matrix at ({i}, {j})"
                    )));
                }
                if a == 1 {
                    edges.push((i, j));
                }
            }
        }
        Self::from_edges(rows, edges)
    }

    /// Wraps neighbour lists produced by a trusted generator. Lists must
    /// already be symmetric and loop-free; they are sorted here.
    pub(crate) fn from_neighbor_lists(mut neighbors: Vec<Vec<u32>>) -> Self {
        for list in &mut neighbors {
            list.sort_unstable();
        }
        let edge_count = neighbors.iter().map(Vec::len).sum::<usize>() / 2;
        debug_assert!(!neighbors.is_empty());
        Self {
            neighbors,
            edge_count,
            source_id: None,
        }
    }

    fn normalize(&mut self) {
        for list in &mut self.neighbors {
            list.sort_unstable();
            list.dedup();
        }
        self.edge_count = self.neighbors.iter().map(Vec::len).sum::<usize>() / 2;
    }

    pub fn with_source_id(mut self, id: impl Into<String>) -> Self {
        self.source_id = Some(id.into());
        self
    }

    pub fn source_id(&self) -> Option<&str> {
        self.source_id.as_deref()
    }

    pub fn node_count(&self) -> usize {
        self.neighbors.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn degree(&self, node: usize) -> usize {
        self.neighbors[node].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.neighbors.iter().map(Vec::len).collect()
    }

    pub fn neighbors(&self, node: usize) -> impl Iterator<Item = usize> + '_ {
        self.neighbors[node].iter().map(|&v| v as usize)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors[u].binary_search(&(v as u32)).is_ok()
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.neighbors.iter().enumerate().flat_map(|(u, list)| {
            list.iter()
                .map(|&v| v as usize)
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    /// Edge density `|E| / C(n, 2)`; zero for single-node graphs.
    pub fn density(&self) -> f64 {
        let n = self.node_count();
        if n < 2 {
            return 0.0;
        }
        self.edge_count as f64 / (n * (n - 1) / 2) as f64
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let n = self.node_count();
        let mut a = Array2::zeros((n, n));
        for (u, v) in self.edges() {
            a[[u, v]] = 1.0;
            a[[v, u]] = 1.0;
        }
        a
    }

    /// Relabels nodes: node `i` of `self` becomes node `perm[i]` of the result.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.node_count();
        let mut seen = vec![false; n];
        if perm.len() != n
            || perm
                .iter()
                .any(|&p| p >= n || std::mem::replace(&mut seen[p], true))
        {
            return Err(Error::Input(
                "relabeling is not a permutation of the nodes".into(),
            ));
        }
        let mut g = Self::from_edges(n, self.edges().map(|(u, v)| (perm[u], perm[v])))?;
        g.source_id = self.source_id.clone();
        Ok(g)
    }
}
