//! Graphons: evaluation, exchangeable sampling, block discretization and L2 distances.

use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng;
use crate::transform::Histogram;

/// Quadrature points per axis inside each cell used by [`discretize`].
pub const DEFAULT_CELL_RESOLUTION: usize = 16;

/// Block count used by the degree-monotonicity diagnostic.
pub const DIAGNOSTIC_BLOCKS: usize = 64;

/// The four analytic graphons of the simulated benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Builtin {
    /// `u * v`
    W1,
    /// `exp(-max(u, v)^0.75)`
    W2,
    /// `exp(-0.5 * (min(u, v) + sqrt(u) + sqrt(v)))`
    W3,
    /// `|u - v|`
    W4,
}

impl Builtin {
    pub const ALL: [Builtin; 4] = [Builtin::W1, Builtin::W2, Builtin::W3, Builtin::W4];

    #[inline]
    fn eval(self, u: f64, v: f64) -> f64 {
        match self {
            Builtin::W1 => u * v,
            Builtin::W2 => (-u.max(v).powf(0.75)).exp(),
            Builtin::W3 => (-0.5 * (u.min(v) + (u.sqrt() + v.sqrt()))).exp(),
            Builtin::W4 => (u - v).abs(),
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Builtin::W1 => "W1",
            Builtin::W2 => "W2",
            Builtin::W3 => "W3",
            Builtin::W4 => "W4",
        };
        f.write_str(s)
    }
}

impl FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "W1" => Ok(Builtin::W1),
            "W2" => Ok(Builtin::W2),
            "W3" => Ok(Builtin::W3),
            "W4" => Ok(Builtin::W4),
            other => Err(Error::Input(format!(
                "unknown graphon '{other}', expected one of W1, W2, W3, W4"
            ))),
        }
    }
}

/// Piecewise-constant graphon over a uniform `g x g` partition of the unit square.
#[derive(Debug, Clone, PartialEq)]
pub struct GridGraphon {
    values: Array2<f64>,
}

impl GridGraphon {
    pub fn new(values: Array2<f64>) -> Result<Self> {
        let (rows, cols) = values.dim();
        if rows != cols || rows == 0 {
            return Err(Error::Input(format!(
                "grid graphon needs a non-empty square matrix, got {rows}x{cols}"
            )));
        }
        for ((i, j), &x) in values.indexed_iter() {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::Input(format!(
                    "grid graphon entry ({i}, {j}) = {x} is not a probability"
                )));
            }
            if x != values[[j, i]] {
                return Err(Error::Input(format!(
                    "grid graphon is not symmetric at ({i}, {j})"
                )));
            }
        }
        Ok(Self { values })
    }

    pub fn constant(side: usize, p: f64) -> Result<Self> {
        Self::new(Array2::from_elem((side, side), p))
    }

    pub fn side(&self) -> usize {
        self.values.nrows()
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    /// Cell containing `x`; cells are half-open with `x = 1` mapped to the last one.
    #[inline]
    pub fn cell(&self, x: f64) -> usize {
        ((x * self.side() as f64) as usize).min(self.side() - 1)
    }
}

impl From<Histogram> for GridGraphon {
    fn from(h: Histogram) -> Self {
        // Histogram entries are already symmetric probabilities.
        Self {
            values: h.into_values(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Graphon {
    Builtin(Builtin),
    Grid(GridGraphon),
}

impl From<Builtin> for Graphon {
    fn from(b: Builtin) -> Self {
        Graphon::Builtin(b)
    }
}

impl From<GridGraphon> for Graphon {
    fn from(g: GridGraphon) -> Self {
        Graphon::Grid(g)
    }
}

impl FromStr for Graphon {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.parse::<Builtin>().map(Graphon::Builtin)
    }
}

impl fmt::Display for Graphon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Graphon::Builtin(b) => b.fmt(f),
            Graphon::Grid(g) => write!(f, "Grid({0}x{0})", g.side()),
        }
    }
}

impl Graphon {
    /// Link probability at `(u, v)`.
    pub fn eval(&self, u: f64, v: f64) -> Result<f64> {
        for x in [u, v] {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::Domain(format!(
                    "graphon argument {x} is outside [0, 1]"
                )));
            }
        }
        Ok(self.eval_unchecked(u, v))
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, u: f64, v: f64) -> f64 {
        match self {
            Graphon::Builtin(b) => b.eval(u, v),
            Graphon::Grid(g) => g.values[[g.cell(u), g.cell(v)]],
        }
    }
}

/// Draws an exchangeable random graph on `n` nodes from `w`.
///
/// Latent positions `U_1..U_n` are drawn first, then every pair `i < j` in
/// row-major order is an independent Bernoulli trial with probability
/// `w(U_i, U_j)`.
pub fn sample_graph(w: &Graphon, n: usize, seed: u64) -> Result<Graph> {
    sample_graph_with_latents(w, n, seed).map(|(g, _)| g)
}

/// Like [`sample_graph`], also returning the latent positions.
pub fn sample_graph_with_latents(w: &Graphon, n: usize, seed: u64) -> Result<(Graph, Vec<f64>)> {
    if n == 0 {
        return Err(Error::Size("cannot sample a graph with zero nodes".into()));
    }
    let mut rng = rng::rng_from_seed(seed);
    let latents: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let mut neighbors: Vec<Vec<u32>> = vec![Vec::new(); n];

    match w {
        Graphon::Grid(grid) => {
            // Cell lookups are cheap enough to do once per node.
            let cells: Vec<usize> = latents.iter().map(|&u| grid.cell(u)).collect();
            for i in 0..n {
                let row = grid.values.row(cells[i]);
                for j in i + 1..n {
                    if rng.random::<f64>() < row[cells[j]] {
                        neighbors[i].push(j as u32);
                        neighbors[j].push(i as u32);
                    }
                }
            }
        }
        Graphon::Builtin(b) => {
            for i in 0..n {
                for j in i + 1..n {
                    if rng.random::<f64>() < b.eval(latents[i], latents[j]) {
                        neighbors[i].push(j as u32);
                        neighbors[j].push(i as u32);
                    }
                }
            }
        }
    }
    Ok((Graph::from_neighbor_lists(neighbors), latents))
}

/// Samples one graph per `(graphon, size)` entry. Graph `k` uses the stream
/// derived from `(seed, k)`, so the population does not depend on scheduling.
pub fn sample_population(members: &[(Graphon, usize)], seed: u64) -> Result<Vec<Graph>> {
    members
        .par_iter()
        .enumerate()
        .map(|(k, (w, n))| sample_graph(w, *n, rng::derive_seed(seed, k as u64)))
        .collect()
}

/// `per` graphs from each graphon with sizes uniform in `nmin..=nmax`.
///
/// Returns the graphs grouped by graphon and their 0-based graphon labels.
pub fn sample_labeled_population(
    graphons: &[Graphon],
    per: usize,
    nmin: usize,
    nmax: usize,
    seed: u64,
) -> Result<(Vec<Graph>, Vec<usize>)> {
    if nmin == 0 || nmin > nmax {
        return Err(Error::Size(format!(
            "graph sizes need 1 <= nmin <= nmax, got {nmin}..={nmax}"
        )));
    }
    let mut sizes = rng::stream(seed, 0);
    let mut members = Vec::with_capacity(graphons.len() * per);
    let mut labels = Vec::with_capacity(graphons.len() * per);
    for (label, w) in graphons.iter().enumerate() {
        for _ in 0..per {
            members.push((w.clone(), sizes.random_range(nmin..=nmax)));
            labels.push(label);
        }
    }
    let graphs = sample_population(&members, rng::derive_seed(seed, 1))?;
    Ok((graphs, labels))
}

/// Block averages of `w` over the uniform `n0 x n0` partition.
pub fn discretize(w: &Graphon, n0: usize) -> Result<Histogram> {
    discretize_with(w, n0, DEFAULT_CELL_RESOLUTION)
}

/// [`discretize`] with an explicit midpoint-rule resolution per cell and axis.
///
/// Grid graphons are integrated exactly from cell overlaps instead.
pub fn discretize_with(w: &Graphon, n0: usize, per_cell: usize) -> Result<Histogram> {
    if n0 == 0 || per_cell == 0 {
        return Err(Error::Size(format!(
            "discretization needs n0 >= 1 and per-cell resolution >= 1 (got {n0}, {per_cell})"
        )));
    }
    let values = match w {
        Graphon::Grid(grid) if grid.side() == n0 => grid.values.clone(),
        Graphon::Grid(grid) => grid_block_average(grid, n0),
        Graphon::Builtin(b) => {
            let pts = n0 * per_cell;
            let axis: Vec<f64> = (0..pts).map(|k| (k as f64 + 0.5) / pts as f64).collect();
            let mut out = Array2::zeros((n0, n0));
            for i in 0..n0 {
                for j in i..n0 {
                    let mut acc = 0.0;
                    for &u in &axis[i * per_cell..(i + 1) * per_cell] {
                        for &v in &axis[j * per_cell..(j + 1) * per_cell] {
                            acc += b.eval(u, v);
                        }
                    }
                    let mean = (acc / (per_cell * per_cell) as f64).clamp(0.0, 1.0);
                    out[[i, j]] = mean;
                    out[[j, i]] = mean;
                }
            }
            out
        }
    };
    Histogram::from_values(values)
}

/// Length of the overlap between `[a0, a1)` and `[b0, b1)`.
fn overlap(a0: f64, a1: f64, b0: f64, b1: f64) -> f64 {
    (a1.min(b1) - a0.max(b0)).max(0.0)
}

fn grid_block_average(grid: &GridGraphon, n0: usize) -> Array2<f64> {
    let g = grid.side();
    // weights[i][a] = fraction of target block i covered by source cell a
    let weights: Vec<Vec<(usize, f64)>> = (0..n0)
        .map(|i| {
            let (lo, hi) = (i as f64 / n0 as f64, (i + 1) as f64 / n0 as f64);
            (0..g)
                .filter_map(|a| {
                    let o = overlap(lo, hi, a as f64 / g as f64, (a + 1) as f64 / g as f64);
                    (o > 0.0).then_some((a, o * n0 as f64))
                })
                .collect()
        })
        .collect();
    let mut out = Array2::zeros((n0, n0));
    for i in 0..n0 {
        for j in i..n0 {
            let mut acc = 0.0;
            for &(a, wa) in &weights[i] {
                for &(b, wb) in &weights[j] {
                    acc += wa * wb * grid.values[[a, b]];
                }
            }
            let mean = acc.clamp(0.0, 1.0);
            out[[i, j]] = mean;
            out[[j, i]] = mean;
        }
    }
    out
}

/// Midpoint-rule approximation of `||w1 - w2||_{L2}` on a `resolution x resolution` grid.
pub fn l2_distance(w1: &Graphon, w2: &Graphon, resolution: usize) -> Result<f64> {
    if resolution < 2 {
        return Err(Error::Size(format!(
            "L2 quadrature needs at least 2 points per axis, got {resolution}"
        )));
    }
    let axis: Vec<f64> = (0..resolution)
        .map(|k| (k as f64 + 0.5) / resolution as f64)
        .collect();
    let mut acc = 0.0;
    for &u in &axis {
        for &v in &axis {
            let d = w1.eval_unchecked(u, v) - w2.eval_unchecked(u, v);
            acc += d * d;
        }
    }
    Ok((acc / (resolution * resolution) as f64).sqrt())
}

/// Degree-function profile of a graphon: row means of its discretization.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDiagnostic {
    pub profile: Vec<f64>,
    /// Whether the profile is monotone in either direction. Graph distances
    /// assume it is; a non-monotone graphon is compared through its
    /// degree-sorted rearrangement.
    pub monotone: bool,
}

pub fn degree_diagnostic(w: &Graphon) -> Result<DegreeDiagnostic> {
    let h = discretize(w, DIAGNOSTIC_BLOCKS)?;
    let profile: Vec<f64> = h
        .values()
        .rows()
        .into_iter()
        .map(|r| r.mean().unwrap_or(0.0))
        .collect();
    let up = profile.windows(2).all(|p| p[1] >= p[0]);
    let down = profile.windows(2).all(|p| p[1] <= p[0]);
    let monotone = up || down;
    if !monotone {
        log::warn!("graphon {w} has a non-monotone degree function; distances see its degree-sorted rearrangement");
    }
    Ok(DegreeDiagnostic { profile, monotone })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn zero_grid() -> Graphon {
        GridGraphon::constant(1, 0.0).unwrap().into()
    }

    #[test]
    fn builtin_values() {
        let w1 = Graphon::from(Builtin::W1);
        assert_eq!(w1.eval(0.5, 0.5).unwrap(), 0.25);
        assert_eq!(Graphon::from(Builtin::W4).eval(0.3, 0.3).unwrap(), 0.0);
        assert_eq!(Graphon::from(Builtin::W2).eval(0.0, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn eval_rejects_points_outside_unit_square() {
        let w = Graphon::from(Builtin::W1);
        assert!(matches!(w.eval(-0.1, 0.5), Err(Error::Domain(_))));
        assert!(matches!(w.eval(0.5, 1.0 + 1e-12), Err(Error::Domain(_))));
        assert!(w.eval(1.0, 0.0).is_ok());
    }

    #[test]
    fn builtins_symmetric_and_bounded() {
        let mut rng = rng::rng_from_seed(11);
        for b in Builtin::ALL {
            let w = Graphon::from(b);
            for _ in 0..1000 {
                let (u, v) = (rng.random::<f64>(), rng.random::<f64>());
                let a = w.eval(u, v).unwrap();
                assert_eq!(a, w.eval(v, u).unwrap());
                assert!((0.0..=1.0).contains(&a));
            }
        }
    }

    #[test]
    fn grid_lookup_uses_half_open_cells() {
        let mut v = Array2::zeros((2, 2));
        v[[1, 1]] = 1.0;
        let w = Graphon::from(GridGraphon::new(v).unwrap());
        assert_eq!(w.eval(0.49, 0.49).unwrap(), 0.0);
        assert_eq!(w.eval(0.5, 0.5).unwrap(), 1.0);
        assert_eq!(w.eval(1.0, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn grid_rejects_asymmetric_or_out_of_range() {
        let mut v = Array2::zeros((2, 2));
        v[[0, 1]] = 0.5;
        assert!(GridGraphon::new(v.clone()).is_err());
        v[[1, 0]] = 0.5;
        assert!(GridGraphon::new(v.clone()).is_ok());
        v[[0, 0]] = 1.5;
        assert!(GridGraphon::new(v).is_err());
    }

    #[test]
    fn sampling_trivial_graphons() {
        let g = sample_graph(&zero_grid(), 10, 3).unwrap();
        assert_eq!(g.edge_count(), 0);
        let ones: Graphon = GridGraphon::constant(3, 1.0).unwrap().into();
        assert_eq!(sample_graph(&ones, 10, 3).unwrap().edge_count(), 45);
        assert!(matches!(sample_graph(&ones, 0, 3), Err(Error::Size(_))));
    }

    #[test]
    fn sampling_is_deterministic_in_seed() {
        let w = Graphon::from(Builtin::W3);
        assert_eq!(
            sample_graph(&w, 60, 9).unwrap(),
            sample_graph(&w, 60, 9).unwrap()
        );
        assert_ne!(
            sample_graph(&w, 60, 9).unwrap(),
            sample_graph(&w, 60, 10).unwrap()
        );
    }

    #[test]
    fn w1_density_matches_integral() {
        // E[density] = (int u du)^2 = 1/4
        let g = sample_graph(&Builtin::W1.into(), 2000, 1).unwrap();
        assert_abs_diff_eq!(g.density(), 0.25, epsilon = 0.02);
    }

    #[test]
    fn discretize_examples() {
        let h = discretize(&Builtin::W1.into(), 1).unwrap();
        assert_abs_diff_eq!(h.values()[[0, 0]], 0.25, epsilon = 1e-12);

        let mut v = Array2::zeros((3, 3));
        v[[0, 1]] = 0.3;
        v[[1, 0]] = 0.3;
        v[[2, 2]] = 0.9;
        let grid = GridGraphon::new(v.clone()).unwrap();
        assert_eq!(discretize(&grid.into(), 3).unwrap().values(), &v);
    }

    #[test]
    fn discretize_w4_against_fine_midpoint_oracle() {
        let h = discretize(&Builtin::W4.into(), 2).unwrap();
        let r = 2048;
        let half = r / 2;
        for bi in 0..2 {
            for bj in 0..2 {
                let mut acc = 0.0;
                for a in 0..half {
                    for b in 0..half {
                        let u = ((bi * half + a) as f64 + 0.5) / r as f64;
                        let v = ((bj * half + b) as f64 + 0.5) / r as f64;
                        acc += (u - v).abs();
                    }
                }
                let oracle = acc / (half * half) as f64;
                assert_abs_diff_eq!(h.values()[[bi, bj]], oracle, epsilon = 2e-3);
            }
        }
        // analytic: diagonal cells 1/6 * 1/2, off-diagonal 1/2
        assert_abs_diff_eq!(h.values()[[0, 1]], 0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(h.values()[[0, 0]], 1.0 / 6.0, epsilon = 2e-3);
    }

    #[test]
    fn coarse_grid_averages_exactly() {
        let mut v = Array2::zeros((2, 2));
        v[[0, 0]] = 1.0;
        let grid: Graphon = GridGraphon::new(v).unwrap().into();
        let h = discretize(&grid, 1).unwrap();
        assert_abs_diff_eq!(h.values()[[0, 0]], 0.25, epsilon = 1e-15);
        let h3 = discretize(&grid, 4).unwrap();
        assert_abs_diff_eq!(h3.values()[[1, 1]], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(h3.values()[[2, 2]], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn l2_examples() {
        let w1 = Graphon::from(Builtin::W1);
        assert_eq!(l2_distance(&w1, &w1, 512).unwrap(), 0.0);
        // int int u^2 v^2 = 1/9
        assert_abs_diff_eq!(
            l2_distance(&w1, &zero_grid(), 512).unwrap(),
            1.0 / 3.0,
            epsilon = 1e-3
        );
        assert!(l2_distance(&w1, &w1, 1).is_err());
    }

    #[test]
    fn l2_between_grids_is_scaled_frobenius() {
        let a = ndarray::array![[0.1, 0.4], [0.4, 0.7]];
        let b = ndarray::array![[0.3, 0.0], [0.0, 1.0]];
        let frob: f64 = (&a - &b).mapv(|x: f64| x * x).sum().sqrt() / 2.0;
        let ga: Graphon = GridGraphon::new(a).unwrap().into();
        let gb: Graphon = GridGraphon::new(b).unwrap().into();
        assert_abs_diff_eq!(l2_distance(&ga, &gb, 64).unwrap(), frob, epsilon = 1e-12);
    }

    #[test]
    fn degree_monotonicity_diagnostic() {
        for b in [Builtin::W1, Builtin::W2, Builtin::W3] {
            assert!(degree_diagnostic(&b.into()).unwrap().monotone, "{b}");
        }
        assert!(!degree_diagnostic(&Builtin::W4.into()).unwrap().monotone);
    }

    #[test]
    fn parse_builtin_names() {
        assert_eq!("W3".parse::<Builtin>().unwrap(), Builtin::W3);
        assert!("W5".parse::<Graphon>().is_err());
    }
}
