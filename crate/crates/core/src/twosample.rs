//! Two-sample testing for graphs: do `G1` and `G2` come from the same graphon?
//!
//! The statistic is the graph distance `d(G1, G2)`. Its null distribution is
//! calibrated by a parametric bootstrap: a piecewise-constant graphon is fitted
//! to the observed graph(s) with the histogram transform, pairs of graphs with
//! the observed sizes are resampled from it, and the p-value counts how many
//! resampled distances reach the observed one.

use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::graphon::{sample_graph, Graphon, GridGraphon};
use crate::rng;
use crate::transform::{default_n0, graph_distance, histogram, Histogram};

/// Smallest bootstrap sample accepted.
pub const MIN_BOOTSTRAP: usize = 20;
/// Smallest trial count accepted by power experiments.
pub const MIN_TRIALS: usize = 20;

/// Which observed graphs the null model is fitted to.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BootstrapSource {
    /// Fit to the first graph only.
    #[default]
    First,
    /// Fit to the average histogram of both graphs.
    Pooled,
}

impl FromStr for BootstrapSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "first" => Ok(Self::First),
            "pooled" => Ok(Self::Pooled),
            other => Err(Error::Input(format!(
                "unknown bootstrap source '{other}', expected 'first' or 'pooled'"
            ))),
        }
    }
}

impl fmt::Display for BootstrapSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::First => "first",
            Self::Pooled => "pooled",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestSettings {
    pub n0: usize,
    pub bootstrap: usize,
    pub alpha: f64,
    pub seed: u64,
    pub source: BootstrapSource,
}

impl TestSettings {
    pub fn new(n0: usize, bootstrap: usize, alpha: f64, seed: u64) -> Self {
        Self {
            n0,
            bootstrap,
            alpha,
            seed,
            source: BootstrapSource::First,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub statistic: f64,
    pub p_value: f64,
    pub reject: bool,
    pub alpha: f64,
    pub n0: usize,
    pub bootstrap_samples: usize,
    /// Bootstrap `(1 - alpha)` quantile, the empirical rejection threshold.
    pub xi_hat: f64,
    /// Sorted bootstrap statistics.
    pub null_distribution: Vec<f64>,
}

fn check_bootstrap(b: usize) -> Result<()> {
    if b < MIN_BOOTSTRAP {
        return Err(Error::Size(format!(
            "bootstrap needs at least {MIN_BOOTSTRAP} samples, got {b}"
        )));
    }
    Ok(())
}

fn check_block_count(n0: usize, n1: usize, n2: usize) -> Result<()> {
    if n0 == 0 || n0 > n1.min(n2) {
        return Err(Error::Size(format!(
            "block count n0 = {n0} must be in 1..={} for graph sizes {n1} and {n2}",
            n1.min(n2)
        )));
    }
    Ok(())
}

/// Block edge densities of `g`. Diagonal blocks are rescaled by `h / (h - 1)`
/// so the zero self-pairs do not bias the fitted link probabilities.
fn block_densities(g: &Graph, n0: usize) -> Result<Array2<f64>> {
    let mut values = histogram(g, n0)?.into_values();
    let h = (g.node_count() / n0) as f64;
    if h > 1.0 {
        for i in 0..n0 {
            values[[i, i]] = (values[[i, i]] * h / (h - 1.0)).min(1.0);
        }
    }
    Ok(values)
}

/// Piecewise-constant graphon fitted to `g` at the default block count for its size.
pub fn fit_grid_graphon(g: &Graph) -> Result<Graphon> {
    let values = block_densities(g, default_n0(g.node_count()))?;
    Ok(GridGraphon::from(Histogram::from_values(values)?).into())
}

fn fit_pooled(g1: &Graph, g2: &Graph) -> Result<Graphon> {
    let n0 = default_n0(g1.node_count().min(g2.node_count()));
    let mean = (block_densities(g1, n0)? + block_densities(g2, n0)?).mapv(|x| 0.5 * x);
    Ok(GridGraphon::from(Histogram::from_values(mean)?).into())
}

/// Sorted distances between `b` independent pairs of graphs of sizes
/// `(n1, n2)` drawn from `null_model`. Replicate `r` uses the stream derived
/// from `(seed, r)`.
pub fn bootstrap_from_model(
    null_model: &Graphon,
    n1: usize,
    n2: usize,
    n0: usize,
    b: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    check_bootstrap(b)?;
    check_block_count(n0, n1, n2)?;
    let mut stats: Vec<f64> = (0..b)
        .into_par_iter()
        .map(|r| {
            let s = rng::derive_seed(seed, r as u64);
            let g1 = sample_graph(null_model, n1, rng::derive_seed(s, 0))?;
            let g2 = sample_graph(null_model, n2, rng::derive_seed(s, 1))?;
            graph_distance(&g1, &g2, n0)
        })
        .collect::<Result<_>>()?;
    stats.sort_by(f64::total_cmp);
    Ok(stats)
}

/// Bootstrap null distribution conditioned on `g1`.
pub fn bootstrap_null(g1: &Graph, n2: usize, n0: usize, b: usize, seed: u64) -> Result<Vec<f64>> {
    check_bootstrap(b)?;
    check_block_count(n0, g1.node_count(), n2)?;
    let model = fit_grid_graphon(g1)?;
    bootstrap_from_model(&model, g1.node_count(), n2, n0, b, seed)
}

/// Add-one p-value of `statistic` against a bootstrap sample.
pub fn p_value(statistic: f64, null_distribution: &[f64]) -> f64 {
    let exceed = null_distribution
        .iter()
        .filter(|&&s| s >= statistic)
        .count();
    (1 + exceed) as f64 / (null_distribution.len() + 1) as f64
}

/// Empirical `(1 - alpha)` quantile of a sorted sample.
pub fn upper_quantile(sorted: &[f64], alpha: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let rank = ((1.0 - alpha) * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

/// Decision for an observed statistic against a given null sample.
pub fn outcome_from_null(
    statistic: f64,
    mut null_distribution: Vec<f64>,
    n0: usize,
    alpha: f64,
) -> TestOutcome {
    null_distribution.sort_by(f64::total_cmp);
    let p = p_value(statistic, &null_distribution);
    TestOutcome {
        statistic,
        p_value: p,
        reject: p < alpha,
        alpha,
        n0,
        bootstrap_samples: null_distribution.len(),
        xi_hat: upper_quantile(&null_distribution, alpha),
        null_distribution,
    }
}

/// Bootstrap two-sample test with the null model fitted to `g1`.
pub fn two_sample_test(
    g1: &Graph,
    g2: &Graph,
    n0: usize,
    b: usize,
    alpha: f64,
    seed: u64,
) -> Result<TestOutcome> {
    two_sample_test_with(g1, g2, &TestSettings::new(n0, b, alpha, seed))
}

pub fn two_sample_test_with(
    g1: &Graph,
    g2: &Graph,
    settings: &TestSettings,
) -> Result<TestOutcome> {
    let alpha = settings.alpha;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Input(format!(
            "significance level must be in (0, 1), got {alpha}"
        )));
    }
    check_bootstrap(settings.bootstrap)?;
    let (n1, n2) = (g1.node_count(), g2.node_count());
    check_block_count(settings.n0, n1, n2)?;
    let statistic = graph_distance(g1, g2, settings.n0)?;
    let model = match settings.source {
        BootstrapSource::First => fit_grid_graphon(g1)?,
        BootstrapSource::Pooled => fit_pooled(g1, g2)?,
    };
    let null = bootstrap_from_model(
        &model,
        n1,
        n2,
        settings.n0,
        settings.bootstrap,
        settings.seed,
    )?;
    Ok(outcome_from_null(statistic, null, settings.n0, alpha))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerSettings {
    /// Size of the first graph; the second has `2 n` nodes.
    pub n: usize,
    pub n0: usize,
    pub trials: usize,
    pub bootstrap: usize,
    pub alpha: f64,
    pub seed: u64,
    pub source: BootstrapSource,
}

/// Rejection rates; entry `(a, b)` pairs `G1 ~ graphons[a]` with `G2 ~ graphons[b]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerMatrix {
    pub graphons: Vec<String>,
    pub power: Array2<f64>,
    pub settings: PowerSettings,
}

/// Fraction of `trials` in which the test rejects, for one ordered graphon pair.
pub fn rejection_rate(
    w1: &Graphon,
    w2: &Graphon,
    settings: &PowerSettings,
    seed: u64,
) -> Result<f64> {
    if settings.trials < MIN_TRIALS {
        return Err(Error::Size(format!(
            "power estimates need at least {MIN_TRIALS} trials, got {}",
            settings.trials
        )));
    }
    let rejections: Vec<bool> = (0..settings.trials)
        .into_par_iter()
        .map(|t| {
            let s = rng::derive_seed(seed, t as u64);
            let g1 = sample_graph(w1, settings.n, rng::derive_seed(s, 0))?;
            let g2 = sample_graph(w2, 2 * settings.n, rng::derive_seed(s, 1))?;
            let test = TestSettings {
                n0: settings.n0,
                bootstrap: settings.bootstrap,
                alpha: settings.alpha,
                seed: rng::derive_seed(s, 2),
                source: settings.source,
            };
            Ok(two_sample_test_with(&g1, &g2, &test)?.reject)
        })
        .collect::<Result<_>>()?;
    Ok(rejections.iter().filter(|&&r| r).count() as f64 / settings.trials as f64)
}

/// Power of the test for every ordered pair of graphons.
pub fn power_matrix(graphons: &[Graphon], settings: &PowerSettings) -> Result<PowerMatrix> {
    let g = graphons.len();
    let mut power = Array2::zeros((g, g));
    for a in 0..g {
        for b in 0..g {
            let seed = rng::derive_seed_path(settings.seed, &[a as u64, b as u64]);
            power[[a, b]] = rejection_rate(&graphons[a], &graphons[b], settings, seed)?;
        }
    }
    Ok(PowerMatrix {
        graphons: graphons.iter().map(ToString::to_string).collect(),
        power,
        settings: *settings,
    })
}
