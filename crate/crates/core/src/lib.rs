//! Graphon-based distances between unlabeled graphs of different sizes,
//! clustering of graph populations (DSC, SSDP) and a bootstrap two-sample test.

pub mod cli;
pub mod clustering;
pub mod dataio;
pub mod error;
pub mod graph;
pub mod graphon;
pub mod numerics;
pub mod rng;
pub mod transform;
pub mod twosample;

pub use error::{Error, Result};
pub use graph::Graph;
pub use graphon::{Builtin, Graphon, GridGraphon};
pub use numerics::ClusterAssignment;
pub use transform::{default_n0, graph_distance, histogram, Histogram};
