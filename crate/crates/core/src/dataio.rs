//! Reading graph corpora and writing experiment artifacts.
//!
//! Supported inputs are the TUDataset directory layout and plain edge lists.
//! Outputs are headerless CSV matrices and JSON result documents.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Provenance of a loaded dataset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub name: String,
    pub graphs: Vec<GraphRecord>,
    pub min_nodes: usize,
    pub max_graphs: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphRecord {
    pub source_id: String,
    pub nodes: usize,
    /// 0-based label after remapping; `None` without a labels file.
    pub label: Option<usize>,
}

impl DatasetManifest {
    /// Labels of all graphs, if every graph has one.
    pub fn labels(&self) -> Option<Vec<usize>> {
        self.graphs.iter().map(|g| g.label).collect()
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::MissingFile(path.to_path_buf()),
        _ => Error::io(path, e),
    })
}

fn parse_token<T: std::str::FromStr>(token: &str, path: &Path, line: usize) -> Result<T> {
    token.trim().parse().map_err(|_| Error::Parse {
        path: path.to_path_buf(),
        line,
        message: format!("expected an integer, found {:?}", token.trim()),
    })
}

/// Non-blank lines with their 1-based line numbers.
fn numbered_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

/// Finds the dataset prefix `DS` from the `DS_A.txt` file in `dir`.
fn dataset_name(dir: &Path) -> Result<String> {
    let entries = fs::read_dir(dir).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::MissingFile(dir.to_path_buf()),
        _ => Error::io(dir, e),
    })?;
    let mut names: Vec<String> = entries
        .filter_map(|e| e.ok())
        .filter_map(|e| e.file_name().to_str().map(str::to_owned))
        .filter_map(|f| f.strip_suffix("_A.txt").map(str::to_owned))
        .collect();
    names.sort();
    match names.len() {
        0 => Err(Error::MissingFile(dir.join("<DS>_A.txt"))),
        1 => Ok(names.remove(0)),
        _ => Err(Error::Input(format!(
            "{} holds several datasets: {}",
            dir.display(),
            names.join(", ")
        ))),
    }
}

/// Loads a TUDataset-format corpus.
///
/// Keeps graphs with at least `min_nodes` nodes, then the first `max_graphs`
/// of those in graph-id order. Reciprocal edge lines collapse to one edge and
/// self-loops are dropped. Labels of the kept graphs are remapped to `0..L`
/// in increasing order of the original values.
pub fn load_tudataset(
    dir: &Path,
    min_nodes: usize,
    max_graphs: Option<usize>,
) -> Result<(Vec<Graph>, DatasetManifest)> {
    let name = dataset_name(dir)?;
    let file = |suffix: &str| dir.join(format!("{name}_{suffix}.txt"));

    let indicator_path = file("graph_indicator");
    let indicator_text = read_text(&indicator_path)?;
    // graph id of every global node, in node order
    let mut graph_of = Vec::new();
    for (line, text) in numbered_lines(&indicator_text) {
        graph_of.push(parse_token::<usize>(text, &indicator_path, line)?);
    }
    let node_total = graph_of.len();

    // local index of each node within its graph
    let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut local = vec![0u32; node_total];
    for (node, &gid) in graph_of.iter().enumerate() {
        let list = members.entry(gid).or_default();
        local[node] = list.len() as u32;
        list.push(node);
    }

    let edges_path = file("A");
    let edges_text = read_text(&edges_path)?;
    let mut neighbors: BTreeMap<usize, Vec<Vec<u32>>> = members
        .iter()
        .map(|(&gid, nodes)| (gid, vec![Vec::new(); nodes.len()]))
        .collect();
    for (line, text) in numbered_lines(&edges_text) {
        let mut parts = text.split(',');
        let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::Parse {
                path: edges_path,
                line,
                message: format!("expected \"i, j\", found {text:?}"),
            });
        };
        let endpoint = |token: &str| -> Result<usize> {
            let id: usize = parse_token(token, &edges_path, line)?;
            if id == 0 || id > node_total {
                return Err(Error::NodeOutOfRange {
                    path: edges_path.clone(),
                    line,
                    id,
                    max: node_total,
                });
            }
            Ok(id - 1)
        };
        let (u, v) = (endpoint(a)?, endpoint(b)?);
        if u == v {
            continue;
        }
        if graph_of[u] != graph_of[v] {
            return Err(Error::Parse {
                path: edges_path,
                line,
                message: format!(
                    "edge joins nodes of graphs {} and {}",
                    graph_of[u], graph_of[v]
                ),
            });
        }
        let lists = neighbors
            .get_mut(&graph_of[u])
            .expect("graph ids come from the indicator");
        lists[local[u] as usize].push(local[v]);
        lists[local[v] as usize].push(local[u]);
    }

    let labels_path = file("graph_labels");
    let raw_labels = if labels_path.exists() {
        let text = read_text(&labels_path)?;
        let mut labels = Vec::new();
        for (line, t) in numbered_lines(&text) {
            labels.push(parse_token::<i64>(t, &labels_path, line)?);
        }
        Some(labels)
    } else {
        None
    };

    let mut graphs = Vec::new();
    let mut kept_raw = Vec::new();
    for (gid, mut lists) in neighbors {
        if lists.len() < min_nodes.max(1) {
            continue;
        }
        if max_graphs.is_some_and(|cap| graphs.len() >= cap) {
            break;
        }
        for l in &mut lists {
            l.sort_unstable();
            l.dedup();
        }
        let raw = match &raw_labels {
            Some(labels) => Some(
                *labels
                    .get(gid.wrapping_sub(1))
                    .ok_or_else(|| Error::Parse {
                        path: labels_path.clone(),
                        line: labels.len() + 1,
                        message: format!("no label for graph {gid}"),
                    })?,
            ),
            None => None,
        };
        kept_raw.push(raw);
        graphs.push(Graph::from_neighbor_lists(lists).with_source_id(format!("{name}#{gid}")));
    }
    if graphs.is_empty() {
        return Err(Error::EmptyDataset {
            path: dir.to_path_buf(),
            min_nodes,
        });
    }

    let mut distinct: Vec<i64> = kept_raw.iter().flatten().copied().collect();
    distinct.sort_unstable();
    distinct.dedup();
    let records = graphs
        .iter()
        .zip(&kept_raw)
        .map(|(g, raw)| GraphRecord {
            source_id: g.source_id().unwrap_or_default().to_owned(),
            nodes: g.node_count(),
            label: raw.map(|r| distinct.binary_search(&r).expect("label was collected")),
        })
        .collect();
    let manifest = DatasetManifest {
        name,
        graphs: records,
        min_nodes,
        max_graphs,
    };
    Ok((graphs, manifest))
}

/// Reads a 0-based edge list. An optional first line `n=<count>` fixes the
/// node count; otherwise it is one more than the largest id seen.
pub fn load_edge_list(path: &Path) -> Result<Graph> {
    let text = read_text(path)?;
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut declared = None;
    let mut edges = Vec::new();
    for (idx, (line, t)) in numbered_lines(&text).enumerate() {
        if t.starts_with('#') {
            continue;
        }
        if let Some(count) = t.strip_prefix("n=") {
            if idx != 0 {
                return Err(parse_err(
                    line,
                    "node count must be on the first line".into(),
                ));
            }
            declared = Some(parse_token::<usize>(count, path, line)?);
            continue;
        }
        let tokens: Vec<&str> = t
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        let [a, b] = tokens[..] else {
            return Err(parse_err(line, format!("expected \"u v\", found {t:?}")));
        };
        let u: usize = parse_token(a, path, line)?;
        let v: usize = parse_token(b, path, line)?;
        if let Some(n) = declared {
            if u >= n || v >= n {
                return Err(parse_err(
                    line,
                    format!("edge ({u}, {v}) exceeds declared n={n}"),
                ));
            }
        }
        edges.push((line, u, v));
    }
    let n = match declared {
        Some(n) => n,
        None => edges
            .iter()
            .map(|&(_, u, v)| u.max(v) + 1)
            .max()
            .unwrap_or(0),
    };
    if n == 0 {
        return Err(parse_err(1, "no edges and no n=<count> declaration".into()));
    }
    let mut lists = vec![Vec::new(); n];
    for (_, u, v) in edges {
        if u != v {
            lists[u].push(v as u32);
            lists[v].push(u as u32);
        }
    }
    for l in &mut lists {
        l.sort_unstable();
        l.dedup();
    }
    Ok(Graph::from_neighbor_lists(lists).with_source_id(path.display().to_string()))
}

/// Writes `g` as an edge list with an `n=` header, one `u v` pair per line.
pub fn write_edge_list(g: &Graph, path: &Path) -> Result<()> {
    let mut out = format!("n={}\n", g.node_count());
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}").expect("writing to a String");
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Index of a sampled population written as one edge-list file per graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PopulationManifest {
    pub graphons: Vec<String>,
    pub seed: u64,
    pub graphs: Vec<PopulationEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PopulationEntry {
    /// Path relative to the manifest's directory.
    pub file: String,
    pub graphon: String,
    pub label: usize,
    pub nodes: usize,
}

/// Loads every graph listed in a population manifest, with the labels.
pub fn load_population(manifest_path: &Path) -> Result<(Vec<Graph>, PopulationManifest)> {
    let manifest: PopulationManifest = serde_json::from_str(&read_text(manifest_path)?)?;
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    let graphs = manifest
        .graphs
        .iter()
        .map(|e| load_edge_list(&base.join(&e.file)))
        .collect::<Result<_>>()?;
    Ok((graphs, manifest))
}

/// Shortest decimal that parses back to the same `f64`; integral values
/// print without a fractional part.
fn format_value(x: f64) -> String {
    if x.is_finite() && x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{x}")
    } else {
        format!("{x:?}")
    }
}

/// Headerless CSV, one row per line.
pub fn matrix_to_csv(m: &Array2<f64>) -> String {
    let mut out = String::new();
    for row in m.rows() {
        let cells: Vec<String> = row.iter().map(|&x| format_value(x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn write_matrix_csv(m: &Array2<f64>, path: &Path) -> Result<()> {
    fs::write(path, matrix_to_csv(m)).map_err(|e| Error::io(path, e))
}

pub fn read_matrix_csv(path: &Path) -> Result<Array2<f64>> {
    let text = read_text(path)?;
    let mut values = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for (line, t) in numbered_lines(&text) {
        let row: Vec<f64> = t
            .split(',')
            .map(|cell| {
                cell.trim().parse().map_err(|_| Error::Parse {
                    path: path.to_path_buf(),
                    line,
                    message: format!("expected a number, found {:?}", cell.trim()),
                })
            })
            .collect::<Result<_>>()?;
        if *cols.get_or_insert(row.len()) != row.len() {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line,
                message: format!(
                    "row has {} columns, expected {}",
                    row.len(),
                    cols.unwrap_or(0)
                ),
            });
        }
        values.extend(row);
        rows += 1;
    }
    Array2::from_shape_vec((rows, cols.unwrap_or(0)), values)
        .map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

/// Wall-clock data kept apart from the reproducible part of a document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub timestamp: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_seconds: Option<f64>,
}

impl Metadata {
    pub fn now() -> Self {
        Self {
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            elapsed_seconds: None,
        }
    }
}

/// Top-level JSON artifact. The result's own fields sit at the top level
/// next to the run parameters.
#[derive(Debug, Clone, Serialize)]
pub struct ResultDocument<T: Serialize> {
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub command: String,
    pub seed: u64,
    pub parameters: serde_json::Value,
    #[serde(flatten)]
    pub result: T,
    pub metadata: Metadata,
}

impl<T: Serialize> ResultDocument<T> {
    pub fn new(
        command: impl Into<String>,
        seed: u64,
        parameters: serde_json::Value,
        result: T,
    ) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            tool_version: env!("CARGO_PKG_VERSION"),
            command: command.into(),
            seed,
            parameters,
            result,
            metadata: Metadata::now(),
        }
    }
}

pub fn write_result_json<T: Serialize>(doc: &ResultDocument<T>, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(doc)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Creates `dir` and its parents if needed.
pub fn ensure_dir(dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    Ok(dir.to_path_buf())
}
