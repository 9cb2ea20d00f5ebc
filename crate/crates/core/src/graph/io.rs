use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Edge, Graph};
use crate::error::{Error, Result};

/// On-disk graph: `{"n": 4, "unit_weights": true, "edges": [[0, 1], ...]}`
/// or, with explicit weights, `{"n": 4, "edges": [[0, 1, 0.5], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub n: usize,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub unit_weights: bool,
    pub edges: Vec<EdgeRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EdgeRecord {
    Weighted(usize, usize, f64),
    Unit(usize, usize),
}

impl From<&Graph> for GraphFile {
    fn from(g: &Graph) -> Self {
        let unit = g.is_unit_weight();
        GraphFile {
            n: g.n(),
            unit_weights: unit,
            edges: g
                .edges()
                .iter()
                .map(|e| {
                    if unit {
                        EdgeRecord::Unit(e.j, e.k)
                    } else {
                        EdgeRecord::Weighted(e.j, e.k, e.w)
                    }
                })
                .collect(),
        }
    }
}

impl TryFrom<GraphFile> for Graph {
    type Error = Error;

    fn try_from(f: GraphFile) -> Result<Graph> {
        let edges = f
            .edges
            .into_iter()
            .map(|rec| match rec {
                EdgeRecord::Weighted(j, k, w) if !f.unit_weights => Ok(Edge::new(j, k, w)),
                EdgeRecord::Weighted(j, k, _) => Err(Error::InvalidArgument(format!(
                    "edge ({j}, {k}) carries a weight but unit_weights is set"
                ))),
                EdgeRecord::Unit(j, k) if f.unit_weights => Ok(Edge::unit(j, k)),
                EdgeRecord::Unit(j, k) => Err(Error::InvalidArgument(format!(
                    "edge ({j}, {k}) has no weight and unit_weights is not set"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Graph::new(f.n, edges)
    }
}

impl Graph {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&GraphFile::from(self)).expect("graph serialization is infallible")
    }

    pub fn from_json(s: &str) -> Result<Graph> {
        Graph::try_from(serde_json::from_str::<GraphFile>(s)?)
    }
}

pub fn write_graph(path: &Path, g: &Graph) -> Result<()> {
    let mut text = g.to_json();
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn read_graph(path: &Path) -> Result<Graph> {
    Graph::from_json(&fs::read_to_string(path)?)
}
