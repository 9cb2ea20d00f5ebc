use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{draw_graphs, generator_name, ExperimentConfig, Instance};
use crate::error::{Error, Result};
use crate::graph::{
    adjacency_min_eigenvalue, bfs_bipartition, brute_force_maxcut, cut_value, read_graph,
    write_graph,
};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    pub n: usize,
    pub graph_id: usize,
    pub num_edges: usize,
    pub connected: bool,
    pub bipartite: bool,
    pub c_max: f64,
    pub optimum_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub seed: u64,
    pub generator: String,
    pub bipartite: bool,
    pub exclude_bipartite: bool,
    pub graphs: Vec<ManifestEntry>,
}

fn graph_file_name(n: usize, graph_id: usize) -> String {
    format!("n{n:02}_g{graph_id:03}.json")
}

/// Writes every ensemble graph plus `manifest.json` into `cfg.out_path`.
pub fn cmd_generate(cfg: &ExperimentConfig) -> Result<Manifest> {
    cfg.validate()?;
    let dir = &cfg.out_path;
    fs::create_dir_all(dir)?;
    let mut graphs = Vec::new();
    for &n in &cfg.n_list {
        for (graph_id, g) in draw_graphs(
            cfg.seed,
            n,
            cfg.graph_count,
            cfg.bipartite,
            cfg.exclude_bipartite,
        )?
        .into_iter()
        .enumerate()
        {
            let file = graph_file_name(n, graph_id);
            write_graph(&dir.join(&file), &g)?;
            let inst = Instance::new(graph_id, g)?;
            graphs.push(ManifestEntry {
                file,
                n,
                graph_id,
                num_edges: inst.graph.num_edges(),
                connected: inst.connected,
                bipartite: inst.bipartite,
                c_max: inst.solution.c_max,
                optimum_count: inst.solution.optima.len(),
            });
        }
    }
    let manifest = Manifest {
        seed: cfg.seed,
        generator: generator_name(cfg.bipartite).into(),
        bipartite: cfg.bipartite,
        exclude_bipartite: cfg.exclude_bipartite && !cfg.bipartite,
        graphs,
    };
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    fs::write(dir.join(MANIFEST_FILE), text)?;
    Ok(manifest)
}

/// The first `count` graphs on `n` vertices listed in `dir/manifest.json`.
/// The manifest's `c_max` is checked against a fresh oracle run.
pub fn load_ensemble(dir: &Path, n: usize, count: usize) -> Result<Vec<Instance>> {
    let manifest: Manifest = serde_json::from_str(&fs::read_to_string(dir.join(MANIFEST_FILE))?)?;
    let entries: Vec<&ManifestEntry> = manifest
        .graphs
        .iter()
        .filter(|e| e.n == n)
        .take(count)
        .collect();
    if entries.len() < count {
        return Err(Error::InvalidArgument(format!(
            "{} lists {} graphs on {n} vertices, {count} requested",
            dir.display(),
            entries.len()
        )));
    }
    entries
        .into_iter()
        .map(|e| {
            let inst = Instance::new(e.graph_id, read_graph(&dir.join(&e.file))?)?;
            if inst.graph.n() != n || inst.solution.c_max != e.c_max {
                return Err(Error::InvalidArgument(format!(
                    "{} does not match its manifest entry",
                    e.file
                )));
            }
            Ok(inst)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub n: usize,
    pub num_edges: usize,
    pub c_max: f64,
    pub optimum_count: usize,
    pub bipartite: bool,
    pub connected: bool,
    pub min_adjacency_eigenvalue: f64,
    /// Cut of the BFS two-colouring, for bipartite graphs.
    pub bfs_cut: Option<f64>,
    /// Ground energy of `H_C = -Σ (w/2)(1 - Z_j Z_k)`, i.e. `-c_max`.
    pub min_energy: f64,
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n: {}", self.n)?;
        writeln!(f, "edges: {}", self.num_edges)?;
        writeln!(f, "c_max: {}", self.c_max)?;
        writeln!(f, "optimum_count: {}", self.optimum_count)?;
        writeln!(f, "bipartite: {}", self.bipartite)?;
        writeln!(f, "connected: {}", self.connected)?;
        writeln!(
            f,
            "min_adjacency_eigenvalue: {:.12}",
            self.min_adjacency_eigenvalue
        )?;
        match self.bfs_cut {
            Some(c) => writeln!(f, "bfs_cut: {c}")?,
            None => writeln!(f, "bfs_cut: none")?,
        }
        write!(f, "min_energy: {}", self.min_energy)
    }
}

pub fn cmd_oracle(path: &Path) -> Result<OracleReport> {
    let g = read_graph(path)?;
    let solution = brute_force_maxcut(&g)?;
    let bfs_cut = match bfs_bipartition(&g) {
        Some(a) => Some(cut_value(&g, &a)?),
        None => None,
    };
    Ok(OracleReport {
        n: g.n(),
        num_edges: g.num_edges(),
        c_max: solution.c_max,
        optimum_count: solution.optima.len(),
        bipartite: g.is_bipartite(),
        connected: g.is_connected(),
        min_adjacency_eigenvalue: adjacency_min_eigenvalue(&g)?,
        bfs_cut,
        min_energy: -solution.c_max,
    })
}
