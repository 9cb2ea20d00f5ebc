//! Experiment harness: ensembles, τ/p sweeps, CSV output, graph manifests and
//! single-graph oracle reports. The CLI is a thin wrapper around this module.

mod generate;
mod sweep;

use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{
    brute_force_maxcut, random_bipartite_3regular, random_u3r, Graph, MatchingStrategy,
    MaxCutSolution,
};
use crate::itebe::{SimMode, DEFAULT_MAX_RESTARTS};
use crate::metrics::IntervalKind;
use crate::rng::{substream, tag};

pub use generate::{
    cmd_generate, cmd_oracle, load_ensemble, Manifest, ManifestEntry, OracleReport, MANIFEST_FILE,
};
pub use sweep::{cmd_sweep, run_sweep, write_csv, CSV_COLUMNS};

/// Largest register the gate-level mode accepts in a sweep.
pub const GATE_LEVEL_MAX_N: usize = 12;

/// Evenly spaced imaginary times `min, …, max` (`steps` points).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauGrid {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl TauGrid {
    pub fn new(min: f64, max: f64, steps: usize) -> Result<Self> {
        let grid = TauGrid { min, max, steps };
        grid.validate()?;
        Ok(grid)
    }

    pub fn single(tau: f64) -> Self {
        TauGrid {
            min: tau,
            max: tau,
            steps: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite()) || self.min < 0.0 || self.max < self.min
        {
            return Err(Error::InvalidArgument(format!(
                "tau grid needs 0 <= min <= max, got [{}, {}]",
                self.min, self.max
            )));
        }
        if self.steps == 0 {
            return Err(Error::InvalidArgument(
                "tau grid needs at least one step".into(),
            ));
        }
        if self.steps == 1 && self.max != self.min {
            return Err(Error::InvalidArgument(
                "a one-point tau grid needs min == max".into(),
            ));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.min];
        }
        let span = self.max - self.min;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.max
                } else {
                    self.min + span * i as f64 / (self.steps - 1) as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// 20 graphs per size, 10^4 shots, 3 repetitions.
    Desk,
    /// 100 graphs per size, 10^5 shots, 10 repetitions.
    Paper,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n_list: Vec<usize>,
    /// Graphs per vertex count.
    pub graph_count: usize,
    /// Draw bipartite 3-regular graphs instead of u3R graphs.
    pub bipartite: bool,
    /// Reject bipartite draws from u3R ensembles (they are studied separately).
    pub exclude_bipartite: bool,
    /// QAOA levels; 0 is pure ITE-BE from `|+⟩^N`.
    pub p_list: Vec<usize>,
    pub tau_grid: TauGrid,
    pub shots: usize,
    pub repetitions: usize,
    pub mode: SimMode,
    pub seed: u64,
    pub schedule_path: Option<PathBuf>,
    pub out_path: PathBuf,
    /// Corrected blocks over a matching before the generic blocks (p = 0 only).
    pub matching_first: bool,
    pub matching: MatchingStrategy,
    pub max_restarts_per_shot: u64,
    pub interval: IntervalKind,
    /// Emit one row per graph in addition to the ensemble rows.
    pub per_graph: bool,
    /// Read graphs written by `generate` instead of drawing them from `seed`.
    pub graph_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn preset(preset: Preset) -> Self {
        let (graph_count, shots, repetitions, steps) = match preset {
            Preset::Desk => (20, 10_000, 3, 9),
            Preset::Paper => (100, 100_000, 10, 21),
        };
        ExperimentConfig {
            n_list: vec![6, 8, 10, 12],
            graph_count,
            bipartite: false,
            exclude_bipartite: true,
            p_list: vec![0],
            tau_grid: TauGrid {
                min: 0.0,
                max: 2.0,
                steps,
            },
            shots,
            repetitions,
            mode: SimMode::ExactPath,
            seed: 2024,
            schedule_path: None,
            out_path: PathBuf::from("sweep.csv"),
            matching_first: true,
            matching: MatchingStrategy::Greedy,
            max_restarts_per_shot: DEFAULT_MAX_RESTARTS,
            interval: IntervalKind::StandardError,
            per_graph: false,
            graph_dir: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.tau_grid.validate()?;
        if self.n_list.is_empty() || self.p_list.is_empty() {
            return Err(Error::InvalidArgument(
                "need at least one n and one p".into(),
            ));
        }
        if self.graph_count == 0 || self.shots == 0 || self.repetitions == 0 {
            return Err(Error::InvalidArgument(
                "graph count, shots and repetitions must all be >= 1".into(),
            ));
        }
        for &n in &self.n_list {
            let min = if self.bipartite { 6 } else { 4 };
            if n < min || n % 2 == 1 {
                return Err(Error::InvalidArgument(format!(
                    "no {} 3-regular graph on {n} vertices",
                    if self.bipartite {
                        "bipartite"
                    } else {
                        "simple"
                    }
                )));
            }
            if self.mode == SimMode::GateLevel && n > GATE_LEVEL_MAX_N {
                return Err(Error::Capacity {
                    what: "gate-level vertices",
                    value: n,
                    limit: GATE_LEVEL_MAX_N,
                });
            }
        }
        if self.p_list.iter().any(|&p| p > 0) && self.schedule_path.is_none() {
            return Err(Error::Schedule(
                "p > 0 requested without a schedule file".into(),
            ));
        }
        Ok(())
    }
}

/// One ensemble member with its exhaustive solution and cut table.
#[derive(Debug, Clone)]
pub struct Instance {
    pub graph_id: usize,
    pub graph: Graph,
    pub solution: MaxCutSolution,
    pub cuts: Vec<f64>,
    pub connected: bool,
    pub bipartite: bool,
}

impl Instance {
    pub fn new(graph_id: usize, graph: Graph) -> Result<Self> {
        Ok(Instance {
            graph_id,
            solution: brute_force_maxcut(&graph)?,
            cuts: graph.cut_table()?,
            connected: graph.is_connected(),
            bipartite: graph.is_bipartite(),
            graph,
        })
    }
}

/// Name of the random generator for manifests.
pub fn generator_name(bipartite: bool) -> &'static str {
    if bipartite {
        "bipartite 3-regular: union of 3 random perfect matchings between halves, rejection on multi-edges"
    } else {
        "u3R: configuration model with rejection of loops and multi-edges"
    }
}

const MAX_DRAWS_PER_GRAPH: usize = 10_000;

/// Draws the ensemble for one vertex count from its own substream. Earlier
/// members never depend on the requested count.
pub fn draw_graphs(
    seed: u64,
    n: usize,
    count: usize,
    bipartite: bool,
    exclude_bipartite: bool,
) -> Result<Vec<Graph>> {
    let stream_tag = if bipartite {
        tag::BIPARTITE_GRAPH
    } else {
        tag::GRAPH
    };
    let mut rng = substream(seed, &[stream_tag, n as u64]);
    let mut out = Vec::with_capacity(count);
    let mut draws = 0;
    while out.len() < count {
        draws += 1;
        if draws > MAX_DRAWS_PER_GRAPH * count {
            return Err(Error::InvalidArgument(format!(
                "could not draw {count} non-bipartite 3-regular graphs on {n} vertices"
            )));
        }
        let g = if bipartite {
            random_bipartite_3regular(n, &mut rng)?
        } else {
            random_u3r(n, &mut rng)?
        };
        if !bipartite && exclude_bipartite && g.is_bipartite() {
            continue;
        }
        out.push(g);
    }
    Ok(out)
}

/// The ensemble for one vertex count, solved exhaustively.
pub fn ensemble(cfg: &ExperimentConfig, n: usize) -> Result<Vec<Instance>> {
    if let Some(dir) = &cfg.graph_dir {
        return load_ensemble(dir, n, cfg.graph_count);
    }
    draw_graphs(
        cfg.seed,
        n,
        cfg.graph_count,
        cfg.bipartite,
        cfg.exclude_bipartite,
    )?
    .into_par_iter()
    .enumerate()
    .map(|(i, g)| Instance::new(i, g))
    .collect()
}
