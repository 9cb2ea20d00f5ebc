use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use super::{ensemble, ExperimentConfig, Instance};
use crate::error::Result;
use crate::graph::Assignment;
use crate::itebe::{ite_exact_state, run_itebe, ProtocolConfig, SimMode};
use crate::metrics::{
    aggregate_ensemble, approximation_ratio, distribution_metrics, per_graph_stats,
    probability_optimal, CellKey, RunRecord, RunStats,
};
use crate::qaoa::{load_schedule, prepare_qaoa_state, QaoaSchedule};
use crate::rng::{substream, tag};
use crate::sim::Statevector;

pub const CSV_COLUMNS: [&str; 18] = [
    "n",
    "graph_id",
    "p",
    "tau",
    "mode",
    "shots_kept",
    "r_mean",
    "r_lo",
    "r_hi",
    "popt_mean",
    "popt_lo",
    "popt_hi",
    "success_rate",
    "success_lo",
    "success_hi",
    "excluded_count",
    "bipartite",
    "seed",
];

#[derive(Serialize)]
struct CsvRow<'a> {
    n: usize,
    graph_id: String,
    p: usize,
    tau: f64,
    mode: &'a str,
    shots_kept: u64,
    r_mean: Option<f64>,
    r_lo: Option<f64>,
    r_hi: Option<f64>,
    popt_mean: Option<f64>,
    popt_lo: Option<f64>,
    popt_hi: Option<f64>,
    success_rate: Option<f64>,
    success_lo: Option<f64>,
    success_hi: Option<f64>,
    excluded_count: usize,
    bipartite: bool,
    seed: u64,
}

/// One protocol evaluation before repetitions are expanded.
struct Outcome {
    r: f64,
    popt: f64,
    success_rate: f64,
    shots_kept: u64,
}

impl Outcome {
    fn record(&self, inst: &Instance, repetition: usize) -> RunRecord {
        RunRecord {
            graph_id: inst.graph_id,
            repetition,
            r: self.r,
            popt: self.popt,
            success_rate: self.success_rate,
            shots_kept: self.shots_kept,
            overall_failure: self.shots_kept == 0,
            connected: inst.connected,
            bipartite: inst.bipartite,
        }
    }
}

fn protocol_config(cfg: &ExperimentConfig, p: usize) -> ProtocolConfig {
    ProtocolConfig {
        mode: cfg.mode,
        shots: cfg.shots,
        max_restarts_per_shot: cfg.max_restarts_per_shot,
        matching_first: cfg.matching_first && p == 0,
        matching: cfg.matching,
    }
}

/// Exact path: metrics of the post-selected distribution itself (the
/// infinite-shot limit) and the expected number of kept shots, rounded.
fn exact_outcome(
    inst: &Instance,
    init: &Statevector,
    tau: f64,
    pc: &ProtocolConfig,
) -> Result<Outcome> {
    let (state, success) = ite_exact_state(&inst.graph, tau, init, pc.matching_first, pc.matching)?;
    let (r, popt) = distribution_metrics(&state.data_probabilities(), &inst.cuts, &inst.solution)?;
    // probability that a shot exhausts its restart budget
    let abandon = ((pc.max_restarts_per_shot + 1) as f64 * (-success).ln_1p()).exp();
    Ok(Outcome {
        r,
        popt,
        success_rate: success,
        shots_kept: (pc.shots as f64 * (1.0 - abandon)).round() as u64,
    })
}

fn gate_outcome(
    inst: &Instance,
    init: &Statevector,
    tau: f64,
    pc: &ProtocolConfig,
    key: &[u64],
    seed: u64,
) -> Result<Outcome> {
    let mut rng = substream(seed, key);
    let run = run_itebe(&inst.graph, tau, init, pc, &mut rng)?;
    let samples: Vec<Assignment> = run.kept().collect();
    let (r, popt) = if samples.is_empty() {
        (0.0, 0.0)
    } else {
        (
            approximation_ratio(&samples, &inst.graph, inst.solution.c_max)?,
            probability_optimal(&samples, &inst.solution.optima)?,
        )
    };
    Ok(Outcome {
        r,
        popt,
        success_rate: run.success_rate,
        shots_kept: samples.len() as u64,
    })
}

fn initial_state(inst: &Instance, schedule: &QaoaSchedule) -> Result<Statevector> {
    if schedule.p == 0 {
        Statevector::init_plus(inst.graph.n())
    } else {
        prepare_qaoa_state(&inst.graph, schedule)
    }
}

/// Records for every `(τ, graph, repetition)` at one `(n, p)`, grouped by τ index.
fn sweep_cell_records(
    cfg: &ExperimentConfig,
    instances: &[Instance],
    p: usize,
    schedule: &QaoaSchedule,
    taus: &[f64],
) -> Result<Vec<Vec<RunRecord>>> {
    let pc = protocol_config(cfg, p);
    let inits: Vec<Statevector> = instances
        .par_iter()
        .map(|inst| initial_state(inst, schedule))
        .collect::<Result<_>>()?;
    let items: Vec<(usize, usize)> = (0..taus.len())
        .flat_map(|t| (0..instances.len()).map(move |i| (t, i)))
        .collect();
    let per_item: Vec<Vec<RunRecord>> = items
        .par_iter()
        .map(|&(t, i)| {
            let inst = &instances[i];
            let n = inst.graph.n() as u64;
            match cfg.mode {
                SimMode::ExactPath => {
                    let out = exact_outcome(inst, &inits[i], taus[t], &pc)?;
                    Ok((0..cfg.repetitions)
                        .map(|rep| out.record(inst, rep))
                        .collect())
                }
                SimMode::GateLevel => (0..cfg.repetitions)
                    .map(|rep| {
                        let key = [
                            tag::RUN,
                            n,
                            inst.graph_id as u64,
                            rep as u64,
                            t as u64,
                            p as u64,
                        ];
                        Ok(gate_outcome(inst, &inits[i], taus[t], &pc, &key, cfg.seed)?
                            .record(inst, rep))
                    })
                    .collect(),
            }
        })
        .collect::<Result<_>>()?;
    let mut by_tau: Vec<Vec<RunRecord>> = vec![Vec::new(); taus.len()];
    for (&(t, _), recs) in items.iter().zip(per_item) {
        by_tau[t].extend(recs);
    }
    Ok(by_tau)
}

/// Runs the whole grid. Rows come out sorted by `(n, p, τ)`; within a cell
/// the ensemble row precedes the per-graph rows (if requested).
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<RunStats>> {
    cfg.validate()?;
    let taus = cfg.tau_grid.values();
    let mut schedules = BTreeMap::new();
    for &p in &cfg.p_list {
        let schedule = match &cfg.schedule_path {
            Some(path) => load_schedule(path, p)?,
            None => QaoaSchedule::empty(),
        };
        schedules.insert(p, schedule);
    }
    let mut rows = Vec::new();
    for &n in &cfg.n_list {
        let instances = ensemble(cfg, n)?;
        for &p in &cfg.p_list {
            let by_tau = sweep_cell_records(cfg, &instances, p, &schedules[&p], &taus)?;
            for (tau, records) in taus.iter().zip(by_tau) {
                let key = CellKey { n, p, tau: *tau };
                rows.push(aggregate_ensemble(key, &records, cfg.interval));
                if cfg.per_graph {
                    rows.extend(per_graph_stats(key, &records, cfg.interval));
                }
            }
        }
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(out: W, rows: &[RunStats], mode: SimMode, seed: u64) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for s in rows {
        let m = s.metrics;
        w.serialize(CsvRow {
            n: s.n,
            graph_id: s
                .graph_id
                .map_or_else(|| "all".to_string(), |g| g.to_string()),
            p: s.p,
            tau: s.tau,
            mode: mode.as_str(),
            shots_kept: s.shots_kept,
            r_mean: m.map(|m| m.r.mean),
            r_lo: m.map(|m| m.r.lo),
            r_hi: m.map(|m| m.r.hi),
            popt_mean: m.map(|m| m.popt.mean),
            popt_lo: m.map(|m| m.popt.lo),
            popt_hi: m.map(|m| m.popt.hi),
            success_rate: m.map(|m| m.success.mean),
            success_lo: m.map(|m| m.success.lo),
            success_hi: m.map(|m| m.success.hi),
            excluded_count: s.excluded_count,
            bipartite: s.bipartite,
            seed,
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Runs the sweep and writes the CSV to `cfg.out_path`.
pub fn cmd_sweep(cfg: &ExperimentConfig) -> Result<Vec<RunStats>> {
    let rows = run_sweep(cfg)?;
    for s in rows
        .iter()
        .filter(|s| s.graph_id.is_none() && s.excluded_count > 0)
    {
        eprintln!(
            "warning: n = {}, p = {}, tau = {}: {} graph(s) excluded after exhausting the restart budget",
            s.n, s.p, s.tau, s.excluded_count
        );
    }
    write_csv(
        std::fs::File::create(Path::new(&cfg.out_path))?,
        &rows,
        cfg.mode,
        cfg.seed,
    )?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::{Preset, TauGrid};

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            n_list: vec![6],
            graph_count: 3,
            tau_grid: TauGrid::new(0.0, 1.0, 3).unwrap(),
            shots: 200,
            repetitions: 2,
            ..ExperimentConfig::preset(Preset::Desk)
        }
    }

    #[test]
    fn header_matches_column_list() {
        let mut buf = Vec::new();
        let rows = run_sweep(&small()).unwrap();
        write_csv(&mut buf, &rows, SimMode::ExactPath, 1).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), CSV_COLUMNS.join(","));
        assert_eq!(text.lines().count(), 1 + 3);
    }

    #[test]
    fn zero_time_ratio_is_half_the_edges_over_cmax() {
        let cfg = ExperimentConfig {
            tau_grid: TauGrid::single(0.0),
            ..small()
        };
        let rows = run_sweep(&cfg).unwrap();
        let want: f64 = ensemble(&cfg, 6)
            .unwrap()
            .iter()
            .map(|i| i.graph.total_weight() / (2.0 * i.solution.c_max))
            .sum::<f64>()
            / 3.0;
        assert!((rows[0].metrics.unwrap().r.mean - want).abs() < 1e-12);
    }

    #[test]
    fn per_graph_rows_and_gate_level_run() {
        let cfg = ExperimentConfig {
            per_graph: true,
            mode: SimMode::GateLevel,
            ..small()
        };
        let rows = run_sweep(&cfg).unwrap();
        assert_eq!(rows.len(), 3 * 4);
        assert_eq!(rows[1].graph_id, Some(0));
        assert_eq!(run_sweep(&cfg).unwrap(), rows);
    }
}
