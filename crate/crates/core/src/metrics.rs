//! Approximation ratio, optimum probability, 3σ intervals and ensemble
//! aggregation with the all-shots-discarded exclusion rule.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{cut_value, Assignment, Graph, MaxCutSolution};

/// Mean cut value of the samples divided by `c_max`.
pub fn approximation_ratio(samples: &[Assignment], g: &Graph, c_max: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument(
            "approximation ratio of an empty sample".into(),
        ));
    }
    if c_max <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "c_max must be positive, got {c_max}"
        )));
    }
    let total = samples
        .iter()
        .map(|a| cut_value(g, a))
        .sum::<Result<f64>>()?;
    Ok(total / samples.len() as f64 / c_max)
}

/// Fraction of samples that are exact optima, `N_opt / N_tot`.
pub fn probability_optimal(samples: &[Assignment], optima: &[Assignment]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument(
            "optimum probability of an empty sample".into(),
        ));
    }
    let set: HashSet<&Assignment> = optima.iter().collect();
    let hits = samples.iter().filter(|a| set.contains(a)).count();
    Ok(hits as f64 / samples.len() as f64)
}

/// Both metrics for an exact distribution over basis states.
///
/// `probs[z]` is the probability of basis index `z`; `cuts[z]` its cut value.
pub fn distribution_metrics(
    probs: &[f64],
    cuts: &[f64],
    solution: &MaxCutSolution,
) -> Result<(f64, f64)> {
    if probs.len() != cuts.len() {
        return Err(Error::InvalidArgument(format!(
            "{} probabilities for {} cut values",
            probs.len(),
            cuts.len()
        )));
    }
    if solution.c_max <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "c_max must be positive, got {}",
            solution.c_max
        )));
    }
    let total: f64 = probs.iter().sum();
    let mean_cut: f64 = probs.iter().zip(cuts).map(|(p, c)| p * c).sum::<f64>() / total;
    let popt: f64 = solution
        .optima
        .iter()
        .map(|a| probs[a.bits() as usize])
        .sum::<f64>()
        / total;
    Ok((mean_cut / solution.c_max, popt))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalKind {
    /// mean ± 3·σ/√n (standard error of the mean).
    #[default]
    StandardError,
    /// mean ± 3·σ.
    PopulationSigma,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub mean: f64,
    pub hi: f64,
}

impl Interval {
    pub fn point(x: f64) -> Self {
        Interval {
            lo: x,
            mean: x,
            hi: x,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// `(mean - 3s, mean, mean + 3s)` with `s` the standard error or the
/// population standard deviation (both with the `1/n` variance), clipped to
/// `clip` when given.
pub fn three_sigma_interval(
    values: &[f64],
    kind: IntervalKind,
    clip: Option<(f64, f64)>,
) -> Result<Interval> {
    if values.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "an interval needs at least 2 values, got {}",
            values.len()
        )));
    }
    Ok(interval_unchecked(values, kind, clip))
}

fn interval_unchecked(values: &[f64], kind: IntervalKind, clip: Option<(f64, f64)>) -> Interval {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let spread = match kind {
        IntervalKind::StandardError => 3.0 * (var / n).sqrt(),
        IntervalKind::PopulationSigma => 3.0 * var.sqrt(),
    };
    let (mut lo, mut hi) = (mean - spread, mean + spread);
    if let Some((a, b)) = clip {
        lo = lo.max(a);
        hi = hi.min(b);
    }
    Interval { lo, mean, hi }
}

/// Outcome of one repetition of one protocol run on one graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub graph_id: usize,
    pub repetition: usize,
    pub r: f64,
    pub popt: f64,
    pub success_rate: f64,
    pub shots_kept: u64,
    /// Every shot of this repetition was discarded.
    pub overall_failure: bool,
    pub connected: bool,
    pub bipartite: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricIntervals {
    pub r: Interval,
    pub popt: Interval,
    pub success: Interval,
}

/// Aggregate for one `(n, p, τ)` cell, either over a whole ensemble
/// (`graph_id = None`) or over the repetitions of a single graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub n: usize,
    pub graph_id: Option<usize>,
    pub p: usize,
    pub tau: f64,
    pub shots_kept: u64,
    /// `None` when everything in the cell was excluded.
    pub metrics: Option<MetricIntervals>,
    pub repetitions: usize,
    pub excluded: bool,
    pub excluded_count: usize,
    pub connected: bool,
    pub bipartite: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellKey {
    pub n: usize,
    pub p: usize,
    pub tau: f64,
}

fn metric_intervals(records: &[&RunRecord], kind: IntervalKind) -> MetricIntervals {
    let unit = Some((0.0, 1.0));
    let col = |f: fn(&RunRecord) -> f64| -> Vec<f64> { records.iter().map(|r| f(r)).collect() };
    let iv = |v: Vec<f64>| {
        if v.len() == 1 {
            Interval::point(v[0])
        } else {
            interval_unchecked(&v, kind, unit)
        }
    };
    MetricIntervals {
        r: iv(col(|r| r.r)),
        popt: iv(col(|r| r.popt)),
        success: iv(col(|r| r.success_rate)),
    }
}

fn by_graph(records: &[RunRecord]) -> BTreeMap<usize, Vec<&RunRecord>> {
    let mut out: BTreeMap<usize, Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        out.entry(r.graph_id).or_default().push(r);
    }
    for v in out.values_mut() {
        v.sort_by_key(|r| r.repetition);
    }
    out
}

/// Ensemble aggregate for one cell: graphs with any overall failure among
/// their repetitions are dropped, and the intervals run over the remaining
/// (graph × repetition) values.
pub fn aggregate_ensemble(key: CellKey, records: &[RunRecord], kind: IntervalKind) -> RunStats {
    let graphs = by_graph(records);
    let (kept, dropped): (Vec<_>, Vec<_>) = graphs
        .values()
        .partition(|reps| !reps.iter().any(|r| r.overall_failure));
    let flat: Vec<&RunRecord> = kept.iter().flat_map(|reps| reps.iter().copied()).collect();
    let repetitions = graphs.values().map(Vec::len).max().unwrap_or(0);
    RunStats {
        n: key.n,
        graph_id: None,
        p: key.p,
        tau: key.tau,
        shots_kept: flat.iter().map(|r| r.shots_kept).sum(),
        metrics: (!flat.is_empty()).then(|| metric_intervals(&flat, kind)),
        repetitions,
        excluded: flat.is_empty(),
        excluded_count: dropped.len(),
        connected: records.iter().all(|r| r.connected),
        bipartite: !records.is_empty() && records.iter().all(|r| r.bipartite),
    }
}

/// Per-graph rows for one cell, sorted by graph id.
pub fn per_graph_stats(key: CellKey, records: &[RunRecord], kind: IntervalKind) -> Vec<RunStats> {
    by_graph(records)
        .into_iter()
        .map(|(graph_id, reps)| {
            let excluded = reps.iter().any(|r| r.overall_failure);
            RunStats {
                n: key.n,
                graph_id: Some(graph_id),
                p: key.p,
                tau: key.tau,
                shots_kept: reps.iter().map(|r| r.shots_kept).sum(),
                metrics: (!excluded).then(|| metric_intervals(&reps, kind)),
                repetitions: reps.len(),
                excluded,
                excluded_count: usize::from(excluded),
                connected: reps[0].connected,
                bipartite: reps[0].bipartite,
            }
        })
        .collect()
}
