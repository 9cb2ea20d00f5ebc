//! End-to-end shot loops for pure ITE-BE and QAOA+ITE-BE.

use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::blocks::{apply_corrected_block, apply_generic_block};
use super::exact::{apply_ite_exact_matching_first, remaining_edges};
use super::params::{corrected_block_params, generic_block_params};
use crate::error::{Error, Result};
use crate::graph::{Assignment, Edge, Graph, MatchingStrategy};
use crate::qaoa::{prepare_qaoa_state, QaoaSchedule};
use crate::rng::StreamRng;
use crate::sim::Statevector;

pub const DEFAULT_MAX_RESTARTS: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SimMode {
    /// Block-by-block simulation with sampled ancilla measurements.
    GateLevel,
    /// Closed-form tilt; shots drawn from the post-selected distribution.
    #[default]
    ExactPath,
}

impl SimMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SimMode::GateLevel => "gate_level",
            SimMode::ExactPath => "exact_path",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolConfig {
    pub mode: SimMode,
    pub shots: usize,
    /// A shot that fails post-selection more often than this is abandoned.
    pub max_restarts_per_shot: u64,
    /// Apply a matching with corrected blocks before the generic blocks.
    pub matching_first: bool,
    pub matching: MatchingStrategy,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        ProtocolConfig {
            mode: SimMode::ExactPath,
            shots: 1,
            max_restarts_per_shot: DEFAULT_MAX_RESTARTS,
            matching_first: true,
            matching: MatchingStrategy::Greedy,
        }
    }
}

impl ProtocolConfig {
    fn validate(&self) -> Result<()> {
        if self.shots == 0 {
            return Err(Error::InvalidArgument("shots must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShotResult {
    /// Measured data register; `None` when the restart budget ran out.
    pub assignment: Option<Assignment>,
    /// Failed attempts before the kept one (or all attempts, if none was kept).
    pub restarts: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolRun {
    pub shots: Vec<ShotResult>,
    /// Gate level: kept shots / attempts. Exact path: analytic probability
    /// that one attempt post-selects every generic block.
    pub success_rate: f64,
}

impl ProtocolRun {
    pub fn kept(&self) -> impl Iterator<Item = Assignment> + '_ {
        self.shots.iter().filter_map(|s| s.assignment)
    }

    pub fn kept_count(&self) -> usize {
        self.shots.iter().filter(|s| s.assignment.is_some()).count()
    }

    pub fn total_restarts(&self) -> u64 {
        self.shots.iter().map(|s| s.restarts).sum()
    }

    /// Every shot was discarded.
    pub fn is_overall_failure(&self) -> bool {
        self.kept_count() == 0
    }
}

fn check_plus_input(init: &Statevector) -> Result<()> {
    let plus = Statevector::init_plus(init.num_data())?;
    let fid = init.fidelity(&plus)?;
    if fid < 1.0 - 1e-9 {
        return Err(Error::Protocol(format!(
            "matching-first needs a |+⟩^N input, fidelity is {fid}"
        )));
    }
    Ok(())
}

/// Splits the edges into (corrected, generic) lists for the configuration.
fn edge_split(g: &Graph, cfg: &ProtocolConfig) -> Result<(Vec<Edge>, Vec<Edge>)> {
    if cfg.matching_first {
        let matching = cfg.matching.matching(g)?;
        let rest = remaining_edges(g, &matching)?;
        Ok((matching, rest))
    } else {
        Ok((Vec::new(), g.edges().to_vec()))
    }
}

/// Post-selected state and generic-stage success probability, in closed form.
pub fn ite_exact_state(
    g: &Graph,
    tau: f64,
    init: &Statevector,
    matching_first: bool,
    matching: MatchingStrategy,
) -> Result<(Statevector, f64)> {
    let cfg = ProtocolConfig {
        matching_first,
        matching,
        ..ProtocolConfig::default()
    };
    if matching_first {
        check_plus_input(init)?;
    }
    let (corrected, _) = edge_split(g, &cfg)?;
    let mut state = init.clone();
    let p = apply_ite_exact_matching_first(&mut state, g, tau, &corrected)?;
    Ok((state, p))
}

/// Pure ITE-BE from `init`.
///
/// Gate level: for each shot, corrected blocks over the matching (when
/// enabled), then generic blocks over the remaining edges in canonical order;
/// any ancilla reading 1 restarts the shot from `init`. After every block has
/// passed, the data register is measured.
pub fn run_itebe<R: Rng + ?Sized>(
    g: &Graph,
    tau: f64,
    init: &Statevector,
    cfg: &ProtocolConfig,
    rng: &mut R,
) -> Result<ProtocolRun> {
    cfg.validate()?;
    if init.num_data() != g.n() || init.has_ancilla() {
        return Err(Error::InvalidArgument(format!(
            "initial state on {} data qubits for a graph on {} vertices",
            init.num_data(),
            g.n()
        )));
    }
    if !tau.is_finite() || tau < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "imaginary time must be finite and >= 0, got {tau}"
        )));
    }
    if cfg.matching_first {
        check_plus_input(init)?;
    }
    match cfg.mode {
        SimMode::GateLevel => run_gate_level(g, tau, init, cfg, rng),
        SimMode::ExactPath => run_exact_path(g, tau, init, cfg, rng),
    }
}

/// QAOA state preparation followed by all-generic ITE-BE.
pub fn run_qaoa_itebe<R: Rng + ?Sized>(
    g: &Graph,
    schedule: &QaoaSchedule,
    tau: f64,
    cfg: &ProtocolConfig,
    rng: &mut R,
) -> Result<ProtocolRun> {
    let init = prepare_qaoa_state(g, schedule)?;
    let cfg = ProtocolConfig {
        matching_first: false,
        ..cfg.clone()
    };
    run_itebe(g, tau, &init, &cfg, rng)
}

fn run_gate_level<R: Rng + ?Sized>(
    g: &Graph,
    tau: f64,
    init: &Statevector,
    cfg: &ProtocolConfig,
    rng: &mut R,
) -> Result<ProtocolRun> {
    let (corrected, generic) = edge_split(g, cfg)?;
    // The corrected stage never fails and its output is the same on every
    // attempt, so it is run once and reused by every restart.
    let mut prepared = init.clone();
    for e in &corrected {
        apply_corrected_block(
            &mut prepared,
            e.j,
            e.k,
            &corrected_block_params(tau, 0.5 * e.w)?,
        )?;
    }
    let params = generic
        .iter()
        .map(|e| generic_block_params(tau, e.w))
        .collect::<Result<Vec<_>>>()?;

    // one independent stream per shot, so results do not depend on the pool size
    let seeds: Vec<u64> = (0..cfg.shots).map(|_| rng.random()).collect();
    let shots = seeds
        .into_par_iter()
        .map(|seed| {
            let mut shot_rng = StreamRng::seed_from_u64(seed);
            let mut restarts = 0u64;
            loop {
                let mut state = prepared.clone();
                let mut passed = true;
                for (e, p) in generic.iter().zip(&params) {
                    if !apply_generic_block(&mut state, e.j, e.k, p, &mut shot_rng)? {
                        passed = false;
                        break;
                    }
                }
                if passed {
                    let z = state.sample_bitstrings(&mut shot_rng, 1)?[0];
                    return Ok(ShotResult {
                        assignment: Some(z),
                        restarts,
                    });
                }
                restarts += 1;
                if restarts > cfg.max_restarts_per_shot {
                    return Ok(ShotResult {
                        assignment: None,
                        restarts,
                    });
                }
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let kept = shots.iter().filter(|s| s.assignment.is_some()).count() as f64;
    let attempts = kept + shots.iter().map(|s| s.restarts as f64).sum::<f64>();
    Ok(ProtocolRun {
        shots,
        success_rate: kept / attempts,
    })
}

fn run_exact_path<R: Rng + ?Sized>(
    g: &Graph,
    tau: f64,
    init: &Statevector,
    cfg: &ProtocolConfig,
    rng: &mut R,
) -> Result<ProtocolRun> {
    let (state, success) = ite_exact_state(g, tau, init, cfg.matching_first, cfg.matching)?;
    // failures before the first success follow a geometric law
    let restarts: Vec<u64> = if success >= 1.0 {
        vec![0; cfg.shots]
    } else if success <= 0.0 {
        vec![cfg.max_restarts_per_shot + 1; cfg.shots]
    } else {
        // inverse transform of the failures-before-success geometric law,
        // stable for success probabilities far below machine epsilon
        let log_fail = (-success).ln_1p();
        let cap = cfg.max_restarts_per_shot + 1;
        (0..cfg.shots)
            .map(|_| {
                let u: f64 = 1.0 - rng.random::<f64>();
                let r = (u.ln() / log_fail).floor();
                if r >= cap as f64 {
                    cap
                } else {
                    r as u64
                }
            })
            .collect()
    };
    let kept = restarts
        .iter()
        .filter(|&&r| r <= cfg.max_restarts_per_shot)
        .count();
    let mut samples = if kept > 0 {
        state.sample_bitstrings(rng, kept)?.into_iter()
    } else {
        Vec::new().into_iter()
    };
    let shots = restarts
        .into_iter()
        .map(|r| {
            if r <= cfg.max_restarts_per_shot {
                ShotResult {
                    assignment: samples.next(),
                    restarts: r,
                }
            } else {
                ShotResult {
                    assignment: None,
                    restarts: cfg.max_restarts_per_shot + 1,
                }
            }
        })
        .collect();
    Ok(ProtocolRun {
        shots,
        success_rate: success,
    })
}
