//! Fixed-angle QAOA state preparation and cost expectation.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::sim::Statevector;

/// Angle convention applied by [`prepare_qaoa_state`]; stored in schedule file headers.
pub const CONVENTION: &str =
    "layer l applies exp(-i*gamma_l*H_C) with H_C = -sum_jk (w_jk/2)(1 - Z_j Z_k), \
then exp(-i*beta_l*X_j) on every qubit (Rx(2*beta_l)); effective angles are \
gamma_l = gamma_scale * gammas[l] and beta_l = beta_sign * betas[l], in radians";

fn one() -> f64 {
    1.0
}

/// Angles for a `p`-level QAOA circuit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaoaSchedule {
    pub p: usize,
    pub betas: Vec<f64>,
    pub gammas: Vec<f64>,
    /// ±1; flips β to match tables written for the opposite mixer sign.
    #[serde(default = "one")]
    pub beta_sign: f64,
    /// Multiplies γ to match tables written for a rescaled cost operator.
    #[serde(default = "one")]
    pub gamma_scale: f64,
    #[serde(default)]
    pub source: String,
}

impl QaoaSchedule {
    /// `p = 0`: no layers, the prepared state is `|+⟩^N`.
    pub fn empty() -> Self {
        QaoaSchedule {
            p: 0,
            betas: Vec::new(),
            gammas: Vec::new(),
            beta_sign: 1.0,
            gamma_scale: 1.0,
            source: "p = 0 (no QAOA layers)".into(),
        }
    }

    pub fn new(betas: Vec<f64>, gammas: Vec<f64>, source: impl Into<String>) -> Result<Self> {
        let s = QaoaSchedule {
            p: betas.len(),
            betas,
            gammas,
            beta_sign: 1.0,
            gamma_scale: 1.0,
            source: source.into(),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.betas.len() != self.p || self.gammas.len() != self.p {
            return Err(Error::Schedule(format!(
                "p = {} but {} betas and {} gammas",
                self.p,
                self.betas.len(),
                self.gammas.len()
            )));
        }
        if self.beta_sign != 1.0 && self.beta_sign != -1.0 {
            return Err(Error::Schedule(format!(
                "beta_sign must be ±1, got {}",
                self.beta_sign
            )));
        }
        if !self.gamma_scale.is_finite() || self.gamma_scale == 0.0 {
            return Err(Error::Schedule(format!(
                "invalid gamma_scale {}",
                self.gamma_scale
            )));
        }
        if self
            .betas
            .iter()
            .chain(&self.gammas)
            .any(|a| !a.is_finite())
        {
            return Err(Error::Schedule(format!(
                "non-finite angle in the p = {} schedule",
                self.p
            )));
        }
        Ok(())
    }

    /// `(γ_l, β_l)` per layer after applying the convention flags.
    pub fn layers(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.gammas
            .iter()
            .zip(&self.betas)
            .map(|(g, b)| (self.gamma_scale * g, self.beta_sign * b))
    }
}

/// `e^{-iβ_p H_B} e^{-iγ_p H_C} ⋯ e^{-iβ_1 H_B} e^{-iγ_1 H_C} |+⟩^N`.
pub fn prepare_qaoa_state(g: &Graph, schedule: &QaoaSchedule) -> Result<Statevector> {
    schedule.validate()?;
    let mut state = Statevector::init_plus(g.n())?;
    for (gamma, beta) in schedule.layers() {
        state.apply_cost_phase(g, gamma)?;
        for q in 0..g.n() {
            state.apply_rx(q, 2.0 * beta)?;
        }
    }
    Ok(state)
}

/// `⟨ψ|H_C|ψ⟩ = Σ_z |ψ(z)|² E(z)` from the amplitudes.
pub fn expectation_hc(state: &Statevector, g: &Graph) -> Result<f64> {
    if state.has_ancilla() {
        return Err(Error::State(
            "expectation needs a data-only register".into(),
        ));
    }
    if state.num_data() != g.n() {
        return Err(Error::InvalidArgument(format!(
            "graph on {} vertices for {} data qubits",
            g.n(),
            state.num_data()
        )));
    }
    Ok(state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(z, a)| -a.norm_sqr() * g.cut_bits(z as u64))
        .sum())
}

#[derive(Debug, Serialize, Deserialize)]
struct ScheduleDocument {
    #[serde(default)]
    convention: String,
    schedules: Vec<QaoaSchedule>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ScheduleFile {
    Document(ScheduleDocument),
    Bare(Vec<QaoaSchedule>),
}

/// Every schedule in a file. Accepts either a bare array of records or an
/// object `{"convention": ..., "schedules": [...]}`.
pub fn load_schedules(path: &Path) -> Result<Vec<QaoaSchedule>> {
    let text = fs::read_to_string(path)?;
    let parsed: ScheduleFile = serde_json::from_str(&text)
        .map_err(|e| Error::Schedule(format!("{}: {e}", path.display())))?;
    let schedules = match parsed {
        ScheduleFile::Document(d) => d.schedules,
        ScheduleFile::Bare(v) => v,
    };
    for (i, s) in schedules.iter().enumerate() {
        s.validate()?;
        if schedules[..i].iter().any(|o| o.p == s.p) {
            return Err(Error::Schedule(format!("duplicate entry for p = {}", s.p)));
        }
    }
    Ok(schedules)
}

/// The schedule for level `p`; `p = 0` is always available.
pub fn load_schedule(path: &Path, p: usize) -> Result<QaoaSchedule> {
    if p == 0 {
        return Ok(QaoaSchedule::empty());
    }
    load_schedules(path)?
        .into_iter()
        .find(|s| s.p == p)
        .ok_or_else(|| Error::Schedule(format!("{} has no entry for p = {p}", path.display())))
}

pub fn save_schedules(path: &Path, schedules: &[QaoaSchedule]) -> Result<()> {
    for s in schedules {
        s.validate()?;
    }
    let doc = ScheduleDocument {
        convention: CONVENTION.into(),
        schedules: schedules.to_vec(),
    };
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}
