//! Closed-form effect of a sequence of post-selected blocks.
//!
//! Every block is diagonal on the data register, so the post-selected
//! composite multiplies the amplitude of `|z⟩` by `Π_e f_e(z)` with
//! `f_e(z) = e^{-τ w_e}` when edge `e` is uncut and `1` when it is cut
//! (up to normalization). Over all edges that is `e^{-τ(W_tot - C(z))}`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};
use crate::sim::Statevector;

fn check(state: &Statevector, g: &Graph, tau: f64) -> Result<()> {
    if state.has_ancilla() {
        return Err(Error::State(
            "exact path expects a data-only register".into(),
        ));
    }
    if state.num_data() != g.n() {
        return Err(Error::InvalidArgument(format!(
            "graph on {} vertices applied to {} data qubits",
            g.n(),
            state.num_data()
        )));
    }
    if !tau.is_finite() || tau < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "imaginary time must be finite and >= 0, got {tau}"
        )));
    }
    Ok(())
}

/// Multiplies by `Π_e f_e(z)` and renormalizes; returns the pre-normalization
/// norm², which is the probability that every block in `edges` post-selects.
fn tilt(state: &mut Statevector, edges: &[Edge], tau: f64) -> Result<f64> {
    if edges.is_empty() || tau == 0.0 {
        return Ok(1.0);
    }
    // log of the amplitude factor, -τ Σ_{uncut} w; amplitudes are rescaled so
    // the largest tilted one has modulus 1, which keeps the post-selected
    // state defined even when the success probability itself underflows
    let exponents: Vec<f64> = (0..state.amplitudes().len() as u64)
        .map(|z| {
            -tau * edges
                .iter()
                .filter(|e| !e.is_cut(z))
                .map(|e| e.w)
                .sum::<f64>()
        })
        .collect();
    let shift = state
        .amplitudes()
        .iter()
        .zip(&exponents)
        .filter(|(a, _)| a.norm_sqr() > 0.0)
        .map(|(a, x)| a.norm().ln() + x)
        .fold(f64::NEG_INFINITY, f64::max);
    if shift == f64::NEG_INFINITY {
        return Err(Error::Numerical("tilt of the zero vector".into()));
    }
    for (a, x) in state.amplitudes_mut().iter_mut().zip(&exponents) {
        if a.norm_sqr() > 0.0 {
            *a = Complex64::from_polar((a.norm().ln() + x - shift).exp(), a.arg());
        }
    }
    Ok(state.renormalize()? * (2.0 * shift).exp())
}

/// All-generic protocol: every edge through a post-selected block.
///
/// Returns the overall success probability
/// `Σ_z |ψ(z)|² e^{-2τ(W_tot - C(z))}`.
pub fn apply_ite_exact(state: &mut Statevector, g: &Graph, tau: f64) -> Result<f64> {
    check(state, g, tau)?;
    tilt(state, g.edges(), tau)
}

/// Matching-first protocol: the `deterministic` edges (a matching, applied by
/// corrected blocks) are folded in with probability 1; the returned success
/// probability covers only the remaining, post-selected edges.
pub fn apply_ite_exact_matching_first(
    state: &mut Statevector,
    g: &Graph,
    tau: f64,
    deterministic: &[Edge],
) -> Result<f64> {
    check(state, g, tau)?;
    let rest = remaining_edges(g, deterministic)?;
    tilt(state, deterministic, tau)?;
    tilt(state, &rest, tau)
}

/// Edges of `g` not in `subset`, canonical order. Every `subset` edge must
/// belong to `g`.
pub fn remaining_edges(g: &Graph, subset: &[Edge]) -> Result<Vec<Edge>> {
    for e in subset {
        if !g.edges().iter().any(|x| (x.j, x.k) == (e.j, e.k)) {
            return Err(Error::InvalidArgument(format!(
                "edge ({}, {}) is not in the graph",
                e.j, e.k
            )));
        }
    }
    Ok(g.edges()
        .iter()
        .filter(|e| !subset.iter().any(|m| (m.j, m.k) == (e.j, e.k)))
        .copied()
        .collect())
}
