//! Gate-level imaginary-time blocks acting on a [`Statevector`].
//!
//! Each block borrows the register's single ancilla: it attaches `|0_a⟩`,
//! runs, and leaves the register data-only again.

use num_complex::Complex64;
use rand::Rng;

use super::params::{BlockFlavor, BlockParams};
use crate::error::{Error, Result};
use crate::sim::Statevector;

/// Minimum `|++⟩` fidelity accepted by the corrected block.
pub const PLUS_PLUS_TOL: f64 = 1e-9;

fn check_flavor(params: &BlockParams, want: BlockFlavor) -> Result<()> {
    if params.flavor != want {
        return Err(Error::Protocol(format!(
            "{want:?} block called with {:?} parameters",
            params.flavor
        )));
    }
    Ok(())
}

fn prepare_ancilla(state: &mut Statevector) -> Result<()> {
    if state.has_ancilla() {
        return Err(Error::State("block expects a data-only register".into()));
    }
    state.attach_ancilla()
}

/// Generic block with a sampled ancilla measurement.
///
/// Returns `true` when the ancilla reads 0, in which case the data register
/// carries `exp(-τK Z_j Z_k)` applied to its input (renormalized). On `false`
/// the shot has failed and the data register holds the rejected branch.
pub fn apply_generic_block<R: Rng + ?Sized>(
    state: &mut Statevector,
    j: usize,
    k: usize,
    params: &BlockParams,
    rng: &mut R,
) -> Result<bool> {
    check_flavor(params, BlockFlavor::Generic)?;
    prepare_ancilla(state)?;
    state.apply_parity_ancilla_rotation(j, k, params.ancilla_angle, params.coupling)?;
    let anc = state.ancilla()?;
    let outcome = state.measure_qubit(anc, rng)?;
    state.reset_and_detach_ancilla()?;
    Ok(outcome.bit == 0)
}

/// Generic block with the ancilla forced onto `|0_a⟩`; returns the success
/// probability of that post-selection.
pub fn postselect_generic_block(
    state: &mut Statevector,
    j: usize,
    k: usize,
    params: &BlockParams,
) -> Result<f64> {
    check_flavor(params, BlockFlavor::Generic)?;
    prepare_ancilla(state)?;
    state.apply_parity_ancilla_rotation(j, k, params.ancilla_angle, params.coupling)?;
    let anc = state.ancilla()?;
    let p = state.postselect_qubit(anc, 0)?;
    state.reset_and_detach_ancilla()?;
    Ok(p)
}

/// Corrected block: block unitary, then `CX(ancilla → j)`, then ancilla reset.
///
/// Deterministic for inputs whose `(j, k)` marginal is `|+⟩|+⟩`; any other
/// input is rejected before the register is touched.
pub fn apply_corrected_block(
    state: &mut Statevector,
    j: usize,
    k: usize,
    params: &BlockParams,
) -> Result<()> {
    check_flavor(params, BlockFlavor::Corrected)?;
    let fid = plus_plus_fidelity(state, j, k)?;
    if fid < 1.0 - PLUS_PLUS_TOL {
        return Err(Error::Protocol(format!(
            "corrected block on ({j}, {k}) needs a |++⟩ input, fidelity is {fid}"
        )));
    }
    prepare_ancilla(state)?;
    state.apply_parity_ancilla_rotation(j, k, params.ancilla_angle, params.coupling)?;
    let anc = state.ancilla()?;
    state.apply_cx(anc, j)?;
    state.reset_and_detach_ancilla()?;
    Ok(())
}

/// `⟨++| ρ_jk |++⟩` for the reduced state of data qubits `j` and `k`.
pub fn plus_plus_fidelity(state: &Statevector, j: usize, k: usize) -> Result<f64> {
    if state.has_ancilla() {
        return Err(Error::State(
            "fidelity check expects a data-only register".into(),
        ));
    }
    let n = state.num_data();
    for q in [j, k] {
        if q >= n {
            return Err(Error::Index { index: q, len: n });
        }
    }
    if j == k {
        return Err(Error::InvalidArgument(format!(
            "need two distinct qubits, got {j} twice"
        )));
    }
    let (bj, bk) = (1usize << j, 1usize << k);
    let amps = state.amplitudes();
    Ok((0..amps.len())
        .filter(|idx| idx & (bj | bk) == 0)
        .map(|rest| {
            let s: Complex64 =
                amps[rest] + amps[rest | bj] + amps[rest | bk] + amps[rest | bj | bk];
            0.25 * s.norm_sqr()
        })
        .sum())
}
