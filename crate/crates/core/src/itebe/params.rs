use std::f64::consts::FRAC_PI_4;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockFlavor {
    /// Post-selected block; works on any input state.
    Generic,
    /// Deterministic block for `|+⟩|+⟩` inputs, fixed up by a controlled-X.
    Corrected,
}

/// Analytic parameters of one imaginary-time block implementing
/// `exp(-τK Z_j Z_k)` through `exp(-i(c X_a + W Z_j Z_k X_a))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockParams {
    pub flavor: BlockFlavor,
    /// Ancilla–data coupling `W`.
    pub coupling: f64,
    /// Bare ancilla rotation `c`.
    pub ancilla_angle: f64,
    /// `sign(K)`, +1 when `K = 0`.
    pub sign: f64,
    /// Normalization `𝒩`; diagnostic only, post-selection renormalizes.
    pub normalization: f64,
    pub tau_k: f64,
}

fn check_finite(tau: f64, k: f64) -> Result<()> {
    if !tau.is_finite() || !k.is_finite() || !(tau * k).is_finite() {
        return Err(Error::InvalidArgument(format!(
            "block parameters need finite inputs, got tau = {tau}, K = {k}"
        )));
    }
    Ok(())
}

impl BlockParams {
    /// `W = ½ arccos(e^{-2|τK|})`, `c = sW`, `𝒩 = e^{|τK|}/2`.
    pub fn generic(tau: f64, k: f64) -> Result<Self> {
        check_finite(tau, k)?;
        let tau_k = tau * k;
        let sign = if k < 0.0 { -1.0 } else { 1.0 };
        let coupling = 0.5 * (-2.0 * tau_k.abs()).exp().acos();
        Ok(BlockParams {
            flavor: BlockFlavor::Generic,
            coupling,
            ancilla_angle: sign * coupling,
            sign,
            normalization: 0.5 * tau_k.abs().exp(),
            tau_k,
        })
    }

    /// `c = π/4`, `W = arctan(e^{2τK}) - π/4`,
    /// `𝒩 = √(e^{4τK} + 1) / (2√(e^{2τK}))`.
    pub fn corrected(tau: f64, k: f64) -> Result<Self> {
        check_finite(tau, k)?;
        let tau_k = tau * k;
        let e2 = (2.0 * tau_k).exp();
        Ok(BlockParams {
            flavor: BlockFlavor::Corrected,
            coupling: e2.atan() - FRAC_PI_4,
            ancilla_angle: FRAC_PI_4,
            sign: if k < 0.0 { -1.0 } else { 1.0 },
            normalization: ((4.0 * tau_k).exp() + 1.0).sqrt() / (2.0 * e2.sqrt()),
            tau_k,
        })
    }

    /// `⟨0_a| exp(-i(c + λW) X_a) |0_a⟩ = cos(c + λW)` for parity `λ = ±1`.
    pub fn ancilla_zero_amplitude(&self, parity: f64) -> f64 {
        (self.ancilla_angle + parity * self.coupling).cos()
    }

    /// `-i sin(c + λW)` as its imaginary part, the `|1_a⟩` branch amplitude.
    pub fn ancilla_one_amplitude(&self, parity: f64) -> f64 {
        -(self.ancilla_angle + parity * self.coupling).sin()
    }
}

/// Generic block for a MaxCut edge of weight `w` (`K = w/2`).
pub fn generic_block_params(tau: f64, w: f64) -> Result<BlockParams> {
    BlockParams::generic(tau, 0.5 * w)
}

/// Corrected block for the Pauli coefficient `K` (`K = w/2` for a MaxCut edge).
pub fn corrected_block_params(tau: f64, k: f64) -> Result<BlockParams> {
    BlockParams::corrected(tau, k)
}
