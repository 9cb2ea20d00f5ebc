//! Imaginary-time evolution through block encodings.
//!
//! `exp(-τ H_C)` for MaxCut factorizes exactly into one commuting factor
//! `exp(-τ (w/2) Z_j Z_k)` per edge. Each factor is realized by a block that
//! couples the edge to a shared ancilla:
//!
//! * generic blocks post-select the ancilla on `|0⟩` and restart the shot
//!   otherwise;
//! * corrected blocks, valid on `|+⟩|+⟩` inputs, repair the `|1⟩` branch with
//!   a controlled-X and never fail. A matching of the graph can be applied
//!   this way first when the run starts from `|+⟩^N`.

mod blocks;
mod exact;
mod params;
mod protocol;

pub use blocks::{
    apply_corrected_block, apply_generic_block, plus_plus_fidelity, postselect_generic_block,
    PLUS_PLUS_TOL,
};
pub use exact::{apply_ite_exact, apply_ite_exact_matching_first, remaining_edges};
pub use params::{corrected_block_params, generic_block_params, BlockFlavor, BlockParams};
pub use protocol::{
    ite_exact_state, run_itebe, run_qaoa_itebe, ProtocolConfig, ProtocolRun, ShotResult, SimMode,
    DEFAULT_MAX_RESTARTS,
};
