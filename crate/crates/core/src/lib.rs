//! Classical simulation of imaginary-time evolution through block encodings
//! (ITE-BE) for MaxCut, alone and seeded by a QAOA state.
//!
//! * [`graph`]: instances, the exhaustive oracle, random ensembles, matchings.
//! * [`sim`]: dense statevector with one reusable ancilla.
//! * [`itebe`]: block parameters, block circuits, the exact tilt and both protocols.
//! * [`qaoa`]: fixed-angle QAOA state preparation.
//! * [`metrics`]: approximation ratio, optimum probability, 3σ intervals, ensembles.
//! * [`experiment`]: the `generate` / `sweep` / `oracle` harness behind the CLI.

pub mod error;
pub mod experiment;
pub mod graph;
pub mod itebe;
pub mod metrics;
pub mod qaoa;
pub mod rng;
pub mod sim;

pub use error::{Error, Result};
pub use graph::{Assignment, Edge, Graph, MaxCutSolution};
pub use sim::Statevector;
