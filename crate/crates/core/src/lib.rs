//! Quantum subspace correction (QSC) for independent-set constraints.
//!
//! The crate bundles everything needed to study stabilizer-based subspace
//! correction on the independent-set (IS) constraint at desk scale:
//!
//! - [`graph`]: graphs, random generators and brute-force IS oracles.
//! - [`prs`]: partial rejection sampling, the classical dual of the quantum
//!   preparation loop, plus batch runtime experiments.
//! - [`sim`]: a small dense statevector simulator with mid-circuit
//!   measurement and reset.
//! - [`qsc`]: the measure-and-reset preparation of Gibbs states over IS,
//!   executed on the simulator.
//! - [`stabilizer`]: diagonal stabilizers and ancilla syndrome unitaries for
//!   arbitrary Boolean constraints.
//! - [`adiabatic`]: the rotating-frame adiabatic MIS algorithm, its
//!   Trotterization and QSC recovery with the isolated-edge ansatz.
//! - [`prep2q`]: two-qubit state preparation used by the recovery step.
//!
//! Basis convention everywhere: qubit `q` is bit `q` of the basis index
//! (qubit 0 least significant), and qubit `v` carries vertex `v`.

pub mod adiabatic;
pub mod error;
pub mod graph;
pub mod prep2q;
pub mod prs;
pub mod qsc;
pub mod seed;
pub mod sim;
pub mod stabilizer;
pub mod stats;

pub use error::{Error, Result};
pub use graph::{Edge, Graph, VertexAssignment, ViolationSet};
pub use prs::{HaltCondition, HaltReason, SampleResult};
pub use sim::{Gate1Q, MeasurementOutcome, StateVector};
