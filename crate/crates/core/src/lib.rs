//! Simulation and analysis of the two-photon polarization Bell experiment.
//!
//! The same experiment runs under three accounts of measurement:
//!
//! - [`orthodox`]: measure one photon, collapse the pair, measure the other.
//! - [`lhv`]: local hidden-variable strategies with a shared source variable λ.
//! - [`many_worlds`]: no collapse; local branching plus explicit communication.
//!
//! [`analysis`] puts all three behind one sequence/statistics interface and
//! evaluates the mismatch-form Bell inequality
//! `M(−α, α) ≤ M(−α, 0) + M(0, α)`. [`polarization`] holds the exact state
//! algebra everything else builds on.

pub mod analysis;
pub mod cli;
pub mod lhv;
pub mod many_worlds;
pub mod orthodox;
pub mod polarization;
pub mod rng;
pub mod stats;

pub use analysis::{bell_report, generate_sequence, mismatch_rate, BellReport, Model, SequenceTable};
pub use polarization::{Angle, Outcome, Photon, TwoPhotonState};
