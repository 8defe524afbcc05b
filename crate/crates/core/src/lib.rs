//! Few-mode bosonic Fock-space simulator for the double-slit delayed-choice
//! experiment.
//!
//! Detection probabilities are computed as expectation values
//! `<E^- E^+>` of positive-frequency field operators in a two-mode
//! one-photon source state. The crate is organised bottom-up:
//!
//! * [`fock`]: Fock basis states, sparse state vectors, ladder-operator
//!   expressions, expectation values and normal ordering.
//! * [`experiment`]: slit geometry, screen and telescope detectors, patterns
//!   and fringe visibility.
//! * [`stochastic`]: event-by-event Monte Carlo of delayed choice with
//!   counter-based seeding, plus the statistical comparison of runs.
//! * [`eraser`]: polarization-tagged which-path marking and its erasure by a
//!   linear analyzer.
//! * [`cli`]: the command-line front end behind the `delayed-choice` binary.
//!
//! The runnable programs under `examples/` walk through each of these.

pub mod cli;
pub mod eraser;
pub mod error;
pub mod experiment;
pub mod fock;
pub mod stochastic;

pub use error::{Error, Result};
pub use num_complex::Complex64;
