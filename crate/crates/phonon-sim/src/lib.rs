//! Simulation and verification toolkit for laser-free phonon engineering
//! with trapped ions.
//!
//! Three collective motional modes `a`, `b`, `c` of a small ion crystal are
//! coupled by an anharmonicity-induced trilinear interaction
//! ξ(â†b̂ĉ + âb̂†ĉ†). Driving mode `a` near resonance turns the pair
//! (`b`, `c`) into a two-mode squeezer; driving mode `b` realizes a
//! beam-splitter between `a` and `c`; a spin-dependent drive yields a
//! phonon Fredkin (controlled-SWAP) gate. This crate provides:
//!
//! - truncated Fock-space operators and states ([`fock`]),
//! - the laboratory-frame and effective Hamiltonians ([`hamiltonians`]),
//! - Krylov time propagation with adaptive error control ([`propagate`]),
//! - closed-form target states and gate parameters ([`analytic`]),
//! - classical and quantum Fisher information ([`metrology`]),
//! - trap-level parameter derivations ([`physconst`]),
//! - scenario configs, sweeps and CSV/JSON output ([`cli`]),
//! - an acceptance-check harness ([`verify`]).
//!
//! All frequencies are angular (rad/ms) unless a name says otherwise;
//! conversions from laboratory kHz live in [`hamiltonians::khz_to_rad_per_ms`].

pub mod analytic;
pub mod cli;
pub mod error;
pub mod fock;
pub mod hamiltonians;
pub mod metrology;
pub mod physconst;
pub mod propagate;
pub mod sparse;
pub mod verify;

pub use error::{Error, Result};
pub use fock::{DensityMatrix, HilbertSpace, Label, Operator, SpinState, StateVector};
pub use hamiltonians::{HamiltonianKind, HamiltonianSpec};
pub use propagate::Trajectory;

/// Complex double, the scalar type of every operator and state.
pub type C64 = num_complex::Complex64;
