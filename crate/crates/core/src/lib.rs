//! Simulation library for a three-spin quantum transistor.
//!
//! A chain of three spins (source, gate, drain) coupled by an XY exchange
//! interaction acts as a transistor for quantum information: with the gate
//! spin detuned far off resonance the excitation encoded on the source is
//! blockaded, and with the detuning switched off it transfers coherently to
//! the drain. This crate provides
//!
//! - [`qmatrix`]: self-contained dense complex linear algebra (Kronecker
//!   products, Hermitian eigendecomposition, matrix exponentials),
//! - [`spinchain`]: Pauli operators, the XY Hamiltonian with per-site
//!   Z fields, and computational-basis state utilities,
//! - [`unitary`]: closed-system propagation, closed-form transfer and
//!   blockade probabilities, and the characteristic timescales,
//! - [`opensys`]: dephasing (Lindblad) and intrinsic-decoherence solvers
//!   with independent cross-check paths, plus the Bures fidelity.
//!
//! All frequencies (`omega0`, `delta`, `coupling_j`, dephasing rates) are
//! angular, in rad/s, with `hbar = 1`; times are in seconds. The intrinsic
//! decoherence rate `gamma` carries units of seconds.

pub mod error;
pub mod opensys;
pub mod qmatrix;
pub mod spinchain;
pub mod unitary;

pub use error::Error;
pub use opensys::DensityMatrix;
pub use qmatrix::{Complex64, ComplexMatrix};
pub use spinchain::{ChainParams, PureState};

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
