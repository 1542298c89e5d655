//! Perfect state transfer in spin-1/2 chains with engineered couplings.
//!
//! The single-excitation sector of an XX chain is a real symmetric matrix
//! with the couplings on its off-diagonals. This crate builds that matrix for
//! open chains and closed rings, diagonalizes it, evaluates transfer
//! fidelities, decides which site pairs can support perfect transfer, and
//! designs coupling profiles that realise it, either by multi-start search or
//! by solving the algebraic conditions directly.
//!
//! Sites are 1-indexed throughout the public API.

pub mod chain;
pub mod design;
pub mod dynamics;
pub mod error;
pub mod optimizer;
pub mod poly;
pub mod reachability;
pub mod spectral;

pub use chain::{build_hamiltonian, mirror_index, CouplingProfile, Geometry, HamiltonianMatrix};
pub use dynamics::{amplitude, fidelity, trajectory, TrajectoryRecord, TransferSpec};
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use spectral::{decompose, evolve_oracle, SpectralDecomposition};
