//! Brute-force truncated Fock space oracle.
//!
//! The field is reduced to its s-wave part: `f` is radial and enters only
//! through `Phi(f)`, so every observable computed here only sees radial
//! modes. Mode `j` of a radial grid carries energy `omega(k_j)` and coupling
//! `sqrt(4 pi w_j) k_j f(k_j)`. The Hamiltonian conserves `(spin + N) mod 2`
//! and is stored as two parity sectors: sector 0 contains `phi_0 Omega` and
//! the ground state, sector 1 contains `phi_1 Omega`.

pub mod basis;
pub mod contour;
pub mod field;
pub mod grid;
pub mod hamiltonian;
mod oracle;
pub mod spectrum;

pub use basis::{FockBasis, FockState, Spin, DEFAULT_BASIS_CAP};
pub use contour::Circle;
pub use field::DiscretizedField;
pub use grid::{build_grid, GridScheme, RadialGrid};
pub use hamiltonian::{assemble, AssembledHamiltonian};
pub use oracle::{
    CorrelatorSign, FockOracle, GroundState, OracleConfig, OracleManifest, Profile, Regularization, TMatrixOracle,
    DEFAULT_CONTOUR_NODES, DEFAULT_DENSE_LIMIT,
};
pub use spectrum::{EigenDecomposition, Lanczos, SpectralMeasure};
