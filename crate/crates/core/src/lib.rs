//! Quantum kicked tops under rank-1 kicks: quasienergy anholonomy over the
//! Hermitian cycle, and the exceptional-point structure of the complexified
//! kick-strength plane.
//!
//! The family under study is the one-period Floquet operator
//! `U(Λ) = e^{-iω Ĵz} [(1 − |v⟩⟨v|) + Λ⁻¹ |v⟩⟨v|]` with Λ = e^{iλ}. Driving
//! λ through 2π permutes quasienergies and eigenspaces cyclically; the same
//! permutation is reproduced by monodromy around the degeneracies of the
//! complexified family in the Λ-plane. This crate builds the operators,
//! tracks spectral branches along parameter paths, locates and classifies
//! the degeneracies (exceptional vs diabolic, order, Puiseux exponent), and
//! constructs Riemann-sheet grids and cycle monodromies.
//!
//! Module map:
//! - [`spin_algebra`]: Ĵz, Ĵy, kick vectors, Fourier site basis.
//! - [`floquet`]: U(Λ), companion form at solvable ω, characteristic
//!   polynomial and its rank-1 affine split in w = Λ⁻¹.
//! - [`spectral`]: right/left eigendecomposition, quasienergy ordering,
//!   closed-form oracle at solvable ω.
//! - [`holonomy`]: adiabatic sweeps along the unit circle, anholonomy
//!   permutation and itineraries, non-resonance check.
//! - [`cubic_analytics`]: closed-form J = 1 machinery (discriminant quartic,
//!   Cardano roots, Sylvester resultant, exact EP positions).
//! - [`ep_finder`]: numerical EP atlas for general J.
//! - [`riemann`]: sheet construction, branch-cut bookkeeping, monodromy of
//!   user cycles.

pub mod cubic_analytics;
pub mod ep_finder;
pub mod error;
pub mod floquet;
pub mod holonomy;
pub mod linalg;
pub mod poly;
pub mod riemann;
pub mod spectral;
pub mod spin_algebra;
pub(crate) mod tracking;

pub use error::{Error, Result};
pub use floquet::{build_floquet, companion_floquet, ComplexParam, FloquetMatrix};
pub use spin_algebra::{HalfInt, KickVector, TopConfig};
