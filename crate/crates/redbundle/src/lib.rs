//! redbundle: a chart-based numerical toolkit for time-dependent Hamiltonian
//! mechanics on extended phase spaces.
//!
//! The crate models extended phase spaces `(t, p, qⁱ, pᵢ)` fibred over
//! evolution spaces `(t, qⁱ, pᵢ)`, with the fiber translation acting on the
//! auxiliary momentum `p`. On top of that sit Poisson brackets and their
//! magnetic deformations, Hamiltonian sections with their cosymplectic
//! structures and Reeb dynamics, momentum maps for symmetry groups, and a
//! reduction pipeline that is checked numerically at every step. Two worked
//! models ship with the crate — a planar oscillator with time-dependent
//! coefficients and a rigid body in a time-dependent axial field — plus a CLI
//! (`redbundle`) exposing simulation, reduction, and verification.
//!
//! All numerics are generic over the scalar type via [`scalar::Real`]
//! (implemented for `f32` and `f64`); the `*64` aliases below fix the common
//! concrete choice.

pub mod bundle;
pub mod cli;
pub mod config;
pub mod error;
pub mod geometry;
pub mod hamiltonian;
pub mod integrate;
pub mod linalg;
pub mod models;
pub mod poly;
pub mod sample;
pub mod scalar;
pub mod symmetry;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Real;

/// Concrete `f64` aliases for the main public types.
pub type Mat64 = linalg::Mat<f64>;
pub type ScalarField64 = geometry::ScalarField<f64>;
pub type VectorField64 = geometry::VectorField<f64>;
pub type OneForm64 = geometry::OneForm<f64>;
pub type TwoForm64 = geometry::TwoForm<f64>;
pub type Bivector64 = geometry::Bivector<f64>;
pub type SmoothMap64 = geometry::SmoothMap<f64>;
pub type Bundle64 = bundle::SymplecticRBundle<f64>;
pub type Section64 = hamiltonian::HamiltonianSection<f64>;
pub type Cosymplectic64 = hamiltonian::CosymplecticStructure<f64>;
pub type Action64 = symmetry::SymmetryAction<f64>;
pub type MomentumMap64 = symmetry::MomentumMap<f64>;
pub type Trajectory64 = integrate::Trajectory<f64>;
