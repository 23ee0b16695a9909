//! Numerical verification of a two-dimensional exchange-type lower bound
//! on the indirect Coulomb energy with a gradient correction,
//!
//! E(ψ) ≥ −b̃²∫ρ_ψ^{3/2} − ã²∫|∇ρ_ψ^α|^γ,
//!
//! together with the molecular stability estimate it rests on.
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the aliases below
//! fix the scalar to `f64`, and the `F32*` ones to `f32`.

pub mod bound_constants;
pub mod coulomb;
pub mod density;
pub mod error;
pub mod interp;
pub mod manybody;
pub mod montecarlo;
pub mod quadrature;
pub mod scalar;
pub mod special;
pub mod stability;

pub use error::{Error, Result};
pub use scalar::Real;

pub type BoundParameters = bound_constants::BoundParameters<f64>;
pub type TheoremConstants = bound_constants::TheoremConstants<f64>;
pub type StabilityInputs = bound_constants::StabilityInputs<f64>;
pub type DensityProfile = density::DensityProfile<f64>;
pub type MolecularConfig = coulomb::MolecularConfig<f64>;
pub type DiskSpec = coulomb::DiskSpec<f64>;
pub type FunctionalBreakdown = stability::FunctionalBreakdown<f64>;
pub type WaveFunctionSpec = manybody::WaveFunctionSpec<f64>;
pub type BoundCheckResult = manybody::BoundCheckResult<f64>;

pub type F32BoundParameters = bound_constants::BoundParameters<f32>;
pub type F32TheoremConstants = bound_constants::TheoremConstants<f32>;
pub type F32DensityProfile = density::DensityProfile<f32>;
pub type F32MolecularConfig = coulomb::MolecularConfig<f32>;
