//! Total-variation decay toolkit for one-dimensional reversible diffusions.
//!
//! The measure is always `μ ∝ e^{-2V}` with generator `L = ½∂² − V′∂` and
//! carré du champ `Γ(f) = |f′|²`. Densities are represented with respect
//! to `μ`.
//!
//! * [`measure`] builds truncated-grid measures and evaluates static functionals.
//! * [`psi`] builds ψ profiles, Pinsker constants and the H / N / F̄ calculus.
//! * [`inequalities`] estimates Poincaré, log-Sobolev and weak inequality data.
//! * [`envelopes`] evaluates the theoretical TV decay bounds.
//! * [`sim`] evolves densities under the Fokker–Planck flow.
//! * [`cli`] runs config-driven scenarios and writes CSV / JSON reports.

pub mod cli;
pub mod config;
pub mod envelopes;
pub mod error;
pub mod inequalities;
pub mod measure;
pub mod numerics;
pub mod psi;
pub mod sim;

pub use error::{Error, Result};
pub use measure::{GridFunction, PotentialSpec, ProbabilityMeasure1D};
pub use numerics::ScalarFn;
