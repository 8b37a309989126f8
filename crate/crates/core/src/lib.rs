//! Constructive verification of Hyers–Ulam stability for the second-order
//! linear functional equation `f(x) = p f(x-1) - q f(x-2)` with values in a
//! random normed space.
//!
//! The crate is organised bottom-up:
//!
//! * [`distfn`] – distribution functions (the space Δ⁺), the maximal element
//!   ε₀ and the φ families used as perturbation envelopes.
//! * [`tnorm`] – the minimum and product t-norms plus an axiom harness.
//! * [`rnspace`] – vectors, the induced random norm `μ_x(t) = t/(t+‖x‖)`
//!   and checkers for the RN axioms and Cauchy/convergence definitions.
//! * [`stability`] – characteristic roots and the stability constant γ.
//! * [`solver`] – perturbed scenarios and the limit construction of the
//!   exact solution `F = α/(α-β)·G − β/(α-β)·H`.
//! * [`verify`] – hypothesis, intermediate and conclusion checks.
//! * [`cli`] – config parsing, batch runs and CSV output.

pub mod cli;
pub mod distfn;
pub mod error;
pub mod normal;
pub mod rnspace;
pub mod solver;
pub mod stability;
pub mod tnorm;
pub mod verify;

pub use distfn::{phi, DistributionFn, PhiFamily};
pub use error::{Error, Result};
pub use rnspace::{InducedKind, NormKind, RNSpace, VectorX};
pub use solver::{Scenario, TruncationPolicy};
pub use stability::{Coefficients, Spectrum};
pub use tnorm::TNorm;
