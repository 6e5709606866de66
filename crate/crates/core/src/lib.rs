//! Pseudospectral laboratory for third-order Benjamin-Ono type equations
//!
//! ```text
//! ∂ₜu − ∂ₓ³u + u²∂ₓu + c₁∂ₓ(u H∂ₓu) + c₂ H∂ₓ(u∂ₓu) = −γ D^{5/2} u   on 𝕋
//! ```
//!
//! The crate provides the spectral field algebra, modified energies with
//! their cubic correction terms, time integrators around the exact linear
//! propagator, randomized checks of the commutator and interpolation
//! estimates the energy method relies on, and experiment runners that tie
//! them together.

// `!(x > 0.0)` is the idiom for rejecting NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod energy;
pub mod error;
pub mod experiments;
pub mod io;
pub mod lab;
pub mod random;
pub mod spectral;
pub mod stats;

pub use error::{Error, Result};
pub use spectral::{MollifierSpec, ProductMode, SpectralField};
