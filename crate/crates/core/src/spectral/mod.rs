//! Fourier-side representation of real periodic functions and the
//! multiplier/product algebra built on it.

mod field;
mod mollifier;
mod ops;
pub mod transform;

pub use field::SpectralField;
pub use mollifier::{BumpProfile, MollifierSpec};
pub use ops::{
    bessel_inverse, bessel_potential, commutator, dx, fractional_derivative, hilbert, inner_l2,
    mollify, multiply, sobolev_norm, triple_integral, ProductMode,
};
pub(crate) use ops::{d_pow, hs};
