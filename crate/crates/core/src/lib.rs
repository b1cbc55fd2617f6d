//! Hurwitz complex continued fractions: the Gauss map and its natural
//! extension, the admissible-digit automaton, and a numerical pipeline that
//! reconstructs the invariant density from rasterized dual regions.
//!
//! The arithmetic layers are generic over [`Scalar`] (`f32`, `f64`,
//! `BigRational`); the raster and estimation layers work in `f64`.

pub mod dynamics;
pub mod error;
pub mod estimator;
pub mod gaussian;
pub mod parse;
pub mod pixelgrid;
pub mod regions;
pub mod scalar;
pub mod taylor;
pub mod validate;

pub use num_complex::Complex;
pub use num_rational::BigRational;

pub use dynamics::{
    check_approximation, continued_fraction_value, convergents, convergents_with,
    default_seed, determinant_identity_holds, expand, gauss_step, invariance_residual,
    natext_step, Convergent, ExpansionStep, GaussOrbit, NatExtOrbit, NatExtState, QRecurrence,
};
pub use error::{Error, Result};
pub use gaussian::{format_gaussian, in_fundamental_domain, nearest_gaussian, GaussianInt};
pub use pixelgrid::{FillStrategy, PixelGrid};
pub use regions::{classify, Classification, Digit, RegionId, Subregion};
pub use scalar::{FloatScalar, Scalar};
pub use taylor::{kernel_matrix, KernelMatrix, TaylorJet};

pub type Complex64 = Complex<f64>;
pub type Complex32 = Complex<f32>;
pub type ExactComplex = Complex<BigRational>;
pub type NatExtState64 = NatExtState<f64>;
pub type TaylorJet64 = TaylorJet<f64>;
pub type ExactJet = TaylorJet<BigRational>;
