//! Real scalar abstraction. Complex entries are `Complex<R>` over one of these.

use std::fmt;

use nalgebra::{DMatrix, RealField};
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};

/// Dense complex matrix over the real scalar `R`.
pub type CMatrix<R> = DMatrix<Complex<R>>;

/// Floating point types the library computes in.
///
/// `BASE_TOL` is the relative tolerance used when a caller does not pass one;
/// `RANK_RTOL` is the relative singular-value cutoff for rank decisions.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    const BASE_TOL: f64;
    const RANK_RTOL: f64;

    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 literal representable")
    }

    fn as_f64(self) -> f64 {
        <Self as ToPrimitive>::to_f64(&self).unwrap_or(f64::NAN)
    }

    /// `BASE_TOL * max(1, scale)`.
    fn default_tol(scale: Self) -> Self {
        Self::lit(Self::BASE_TOL) * scale.max(Self::one())
    }
}

impl Real for f64 {
    const BASE_TOL: f64 = 1e-9;
    const RANK_RTOL: f64 = 1e-10;
}

impl Real for f32 {
    const BASE_TOL: f64 = 1e-4;
    const RANK_RTOL: f64 = 1e-5;
}

pub(crate) fn cx<R: Real>(re: R) -> Complex<R> {
    Complex::new(re, R::zero())
}

/// `|z|` for a complex scalar over any [`Real`].
pub fn modulus<R: Real>(z: Complex<R>) -> R {
    nalgebra::ComplexField::modulus(z)
}
