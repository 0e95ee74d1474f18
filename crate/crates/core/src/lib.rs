//! Continuous *-g-frames over finite-dimensional Hilbert C*-modules.
//!
//! The coefficient algebra is the matrix C*-algebra `A = M_k(C)` and the
//! module is `U = A^d`. Families of adjointable maps `{Lambda_w}` are indexed by
//! a finite quadrature of a measure space; the crate computes their analysis
//! and synthesis transforms, frame operator, optimal scalar bounds and
//! certificates for `A`-valued bounds, canonical duals, transformed families,
//! reconstruction and the perturbation criterion between two families.
//!
//! All numerics are generic over [`Real`] (`f64` and `f32`); the aliases at the
//! crate root fix the scalar to `f64`, which is what the tolerances are tuned for.

pub mod cstar;
pub mod error;
pub mod frame;
pub mod hilbert_module;
pub mod linalg;
pub mod measure;
pub mod sampling;
pub mod scalar;
pub mod stability;

pub use error::{Error, Result};
pub use frame::{BoundSide, CertificateStatus, FrameStatus, NormCheck, SamplingConfig};
pub use hilbert_module::ModuleShape;
pub use scalar::{CMatrix, Real};
pub use stability::{StabilityConstants, Verdict};

pub use num_complex::Complex;

pub type Complex64 = num_complex::Complex64;

pub type AlgebraElement = cstar::AlgebraElement<f64>;
pub type ModuleVector = hilbert_module::ModuleVector<f64>;
pub type ModuleMap = hilbert_module::ModuleMap<f64>;
pub type QuadratureNode = measure::QuadratureNode<f64>;
pub type MeasureKind = measure::MeasureKind<f64>;
pub type MeasureSpace = measure::MeasureSpace<f64>;
pub type OperatorFamily = frame::OperatorFamily<f64>;
pub type CoefficientField = frame::CoefficientField<f64>;
pub type FrameBounds = frame::FrameBounds<f64>;
pub type ScalarBounds = frame::ScalarBounds<f64>;
pub type FrameOperator = frame::FrameOperator<f64>;
pub type FrameCertificate = frame::FrameCertificate<f64>;
pub type PerturbationReport = stability::PerturbationReport<f64>;

pub type AlgebraElementF32 = cstar::AlgebraElement<f32>;
pub type ModuleVectorF32 = hilbert_module::ModuleVector<f32>;
pub type ModuleMapF32 = hilbert_module::ModuleMap<f32>;
pub type MeasureSpaceF32 = measure::MeasureSpace<f32>;
pub type OperatorFamilyF32 = frame::OperatorFamily<f32>;
pub type FrameBoundsF32 = frame::FrameBounds<f32>;
