//! Seeded random generation of algebra elements, module vectors and maps.
//!
//! All randomness in the library goes through [`rng`], a ChaCha8 stream seeded
//! from a `u64`, so sampled certificates are reproducible across platforms.

use num_complex::Complex;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::cstar::AlgebraElement;
use crate::frame::OperatorFamily;
use crate::hilbert_module::{ModuleMap, ModuleShape, ModuleVector};
use crate::measure::MeasureSpace;
use crate::scalar::{cx, CMatrix, Real};

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal<R: Real>(rng: &mut SampleRng) -> R {
    R::lit(rng.sample::<f64, _>(StandardNormal))
}

/// Standard complex Gaussian entry (independent N(0,1) real and imaginary parts).
pub fn complex_normal<R: Real>(rng: &mut SampleRng) -> Complex<R> {
    Complex::new(normal(rng), normal(rng))
}

pub fn random_matrix<R: Real>(rows: usize, cols: usize, rng: &mut SampleRng) -> CMatrix<R> {
    let mut m = CMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = complex_normal(rng);
        }
    }
    m
}

pub fn random_element<R: Real>(k: usize, rng: &mut SampleRng) -> AlgebraElement<R> {
    AlgebraElement::from_matrix(random_matrix(k, k, rng)).expect("square")
}

pub fn random_hermitian<R: Real>(k: usize, rng: &mut SampleRng) -> AlgebraElement<R> {
    let a = random_matrix::<R>(k, k, rng);
    let half = cx(R::lit(0.5));
    AlgebraElement::from_matrix((&a + a.adjoint()) * half).expect("square")
}

/// `g g*` for Gaussian `g`; almost surely positive definite.
pub fn random_psd<R: Real>(k: usize, rng: &mut SampleRng) -> AlgebraElement<R> {
    let g = random_matrix::<R>(k, k, rng);
    AlgebraElement::from_matrix(&g * g.adjoint()).expect("square")
}

pub fn random_unitary_matrix<R: Real>(n: usize, rng: &mut SampleRng) -> CMatrix<R> {
    random_matrix::<R>(n, n, rng).qr().q()
}

pub fn random_unitary<R: Real>(k: usize, rng: &mut SampleRng) -> AlgebraElement<R> {
    AlgebraElement::from_matrix(random_unitary_matrix(k, rng)).expect("square")
}

/// `u * diag(s) * v` with unitary `u`, `v` and singular values in `[lo, hi]`.
pub fn random_with_singular_values<R: Real>(n: usize, lo: f64, hi: f64, rng: &mut SampleRng) -> CMatrix<R> {
    let u = random_unitary_matrix::<R>(n, rng);
    let v = random_unitary_matrix::<R>(n, rng);
    let s: Vec<R> = (0..n).map(|_| R::lit(rng.random_range(lo..=hi))).collect();
    let us = CMatrix::from_fn(n, n, |i, j| u[(i, j)] * cx(s[j]));
    us * v
}

/// Random element with singular values in `[0.5, 2]`.
pub fn random_well_conditioned<R: Real>(k: usize, rng: &mut SampleRng) -> AlgebraElement<R> {
    AlgebraElement::from_matrix(random_with_singular_values(k, 0.5, 2.0, rng)).expect("square")
}

pub fn random_vector<R: Real>(shape: ModuleShape, rng: &mut SampleRng) -> ModuleVector<R> {
    ModuleVector::from_flat(shape, random_matrix(shape.k, shape.flat_width(), rng)).expect("shape")
}

/// Matrix units `E_{r,j}` of the flattened `k x (d k)` representation.
pub fn basis_vectors<R: Real>(shape: ModuleShape) -> Vec<ModuleVector<R>> {
    let (rows, cols) = (shape.k, shape.flat_width());
    let mut out = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for j in 0..cols {
            let mut m = CMatrix::zeros(rows, cols);
            m[(r, j)] = cx(R::one());
            out.push(ModuleVector::from_flat(shape, m).expect("shape"));
        }
    }
    out
}

pub fn random_map<R: Real>(domain: ModuleShape, codomain: ModuleShape, rng: &mut SampleRng) -> ModuleMap<R> {
    let action = random_matrix(domain.flat_width(), codomain.flat_width(), rng);
    ModuleMap::from_action(domain, codomain, action).expect("shape")
}

/// Family of `space.len()` Gaussian maps from `domain` into `A^codomain_rank`.
pub fn random_family<R: Real>(
    space: MeasureSpace<R>,
    domain: ModuleShape,
    codomain_rank: usize,
    rng: &mut SampleRng,
) -> OperatorFamily<R> {
    let codomain = ModuleShape::new(domain.k, codomain_rank).expect("positive rank");
    let maps = (0..space.len()).map(|_| random_map(domain, codomain, rng)).collect();
    OperatorFamily::new(space, domain, maps).expect("consistent shapes")
}

/// Random invertible endomorphism with singular values in `[0.5, 2]`.
pub fn random_invertible_map<R: Real>(shape: ModuleShape, rng: &mut SampleRng) -> ModuleMap<R> {
    let action = random_with_singular_values(shape.flat_width(), 0.5, 2.0, rng);
    ModuleMap::from_action(shape, shape, action).expect("shape")
}
