//! The Hilbert `A`-module `U = A^d` and its adjointable `A`-linear maps.
//!
//! A vector `x = (x_1, ..., x_d)` is stored flattened as the `k x (d k)`
//! matrix `X = [x_1 | ... | x_d]`, so the `A`-valued inner product is
//! `<x, y> = X Y*` and the left module action is `a x = a X`.
//!
//! Every adjointable map `A^d -> A^{d'}` acts on the right, `X -> X M`, with
//! `M` a `(d k) x (d' k)` complex matrix. Right multiplication commutes with
//! the left action of `A`, which gives `A`-linearity for free, and the adjoint
//! is the conjugate transpose of `M`.

use std::fmt;

use num_complex::Complex;

use crate::cstar::AlgebraElement;
use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{cx, CMatrix, Real};

/// `(k, d)`: algebra dimension and module rank.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ModuleShape {
    pub k: usize,
    pub d: usize,
}

impl ModuleShape {
    pub fn new(k: usize, d: usize) -> Result<Self> {
        if k == 0 || d == 0 {
            return Err(Error::InvalidArgument(format!("module shape needs k >= 1 and d >= 1, got k={k}, d={d}")));
        }
        Ok(Self { k, d })
    }

    /// Width `d k` of the flattened representation.
    pub fn flat_width(&self) -> usize {
        self.k * self.d
    }
}

impl fmt::Display for ModuleShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(k={}, d={})", self.k, self.d)
    }
}

fn shape_mismatch(what: &str, expected: ModuleShape, found: ModuleShape) -> Error {
    Error::ShapeMismatch(format!("{what}: expected {expected}, found {found}"))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModuleVector<R: Real> {
    shape: ModuleShape,
    flat: CMatrix<R>,
}

impl<R: Real> ModuleVector<R> {
    pub fn from_flat(shape: ModuleShape, flat: CMatrix<R>) -> Result<Self> {
        if flat.nrows() != shape.k || flat.ncols() != shape.flat_width() {
            return Err(Error::ShapeMismatch(format!(
                "flattened vector of shape {shape} must be {}x{}, found {}x{}",
                shape.k,
                shape.flat_width(),
                flat.nrows(),
                flat.ncols()
            )));
        }
        Ok(Self { shape, flat })
    }

    pub fn from_components(components: &[AlgebraElement<R>]) -> Result<Self> {
        let first = components.first().ok_or_else(|| Error::InvalidArgument("vector needs at least one component".into()))?;
        let k = first.dim();
        let shape = ModuleShape::new(k, components.len())?;
        let mut flat = CMatrix::zeros(k, shape.flat_width());
        for (i, c) in components.iter().enumerate() {
            if c.dim() != k {
                return Err(Error::DimensionMismatch { expected: k, found: c.dim() });
            }
            flat.view_mut((0, i * k), (k, k)).copy_from(c.entries());
        }
        Ok(Self { shape, flat })
    }

    pub fn zeros(shape: ModuleShape) -> Self {
        Self { shape, flat: CMatrix::zeros(shape.k, shape.flat_width()) }
    }

    pub fn shape(&self) -> ModuleShape {
        self.shape
    }

    pub fn flat(&self) -> &CMatrix<R> {
        &self.flat
    }

    pub fn component(&self, i: usize) -> AlgebraElement<R> {
        let k = self.shape.k;
        AlgebraElement::from_matrix(self.flat.view((0, i * k), (k, k)).into_owned()).expect("square block")
    }

    pub fn components(&self) -> Vec<AlgebraElement<R>> {
        (0..self.shape.d).map(|i| self.component(i)).collect()
    }

    /// `<x, y> = sum_i x_i y_i* = X Y*`.
    pub fn inner_product(&self, other: &Self) -> Result<AlgebraElement<R>> {
        self.check_shape(other)?;
        AlgebraElement::from_matrix(&self.flat * other.flat.adjoint())
    }

    /// Left action `a x = (a x_1, ..., a x_d)`.
    pub fn module_action(&self, a: &AlgebraElement<R>) -> Result<Self> {
        if a.dim() != self.shape.k {
            return Err(Error::DimensionMismatch { expected: self.shape.k, found: a.dim() });
        }
        Ok(Self { shape: self.shape, flat: a.entries() * &self.flat })
    }

    /// `||x|| = ||<x, x>||^{1/2}`, the largest singular value of `X`.
    pub fn norm(&self) -> R {
        linalg::spectral_norm(&self.flat)
    }

    /// `|x| = <x, x>^{1/2}`.
    pub fn a_valued_abs(&self) -> AlgebraElement<R> {
        let g = AlgebraElement::from_matrix(&self.flat * self.flat.adjoint()).expect("square");
        let tol = R::default_tol(g.norm());
        g.positive_sqrt(tol).expect("<x,x> is positive")
    }

    pub fn scale(&self, c: Complex<R>) -> Self {
        Self { shape: self.shape, flat: &self.flat * c }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        Ok(Self { shape: self.shape, flat: &self.flat + &other.flat })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        Ok(Self { shape: self.shape, flat: &self.flat - &other.flat })
    }

    pub fn is_zero(&self) -> bool {
        self.flat.iter().all(|z| z.re == R::zero() && z.im == R::zero())
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.shape != other.shape {
            return Err(shape_mismatch("module vectors", self.shape, other.shape));
        }
        Ok(())
    }
}

/// Adjointable `A`-linear map `A^d -> A^{d'}`, acting as `X -> X M`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModuleMap<R: Real> {
    domain: ModuleShape,
    codomain: ModuleShape,
    action: CMatrix<R>,
}

impl<R: Real> ModuleMap<R> {
    pub fn from_action(domain: ModuleShape, codomain: ModuleShape, action: CMatrix<R>) -> Result<Self> {
        if domain.k != codomain.k {
            return Err(Error::DimensionMismatch { expected: domain.k, found: codomain.k });
        }
        if action.nrows() != domain.flat_width() || action.ncols() != codomain.flat_width() {
            return Err(Error::ShapeMismatch(format!(
                "action for {domain} -> {codomain} must be {}x{}, found {}x{}",
                domain.flat_width(),
                codomain.flat_width(),
                action.nrows(),
                action.ncols()
            )));
        }
        Ok(Self { domain, codomain, action })
    }

    pub fn identity(shape: ModuleShape) -> Self {
        let n = shape.flat_width();
        Self { domain: shape, codomain: shape, action: CMatrix::identity(n, n) }
    }

    pub fn zero(domain: ModuleShape, codomain: ModuleShape) -> Self {
        Self { domain, codomain, action: CMatrix::zeros(domain.flat_width(), codomain.flat_width()) }
    }

    pub fn domain(&self) -> ModuleShape {
        self.domain
    }

    pub fn codomain(&self) -> ModuleShape {
        self.codomain
    }

    pub fn action(&self) -> &CMatrix<R> {
        &self.action
    }

    pub fn scale(&self, c: Complex<R>) -> Self {
        Self { action: &self.action * c, ..self.clone() }
    }

    pub fn scale_real(&self, r: R) -> Self {
        self.scale(cx(r))
    }

    pub fn apply(&self, x: &ModuleVector<R>) -> Result<ModuleVector<R>> {
        if x.shape() != self.domain {
            return Err(shape_mismatch("map argument", self.domain, x.shape()));
        }
        ModuleVector::from_flat(self.codomain, x.flat() * &self.action)
    }

    pub fn adjoint(&self) -> Self {
        Self { domain: self.codomain, codomain: self.domain, action: self.action.adjoint() }
    }

    /// `||T||`, the largest singular value of the action.
    pub fn norm(&self) -> R {
        linalg::spectral_norm(&self.action)
    }

    /// `inf_{x != 0} ||T x|| / ||x||`: the `(d k)`-th singular value of the
    /// action, or zero when the action has fewer, or when it falls below the
    /// rank cutoff.
    pub fn lower_bound_constant(&self) -> R {
        let n = self.domain.flat_width();
        let sv = linalg::singular_values(&self.action);
        let cutoff = linalg::rank_cutoff(&self.action);
        match sv.get(n - 1) {
            Some(&s) if s > cutoff => s,
            _ => R::zero(),
        }
    }

    /// `||T x|| >= m ||x||` for every `x`.
    pub fn is_bounded_below(&self, m: R) -> bool {
        m > R::zero() && self.lower_bound_constant() >= m
    }

    /// Full column rank `d' k`, counting singular values above `tol`.
    pub fn is_surjective(&self, tol: R) -> bool {
        linalg::rank(&self.action, tol) == self.codomain.flat_width()
    }

    /// Full row rank `d k`.
    pub fn is_injective(&self, tol: R) -> bool {
        linalg::rank(&self.action, tol) == self.domain.flat_width()
    }

    /// Rank cutoff `RANK_RTOL * ||T||` for the surjectivity and injectivity tests.
    pub fn default_rank_tol(&self) -> R {
        linalg::rank_cutoff(&self.action)
    }

    /// `self` followed by `next`: `x -> next(self(x))`.
    pub fn compose(&self, next: &Self) -> Result<Self> {
        if self.codomain != next.domain {
            return Err(shape_mismatch("composition", self.codomain, next.domain));
        }
        Ok(Self { domain: self.domain, codomain: next.codomain, action: &self.action * &next.action })
    }

    /// Inverse of an invertible endomorphism.
    pub fn inverse(&self, tol: R) -> Result<Self> {
        if self.domain != self.codomain {
            return Err(shape_mismatch("inverse of non-endomorphism", self.domain, self.codomain));
        }
        let smin = linalg::singular_values(&self.action).last().copied().unwrap_or_else(R::zero);
        let err = Error::NotInvertible { sigma_min: smin.as_f64(), tol: tol.as_f64() };
        if smin < tol || smin == R::zero() {
            return Err(err);
        }
        let inv = self.action.clone().try_inverse().ok_or(err)?;
        Ok(Self { action: inv, ..self.clone() })
    }

    /// Action of `T* T` on the domain (apply `T`, then `T*`): `M M*`.
    pub fn gram(&self) -> CMatrix<R> {
        &self.action * self.action.adjoint()
    }

    /// Action of `T T*` on the codomain: `M* M`.
    pub fn cogram(&self) -> CMatrix<R> {
        self.action.adjoint() * &self.action
    }
}
