//! The matrix C*-algebra `M_k(C)`: involution, spectral norm, positivity,
//! square roots and the Loewner order.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{self, HermitianEigen};
use crate::scalar::{cx, modulus, CMatrix, Real};

/// A `k x k` complex matrix viewed as an element of the C*-algebra `M_k(C)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement<R: Real> {
    entries: CMatrix<R>,
}

impl<R: Real> AlgebraElement<R> {
    pub fn from_matrix(entries: CMatrix<R>) -> Result<Self> {
        if !entries.is_square() || entries.nrows() == 0 {
            return Err(Error::ShapeMismatch(format!(
                "algebra element must be k x k with k >= 1, found {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        Ok(Self { entries })
    }

    /// Row-major construction; the dimension is the number of rows.
    pub fn from_rows(rows: &[Vec<Complex<R>>]) -> Result<Self> {
        let k = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != k) {
            return Err(Error::DimensionMismatch { expected: k, found: bad.len() });
        }
        Self::from_matrix(CMatrix::from_fn(k, k, |i, j| rows[i][j]))
    }

    pub fn identity(k: usize) -> Self {
        Self { entries: CMatrix::identity(k, k) }
    }

    pub fn zero(k: usize) -> Self {
        Self { entries: CMatrix::zeros(k, k) }
    }

    /// `c * 1_A`.
    pub fn scalar(k: usize, c: Complex<R>) -> Self {
        Self { entries: CMatrix::identity(k, k) * c }
    }

    pub fn real_scalar(k: usize, r: R) -> Self {
        Self::scalar(k, cx(r))
    }

    pub fn diagonal(d: &[R]) -> Self {
        let k = d.len();
        Self { entries: CMatrix::from_fn(k, k, |i, j| if i == j { cx(d[i]) } else { cx(R::zero()) }) }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix<R> {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix<R> {
        self.entries
    }

    /// Conjugate transpose.
    pub fn involution(&self) -> Self {
        Self { entries: self.entries.adjoint() }
    }

    /// Operator norm (largest singular value), the unique C*-norm on `M_k`.
    pub fn norm(&self) -> R {
        linalg::spectral_norm(&self.entries)
    }

    pub fn min_singular_value(&self) -> R {
        linalg::singular_values(&self.entries).last().copied().unwrap_or_else(R::zero)
    }

    pub fn scale(&self, c: Complex<R>) -> Self {
        Self { entries: &self.entries * c }
    }

    pub fn scale_real(&self, r: R) -> Self {
        self.scale(cx(r))
    }

    pub fn is_hermitian(&self, tol: R) -> bool {
        linalg::hermitian_deviation(&self.entries) <= tol
    }

    /// Hermitian within `tol` and minimum eigenvalue at least `-tol`.
    pub fn is_positive(&self, tol: R) -> bool {
        linalg::is_psd(&self.entries, tol)
    }

    /// `self <= other` in the Loewner order.
    pub fn loewner_leq(&self, other: &Self, tol: R) -> Result<bool> {
        self.check_dim(other)?;
        linalg::loewner_leq(&self.entries, &other.entries, tol)
    }

    pub fn hermitian_eigen(&self, tol: R) -> Result<HermitianEigen<R>> {
        linalg::hermitian_eigen(&self.entries, tol)
    }

    /// The unique positive square root of a positive element. Eigenvalues in
    /// `[-tol, 0)` are clamped to zero.
    pub fn positive_sqrt(&self, tol: R) -> Result<Self> {
        let eig = match self.hermitian_eigen(tol) {
            Ok(e) => e,
            Err(Error::NotHermitian { .. }) => {
                return Err(Error::NotPositive { min_eigenvalue: f64::NAN, tol: tol.as_f64() })
            }
            Err(e) => return Err(e),
        };
        if eig.min() < -tol {
            return Err(Error::NotPositive { min_eigenvalue: eig.min().as_f64(), tol: tol.as_f64() });
        }
        let k = self.dim();
        let v = &eig.vectors;
        let roots: Vec<R> = eig.values.iter().map(|&l| l.max(R::zero()).sqrt()).collect();
        let scaled = CMatrix::from_fn(k, k, |i, j| v[(i, j)] * cx(roots[j]));
        Ok(Self { entries: scaled * v.adjoint() })
    }

    /// `|a| = (a* a)^{1/2}`.
    pub fn abs_val(&self) -> Self {
        let p = self.involution() * self;
        let tol = R::default_tol(p.norm());
        p.positive_sqrt(tol).expect("a*a is positive")
    }

    /// Inverse, provided the smallest singular value is at least `tol`.
    pub fn inverse(&self, tol: R) -> Result<Self> {
        let smin = self.min_singular_value();
        if smin < tol || smin == R::zero() {
            return Err(Error::NotInvertible { sigma_min: smin.as_f64(), tol: tol.as_f64() });
        }
        let inv = self
            .entries
            .clone()
            .try_inverse()
            .ok_or(Error::NotInvertible { sigma_min: smin.as_f64(), tol: tol.as_f64() })?;
        Ok(Self { entries: inv })
    }

    pub fn is_invertible(&self, tol: R) -> bool {
        let smin = self.min_singular_value();
        smin >= tol && smin > R::zero()
    }

    /// If `self = c * 1_A` within `tol` (entrywise), return `c`.
    pub fn as_scalar_multiple(&self, tol: R) -> Option<Complex<R>> {
        let k = self.dim();
        let c = self.entries[(0, 0)];
        let mut dev = R::zero();
        for i in 0..k {
            for j in 0..k {
                let target = if i == j { c } else { cx(R::zero()) };
                dev = dev.max(modulus(self.entries[(i, j)] - target));
            }
        }
        (dev <= tol).then_some(c)
    }

    /// Default tolerance for an operation on the given operands:
    /// `BASE_TOL * max(1, largest operand norm)`.
    pub fn default_tol(operands: &[&Self]) -> R {
        let scale = operands.iter().map(|a| a.norm()).fold(R::zero(), |a, b| a.max(b));
        R::default_tol(scale)
    }

    pub fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(())
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl<'a, R: Real> $tr<&'a AlgebraElement<R>> for &'a AlgebraElement<R> {
            type Output = AlgebraElement<R>;
            fn $method(self, rhs: &'a AlgebraElement<R>) -> AlgebraElement<R> {
                assert_eq!(self.dim(), rhs.dim(), "algebra element dimensions differ");
                AlgebraElement { entries: &self.entries $op &rhs.entries }
            }
        }
        impl<'a, R: Real> $tr<&'a AlgebraElement<R>> for AlgebraElement<R> {
            type Output = AlgebraElement<R>;
            fn $method(self, rhs: &'a AlgebraElement<R>) -> AlgebraElement<R> {
                (&self).$method(rhs)
            }
        }
        impl<R: Real> $tr<AlgebraElement<R>> for AlgebraElement<R> {
            type Output = AlgebraElement<R>;
            fn $method(self, rhs: AlgebraElement<R>) -> AlgebraElement<R> {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl<R: Real> Neg for AlgebraElement<R> {
    type Output = AlgebraElement<R>;
    fn neg(self) -> Self {
        AlgebraElement { entries: -self.entries }
    }
}
