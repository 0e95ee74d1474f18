//! Dense complex matrix helpers shared by the algebra, module and frame layers.

use nalgebra::linalg::{Cholesky, SymmetricEigen};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{modulus, CMatrix, Real};

/// Singular values sorted descending; length `min(rows, cols)`.
pub fn singular_values<R: Real>(m: &CMatrix<R>) -> Vec<R> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut sv: Vec<R> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    sv
}

pub fn spectral_norm<R: Real>(m: &CMatrix<R>) -> R {
    singular_values(m).first().copied().unwrap_or_else(R::zero)
}

pub fn max_abs_entry<R: Real>(m: &CMatrix<R>) -> R {
    m.iter().map(|&z| modulus(z)).fold(R::zero(), |a, b| a.max(b))
}

/// Largest entrywise deviation from Hermitian symmetry, `max |m - m*|`.
pub fn hermitian_deviation<R: Real>(m: &CMatrix<R>) -> R {
    assert!(m.is_square(), "hermitian_deviation on non-square matrix");
    let n = m.nrows();
    let mut dev = R::zero();
    for i in 0..n {
        for j in i..n {
            dev = dev.max(modulus(m[(i, j)] - m[(j, i)].conj()));
        }
    }
    dev
}

/// `(m + m*) / 2`, provided `m` is Hermitian within `tol`.
pub fn hermitian_part<R: Real>(m: &CMatrix<R>, tol: R) -> Result<CMatrix<R>> {
    if !m.is_square() {
        return Err(Error::ShapeMismatch(format!(
            "expected a square matrix, found {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let dev = hermitian_deviation(m);
    if dev > tol {
        return Err(Error::NotHermitian { deviation: dev.as_f64(), tol: tol.as_f64() });
    }
    let half = Complex::new(R::lit(0.5), R::zero());
    Ok((m + m.adjoint()) * half)
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen<R: Real> {
    pub values: Vec<R>,
    /// Column `i` is the unit eigenvector for `values[i]`.
    pub vectors: CMatrix<R>,
}

impl<R: Real> HermitianEigen<R> {
    pub fn min(&self) -> R {
        self.values[0]
    }

    pub fn max(&self) -> R {
        *self.values.last().expect("non-empty spectrum")
    }
}

pub fn hermitian_eigen<R: Real>(m: &CMatrix<R>, tol: R) -> Result<HermitianEigen<R>> {
    let h = hermitian_part(m, tol)?;
    let n = h.nrows();
    if n == 0 {
        return Err(Error::InvalidArgument("empty matrix has no spectrum".into()));
    }
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(HermitianEigen { values, vectors })
}

/// Eigenvalues only, ascending.
pub fn hermitian_eigenvalues<R: Real>(m: &CMatrix<R>, tol: R) -> Result<Vec<R>> {
    let h = hermitian_part(m, tol)?;
    if h.nrows() == 0 {
        return Err(Error::InvalidArgument("empty matrix has no spectrum".into()));
    }
    let mut values: Vec<R> = h.symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    Ok(values)
}

/// Hermitian within `tol` (entrywise) with minimum eigenvalue `>= -tol`.
pub fn is_psd<R: Real>(m: &CMatrix<R>, tol: R) -> bool {
    match hermitian_eigenvalues(m, tol) {
        Ok(ev) => ev[0] >= -tol,
        Err(_) => false,
    }
}

/// Loewner order `p <= q`, i.e. `q - p` positive within `tol`.
pub fn loewner_leq<R: Real>(p: &CMatrix<R>, q: &CMatrix<R>, tol: R) -> Result<bool> {
    if p.shape() != q.shape() {
        return Err(Error::DimensionMismatch { expected: p.nrows(), found: q.nrows() });
    }
    Ok(is_psd(&(q - p), tol))
}

/// Number of singular values above `cutoff`.
pub fn rank<R: Real>(m: &CMatrix<R>, cutoff: R) -> usize {
    singular_values(m).into_iter().filter(|&s| s > cutoff).count()
}

/// Default rank cutoff: `RANK_RTOL * sigma_max`.
pub fn rank_cutoff<R: Real>(m: &CMatrix<R>) -> R {
    R::lit(R::RANK_RTOL) * spectral_norm(m)
}

/// Solve `g z = rhs` for Hermitian positive definite `g`.
pub fn hpd_solve<R: Real>(g: &CMatrix<R>, rhs: &CMatrix<R>) -> Option<CMatrix<R>> {
    cholesky(g).map(|ch| ch.solve(rhs))
}

/// Explicit inverse of a Hermitian positive definite matrix.
pub fn hpd_inverse<R: Real>(g: &CMatrix<R>) -> Option<CMatrix<R>> {
    cholesky(g).map(|ch| ch.inverse())
}

// Complex square roots never fail, so nalgebra accepts negative pivots and
// returns an imaginary diagonal; reject those here.
fn cholesky<R: Real>(g: &CMatrix<R>) -> Option<Cholesky<Complex<R>, nalgebra::Dyn>> {
    let ch = Cholesky::new(g.clone())?;
    let l = ch.l_dirty();
    let ok = (0..l.nrows()).all(|i| {
        let z = l[(i, i)];
        z.re > R::zero() && z.im.abs() <= z.re * R::lit(R::RANK_RTOL)
    });
    ok.then_some(ch)
}

pub fn identity<R: Real>(n: usize) -> CMatrix<R> {
    CMatrix::identity(n, n)
}
