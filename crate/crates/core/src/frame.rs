//! Continuous *-g-frames: operator families `{Lambda_w}` over a discretized
//! measure space, their analysis and synthesis transforms, the frame operator,
//! frame-bound certificates, canonical duals, transformed families and
//! reconstruction.
//!
//! With maps acting on the right by `M_w`, the frame operator `S = T* T` acts
//! as `X -> X G` where `G = sum_i weight_i M_i M_i*`, and
//! `int <Lambda_w x, Lambda_w x> dmu = X G X*`. Scalar bounds `a 1_A`, `b 1_A`
//! therefore hold exactly when `a^2 I <= G <= b^2 I`.

use num_complex::Complex;

use crate::cstar::AlgebraElement;
use crate::error::{Error, Result};
use crate::hilbert_module::{ModuleMap, ModuleShape, ModuleVector};
use crate::linalg::{self, HermitianEigen};
use crate::measure::MeasureSpace;
use crate::sampling;
use crate::scalar::{cx, modulus, CMatrix, Real};

/// Seeded sampling parameters for certificates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SamplingConfig {
    pub samples: usize,
    pub seed: u64,
}

impl SamplingConfig {
    pub const DEFAULT_SAMPLES: usize = 500;

    pub fn new(samples: usize, seed: u64) -> Self {
        Self { samples, seed }
    }
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self { samples: Self::DEFAULT_SAMPLES, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OperatorFamily<R: Real> {
    space: MeasureSpace<R>,
    domain: ModuleShape,
    maps: Vec<ModuleMap<R>>,
}

impl<R: Real> OperatorFamily<R> {
    pub fn new(space: MeasureSpace<R>, domain: ModuleShape, maps: Vec<ModuleMap<R>>) -> Result<Self> {
        if maps.len() != space.len() {
            return Err(Error::ShapeMismatch(format!(
                "family has {} maps for {} measure nodes",
                maps.len(),
                space.len()
            )));
        }
        for (i, m) in maps.iter().enumerate() {
            if m.domain() != domain {
                return Err(Error::ShapeMismatch(format!(
                    "map at node {i} has domain {}, expected {domain}",
                    m.domain()
                )));
            }
        }
        Ok(Self { space, domain, maps })
    }

    /// Build `Lambda_w` from a function of the node tag.
    pub fn from_fn<F>(space: MeasureSpace<R>, domain: ModuleShape, mut f: F) -> Result<Self>
    where
        F: FnMut(R) -> ModuleMap<R>,
    {
        let maps = space.nodes().iter().map(|n| f(n.tag)).collect();
        Self::new(space, domain, maps)
    }

    pub fn space(&self) -> &MeasureSpace<R> {
        &self.space
    }

    pub fn domain(&self) -> ModuleShape {
        self.domain
    }

    pub fn maps(&self) -> &[ModuleMap<R>] {
        &self.maps
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    /// Shape `(k, sum_w d_w)` of the coefficient space with the blocks stacked.
    pub fn coefficient_shape(&self) -> ModuleShape {
        ModuleShape { k: self.domain.k, d: self.maps.iter().map(|m| m.codomain().d).sum() }
    }

    /// `T x = {Lambda_w x}`.
    pub fn analysis(&self, x: &ModuleVector<R>) -> Result<CoefficientField<R>> {
        if x.shape() != self.domain {
            return Err(Error::ShapeMismatch(format!("analysis argument {} but family domain {}", x.shape(), self.domain)));
        }
        let blocks = self.maps.iter().map(|m| m.apply(x)).collect::<Result<Vec<_>>>()?;
        Ok(CoefficientField { space: self.space.clone(), blocks })
    }

    /// `T* c = int Lambda_w* c_w dmu`, summed in node order.
    pub fn synthesis(&self, c: &CoefficientField<R>) -> Result<ModuleVector<R>> {
        self.check_field(c)?;
        let flat = self
            .space
            .integrate_matrix(|i, _| c.blocks[i].flat() * self.maps[i].action().adjoint())?;
        ModuleVector::from_flat(self.domain, flat)
    }

    /// The matrix `[sqrt(w_1) M_1 | ... | sqrt(w_n) M_n]` of the analysis
    /// operator in isometric coordinates on the coefficient space.
    pub fn analysis_action(&self) -> CMatrix<R> {
        let rows = self.domain.flat_width();
        let cols = self.coefficient_shape().flat_width();
        let mut out = CMatrix::zeros(rows, cols);
        let mut offset = 0;
        for (m, node) in self.maps.iter().zip(self.space.nodes()) {
            let w = m.action().ncols();
            out.view_mut((0, offset), (rows, w)).copy_from(&(m.action() * cx(node.weight.sqrt())));
            offset += w;
        }
        out
    }

    /// The analysis operator as a module map into the stacked coefficient module.
    pub fn analysis_map(&self) -> ModuleMap<R> {
        ModuleMap::from_action(self.domain, self.coefficient_shape(), self.analysis_action()).expect("consistent shapes")
    }

    /// The synthesis operator `T*` as a module map.
    pub fn synthesis_map(&self) -> ModuleMap<R> {
        self.analysis_map().adjoint()
    }

    pub fn frame_operator(&self) -> FrameOperator<R> {
        let gram = self
            .space
            .integrate_matrix(|i, _| self.maps[i].gram())
            .expect("all maps share the domain");
        FrameOperator { gram, shape: self.domain }
    }

    /// Best bounds of the form `a 1_A`, `b 1_A`: `a = sqrt(lambda_min(G))`,
    /// `b = sqrt(lambda_max(G))`. `tol` defaults to `BASE_TOL * lambda_max(G)`.
    pub fn optimal_scalar_bounds(&self, tol: Option<R>) -> FrameStatus<R> {
        self.frame_operator().optimal_scalar_bounds(tol)
    }

    pub fn is_frame(&self, tol: Option<R>) -> bool {
        matches!(self.optimal_scalar_bounds(tol), FrameStatus::Frame(_))
    }

    /// `||T|| = sqrt(lambda_max(G))`.
    pub fn frame_transform_norm(&self) -> R {
        self.frame_operator().lambda_max().max(R::zero()).sqrt()
    }

    /// Check the star-frame inequality
    /// `A <x,x> A* <= int <Lambda_w x, Lambda_w x> dmu <= B <x,x> B*`.
    ///
    /// Scalar-multiple bounds are decided exactly from the spectrum of `G`.
    /// Any other bounds are tested on every matrix unit of `A^d` plus
    /// `sampling.samples` seeded random vectors; a pass is then only a
    /// necessary condition and is reported as `VerifiedSampled`.
    pub fn verify_star_bounds(&self, bounds: &FrameBounds<R>, sampling: SamplingConfig) -> Result<FrameCertificate<R>> {
        if bounds.dim() != self.domain.k {
            return Err(Error::DimensionMismatch { expected: self.domain.k, found: bounds.dim() });
        }
        let op = self.frame_operator();
        let eig = op.eigen()?;
        let (lmin, lmax) = (eig.min(), eig.max());
        let frame_tol = op.default_frame_tol();
        let mut cert = FrameCertificate {
            status: CertificateStatus::NotFrame,
            bounds: bounds.clone(),
            lambda_min: lmin,
            lambda_max: lmax,
            lower_margin: R::zero(),
            upper_margin: R::zero(),
            seed: None,
        };
        if !(lmin >= frame_tol && lmin > R::zero()) {
            cert.lower_margin = lmin;
            return Ok(cert);
        }

        if let Some((alpha, beta)) = bounds.scalar_moduli() {
            let (lo, hi) = (alpha * alpha, beta * beta);
            let tol = R::default_tol(lmax.max(lo).max(hi));
            cert.lower_margin = lmin - lo;
            cert.upper_margin = hi - lmax;
            cert.status = if cert.lower_margin < -tol {
                CertificateStatus::Refuted { witness: self.eigen_witness(&eig, 0), side: BoundSide::Lower }
            } else if cert.upper_margin < -tol {
                let last = eig.values.len() - 1;
                CertificateStatus::Refuted { witness: self.eigen_witness(&eig, last), side: BoundSide::Upper }
            } else {
                CertificateStatus::VerifiedExact
            };
            return Ok(cert);
        }

        cert.seed = Some(sampling.seed);
        let mut rng = sampling::rng(sampling.seed);
        let probes = sampling::basis_vectors::<R>(self.domain)
            .into_iter()
            .chain((0..sampling.samples).map(|_| sampling::random_vector(self.domain, &mut rng)));
        let (a, b) = (bounds.lower.entries(), bounds.upper.entries());
        let mut count = 0;
        let mut lower_margin: Option<R> = None;
        let mut upper_margin: Option<R> = None;
        for x in probes {
            count += 1;
            let xf = x.flat();
            let p = xf * xf.adjoint();
            let mid = xf * &op.gram * xf.adjoint();
            let lower = a * &p * a.adjoint();
            let upper = b * &p * b.adjoint();
            let scale = linalg::spectral_norm(&mid).max(linalg::spectral_norm(&lower)).max(linalg::spectral_norm(&upper));
            let tol = R::default_tol(scale);
            let lm = linalg::hermitian_eigenvalues(&(&mid - &lower), tol)?[0];
            let um = linalg::hermitian_eigenvalues(&(&upper - &mid), tol)?[0];
            lower_margin = Some(lower_margin.map_or(lm, |v: R| v.min(lm)));
            upper_margin = Some(upper_margin.map_or(um, |v: R| v.min(um)));
            if lm < -tol || um < -tol {
                cert.lower_margin = lower_margin.unwrap();
                cert.upper_margin = upper_margin.unwrap();
                let side = if lm < -tol { BoundSide::Lower } else { BoundSide::Upper };
                cert.status = CertificateStatus::Refuted { witness: x, side };
                return Ok(cert);
            }
        }
        cert.lower_margin = lower_margin.unwrap_or_else(R::zero);
        cert.upper_margin = upper_margin.unwrap_or_else(R::zero);
        cert.status = CertificateStatus::VerifiedSampled { samples: count };
        Ok(cert)
    }

    /// Vector whose first row is `v*` for eigenvector `v` of `G`, so that
    /// `<x, x> = E_11` and `X G X* = lambda E_11`.
    fn eigen_witness(&self, eig: &HermitianEigen<R>, idx: usize) -> ModuleVector<R> {
        let n = self.domain.flat_width();
        let mut flat = CMatrix::zeros(self.domain.k, n);
        for j in 0..n {
            flat[(0, j)] = eig.vectors[(j, idx)].conj();
        }
        ModuleVector::from_flat(self.domain, flat).expect("shape")
    }

    /// Canonical dual `{Lambda_w S^-1}`: per-node actions `G^-1 M_w`.
    pub fn canonical_dual(&self, tol: Option<R>) -> Result<Self> {
        let op = self.frame_operator();
        let ginv = op.inverse(tol)?;
        let maps = self
            .maps
            .iter()
            .map(|m| ModuleMap::from_action(self.domain, m.codomain(), &ginv * m.action()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { space: self.space.clone(), domain: self.domain, maps })
    }

    /// `{Lambda_w T}` for an invertible endomorphism `T` of the domain; the new
    /// frame operator has matrix `T G T*`.
    pub fn transform_family(&self, t: &ModuleMap<R>, tol: Option<R>) -> Result<Self> {
        check_invertible_endomorphism(t, self.domain, tol)?;
        let maps = self.maps.iter().map(|m| t.compose(m)).collect::<Result<Vec<_>>>()?;
        Ok(Self { space: self.space.clone(), domain: self.domain, maps })
    }

    /// `x = S^-1 T* c`, solved with a Cholesky factorization of `G`.
    pub fn reconstruct(&self, c: &CoefficientField<R>, tol: Option<R>) -> Result<ModuleVector<R>> {
        let op = self.frame_operator();
        op.require_frame(tol)?;
        let y = self.synthesis(c)?;
        let z = linalg::hpd_solve(&op.gram, &y.flat().adjoint()).ok_or(Error::FrameDegenerate {
            lambda_min: op.lambda_min().as_f64(),
            tol: op.default_frame_tol().as_f64(),
        })?;
        ModuleVector::from_flat(self.domain, z.adjoint())
    }

    /// `||A^-1||^-2 <= ||S|| <= ||B||^2`.
    pub fn frame_operator_norm_check(&self, bounds: &FrameBounds<R>) -> NormCheck<R> {
        let s_norm = self.frame_operator().lambda_max();
        let smin = bounds.lower.min_singular_value();
        let lower = smin * smin;
        let bn = bounds.upper.norm();
        let upper = bn * bn;
        let tol = R::default_tol(upper.max(s_norm));
        NormCheck { lower, s_norm, upper, holds: lower <= s_norm + tol && s_norm <= upper + tol }
    }

    pub(crate) fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.space != other.space {
            return Err(Error::ShapeMismatch("families live on different measure spaces".into()));
        }
        if self.domain != other.domain {
            return Err(Error::ShapeMismatch(format!("family domains differ: {} vs {}", self.domain, other.domain)));
        }
        for (i, (a, b)) in self.maps.iter().zip(&other.maps).enumerate() {
            if a.codomain() != b.codomain() {
                return Err(Error::ShapeMismatch(format!(
                    "node {i}: codomains differ ({} vs {})",
                    a.codomain(),
                    b.codomain()
                )));
            }
        }
        Ok(())
    }

    fn check_field(&self, c: &CoefficientField<R>) -> Result<()> {
        if c.space != self.space || c.blocks.len() != self.maps.len() {
            return Err(Error::ShapeMismatch("coefficient field does not match the family's measure space".into()));
        }
        for (i, (b, m)) in c.blocks.iter().zip(&self.maps).enumerate() {
            if b.shape() != m.codomain() {
                return Err(Error::ShapeMismatch(format!(
                    "coefficient block {i} has shape {}, expected {}",
                    b.shape(),
                    m.codomain()
                )));
            }
        }
        Ok(())
    }
}

fn check_invertible_endomorphism<R: Real>(t: &ModuleMap<R>, shape: ModuleShape, tol: Option<R>) -> Result<R> {
    if t.domain() != shape || t.codomain() != shape {
        return Err(Error::ShapeMismatch(format!(
            "transform must be an endomorphism of {shape}, found {} -> {}",
            t.domain(),
            t.codomain()
        )));
    }
    let smin = linalg::singular_values(t.action()).last().copied().unwrap_or_else(R::zero);
    let tol = tol.unwrap_or_else(|| R::default_tol(t.norm()));
    if smin < tol || smin == R::zero() {
        return Err(Error::NotInvertible { sigma_min: smin.as_f64(), tol: tol.as_f64() });
    }
    Ok(smin)
}

/// Element `{y_w}` of the coefficient module `(+)_w V_w`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientField<R: Real> {
    space: MeasureSpace<R>,
    blocks: Vec<ModuleVector<R>>,
}

impl<R: Real> CoefficientField<R> {
    pub fn new(space: MeasureSpace<R>, blocks: Vec<ModuleVector<R>>) -> Result<Self> {
        if blocks.len() != space.len() {
            return Err(Error::ShapeMismatch(format!("{} blocks for {} nodes", blocks.len(), space.len())));
        }
        if let Some(b) = blocks.iter().find(|b| b.shape().k != blocks[0].shape().k) {
            return Err(Error::DimensionMismatch { expected: blocks[0].shape().k, found: b.shape().k });
        }
        Ok(Self { space, blocks })
    }

    pub fn zeros(family: &OperatorFamily<R>) -> Self {
        let blocks = family.maps().iter().map(|m| ModuleVector::zeros(m.codomain())).collect();
        Self { space: family.space().clone(), blocks }
    }

    pub fn space(&self) -> &MeasureSpace<R> {
        &self.space
    }

    pub fn blocks(&self) -> &[ModuleVector<R>] {
        &self.blocks
    }

    /// `<c, e> = int <c_w, e_w> dmu`.
    pub fn inner_product(&self, other: &Self) -> Result<AlgebraElement<R>> {
        if self.space != other.space {
            return Err(Error::ShapeMismatch("coefficient fields on different measure spaces".into()));
        }
        let pairs: Vec<AlgebraElement<R>> = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a.inner_product(b))
            .collect::<Result<_>>()?;
        let mut it = pairs.into_iter();
        self.space.integrate(|_| it.next().expect("one block per node"))
    }

    /// `||c|| = ||<c, c>||^{1/2}`.
    pub fn norm(&self) -> Result<R> {
        Ok(self.inner_product(self)?.norm().sqrt())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.space != other.space {
            return Err(Error::ShapeMismatch("coefficient fields on different measure spaces".into()));
        }
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| a.sub(b)).collect::<Result<_>>()?;
        Ok(Self { space: self.space.clone(), blocks })
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(ModuleVector::is_zero)
    }
}

/// A-valued frame bounds `(A, B)`, both invertible.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameBounds<R: Real> {
    pub lower: AlgebraElement<R>,
    pub upper: AlgebraElement<R>,
}

impl<R: Real> FrameBounds<R> {
    pub fn new(lower: AlgebraElement<R>, upper: AlgebraElement<R>, tol: Option<R>) -> Result<Self> {
        lower.check_dim(&upper)?;
        for e in [&lower, &upper] {
            let t = tol.unwrap_or_else(|| R::default_tol(e.norm()));
            if !e.is_invertible(t) {
                return Err(Error::NotInvertible { sigma_min: e.min_singular_value().as_f64(), tol: t.as_f64() });
            }
        }
        Ok(Self { lower, upper })
    }

    /// `(a 1_A, b 1_A)` from real bounds `a, b > 0`.
    pub fn promote_scalar(a: R, b: R, k: usize) -> Result<Self> {
        if !(a > R::zero() && b > R::zero()) {
            return Err(Error::InvalidArgument(format!("scalar bounds must be positive, got ({a}, {b})")));
        }
        if k == 0 {
            return Err(Error::InvalidArgument("algebra dimension must be >= 1".into()));
        }
        Ok(Self { lower: AlgebraElement::real_scalar(k, a), upper: AlgebraElement::real_scalar(k, b) })
    }

    pub fn dim(&self) -> usize {
        self.lower.dim()
    }

    /// `(|alpha|, |beta|)` when both bounds are scalar multiples of `1_A`.
    pub fn scalar_moduli(&self) -> Option<(R, R)> {
        let a = self.lower.as_scalar_multiple(R::default_tol(self.lower.norm()))?;
        let b = self.upper.as_scalar_multiple(R::default_tol(self.upper.norm()))?;
        Some((modulus(a), modulus(b)))
    }

    /// Bounds for `{Lambda_w T}`: `(||T^-1||^-1 A, ||T|| B)`.
    pub fn transformed(&self, t: &ModuleMap<R>, tol: Option<R>) -> Result<Self> {
        let smin = check_invertible_endomorphism(t, t.domain(), tol)?;
        if t.domain().k != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: t.domain().k });
        }
        Ok(Self { lower: self.lower.scale_real(smin), upper: self.upper.scale_real(t.norm()) })
    }
}

/// Real bounds `(a, b)`; promoted bounds are `(a 1_A, b 1_A)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalarBounds<R: Real> {
    pub lower: R,
    pub upper: R,
}

impl<R: Real> ScalarBounds<R> {
    pub fn promote(&self, k: usize) -> Result<FrameBounds<R>> {
        FrameBounds::promote_scalar(self.lower, self.upper, k)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FrameStatus<R: Real> {
    Frame(ScalarBounds<R>),
    NotFrame { lambda_min: R, lambda_max: R },
}

impl<R: Real> FrameStatus<R> {
    pub fn bounds(&self) -> Option<ScalarBounds<R>> {
        match self {
            FrameStatus::Frame(b) => Some(*b),
            FrameStatus::NotFrame { .. } => None,
        }
    }
}

/// The frame operator `S`, held as its matrix `G` in the right-action picture.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameOperator<R: Real> {
    gram: CMatrix<R>,
    shape: ModuleShape,
}

impl<R: Real> FrameOperator<R> {
    pub fn gram(&self) -> &CMatrix<R> {
        &self.gram
    }

    pub fn shape(&self) -> ModuleShape {
        self.shape
    }

    pub fn as_map(&self) -> ModuleMap<R> {
        ModuleMap::from_action(self.shape, self.shape, self.gram.clone()).expect("square gram")
    }

    pub fn apply(&self, x: &ModuleVector<R>) -> Result<ModuleVector<R>> {
        self.as_map().apply(x)
    }

    fn herm_tol(&self) -> R {
        R::default_tol(linalg::max_abs_entry(&self.gram))
    }

    pub fn eigen(&self) -> Result<HermitianEigen<R>> {
        linalg::hermitian_eigen(&self.gram, self.herm_tol())
    }

    pub fn eigenvalues(&self) -> Vec<R> {
        linalg::hermitian_eigenvalues(&self.gram, self.herm_tol()).expect("frame operator is Hermitian")
    }

    pub fn lambda_min(&self) -> R {
        self.eigenvalues()[0]
    }

    pub fn lambda_max(&self) -> R {
        *self.eigenvalues().last().expect("non-empty")
    }

    /// `BASE_TOL * lambda_max(G)`.
    pub fn default_frame_tol(&self) -> R {
        R::lit(R::BASE_TOL) * self.lambda_max().max(R::zero())
    }

    pub fn optimal_scalar_bounds(&self, tol: Option<R>) -> FrameStatus<R> {
        let ev = self.eigenvalues();
        let (lmin, lmax) = (ev[0], ev[ev.len() - 1]);
        let tol = tol.unwrap_or_else(|| R::lit(R::BASE_TOL) * lmax.max(R::zero()));
        if lmin < tol || lmin <= R::zero() {
            return FrameStatus::NotFrame { lambda_min: lmin, lambda_max: lmax };
        }
        FrameStatus::Frame(ScalarBounds { lower: lmin.sqrt(), upper: lmax.sqrt() })
    }

    fn require_frame(&self, tol: Option<R>) -> Result<()> {
        let lmin = self.lambda_min();
        let tol = tol.unwrap_or_else(|| self.default_frame_tol());
        if lmin < tol || lmin <= R::zero() {
            return Err(Error::FrameDegenerate { lambda_min: lmin.as_f64(), tol: tol.as_f64() });
        }
        Ok(())
    }

    /// `G^-1`, formed once through a Cholesky factorization.
    pub fn inverse(&self, tol: Option<R>) -> Result<CMatrix<R>> {
        self.require_frame(tol)?;
        linalg::hpd_inverse(&self.gram).ok_or(Error::FrameDegenerate {
            lambda_min: self.lambda_min().as_f64(),
            tol: tol.unwrap_or_else(|| self.default_frame_tol()).as_f64(),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundSide {
    Lower,
    Upper,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CertificateStatus<R: Real> {
    /// Decided from the spectrum of `G`.
    VerifiedExact,
    /// No violation over this many probe vectors; necessary, not sufficient.
    VerifiedSampled { samples: usize },
    /// `witness` violates the inequality on `side`.
    Refuted { witness: ModuleVector<R>, side: BoundSide },
    NotFrame,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrameCertificate<R: Real> {
    pub status: CertificateStatus<R>,
    pub bounds: FrameBounds<R>,
    pub lambda_min: R,
    pub lambda_max: R,
    /// Smallest observed slack of the lower inequality (negative when violated).
    pub lower_margin: R,
    pub upper_margin: R,
    /// Seed of the sampled probes; `None` for exact certificates.
    pub seed: Option<u64>,
}

impl<R: Real> FrameCertificate<R> {
    pub fn is_refuted(&self) -> bool {
        matches!(self.status, CertificateStatus::Refuted { .. })
    }

    pub fn is_verified(&self) -> bool {
        matches!(self.status, CertificateStatus::VerifiedExact | CertificateStatus::VerifiedSampled { .. })
    }
}

/// The three numbers of `||A^-1||^-2 <= ||S|| <= ||B||^2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormCheck<R: Real> {
    pub lower: R,
    pub s_norm: R,
    pub upper: R,
    pub holds: bool,
}

/// Scalar multiple `c * id` of the identity on a module.
pub fn scalar_map<R: Real>(shape: ModuleShape, c: Complex<R>) -> ModuleMap<R> {
    ModuleMap::identity(shape).scale(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::QuadratureNode;
    use num_complex::Complex64;

    type Fam = OperatorFamily<f64>;
    type Map = ModuleMap<f64>;
    type E = AlgebraElement<f64>;

    fn shape(k: usize, d: usize) -> ModuleShape {
        ModuleShape::new(k, d).unwrap()
    }

    fn diff(a: &CMatrix<f64>, b: &CMatrix<f64>) -> f64 {
        linalg::max_abs_entry(&(a - b))
    }

    fn single_identity(s: ModuleShape) -> Fam {
        Fam::new(MeasureSpace::counting(1).unwrap(), s, vec![Map::identity(s)]).unwrap()
    }

    /// Two nodes of weight 1/2, both the identity: `G = I` exactly.
    fn halves(s: ModuleShape) -> Fam {
        let space = MeasureSpace::custom(vec![
            QuadratureNode { tag: 0.0, weight: 0.5 },
            QuadratureNode { tag: 1.0, weight: 0.5 },
        ])
        .unwrap();
        Fam::new(space, s, vec![Map::identity(s), Map::identity(s)]).unwrap()
    }

    fn diag_family(d: &[f64]) -> Fam {
        // k = 1, d = len, one node with action diag(sqrt(d_i)) so G = diag(d).
        let s = shape(1, d.len());
        let n = d.len();
        let action = CMatrix::from_fn(n, n, |i, j| if i == j { Complex64::new(d[i].sqrt(), 0.0) } else { Complex64::new(0.0, 0.0) });
        Fam::new(MeasureSpace::counting(1).unwrap(), s, vec![Map::from_action(s, s, action).unwrap()]).unwrap()
    }

    #[test]
    fn analysis_and_synthesis_examples() {
        let s = shape(2, 2);
        let f = single_identity(s);
        let mut rng = sampling::rng(1);
        let x: ModuleVector<f64> = sampling::random_vector(s, &mut rng);
        let c = f.analysis(&x).unwrap();
        assert_eq!(c.blocks(), &[x.clone()]);
        assert!(f.analysis(&ModuleVector::zeros(s)).unwrap().is_zero());
        assert_eq!(f.synthesis(&c).unwrap(), x);
        assert!(f.synthesis(&CoefficientField::zeros(&f)).unwrap().is_zero());
        assert!(f.analysis(&ModuleVector::zeros(shape(2, 1))).is_err());
    }

    #[test]
    fn coefficient_inner_product_examples() {
        let s = shape(2, 2);
        let space = MeasureSpace::counting(1).unwrap();
        let x = ModuleVector::from_components(&[E::identity(2), E::zero(2)]).unwrap();
        let y = ModuleVector::from_components(&[E::zero(2), E::identity(2)]).unwrap();
        let c1 = CoefficientField::new(space.clone(), vec![x]).unwrap();
        let c2 = CoefficientField::new(space, vec![y]).unwrap();
        assert_eq!(c1.inner_product(&c1).unwrap(), E::identity(2));
        assert_eq!(c1.inner_product(&c2).unwrap(), E::zero(2));
        let _ = s;
    }

    #[test]
    fn frame_operator_examples() {
        let s = shape(2, 2);
        assert_eq!(single_identity(s).frame_operator().gram(), &linalg::identity::<f64>(4));
        let two = Fam::new(MeasureSpace::counting(2).unwrap(), s, vec![Map::identity(s), Map::identity(s)]).unwrap();
        assert_eq!(two.frame_operator().gram(), &(linalg::identity::<f64>(4) * Complex64::new(2.0, 0.0)));
        let grid = MeasureSpace::uniform_grid(0.0, 1.0, 1000).unwrap();
        let f = Fam::from_fn(grid, s, |w| Map::identity(s).scale_real(w)).unwrap();
        let g = f.frame_operator();
        assert!(diff(g.gram(), &(linalg::identity::<f64>(4) * Complex64::new(1.0 / 3.0, 0.0))) < 1e-5);
    }

    #[test]
    fn optimal_bounds_examples() {
        let s = shape(2, 1);
        assert_eq!(single_identity(s).optimal_scalar_bounds(None), FrameStatus::Frame(ScalarBounds { lower: 1.0, upper: 1.0 }));
        let b = diag_family(&[1.0, 4.0, 4.0, 4.0]).optimal_scalar_bounds(None).bounds().unwrap();
        assert!((b.lower - 1.0).abs() < 1e-14 && (b.upper - 2.0).abs() < 1e-14);
        let degenerate = Fam::new(MeasureSpace::counting(1).unwrap(), s, vec![Map::zero(s, s)]).unwrap();
        assert!(matches!(degenerate.optimal_scalar_bounds(None), FrameStatus::NotFrame { .. }));
    }

    #[test]
    fn verify_examples() {
        let s = shape(2, 2);
        let f = halves(s);
        let cfg = SamplingConfig::default();
        let ok = f.verify_star_bounds(&FrameBounds::promote_scalar(1.0, 1.0, 2).unwrap(), cfg).unwrap();
        assert_eq!(ok.status, CertificateStatus::VerifiedExact);
        let bad = FrameBounds::promote_scalar(2.0, 2.0, 2).unwrap();
        let cert = f.verify_star_bounds(&bad, cfg).unwrap();
        match cert.status {
            CertificateStatus::Refuted { witness, side } => {
                assert_eq!(side, BoundSide::Lower);
                let p = witness.inner_product(&witness).unwrap();
                let lhs = p.scale_real(4.0);
                let mid = f.analysis(&witness).unwrap().inner_product(&f.analysis(&witness).unwrap()).unwrap();
                assert!(!lhs.loewner_leq(&mid, 1e-9).unwrap());
            }
            other => panic!("expected refutation, got {other:?}"),
        }
    }

    #[test]
    fn non_scalar_bounds_are_sampled_and_refuted() {
        // Any non-scalar bound fails on a rank-one probe.
        let s = shape(2, 1);
        let f = halves(s);
        let c = |re: f64| Complex64::new(re, 0.0);
        let lower = E::from_rows(&[vec![c(0.5), c(0.5)], vec![c(0.0), c(0.5)]]).unwrap();
        let bounds = FrameBounds::new(lower, E::real_scalar(2, 2.0), None).unwrap();
        let cert = f.verify_star_bounds(&bounds, SamplingConfig::new(50, 3)).unwrap();
        assert!(cert.is_refuted());
        assert_eq!(cert.seed, Some(3));
    }

    #[test]
    fn transform_norm_examples() {
        let s = shape(2, 2);
        assert!((halves(s).frame_transform_norm() - 1.0).abs() < 1e-15);
        let two = Fam::new(MeasureSpace::counting(2).unwrap(), s, vec![Map::identity(s), Map::identity(s)]).unwrap();
        assert!((two.frame_transform_norm() - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn dual_examples() {
        let s = shape(2, 2);
        let two = Fam::new(MeasureSpace::counting(2).unwrap(), s, vec![Map::identity(s), Map::identity(s)]).unwrap();
        let dual = two.canonical_dual(None).unwrap();
        for m in dual.maps() {
            assert!(diff(m.action(), Map::identity(s).scale_real(0.5).action()) < 1e-15);
        }
        let p = halves(s);
        assert_eq!(p.canonical_dual(None).unwrap(), p);
        let degenerate = Fam::new(MeasureSpace::counting(1).unwrap(), s, vec![Map::zero(s, s)]).unwrap();
        assert!(matches!(degenerate.canonical_dual(None), Err(Error::FrameDegenerate { .. })));
    }

    #[test]
    fn transform_examples() {
        let s = shape(2, 2);
        let mut rng = sampling::rng(4);
        let f = Fam::new(MeasureSpace::counting(3).unwrap(), s, (0..3).map(|_| sampling::random_map(s, shape(2, 2), &mut rng)).collect()).unwrap();
        assert_eq!(f.transform_family(&Map::identity(s), None).unwrap(), f);
        let g2 = f.transform_family(&Map::identity(s).scale_real(2.0), None).unwrap().frame_operator();
        assert!(diff(g2.gram(), &(f.frame_operator().gram() * Complex64::new(4.0, 0.0))) < 1e-12);
        assert!(matches!(f.transform_family(&Map::zero(s, s), None), Err(Error::NotInvertible { .. })));
        let b = FrameBounds::promote_scalar(1.0, 1.0, 2).unwrap();
        assert_eq!(b.transformed(&Map::identity(s), None).unwrap(), b);
        let t2 = b.transformed(&Map::identity(s).scale_real(2.0), None).unwrap();
        assert!(diff(t2.lower.entries(), E::real_scalar(2, 2.0).entries()) < 1e-14);
        assert!(diff(t2.upper.entries(), E::real_scalar(2, 2.0).entries()) < 1e-14);
    }

    #[test]
    fn reconstruct_examples() {
        let s = shape(2, 3);
        let f = halves(s);
        let mut rng = sampling::rng(9);
        let x: ModuleVector<f64> = sampling::random_vector(s, &mut rng);
        let back = f.reconstruct(&f.analysis(&x).unwrap(), None).unwrap();
        assert!(diff(back.flat(), x.flat()) <= 1e-12);
        assert!(f.reconstruct(&CoefficientField::zeros(&f), None).unwrap().is_zero());
    }

    #[test]
    fn norm_check_examples() {
        let p = halves(shape(1, 2));
        let c = p.frame_operator_norm_check(&FrameBounds::promote_scalar(1.0, 1.0, 1).unwrap());
        assert!(c.holds && c.lower == 1.0 && c.s_norm == 1.0 && c.upper == 1.0);
        let f = diag_family(&[1.0, 4.0]);
        let c = f.frame_operator_norm_check(&FrameBounds::promote_scalar(1.0, 2.0, 1).unwrap());
        assert!(c.holds);
        assert!((c.lower - 1.0).abs() < 1e-14 && (c.s_norm - 4.0).abs() < 1e-14 && (c.upper - 4.0).abs() < 1e-14);
    }

    #[test]
    fn bounds_validation() {
        assert!(FrameBounds::<f64>::promote_scalar(0.0, 1.0, 2).is_err());
        assert!(FrameBounds::<f64>::promote_scalar(1.0, -1.0, 2).is_err());
        let b = FrameBounds::<f64>::promote_scalar(2.0, 3.0, 1).unwrap();
        assert_eq!(b.lower, E::real_scalar(1, 2.0));
        assert_eq!(b.upper, E::real_scalar(1, 3.0));
        assert!(FrameBounds::new(E::diagonal(&[1.0, 0.0]), E::identity(2), None).is_err());
    }

    #[test]
    fn family_validation() {
        let s = shape(2, 2);
        assert!(Fam::new(MeasureSpace::counting(2).unwrap(), s, vec![Map::identity(s)]).is_err());
        assert!(Fam::new(MeasureSpace::counting(1).unwrap(), s, vec![Map::identity(shape(2, 1))]).is_err());
    }

    #[test]
    fn f32_family_round_trip() {
        let s = shape(2, 2);
        let mut rng = sampling::rng(12);
        let maps: Vec<ModuleMap<f32>> = (0..4).map(|_| sampling::random_map(s, s, &mut rng)).collect();
        let f = OperatorFamily::new(MeasureSpace::counting(4).unwrap(), s, maps).unwrap();
        let x: ModuleVector<f32> = sampling::random_vector(s, &mut rng);
        let back = f.reconstruct(&f.analysis(&x).unwrap(), None).unwrap();
        let err = linalg::max_abs_entry(&(back.flat() - x.flat()));
        assert!(err < 1e-3, "f32 reconstruction error {err}");
    }
}
