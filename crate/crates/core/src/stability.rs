//! Perturbation of frames: the deviation gap between two families on the same
//! measure space, the stability constant built from their bounds, and the
//! two-sided criterion
//!
//! ```text
//! || int <(L_w - G_w) x, (L_w - G_w) x> dmu ||
//!     <= M min(|| int <L_w x, L_w x> dmu ||, || int <G_w x, G_w x> dmu ||)
//! ```
//!
//! The left side at `x` is `||X G_delta X*||` with
//! `G_delta = sum_i weight_i (M_i - P_i)(M_i - P_i)*`.

use crate::error::{Error, Result};
use crate::frame::{FrameBounds, OperatorFamily, SamplingConfig, ScalarBounds};
use crate::hilbert_module::ModuleVector;
use crate::linalg;
use crate::sampling;
use crate::scalar::{cx, CMatrix, Real};

/// `G_delta = sum_i weight_i (M_i - P_i)(M_i - P_i)*`.
pub fn deviation_operator<R: Real>(f1: &OperatorFamily<R>, f2: &OperatorFamily<R>) -> Result<CMatrix<R>> {
    f1.check_compatible(f2)?;
    f1.space().integrate_matrix(|i, _| {
        let diff = f1.maps()[i].action() - f2.maps()[i].action();
        &diff * diff.adjoint()
    })
}

/// Left side of the criterion at `x`, summed node by node.
pub fn perturbation_gap<R: Real>(f1: &OperatorFamily<R>, f2: &OperatorFamily<R>, x: &ModuleVector<R>) -> Result<R> {
    f1.check_compatible(f2)?;
    let c1 = f1.analysis(x)?;
    let c2 = f2.analysis(x)?;
    let delta = c1.sub(&c2)?;
    Ok(delta.inner_product(&delta)?.norm())
}

/// The two one-sided constants for bounds `(A, B)` of the first family and
/// `(C, D)` of the second:
///
/// * `against_second = (||B|| ||C^-1|| + 1)^2`, with
///   `||int <(L-G)x,(L-G)x>|| <= against_second * ||int <G x, G x>||`;
/// * `against_first = (||D|| ||A^-1|| + 1)^2`, with
///   `||int <(L-G)x,(L-G)x>|| <= against_first * ||int <L x, L x>||`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StabilityConstants<R: Real> {
    pub against_second: R,
    pub against_first: R,
}

impl<R: Real> StabilityConstants<R> {
    pub fn new(first: &FrameBounds<R>, second: &FrameBounds<R>) -> Result<Self> {
        let inv_norm = |e: &crate::cstar::AlgebraElement<R>| -> Result<R> {
            let tol = R::default_tol(e.norm());
            Ok(e.inverse(tol)?.norm())
        };
        let a_inv = inv_norm(&first.lower)?;
        let c_inv = inv_norm(&second.lower)?;
        inv_norm(&first.upper)?;
        inv_norm(&second.upper)?;
        let one = R::one();
        let left = first.upper.norm() * c_inv + one;
        let right = second.upper.norm() * a_inv + one;
        Ok(Self { against_second: left * left, against_first: right * right })
    }

    /// The smaller constant; this is the value the criterion is usually quoted with.
    pub fn min(&self) -> R {
        self.against_second.min(self.against_first)
    }

    /// The larger constant. Only this one bounds the left side by `M` times the
    /// smaller of the two right-hand norms for every `x`: the smaller constant
    /// controls the gap against one family only.
    pub fn max(&self) -> R {
        self.against_second.max(self.against_first)
    }
}

/// `M = min{(||B|| ||C^-1|| + 1)^2, (||D|| ||A^-1|| + 1)^2}` for bounds
/// `(A, B)` of the first family and `(C, D)` of the second.
///
/// This constant does not in general make the criterion hold for two frames;
/// see [`guaranteed_stability_constant`].
pub fn stability_constant<R: Real>(first: &FrameBounds<R>, second: &FrameBounds<R>) -> Result<R> {
    Ok(StabilityConstants::new(first, second)?.min())
}

/// `max{(||B|| ||C^-1|| + 1)^2, (||D|| ||A^-1|| + 1)^2}`: the smallest constant
/// of this form for which two frames always satisfy the criterion.
pub fn guaranteed_stability_constant<R: Real>(first: &FrameBounds<R>, second: &FrameBounds<R>) -> Result<R> {
    Ok(StabilityConstants::new(first, second)?.max())
}

/// Norm-frame bounds `(c, d)` guaranteed for the second family whenever the
/// criterion holds with constant `M` against a frame with bounds `(A, B)`:
/// `c = ||A^-1||^-1 / (1 + sqrt(M))`, `d = (1 + sqrt(M)) ||B||`.
pub fn perturbed_frame_bounds<R: Real>(bounds: &FrameBounds<R>, m: R) -> Result<ScalarBounds<R>> {
    if !(m > R::zero()) {
        return Err(Error::InvalidArgument(format!("stability constant must be positive, got {m}")));
    }
    let tol = R::default_tol(bounds.lower.norm());
    let a_inv = bounds.lower.inverse(tol)?.norm();
    let factor = R::one() + m.sqrt();
    Ok(ScalarBounds { lower: R::one() / (a_inv * factor), upper: factor * bounds.upper.norm() })
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict<R: Real> {
    /// `G_delta <= M G_1` and `G_delta <= M G_2`, so the criterion holds for every `x`.
    HoldsSufficient,
    /// No violation over this many probes.
    HoldsSampled { samples: usize },
    Violated { witness: ModuleVector<R>, ratio: R },
}

#[derive(Clone, Debug, PartialEq)]
pub struct PerturbationReport<R: Real> {
    pub gap_operator: CMatrix<R>,
    pub gap_lambda_min: R,
    pub gap_lambda_max: R,
    pub m_used: R,
    /// Largest observed `lhs / min(rhs norms)` over the probes.
    pub max_ratio: R,
    pub samples: usize,
    pub seed: u64,
    pub verdict: Verdict<R>,
    pub derived_bounds: Option<ScalarBounds<R>>,
}

impl<R: Real> PerturbationReport<R> {
    pub fn is_violated(&self) -> bool {
        matches!(self.verdict, Verdict::Violated { .. })
    }

    /// Fill in `(c, d)` from the first family's bounds when the exact tier held.
    pub fn with_derived_bounds(mut self, bounds: &FrameBounds<R>) -> Result<Self> {
        if self.verdict == Verdict::HoldsSufficient {
            self.derived_bounds = Some(perturbed_frame_bounds(bounds, self.m_used)?);
        }
        Ok(self)
    }
}

/// Two-tier check of the criterion with constant `m`.
///
/// Tier 1 is the exact sufficient Loewner test. Tier 2 evaluates both sides at
/// every matrix unit and `sampling.samples` seeded random vectors; a ratio above
/// `m + BASE_TOL * max(1, m)` is a violation.
pub fn check_criterion<R: Real>(
    f1: &OperatorFamily<R>,
    f2: &OperatorFamily<R>,
    m: R,
    sampling: SamplingConfig,
) -> Result<PerturbationReport<R>> {
    if !(m > R::zero()) {
        return Err(Error::InvalidArgument(format!("stability constant must be positive, got {m}")));
    }
    let gap = deviation_operator(f1, f2)?;
    let g1 = f1.frame_operator().gram().clone();
    let g2 = f2.frame_operator().gram().clone();
    let mc = cx(m);
    let scale = linalg::spectral_norm(&gap).max(linalg::spectral_norm(&g1) * m).max(linalg::spectral_norm(&g2) * m);
    let tol = R::default_tol(scale);
    let gap_ev = linalg::hermitian_eigenvalues(&gap, tol)?;
    let sufficient = linalg::loewner_leq(&gap, &(&g1 * mc), tol)? && linalg::loewner_leq(&gap, &(&g2 * mc), tol)?;

    let slack = R::lit(R::BASE_TOL) * m.max(R::one());
    let mut rng = sampling::rng(sampling.seed);
    let domain = f1.domain();
    let probes = sampling::basis_vectors::<R>(domain)
        .into_iter()
        .chain((0..sampling.samples).map(|_| sampling::random_vector(domain, &mut rng)));
    let mut max_ratio = R::zero();
    let mut count = 0;
    let mut violation = None;
    for x in probes {
        count += 1;
        let xf = x.flat();
        let quad = |g: &CMatrix<R>| linalg::spectral_norm(&(xf * g * xf.adjoint()));
        let lhs = quad(&gap);
        let floor = quad(&g1).min(quad(&g2));
        let ratio = if floor > R::zero() {
            lhs / floor
        } else if lhs <= tol {
            R::zero()
        } else {
            R::max_value().unwrap_or_else(|| R::lit(f64::MAX))
        };
        if ratio > max_ratio {
            max_ratio = ratio;
        }
        if violation.is_none() && ratio > m + slack {
            violation = Some((x, ratio));
        }
    }

    let verdict = match violation {
        Some((witness, ratio)) => Verdict::Violated { witness, ratio },
        None if sufficient => Verdict::HoldsSufficient,
        None => Verdict::HoldsSampled { samples: count },
    };
    Ok(PerturbationReport {
        gap_lambda_min: gap_ev[0],
        gap_lambda_max: gap_ev[gap_ev.len() - 1],
        gap_operator: gap,
        m_used: m,
        max_ratio,
        samples: count,
        seed: sampling.seed,
        verdict,
        derived_bounds: None,
    })
}
