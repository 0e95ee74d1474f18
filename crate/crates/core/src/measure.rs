//! Finite discretizations of the index measure space `(Omega, mu)`.

use crate::cstar::AlgebraElement;
use crate::error::{Error, Result};
use crate::scalar::{cx, CMatrix, Real};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureNode<R: Real> {
    /// Position `w` in `Omega` (the integer index for counting measures).
    pub tag: R,
    pub weight: R,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MeasureKind<R: Real> {
    Counting,
    /// Composite midpoint rule on `[a, b]`.
    UniformGrid { a: R, b: R },
    Custom,
}

impl<R: Real> MeasureKind<R> {
    pub fn name(&self) -> &'static str {
        match self {
            MeasureKind::Counting => "counting",
            MeasureKind::UniformGrid { .. } => "grid",
            MeasureKind::Custom => "custom",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasureSpace<R: Real> {
    nodes: Vec<QuadratureNode<R>>,
    kind: MeasureKind<R>,
}

impl<R: Real> MeasureSpace<R> {
    /// Counting measure on `{1, ..., n}`.
    pub fn counting(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("counting measure needs n >= 1".into()));
        }
        let nodes = (1..=n)
            .map(|i| QuadratureNode { tag: R::from_usize(i).expect("index fits"), weight: R::one() })
            .collect();
        Ok(Self { nodes, kind: MeasureKind::Counting })
    }

    /// Midpoint rule on `[a, b]`: tags `a + (i - 1/2) h`, weights `h = (b - a) / n`.
    pub fn uniform_grid(a: R, b: R, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("grid needs n >= 1".into()));
        }
        if !(a < b) {
            return Err(Error::InvalidArgument(format!("grid needs a < b, got a={a}, b={b}")));
        }
        let nr = R::from_usize(n).expect("n fits");
        let h = (b - a) / nr;
        let half = R::lit(0.5);
        let nodes = (0..n)
            .map(|i| QuadratureNode { tag: a + (R::from_usize(i).expect("fits") + half) * h, weight: h })
            .collect();
        Ok(Self { nodes, kind: MeasureKind::UniformGrid { a, b } })
    }

    pub fn custom(nodes: Vec<QuadratureNode<R>>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidArgument("measure needs at least one node".into()));
        }
        if let Some((i, n)) = nodes.iter().enumerate().find(|(_, n)| !(n.weight >= R::zero()) || !n.weight.is_finite()) {
            return Err(Error::InvalidArgument(format!("node {i} has invalid weight {}", n.weight)));
        }
        Ok(Self { nodes, kind: MeasureKind::Custom })
    }

    pub fn nodes(&self) -> &[QuadratureNode<R>] {
        &self.nodes
    }

    pub fn kind(&self) -> MeasureKind<R> {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn weights(&self) -> impl Iterator<Item = R> + '_ {
        self.nodes.iter().map(|n| n.weight)
    }

    pub fn total_mass(&self) -> R {
        self.weights().fold(R::zero(), |a, w| a + w)
    }

    /// `sum_i weight_i f(node_i)`, accumulated left to right.
    pub fn integrate<F>(&self, mut f: F) -> Result<AlgebraElement<R>>
    where
        F: FnMut(&QuadratureNode<R>) -> AlgebraElement<R>,
    {
        let mut acc: Option<CMatrix<R>> = None;
        for node in &self.nodes {
            let v = f(node);
            let term = v.entries() * cx(node.weight);
            match acc.as_mut() {
                None => acc = Some(term),
                Some(a) => {
                    if a.shape() != term.shape() {
                        return Err(Error::DimensionMismatch { expected: a.nrows(), found: term.nrows() });
                    }
                    *a += term;
                }
            }
        }
        AlgebraElement::from_matrix(acc.expect("non-empty measure"))
    }

    /// Same fixed-order weighted sum for rectangular matrix-valued integrands.
    pub fn integrate_matrix<F>(&self, mut f: F) -> Result<CMatrix<R>>
    where
        F: FnMut(usize, &QuadratureNode<R>) -> CMatrix<R>,
    {
        let mut acc: Option<CMatrix<R>> = None;
        for (i, node) in self.nodes.iter().enumerate() {
            let term = f(i, node) * cx(node.weight);
            match acc.as_mut() {
                None => acc = Some(term),
                Some(a) => {
                    if a.shape() != term.shape() {
                        return Err(Error::ShapeMismatch(format!(
                            "integrand at node {i} is {}x{}, expected {}x{}",
                            term.nrows(),
                            term.ncols(),
                            a.nrows(),
                            a.ncols()
                        )));
                    }
                    *a += term;
                }
            }
        }
        Ok(acc.expect("non-empty measure"))
    }

    /// The same grid with `n * factor` nodes.
    pub fn refine(&self, factor: usize) -> Result<Self> {
        if factor == 0 {
            return Err(Error::InvalidArgument("refinement factor must be >= 1".into()));
        }
        match self.kind {
            MeasureKind::UniformGrid { a, b } => Self::uniform_grid(a, b, self.len() * factor),
            other => Err(Error::NotRefinable(other.name())),
        }
    }
}
