//! Scenario files: a JSON description of one family (and optionally a second,
//! perturbed family) plus whatever extra inputs the subcommands need.
//!
//! Matrices are written row-major as nested rows of `[re, im]` pairs. Module
//! vectors of `A^d` are `k x dk` matrices and map actions are `dk x d'k`
//! matrices acting on the right.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use starframe::{
    CMatrix, Complex64, FrameBounds, MeasureSpace, ModuleMap, ModuleShape, ModuleVector, OperatorFamily,
    QuadratureNode,
};

pub type MatrixLiteral = Vec<Vec<[f64; 2]>>;

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("parse error at line {line}, column {column} (field `{field}`): {message}")]
    Parse { line: usize, column: usize, field: String, message: String },
    #[error("invalid scenario: {field}: {message}")]
    Validation { field: String, message: String },
}

impl ScenarioError {
    fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        ScenarioError::Validation { field: field.into(), message: message.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub k: usize,
    pub d: usize,
    pub measure: MeasureSpec,
    pub family: FamilySpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transform: Option<MatrixLiteral>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbed: Option<FamilySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbed_bounds: Option<BoundsSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vector: Option<MatrixLiteral>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureSpec {
    Counting { n: usize },
    Grid { a: f64, b: f64, n: usize },
    Custom { nodes: Vec<NodeSpec> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeSpec {
    pub tag: f64,
    pub weight: f64,
}

/// Per-node actions, either listed or given as `sum_j w^j C_j` in the node tag `w`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    Explicit { codomain_rank: usize, actions: Vec<MatrixLiteral> },
    Polynomial { codomain_rank: usize, coefficients: Vec<MatrixLiteral> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundsSpec {
    Scalar { a: f64, b: f64 },
    Matrix { lower: MatrixLiteral, upper: MatrixLiteral },
}

/// A scenario with every block converted to library types.
#[derive(Clone, Debug)]
pub struct Built {
    pub shape: ModuleShape,
    pub family: OperatorFamily,
    pub bounds: Option<FrameBounds>,
    pub transform: Option<ModuleMap>,
    pub perturbed: Option<OperatorFamily>,
    pub perturbed_bounds: Option<FrameBounds>,
    pub vector: Option<ModuleVector>,
}

pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let scenario: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        ScenarioError::Parse { line: inner.line(), column: inner.column(), field, message: inner.to_string() }
    })?;
    scenario.build()?;
    Ok(scenario)
}

pub fn load_scenario(path: &Path) -> Result<(Scenario, Vec<u8>), ScenarioError> {
    let bytes = fs::read(path).map_err(|source| ScenarioError::Io { path: path.display().to_string(), source })?;
    let text = String::from_utf8_lossy(&bytes);
    Ok((parse_scenario(&text)?, bytes))
}

/// Canonical serialization: fixed key order, shortest round-trip floats,
/// two-space indentation and a trailing newline.
pub fn to_canonical_string(scenario: &Scenario) -> String {
    let mut s = serde_json::to_string_pretty(scenario).expect("scenario serializes");
    s.push('\n');
    s
}

pub fn save_scenario(scenario: &Scenario, path: &Path) -> Result<(), ScenarioError> {
    fs::write(path, to_canonical_string(scenario))
        .map_err(|source| ScenarioError::Io { path: path.display().to_string(), source })
}

pub fn matrix_from_literal(lit: &MatrixLiteral, field: &str) -> Result<CMatrix<f64>, ScenarioError> {
    let rows = lit.len();
    let cols = lit.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return Err(ScenarioError::invalid(field, "matrix must be non-empty"));
    }
    if let Some(i) = lit.iter().position(|r| r.len() != cols) {
        return Err(ScenarioError::invalid(
            field,
            format!("row {i} has {} entries, expected {cols}", lit[i].len()),
        ));
    }
    if lit.iter().flatten().flatten().any(|v| !v.is_finite()) {
        return Err(ScenarioError::invalid(field, "entries must be finite"));
    }
    Ok(CMatrix::from_fn(rows, cols, |i, j| Complex64::new(lit[i][j][0], lit[i][j][1])))
}

pub fn matrix_to_literal(m: &CMatrix<f64>) -> MatrixLiteral {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

fn expect_shape(m: &CMatrix<f64>, rows: usize, cols: usize, field: &str, what: &str) -> Result<(), ScenarioError> {
    if m.shape() != (rows, cols) {
        return Err(ScenarioError::invalid(
            field,
            format!("{what} must be {rows}x{cols}, found {}x{}", m.nrows(), m.ncols()),
        ));
    }
    Ok(())
}

impl MeasureSpec {
    pub fn build(&self) -> Result<MeasureSpace, ScenarioError> {
        let space = match self {
            MeasureSpec::Counting { n } => MeasureSpace::counting(*n),
            MeasureSpec::Grid { a, b, n } => MeasureSpace::uniform_grid(*a, *b, *n),
            MeasureSpec::Custom { nodes } => {
                MeasureSpace::custom(nodes.iter().map(|n| QuadratureNode { tag: n.tag, weight: n.weight }).collect())
            }
        };
        space.map_err(|e| ScenarioError::invalid("measure", e.to_string()))
    }
}

impl FamilySpec {
    pub fn codomain_rank(&self) -> usize {
        match self {
            FamilySpec::Explicit { codomain_rank, .. } | FamilySpec::Polynomial { codomain_rank, .. } => *codomain_rank,
        }
    }

    pub fn build(&self, shape: ModuleShape, space: MeasureSpace, field: &str) -> Result<OperatorFamily, ScenarioError> {
        let codomain = ModuleShape::new(shape.k, self.codomain_rank())
            .map_err(|e| ScenarioError::invalid(format!("{field}.codomain_rank"), e.to_string()))?;
        let (rows, cols) = (shape.flat_width(), codomain.flat_width());
        let actions = match self {
            FamilySpec::Explicit { actions, .. } => {
                if actions.len() != space.len() {
                    return Err(ScenarioError::invalid(
                        format!("{field}.actions"),
                        format!("{} actions for {} measure nodes", actions.len(), space.len()),
                    ));
                }
                actions
                    .iter()
                    .enumerate()
                    .map(|(i, lit)| {
                        let f = format!("{field}.actions[{i}]");
                        let m = matrix_from_literal(lit, &f)?;
                        expect_shape(&m, rows, cols, &f, "action of node")?;
                        Ok(m)
                    })
                    .collect::<Result<Vec<_>, ScenarioError>>()?
            }
            FamilySpec::Polynomial { coefficients, .. } => {
                if coefficients.is_empty() {
                    return Err(ScenarioError::invalid(format!("{field}.coefficients"), "need at least one coefficient"));
                }
                let coeffs = coefficients
                    .iter()
                    .enumerate()
                    .map(|(j, lit)| {
                        let f = format!("{field}.coefficients[{j}]");
                        let m = matrix_from_literal(lit, &f)?;
                        expect_shape(&m, rows, cols, &f, "coefficient")?;
                        Ok(m)
                    })
                    .collect::<Result<Vec<_>, ScenarioError>>()?;
                space.nodes().iter().map(|node| polynomial_action(&coeffs, node.tag)).collect()
            }
        };
        let maps = actions
            .into_iter()
            .enumerate()
            .map(|(i, a)| {
                ModuleMap::from_action(shape, codomain, a)
                    .map_err(|e| ScenarioError::invalid(format!("{field} node {i}"), e.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        OperatorFamily::new(space, shape, maps).map_err(|e| ScenarioError::invalid(field, e.to_string()))
    }
}

/// Horner evaluation of `sum_j w^j C_j`.
pub fn polynomial_action(coeffs: &[CMatrix<f64>], w: f64) -> CMatrix<f64> {
    let wc = Complex64::new(w, 0.0);
    let mut acc = coeffs[coeffs.len() - 1].clone();
    for c in coeffs.iter().rev().skip(1) {
        acc = acc * wc + c;
    }
    acc
}

impl BoundsSpec {
    pub fn build(&self, k: usize, field: &str) -> Result<FrameBounds, ScenarioError> {
        let bounds = match self {
            BoundsSpec::Scalar { a, b } => FrameBounds::promote_scalar(*a, *b, k),
            BoundsSpec::Matrix { lower, upper } => {
                let lo = matrix_from_literal(lower, &format!("{field}.lower"))?;
                let hi = matrix_from_literal(upper, &format!("{field}.upper"))?;
                expect_shape(&lo, k, k, &format!("{field}.lower"), "bound")?;
                expect_shape(&hi, k, k, &format!("{field}.upper"), "bound")?;
                let lo = starframe::AlgebraElement::from_matrix(lo).map_err(|e| ScenarioError::invalid(field, e.to_string()))?;
                let hi = starframe::AlgebraElement::from_matrix(hi).map_err(|e| ScenarioError::invalid(field, e.to_string()))?;
                FrameBounds::new(lo, hi, None)
            }
        };
        bounds.map_err(|e| ScenarioError::invalid(field, e.to_string()))
    }
}

impl Scenario {
    pub fn shape(&self) -> Result<ModuleShape, ScenarioError> {
        ModuleShape::new(self.k, self.d).map_err(|e| ScenarioError::invalid("k/d", e.to_string()))
    }

    pub fn build(&self) -> Result<Built, ScenarioError> {
        let shape = self.shape()?;
        let space = self.measure.build()?;
        let family = self.family.build(shape, space.clone(), "family")?;
        let bounds = self.bounds.as_ref().map(|b| b.build(shape.k, "bounds")).transpose()?;
        let transform = match &self.transform {
            Some(lit) => {
                let m = matrix_from_literal(lit, "transform")?;
                expect_shape(&m, shape.flat_width(), shape.flat_width(), "transform", "transform")?;
                Some(ModuleMap::from_action(shape, shape, m).map_err(|e| ScenarioError::invalid("transform", e.to_string()))?)
            }
            None => None,
        };
        let perturbed = self.perturbed.as_ref().map(|f| f.build(shape, space, "perturbed")).transpose()?;
        if self.perturbed_bounds.is_some() && self.perturbed.is_none() {
            return Err(ScenarioError::invalid("perturbed_bounds", "given without a perturbed family"));
        }
        let perturbed_bounds = self.perturbed_bounds.as_ref().map(|b| b.build(shape.k, "perturbed_bounds")).transpose()?;
        if let Some(m) = self.m {
            if !(m > 0.0 && m.is_finite()) {
                return Err(ScenarioError::invalid("m", format!("must be positive and finite, got {m}")));
            }
        }
        if let Some(t) = self.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(ScenarioError::invalid("tol", format!("must be positive and finite, got {t}")));
            }
        }
        let vector = match &self.vector {
            Some(lit) => {
                let m = matrix_from_literal(lit, "vector")?;
                expect_shape(&m, shape.k, shape.flat_width(), "vector", "module vector")?;
                Some(ModuleVector::from_flat(shape, m).map_err(|e| ScenarioError::invalid("vector", e.to_string()))?)
            }
            None => None,
        };
        Ok(Built { shape, family, bounds, transform, perturbed, perturbed_bounds, vector })
    }

    /// Scenario whose family is given explicitly by `family`'s actions, all
    /// other blocks copied from `self`.
    pub fn with_explicit_family(&self, family: &OperatorFamily) -> Scenario {
        let codomain_rank = family.maps().first().map_or(self.family.codomain_rank(), |m| m.codomain().d);
        let actions = family.maps().iter().map(|m| matrix_to_literal(m.action())).collect();
        Scenario { family: FamilySpec::Explicit { codomain_rank, actions }, ..self.clone() }
    }
}
