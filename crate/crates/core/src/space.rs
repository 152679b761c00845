//! Finite metric measure spaces and scalar tables on them.
//!
//! A space is a triple `(X, d, m)`: `n` points, an `n×n` distance matrix and a
//! vector of positive point weights, optionally carrying a Euclidean embedding
//! (coordinates per point) which is what makes polyline curves constructible.
//! On such spaces every subset is Borel and the measure is trivially Borel
//! regular and σ-finite, so the measure-theoretic hypotheses of the theorems
//! verified downstream hold automatically.

use crate::exact;
use crate::{Error, Result};

/// Finite metric measure space `(X, d, m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricMeasureSpace {
    dist: Vec<Vec<f64>>,
    weight: Vec<f64>,
    coords: Option<Vec<Vec<f64>>>,
}

/// First violated space invariant, with indices for diagnosis.
#[derive(Debug, Clone, PartialEq)]
pub enum SpaceViolation {
    Shape(String),
    NotFinite { i: usize, j: usize },
    NonzeroDiagonal { i: usize },
    Asymmetry { i: usize, j: usize },
    NonpositiveOffDiagonal { i: usize, j: usize },
    Triangle { i: usize, j: usize, k: usize },
    NonpositiveWeight { i: usize },
    EmbeddingMismatch { i: usize, j: usize, matrix: f64, euclidean: f64 },
}

impl std::fmt::Display for SpaceViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SpaceViolation::Shape(msg) => write!(f, "shape: {msg}"),
            SpaceViolation::NotFinite { i, j } => {
                write!(f, "dist[{i}][{j}] is not finite")
            }
            SpaceViolation::NonzeroDiagonal { i } => {
                write!(f, "dist[{i}][{i}] must be 0")
            }
            SpaceViolation::Asymmetry { i, j } => {
                write!(f, "asymmetry at ({i},{j})")
            }
            SpaceViolation::NonpositiveOffDiagonal { i, j } => {
                write!(f, "dist[{i}][{j}] must be positive for distinct points")
            }
            SpaceViolation::Triangle { i, j, k } => {
                write!(f, "triangle inequality fails: d({i},{k}) > d({i},{j}) + d({j},{k})")
            }
            SpaceViolation::NonpositiveWeight { i } => {
                write!(f, "weight[{i}] must be positive")
            }
            SpaceViolation::EmbeddingMismatch { i, j, matrix, euclidean } => {
                write!(
                    f,
                    "dist[{i}][{j}] = {matrix} does not match embedded distance {euclidean}"
                )
            }
        }
    }
}

/// Checks all space invariants and returns the first violation found, in a
/// fixed order: shape, finiteness, diagonal, symmetry, positivity, triangle
/// inequality (exact on the dyadic-rational inputs), weights, embedding
/// consistency (1e-12 relative).
pub fn validate_space(s: &MetricMeasureSpace) -> std::result::Result<(), SpaceViolation> {
    let n = s.dist.len();
    if n == 0 {
        return Err(SpaceViolation::Shape("space must have at least one point".into()));
    }
    for (i, row) in s.dist.iter().enumerate() {
        if row.len() != n {
            return Err(SpaceViolation::Shape(format!(
                "dist row {i} has length {} but n = {n}",
                row.len()
            )));
        }
    }
    if s.weight.len() != n {
        return Err(SpaceViolation::Shape(format!(
            "weight has length {} but n = {n}",
            s.weight.len()
        )));
    }
    for i in 0..n {
        for j in 0..n {
            if !s.dist[i][j].is_finite() {
                return Err(SpaceViolation::NotFinite { i, j });
            }
        }
    }
    for i in 0..n {
        if s.dist[i][i] != 0.0 {
            return Err(SpaceViolation::NonzeroDiagonal { i });
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if s.dist[i][j] != s.dist[j][i] {
                return Err(SpaceViolation::Asymmetry { i, j });
            }
            if s.dist[i][j] <= 0.0 {
                return Err(SpaceViolation::NonpositiveOffDiagonal { i, j });
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if !exact::triangle_holds(s.dist[i][k], s.dist[i][j], s.dist[j][k]) {
                    return Err(SpaceViolation::Triangle { i, j, k });
                }
            }
        }
    }
    for i in 0..n {
        if !(s.weight[i] > 0.0) || !s.weight[i].is_finite() {
            return Err(SpaceViolation::NonpositiveWeight { i });
        }
    }
    if let Some(coords) = &s.coords {
        if coords.len() != n {
            return Err(SpaceViolation::Shape(format!(
                "coords has {} rows but n = {n}",
                coords.len()
            )));
        }
        let dim = coords[0].len();
        for (i, row) in coords.iter().enumerate() {
            if row.len() != dim {
                return Err(SpaceViolation::Shape(format!(
                    "coords row {i} has length {} but the embedding dimension is {dim}",
                    row.len()
                )));
            }
            if row.iter().any(|x| !x.is_finite()) {
                return Err(SpaceViolation::Shape(format!("coords row {i} is not finite")));
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let e = euclidean(&coords[i], &coords[j]);
                let scale = s.dist[i][j].abs().max(e.abs()).max(1.0);
                if (s.dist[i][j] - e).abs() > 1e-12 * scale {
                    return Err(SpaceViolation::EmbeddingMismatch {
                        i,
                        j,
                        matrix: s.dist[i][j],
                        euclidean: e,
                    });
                }
            }
        }
    }
    Ok(())
}

pub fn euclidean(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

impl MetricMeasureSpace {
    /// Builds a validated space.
    pub fn new(
        dist: Vec<Vec<f64>>,
        weight: Vec<f64>,
        coords: Option<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        let s = Self { dist, weight, coords };
        validate_space(&s).map_err(|v| Error::Space(v.to_string()))?;
        Ok(s)
    }

    /// Builds a space without validation. Only for experiments that need
    /// invalid data on purpose (e.g. zero-weight points); every guarantee in
    /// this crate assumes validated spaces.
    pub fn new_unchecked(
        dist: Vec<Vec<f64>>,
        weight: Vec<f64>,
        coords: Option<Vec<Vec<f64>>>,
    ) -> Self {
        Self { dist, weight, coords }
    }

    /// Space of points in ℝ^k with Euclidean distances and given weights.
    pub fn from_coords(coords: Vec<Vec<f64>>, weight: Vec<f64>) -> Result<Self> {
        let n = coords.len();
        let mut dist = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                dist[i][j] = euclidean(&coords[i], &coords[j]);
            }
        }
        Self::new(dist, weight, Some(coords))
    }

    pub fn n(&self) -> usize {
        self.dist.len()
    }

    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i][j]
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weight[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weight
    }

    pub fn dist_matrix(&self) -> &[Vec<f64>] {
        &self.dist
    }

    pub fn has_embedding(&self) -> bool {
        self.coords.is_some()
    }

    pub fn embedding_dim(&self) -> Option<usize> {
        self.coords.as_ref().map(|c| c[0].len())
    }

    pub fn coords_row(&self, i: usize) -> Option<&[f64]> {
        self.coords.as_ref().map(|c| c[i].as_slice())
    }

    pub fn coords(&self) -> Option<&[Vec<f64>]> {
        self.coords.as_deref()
    }

    /// Index of the point whose embedding equals `x` bitwise, if any. Used to
    /// canonicalize curve values that land exactly on a space point.
    pub fn point_of_coords(&self, x: &[f64]) -> Option<usize> {
        let rows = self.coords.as_ref()?;
        rows.iter().position(|r| r.as_slice() == x)
    }
}

/// Table of extended-real values, one per space point.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarFunction {
    values: Vec<f64>,
}

impl ScalarFunction {
    /// `NaN` entries are rejected; `±inf` is allowed (operations state where).
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::Function("NaN entry in function table".into()));
        }
        Ok(Self { values })
    }

    pub fn constant(n: usize, value: f64) -> Self {
        Self { values: vec![value; n] }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn at(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Entrywise scaling; `c` must be finite and nonnegative so that
    /// gradient-role tables stay valid.
    pub fn scale(&self, c: f64) -> Self {
        Self {
            values: self.values.iter().map(|&v| crate::ext::mul_mass(v, c)).collect(),
        }
    }

    pub fn check_matches(&self, s: &MetricMeasureSpace) -> Result<()> {
        if self.values.len() != s.n() {
            return Err(Error::Function(format!(
                "table has {} entries but the space has {} points",
                self.values.len(),
                s.n()
            )));
        }
        Ok(())
    }
}

/// `(Σ_x m(x)·|f(x)|^p)^{1/p}`; infinite entries propagate to `inf`.
pub fn lp_norm(f: &ScalarFunction, s: &MetricMeasureSpace, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::Exponent(p));
    }
    f.check_matches(s)?;
    let mut sum = 0.0;
    for i in 0..s.n() {
        sum += s.weight(i) * f.at(i).abs().powf(p);
    }
    Ok(sum.powf(1.0 / p))
}

/// `Σ_x m(x)·|f(x)|^p`, the p-th power of the norm; this is the quantity the
/// modulus program minimizes.
pub fn lp_energy(f: &ScalarFunction, s: &MetricMeasureSpace, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::Exponent(p));
    }
    f.check_matches(s)?;
    let mut sum = 0.0;
    for i in 0..s.n() {
        sum += s.weight(i) * f.at(i).abs().powf(p);
    }
    Ok(sum)
}
