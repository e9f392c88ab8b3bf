//! Finitely supported probability measures and probabilistic frames.

use crate::error::{Error, Result};
use crate::linalg::{eigen_extremes, numerical_rank, orthogonal_projection, spectral_norm, Matrix, Subspace, Tolerance, Vector};

/// Allowed deviation of the total mass from 1.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;
/// Positions closer than this are treated as the same atom.
pub const ATOM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    points: Vec<Vector>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(points: Vec<Vector>, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidMeasure("measure has no atoms".into()));
        }
        if points.len() != weights.len() {
            return Err(Error::InvalidMeasure(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        let n = points[0].len();
        if let Some(k) = points.iter().position(|x| x.len() != n) {
            return Err(Error::InvalidMeasure(format!("point {k} has dimension {}, expected {n}", points[k].len())));
        }
        if let Some(k) = points.iter().position(|x| x.iter().any(|c| !c.is_finite())) {
            return Err(Error::InvalidMeasure(format!("point {k} is not finite")));
        }
        if let Some(k) = weights.iter().position(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidMeasure(format!("weight {k} = {} is not a nonnegative number", weights[k])));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidMeasure(format!("weights must sum to 1, got {total}")));
        }
        Ok(Self { points, weights })
    }

    pub fn uniform(points: Vec<Vector>) -> Result<Self> {
        let m = points.len();
        Self::new(points, vec![1.0 / m as f64; m])
    }

    pub fn dirac(point: Vector) -> Self {
        Self { points: vec![point], weights: vec![1.0] }
    }

    pub fn points(&self) -> &[Vector] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn ambient_dim(&self) -> usize {
        self.points[0].len()
    }

    /// Atoms of positive weight, with their indices.
    pub fn support(&self) -> impl Iterator<Item = (usize, &Vector, f64)> {
        self.points.iter().zip(&self.weights).enumerate().filter(|(_, (_, &w))| w > 0.0).map(|(k, (x, &w))| (k, x, w))
    }

    /// `M_2 = sum_k w_k |x_k|^2`.
    pub fn second_moment(&self) -> f64 {
        self.points.iter().zip(&self.weights).map(|(x, w)| w * x.norm_squared()).sum()
    }

    /// Equality as measures: coincident atoms (within [`ATOM_TOL`]) are merged,
    /// zero-weight atoms dropped, then the aggregated atoms are matched.
    pub fn weak_eq(&self, other: &Self, weight_tol: f64) -> bool {
        let a = aggregate(self);
        let b = aggregate(other);
        if a.len() != b.len() {
            return false;
        }
        let mut used = vec![false; b.len()];
        a.iter().all(|(x, w)| {
            let hit = b.iter().enumerate().position(|(j, (y, v))| {
                !used[j] && (x - y).amax() <= ATOM_TOL && (w - v).abs() <= weight_tol
            });
            hit.map(|j| used[j] = true).is_some()
        })
    }
}

/// Merges atoms within [`ATOM_TOL`] of each other and drops empty ones.
pub(crate) fn aggregate(mu: &DiscreteMeasure) -> Vec<(Vector, f64)> {
    let mut out: Vec<(Vector, f64)> = Vec::new();
    for (_, x, w) in mu.support() {
        match out.iter_mut().find(|(y, _)| (x - y).amax() <= ATOM_TOL) {
            Some((_, acc)) => *acc += w,
            None => out.push((x.clone(), w)),
        }
    }
    out
}

/// `S_mu = sum_k w_k x_k x_k^T`.
pub fn measure_frame_operator(mu: &DiscreteMeasure) -> Matrix {
    let n = mu.ambient_dim();
    mu.points.iter().zip(&mu.weights).fold(Matrix::zeros(n, n), |s, (x, &w)| s + x * x.transpose() * w)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureFrameReport {
    pub second_moment: f64,
    pub frame_operator: Matrix,
    pub is_frame: bool,
    /// Extreme eigenvalues of `S_mu` restricted to `W`.
    pub bounds: Option<(f64, f64)>,
    pub is_tight: bool,
    pub is_parseval: bool,
}

/// Checks that every atom lies in `W` and reports whether the support spans `W`.
pub fn classify_probabilistic_frame(mu: &DiscreteMeasure, w: &Subspace, tol: &Tolerance) -> Result<MeasureFrameReport> {
    check_support(mu, w, tol)?;
    let s = measure_frame_operator(mu);
    let weighted: Vec<Vector> = mu.support().map(|(_, x, wt)| w.coordinates(x) * wt.sqrt()).collect();
    let coords = Matrix::from_columns(&weighted);
    let is_frame = numerical_rank(&coords, tol) == w.dim();
    let bounds = is_frame.then(|| eigen_extremes(&(w.basis().transpose() * &s * w.basis())));
    let is_tight = bounds.is_some_and(|(a, _)| spectral_norm(&(&s - orthogonal_projection(w) * a)) <= tol.eq_tol);
    let is_parseval = is_tight && bounds.is_some_and(|(a, _)| (a - 1.0).abs() <= tol.eq_tol);
    Ok(MeasureFrameReport { second_moment: mu.second_moment(), frame_operator: s, is_frame, bounds, is_tight, is_parseval })
}

/// Every positive-weight atom must lie in `w`.
pub fn check_support(mu: &DiscreteMeasure, w: &Subspace, tol: &Tolerance) -> Result<()> {
    if mu.ambient_dim() != w.ambient_dim() {
        return Err(Error::DimensionMismatch(format!(
            "measure lives in dimension {}, subspace in {}",
            mu.ambient_dim(),
            w.ambient_dim()
        )));
    }
    match mu.support().find(|(_, x, _)| !w.contains(x, tol.eq_tol)) {
        Some((index, x, _)) => Err(Error::SupportOutsideSubspace { index, distance: w.distance(x) }),
        None => Ok(()),
    }
}

/// Image measure `T_# mu`. Coincident images are kept as separate atoms.
pub fn pushforward(mu: &DiscreteMeasure, t: impl Fn(&Vector) -> Vector) -> DiscreteMeasure {
    DiscreteMeasure { points: mu.points.iter().map(t).collect(), weights: mu.weights.clone() }
}
