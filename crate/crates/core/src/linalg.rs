//! Dense real linear algebra: orthonormal bases, the Moore–Penrose
//! pseudoinverse, principal-angle cosines and orthogonal/oblique projections.
//!
//! Subspaces are carried as matrices with orthonormal columns. Every routine
//! here is a pure function over immutable inputs.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Numerical tolerances shared by all checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    /// Relative singular-value cutoff. `None` selects `max(rows, cols) * f64::EPSILON`.
    pub rank_tol: Option<f64>,
    /// Absolute residual tolerance for operator-equality checks.
    pub eq_tol: f64,
    /// Absolute tolerance for "equality holds" (saturation) decisions.
    pub sat_tol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { rank_tol: None, eq_tol: 1e-9, sat_tol: 1e-8 }
    }
}

impl Tolerance {
    pub fn with_eq_tol(eq_tol: f64) -> Self {
        Tolerance { eq_tol, ..Default::default() }
    }

    /// Relative cutoff for a `rows x cols` matrix.
    pub fn relative_cutoff(&self, rows: usize, cols: usize) -> f64 {
        self.rank_tol
            .unwrap_or_else(|| rows.max(cols).max(1) as f64 * f64::EPSILON)
    }
}

/// A linear subspace of R^n stored as an `n x d` matrix with orthonormal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: Matrix,
}

impl Subspace {
    /// Wraps `basis` after checking `basis^T basis = I` within `orth_tol`.
    pub fn from_orthonormal(basis: Matrix, orth_tol: f64) -> Result<Self> {
        let (n, d) = basis.shape();
        if d == 0 || n == 0 || d > n {
            return Err(Error::InvalidSubspace(format!(
                "basis shape {n}x{d} must satisfy 1 <= d <= n"
            )));
        }
        if basis.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSubspace("non-finite basis entry".into()));
        }
        let gram = basis.transpose() * &basis;
        let dev = (gram - Matrix::identity(d, d)).amax();
        if dev > orth_tol {
            return Err(Error::InvalidSubspace(format!(
                "basis columns are not orthonormal (max deviation {dev:e})"
            )));
        }
        Ok(Subspace { basis })
    }

    /// The whole ambient space R^n.
    pub fn full(n: usize) -> Self {
        Subspace { basis: Matrix::identity(n, n) }
    }

    /// Span of the given vectors (see [`orthonormal_basis`]).
    pub fn span(vectors: &[Vector], tol: &Tolerance) -> Result<Self> {
        orthonormal_basis(vectors, tol)
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Coordinates `B^T x` of `x` in this basis.
    pub fn coordinates(&self, x: &Vector) -> Vector {
        self.basis.tr_mul(x)
    }

    pub fn project(&self, x: &Vector) -> Vector {
        &self.basis * self.coordinates(x)
    }

    /// Euclidean distance from `x` to the subspace.
    pub fn distance(&self, x: &Vector) -> f64 {
        (x - self.project(x)).norm()
    }

    /// Whether `x` lies in the subspace up to `eq_tol * max(1, |x|)`.
    pub fn contains(&self, x: &Vector, eq_tol: f64) -> bool {
        self.distance(x) <= eq_tol * x.norm().max(1.0)
    }
}

fn to_faer(m: &Matrix) -> faer::Mat<f64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: faer::MatRef<'_, f64>) -> Matrix {
    Matrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Thin SVD: singular values in descending order together with the matching
/// left singular vectors (as columns) and right singular vectors (as columns).
pub(crate) fn sorted_svd(m: &Matrix) -> (Vec<f64>, Matrix, Matrix) {
    let svd = to_faer(m).thin_svd().expect("SVD of a finite matrix converges");
    let values = svd.S().column_vector().iter().copied().collect();
    (values, from_faer(svd.U()), from_faer(svd.V()))
}

pub fn singular_values(m: &Matrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    to_faer(m).singular_values().expect("SVD of a finite matrix converges")
}

/// Largest singular value (operator norm induced by the Euclidean norm).
pub fn spectral_norm(m: &Matrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Number of singular values above `cutoff * sigma_max`.
pub fn numerical_rank(m: &Matrix, tol: &Tolerance) -> usize {
    let values = singular_values(m);
    let Some(&top) = values.first() else { return 0 };
    if top <= 0.0 {
        return 0;
    }
    let cutoff = tol.relative_cutoff(m.nrows(), m.ncols()) * top;
    values.iter().filter(|&&s| s > cutoff).count()
}

/// Stacks vectors of a common length as the columns of a matrix.
pub fn columns(vectors: &[Vector]) -> Result<Matrix> {
    let Some(first) = vectors.first() else {
        return Err(Error::DimensionMismatch("empty vector list".into()));
    };
    let n = first.len();
    if let Some(bad) = vectors.iter().find(|v| v.len() != n) {
        return Err(Error::DimensionMismatch(format!(
            "vectors of length {n} and {} mixed",
            bad.len()
        )));
    }
    Ok(Matrix::from_columns(vectors))
}

/// Orthonormal basis of `span(vectors)`, dimension = numerical rank.
pub fn orthonormal_basis(vectors: &[Vector], tol: &Tolerance) -> Result<Subspace> {
    let m = columns(vectors)?;
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::DimensionMismatch("non-finite vector entry".into()));
    }
    let (values, u, _) = sorted_svd(&m);
    let top = values.first().copied().unwrap_or(0.0);
    if top <= 0.0 {
        return Err(Error::AllZero);
    }
    let cutoff = tol.relative_cutoff(m.nrows(), m.ncols()) * top;
    let rank = values.iter().filter(|&&s| s > cutoff).count();
    Ok(Subspace { basis: u.columns(0, rank).into_owned() })
}

/// Moore–Penrose pseudoinverse; singular values at or below
/// `relative_cutoff * sigma_max` are treated as zero.
pub fn pseudoinverse(m: &Matrix, tol: &Tolerance) -> Matrix {
    let (rows, cols) = m.shape();
    if m.is_empty() {
        return Matrix::zeros(cols, rows);
    }
    let (values, u, v) = sorted_svd(m);
    let top = values[0];
    if top <= 0.0 {
        return Matrix::zeros(cols, rows);
    }
    let cutoff = tol.relative_cutoff(rows, cols) * top;
    let mut out = Matrix::zeros(cols, rows);
    for (k, &s) in values.iter().enumerate() {
        if s > cutoff {
            out += (v.column(k) * u.column(k).transpose()) / s;
        }
    }
    out
}

/// Cosine of the largest principal angle from `w` into `v`,
/// i.e. `inf_{f in W, |f|=1} |P_V f|`.
pub fn subspace_angle_cos(w: &Subspace, v: &Subspace) -> Result<f64> {
    if w.ambient_dim() != v.ambient_dim() {
        return Err(Error::DimensionMismatch(format!(
            "subspaces of R^{} and R^{}",
            w.ambient_dim(),
            v.ambient_dim()
        )));
    }
    if v.dim() < w.dim() {
        return Ok(0.0);
    }
    let cross = v.basis().tr_mul(w.basis());
    let values = singular_values(&cross);
    Ok(values.last().copied().unwrap_or(0.0).clamp(0.0, 1.0))
}

/// Orthogonal projection `B B^T` onto `w`.
pub fn orthogonal_projection(w: &Subspace) -> Matrix {
    w.basis() * w.basis().transpose()
}

/// Oblique projection onto `w` along `v`-perp, `B_W (B_V^T B_W)^{-1} B_V^T`.
///
/// Fails unless `dim W = dim V` and both principal-angle cosines exceed the
/// rank cutoff, which together characterize `R^n = W (+) V^perp`.
pub fn oblique_projection(w: &Subspace, v: &Subspace, tol: &Tolerance) -> Result<Matrix> {
    if w.ambient_dim() != v.ambient_dim() {
        return Err(Error::DimensionMismatch(format!(
            "subspaces of R^{} and R^{}",
            w.ambient_dim(),
            v.ambient_dim()
        )));
    }
    if w.dim() != v.dim() {
        return Err(Error::DirectSumViolation(format!(
            "dim W = {} differs from dim V = {}",
            w.dim(),
            v.dim()
        )));
    }
    let n = w.ambient_dim();
    let floor = tol.relative_cutoff(n, n);
    let cos_wv = subspace_angle_cos(w, v)?;
    let cos_vw = subspace_angle_cos(v, w)?;
    if cos_wv <= floor || cos_vw <= floor {
        return Err(Error::DirectSumViolation(format!(
            "principal-angle cosines ({cos_wv:e}, {cos_vw:e}) not above {floor:e}"
        )));
    }
    let cross = v.basis().tr_mul(w.basis());
    let inv = cross.try_inverse().ok_or_else(|| {
        Error::DirectSumViolation("B_V^T B_W is singular".into())
    })?;
    Ok(w.basis() * inv * v.basis().transpose())
}

pub(crate) struct SymmetricEigen {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `eigenvalues`.
    pub eigenvectors: Matrix,
}

/// Eigen-decomposition of a symmetric matrix (symmetrized first).
pub(crate) fn symmetric_eigen(s: &Matrix) -> SymmetricEigen {
    let sym = to_faer(&((s + s.transpose()) * 0.5));
    let eig = sym.self_adjoint_eigen(faer::Side::Lower).expect("symmetric eigensolver converges");
    SymmetricEigen {
        eigenvalues: eig.S().column_vector().iter().copied().collect(),
        eigenvectors: from_faer(eig.U()),
    }
}

/// Extreme eigenvalues `(min, max)` of a symmetric matrix.
pub fn eigen_extremes(s: &Matrix) -> (f64, f64) {
    if s.is_empty() {
        return (0.0, 0.0);
    }
    let eig = symmetric_eigen(s);
    let lo = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

/// Applies `g` to the eigenvalues of a PSD matrix; eigenvalues at or below
/// the rank cutoff are clamped to zero before `g` sees them and map to zero.
fn psd_spectral_map(s: &Matrix, tol: &Tolerance, g: impl Fn(f64) -> f64) -> Matrix {
    let n = s.nrows();
    if n == 0 {
        return s.clone();
    }
    let eig = symmetric_eigen(s);
    let top = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    let cutoff = tol.relative_cutoff(n, n) * top;
    let mut out = Matrix::zeros(n, n);
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda > cutoff {
            let q = eig.eigenvectors.column(k);
            out += (q * q.transpose()) * g(lambda);
        }
    }
    out
}

/// Principal square root of a PSD matrix.
pub fn psd_sqrt(s: &Matrix, tol: &Tolerance) -> Matrix {
    psd_spectral_map(s, tol, f64::sqrt)
}

/// `(S^dagger)^{1/2}` of a PSD matrix.
pub fn psd_pinv_sqrt(s: &Matrix, tol: &Tolerance) -> Matrix {
    psd_spectral_map(s, tol, |l| 1.0 / l.sqrt())
}

/// Pseudoinverse of a PSD matrix via its eigendecomposition.
pub fn psd_pinv(s: &Matrix, tol: &Tolerance) -> Matrix {
    psd_spectral_map(s, tol, |l| 1.0 / l)
}
