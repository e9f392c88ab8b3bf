//! Finite frames for a subspace, canonical oblique duals, the complete
//! parameterization of oblique duals and consistent reconstruction.

use crate::error::{Error, Result};
use crate::linalg::{
    columns, eigen_extremes, numerical_rank, oblique_projection, pseudoinverse, spectral_norm,
    Matrix, Subspace, Tolerance, Vector,
};

/// An ordered family of `N` vectors spanning a claimed subspace `W` of R^n.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteFrame {
    vectors: Vec<Vector>,
    subspace: Subspace,
}

impl FiniteFrame {
    /// Validates that every vector lies in `subspace` and that they span it.
    pub fn new(vectors: Vec<Vector>, subspace: Subspace, tol: &Tolerance) -> Result<Self> {
        let m = columns(&vectors)?;
        if m.nrows() != subspace.ambient_dim() {
            return Err(Error::DimensionMismatch(format!(
                "vectors in R^{} but subspace of R^{}",
                m.nrows(),
                subspace.ambient_dim()
            )));
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::DimensionMismatch("non-finite frame vector".into()));
        }
        for (index, w) in vectors.iter().enumerate() {
            if !subspace.contains(w, tol.eq_tol) {
                return Err(Error::SupportOutsideSubspace { index, distance: subspace.distance(w) });
            }
        }
        let coords = subspace.basis().tr_mul(&m);
        let rank = numerical_rank(&coords, tol);
        if rank != subspace.dim() {
            return Err(Error::NotAFrame(format!(
                "vectors span a {rank}-dimensional space, claimed subspace has dimension {}",
                subspace.dim()
            )));
        }
        Ok(FiniteFrame { vectors, subspace })
    }

    /// Frame for the span of `vectors`.
    pub fn spanning(vectors: Vec<Vector>, tol: &Tolerance) -> Result<Self> {
        let subspace = Subspace::span(&vectors, tol)?;
        Self::new(vectors, subspace, tol)
    }

    pub fn vectors(&self) -> &[Vector] {
        &self.vectors
    }

    pub fn subspace(&self) -> &Subspace {
        &self.subspace
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn ambient_dim(&self) -> usize {
        self.subspace.ambient_dim()
    }

    /// The `n x N` synthesis matrix with the frame vectors as columns.
    pub fn matrix(&self) -> Matrix {
        Matrix::from_columns(&self.vectors)
    }
}

/// A synthesis frame on `W` paired with an analysis frame on `V`, plus the
/// spectral residual of `sum_i w_i v_i^T - pi_{W V^perp}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObliqueDualPair {
    pub synthesis: FiniteFrame,
    pub analysis: FiniteFrame,
    pub residual: f64,
}

impl ObliqueDualPair {
    /// Builds a pair and records its residual; does not require it to be small.
    pub fn new(synthesis: FiniteFrame, analysis: FiniteFrame, tol: &Tolerance) -> Result<Self> {
        let (_, residual) = is_oblique_dual(&synthesis, &analysis, tol)?;
        Ok(ObliqueDualPair { synthesis, analysis, residual })
    }

    pub fn is_dual(&self, tol: &Tolerance) -> bool {
        self.residual <= tol.eq_tol
    }

    pub fn len(&self) -> usize {
        self.synthesis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.synthesis.is_empty()
    }

    /// `pi_{W V^perp}` for the pair's subspaces.
    pub fn projection(&self, tol: &Tolerance) -> Result<Matrix> {
        oblique_projection(self.synthesis.subspace(), self.analysis.subspace(), tol)
    }
}

/// `S = sum_i w_i w_i^T`.
pub fn frame_operator(frame: &FiniteFrame) -> Matrix {
    let m = frame.matrix();
    &m * m.transpose()
}

/// Optimal frame bounds `(A, B)`: extreme eigenvalues of `S` restricted to `W`.
pub fn frame_bounds(frame: &FiniteFrame, tol: &Tolerance) -> Result<(f64, f64)> {
    let basis = frame.subspace().basis();
    let restricted = basis.transpose() * frame_operator(frame) * basis;
    let (a, b) = eigen_extremes(&restricted);
    let d = restricted.nrows();
    if a <= tol.relative_cutoff(d, d) * b.max(0.0) || b <= 0.0 {
        return Err(Error::NotAFrame(format!("lower frame bound {a:e} is not positive")));
    }
    Ok((a, b))
}

/// `pi_{V W^perp} S^dagger`, the map sending each `w_j` to its canonical dual vector.
pub fn canonical_dual_operator(frame: &FiniteFrame, v: &Subspace, tol: &Tolerance) -> Result<Matrix> {
    let pi_vw = oblique_projection(v, frame.subspace(), tol)?;
    let s_pinv = pseudoinverse(&frame_operator(frame), tol);
    Ok(pi_vw * s_pinv)
}

/// Canonical oblique dual `v_j = pi_{V W^perp} S^dagger w_j`.
pub fn canonical_oblique_dual(frame: &FiniteFrame, v: &Subspace, tol: &Tolerance) -> Result<ObliqueDualPair> {
    let op = canonical_dual_operator(frame, v, tol)?;
    let duals = frame.vectors().iter().map(|w| &op * w).collect();
    let analysis = FiniteFrame::new(duals, v.clone(), tol)?;
    ObliqueDualPair::new(frame.clone(), analysis, tol)
}

/// Every oblique dual of `frame` on `V`, parameterized by `h_1..h_N` in `V`:
/// `v_i = pi_{V W^perp} S^dagger w_i + h_i - sum_j <S^dagger w_i, w_j> h_j`.
pub fn oblique_dual_family(
    frame: &FiniteFrame,
    v: &Subspace,
    h: &[Vector],
    tol: &Tolerance,
) -> Result<ObliqueDualPair> {
    if h.len() != frame.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} parameter vectors for a frame of {} vectors",
            h.len(),
            frame.len()
        )));
    }
    for (index, hi) in h.iter().enumerate() {
        if hi.len() != v.ambient_dim() {
            return Err(Error::DimensionMismatch(format!("parameter {index} has length {}", hi.len())));
        }
        if !v.contains(hi, tol.eq_tol) {
            return Err(Error::RangeViolation { index, distance: v.distance(hi) });
        }
    }
    let wm = frame.matrix();
    let s_pinv = pseudoinverse(&frame_operator(frame), tol);
    let pi_vw = oblique_projection(v, frame.subspace(), tol)?;
    let gram = wm.transpose() * &s_pinv * &wm;
    let hm = Matrix::from_columns(h);
    let n = frame.len();
    let vm = &pi_vw * &s_pinv * &wm + hm * (Matrix::identity(n, n) - gram);
    let duals = vm.column_iter().map(|c| c.into_owned()).collect();
    let analysis = FiniteFrame::new(duals, v.clone(), tol)?;
    ObliqueDualPair::new(frame.clone(), analysis, tol)
}

/// Tests `sum_i w_i v_i^T = pi_{W V^perp}`; returns the decision and the spectral residual.
pub fn is_oblique_dual(synthesis: &FiniteFrame, analysis: &FiniteFrame, tol: &Tolerance) -> Result<(bool, f64)> {
    if synthesis.len() != analysis.len() {
        return Err(Error::DimensionMismatch(format!(
            "frames of {} and {} vectors",
            synthesis.len(),
            analysis.len()
        )));
    }
    let pi = oblique_projection(synthesis.subspace(), analysis.subspace(), tol)?;
    let mixed = synthesis.matrix() * analysis.matrix().transpose();
    let residual = spectral_norm(&(mixed - pi));
    Ok((residual <= tol.eq_tol, residual))
}

/// Reconstruction `fhat = sum_i <f, v_i> w_i` and the consistency residual
/// `max_i |<f - fhat, v_i>|`.
pub fn reconstruct(f: &Vector, pair: &ObliqueDualPair) -> Result<(Vector, f64)> {
    if f.len() != pair.synthesis.ambient_dim() {
        return Err(Error::DimensionMismatch(format!(
            "signal of length {} in R^{}",
            f.len(),
            pair.synthesis.ambient_dim()
        )));
    }
    let mut fhat = Vector::zeros(f.len());
    for (w, v) in pair.synthesis.vectors().iter().zip(pair.analysis.vectors()) {
        fhat += w * f.dot(v);
    }
    let diff = f - &fhat;
    let residual = pair
        .analysis
        .vectors()
        .iter()
        .map(|v| diff.dot(v).abs())
        .fold(0.0, f64::max);
    Ok((fhat, residual))
}

/// The three-vector Mercedes-Benz frame `(cos 2 pi k/3, sin 2 pi k/3)` for R^2.
pub fn mercedes_benz() -> FiniteFrame {
    let vectors = (0..3)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / 3.0;
            Vector::from_vec(vec![t.cos(), t.sin()])
        })
        .collect();
    FiniteFrame::new(vectors, Subspace::full(2), &Tolerance::default()).expect("Mercedes-Benz frame spans R^2")
}

/// The standard orthonormal basis of R^n as a frame.
pub fn standard_basis(n: usize) -> FiniteFrame {
    let vectors = (0..n).map(|k| Vector::from_fn(n, |i, _| if i == k { 1.0 } else { 0.0 })).collect();
    FiniteFrame::new(vectors, Subspace::full(n), &Tolerance::default()).expect("standard basis spans R^n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::orthogonal_projection;
    use approx::assert_abs_diff_eq;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_column_slice(xs)
    }

    fn line(xs: &[f64]) -> Subspace {
        Subspace::span(&[v(xs)], &Tolerance::default()).unwrap()
    }

    fn single(xs: &[f64], w: &Subspace) -> FiniteFrame {
        FiniteFrame::new(vec![v(xs)], w.clone(), &Tolerance::default()).unwrap()
    }

    #[test]
    fn frame_operators() {
        assert_abs_diff_eq!(frame_operator(&standard_basis(2)), Matrix::identity(2, 2));
        assert_abs_diff_eq!(frame_operator(&mercedes_benz()), Matrix::identity(2, 2) * 1.5, epsilon = 1e-15);
        let f = single(&[1.0, 0.0], &line(&[1.0, 0.0]));
        assert_abs_diff_eq!(frame_operator(&f), Matrix::from_diagonal(&v(&[1.0, 0.0])));
    }

    #[test]
    fn frame_bounds_examples() {
        let tol = Tolerance::default();
        let (a, b) = frame_bounds(&standard_basis(2), &tol).unwrap();
        assert_abs_diff_eq!(a, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b, 1.0, epsilon = 1e-15);
        let (a, b) = frame_bounds(&mercedes_benz(), &tol).unwrap();
        assert_abs_diff_eq!(a, 1.5, epsilon = 1e-14);
        assert_abs_diff_eq!(b, 1.5, epsilon = 1e-14);
        let f = FiniteFrame::new(vec![v(&[1.0, 0.0]), v(&[2.0, 0.0])], line(&[1.0, 0.0]), &tol).unwrap();
        let (a, b) = frame_bounds(&f, &tol).unwrap();
        assert_abs_diff_eq!(a, 5.0, epsilon = 1e-14);
        assert_abs_diff_eq!(b, 5.0, epsilon = 1e-14);
    }

    #[test]
    fn frame_construction_rejects_bad_inputs() {
        let tol = Tolerance::default();
        let w = line(&[1.0, 0.0]);
        assert!(matches!(
            FiniteFrame::new(vec![v(&[0.0, 1.0])], w.clone(), &tol),
            Err(Error::SupportOutsideSubspace { .. })
        ));
        assert!(matches!(
            FiniteFrame::new(vec![v(&[1.0, 0.0])], Subspace::full(2), &tol),
            Err(Error::NotAFrame(_))
        ));
    }

    #[test]
    fn canonical_dual_of_single_vector() {
        let tol = Tolerance::default();
        let pair = canonical_oblique_dual(&single(&[1.0, 0.0], &line(&[1.0, 0.0])), &line(&[1.0, 1.0]), &tol).unwrap();
        assert_abs_diff_eq!(pair.analysis.vectors()[0], v(&[1.0, 1.0]), epsilon = 1e-14);
        assert!(pair.residual <= 1e-14);
    }

    #[test]
    fn canonical_dual_of_parseval_frame_is_itself() {
        let tol = Tolerance::default();
        let scale = (2.0f64 / 3.0).sqrt();
        let parseval: Vec<Vector> = mercedes_benz().vectors().iter().map(|w| w * scale).collect();
        let f = FiniteFrame::new(parseval.clone(), Subspace::full(2), &tol).unwrap();
        let pair = canonical_oblique_dual(&f, &Subspace::full(2), &tol).unwrap();
        for (a, b) in pair.analysis.vectors().iter().zip(&parseval) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn canonical_dual_of_mercedes_benz() {
        let tol = Tolerance::default();
        let mb = mercedes_benz();
        let pair = canonical_oblique_dual(&mb, &Subspace::full(2), &tol).unwrap();
        for (dual, w) in pair.analysis.vectors().iter().zip(mb.vectors()) {
            assert_abs_diff_eq!(dual, &(w * (2.0 / 3.0)), epsilon = 1e-14);
        }
    }

    #[test]
    fn zero_parameters_give_canonical_dual() {
        let tol = Tolerance::default();
        let mb = mercedes_benz();
        let zeros = vec![Vector::zeros(2); 3];
        let fam = oblique_dual_family(&mb, &Subspace::full(2), &zeros, &tol).unwrap();
        let can = canonical_oblique_dual(&mb, &Subspace::full(2), &tol).unwrap();
        for (a, b) in fam.analysis.vectors().iter().zip(can.analysis.vectors()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn family_members_are_duals() {
        let tol = Tolerance::default();
        let mb = mercedes_benz();
        let h = vec![v(&[0.3, -1.0]), v(&[2.0, 0.5]), v(&[-0.7, 0.1])];
        let pair = oblique_dual_family(&mb, &Subspace::full(2), &h, &tol).unwrap();
        assert!(pair.is_dual(&tol), "residual {}", pair.residual);
    }

    #[test]
    fn family_rejects_wrong_count_and_range() {
        let tol = Tolerance::default();
        let w = line(&[1.0, 0.0]);
        let vline = line(&[1.0, 1.0]);
        let f = single(&[1.0, 0.0], &w);
        assert!(matches!(oblique_dual_family(&f, &vline, &[], &tol), Err(Error::DimensionMismatch(_))));
        assert!(matches!(
            oblique_dual_family(&f, &vline, &[v(&[1.0, 0.0])], &tol),
            Err(Error::RangeViolation { .. })
        ));
    }

    #[test]
    fn duality_checks() {
        let tol = Tolerance::default();
        let w = line(&[1.0, 0.0]);
        let vline = line(&[1.0, 1.0]);
        let (ok, r) = is_oblique_dual(&single(&[1.0, 0.0], &w), &single(&[1.0, 1.0], &vline), &tol).unwrap();
        assert!(ok);
        assert!(r < 1e-14);
        // (1,0)(2,2)^T - [[1,1],[0,0]] = [[1,1],[0,0]], whose spectral norm is sqrt(2).
        let (ok, r) = is_oblique_dual(&single(&[1.0, 0.0], &w), &single(&[2.0, 2.0], &vline), &tol).unwrap();
        assert!(!ok);
        assert_abs_diff_eq!(r, 2f64.sqrt(), epsilon = 1e-14);
        let sb = standard_basis(3);
        let (ok, r) = is_oblique_dual(&sb, &sb, &tol).unwrap();
        assert!(ok && r < 1e-15);
    }

    #[test]
    fn reconstruction_examples() {
        let tol = Tolerance::default();
        let w = line(&[1.0, 0.0]);
        let vline = line(&[1.0, 1.0]);
        let pair = canonical_oblique_dual(&single(&[1.0, 0.0], &w), &vline, &tol).unwrap();
        let (fhat, res) = reconstruct(&v(&[0.0, 1.0]), &pair).unwrap();
        assert_abs_diff_eq!(fhat, v(&[1.0, 0.0]), epsilon = 1e-14);
        assert!(res < 1e-14);
        let (fhat, _) = reconstruct(&v(&[3.0, 0.0]), &pair).unwrap();
        assert_abs_diff_eq!(fhat, v(&[3.0, 0.0]), epsilon = 1e-14);
        // V^perp is spanned by (1,-1).
        let (fhat, _) = reconstruct(&v(&[1.0, -1.0]), &pair).unwrap();
        assert_abs_diff_eq!(fhat, v(&[0.0, 0.0]), epsilon = 1e-14);
    }

    #[test]
    fn canonical_dual_with_equal_subspaces_uses_orthogonal_projection() {
        let tol = Tolerance::default();
        let w = Subspace::span(&[v(&[1.0, 0.0, 1.0]), v(&[0.0, 1.0, 0.0])], &tol).unwrap();
        let vecs = vec![v(&[1.0, 0.0, 1.0]), v(&[0.0, 2.0, 0.0]), v(&[1.0, 1.0, 1.0])];
        let f = FiniteFrame::new(vecs, w.clone(), &tol).unwrap();
        let pair = canonical_oblique_dual(&f, &w, &tol).unwrap();
        let mixed = f.matrix() * pair.analysis.matrix().transpose();
        assert_abs_diff_eq!(mixed, orthogonal_projection(&w), epsilon = 1e-13);
    }
}
