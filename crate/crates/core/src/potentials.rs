//! Oblique dual p-frame potentials, mixed coherence and Welch-type bounds.
//!
//! All reports take a verified [`ObliqueDualPair`] and compare the observed
//! value with the corresponding lower bound. Over the reals the signature
//! matrix of a saturating pair has entries `+1`/`-1` off the diagonal.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::frames::{frame_operator, FiniteFrame, ObliqueDualPair};
use crate::linalg::{orthogonal_projection, psd_pinv_sqrt, spectral_norm, Matrix, Tolerance};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PotentialReport {
    pub p: f64,
    pub value: f64,
    /// Present when `p` is an even integer.
    pub lower_bound: Option<f64>,
    pub gap: Option<f64>,
    pub saturated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoherenceReport {
    pub max_off_diagonal_sq: f64,
    pub welch_bound: f64,
    pub diagonal_constant: bool,
    pub saturated: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixedGram {
    /// `G_ij = <w_i, v_j>`.
    pub gram: Matrix,
    /// Signature matrix `Q`, present only for saturating pairs with `N > d_W`.
    pub signature: Option<Matrix>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EtfLift {
    pub psi: FiniteFrame,
    pub is_equiangular_tight: bool,
}

pub(crate) fn is_even_integer(p: f64) -> bool {
    p > 0.0 && p.fract() == 0.0 && (p as u64).is_multiple_of(2)
}

fn require_dual(pair: &ObliqueDualPair, tol: &Tolerance) -> Result<()> {
    if pair.is_dual(tol) {
        Ok(())
    } else {
        Err(Error::NotADual { residual: pair.residual, tol: tol.eq_tol })
    }
}

fn require_positive(p: f64) -> Result<()> {
    if p > 0.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::HypothesisViolated(format!("potential exponent p = {p} must be positive")))
    }
}

/// Mixed Gram matrix `G_ij = <w_i, v_j>` of a pair (no duality check).
pub fn mixed_gram_matrix(pair: &ObliqueDualPair) -> Matrix {
    pair.synthesis.matrix().transpose() * pair.analysis.matrix()
}

/// `sum_i sum_j |<w_i, v_j>|^p` against `d_W` (p = 2) or `N^{2-p} d_W^{p/2}` (p = 2k).
pub fn dual_p_potential(pair: &ObliqueDualPair, p: f64, tol: &Tolerance) -> Result<PotentialReport> {
    require_positive(p)?;
    require_dual(pair, tol)?;
    let g = mixed_gram_matrix(pair);
    let value: f64 = g.iter().map(|x| x.abs().powf(p)).sum();
    let n = pair.len() as f64;
    let d = pair.synthesis.subspace().dim() as f64;
    let lower_bound = is_even_integer(p).then(|| n.powf(2.0 - p) * d.powf(p / 2.0));
    Ok(report(p, value, lower_bound, tol))
}

fn report(p: f64, value: f64, lower_bound: Option<f64>, tol: &Tolerance) -> PotentialReport {
    let gap = lower_bound.map(|b| value - b);
    PotentialReport { p, value, lower_bound, gap, saturated: gap.is_some_and(|g| g <= tol.sat_tol) }
}

/// `sum_i |<w_i, v_i>|^p` against `N^{1-p} d_W^p`. Saturation is decided by
/// the equality condition `<w_i, v_i> = d_W / N` for every `i`.
pub fn diagonal_potential(pair: &ObliqueDualPair, p: f64, tol: &Tolerance) -> Result<PotentialReport> {
    require_positive(p)?;
    require_dual(pair, tol)?;
    let g = mixed_gram_matrix(pair);
    let value: f64 = g.diagonal().iter().map(|x| x.abs().powf(p)).sum();
    let n = pair.len() as f64;
    let d = pair.synthesis.subspace().dim() as f64;
    let lower_bound = is_even_integer(p).then(|| n.powf(1.0 - p) * d.powf(p));
    let gap = lower_bound.map(|b| value - b);
    let saturated =
        lower_bound.is_some() && g.diagonal().iter().all(|&x| (x - d / n).abs() <= tol.sat_tol);
    Ok(PotentialReport { p, value, lower_bound, gap, saturated })
}

/// Lower bound on the p-potential (p = 2k) of pairs whose mixed-Gram diagonal is constant:
/// `|d - d^2/N|^{p/2} / (N^{p/2-1} (N-1)^{p/2-1}) + d^p / N^{p-1}`.
pub fn constant_diagonal_bound(n: usize, d: usize, p: f64) -> f64 {
    let (nf, df) = (n as f64, d as f64);
    let diagonal = df.powf(p) / nf.powf(p - 1.0);
    if n <= 1 {
        return diagonal;
    }
    let k = p / 2.0;
    (df - df * df / nf).abs().powf(k) / (nf.powf(k - 1.0) * (nf - 1.0).powf(k - 1.0)) + diagonal
}

/// Welch-type constant `d (N - d) / (N^2 (N - 1))`, zero when `N <= 1`.
pub fn welch_bound(n: usize, d: usize) -> f64 {
    if n <= 1 {
        return 0.0;
    }
    let (nf, df) = (n as f64, d as f64);
    df * (nf - df) / (nf * nf * (nf - 1.0))
}

/// Largest squared off-diagonal mixed inner product versus the Welch-type bound.
///
/// Requires the diagonal `<w_i, v_i>` to be constant (within `eq_tol`).
pub fn mixed_coherence(pair: &ObliqueDualPair, tol: &Tolerance) -> Result<CoherenceReport> {
    require_dual(pair, tol)?;
    let g = mixed_gram_matrix(pair);
    let n = pair.len();
    let diag = g.diagonal();
    let first = diag[0];
    let diagonal_constant = diag.iter().all(|&x| (x - first).abs() <= tol.eq_tol);
    if !diagonal_constant {
        let spread = diag.max() - diag.min();
        return Err(Error::HypothesisViolated(format!(
            "mixed Gram diagonal is not constant (spread {spread:e})"
        )));
    }
    let mut max_off_diagonal_sq: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                max_off_diagonal_sq = max_off_diagonal_sq.max(g[(i, j)] * g[(i, j)]);
            }
        }
    }
    let welch = welch_bound(n, pair.synthesis.subspace().dim());
    Ok(CoherenceReport {
        max_off_diagonal_sq,
        welch_bound: welch,
        diagonal_constant,
        saturated: (max_off_diagonal_sq - welch).abs() <= tol.sat_tol,
    })
}

/// Mixed Gram matrix and, when the coherence bound is saturated, the signature
/// matrix `Q = (G - (d/N) I) (N/d) sqrt(d (N-1) / (N-d))`.
///
/// `Q` is returned only if it is symmetric with zero diagonal and `+-1`
/// off-diagonal entries within `eq_tol`.
pub fn mixed_gram(pair: &ObliqueDualPair, tol: &Tolerance) -> Result<MixedGram> {
    require_dual(pair, tol)?;
    let gram = mixed_gram_matrix(pair);
    let n = pair.len();
    let d = pair.synthesis.subspace().dim();
    let saturated = matches!(mixed_coherence(pair, tol), Ok(r) if r.saturated);
    let signature = (saturated && n > d)
        .then(|| {
            let (nf, df) = (n as f64, d as f64);
            let scale = (nf / df) * (df * (nf - 1.0) / (nf - df)).sqrt();
            (&gram - Matrix::identity(n, n) * (df / nf)) * scale
        })
        .filter(|q| is_signature_matrix(q, tol.eq_tol));
    Ok(MixedGram { gram, signature })
}

/// Symmetric, zero diagonal, unimodular (here `+-1`) off-diagonal entries.
pub fn is_signature_matrix(q: &Matrix, eq_tol: f64) -> bool {
    let n = q.nrows();
    q.is_square()
        && (0..n).all(|i| {
            (0..n).all(|j| {
                let x = q[(i, j)];
                if i == j {
                    x.abs() <= eq_tol
                } else {
                    (x - q[(j, i)]).abs() <= eq_tol && (x.abs() - 1.0).abs() <= eq_tol
                }
            })
        })
}

/// Lifts `w_i` to `psi_i = sqrt(N/d) (S^dagger)^{1/2} w_i` and tests whether
/// the result is an `(N, d)` equiangular tight frame for `W`.
pub fn etf_lift(frame: &FiniteFrame, tol: &Tolerance) -> Result<EtfLift> {
    let n = frame.len();
    let d = frame.subspace().dim();
    let root = psd_pinv_sqrt(&frame_operator(frame), tol) * (n as f64 / d as f64).sqrt();
    let psi_vectors = frame.vectors().iter().map(|w| &root * w).collect();
    let psi = FiniteFrame::new(psi_vectors, frame.subspace().clone(), tol)?;

    let unit_norm = psi.vectors().iter().all(|x| (x.norm() - 1.0).abs() <= tol.eq_tol);
    let target = orthogonal_projection(frame.subspace()) * (n as f64 / d as f64);
    let tight = spectral_norm(&(frame_operator(&psi) - target)) <= tol.eq_tol;
    let gram = psi.matrix().transpose() * psi.matrix();
    let off: Vec<f64> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| gram[(i, j)].abs())
        .collect();
    let equiangular = match off.first() {
        Some(&first) => off.iter().all(|&x| (x - first).abs() <= tol.eq_tol),
        None => true,
    };
    Ok(EtfLift { psi, is_equiangular_tight: unit_norm && tight && equiangular })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::{canonical_oblique_dual, mercedes_benz, oblique_dual_family, standard_basis};
    use crate::linalg::{Subspace, Vector};
    use approx::assert_abs_diff_eq;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_column_slice(xs)
    }

    fn mb_pair() -> ObliqueDualPair {
        canonical_oblique_dual(&mercedes_benz(), &Subspace::full(2), &Tolerance::default()).unwrap()
    }

    fn example_pair() -> ObliqueDualPair {
        let tol = Tolerance::default();
        let w = Subspace::span(&[v(&[1.0, 0.0])], &tol).unwrap();
        let vv = Subspace::span(&[v(&[1.0, 1.0])], &tol).unwrap();
        let f = FiniteFrame::new(vec![v(&[1.0, 0.0])], w, &tol).unwrap();
        canonical_oblique_dual(&f, &vv, &tol).unwrap()
    }

    #[test]
    fn mercedes_benz_two_potential_is_saturated() {
        let r = dual_p_potential(&mb_pair(), 2.0, &Tolerance::default()).unwrap();
        assert_abs_diff_eq!(r.value, 2.0, epsilon = 1e-14);
        assert_eq!(r.lower_bound, Some(2.0));
        assert!(r.saturated);
    }

    #[test]
    fn standard_basis_two_potential() {
        let sb = standard_basis(2);
        let pair = ObliqueDualPair::new(sb.clone(), sb, &Tolerance::default()).unwrap();
        let r = dual_p_potential(&pair, 2.0, &Tolerance::default()).unwrap();
        assert_abs_diff_eq!(r.value, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn mercedes_benz_four_potential() {
        // Mixed Gram: 2/3 on the diagonal, -1/3 off it.
        // 3 (2/3)^4 + 6 (1/3)^4 = 48/81 + 6/81 = 2/3; bound N^{-2} d^2 = 4/9.
        let r = dual_p_potential(&mb_pair(), 4.0, &Tolerance::default()).unwrap();
        assert_abs_diff_eq!(r.value, 2.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.lower_bound.unwrap(), 4.0 / 9.0, epsilon = 1e-15);
        assert!(!r.saturated);
    }

    #[test]
    fn odd_exponent_reports_value_only() {
        let r = dual_p_potential(&mb_pair(), 3.0, &Tolerance::default()).unwrap();
        assert!(r.lower_bound.is_none() && !r.saturated);
        assert_abs_diff_eq!(r.value, 3.0 * (8.0 / 27.0) + 6.0 / 27.0, epsilon = 1e-14);
    }

    #[test]
    fn non_dual_is_rejected() {
        let tol = Tolerance::default();
        let sb = standard_basis(2);
        let doubled: Vec<Vector> = sb.vectors().iter().map(|x| x * 2.0).collect();
        let pair = ObliqueDualPair::new(sb, FiniteFrame::spanning(doubled, &tol).unwrap(), &tol).unwrap();
        assert!(matches!(dual_p_potential(&pair, 2.0, &tol), Err(Error::NotADual { .. })));
    }

    #[test]
    fn diagonal_potentials() {
        let tol = Tolerance::default();
        let r = diagonal_potential(&mb_pair(), 2.0, &tol).unwrap();
        assert_abs_diff_eq!(r.value, 4.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.lower_bound.unwrap(), 4.0 / 3.0, epsilon = 1e-14);
        assert!(r.saturated);
        let r = diagonal_potential(&example_pair(), 2.0, &tol).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-14);
        assert!(r.saturated);
    }

    #[test]
    fn trace_identity() {
        let tol = Tolerance::default();
        for pair in [mb_pair(), example_pair()] {
            let d = pair.synthesis.subspace().dim() as f64;
            assert_abs_diff_eq!(mixed_gram_matrix(&pair).trace(), d, epsilon = 1e-13);
        }
        let h = vec![v(&[0.5, 0.2]), v(&[0.0, -0.3]), v(&[1.0, 1.0])];
        let pair = oblique_dual_family(&mercedes_benz(), &Subspace::full(2), &h, &tol).unwrap();
        assert_abs_diff_eq!(mixed_gram_matrix(&pair).trace(), 2.0, epsilon = 1e-13);
    }

    #[test]
    fn mercedes_benz_coherence_is_welch_saturated() {
        let r = mixed_coherence(&mb_pair(), &Tolerance::default()).unwrap();
        assert_abs_diff_eq!(r.max_off_diagonal_sq, 1.0 / 9.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.welch_bound, 1.0 / 9.0, epsilon = 1e-16);
        assert!(r.saturated && r.diagonal_constant);
    }

    #[test]
    fn standard_basis_coherence() {
        let sb = standard_basis(2);
        let pair = ObliqueDualPair::new(sb.clone(), sb, &Tolerance::default()).unwrap();
        let r = mixed_coherence(&pair, &Tolerance::default()).unwrap();
        assert_eq!(r.max_off_diagonal_sq, 0.0);
        assert_eq!(r.welch_bound, 0.0);
        assert!(r.saturated);
        assert!(mixed_gram(&pair, &Tolerance::default()).unwrap().signature.is_none());
    }

    #[test]
    fn non_constant_diagonal_is_rejected() {
        let tol = Tolerance::default();
        // For Mercedes-Benz, I - G projects onto (1,1,1)/sqrt(3), so every v_j
        // shifts by the mean of h; the diagonal <w_j, v_j> stops being constant.
        let h = vec![v(&[0.3, 0.0]), v(&[0.0, 0.0]), v(&[0.0, 0.0])];
        let pair = oblique_dual_family(&mercedes_benz(), &Subspace::full(2), &h, &tol).unwrap();
        assert!(matches!(mixed_coherence(&pair, &tol), Err(Error::HypothesisViolated(_))));
    }

    #[test]
    fn signature_matrix_of_mercedes_benz() {
        let tol = Tolerance::default();
        let mg = mixed_gram(&mb_pair(), &tol).unwrap();
        let q = mg.signature.expect("saturated pair has a signature matrix");
        let gram_w = mercedes_benz().matrix().transpose() * mercedes_benz().matrix();
        for i in 0..3 {
            assert_abs_diff_eq!(q[(i, i)], 0.0, epsilon = 1e-12);
            for j in 0..3 {
                if i != j {
                    assert_abs_diff_eq!(q[(i, j)], gram_w[(i, j)].signum(), epsilon = 1e-9);
                }
            }
        }
        for i in 0..3 {
            assert_abs_diff_eq!(mg.gram[(i, i)], 2.0 / 3.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn non_saturated_pair_has_no_signature() {
        let tol = Tolerance::default();
        let h = vec![v(&[0.1, 0.0]), v(&[0.0, 0.0]), v(&[0.0, 0.0])];
        let pair = oblique_dual_family(&mercedes_benz(), &Subspace::full(2), &h, &tol).unwrap();
        assert!(mixed_gram(&pair, &tol).unwrap().signature.is_none());
    }

    #[test]
    fn etf_lifts() {
        let tol = Tolerance::default();
        let lift = etf_lift(&mercedes_benz(), &tol).unwrap();
        assert!(lift.is_equiangular_tight);
        for psi in lift.psi.vectors() {
            assert_abs_diff_eq!(psi.norm(), 1.0, epsilon = 1e-14);
        }
        assert!(etf_lift(&standard_basis(2), &tol).unwrap().is_equiangular_tight);
        let f = FiniteFrame::spanning(vec![v(&[1.0, 0.0]), v(&[1.0, 0.0]), v(&[0.0, 1.0])], &tol).unwrap();
        // S = diag(2, 1): the lifted norms are sqrt(3/4), sqrt(3/4), sqrt(3/2).
        let lift = etf_lift(&f, &tol).unwrap();
        assert!(!lift.is_equiangular_tight);
        assert_abs_diff_eq!(lift.psi.vectors()[0].norm_squared(), 0.75, epsilon = 1e-14);
    }

    #[test]
    fn constant_diagonal_bound_matches_mercedes_benz() {
        // (2 - 4/3)^2 / (3 * 2) + 16/27 = 2/27 + 16/27 = 2/3.
        assert_abs_diff_eq!(constant_diagonal_bound(3, 2, 4.0), 2.0 / 3.0, epsilon = 1e-15);
        // p = 2 reduces to d.
        assert_abs_diff_eq!(constant_diagonal_bound(7, 3, 2.0), 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(constant_diagonal_bound(1, 1, 6.0), 1.0);
    }
}
