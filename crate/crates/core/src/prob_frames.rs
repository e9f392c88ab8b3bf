//! Oblique duals of finitely supported probabilistic frames.
//!
//! A measure `nu` on `V` is an oblique dual of `mu` on `W` when some coupling
//! `gamma` of the two satisfies `sum_k gamma_k x_k y_k^T = pi_{W V^perp}`.
//! Duality is always certified through an explicit coupling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{oblique_projection, psd_pinv, spectral_norm, Matrix, Subspace, Tolerance, Vector};
use crate::measure::{check_support, classify_probabilistic_frame, measure_frame_operator, pushforward, DiscreteMeasure};
use crate::transport::{graph_coupling, Coupling};

/// Positions of a dual atom and its canonical image closer than this count as equal.
pub const MAP_MATCH_TOL: f64 = 1e-6;

const PROBE_SEED: u64 = 0x5eed_0b11;
const PROBE_COUNT: usize = 16;

fn require_frame(mu: &DiscreteMeasure, w: &Subspace, tol: &Tolerance) -> Result<()> {
    let report = classify_probabilistic_frame(mu, w, tol)?;
    if report.is_frame {
        Ok(())
    } else {
        Err(Error::NotAFrame(format!("support of the measure does not span a {}-dimensional subspace", w.dim())))
    }
}

/// `pi_{V W^perp} S_mu^dagger`, the canonical dual map of a frame `mu` for `W`.
pub fn canonical_dual_map(mu: &DiscreteMeasure, w: &Subspace, v: &Subspace, tol: &Tolerance) -> Result<Matrix> {
    require_frame(mu, w, tol)?;
    Ok(oblique_projection(v, w, tol)? * psd_pinv(&measure_frame_operator(mu), tol))
}

/// Canonical oblique dual `(pi_{V W^perp} S_mu^dagger) # mu` with its graph coupling.
pub fn canonical_dual_measure(
    mu: &DiscreteMeasure,
    w: &Subspace,
    v: &Subspace,
    tol: &Tolerance,
) -> Result<(DiscreteMeasure, Coupling)> {
    let map = canonical_dual_map(mu, w, v, tol)?;
    Ok((pushforward(mu, |x| &map * x), graph_coupling(mu, |x| &map * x)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureDualReport {
    pub is_dual: bool,
    /// `| sum_k gamma_k x_k y_k^T - pi_{W V^perp} |` in spectral norm.
    pub residual: f64,
    /// Largest residual over random probes of each of the five equivalent
    /// reconstruction identities (restricted to `W`, on all of `R^n`, the
    /// adjoint form, and the two bilinear forms).
    pub condition_residuals: [f64; 5],
    /// Whether every probe-based verdict agrees with `is_dual`.
    pub conditions_consistent: bool,
}

/// Certifies `nu` as an oblique dual of `mu` through the coupling `gamma`.
///
/// Validates the marginals of `gamma` and the supports (`mu` in `W`, `nu` in `V`).
pub fn is_oblique_dual_measure(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    gamma: &Coupling,
    w: &Subspace,
    v: &Subspace,
    tol: &Tolerance,
) -> Result<MeasureDualReport> {
    gamma.check_marginals(mu, nu, tol.eq_tol)?;
    check_support(mu, w, tol)?;
    check_support(nu, v, tol)?;
    let pi = oblique_projection(w, v, tol)?;
    let pi_adj = pi.transpose();
    let moment = gamma.moment_matrix();
    let residual = spectral_norm(&(&moment - &pi));
    let is_dual = residual <= tol.eq_tol;

    let n = w.ambient_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
    let mut unit = || {
        let x = Vector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
        let norm = x.norm();
        x / norm
    };
    let mut worst = [0.0_f64; 5];
    for _ in 0..PROBE_COUNT {
        let (f, g) = (unit(), unit());
        let fw = w.project(&f);
        let fw = if fw.norm() > 0.0 { &fw / fw.norm() } else { fw };
        // sum_k gamma_k x_k <y_k, f> = moment f, and the adjoint sum is moment^T f.
        let synth = |h: &Vector| gamma.pairs().iter().fold(Vector::zeros(n), |acc, (x, y, c)| acc + x * (c * y.dot(h)));
        let adj = |h: &Vector| gamma.pairs().iter().fold(Vector::zeros(n), |acc, (x, y, c)| acc + y * (c * x.dot(h)));
        let bilinear = |a: &Vector, b: &Vector| gamma.pairs().iter().map(|(x, y, c)| c * x.dot(a) * y.dot(b)).sum::<f64>();
        let r = [
            (&fw - synth(&fw)).norm(),
            (&pi * &f - synth(&f)).norm(),
            (&pi_adj * &f - adj(&f)).norm(),
            ((&pi * &f).dot(&g) - bilinear(&g, &f)).abs(),
            ((&pi_adj * &f).dot(&g) - bilinear(&f, &g)).abs(),
        ];
        for (acc, x) in worst.iter_mut().zip(r) {
            *acc = acc.max(x);
        }
    }
    let conditions_consistent = worst.iter().all(|&r| (r <= tol.eq_tol) == is_dual);
    Ok(MeasureDualReport { is_dual, residual, condition_residuals: worst, conditions_consistent })
}

/// The dual map `T(x) = pi_{V W^perp} S_mu^dagger x + h(x) - K x` with
/// `K = sum_k w_k h(x_k) x_k^T S_mu^dagger`.
pub struct DualMap<F> {
    canonical: Matrix,
    correction: Matrix,
    h: F,
}

impl<F: Fn(&Vector) -> Vector> DualMap<F> {
    pub fn apply(&self, x: &Vector) -> Vector {
        &self.canonical * x + (self.h)(x) - &self.correction * x
    }

    /// `pi_{V W^perp} S_mu^dagger`.
    pub fn canonical(&self) -> &Matrix {
        &self.canonical
    }

    /// The linear correction `K` subtracted from `h`.
    pub fn correction(&self) -> &Matrix {
        &self.correction
    }

    /// `T # mu` together with the graph coupling `(Id, T) # mu`.
    pub fn dual_measure(&self, mu: &DiscreteMeasure) -> (DiscreteMeasure, Coupling) {
        (pushforward(mu, |x| self.apply(x)), graph_coupling(mu, |x| self.apply(x)))
    }
}

/// Builds the pushforward-type dual map generated by `h`, which must send every
/// support point of `mu` into `V`.
pub fn pushforward_dual_map<F: Fn(&Vector) -> Vector>(
    mu: &DiscreteMeasure,
    w: &Subspace,
    v: &Subspace,
    h: F,
    tol: &Tolerance,
) -> Result<DualMap<F>> {
    let canonical = canonical_dual_map(mu, w, v, tol)?;
    let s_pinv = psd_pinv(&measure_frame_operator(mu), tol);
    let n = mu.ambient_dim();
    let mut correction = Matrix::zeros(n, n);
    for (index, x, weight) in mu.support() {
        let hx = h(x);
        if hx.len() != n {
            return Err(Error::DimensionMismatch(format!("h maps point {index} to length {}", hx.len())));
        }
        if !v.contains(&hx, tol.eq_tol) {
            return Err(Error::RangeViolation { index, distance: v.distance(&hx) });
        }
        correction += hx * x.transpose() * weight;
    }
    Ok(DualMap { canonical, correction: correction * s_pinv, h })
}

/// Moves a dual from `V` to another subspace `K` with `R^n = W (+) K^perp`:
/// `nu_K = pi_{K W^perp} # nu`, `gamma_K = (Id, pi_{K W^perp}) # gamma`.
pub fn transfer_dual_to_k(
    nu: &DiscreteMeasure,
    gamma: &Coupling,
    w: &Subspace,
    k: &Subspace,
    tol: &Tolerance,
) -> Result<(DiscreteMeasure, Coupling)> {
    let pi_kw = oblique_projection(k, w, tol)?;
    Ok((pushforward(nu, |y| &pi_kw * y), gamma.map(|x| x.clone(), |y| &pi_kw * y)))
}

/// Consistent-reconstruction residual: for each probe `f`,
/// `fhat = sum_k gamma_k x_k <y_k, f>` and the residual is
/// `max_z |<f - fhat, z>|` over the support of `nu`. Returns the worst probe.
pub fn probabilistic_consistency_check(nu: &DiscreteMeasure, gamma: &Coupling, probes: &[Vector]) -> f64 {
    let moment = gamma.moment_matrix();
    probes
        .iter()
        .map(|f| {
            let err = f - &moment * f;
            nu.support().map(|(_, z, _)| err.dot(z).abs()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PotentialMode {
    /// `nu` is the pushforward of `mu` under a dual map; bound `d_W`.
    Pushforward,
    /// Any oblique dual; bound `(A/B) d_W` with `A, B` the bounds of `mu`.
    General,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbPotentialReport {
    pub mode: PotentialMode,
    /// `trace(S_mu S_nu)`.
    pub value: f64,
    pub lower_bound: f64,
    pub gap: f64,
    /// `gap <= sat_tol`.
    pub saturated: bool,
    /// The equality characterization checked directly: the coupling pairs
    /// every atom with its canonical image (pushforward mode), or `mu` is tight
    /// and `nu` is the canonical dual measure (general mode).
    pub equality_condition: bool,
}

/// `sum_jk mu_j nu_k |<x_j, y_k>|^2` for a dual certified by `gamma`.
pub fn pf_dual_potential(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    gamma: &Coupling,
    w: &Subspace,
    v: &Subspace,
    mode: PotentialMode,
    tol: &Tolerance,
) -> Result<ProbPotentialReport> {
    let certificate = is_oblique_dual_measure(mu, nu, gamma, w, v, tol)?;
    if !certificate.is_dual {
        return Err(Error::NotADual { residual: certificate.residual, tol: tol.eq_tol });
    }
    let frame = classify_probabilistic_frame(mu, w, tol)?;
    let (a, b) = frame.bounds.ok_or_else(|| Error::NotAFrame("mu does not span W".into()))?;
    let value = (&frame.frame_operator * measure_frame_operator(nu)).trace();
    let d = w.dim() as f64;
    let canonical = canonical_dual_map(mu, w, v, tol)?;
    let (lower_bound, equality_condition) = match mode {
        PotentialMode::Pushforward => {
            let matches = gamma.pairs().iter().filter(|p| p.2 > 0.0).all(|(x, y, _)| {
                let image = &canonical * x;
                (y - &image).norm() <= MAP_MATCH_TOL * image.norm().max(1.0)
            });
            (d, matches)
        }
        PotentialMode::General => {
            let canonical_nu = pushforward(mu, |x| &canonical * x);
            ((a / b) * d, frame.is_tight && nu.weak_eq(&canonical_nu, tol.eq_tol))
        }
    };
    let gap = value - lower_bound;
    Ok(ProbPotentialReport { mode, value, lower_bound, gap, saturated: gap <= tol.sat_tol, equality_condition })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimalEnergy {
    /// `omega_k = <f, pi_{V W^perp} S_mu^dagger x_k>`, one per atom.
    pub coefficients: Vec<f64>,
    /// `sum_k w_k omega_k^2`.
    pub energy: f64,
    /// `| sum_k w_k omega_k x_k - pi_{W V^perp} f |`.
    pub constraint_residual: f64,
}

/// Minimal-energy coefficients synthesizing `pi_{W V^perp} f` from the atoms of `mu`.
pub fn minimal_energy_coefficients(
    mu: &DiscreteMeasure,
    w: &Subspace,
    v: &Subspace,
    f: &Vector,
    tol: &Tolerance,
) -> Result<MinimalEnergy> {
    if f.len() != mu.ambient_dim() {
        return Err(Error::DimensionMismatch(format!("signal has length {}, measure lives in R^{}", f.len(), mu.ambient_dim())));
    }
    let map = canonical_dual_map(mu, w, v, tol)?;
    let dual_f = map.transpose() * f;
    let coefficients: Vec<f64> = mu.points().iter().map(|x| dual_f.dot(x)).collect();
    let energy = coefficients.iter().zip(mu.weights()).map(|(c, wt)| wt * c * c).sum();
    let synthesized = mu
        .points()
        .iter()
        .zip(mu.weights())
        .zip(&coefficients)
        .fold(Vector::zeros(f.len()), |acc, ((x, wt), c)| acc + x * (wt * c));
    let target = oblique_projection(w, v, tol)? * f;
    Ok(MinimalEnergy { coefficients, energy, constraint_residual: (synthesized - target).norm() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::mercedes_benz;
    use crate::transport::product_coupling;
    use approx::assert_abs_diff_eq;

    fn v(xs: &[f64]) -> Vector {
        Vector::from_column_slice(xs)
    }

    struct Example {
        mu: DiscreteMeasure,
        nu: DiscreteMeasure,
        w: Subspace,
        v: Subspace,
    }

    fn example() -> Example {
        let tol = Tolerance::default();
        Example {
            mu: DiscreteMeasure::dirac(v(&[1.0, 0.0])),
            nu: DiscreteMeasure::uniform(vec![v(&[0.0, 0.0]), v(&[2.0, 2.0])]).unwrap(),
            w: Subspace::span(&[v(&[1.0, 0.0])], &tol).unwrap(),
            v: Subspace::span(&[v(&[1.0, 1.0])], &tol).unwrap(),
        }
    }

    fn mb_measure() -> DiscreteMeasure {
        DiscreteMeasure::uniform(mercedes_benz().vectors().to_vec()).unwrap()
    }

    #[test]
    fn canonical_duals() {
        let tol = Tolerance::default();
        let ex = example();
        let (nu, gamma) = canonical_dual_measure(&ex.mu, &ex.w, &ex.v, &tol).unwrap();
        assert!(nu.weak_eq(&DiscreteMeasure::dirac(v(&[1.0, 1.0])), 1e-12));
        assert!(is_oblique_dual_measure(&ex.mu, &nu, &gamma, &ex.w, &ex.v, &tol).unwrap().is_dual);

        let full = Subspace::full(2);
        let (nu, gamma) = canonical_dual_measure(&mb_measure(), &full, &full, &tol).unwrap();
        for (y, x) in nu.points().iter().zip(mercedes_benz().vectors()) {
            assert_abs_diff_eq!(*y, x * 2.0, epsilon = 1e-13);
        }
        let r = is_oblique_dual_measure(&mb_measure(), &nu, &gamma, &full, &full, &tol).unwrap();
        assert!(r.is_dual && r.conditions_consistent);
    }

    #[test]
    fn product_coupling_certifies_example_dual() {
        let tol = Tolerance::default();
        let ex = example();
        let gamma = product_coupling(&ex.mu, &ex.nu);
        let r = is_oblique_dual_measure(&ex.mu, &ex.nu, &gamma, &ex.w, &ex.v, &tol).unwrap();
        assert!(r.is_dual && r.residual < 1e-12 && r.conditions_consistent);
    }

    #[test]
    fn wrong_coupling_is_a_marginal_mismatch() {
        let tol = Tolerance::default();
        let ex = example();
        let gamma = Coupling::new(vec![(v(&[1.0, 0.0]), v(&[0.0, 0.0]), 1.0)]).unwrap();
        let err = is_oblique_dual_measure(&ex.mu, &ex.nu, &gamma, &ex.w, &ex.v, &tol).unwrap_err();
        assert!(matches!(err, Error::MarginalMismatch(_)));
    }

    #[test]
    fn non_dual_is_detected_consistently() {
        let tol = Tolerance::default();
        let ex = example();
        let nu = DiscreteMeasure::uniform(vec![v(&[0.0, 0.0]), v(&[3.0, 3.0])]).unwrap();
        let gamma = product_coupling(&ex.mu, &nu);
        let r = is_oblique_dual_measure(&ex.mu, &nu, &gamma, &ex.w, &ex.v, &tol).unwrap();
        assert!(!r.is_dual && r.conditions_consistent);
        assert_abs_diff_eq!(r.residual, 0.5 * 2f64.sqrt(), epsilon = 1e-12);
        let probes = [v(&[1.0, 0.0]), v(&[0.0, 1.0])];
        assert!(probabilistic_consistency_check(&nu, &gamma, &probes) > 0.1);
    }

    #[test]
    fn consistency_on_duals() {
        let tol = Tolerance::default();
        let ex = example();
        let probes = [v(&[1.0, 0.0]), v(&[0.0, 1.0]), v(&[0.3, -2.0])];
        let gamma = product_coupling(&ex.mu, &ex.nu);
        assert!(probabilistic_consistency_check(&ex.nu, &gamma, &probes) < 1e-12);
        let (nu, gamma) = canonical_dual_measure(&ex.mu, &ex.w, &ex.v, &tol).unwrap();
        assert!(probabilistic_consistency_check(&nu, &gamma, &probes) < 1e-12);
    }

    #[test]
    fn pushforward_duals() {
        let tol = Tolerance::default();
        let full = Subspace::full(2);
        let mu = mb_measure();
        let zero = pushforward_dual_map(&mu, &full, &full, |x: &Vector| x * 0.0, &tol).unwrap();
        assert_abs_diff_eq!(*zero.canonical(), Matrix::identity(2, 2) * 2.0, epsilon = 1e-13);
        assert_abs_diff_eq!(*zero.correction(), Matrix::zeros(2, 2));

        // h(x) = 0.3 x gives K = 0.3 S S^dagger = 0.3 I, so T is again canonical.
        let scaled = pushforward_dual_map(&mu, &full, &full, |x: &Vector| x * 0.3, &tol).unwrap();
        let (nu, gamma) = scaled.dual_measure(&mu);
        assert!(is_oblique_dual_measure(&mu, &nu, &gamma, &full, &full, &tol).unwrap().is_dual);

        let bent = pushforward_dual_map(&mu, &full, &full, |x: &Vector| v(&[x[1] * x[1], 0.0]), &tol).unwrap();
        let (nu, gamma) = bent.dual_measure(&mu);
        assert!(is_oblique_dual_measure(&mu, &nu, &gamma, &full, &full, &tol).unwrap().is_dual);
        let report = pf_dual_potential(&mu, &nu, &gamma, &full, &full, PotentialMode::Pushforward, &tol).unwrap();
        assert!(report.gap > 1e-6 && !report.saturated && !report.equality_condition);
    }

    #[test]
    fn range_violation() {
        let tol = Tolerance::default();
        let ex = example();
        let err = pushforward_dual_map(&ex.mu, &ex.w, &ex.v, |_: &Vector| v(&[1.0, 0.0]), &tol).err().unwrap();
        assert!(matches!(err, Error::RangeViolation { index: 0, .. }));
    }

    #[test]
    fn transfers() {
        let tol = Tolerance::default();
        let ex = example();
        let gamma = product_coupling(&ex.mu, &ex.nu);
        let (nu_v, gamma_v) = transfer_dual_to_k(&ex.nu, &gamma, &ex.w, &ex.v, &tol).unwrap();
        assert!(nu_v.weak_eq(&ex.nu, 1e-12));
        assert_eq!(gamma_v.len(), 2);

        let (nu_w, gamma_w) = transfer_dual_to_k(&ex.nu, &gamma, &ex.w, &ex.w, &tol).unwrap();
        let expected = DiscreteMeasure::uniform(vec![v(&[0.0, 0.0]), v(&[2.0, 0.0])]).unwrap();
        assert!(nu_w.weak_eq(&expected, 1e-12));
        assert!(is_oblique_dual_measure(&ex.mu, &nu_w, &gamma_w, &ex.w, &ex.w, &tol).unwrap().is_dual);

        let k = Subspace::span(&[v(&[1.0, 2.0])], &tol).unwrap();
        let (nu_k, gamma_k) = transfer_dual_to_k(&ex.nu, &gamma, &ex.w, &k, &tol).unwrap();
        assert!(is_oblique_dual_measure(&ex.mu, &nu_k, &gamma_k, &ex.w, &k, &tol).unwrap().is_dual);

        let perp = Subspace::span(&[v(&[0.0, 1.0])], &tol).unwrap();
        let err = transfer_dual_to_k(&ex.nu, &gamma, &ex.w, &perp, &tol).unwrap_err();
        assert!(matches!(err, Error::DirectSumViolation(_)));
    }

    #[test]
    fn potentials() {
        let tol = Tolerance::default();
        let full = Subspace::full(2);
        let mu = mb_measure();
        let (nu, gamma) = canonical_dual_measure(&mu, &full, &full, &tol).unwrap();
        for mode in [PotentialMode::Pushforward, PotentialMode::General] {
            let r = pf_dual_potential(&mu, &nu, &gamma, &full, &full, mode, &tol).unwrap();
            assert_abs_diff_eq!(r.value, 2.0, epsilon = 1e-12);
            assert_abs_diff_eq!(r.lower_bound, 2.0, epsilon = 1e-12);
            assert!(r.saturated && r.equality_condition);
        }

        let ex = example();
        let gamma = product_coupling(&ex.mu, &ex.nu);
        let r = pf_dual_potential(&ex.mu, &ex.nu, &gamma, &ex.w, &ex.v, PotentialMode::General, &tol).unwrap();
        assert_abs_diff_eq!(r.value, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.lower_bound, 1.0, epsilon = 1e-12);
        assert!(!r.saturated && !r.equality_condition);

        let (nu, gamma) = canonical_dual_measure(&ex.mu, &ex.w, &ex.v, &tol).unwrap();
        let r = pf_dual_potential(&ex.mu, &nu, &gamma, &ex.w, &ex.v, PotentialMode::Pushforward, &tol).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-12);
        assert!(r.saturated && r.equality_condition);
    }

    #[test]
    fn potential_requires_dual() {
        let tol = Tolerance::default();
        let ex = example();
        let nu = DiscreteMeasure::dirac(v(&[3.0, 3.0]));
        let gamma = product_coupling(&ex.mu, &nu);
        let err = pf_dual_potential(&ex.mu, &nu, &gamma, &ex.w, &ex.v, PotentialMode::General, &tol).unwrap_err();
        assert!(matches!(err, Error::NotADual { .. }));
    }

    #[test]
    fn minimal_energy() {
        let tol = Tolerance::default();
        let ex = example();
        let r = minimal_energy_coefficients(&ex.mu, &ex.w, &ex.v, &v(&[1.0, 0.0]), &tol).unwrap();
        assert_abs_diff_eq!(r.coefficients[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.energy, 1.0, epsilon = 1e-14);
        assert!(r.constraint_residual < 1e-12);
        // (1, -1) is orthogonal to V.
        let r = minimal_energy_coefficients(&ex.mu, &ex.w, &ex.v, &v(&[1.0, -1.0]), &tol).unwrap();
        assert_abs_diff_eq!(r.energy, 0.0, epsilon = 1e-14);
    }
}
