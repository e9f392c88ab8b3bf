//! Approximate oblique duals and W2-perturbation certificates.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{oblique_projection, psd_pinv, psd_sqrt, spectral_norm, Matrix, Subspace, Tolerance, Vector};
use crate::measure::{check_support, classify_probabilistic_frame, measure_frame_operator, pushforward, DiscreteMeasure};
use crate::prob_frames::{canonical_dual_measure, is_oblique_dual_measure};
use crate::transport::{coupling_cost, exact_w2, glue, identity_coupling, Coupling};

#[derive(Debug, Clone, PartialEq)]
pub struct ApproxDualReport {
    /// `| sum_k gamma_k x_k y_k^T - pi_{W V^perp} |`.
    pub epsilon_residual: f64,
    /// `| S_nu^{1/2} (I - F) |`, the smallest `alpha` for which the pair does
    /// `alpha`-consistent reconstruction through `gamma`.
    pub consistency_bound: f64,
    pub coupling_used: Coupling,
}

/// Residual of `gamma` as an approximate dual coupling of `(mu, nu)`.
pub fn approx_dual_residual(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    gamma: &Coupling,
    w: &Subspace,
    v: &Subspace,
    tol: &Tolerance,
) -> Result<ApproxDualReport> {
    gamma.check_marginals(mu, nu, tol.eq_tol)?;
    let pi = oblique_projection(w, v, tol)?;
    let moment = gamma.moment_matrix();
    let n = pi.nrows();
    let epsilon_residual = spectral_norm(&(&moment - pi));
    let root = psd_sqrt(&measure_frame_operator(nu), tol);
    let consistency_bound = spectral_norm(&(root * (Matrix::identity(n, n) - moment)));
    Ok(ApproxDualReport { epsilon_residual, consistency_bound, coupling_used: gamma.clone() })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Conversions {
    /// `sqrt(B_nu) * epsilon_residual`, an upper bound on `consistency_bound`.
    pub to_consistency: f64,
    /// `consistency_bound * sqrt(M_2((pi_{W V^perp} S_nu^dagger) # nu))`, an upper
    /// bound on `epsilon_residual`.
    pub to_approx: f64,
    pub consistency_holds: bool,
    pub approx_holds: bool,
}

/// Converts between the approximate-dual and consistent-reconstruction constants.
pub fn consistency_conversions(
    report: &ApproxDualReport,
    b_nu: f64,
    nu: &DiscreteMeasure,
    w: &Subspace,
    v: &Subspace,
    tol: &Tolerance,
) -> Result<Conversions> {
    if !classify_probabilistic_frame(nu, v, tol)?.is_frame {
        return Err(Error::NotAFrame("nu does not span V".into()));
    }
    let map = oblique_projection(w, v, tol)? * psd_pinv(&measure_frame_operator(nu), tol);
    let m2 = pushforward(nu, |y| &map * y).second_moment();
    let to_consistency = b_nu.sqrt() * report.epsilon_residual;
    let to_approx = report.consistency_bound * m2.sqrt();
    Ok(Conversions {
        to_consistency,
        to_approx,
        consistency_holds: report.consistency_bound <= to_consistency + 1e-9,
        approx_holds: report.epsilon_residual <= to_approx + 1e-9,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationCertificate {
    /// Transport cost of the perturbation coupling between `nu` and `eta`.
    pub lambda: f64,
    /// Lower frame bound `A` of `nu` used in the certificate.
    pub a_lower: f64,
    /// Optimal lower frame bound of `nu`.
    pub a_optimal: f64,
    /// Upper frame bound `C` of `mu`.
    pub c_upper: f64,
    pub epsilon: f64,
    /// `sqrt(lambda / A)`.
    pub epsilon_claimed: f64,
    /// Residual of the glued coupling between `mu` and `eta`.
    pub epsilon_actual: f64,
    pub glued_coupling: Coupling,
    /// `(sqrt(A_opt) - sqrt(lambda))^2`, present when `lambda < A_opt`.
    pub eta_lower_bound_predicted: Option<f64>,
    /// Optimal lower frame bound of `eta` on `V`, if `eta` is a frame.
    pub eta_lower_bound: Option<f64>,
    /// `epsilon_actual <= epsilon` and the predicted frame bound of `eta` holds.
    pub holds: bool,
}

/// Certifies that `eta`, a transport perturbation of the dual `nu`, is an
/// `epsilon`-approximate dual of `mu`.
///
/// `a_lower` overrides the lower bound of `nu`; by default the certificate uses
/// `min(A_opt, 1/C)`, which any dual admits and which satisfies `A C <= 1`.
#[allow(clippy::too_many_arguments)]
pub fn perturbation_certificate(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    gamma_dual: &Coupling,
    eta: &DiscreteMeasure,
    gamma_pert: &Coupling,
    epsilon: f64,
    w: &Subspace,
    v: &Subspace,
    a_lower: Option<f64>,
    tol: &Tolerance,
) -> Result<PerturbationCertificate> {
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::HypothesisViolated(format!("epsilon = {epsilon} must lie in [0, 1)")));
    }
    let dual = is_oblique_dual_measure(mu, nu, gamma_dual, w, v, tol)?;
    if !dual.is_dual {
        return Err(Error::NotADual { residual: dual.residual, tol: tol.eq_tol });
    }
    gamma_pert.check_marginals(nu, eta, tol.eq_tol)?;
    check_support(eta, v, tol)?;
    let (a_optimal, c_upper) = frame_constants(mu, nu, w, v, tol)?;
    let a = match a_lower {
        Some(a) if a > a_optimal + tol.eq_tol || a <= 0.0 => {
            return Err(Error::HypothesisViolated(format!(
                "A = {a} is not a lower frame bound of nu (optimal {a_optimal})"
            )))
        }
        Some(a) => a,
        None => a_optimal.min(1.0 / c_upper),
    };
    if a * c_upper > 1.0 + 1e-9 {
        return Err(Error::HypothesisViolated(format!("A C = {} exceeds 1", a * c_upper)));
    }
    let lambda = coupling_cost(gamma_pert);
    if lambda > a * epsilon * epsilon + 1e-15 {
        return Err(Error::HypothesisViolated(format!(
            "perturbation cost {lambda:e} exceeds A eps^2 = {:e}",
            a * epsilon * epsilon
        )));
    }

    let glued = glue(gamma_dual, gamma_pert, tol.eq_tol)?.project_xz();
    let pi = oblique_projection(w, v, tol)?;
    let epsilon_actual = spectral_norm(&(glued.moment_matrix() - pi));

    let eta_lower_bound = classify_probabilistic_frame(eta, v, tol)?.bounds.map(|b| b.0);
    let eta_lower_bound_predicted = (lambda < a_optimal).then(|| (a_optimal.sqrt() - lambda.sqrt()).powi(2));
    let frame_bound_ok = match eta_lower_bound_predicted {
        Some(p) => eta_lower_bound.is_some_and(|b| b >= p - 1e-9),
        None => true,
    };
    Ok(PerturbationCertificate {
        lambda,
        a_lower: a,
        a_optimal,
        c_upper,
        epsilon,
        epsilon_claimed: (lambda / a).sqrt(),
        epsilon_actual,
        glued_coupling: glued,
        eta_lower_bound_predicted,
        eta_lower_bound,
        holds: epsilon_actual <= epsilon + 1e-9 && frame_bound_ok,
    })
}

/// Optimal lower bound of `nu` on `V` and upper bound of `mu` on `W`.
fn frame_constants(mu: &DiscreteMeasure, nu: &DiscreteMeasure, w: &Subspace, v: &Subspace, tol: &Tolerance) -> Result<(f64, f64)> {
    let (_, c) = classify_probabilistic_frame(mu, w, tol)?
        .bounds
        .ok_or_else(|| Error::NotAFrame("mu does not span W".into()))?;
    let (a, _) = classify_probabilistic_frame(nu, v, tol)?
        .bounds
        .ok_or_else(|| Error::NotAFrame("nu does not span V".into()))?;
    Ok((a, c))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRow {
    pub trial: usize,
    pub lambda: f64,
    pub eps_claimed: f64,
    pub eps_actual: f64,
    /// `(sqrt(A_opt) - sqrt(lambda))^2`, when `lambda < A_opt`.
    pub eta_bound_predicted: Option<f64>,
    pub eta_bound: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InteriorityReport {
    pub epsilon: f64,
    pub trials: usize,
    pub failures: usize,
    pub max_epsilon_actual: f64,
    pub a_lower: f64,
    pub c_upper: f64,
    pub seed: u64,
    #[serde(skip)]
    pub rows: Vec<TrialRow>,
}

/// Samples perturbations `eta` of the canonical dual of `mu` inside the W2
/// ball of radius `sqrt(A) epsilon` and certifies each one.
///
/// Trial `t` draws Gaussian jitter in `V` from a ChaCha8 stream seeded with
/// `seed + t`, then rescales it so that `W_2(nu, eta)` lands in
/// `[0.9, 0.999] sqrt(A) epsilon`. The perturbation coupling is the optimal one.
pub fn interiority_experiment(
    mu: &DiscreteMeasure,
    w: &Subspace,
    v: &Subspace,
    epsilon: f64,
    trials: usize,
    seed: u64,
    tol: &Tolerance,
) -> Result<InteriorityReport> {
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::HypothesisViolated(format!("epsilon = {epsilon} must lie in [0, 1)")));
    }
    let (nu, gamma_dual) = canonical_dual_measure(mu, w, v, tol)?;
    let (a_optimal, c_upper) = frame_constants(mu, &nu, w, v, tol)?;
    let a = a_optimal.min(1.0 / c_upper);
    let radius = a.sqrt() * epsilon;

    let rows = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial as u64));
            let (eta, gamma_pert) = if epsilon == 0.0 {
                (nu.clone(), identity_coupling(&nu))
            } else {
                sample_in_ball(&nu, v, radius, &mut rng)?
            };
            let cert = perturbation_certificate(mu, &nu, &gamma_dual, &eta, &gamma_pert, epsilon, w, v, Some(a), tol)?;
            Ok(TrialRow {
                trial,
                lambda: cert.lambda,
                eps_claimed: cert.epsilon_claimed,
                eps_actual: cert.epsilon_actual,
                eta_bound_predicted: cert.eta_lower_bound_predicted,
                eta_bound: cert.eta_lower_bound,
                pass: cert.holds,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(InteriorityReport {
        epsilon,
        trials,
        failures: rows.iter().filter(|r| !r.pass).count(),
        max_epsilon_actual: rows.iter().map(|r| r.eps_actual).fold(0.0, f64::max),
        a_lower: a,
        c_upper,
        seed,
        rows,
    })
}

/// Jitters the atoms of `nu` along a random direction field in `V`, scaled so
/// that the exact W2 distance falls just inside `radius`.
fn sample_in_ball(
    nu: &DiscreteMeasure,
    v: &Subspace,
    radius: f64,
    rng: &mut ChaCha8Rng,
) -> Result<(DiscreteMeasure, Coupling)> {
    let n = nu.ambient_dim();
    let noise: Vec<Vector> = nu
        .points()
        .iter()
        .map(|_| v.project(&Vector::from_fn(n, |_, _| StandardNormal.sample(&mut *rng))))
        .collect();
    let jitter = |s: f64| -> Result<(DiscreteMeasure, Coupling, f64)> {
        let points = nu.points().iter().zip(&noise).map(|(y, g)| y + g * s).collect();
        let eta = DiscreteMeasure::new(points, nu.weights().to_vec())?;
        let sol = exact_w2(nu, &eta)?;
        Ok((eta, sol.coupling, sol.distance))
    };
    let (low, high) = (0.9 * radius, 0.999 * radius);
    let spread: f64 = noise.iter().zip(nu.weights()).map(|(g, w)| w * g.norm_squared()).sum::<f64>().sqrt();
    if spread == 0.0 {
        return Ok((nu.clone(), identity_coupling(nu)));
    }
    // The identity coupling costs s * spread, so W2 <= high at this scale.
    let mut lo = high / spread;
    let mut best = jitter(lo)?;
    if best.2 >= low {
        return Ok((best.0, best.1));
    }
    let mut hi = lo;
    loop {
        hi *= 2.0;
        let trial = jitter(hi)?;
        if trial.2 > high {
            break;
        }
        lo = hi;
        best = trial;
        if best.2 >= low {
            return Ok((best.0, best.1));
        }
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        let trial = jitter(mid)?;
        if trial.2 > high {
            hi = mid;
        } else {
            lo = mid;
            best = trial;
            if best.2 >= low {
                break;
            }
        }
    }
    Ok((best.0, best.1))
}
