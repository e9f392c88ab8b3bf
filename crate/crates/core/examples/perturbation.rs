//! Transport perturbations of an oblique dual remain approximate duals:
//! one explicit certificate and a seeded Monte-Carlo sweep.

use oblique_duals::approx::{approx_dual_residual, interiority_experiment, perturbation_certificate};
use oblique_duals::linalg::{Subspace, Tolerance, Vector};
use oblique_duals::measure::DiscreteMeasure;
use oblique_duals::transport::{product_coupling, Coupling};

fn main() -> oblique_duals::error::Result<()> {
    let tol = Tolerance::default();
    let v2 = |x: f64, y: f64| Vector::from_column_slice(&[x, y]);
    let w = Subspace::span(&[v2(1.0, 0.0)], &tol)?;
    let v = Subspace::span(&[v2(1.0, 1.0)], &tol)?;
    let mu = DiscreteMeasure::dirac(v2(1.0, 0.0));
    let nu = DiscreteMeasure::uniform(vec![v2(0.0, 0.0), v2(2.0, 2.0)])?;
    let gamma = product_coupling(&mu, &nu);

    let shift = v2(0.05, 0.05);
    let eta = DiscreteMeasure::uniform(nu.points().iter().map(|y| y + &shift).collect())?;
    let pert = Coupling::new(nu.points().iter().zip(eta.points()).map(|(y, z)| (y.clone(), z.clone(), 0.5)).collect())?;

    let cert = perturbation_certificate(&mu, &nu, &gamma, &eta, &pert, 0.1, &w, &v, None, &tol)?;
    println!(
        "lambda {:.4}, A {:.3}, C {:.3}: claimed eps {:.4}, actual {:.4}, holds {}",
        cert.lambda, cert.a_lower, cert.c_upper, cert.epsilon_claimed, cert.epsilon_actual, cert.holds
    );
    let direct = approx_dual_residual(&mu, &eta, &cert.glued_coupling, &w, &v, &tol)?;
    println!("glued coupling residual {:.4}, consistency bound {:.4}", direct.epsilon_residual, direct.consistency_bound);

    for eps in [0.05, 0.2, 0.5] {
        let r = interiority_experiment(&mu, &w, &v, eps, 200, 42, &tol)?;
        println!("eps {eps}: {} trials, {} failures, worst actual {:.4}", r.trials, r.failures, r.max_epsilon_actual);
    }
    Ok(())
}
