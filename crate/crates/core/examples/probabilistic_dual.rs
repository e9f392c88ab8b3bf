//! Probabilistic frames: classification, the canonical oblique dual measure,
//! its certificate, the dual potential and minimal-energy coefficients.

use oblique_duals::linalg::{Subspace, Tolerance, Vector};
use oblique_duals::measure::{classify_probabilistic_frame, DiscreteMeasure};
use oblique_duals::prob_frames::{
    canonical_dual_measure, is_oblique_dual_measure, minimal_energy_coefficients, pf_dual_potential, PotentialMode,
};
use oblique_duals::transport::product_coupling;

fn main() -> oblique_duals::error::Result<()> {
    let tol = Tolerance::default();
    let v2 = |x: f64, y: f64| Vector::from_column_slice(&[x, y]);
    let w = Subspace::span(&[v2(1.0, 0.0)], &tol)?;
    let v = Subspace::span(&[v2(1.0, 1.0)], &tol)?;
    let mu = DiscreteMeasure::dirac(v2(1.0, 0.0));

    let class = classify_probabilistic_frame(&mu, &w, &tol)?;
    println!("mu = delta_(1,0): frame {}, bounds {:?}, tight {}", class.is_frame, class.bounds, class.is_tight);

    let (canonical, graph) = canonical_dual_measure(&mu, &w, &v, &tol)?;
    println!("canonical dual atoms {:?}", canonical.points().iter().map(|p| p.as_slice().to_vec()).collect::<Vec<_>>());
    let r = is_oblique_dual_measure(&mu, &canonical, &graph, &w, &v, &tol)?;
    println!("graph coupling certifies it: {} (residual {:.1e})", r.is_dual, r.residual);

    let nu = DiscreteMeasure::uniform(vec![v2(0.0, 0.0), v2(2.0, 2.0)])?;
    let gamma = product_coupling(&mu, &nu);
    let r = is_oblique_dual_measure(&mu, &nu, &gamma, &w, &v, &tol)?;
    println!("(delta_0 + delta_(2,2))/2 through the product coupling: dual {} (residual {:.1e})", r.is_dual, r.residual);

    for (name, nu, gamma) in [("canonical", &canonical, &graph), ("two-atom", &nu, &gamma)] {
        let p = pf_dual_potential(&mu, nu, gamma, &w, &v, PotentialMode::General, &tol)?;
        println!("{name} potential {:.4} against bound {:.4}", p.value, p.lower_bound);
    }

    let energy = minimal_energy_coefficients(&mu, &w, &v, &v2(3.0, -1.0), &tol)?;
    println!("minimal-energy coefficients {:?}, energy {:.4}", energy.coefficients, energy.energy);
    Ok(())
}
