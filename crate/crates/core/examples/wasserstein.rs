//! Exact 2-Wasserstein distance by the transportation simplex, with its
//! optimality certificate, and gluing of two couplings.

use oblique_duals::linalg::{Subspace, Vector};
use oblique_duals::measure::DiscreteMeasure;
use oblique_duals::random::random_weighted_measure;
use oblique_duals::transport::{coupling_cost, exact_w2, glue, product_coupling};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> oblique_duals::error::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let plane = Subspace::full(2);
    let mu = random_weighted_measure(&mut rng, &plane, 6)?;
    let nu = random_weighted_measure(&mut rng, &plane, 4)?;

    let sol = exact_w2(&mu, &nu)?;
    println!("W2(mu, nu) = {:.8}", sol.distance);
    println!("simplex pivots {}, duality gap {:.1e}", sol.certificate.iterations, sol.certificate.dual_gap);
    println!("optimal coupling uses {} of {} cells", sol.coupling.len(), mu.len() * nu.len());
    println!("product coupling cost {:.6} >= optimal {:.6}", coupling_cost(&product_coupling(&mu, &nu)), sol.distance.powi(2));

    let shift = Vector::from_column_slice(&[0.5, 0.0]);
    let eta_points = nu.points().iter().map(|y| y + &shift).collect();
    let eta = DiscreteMeasure::new(eta_points, nu.weights().to_vec())?;
    let second = exact_w2(&nu, &eta)?;
    let glued = glue(&sol.coupling, &second.coupling, 1e-9)?;
    let composed = glued.project_xz();
    println!(
        "glued mu -> eta cost {:.6}; triangle bound W2 <= {:.6}",
        coupling_cost(&composed).sqrt(),
        sol.distance + second.distance
    );
    Ok(())
}
