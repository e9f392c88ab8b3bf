//! Gradient descent over all oblique duals: the p = 2 minimizer is the
//! canonical dual, and larger p trade the frame potential for flatter Gram entries.

use oblique_duals::frames::canonical_oblique_dual;
use oblique_duals::linalg::Tolerance;
use oblique_duals::optimize::{minimize_dual_potential, OptimizerOptions};
use oblique_duals::potentials::dual_p_potential;
use oblique_duals::random::{admissible_subspace, random_frame, random_subspace};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> oblique_duals::error::Result<()> {
    let tol = Tolerance::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let w = random_subspace(&mut rng, 4, 2, &tol)?;
    let frame = random_frame(&mut rng, &w, 5, &tol)?;
    let v = admissible_subspace(&mut rng, &w, 0.6, &tol)?;

    let canonical = canonical_oblique_dual(&frame, &v, &tol)?;
    println!("canonical dual potential (p = 2): {:.10}", dual_p_potential(&canonical, 2.0, &tol)?.value);

    for p in [2.0, 4.0] {
        let m = minimize_dual_potential(&frame, &v, p, &OptimizerOptions::default(), &tol)?;
        let first = m.trajectory.first().copied().unwrap_or(f64::NAN);
        let last = m.trajectory.last().copied().unwrap_or(f64::NAN);
        println!("p = {p}: {first:.6} -> {last:.10} in {} steps, |grad| = {:.1e}", m.iterations, m.grad_norm);
        if p == 2.0 {
            let gap = (&m.pair.analysis.matrix() - canonical.analysis.matrix()).norm();
            println!("distance from the canonical dual: {gap:.2e}");
        }
    }
    Ok(())
}
