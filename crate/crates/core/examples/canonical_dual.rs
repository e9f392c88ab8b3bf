//! Canonical oblique dual of a frame for a random subspace, a member of the
//! dual family, and reconstruction of pi_(W V^perp) f.

use oblique_duals::frames::{canonical_oblique_dual, frame_bounds, oblique_dual_family, reconstruct};
use oblique_duals::linalg::{Tolerance, Vector};
use oblique_duals::random::{admissible_subspace, gaussian_vector, random_frame, random_subspace};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> oblique_duals::error::Result<()> {
    let tol = Tolerance::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let w = random_subspace(&mut rng, 5, 3, &tol)?;
    let frame = random_frame(&mut rng, &w, 6, &tol)?;
    let v = admissible_subspace(&mut rng, &w, 0.5, &tol)?;

    let (a, b) = frame_bounds(&frame, &tol)?;
    println!("frame of {} vectors in R^5 spanning a 3-dimensional W, bounds [{a:.4}, {b:.4}]", frame.len());

    let canonical = canonical_oblique_dual(&frame, &v, &tol)?;
    println!("canonical dual residual: {:.2e}", canonical.residual);

    let h: Vec<Vector> = (0..frame.len()).map(|_| v.basis() * gaussian_vector(&mut rng, v.dim())).collect();
    let other = oblique_dual_family(&frame, &v, &h, &tol)?;
    println!("family member residual:  {:.2e}", other.residual);

    let f = gaussian_vector(&mut rng, 5);
    for (name, pair) in [("canonical", &canonical), ("family", &other)] {
        let (_, error) = reconstruct(&f, pair)?;
        println!("{name:>9} reconstruction error of pi_(W V^perp) f: {error:.2e}");
    }
    Ok(())
}
