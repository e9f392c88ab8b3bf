//! Oblique projection onto W along V^perp, and what happens when R^n = W (+) V^perp fails.

use oblique_duals::linalg::{oblique_projection, subspace_angle_cos, Subspace, Tolerance, Vector};

fn main() -> oblique_duals::error::Result<()> {
    let tol = Tolerance::default();
    let w = Subspace::span(&[Vector::from_column_slice(&[1.0, 0.0])], &tol)?;
    let v = Subspace::span(&[Vector::from_column_slice(&[1.0, 1.0])], &tol)?;

    let p = oblique_projection(&w, &v, &tol)?;
    println!("pi_(W V^perp) = {p}");
    println!("idempotent defect: {:.2e}", (&p * &p - &p).norm());
    println!("cos angle(W, V) = {:.6}", subspace_angle_cos(&w, &v)?);

    let f = Vector::from_column_slice(&[3.0, -1.0]);
    println!("f = {:?} maps to {:?}", f.as_slice(), (&p * &f).as_slice());

    let orthogonal = Subspace::span(&[Vector::from_column_slice(&[0.0, 1.0])], &tol)?;
    match oblique_projection(&w, &orthogonal, &tol) {
        Ok(_) => println!("unexpected: W (+) V^perp accepted"),
        Err(e) => println!("V = W^perp rejected: {e}"),
    }
    Ok(())
}
