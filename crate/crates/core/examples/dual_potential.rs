//! Dual p-frame potentials of the Mercedes-Benz frame against their lower bounds.

use oblique_duals::frames::{canonical_oblique_dual, mercedes_benz};
use oblique_duals::linalg::{Subspace, Tolerance};
use oblique_duals::potentials::{constant_diagonal_bound, diagonal_potential, dual_p_potential};

fn main() -> oblique_duals::error::Result<()> {
    let tol = Tolerance::default();
    let frame = mercedes_benz();
    let pair = canonical_oblique_dual(&frame, &Subspace::full(2), &tol)?;

    println!("{:>4} {:>12} {:>12} {:>10}", "p", "value", "bound", "saturated");
    for p in [2.0, 3.0, 4.0, 6.0] {
        let r = dual_p_potential(&pair, p, &tol)?;
        let bound = r.lower_bound.map_or("-".to_string(), |b| format!("{b:.6}"));
        println!("{p:>4} {:>12.6} {bound:>12} {:>10}", r.value, r.saturated);
    }
    for p in [4.0, 6.0] {
        println!("constant-diagonal bound at p = {p}: {:.6}", constant_diagonal_bound(3, 2, p));
    }
    let diag = diagonal_potential(&pair, 2.0, &tol)?;
    println!("diagonal potential at p = 2: {:.6} (bound {:.6})", diag.value, diag.lower_bound.unwrap_or(f64::NAN));
    Ok(())
}
