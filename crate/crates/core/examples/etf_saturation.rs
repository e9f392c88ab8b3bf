//! Mixed coherence against the Welch-type bound, the signature matrix of a
//! saturating pair and the ETF lift of its synthesis frame.

use oblique_duals::frames::{canonical_oblique_dual, mercedes_benz, FiniteFrame};
use oblique_duals::linalg::{Subspace, Tolerance, Vector};
use oblique_duals::potentials::{etf_lift, mixed_coherence, mixed_gram};

fn report(name: &str, frame: &FiniteFrame, tol: &Tolerance) -> oblique_duals::error::Result<()> {
    let pair = canonical_oblique_dual(frame, &Subspace::full(frame.ambient_dim()), tol)?;
    let c = mixed_coherence(&pair, tol)?;
    println!("{name}: max |<w_i, v_j>|^2 = {:.6}, Welch bound {:.6}, saturated {}", c.max_off_diagonal_sq, c.welch_bound, c.saturated);
    if let Some(q) = mixed_gram(&pair, tol)?.signature {
        println!("signature matrix:");
        for row in q.row_iter() {
            println!("  {}", row.iter().map(|x| format!("{:+}", x.round() as i64)).collect::<Vec<_>>().join(" "));
        }
    }
    let lift = etf_lift(frame, tol)?;
    println!("ETF lift is equiangular tight: {}", lift.is_equiangular_tight);
    Ok(())
}

fn main() -> oblique_duals::error::Result<()> {
    let tol = Tolerance::default();
    report("Mercedes-Benz", &mercedes_benz(), &tol)?;
    let angles = [0.0_f64, 45.0, 90.0, 135.0];
    let harmonic = angles.iter().map(|a| Vector::from_column_slice(&[a.to_radians().cos(), a.to_radians().sin()])).collect();
    report("four-vector harmonic frame", &FiniteFrame::spanning(harmonic, &tol)?, &tol)
}
