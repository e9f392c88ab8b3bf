//! Steepest descent over the oblique dual family.
//!
//! Every dual of a frame `F` for `W` in `V` has the form
//! `V = pi_{VW^perp} S^dagger W + H (I - G)` with `G = W^T S^dagger W`.
//! The free parameter is written as `H = B_V Z`, so the iterates stay duals
//! by construction and the search runs over the coordinates `Z`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::frames::{canonical_dual_operator, frame_operator, FiniteFrame, ObliqueDualPair};
use crate::linalg::{psd_pinv, Matrix, Subspace, Tolerance, Vector};

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerOptions {
    /// First trial step of the backtracking line search.
    pub initial_step: f64,
    pub max_iters: usize,
    /// Stop once the Frobenius norm of the gradient in `Z` drops below this.
    pub grad_tol: f64,
    /// Seed for the random starting point.
    pub seed: u64,
    /// Sufficient decrease constant.
    pub armijo: f64,
    pub shrink: f64,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self { initial_step: 1.0, max_iters: 200_000, grad_tol: 1e-10, seed: 0, armijo: 1e-4, shrink: 0.5 }
    }
}

/// The p-potential of the dual family as a function of `Z`.
#[derive(Debug, Clone)]
pub struct DualPotentialObjective {
    p: f64,
    synthesis: Matrix,
    canonical: Matrix,
    complement: Matrix,
    v_basis: Matrix,
}

impl DualPotentialObjective {
    pub fn new(frame: &FiniteFrame, v: &Subspace, p: f64, tol: &Tolerance) -> Result<Self> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::HypothesisViolated(format!("optimizer needs p >= 1, got {p}")));
        }
        let synthesis = frame.matrix();
        let canonical = canonical_dual_operator(frame, v, tol)? * &synthesis;
        let n = frame.len();
        let gram = synthesis.transpose() * psd_pinv(&frame_operator(frame), tol) * &synthesis;
        Ok(Self { p, synthesis, canonical, complement: Matrix::identity(n, n) - gram, v_basis: v.basis().clone() })
    }

    /// Shape of `Z`: `(dim V, N)`.
    pub fn shape(&self) -> (usize, usize) {
        (self.v_basis.ncols(), self.synthesis.ncols())
    }

    /// Analysis matrix (vectors as columns) for the parameter `Z`.
    pub fn analysis(&self, z: &Matrix) -> Matrix {
        &self.canonical + &self.v_basis * z * &self.complement
    }

    fn mixed_gram(&self, z: &Matrix) -> Matrix {
        self.synthesis.transpose() * self.analysis(z)
    }

    /// `value(z + dz) - value(z)`, evaluated entrywise from the Gram increment
    /// so that small decreases are not lost to cancellation.
    pub fn change(&self, z: &Matrix, dz: &Matrix) -> f64 {
        let g = self.mixed_gram(z);
        let dg = self.synthesis.transpose() * &self.v_basis * dz * &self.complement;
        g.iter().zip(dg.iter()).map(|(&a, &b)| power_difference(a, b, self.p)).sum()
    }

    pub fn value(&self, z: &Matrix) -> f64 {
        self.mixed_gram(z).iter().map(|g| g.abs().powf(self.p)).sum()
    }

    /// `B_V^T W D (I - G)` with `D_ij = p sign(G_ij) |G_ij|^{p-1}`.
    pub fn gradient(&self, z: &Matrix) -> Matrix {
        let p = self.p;
        let d = self.mixed_gram(z).map(|g| p * g.signum() * g.abs().powf(p - 1.0));
        self.v_basis.transpose() * &self.synthesis * d * &self.complement
    }
}

#[derive(Debug, Clone)]
pub struct Minimization {
    pub pair: ObliqueDualPair,
    /// Potential value at the start and after every accepted step.
    pub trajectory: Vec<f64>,
    pub iterations: usize,
    pub grad_norm: f64,
}

/// Minimizes the dual p-potential from a seeded random start.
///
/// Fails with [`Error::NonConvergence`] if the gradient norm is still above
/// `grad_tol` after `max_iters` steps.
pub fn minimize_dual_potential(
    frame: &FiniteFrame,
    v: &Subspace,
    p: f64,
    opts: &OptimizerOptions,
    tol: &Tolerance,
) -> Result<Minimization> {
    let obj = DualPotentialObjective::new(frame, v, p, tol)?;
    let (rows, cols) = obj.shape();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut z = Matrix::from_fn(rows, cols, |_, _| StandardNormal.sample(&mut rng));

    let mut value = obj.value(&z);
    let mut trajectory = vec![value];
    let mut step = opts.initial_step;
    let mut iterations = 0;
    let mut grad = obj.gradient(&z);
    let mut grad_norm = grad.norm();

    while grad_norm > opts.grad_tol {
        if iterations >= opts.max_iters {
            return Err(Error::NonConvergence { iterations, grad_norm });
        }
        let slope = grad_norm * grad_norm;
        let accepted = loop {
            let dz = &grad * -step;
            let change = obj.change(&z, &dz);
            if change <= -opts.armijo * step * slope {
                break Some((&z + dz, value + change));
            }
            step *= opts.shrink;
            if step < f64::MIN_POSITIVE {
                break None;
            }
        };
        let Some((next, next_value)) = accepted else {
            return Err(Error::NonConvergence { iterations, grad_norm });
        };
        z = next;
        value = next_value;
        trajectory.push(value);
        iterations += 1;
        step /= opts.shrink;
        grad = obj.gradient(&z);
        grad_norm = grad.norm();
    }

    let analysis = FiniteFrame::new(vectors_of(&obj.analysis(&z)), v.clone(), tol)?;
    let pair = ObliqueDualPair::new(frame.clone(), analysis, tol)?;
    Ok(Minimization { pair, trajectory, iterations, grad_norm })
}

/// `|a + b|^p - |a|^p` without cancellation when `|b| << |a|`.
fn power_difference(a: f64, b: f64, p: f64) -> f64 {
    let t = b / a;
    if a == 0.0 || t.is_nan() || t <= -1.0 {
        return (a + b).abs().powf(p) - a.abs().powf(p);
    }
    a.abs().powf(p) * (p * t.ln_1p()).exp_m1()
}

fn vectors_of(m: &Matrix) -> Vec<Vector> {
    m.column_iter().map(|c| c.into_owned()).collect()
}
