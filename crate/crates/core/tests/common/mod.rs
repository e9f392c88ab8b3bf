//! Seeded random fixtures shared by the integration tests.

#![allow(dead_code)]

use oblique_duals::frames::FiniteFrame;
use oblique_duals::linalg::{Matrix, Subspace, Tolerance, Vector};
use oblique_duals::measure::DiscreteMeasure;
use oblique_duals::random::{admissible_subspace, gaussian_matrix, random_frame, random_subspace, random_weighted_measure};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct FrameCase {
    pub seed: u64,
    pub frame: FiniteFrame,
    pub v: Subspace,
}

impl FrameCase {
    pub fn d(&self) -> usize {
        self.frame.subspace().dim()
    }
}

/// Frame of `N in d..=3d` vectors spanning a random `d`-dimensional `W` of `R^n`,
/// `n in 2..=6`, with an admissible `V`.
pub fn frame_case(seed: u64) -> FrameCase {
    let tol = Tolerance::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=6);
    let d = rng.random_range(1..=n);
    let count = rng.random_range(d..=3 * d);
    let w = random_subspace(&mut rng, n, d, &tol).unwrap();
    let frame = random_frame(&mut rng, &w, count, &tol).unwrap();
    let v = admissible_subspace(&mut rng, &w, 0.3, &tol).unwrap();
    FrameCase { seed, frame, v }
}

pub fn frame_suite(size: u64) -> Vec<FrameCase> {
    (0..size).map(|k| frame_case(7000 + k)).collect()
}

pub struct MeasureCase {
    pub mu: DiscreteMeasure,
    pub w: Subspace,
    pub v: Subspace,
}

/// Randomly weighted measure on `d + 1..=3d + 2` Gaussian atoms of a random `W`.
pub fn measure_case(seed: u64) -> MeasureCase {
    let tol = Tolerance::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=5);
    let d = rng.random_range(1..=n);
    let count = rng.random_range(d + 1..=3 * d + 2);
    let w = random_subspace(&mut rng, n, d, &tol).unwrap();
    let mu = random_weighted_measure(&mut rng, &w, count).unwrap();
    let v = admissible_subspace(&mut rng, &w, 0.3, &tol).unwrap();
    MeasureCase { mu, w, v }
}

/// A nonlinear field `x -> P_V sin(M x)` into `V`. Linear fields only
/// reproduce the canonical dual, so pushforward-type duals need one of these.
pub fn random_field_into(rng: &mut ChaCha8Rng, v: &Subspace) -> impl Fn(&Vector) -> Vector {
    let n = v.ambient_dim();
    let m: Matrix = gaussian_matrix(rng, n, n);
    let v = v.clone();
    move |x| v.project(&(&m * x).map(f64::sin))
}

pub fn vec2(x: f64, y: f64) -> Vector {
    Vector::from_column_slice(&[x, y])
}

/// `W = span(e_1)`, `V = span((1, 1))`, `mu = delta_(1,0)`, `nu = (delta_0 + delta_(2,2)) / 2`.
pub fn two_line_example() -> (Subspace, Subspace, DiscreteMeasure, DiscreteMeasure) {
    let tol = Tolerance::default();
    let w = Subspace::span(&[vec2(1.0, 0.0)], &tol).unwrap();
    let v = Subspace::span(&[vec2(1.0, 1.0)], &tol).unwrap();
    let mu = DiscreteMeasure::dirac(vec2(1.0, 0.0));
    let nu = DiscreteMeasure::uniform(vec![vec2(0.0, 0.0), vec2(2.0, 2.0)]).unwrap();
    (w, v, mu, nu)
}

/// `W_2` on the line by matching quantile functions.
pub fn quantile_w2(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> f64 {
    let sorted = |m: &DiscreteMeasure| {
        let mut atoms: Vec<(f64, f64)> = m.points().iter().map(|x| x[0]).zip(m.weights().iter().copied()).collect();
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        atoms
    };
    let (a, b) = (sorted(mu), sorted(nu));
    let (mut i, mut j) = (0, 0);
    let (mut ra, mut rb) = (a[0].1, b[0].1);
    let mut cost = 0.0;
    loop {
        let m = ra.min(rb);
        cost += m * (a[i].0 - b[j].0).powi(2);
        ra -= m;
        rb -= m;
        if ra <= rb {
            i += 1;
            if i == a.len() {
                break;
            }
            ra = a[i].1;
        } else {
            j += 1;
            if j == b.len() {
                break;
            }
            rb = b[j].1;
        }
    }
    cost.sqrt()
}
