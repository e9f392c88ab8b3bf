//! Seeded generators for random frames, subspaces and measures.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::Result;
use crate::frames::FiniteFrame;
use crate::linalg::{subspace_angle_cos, Matrix, Subspace, Tolerance, Vector};
use crate::measure::DiscreteMeasure;

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vector {
    Vector::from_fn(n, |_, _| StandardNormal.sample(rng))
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

/// A uniformly oriented `d`-dimensional subspace of `R^n`.
pub fn random_subspace<R: Rng + ?Sized>(rng: &mut R, n: usize, d: usize, tol: &Tolerance) -> Result<Subspace> {
    let vectors: Vec<Vector> = (0..d).map(|_| gaussian_vector(rng, n)).collect();
    Subspace::span(&vectors, tol)
}

/// `count` Gaussian vectors in `w`; they span `w` with probability one when `count >= dim W`.
pub fn random_frame<R: Rng + ?Sized>(rng: &mut R, w: &Subspace, count: usize, tol: &Tolerance) -> Result<FiniteFrame> {
    let vectors = (0..count).map(|_| w.basis() * gaussian_vector(rng, w.dim())).collect();
    FiniteFrame::new(vectors, w.clone(), tol)
}

/// A subspace `V` with `dim V = dim W` and principal-angle cosine at least
/// `min_cos`, obtained by tilting `W` with Gaussian noise.
pub fn admissible_subspace<R: Rng + ?Sized>(rng: &mut R, w: &Subspace, min_cos: f64, tol: &Tolerance) -> Result<Subspace> {
    let (n, d) = (w.ambient_dim(), w.dim());
    let mut tilt = 0.8;
    loop {
        let tilted = w.basis() + gaussian_matrix(rng, n, d) * tilt;
        let cols: Vec<Vector> = tilted.column_iter().map(|c| c.into_owned()).collect();
        let v = Subspace::span(&cols, tol)?;
        if v.dim() == d && subspace_angle_cos(w, &v)? >= min_cos && subspace_angle_cos(&v, w)? >= min_cos {
            return Ok(v);
        }
        tilt *= 0.9;
    }
}

/// Uniform measure on `count` Gaussian points of `w`.
pub fn random_measure<R: Rng + ?Sized>(rng: &mut R, w: &Subspace, count: usize) -> Result<DiscreteMeasure> {
    DiscreteMeasure::uniform((0..count).map(|_| w.basis() * gaussian_vector(rng, w.dim())).collect())
}

/// Gaussian points of `w` with random positive weights.
pub fn random_weighted_measure<R: Rng + ?Sized>(rng: &mut R, w: &Subspace, count: usize) -> Result<DiscreteMeasure> {
    let points = (0..count).map(|_| w.basis() * gaussian_vector(rng, w.dim())).collect();
    let raw: Vec<f64> = (0..count).map(|_| rng.random_range(0.1..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut weights: Vec<f64> = raw.iter().map(|x| x / total).collect();
    let drift = 1.0 - weights.iter().sum::<f64>();
    weights[0] += drift;
    DiscreteMeasure::new(points, weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_objects_are_valid() {
        let tol = Tolerance::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 2..=6 {
            let d = rng.random_range(1..=n);
            let w = random_subspace(&mut rng, n, d, &tol).unwrap();
            assert_eq!(w.dim(), d);
            let f = random_frame(&mut rng, &w, 2 * d, &tol).unwrap();
            assert_eq!(f.len(), 2 * d);
            let v = admissible_subspace(&mut rng, &w, 0.3, &tol).unwrap();
            assert!(subspace_angle_cos(&w, &v).unwrap() >= 0.3);
            let mu = random_weighted_measure(&mut rng, &w, 5).unwrap();
            assert_eq!(mu.len(), 5);
        }
    }
}
