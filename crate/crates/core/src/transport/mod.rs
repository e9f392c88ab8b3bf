//! Couplings between finitely supported measures, quadratic transport cost,
//! exact 2-Wasserstein distance and gluing.

mod simplex;

pub use simplex::{exact_w2, Certificate, W2Solution};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::measure::{DiscreteMeasure, ATOM_TOL, WEIGHT_SUM_TOL};

/// A finitely supported joint measure, stored as weighted pairs `(x, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    pairs: Vec<(Vector, Vector, f64)>,
}

impl Coupling {
    pub fn new(pairs: Vec<(Vector, Vector, f64)>) -> Result<Self> {
        let Some((x0, y0, _)) = pairs.first() else {
            return Err(Error::InvalidMeasure("coupling has no pairs".into()));
        };
        let (nx, ny) = (x0.len(), y0.len());
        for (k, (x, y, w)) in pairs.iter().enumerate() {
            if x.len() != nx || y.len() != ny {
                return Err(Error::InvalidMeasure(format!("pair {k} has inconsistent dimensions")));
            }
            if !(w.is_finite() && *w >= 0.0) || x.iter().chain(y.iter()).any(|c| !c.is_finite()) {
                return Err(Error::InvalidMeasure(format!("pair {k} has a non-finite entry or negative weight")));
            }
        }
        let total: f64 = pairs.iter().map(|p| p.2).sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidMeasure(format!("coupling weights must sum to 1, got {total}")));
        }
        Ok(Self { pairs })
    }

    pub fn pairs(&self) -> &[(Vector, Vector, f64)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// `pi_x # gamma`, one atom per pair.
    pub fn first_marginal(&self) -> DiscreteMeasure {
        self.marginal(|(x, _, _)| x.clone())
    }

    /// `pi_y # gamma`, one atom per pair.
    pub fn second_marginal(&self) -> DiscreteMeasure {
        self.marginal(|(_, y, _)| y.clone())
    }

    fn marginal(&self, pick: impl Fn(&(Vector, Vector, f64)) -> Vector) -> DiscreteMeasure {
        let points = self.pairs.iter().map(pick).collect();
        let weights = self.pairs.iter().map(|p| p.2).collect();
        DiscreteMeasure::new(points, weights).expect("coupling weights were validated")
    }

    /// Fails with [`Error::MarginalMismatch`] unless the marginals are `mu` and `nu`.
    pub fn check_marginals(&self, mu: &DiscreteMeasure, nu: &DiscreteMeasure, weight_tol: f64) -> Result<()> {
        if !self.first_marginal().weak_eq(mu, weight_tol) {
            return Err(Error::MarginalMismatch("first marginal of the coupling differs from mu".into()));
        }
        if !self.second_marginal().weak_eq(nu, weight_tol) {
            return Err(Error::MarginalMismatch("second marginal of the coupling differs from nu".into()));
        }
        Ok(())
    }

    /// `sum_k w_k x_k y_k^T`.
    pub fn moment_matrix(&self) -> Matrix {
        let (x0, y0, _) = &self.pairs[0];
        self.pairs.iter().fold(Matrix::zeros(x0.len(), y0.len()), |m, (x, y, w)| m + x * y.transpose() * *w)
    }

    /// `(f, g) # gamma`.
    pub fn map(&self, f: impl Fn(&Vector) -> Vector, g: impl Fn(&Vector) -> Vector) -> Coupling {
        Coupling { pairs: self.pairs.iter().map(|(x, y, w)| (f(x), g(y), *w)).collect() }
    }
}

/// `mu (x) nu`.
pub fn product_coupling(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Coupling {
    let pairs = mu
        .points()
        .iter()
        .zip(mu.weights())
        .flat_map(|(x, a)| nu.points().iter().zip(nu.weights()).map(move |(y, b)| (x.clone(), y.clone(), a * b)))
        .collect();
    Coupling { pairs }
}

/// `(Id, Id) # mu`.
pub fn identity_coupling(mu: &DiscreteMeasure) -> Coupling {
    graph_coupling(mu, |x| x.clone())
}

/// `(Id, T) # mu`, pairing each atom with its image.
pub fn graph_coupling(mu: &DiscreteMeasure, t: impl Fn(&Vector) -> Vector) -> Coupling {
    let pairs = mu.points().iter().zip(mu.weights()).map(|(x, w)| (x.clone(), t(x), *w)).collect();
    Coupling { pairs }
}

/// `sum_k w_k |x_k - y_k|^2`.
pub fn coupling_cost(gamma: &Coupling) -> f64 {
    gamma.pairs.iter().map(|(x, y, w)| w * (x - y).norm_squared()).sum()
}

/// A joint measure on three factors, stored as weighted triples.
#[derive(Debug, Clone, PartialEq)]
pub struct TriCoupling {
    triples: Vec<(Vector, Vector, Vector, f64)>,
}

impl TriCoupling {
    pub fn triples(&self) -> &[(Vector, Vector, Vector, f64)] {
        &self.triples
    }

    pub fn project_xy(&self) -> Coupling {
        self.project(|(x, y, _, _)| (x.clone(), y.clone()))
    }

    pub fn project_yz(&self) -> Coupling {
        self.project(|(_, y, z, _)| (y.clone(), z.clone()))
    }

    pub fn project_xz(&self) -> Coupling {
        self.project(|(x, _, z, _)| (x.clone(), z.clone()))
    }

    fn project(&self, pick: impl Fn(&(Vector, Vector, Vector, f64)) -> (Vector, Vector)) -> Coupling {
        Coupling { pairs: self.triples.iter().map(|t| { let (a, b) = pick(t); (a, b, t.3) }).collect() }
    }
}

/// Joins `gamma12` and `gamma23` along their shared marginal.
///
/// Each triple gets weight `gamma12(x, y) gamma23(y, z) / m(y)` where `m` is
/// the shared marginal. Middle atoms are identified by position within
/// [`ATOM_TOL`], so both couplings should be built from the same atom list.
pub fn glue(gamma12: &Coupling, gamma23: &Coupling, weight_tol: f64) -> Result<TriCoupling> {
    if !gamma12.second_marginal().weak_eq(&gamma23.first_marginal(), weight_tol) {
        return Err(Error::MarginalMismatch("the shared middle marginals of the two couplings differ".into()));
    }
    let mut middle: Vec<(Vector, f64)> = Vec::new();
    let cluster_of = |middle: &[(Vector, f64)], y: &Vector| middle.iter().position(|(c, _)| (y - c).amax() <= ATOM_TOL);
    let mut left = Vec::with_capacity(gamma12.len());
    for (x, y, w) in gamma12.pairs.iter().filter(|p| p.2 > 0.0) {
        let c = match cluster_of(&middle, y) {
            Some(c) => {
                middle[c].1 += w;
                c
            }
            None => {
                middle.push((y.clone(), *w));
                middle.len() - 1
            }
        };
        left.push((c, x, y, *w));
    }
    let mut triples = Vec::new();
    for (y, z, b) in gamma23.pairs.iter().filter(|p| p.2 > 0.0) {
        let c = cluster_of(&middle, y)
            .ok_or_else(|| Error::MarginalMismatch("middle atom of gamma23 missing from gamma12".into()))?;
        let mass = middle[c].1;
        for (_, x, y12, a) in left.iter().filter(|l| l.0 == c) {
            triples.push(((*x).clone(), (*y12).clone(), z.clone(), a * b / mass));
        }
    }
    Ok(TriCoupling { triples })
}
