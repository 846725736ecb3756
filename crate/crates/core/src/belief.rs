//! Gaussian viewer model: priors, posterior gain matrices, the linear belief
//! update, and conveyance distances.
//!
//! A viewer holds a Gaussian prior N(mu, sigma) over the truth and assumes
//! the reporting channel adds Gaussian noise with covariance sigma_s. After
//! seeing a report y the viewer adopts the MAP posterior, which is linear:
//! zeta = A y + B mu with A + B = I.

use alloc::vec::Vec;

use crate::error::Error;
use crate::linalg::{Cholesky, Matrix, Vector};

/// Absolute tolerance on max-entry norm for symmetry and identity checks.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// A symmetric positive-definite covariance matrix with its Cholesky factor.
#[derive(Clone, Debug)]
pub struct Covariance {
    matrix: Matrix,
    chol: Cholesky,
}

impl Covariance {
    /// Validates symmetry (within [`SYMMETRY_TOL`]) and positive-definiteness,
    /// then caches the Cholesky factor.
    pub fn new(matrix: Matrix) -> Result<Self, Error> {
        let asym = matrix.max_asymmetry();
        if asym > SYMMETRY_TOL {
            return Err(Error::NotSymmetric {
                max_asym: asym,
                tol: SYMMETRY_TOL,
            });
        }
        let matrix = matrix.symmetrized();
        let chol = Cholesky::new(&matrix)?;
        Ok(Self { matrix, chol })
    }

    /// Isotropic covariance c * I.
    pub fn scaled_identity(dim: usize, c: f64) -> Result<Self, Error> {
        Self::new(Matrix::identity(dim).scale(c))
    }

    pub fn from_diag(entries: &[f64]) -> Result<Self, Error> {
        Self::new(Matrix::diag(entries))
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn inverse(&self) -> Matrix {
        self.chol.inverse()
    }

    pub fn solve(&self, b: &Vector) -> Vector {
        self.chol.solve(b)
    }

    pub fn solve_matrix(&self, b: &Matrix) -> Matrix {
        self.chol.solve_matrix(b)
    }

    /// Lower-triangular factor L with L L^T equal to the covariance.
    pub fn factor(&self) -> &Matrix {
        self.chol.factor()
    }
}

/// Posterior gain matrices (A, B) for prior covariance `sigma` and channel
/// covariance `sigma_s`:
///
/// A = (sigma^-1 + sigma_s^-1)^-1 sigma_s^-1,
/// B = (sigma^-1 + sigma_s^-1)^-1 sigma^-1,
///
/// so that A + B = I.
pub fn gain_matrices(sigma: &Covariance, sigma_s: &Covariance) -> Result<(Matrix, Matrix), Error> {
    if sigma.dim() != sigma_s.dim() {
        return Err(Error::DimensionMismatch {
            expected: sigma.dim(),
            got: sigma_s.dim(),
        });
    }
    let sigma_inv = sigma.inverse();
    let sigma_s_inv = sigma_s.inverse();
    let precision = sigma_inv.add(&sigma_s_inv).symmetrized();
    let chol = Cholesky::new(&precision)?;
    let gain_a = chol.solve_matrix(&sigma_s_inv);
    let gain_b = chol.solve_matrix(&sigma_inv);
    Ok((gain_a, gain_b))
}

/// One viewer: prior mean and covariances plus the cached posterior gains.
#[derive(Clone, Debug)]
pub struct ViewerProfile {
    mu: Vector,
    sigma: Covariance,
    sigma_s: Covariance,
    gain_a: Matrix,
    gain_b: Matrix,
}

impl ViewerProfile {
    pub fn new(mu: Vector, sigma: Covariance, sigma_s: Covariance) -> Result<Self, Error> {
        if sigma.dim() != mu.dim() {
            return Err(Error::DimensionMismatch {
                expected: mu.dim(),
                got: sigma.dim(),
            });
        }
        let (gain_a, gain_b) = gain_matrices(&sigma, &sigma_s)?;
        Ok(Self {
            mu,
            sigma,
            sigma_s,
            gain_a,
            gain_b,
        })
    }

    /// Fast path for ergodic populations where the gains are shared.
    pub(crate) fn with_gains(
        mu: Vector,
        sigma: Covariance,
        sigma_s: Covariance,
        gain_a: Matrix,
        gain_b: Matrix,
    ) -> Self {
        Self {
            mu,
            sigma,
            sigma_s,
            gain_a,
            gain_b,
        }
    }

    pub fn dim(&self) -> usize {
        self.mu.dim()
    }

    pub fn mu(&self) -> &Vector {
        &self.mu
    }

    pub fn sigma(&self) -> &Covariance {
        &self.sigma
    }

    pub fn sigma_s(&self) -> &Covariance {
        &self.sigma_s
    }

    pub fn gain_a(&self) -> &Matrix {
        &self.gain_a
    }

    pub fn gain_b(&self) -> &Matrix {
        &self.gain_b
    }

    /// Adopted belief after seeing report `y`: A y + B mu.
    pub fn posterior_belief(&self, y: &Vector) -> Result<Vector, Error> {
        if y.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: y.dim(),
            });
        }
        Ok(self.gain_a.matvec(y).add(&self.gain_b.matvec(&self.mu)))
    }
}

/// MAP posterior belief for `profile` after report `y`.
pub fn posterior_belief(profile: &ViewerProfile, y: &Vector) -> Result<Vector, Error> {
    profile.posterior_belief(y)
}

/// Distance between the intended information and an adopted belief.
pub fn conveyance_distance(x_s: &Vector, zeta: &Vector) -> Result<f64, Error> {
    if x_s.dim() != zeta.dim() {
        return Err(Error::DimensionMismatch {
            expected: x_s.dim(),
            got: zeta.dim(),
        });
    }
    Ok(x_s.distance(zeta))
}

/// A finite sample of viewers standing in for the viewer distribution.
#[derive(Clone, Debug)]
pub struct Population {
    viewers: Vec<ViewerProfile>,
    ergodic: bool,
}

impl Population {
    pub fn new(viewers: Vec<ViewerProfile>) -> Result<Self, Error> {
        let first = viewers.first().ok_or(Error::EmptyPopulation)?;
        let dim = first.dim();
        for v in &viewers {
            if v.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: v.dim(),
                });
            }
        }
        let ergodic = viewers.iter().all(|v| {
            v.sigma().matrix().max_abs_diff(first.sigma().matrix()) <= SYMMETRY_TOL
                && v.sigma_s().matrix().max_abs_diff(first.sigma_s().matrix()) <= SYMMETRY_TOL
        });
        Ok(Self { viewers, ergodic })
    }

    /// Builds a population that shares one (sigma, sigma_s) pair, computing
    /// the gain matrices once.
    pub fn ergodic(
        sigma: &Covariance,
        sigma_s: &Covariance,
        means: Vec<Vector>,
    ) -> Result<Self, Error> {
        if means.is_empty() {
            return Err(Error::EmptyPopulation);
        }
        let (gain_a, gain_b) = gain_matrices(sigma, sigma_s)?;
        let dim = sigma.dim();
        let mut viewers = Vec::with_capacity(means.len());
        for mu in means {
            if mu.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: mu.dim(),
                });
            }
            viewers.push(ViewerProfile::with_gains(
                mu,
                sigma.clone(),
                sigma_s.clone(),
                gain_a.clone(),
                gain_b.clone(),
            ));
        }
        Ok(Self {
            viewers,
            ergodic: true,
        })
    }

    pub fn len(&self) -> usize {
        self.viewers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.viewers.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.viewers[0].dim()
    }

    pub fn viewers(&self) -> &[ViewerProfile] {
        &self.viewers
    }

    pub fn is_ergodic(&self) -> bool {
        self.ergodic
    }

    /// Empirical mean of the viewers' prior means.
    pub fn mean_belief(&self) -> Vector {
        let mut acc = Vector::zeros(self.dim());
        for v in &self.viewers {
            acc = acc.add(v.mu());
        }
        acc.scale(1.0 / self.len() as f64)
    }
}

/// Empirical mean and (population) standard deviation of the conveyance
/// distance over all viewers for a broadcast report `y`.
pub fn population_conveyance(
    pop: &Population,
    x_s: &Vector,
    y: &Vector,
) -> Result<(f64, f64), Error> {
    if pop.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    if x_s.dim() != pop.dim() || y.dim() != pop.dim() {
        return Err(Error::DimensionMismatch {
            expected: pop.dim(),
            got: if x_s.dim() != pop.dim() {
                x_s.dim()
            } else {
                y.dim()
            },
        });
    }
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for v in pop.viewers() {
        let zeta = v.posterior_belief(y)?;
        let d = x_s.distance(&zeta);
        sum += d;
        sum_sq += d * d;
    }
    let n = pop.len() as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0);
    Ok((mean, libm::sqrt(var)))
}
