//! Scenario generation and experiment sweeps: unit-sphere samplers for the
//! truth/source/mean-belief vectors, audience conditioning, and epsilon-sweep
//! convergence curves with error bands.
//!
//! Reproducibility contract: every draw gets its own random stream derived
//! from (seed, draw index), and accumulation runs in fixed draw order, so a
//! sweep is a pure function of its arguments.

use alloc::vec::Vec;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::belief::{Covariance, Population};
use crate::error::Error;
use crate::linalg::{Matrix, Vector};
use crate::reporter::{optimal_report, population_moments};

/// How the audience's mean belief relates to the source and the truth.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Audience {
    /// No conditioning: mean belief independent of source and truth.
    Indifferent,
    /// Mean belief at least as close to the (false) source as to the truth.
    Uneducated,
    /// Mean belief at least as close to the truth as to the source.
    Educated,
}

/// Symmetric positive-semidefinite spread of viewer means around the
/// population mean belief. Unlike [`Covariance`] this may be singular; the
/// zero matrix is the degenerate no-spread hook.
#[derive(Clone, Debug)]
pub struct Spread {
    matrix: Matrix,
    factor: Matrix,
}

impl Spread {
    pub fn new(matrix: Matrix) -> Result<Self, Error> {
        let asym = matrix.max_asymmetry();
        if asym > crate::belief::SYMMETRY_TOL {
            return Err(Error::NotSymmetric {
                max_asym: asym,
                tol: crate::belief::SYMMETRY_TOL,
            });
        }
        let matrix = matrix.symmetrized();
        let factor = crate::linalg::semidefinite_factor(&matrix, 1e-12)?;
        Ok(Self { matrix, factor })
    }

    pub fn from_diag(entries: &[f64]) -> Result<Self, Error> {
        Self::new(Matrix::diag(entries))
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            matrix: Matrix::zeros(dim),
            factor: Matrix::zeros(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// Lower-triangular L with L L^T equal to the spread.
    pub fn factor(&self) -> &Matrix {
        &self.factor
    }
}

/// Everything needed to draw random scenarios.
#[derive(Clone, Debug)]
pub struct ScenarioSpec {
    pub dim: usize,
    /// Shared prior covariance of all viewers.
    pub sigma: Covariance,
    /// Shared source-credibility covariance of all viewers.
    pub sigma_s: Covariance,
    /// Spread of individual viewer means around the drawn mean belief.
    pub mu_spread: Spread,
    pub n_viewers: usize,
    pub audience: Audience,
    /// Falsehood margin used by policy sampling. Zero is the degenerate hook
    /// that forces the source to coincide with the truth.
    pub d_min: f64,
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<(), Error> {
        if self.dim == 0 {
            return Err(Error::InvalidParameter("dim must be at least 1"));
        }
        if self.n_viewers == 0 {
            return Err(Error::InvalidParameter("n_viewers must be at least 1"));
        }
        for (d, what) in [
            (self.sigma.dim(), "sigma"),
            (self.sigma_s.dim(), "sigma_s"),
            (self.mu_spread.dim(), "mu_spread"),
        ] {
            if d != self.dim {
                let _ = what;
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    got: d,
                });
            }
        }
        if !self.d_min.is_finite() || self.d_min < 0.0 {
            return Err(Error::InvalidParameter("d_min must be finite and >= 0"));
        }
        Ok(())
    }
}

/// One sampled world: truth, source, mean belief, and the audience around it.
#[derive(Clone, Debug)]
pub struct ScenarioDraw {
    pub x_t: Vector,
    pub x_s: Vector,
    pub mu_bar: Vector,
    pub population: Population,
}

/// Per-epsilon convergence statistics for the true and the false source.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceCurve {
    pub epsilons: Vec<f64>,
    pub true_mean: Vec<f64>,
    pub true_std: Vec<f64>,
    pub false_mean: Vec<f64>,
    pub false_std: Vec<f64>,
}

/// The random stream for one (seed, index) cell.
pub fn draw_rng(seed: u64, index: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// One standard normal deviate via Box-Muller.
fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // u1 in (0, 1] keeps the log finite.
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(2.0 * core::f64::consts::PI * u2)
}

/// Uniform draw from the unit sphere by normalizing an isotropic Gaussian.
pub fn sample_unit_sphere<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vector {
    loop {
        let mut v = Vector::zeros(dim);
        for i in 0..dim {
            v[i] = standard_normal(rng);
        }
        let norm = v.norm();
        if norm > 1e-12 {
            return v.scale(1.0 / norm);
        }
    }
}

/// Draws N viewer means around `mu_bar` and assembles the ergodic population.
pub fn sample_population<R: Rng + ?Sized>(
    rng: &mut R,
    spec: &ScenarioSpec,
    mu_bar: &Vector,
) -> Result<Population, Error> {
    spec.validate()?;
    if mu_bar.dim() != spec.dim {
        return Err(Error::DimensionMismatch {
            expected: spec.dim,
            got: mu_bar.dim(),
        });
    }
    let factor = spec.mu_spread.factor();
    let mut means = Vec::with_capacity(spec.n_viewers);
    for _ in 0..spec.n_viewers {
        let mut z = Vector::zeros(spec.dim);
        for i in 0..spec.dim {
            z[i] = standard_normal(rng);
        }
        means.push(mu_bar.add(&factor.matvec(&z)));
    }
    Population::ergodic(&spec.sigma, &spec.sigma_s, means)
}

/// Draws (x_t, x_s, mu_bar) with the audience condition enforced by
/// rejection. With `d_min == 0` the source is pinned to the truth.
pub(crate) fn sample_scenario_fields<R: Rng + ?Sized>(
    rng: &mut R,
    spec: &ScenarioSpec,
) -> (Vector, Vector, Vector) {
    loop {
        let x_t = sample_unit_sphere(rng, spec.dim);
        let x_s = if spec.d_min == 0.0 {
            x_t.clone()
        } else {
            sample_unit_sphere(rng, spec.dim)
        };
        let mu_bar = sample_unit_sphere(rng, spec.dim);
        let ok = match spec.audience {
            Audience::Indifferent => true,
            Audience::Uneducated => mu_bar.distance(&x_s) <= mu_bar.distance(&x_t),
            Audience::Educated => mu_bar.distance(&x_s) >= mu_bar.distance(&x_t),
        };
        if ok {
            return (x_t, x_s, mu_bar);
        }
    }
}

/// Draws a full scenario: conditioned (x_t, x_s, mu_bar) plus the population.
pub fn sample_scenario<R: Rng + ?Sized>(
    rng: &mut R,
    spec: &ScenarioSpec,
) -> Result<ScenarioDraw, Error> {
    spec.validate()?;
    let (x_t, x_s, mu_bar) = sample_scenario_fields(rng, spec);
    let population = sample_population(rng, spec, &mu_bar)?;
    Ok(ScenarioDraw {
        x_t,
        x_s,
        mu_bar,
        population,
    })
}

/// Sweeps the filter radius over `epsilon_grid`, computing for every draw the
/// optimal-report convergence when the reporter is fed the truth and when it
/// is fed the false source (both filtered against the truth). Draws are
/// shared across epsilons (common random numbers).
pub fn sweep_epsilon(
    spec: &ScenarioSpec,
    epsilon_grid: &[f64],
    n_draws: usize,
    seed: u64,
) -> Result<ConvergenceCurve, Error> {
    spec.validate()?;
    if epsilon_grid.is_empty() {
        return Err(Error::InvalidParameter("epsilon grid must be non-empty"));
    }
    if n_draws == 0 {
        return Err(Error::InvalidParameter("n_draws must be at least 1"));
    }

    let k = epsilon_grid.len();
    let mut sum_t = Vector::zeros(k);
    let mut sumsq_t = Vector::zeros(k);
    let mut sum_f = Vector::zeros(k);
    let mut sumsq_f = Vector::zeros(k);

    for draw_idx in 0..n_draws {
        let mut rng = draw_rng(seed, draw_idx as u64);
        let draw = sample_scenario(&mut rng, spec)?;
        let moments = population_moments(&draw.population)?;
        for (i, &eps) in epsilon_grid.iter().enumerate() {
            let truth_design = optimal_report(&moments, &draw.x_t, &draw.x_t, eps)?;
            let (c_t, _) =
                crate::belief::population_conveyance(&draw.population, &draw.x_t, &truth_design.y_star)?;
            let false_design = optimal_report(&moments, &draw.x_s, &draw.x_t, eps)?;
            let (c_f, _) =
                crate::belief::population_conveyance(&draw.population, &draw.x_s, &false_design.y_star)?;
            sum_t[i] += c_t;
            sumsq_t[i] += c_t * c_t;
            sum_f[i] += c_f;
            sumsq_f[i] += c_f * c_f;
        }
    }

    let n = n_draws as f64;
    let stat = |sum: f64, sumsq: f64| -> (f64, f64) {
        let mean = sum / n;
        let var = (sumsq / n - mean * mean).max(0.0);
        (mean, libm::sqrt(var))
    };

    let mut curve = ConvergenceCurve {
        epsilons: epsilon_grid.to_vec(),
        true_mean: Vec::with_capacity(k),
        true_std: Vec::with_capacity(k),
        false_mean: Vec::with_capacity(k),
        false_std: Vec::with_capacity(k),
    };
    for i in 0..k {
        let (m_t, s_t) = stat(sum_t[i], sumsq_t[i]);
        let (m_f, s_f) = stat(sum_f[i], sumsq_f[i]);
        curve.true_mean.push(m_t);
        curve.true_std.push(s_t);
        curve.false_mean.push(m_f);
        curve.false_std.push(s_f);
    }
    Ok(curve)
}
