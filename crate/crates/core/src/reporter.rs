//! The well-informed reporter: population belief moments, the closed-form
//! report for a fixed multiplier, and selection of the smallest multiplier
//! that satisfies the truth-distance filter.
//!
//! The reporter minimizes the population-average squared residual
//! E || A_i y + B_i mu_i - x_s ||^2 subject to || y - x_t || <= epsilon.
//! The stationary point for multiplier lambda is
//!
//!   y(lambda) = (a2 + lambda I)^-1 (lambda x_t + at x_s - abmu)
//!
//! with a2 = E A_i^T A_i, at = E A_i^T, abmu = E A_i^T B_i mu_i. The distance
//! || y(lambda) - x_t || is non-increasing in lambda, so the smallest feasible
//! multiplier is found by doubling then bisection.

use crate::belief::{Covariance, Population};
use crate::error::Error;
use crate::linalg::{Cholesky, Matrix, Vector};

/// Absolute tolerance on the bisection gap || y(lambda) - x_t || - epsilon.
pub const BISECTION_TOL: f64 = 1e-8;
/// Iteration budget for bracket growth and bisection combined.
pub const MAX_BISECTION_ITERS: usize = 200;

/// Empirical belief moments a well-informed reporter works from.
///
/// Beyond the three moments in the report formula this also carries
/// E B_i mu_i and E || B_i mu_i ||^2 so the expected squared residual at any
/// report can be evaluated from moments alone.
#[derive(Clone, Debug)]
pub struct ReporterMoments {
    /// E A_i^T A_i.
    a2: Matrix,
    /// E A_i^T B_i mu_i.
    abmu: Vector,
    /// E A_i^T.
    at: Matrix,
    /// E B_i mu_i.
    bmu: Vector,
    /// E || B_i mu_i ||^2.
    bmu_sq: f64,
}

impl ReporterMoments {
    pub fn dim(&self) -> usize {
        self.a2.dim()
    }

    pub fn a2(&self) -> &Matrix {
        &self.a2
    }

    pub fn abmu(&self) -> &Vector {
        &self.abmu
    }

    pub fn at(&self) -> &Matrix {
        &self.at
    }

    /// Exact moments of an ergodic audience with mean belief `mu_bar` and no
    /// viewer spread, i.e. the single-viewer case.
    pub fn ergodic(
        sigma: &Covariance,
        sigma_s: &Covariance,
        mu_bar: &Vector,
    ) -> Result<Self, Error> {
        let (gain_a, gain_b) = crate::belief::gain_matrices(sigma, sigma_s)?;
        if mu_bar.dim() != sigma.dim() {
            return Err(Error::DimensionMismatch {
                expected: sigma.dim(),
                got: mu_bar.dim(),
            });
        }
        let at = gain_a.transpose();
        let a2 = at.matmul(&gain_a);
        let bmu = gain_b.matvec(mu_bar);
        let abmu = at.matvec(&bmu);
        let bmu_sq = bmu.dot(&bmu);
        Ok(Self {
            a2,
            abmu,
            at,
            bmu,
            bmu_sq,
        })
    }

    /// Expected squared residual E || A_i y + B_i mu_i - x_s ||^2 expanded in
    /// the stored moments.
    pub fn objective_at(&self, y: &Vector, x_s: &Vector) -> Result<f64, Error> {
        let n = self.dim();
        if y.dim() != n || x_s.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: if y.dim() != n { y.dim() } else { x_s.dim() },
            });
        }
        let quad = y.dot(&self.a2.matvec(y));
        let cross = 2.0 * y.dot(&self.abmu) - 2.0 * y.dot(&self.at.matvec(x_s));
        let constant = self.bmu_sq - 2.0 * self.bmu.dot(x_s) + x_s.dot(x_s);
        Ok(quad + cross + constant)
    }
}

/// Empirical reporter moments over a population, averaged in viewer order.
pub fn population_moments(pop: &Population) -> Result<ReporterMoments, Error> {
    if pop.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    let n = pop.dim();
    let mut a2 = Matrix::zeros(n);
    let mut at = Matrix::zeros(n);
    let mut abmu = Vector::zeros(n);
    let mut bmu = Vector::zeros(n);
    let mut bmu_sq = 0.0;
    for v in pop.viewers() {
        let a_t = v.gain_a().transpose();
        a2 = a2.add(&a_t.matmul(v.gain_a()));
        at = at.add(&a_t);
        let b_mu = v.gain_b().matvec(v.mu());
        abmu = abmu.add(&a_t.matvec(&b_mu));
        bmu = bmu.add(&b_mu);
        bmu_sq += b_mu.dot(&b_mu);
    }
    let inv_n = 1.0 / pop.len() as f64;
    Ok(ReporterMoments {
        a2: a2.scale(inv_n).symmetrized(),
        abmu: abmu.scale(inv_n),
        at: at.scale(inv_n),
        bmu: bmu.scale(inv_n),
        bmu_sq: bmu_sq * inv_n,
    })
}

/// The report that makes the Lagrangian gradient vanish for a fixed
/// multiplier: (a2 + lambda I) y = lambda x_t + at x_s - abmu.
pub fn report_for_lambda(
    m: &ReporterMoments,
    x_s: &Vector,
    x_t: &Vector,
    lambda: f64,
) -> Result<Vector, Error> {
    let n = m.dim();
    if x_s.dim() != n || x_t.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: if x_s.dim() != n { x_s.dim() } else { x_t.dim() },
        });
    }
    if lambda.is_nan() || lambda < 0.0 {
        return Err(Error::InvalidParameter("lambda must be nonnegative"));
    }
    let lhs = m.a2.add_scaled_identity(lambda);
    let chol = Cholesky::new(&lhs).map_err(|_| Error::DegenerateMoments)?;
    let rhs = x_t
        .scale(lambda)
        .add(&m.at.matvec(x_s))
        .sub(&m.abmu);
    Ok(chol.solve(&rhs))
}

/// An optimal report together with its multiplier and achieved objective.
#[derive(Clone, Debug)]
pub struct ReportDesign {
    /// The designed report.
    pub y_star: Vector,
    /// Smallest nonnegative multiplier satisfying the filter.
    pub lambda_star: f64,
    /// Expected squared residual at `y_star`.
    pub objective: f64,
    /// Whether the filter constraint is active at the optimum.
    pub binding: bool,
}

/// Designs the optimal report under the truth-distance filter of radius
/// `epsilon`. `f64::INFINITY` disables the constraint (the lambda = 0 case).
pub fn optimal_report(
    m: &ReporterMoments,
    x_s: &Vector,
    x_t: &Vector,
    epsilon: f64,
) -> Result<ReportDesign, Error> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::InvalidEpsilon { value: epsilon });
    }
    let unconstrained = report_for_lambda(m, x_s, x_t, 0.0)?;
    if unconstrained.distance(x_t) <= epsilon {
        let objective = m.objective_at(&unconstrained, x_s)?;
        return Ok(ReportDesign {
            y_star: unconstrained,
            lambda_star: 0.0,
            objective,
            binding: false,
        });
    }

    let gap = |lambda: f64| -> Result<f64, Error> {
        Ok(report_for_lambda(m, x_s, x_t, lambda)?.distance(x_t) - epsilon)
    };

    // Grow the bracket until the constraint is satisfied, then bisect on the
    // (continuous, non-increasing) gap.
    let mut iters = 0usize;
    let mut lo = 0.0;
    let mut hi = 1.0;
    while gap(hi)? > 0.0 {
        lo = hi;
        hi *= 2.0;
        iters += 1;
        if iters >= MAX_BISECTION_ITERS {
            return Err(Error::BisectionFailed {
                lambda_lo: lo,
                lambda_hi: hi,
                gap: gap(hi)?,
            });
        }
    }

    // Terminate on the feasible side of the boundary so the designed report
    // always passes the filter it was designed for.
    let mut lambda = hi;
    let mut g = gap(lambda)?;
    while !((-BISECTION_TOL..=0.0).contains(&g)) {
        iters += 1;
        if iters >= MAX_BISECTION_ITERS {
            return Err(Error::BisectionFailed {
                lambda_lo: lo,
                lambda_hi: hi,
                gap: g,
            });
        }
        lambda = 0.5 * (lo + hi);
        g = gap(lambda)?;
        if g > 0.0 {
            lo = lambda;
        } else {
            hi = lambda;
        }
    }

    let y_star = report_for_lambda(m, x_s, x_t, lambda)?;
    let objective = m.objective_at(&y_star, x_s)?;
    Ok(ReportDesign {
        y_star,
        lambda_star: lambda,
        objective,
        binding: true,
    })
}

/// Closed-form unconstrained report for an ergodic audience:
/// x_s + sigma_s sigma^-1 (x_s - mu_bar).
pub fn ergodic_unconstrained_report(
    sigma: &Covariance,
    sigma_s: &Covariance,
    mu_bar: &Vector,
    x_s: &Vector,
) -> Result<Vector, Error> {
    let n = sigma.dim();
    if sigma_s.dim() != n || mu_bar.dim() != n || x_s.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: sigma_s.dim().min(mu_bar.dim()).min(x_s.dim()),
        });
    }
    let surprise = x_s.sub(mu_bar);
    let skewed = sigma_s.matrix().matvec(&sigma.solve(&surprise));
    Ok(x_s.add(&skewed))
}

/// Population-average squared residual E || A_i y + B_i mu_i - x_s ||^2,
/// evaluated viewer by viewer.
pub fn expected_sq_objective(pop: &Population, y: &Vector, x_s: &Vector) -> Result<f64, Error> {
    if pop.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    let n = pop.dim();
    if y.dim() != n || x_s.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: if y.dim() != n { y.dim() } else { x_s.dim() },
        });
    }
    let mut acc = 0.0;
    for v in pop.viewers() {
        let zeta = v.posterior_belief(y)?;
        let d = zeta.distance(x_s);
        acc += d * d;
    }
    Ok(acc / pop.len() as f64)
}
