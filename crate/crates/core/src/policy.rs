//! The network administrator: authenticity filter predicate, optimal
//! convergence statistics, the separation and permissiveness utilities, and
//! selection of the filter radius that maximizes their weighted sum.
//!
//! Sampling for the utilities conditions on a minimum truth-source distance
//! (the falsehood margin) by rejection; the margin comes from the scenario
//! spec, whose `d_min == 0` doubles as the degenerate source-equals-truth
//! hook. The separation and permissiveness estimators share one sample set
//! per (seed, epsilon) evaluation, and the same seed is reused across an
//! epsilon grid, so curves are computed on common random numbers.

use alloc::vec::Vec;

use crate::belief::{population_conveyance, Population};
use crate::error::Error;
use crate::linalg::Vector;
use crate::reporter::{optimal_report, population_moments};
use crate::simulation::{draw_rng, sample_population, sample_scenario_fields, ScenarioSpec};

/// Attempt budget per accepted sample before the falsehood margin is declared
/// infeasible (guards acceptance rates below roughly 1e-4).
const MAX_REJECTION_ATTEMPTS: u64 = 20_000;

/// A mean free-network convergence below this is a perfectly steered (zero
/// variance) audience; the permissiveness ratio degenerates to 0/0 there.
const ZERO_DENOM_TOL: f64 = 1e-12;

/// Administrator-side parameters of the authentication policy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolicyConfig {
    /// Filter radius.
    pub epsilon: f64,
    /// Weight of the permissiveness utility in the unified objective.
    pub beta: f64,
    /// Falsehood margin: sources at least this far from the truth count as
    /// false. Zero is the degenerate source-equals-truth hook.
    pub d_min: f64,
    /// Separation threshold, reported as a pass/fail flag only.
    pub delta: f64,
    /// Permissiveness threshold in (0, 1], reported as a pass/fail flag only.
    pub alpha: f64,
}

impl PolicyConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(Error::InvalidEpsilon {
                value: self.epsilon,
            });
        }
        if !self.beta.is_finite() || self.beta < 0.0 {
            return Err(Error::InvalidParameter("beta must be finite and >= 0"));
        }
        if !self.d_min.is_finite() || self.d_min < 0.0 {
            return Err(Error::InvalidParameter("d_min must be finite and >= 0"));
        }
        if self.delta.is_nan() || self.delta < 0.0 {
            return Err(Error::InvalidParameter("delta must be >= 0"));
        }
        if self.alpha.is_nan() || self.alpha <= 0.0 || self.alpha > 1.0 {
            return Err(Error::InvalidParameter("alpha must be in (0, 1]"));
        }
        Ok(())
    }
}

/// One evaluation of the unified utility at a fixed filter radius.
#[derive(Clone, Debug, PartialEq)]
pub struct UtilityBreakdown {
    /// Separation utility: E[c(x_s, eps) - c(x_t, eps) | margin].
    pub u1: f64,
    /// Permissiveness ratio: E c(x_t, inf) / E c(x_t, eps).
    pub u2: f64,
    /// u1 + beta * u2.
    pub total: f64,
    pub epsilon: f64,
    pub samples_used: usize,
    /// Monte Carlo standard error of `u1`.
    pub u1_std_err: f64,
    /// Delta-method standard error of the `u2` ratio.
    pub u2_std_err: f64,
}

impl UtilityBreakdown {
    /// Whether the separation criterion U1 >= delta holds.
    pub fn passes_separation(&self, delta: f64) -> bool {
        self.u1 >= delta
    }

    /// Whether the permissiveness criterion U2 >= alpha holds.
    pub fn passes_permissiveness(&self, alpha: f64) -> bool {
        self.u2 >= alpha
    }
}

/// The authenticity filter: a report passes iff it lies in the closed
/// epsilon-ball around the truth.
pub fn is_admissible(y: &Vector, x_t: &Vector, epsilon: f64) -> bool {
    assert_eq!(y.dim(), x_t.dim(), "report and truth dimensions differ");
    y.distance(x_t) <= epsilon
}

/// Optimal convergence c(x_s, epsilon) for a known population: designs the
/// optimal report for source `x_s` under the filter around `x_t`, then
/// returns the population conveyance statistics. `f64::INFINITY` bypasses
/// the constraint.
pub fn convergence_stat(
    pop: &Population,
    x_s: &Vector,
    x_t: &Vector,
    epsilon: f64,
) -> Result<(f64, f64), Error> {
    let moments = population_moments(pop)?;
    let design = optimal_report(&moments, x_s, x_t, epsilon)?;
    population_conveyance(pop, x_s, &design.y_star)
}

/// Per-sample convergence triple used by the utility estimators.
struct SampleStats {
    n: usize,
    sum_diff: f64,
    sumsq_diff: f64,
    sum_t_eps: f64,
    sumsq_t_eps: f64,
    sum_t_inf: f64,
    sumsq_t_inf: f64,
    sum_cross: f64,
}

/// Draws `n_samples` conditioned scenarios and accumulates, in sample order,
/// the convergence of the false source at `epsilon`, of the truth at
/// `epsilon`, and of the truth with the filter disabled.
fn collect_samples(
    env: &ScenarioSpec,
    epsilon: f64,
    n_samples: usize,
    rng_seed: u64,
) -> Result<SampleStats, Error> {
    env.validate()?;
    if n_samples == 0 {
        return Err(Error::InvalidParameter("n_samples must be at least 1"));
    }
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::InvalidEpsilon { value: epsilon });
    }

    let mut stats = SampleStats {
        n: n_samples,
        sum_diff: 0.0,
        sumsq_diff: 0.0,
        sum_t_eps: 0.0,
        sumsq_t_eps: 0.0,
        sum_t_inf: 0.0,
        sumsq_t_inf: 0.0,
        sum_cross: 0.0,
    };

    for sample_idx in 0..n_samples {
        let mut rng = draw_rng(rng_seed, sample_idx as u64);

        // Rejection on the falsehood margin; scenario fields are cheap, so
        // the population is only drawn for the accepted fields.
        let mut attempts: u64 = 0;
        let (x_t, x_s, mu_bar) = loop {
            let fields = sample_scenario_fields(&mut rng, env);
            attempts += 1;
            if env.d_min <= 0.0 || fields.0.distance(&fields.1) >= env.d_min {
                break fields;
            }
            if attempts >= MAX_REJECTION_ATTEMPTS {
                return Err(Error::RejectionInfeasible {
                    d_min: env.d_min,
                    attempts,
                });
            }
        };
        let pop = sample_population(&mut rng, env, &mu_bar)?;
        let moments = population_moments(&pop)?;

        let false_design = optimal_report(&moments, &x_s, &x_t, epsilon)?;
        let (c_s_eps, _) = population_conveyance(&pop, &x_s, &false_design.y_star)?;
        let truth_design = optimal_report(&moments, &x_t, &x_t, epsilon)?;
        let (c_t_eps, _) = population_conveyance(&pop, &x_t, &truth_design.y_star)?;
        let free_design = optimal_report(&moments, &x_t, &x_t, f64::INFINITY)?;
        let (c_t_inf, _) = population_conveyance(&pop, &x_t, &free_design.y_star)?;

        let diff = c_s_eps - c_t_eps;
        stats.sum_diff += diff;
        stats.sumsq_diff += diff * diff;
        stats.sum_t_eps += c_t_eps;
        stats.sumsq_t_eps += c_t_eps * c_t_eps;
        stats.sum_t_inf += c_t_inf;
        stats.sumsq_t_inf += c_t_inf * c_t_inf;
        stats.sum_cross += c_t_inf * c_t_eps;
    }
    Ok(stats)
}

impl SampleStats {
    fn u1(&self) -> (f64, f64) {
        let n = self.n as f64;
        let mean = self.sum_diff / n;
        let var = (self.sumsq_diff / n - mean * mean).max(0.0);
        (mean, libm::sqrt(var / n))
    }

    fn u2(&self) -> Result<(f64, f64), Error> {
        let n = self.n as f64;
        let num = self.sum_t_inf / n;
        let den = self.sum_t_eps / n;
        if den < ZERO_DENOM_TOL {
            return Err(Error::ZeroDenominator);
        }
        let ratio = num / den;
        // Delta method for the ratio of two correlated sample means.
        let var_num = (self.sumsq_t_inf / n - num * num).max(0.0);
        let var_den = (self.sumsq_t_eps / n - den * den).max(0.0);
        let cov = self.sum_cross / n - num * den;
        let rel_var =
            (var_num / (num * num) + var_den / (den * den) - 2.0 * cov / (num * den)).max(0.0);
        let se = libm::sqrt(ratio * ratio * rel_var / n);
        Ok((ratio, se))
    }
}

/// Separation utility U1: Monte Carlo estimate of the conditional expectation
/// E[c(x_s, eps) - c(x_t, eps)] given the falsehood margin `env.d_min`.
pub fn utility_separation(
    env: &ScenarioSpec,
    epsilon: f64,
    n_samples: usize,
    rng_seed: u64,
) -> Result<f64, Error> {
    Ok(collect_samples(env, epsilon, n_samples, rng_seed)?.u1().0)
}

/// Permissiveness utility U2: ratio of the Monte Carlo means of c(x_t, inf)
/// and c(x_t, eps), estimated on one shared sample set.
pub fn utility_permissiveness(
    env: &ScenarioSpec,
    epsilon: f64,
    n_samples: usize,
    rng_seed: u64,
) -> Result<f64, Error> {
    Ok(collect_samples(env, epsilon, n_samples, rng_seed)?.u2()?.0)
}

/// Unified utility U = U1 + beta * U2 at `cfg.epsilon`, with both parts
/// computed from the same samples.
pub fn unified_utility(
    env: &ScenarioSpec,
    cfg: &PolicyConfig,
    n_samples: usize,
    rng_seed: u64,
) -> Result<UtilityBreakdown, Error> {
    cfg.validate()?;
    let stats = collect_samples(env, cfg.epsilon, n_samples, rng_seed)?;
    let (u1, u1_std_err) = stats.u1();
    let (u2, u2_std_err) = stats.u2()?;
    Ok(UtilityBreakdown {
        u1,
        u2,
        total: u1 + cfg.beta * u2,
        epsilon: cfg.epsilon,
        samples_used: n_samples,
        u1_std_err,
        u2_std_err,
    })
}

/// Evaluates the unified utility on every grid point (same seed, so common
/// random numbers across the grid) and returns the maximizer; ties go to the
/// smallest epsilon.
pub fn optimize_policy(
    env: &ScenarioSpec,
    cfg: &PolicyConfig,
    epsilon_grid: &[f64],
    n_samples: usize,
    rng_seed: u64,
) -> Result<(f64, Vec<UtilityBreakdown>), Error> {
    if epsilon_grid.is_empty() {
        return Err(Error::InvalidParameter("epsilon grid must be non-empty"));
    }
    if epsilon_grid
        .windows(2)
        .any(|w| w[0].is_nan() || w[1].is_nan() || w[0] >= w[1])
    {
        return Err(Error::InvalidParameter(
            "epsilon grid must be strictly increasing",
        ));
    }
    let mut curve = Vec::with_capacity(epsilon_grid.len());
    for &eps in epsilon_grid {
        let point_cfg = PolicyConfig {
            epsilon: eps,
            ..*cfg
        };
        curve.push(unified_utility(env, &point_cfg, n_samples, rng_seed)?);
    }
    let mut best = 0usize;
    for (i, point) in curve.iter().enumerate() {
        if point.total > curve[best].total {
            best = i;
        }
    }
    Ok((epsilon_grid[best], curve))
}
