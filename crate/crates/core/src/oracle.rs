//! Independent brute-force solvers used to validate the closed-form report
//! optimizer: an exhaustive lattice search over the feasible ball and a
//! projected gradient descent. The lattice search is the authority at low
//! dimension; the two methods also cross-check each other.

use alloc::vec;
use alloc::vec::Vec;

use crate::belief::Population;
use crate::error::Error;
use crate::linalg::Vector;
use crate::reporter::{expected_sq_objective, population_moments, ReportDesign};

const DESCENT_STEP: f64 = 0.05;
const DESCENT_ITERS: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleMethod {
    Grid,
    ProjectedDescent,
}

/// Best report found by a brute-force method.
#[derive(Clone, Debug)]
pub struct OracleResult {
    pub y_best: Vector,
    pub objective: f64,
    pub method: OracleMethod,
    pub evaluations: usize,
}

/// Euclidean projection onto the closed epsilon-ball around `x_t`.
fn project_onto_ball(y: &Vector, x_t: &Vector, epsilon: f64) -> Vector {
    let d = y.distance(x_t);
    if d <= epsilon {
        y.clone()
    } else {
        x_t.add(&y.sub(x_t).scale(epsilon / d))
    }
}

/// Exhaustive search over a cubic lattice of spacing `resolution` covering
/// the epsilon-ball around `x_t`; lattice points just outside the ball are
/// projected onto the sphere so boundary optima are sampled at full lattice
/// density. Only supports dim <= 3.
pub fn brute_force_report(
    pop: &Population,
    x_s: &Vector,
    x_t: &Vector,
    epsilon: f64,
    resolution: f64,
) -> Result<OracleResult, Error> {
    let dim = pop.dim();
    if dim > 3 {
        return Err(Error::OracleDimTooLarge { dim });
    }
    if x_s.dim() != dim || x_t.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: if x_s.dim() != dim { x_s.dim() } else { x_t.dim() },
        });
    }
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(Error::InvalidEpsilon { value: epsilon });
    }
    if !resolution.is_finite() || resolution <= 0.0 {
        return Err(Error::InvalidParameter("resolution must be positive"));
    }

    // Per-viewer offsets w_i = B_i mu_i - x_s let the hot loop run without
    // allocating: residual_i(y) = A_i y + w_i.
    let n_viewers = pop.len();
    let mut gains: Vec<f64> = Vec::with_capacity(n_viewers * dim * dim);
    let mut offsets: Vec<f64> = Vec::with_capacity(n_viewers * dim);
    for v in pop.viewers() {
        for i in 0..dim {
            for j in 0..dim {
                gains.push(v.gain_a()[(i, j)]);
            }
        }
        let w = v.gain_b().matvec(v.mu()).sub(x_s);
        for i in 0..dim {
            offsets.push(w[i]);
        }
    }
    let mean_sq_residual = |y: &[f64]| -> f64 {
        let mut acc = 0.0;
        for v in 0..n_viewers {
            let g = &gains[v * dim * dim..(v + 1) * dim * dim];
            let w = &offsets[v * dim..(v + 1) * dim];
            for i in 0..dim {
                let mut r = w[i];
                for j in 0..dim {
                    r += g[i * dim + j] * y[j];
                }
                acc += r * r;
            }
        }
        acc / n_viewers as f64
    };

    let half = epsilon + resolution;
    let steps_half = libm::floor(half / resolution) as i64;
    let side = (2 * steps_half + 1) as usize;
    let total = side.pow(dim as u32);
    let shell = resolution * libm::sqrt(dim as f64);

    let mut point = vec![0.0; dim];
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut evaluations = 0usize;
    for flat in 0..total {
        let mut rest = flat;
        let mut dist_sq = 0.0;
        for d in 0..dim {
            let j = (rest % side) as i64 - steps_half;
            rest /= side;
            let coord = x_t[d] + j as f64 * resolution;
            point[d] = coord;
            let delta = coord - x_t[d];
            dist_sq += delta * delta;
        }
        let dist = libm::sqrt(dist_sq);
        if dist > epsilon + shell {
            continue;
        }
        if dist > epsilon {
            // Radial projection onto the sphere.
            let scale = epsilon / dist;
            for d in 0..dim {
                point[d] = x_t[d] + (point[d] - x_t[d]) * scale;
            }
        }
        let value = mean_sq_residual(&point);
        evaluations += 1;
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            best = Some((value, point.clone()));
        }
    }

    let (_, coords) = best.expect("lattice always contains the center point");
    let y_best = Vector::from_slice(&coords);
    let objective = expected_sq_objective(pop, &y_best, x_s)?;
    Ok(OracleResult {
        y_best,
        objective,
        method: OracleMethod::Grid,
        evaluations,
    })
}

/// Projected gradient descent on the population squared residual with a
/// fixed step, projecting onto the epsilon-ball after every step.
pub fn projected_descent_report(
    pop: &Population,
    x_s: &Vector,
    x_t: &Vector,
    epsilon: f64,
) -> Result<OracleResult, Error> {
    let dim = pop.dim();
    if x_s.dim() != dim || x_t.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: if x_s.dim() != dim { x_s.dim() } else { x_t.dim() },
        });
    }
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(Error::InvalidEpsilon { value: epsilon });
    }
    let m = population_moments(pop)?;
    let mut y = x_t.clone();
    for _ in 0..DESCENT_ITERS {
        let grad = m
            .a2()
            .matvec(&y)
            .add(m.abmu())
            .sub(&m.at().matvec(x_s))
            .scale(2.0);
        y = project_onto_ball(&y.sub(&grad.scale(DESCENT_STEP)), x_t, epsilon);
    }
    let objective = expected_sq_objective(pop, &y, x_s)?;
    Ok(OracleResult {
        y_best: y,
        objective,
        method: OracleMethod::ProjectedDescent,
        evaluations: DESCENT_ITERS,
    })
}

/// True iff the closed-form design and the oracle agree on the achieved
/// objective within `tol` (both finite).
pub fn compare(design: &ReportDesign, oracle: &OracleResult, tol: f64) -> bool {
    design.objective.is_finite()
        && oracle.objective.is_finite()
        && crate::linalg::abs(design.objective - oracle.objective) <= tol
}
