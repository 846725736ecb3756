//! Subcommand implementations. Each returns structured results so the
//! integration tests can drive them directly; `main` only does argument
//! plumbing and exit-code mapping.

use std::path::PathBuf;

use anyhow::anyhow;
use rand::Rng;

use misinfo_core::belief::{Covariance, Population, ViewerProfile};
use misinfo_core::linalg::{Matrix, Vector};
use misinfo_core::oracle::{brute_force_report, compare, projected_descent_report};
use misinfo_core::policy::{is_admissible, optimize_policy};
use misinfo_core::reporter::{optimal_report, population_moments, report_for_lambda, ReporterMoments};
use misinfo_core::simulation::{draw_rng, sample_unit_sphere, sweep_epsilon};
use misinfo_core::Error as CoreError;

use crate::config::RunConfig;
use crate::output;
use crate::svg::{line_chart, Series};

/// Command failures split by exit code: bad input exits 2, runtime failures
/// exit 1.
#[derive(Debug)]
pub enum CmdError {
    BadInput(anyhow::Error),
    Failed(anyhow::Error),
}

impl CmdError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CmdError::BadInput(_) => 2,
            CmdError::Failed(_) => 1,
        }
    }

    pub fn message(&self) -> String {
        match self {
            CmdError::BadInput(e) | CmdError::Failed(e) => format!("{e:#}"),
        }
    }
}

fn classify(err: CoreError) -> CmdError {
    match err {
        CoreError::DimensionMismatch { .. }
        | CoreError::BadMatrixShape { .. }
        | CoreError::NotSymmetric { .. }
        | CoreError::NotPositiveDefinite { .. }
        | CoreError::NotPositiveSemidefinite { .. }
        | CoreError::InvalidEpsilon { .. }
        | CoreError::InvalidParameter(_) => CmdError::BadInput(anyhow!(err)),
        other => CmdError::Failed(anyhow!(other)),
    }
}

pub type CmdResult<T> = Result<T, CmdError>;

/// `design-report`: solve one instance against the configured audience and
/// return the JSON document to print.
pub fn cmd_design_report(
    cfg: &RunConfig,
    x_s: &Vector,
    x_t: &Vector,
    epsilon: f64,
) -> CmdResult<serde_json::Value> {
    let dim = cfg.scenario.dim;
    if x_s.dim() != dim {
        return Err(CmdError::BadInput(anyhow!(
            "--x-s has {} entries, expected dim {dim}",
            x_s.dim()
        )));
    }
    if x_t.dim() != dim {
        return Err(CmdError::BadInput(anyhow!(
            "--x-t has {} entries, expected dim {dim}",
            x_t.dim()
        )));
    }
    // The designed-for audience is the configured ergodic one at its mean
    // belief; this is deterministic (no sampling).
    let moments = ReporterMoments::ergodic(&cfg.scenario.sigma, &cfg.scenario.sigma_s, &cfg.mu_bar)
        .map_err(classify)?;
    let design = optimal_report(&moments, x_s, x_t, epsilon).map_err(classify)?;
    Ok(serde_json::json!({
        "y_star": design.y_star.as_slice(),
        "lambda_star": design.lambda_star,
        "binding": design.binding,
        "objective": design.objective,
        "admissible": is_admissible(&design.y_star, x_t, epsilon),
    }))
}

pub struct SweepOutput {
    pub csv_path: PathBuf,
    pub svg_path: Option<PathBuf>,
    pub rows: usize,
}

/// `sweep`: epsilon-sweep convergence curves to CSV (and optionally SVG).
pub fn cmd_sweep(cfg: &RunConfig) -> CmdResult<SweepOutput> {
    let curve = sweep_epsilon(&cfg.scenario, &cfg.epsilon_grid, cfg.n_draws, cfg.seed)
        .map_err(classify)?;

    let csv_path = cfg.output_dir.join("sweep.csv");
    output::write_file(&csv_path, &output::sweep_csv(&curve)).map_err(CmdError::Failed)?;

    let svg_path = if cfg.emit_svg {
        let chart = line_chart(
            "Belief convergence of the optimal report",
            "filter radius epsilon",
            "mean conveyance distance",
            &curve.epsilons,
            &[
                Series {
                    label: "true source",
                    color: "#1f77b4",
                    mean: &curve.true_mean,
                    band: Some(&curve.true_std),
                },
                Series {
                    label: "false source",
                    color: "#d62728",
                    mean: &curve.false_mean,
                    band: Some(&curve.false_std),
                },
            ],
        );
        let path = cfg.output_dir.join("sweep.svg");
        output::write_file(&path, &chart).map_err(CmdError::Failed)?;
        Some(path)
    } else {
        None
    };

    Ok(SweepOutput {
        csv_path,
        svg_path,
        rows: curve.epsilons.len(),
    })
}

pub struct PolicyOutput {
    pub csv_path: PathBuf,
    pub summary_path: PathBuf,
    pub svg_path: Option<PathBuf>,
    pub epsilon_star: f64,
    pub total_at_star: f64,
}

/// `optimize-policy`: utility curve to CSV plus a JSON summary of the
/// maximizer.
pub fn cmd_optimize_policy(cfg: &RunConfig) -> CmdResult<PolicyOutput> {
    let (epsilon_star, curve) = optimize_policy(
        &cfg.scenario,
        &cfg.policy,
        &cfg.epsilon_grid,
        cfg.n_draws,
        cfg.seed,
    )
    .map_err(classify)?;

    let csv_path = cfg.output_dir.join("utility.csv");
    output::write_file(
        &csv_path,
        &output::utility_csv(&curve, cfg.policy.delta, cfg.policy.alpha),
    )
    .map_err(CmdError::Failed)?;

    let total_at_star = curve
        .iter()
        .find(|p| p.epsilon == epsilon_star)
        .map(|p| p.total)
        .unwrap_or(f64::NAN);
    let summary_path = cfg.output_dir.join("summary.json");
    output::write_file(&summary_path, &output::summary_json(epsilon_star, total_at_star))
        .map_err(CmdError::Failed)?;

    let svg_path = if cfg.emit_svg {
        let u1: Vec<f64> = curve.iter().map(|p| p.u1).collect();
        let u2: Vec<f64> = curve.iter().map(|p| p.u2).collect();
        let total: Vec<f64> = curve.iter().map(|p| p.total).collect();
        let chart = line_chart(
            "Network utility vs filter radius",
            "filter radius epsilon",
            "utility",
            &cfg.epsilon_grid,
            &[
                Series {
                    label: "U1 (separation)",
                    color: "#1f77b4",
                    mean: &u1,
                    band: None,
                },
                Series {
                    label: "U2 (permissiveness)",
                    color: "#d62728",
                    mean: &u2,
                    band: None,
                },
                Series {
                    label: "U1 + beta U2",
                    color: "#2ca02c",
                    mean: &total,
                    band: None,
                },
            ],
        );
        let path = cfg.output_dir.join("utility.svg");
        output::write_file(&path, &chart).map_err(CmdError::Failed)?;
        Some(path)
    } else {
        None
    };

    Ok(PolicyOutput {
        csv_path,
        summary_path,
        svg_path,
        epsilon_star,
        total_at_star,
    })
}

pub struct ValidationRow {
    pub instance: u64,
    pub epsilon: f64,
    pub design_objective: f64,
    pub grid_objective: f64,
    pub descent_objective: f64,
    pub passed: bool,
}

pub struct ValidationReport {
    pub rows: Vec<ValidationRow>,
    pub tolerance: f64,
    /// Serialized replay data for the first failing instance, if any.
    pub failure_replay: Option<String>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }
}

const VALIDATE_TOLERANCE: f64 = 1e-3;
const VALIDATE_RESOLUTION: f64 = 1e-3;

fn random_spd(rng: &mut impl Rng) -> Matrix {
    let e1 = rng.gen_range(0.2..3.0);
    let e2 = rng.gen_range(0.2..3.0);
    let theta: f64 = rng.gen_range(0.0..core::f64::consts::PI);
    let (s, c) = theta.sin_cos();
    let r = Matrix::from_rows(2, vec![c, -s, s, c]).expect("2x2 rotation");
    r.matmul(&Matrix::diag(&[e1, e2])).matmul(&r.transpose())
}

/// `validate`: closed-form optimizer vs the two brute-force oracles on random
/// 2-d instances. `inject_bug` is the negative control: it corrupts the
/// multiplier before the comparison and must make the run fail.
pub fn cmd_validate(cfg: &RunConfig, n_instances: u64, inject_bug: bool) -> CmdResult<ValidationReport> {
    if cfg.scenario.dim > 3 {
        return Err(CmdError::BadInput(anyhow!(
            "validate requires dim <= 3, got {}",
            cfg.scenario.dim
        )));
    }
    let mut rows = Vec::with_capacity(n_instances as usize);
    let mut failure_replay = None;

    for instance in 0..n_instances {
        let mut rng = draw_rng(cfg.seed, instance);
        let viewers: Vec<ViewerProfile> = (0..5)
            .map(|_| {
                let scale = rng.gen_range(0.0..1.5);
                let mu = sample_unit_sphere(&mut rng, 2).scale(scale);
                let sigma = Covariance::new(random_spd(&mut rng)).expect("spd by construction");
                let sigma_s = Covariance::new(random_spd(&mut rng)).expect("spd by construction");
                ViewerProfile::new(mu, sigma, sigma_s).expect("valid profile")
            })
            .collect();
        let pop = Population::new(viewers).map_err(classify)?;
        let x_s = sample_unit_sphere(&mut rng, 2);
        let x_t = sample_unit_sphere(&mut rng, 2);
        let epsilon = rng.gen_range(0.1..2.0);

        let moments = population_moments(&pop).map_err(classify)?;
        let mut design = optimal_report(&moments, &x_s, &x_t, epsilon).map_err(classify)?;
        if inject_bug {
            let bad_lambda = design.lambda_star + 0.5;
            design.y_star =
                report_for_lambda(&moments, &x_s, &x_t, bad_lambda).map_err(classify)?;
            design.lambda_star = bad_lambda;
            design.objective = moments
                .objective_at(&design.y_star, &x_s)
                .map_err(classify)?;
        }

        let grid =
            brute_force_report(&pop, &x_s, &x_t, epsilon, VALIDATE_RESOLUTION).map_err(classify)?;
        let descent = projected_descent_report(&pop, &x_s, &x_t, epsilon).map_err(classify)?;

        let passed = compare(&design, &grid, VALIDATE_TOLERANCE)
            && compare(&design, &descent, VALIDATE_TOLERANCE)
            && (grid.objective - descent.objective).abs() <= VALIDATE_TOLERANCE;

        if !passed && failure_replay.is_none() {
            failure_replay = Some(replay_json(instance, &pop, &x_s, &x_t, epsilon));
        }
        rows.push(ValidationRow {
            instance,
            epsilon,
            design_objective: design.objective,
            grid_objective: grid.objective,
            descent_objective: descent.objective,
            passed,
        });
    }

    Ok(ValidationReport {
        rows,
        tolerance: VALIDATE_TOLERANCE,
        failure_replay,
    })
}

fn replay_json(instance: u64, pop: &Population, x_s: &Vector, x_t: &Vector, epsilon: f64) -> String {
    let viewers: Vec<serde_json::Value> = pop
        .viewers()
        .iter()
        .map(|v| {
            serde_json::json!({
                "mu": v.mu().as_slice(),
                "sigma": v.sigma().matrix().as_slice(),
                "sigma_s": v.sigma_s().matrix().as_slice(),
            })
        })
        .collect();
    serde_json::json!({
        "instance": instance,
        "epsilon": epsilon,
        "x_s": x_s.as_slice(),
        "x_t": x_t.as_slice(),
        "viewers": viewers,
    })
    .to_string()
}
