use std::path::PathBuf;

use clap::{Parser, Subcommand};

use misinfo_cli::commands::{self, CmdError};
use misinfo_cli::config::{parse_vector, RawConfig, RunConfig};

/// Report-design and containment-policy experiments for an information
/// network with a truth-distance authenticity filter.
#[derive(Parser)]
#[command(name = "misinfo", version, about)]
struct Cli {
    /// TOML config file; omitted fields use the reference-setup defaults.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Override the RNG seed from the config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Override the output directory from the config.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Render SVG plots next to the CSV outputs.
    #[arg(long, global = true)]
    svg: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Design the optimal report for one (source, truth, radius) instance.
    DesignReport {
        /// Source information vector, comma separated.
        #[arg(long = "x-s", value_name = "V1,V2,...")]
        x_s: String,
        /// Truth vector, comma separated.
        #[arg(long = "x-t", value_name = "V1,V2,...")]
        x_t: String,
        /// Filter radius; defaults to policy.epsilon from the config.
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Sweep the filter radius and write the convergence curves.
    Sweep,
    /// Evaluate the network utility over the grid and pick epsilon*.
    OptimizePolicy,
    /// Cross-check the optimizer against brute-force oracles.
    Validate {
        /// Number of random instances.
        #[arg(long, default_value_t = 100)]
        instances: u64,
        /// Negative control: corrupt the multiplier and expect failure.
        #[arg(long, hide = true)]
        inject_bug: bool,
    },
}

fn load_config(cli: &Cli) -> Result<RunConfig, CmdError> {
    let mut raw = match &cli.config {
        Some(path) => RawConfig::load(path).map_err(CmdError::BadInput)?,
        None => RawConfig::default(),
    };
    if let Some(seed) = cli.seed {
        raw.seed = seed;
    }
    if let Some(out) = &cli.out {
        raw.output_dir = out.clone();
    }
    if cli.svg {
        raw.emit_svg = true;
    }
    RunConfig::resolve(&raw).map_err(CmdError::BadInput)
}

fn run(cli: &Cli) -> Result<i32, CmdError> {
    let cfg = load_config(cli)?;
    match &cli.command {
        Command::DesignReport { x_s, x_t, epsilon } => {
            let x_s = parse_vector(x_s, "--x-s").map_err(CmdError::BadInput)?;
            let x_t = parse_vector(x_t, "--x-t").map_err(CmdError::BadInput)?;
            let eps = epsilon.unwrap_or(cfg.policy.epsilon);
            let doc = commands::cmd_design_report(&cfg, &x_s, &x_t, eps)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&doc).expect("document serializes")
            );
            Ok(0)
        }
        Command::Sweep => {
            let out = commands::cmd_sweep(&cfg)?;
            println!("wrote {} ({} rows)", out.csv_path.display(), out.rows);
            if let Some(svg) = out.svg_path {
                println!("wrote {}", svg.display());
            }
            Ok(0)
        }
        Command::OptimizePolicy => {
            let out = commands::cmd_optimize_policy(&cfg)?;
            println!("wrote {}", out.csv_path.display());
            println!("wrote {}", out.summary_path.display());
            if let Some(svg) = out.svg_path {
                println!("wrote {}", svg.display());
            }
            println!(
                "epsilon_star = {} (total = {:.6})",
                out.epsilon_star, out.total_at_star
            );
            Ok(0)
        }
        Command::Validate {
            instances,
            inject_bug,
        } => {
            let report = commands::cmd_validate(&cfg, *instances, *inject_bug)?;
            println!("instance  epsilon   design_obj    grid_obj      descent_obj   status");
            for row in &report.rows {
                println!(
                    "{:<9} {:<9.4} {:<13.6e} {:<13.6e} {:<13.6e} {}",
                    row.instance,
                    row.epsilon,
                    row.design_objective,
                    row.grid_objective,
                    row.descent_objective,
                    if row.passed { "pass" } else { "FAIL" }
                );
            }
            let passed = report.rows.iter().filter(|r| r.passed).count();
            println!(
                "{passed}/{} instances within tolerance {:e}",
                report.rows.len(),
                report.tolerance
            );
            if let Some(replay) = &report.failure_replay {
                eprintln!("first failing instance (replay data): {replay}");
            }
            Ok(if report.all_passed() { 0 } else { 1 })
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {}", err.message());
            std::process::exit(err.exit_code());
        }
    }
}
