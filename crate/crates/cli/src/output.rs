//! File outputs: CSV tables with pinned numeric formatting and JSON
//! summaries. Everything written here is a deterministic function of the
//! computed results, so identical runs produce byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use misinfo_core::policy::UtilityBreakdown;
use misinfo_core::simulation::ConvergenceCurve;

/// Fixed 9-significant-digit scientific notation used in every CSV cell.
pub fn sci(x: f64) -> String {
    format!("{x:.8e}")
}

pub fn sweep_csv(curve: &ConvergenceCurve) -> String {
    let mut out = String::from("epsilon,true_mean,true_std,false_mean,false_std\n");
    for i in 0..curve.epsilons.len() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            sci(curve.epsilons[i]),
            sci(curve.true_mean[i]),
            sci(curve.true_std[i]),
            sci(curve.false_mean[i]),
            sci(curve.false_std[i]),
        );
    }
    out
}

pub fn utility_csv(curve: &[UtilityBreakdown], delta: f64, alpha: f64) -> String {
    let mut out = String::from("epsilon,u1,u2,total,u1_pass_delta,u2_pass_alpha\n");
    for point in curve {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            sci(point.epsilon),
            sci(point.u1),
            sci(point.u2),
            sci(point.total),
            point.passes_separation(delta),
            point.passes_permissiveness(alpha),
        );
    }
    out
}

pub fn summary_json(epsilon_star: f64, total_at_star: f64) -> String {
    let doc = serde_json::json!({
        "epsilon_star": epsilon_star,
        "total_at_star": total_at_star,
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("static document serializes");
    text.push('\n');
    text
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .with_context(|| format!("creating output directory {}", parent.display()))?;
        }
    }
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}
