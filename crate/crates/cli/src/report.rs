//! Plot-ready per-node training reports.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};

use scn_core::trainer::TrainingTrace;

/// Renders one CSV row per accepted node. `test_rmse` is left empty when the
/// run had no test set.
pub fn render(trace: &TrainingTrace) -> String {
    let mut out = String::from(
        "L,train_rmse,test_rmse,r_at_acceptance,lambda_used,candidates_tried,elapsed_s\n",
    );
    for step in &trace.steps {
        let test = step.test_rmse.map(|v| v.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            step.l,
            step.train_rmse,
            test,
            step.r_at_acceptance,
            step.lambda_used,
            step.candidates_tried,
            step.elapsed_s
        )
        .expect("writing to a string cannot fail");
    }
    out
}

pub fn write(path: &Path, trace: &TrainingTrace) -> Result<()> {
    fs::write(path, render(trace)).with_context(|| format!("cannot write {}", path.display()))
}
