//! Batch driver for `fracvar-core`: JSON configs in, CSV tables and JSON
//! metadata sidecars out.

pub mod commands;
pub mod config;
pub mod output;
pub mod presets;

use std::path::Path;
use std::time::Instant;

use serde_json::{json, Value};

pub use commands::{execute, RunError};
pub use config::{Command, ExperimentConfig, Overrides, ValidationError};
pub use output::Report;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Run `command`, write `out` and `<out>.meta.json`, and return the exit code.
/// Outputs are written even when a numerical flag is raised.
pub fn run(command: Command, cfg: &ExperimentConfig, out: &Path) -> i32 {
    let start = Instant::now();
    let report = match execute(command, cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("fracvar {command}: {e}");
            return match e {
                RunError::Invalid(_) => EXIT_INVALID,
                RunError::Numerical(_) => EXIT_NUMERICAL,
            };
        }
    };
    let wall = start.elapsed().as_secs_f64();
    if let Err(e) = write_outputs(command, cfg, &report, out, wall) {
        eprintln!("fracvar {command}: {e:#}");
        return EXIT_IO;
    }
    for note in &report.notes {
        eprintln!("fracvar {command}: {note}");
    }
    if report.flagged {
        EXIT_NUMERICAL
    } else {
        EXIT_OK
    }
}

pub fn write_outputs(command: Command, cfg: &ExperimentConfig, report: &Report, out: &Path, wall_time_s: f64) -> anyhow::Result<()> {
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    report.table.write_csv(out)?;
    let meta = json!({
        "command": command.name(),
        "version": env!("CARGO_PKG_VERSION"),
        "config": serde_json::to_value(cfg)?,
        "wall_time_s": wall_time_s,
        "threads": rayon::current_num_threads(),
        "flagged": report.flagged,
        "notes": report.notes,
        "summary": Value::Object(report.summary.clone()),
    });
    std::fs::write(output::sidecar_path(out), serde_json::to_string_pretty(&meta)? + "\n")?;
    Ok(())
}

/// Parse `FRACVAR_THREADS`; 0 or unset means the rayon default.
pub fn thread_count(var: Option<&str>) -> Result<usize, ValidationError> {
    match var.map(str::trim) {
        None | Some("") => Ok(0),
        Some(s) => s.parse().map_err(|_| ValidationError(format!("FRACVAR_THREADS must be a non-negative integer, got {s:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thread_variable_parses() {
        assert_eq!(thread_count(None).unwrap(), 0);
        assert_eq!(thread_count(Some(" 4 ")).unwrap(), 4);
        assert!(thread_count(Some("-1")).is_err());
    }

    #[test]
    fn deriv_writes_table_and_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("sub/deriv.csv");
        let cfg = ExperimentConfig { n: Some(64), preset: Some("power-2".into()), ..Default::default() };
        assert_eq!(run(Command::Deriv, &cfg, &out), EXIT_OK);
        let text = std::fs::read_to_string(&out).unwrap();
        assert!(text.starts_with("t,value,abs_error_vs_closed_form\r\n"));
        assert_eq!(text.lines().count(), 66);
        let meta: Value = serde_json::from_str(&std::fs::read_to_string(output::sidecar_path(&out)).unwrap()).unwrap();
        assert_eq!(meta["config"]["n"], 64);
        assert_eq!(meta["command"], "deriv");
        assert!(meta["summary"]["max_interior_abs_error"].as_f64().unwrap() < 1e-2);
    }

    #[test]
    fn invalid_order_exits_with_two() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ExperimentConfig { alpha: Some(1.5), ..Default::default() };
        assert_eq!(run(Command::Deriv, &cfg, &dir.path().join("x.csv")), EXIT_INVALID);
        assert!(!dir.path().join("x.csv").exists());
    }

    #[test]
    fn divergent_operator_exits_with_three() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ExperimentConfig { n: Some(32), preset: Some("exp".into()), ..Default::default() };
        assert_eq!(run(Command::Deriv, &cfg, &dir.path().join("x.csv")), EXIT_NUMERICAL);
        assert!(dir.path().join("x.csv").exists());
    }
}
