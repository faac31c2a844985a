use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

/// Subcommands of the experiment driver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Deriv,
    Identity,
    El,
    Symmetry,
    Noether,
    Approx,
    Oscillator,
}

impl Command {
    pub const ALL: [Command; 7] =
        [Command::Deriv, Command::Identity, Command::El, Command::Symmetry, Command::Noether, Command::Approx, Command::Oscillator];

    pub fn name(self) -> &'static str {
        match self {
            Command::Deriv => "deriv",
            Command::Identity => "identity",
            Command::El => "el",
            Command::Symmetry => "symmetry",
            Command::Noether => "noether",
            Command::Approx => "approx",
            Command::Oscillator => "oscillator",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parameters shared by all subcommands. Each command reads the fields it
/// needs and falls back to its own defaults for the rest.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Variant of the command, e.g. `convergence` for `deriv`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub study: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ns: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<[f64; 2]>,
    /// Subinterval `[A, B]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<[f64; 2]>,
    /// Main preset of the command: a function for `deriv`, a Lagrangian for
    /// `el`, `symmetry` and `noether`, a problem for `approx`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    /// Several main presets, run one after another.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub presets: Option<Vec<String>>,
    /// Vector-field preset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    /// Trajectory preset, or `solved` for the oscillator extremal.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<String>,
    /// Negative-control trajectory preset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control: Option<String>,
    /// Function presets, e.g. the pair `[f, g]` of `identity` or the test
    /// functions of `approx`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub functions: Option<Vec<String>>,
    /// Operator for `deriv`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operator: Option<String>,
    /// Lower-bound policy for `symmetry`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy: Option<String>,
    /// Evaluation times.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<f64>>,
    /// Truncation ladder for `approx`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<usize>>,
    /// Group-parameter ladder for `symmetry`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub etas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    /// Coefficients of the `custom-polynomial` Lagrangian.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<[f64; 6]>,
    /// Upper limit `B` of the conserved quantity.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<f64>,
    /// Tolerance override.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Command-line overrides applied on top of a config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub n: Option<usize>,
    pub alpha: Option<f64>,
    pub preset: Option<String>,
}

/// Invalid input; maps to exit code 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationError(pub String);

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ValidationError {}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T, ValidationError> {
    Err(ValidationError(msg.into()))
}

impl ExperimentConfig {
    /// Parse a JSON config; errors carry the line and column.
    pub fn from_json(text: &str, origin: &str) -> Result<Self, ValidationError> {
        serde_json::from_str(text).map_err(|e| ValidationError(format!("{origin}:{}:{}: {e}", e.line(), e.column())))
    }

    pub fn load(path: &Path) -> Result<Self, ValidationError> {
        let text = std::fs::read_to_string(path).map_err(|e| ValidationError(format!("{}: {e}", path.display())))?;
        Self::from_json(&text, &path.display().to_string())
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(n) = o.n {
            self.n = Some(n);
        }
        if let Some(a) = o.alpha {
            self.alpha = Some(a);
        }
        if let Some(p) = &o.preset {
            self.preset = Some(p.clone());
            self.presets = None;
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// `presets` if given, else `[preset]`, else `[default]`.
    pub fn preset_list(&self, default: &str) -> Vec<String> {
        match (&self.presets, &self.preset) {
            (Some(list), _) => list.clone(),
            (None, Some(p)) => vec![p.clone()],
            (None, None) => vec![default.to_string()],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        let c = ExperimentConfig {
            alpha: Some(0.5),
            ns: Some(vec![256, 512]),
            interval: Some([0.0, 1.0]),
            preset: Some("power-1".into()),
            coefficients: Some([1.0, 0.0, 0.0, 0.0, 0.0, 0.5]),
            seed: Some(7),
            ..Default::default()
        };
        assert_eq!(ExperimentConfig::from_json(&c.to_json(), "x").unwrap(), c);
    }

    #[test]
    fn unknown_keys_are_rejected_with_position() {
        let err = ExperimentConfig::from_json("{\n  \"alpha\": 0.5,\n  \"alhpa\": 0.4\n}", "cfg.json").unwrap_err();
        assert!(err.0.starts_with("cfg.json:3:"), "{}", err.0);
        assert!(err.0.contains("alhpa"));
    }

    #[test]
    fn overrides_replace_preset_lists() {
        let mut c = ExperimentConfig { presets: Some(vec!["a".into(), "b".into()]), n: Some(8), ..Default::default() };
        c.apply(&Overrides { n: Some(16), alpha: None, preset: Some("c".into()) });
        assert_eq!(c.n, Some(16));
        assert_eq!(c.preset_list("z"), vec!["c".to_string()]);
    }
}
