//! Run configuration: defaults, an optional `key = value` file, then flags.

use std::fs;
use std::path::{Path, PathBuf};

use eisenzero::{CountOptions, EvalParams};

/// Environment variable consulted when `--config` is absent.
pub const CONFIG_ENV: &str = "EISENZERO_CONFIG";

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub target_abs_err: f64,
    pub radius_cap: f64,
    pub top_height: f64,
    pub snap_tol: f64,
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            target_abs_err: 1e-10,
            radius_cap: 1e6,
            top_height: 8.0,
            snap_tol: 0.05,
            workers: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: {msg}")]
    Syntax { path: PathBuf, line: usize, msg: String },
    #[error("{key} must be positive, got {value}")]
    NotPositive { key: &'static str, value: String },
}

impl RunConfig {
    /// Defaults overridden by the file at `path`, or at `$EISENZERO_CONFIG`
    /// when `path` is `None`.
    pub fn load(path: Option<&Path>) -> Result<Self, ConfigError> {
        let env = std::env::var_os(CONFIG_ENV).map(PathBuf::from);
        let mut cfg = Self::default();
        if let Some(p) = path.map(Path::to_path_buf).or(env) {
            let text = fs::read_to_string(&p).map_err(|source| ConfigError::Io { path: p.clone(), source })?;
            cfg.apply_text(&text, &p)?;
        }
        Ok(cfg)
    }

    fn apply_text(&mut self, text: &str, path: &Path) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let syntax = |msg: String| ConfigError::Syntax { path: path.to_path_buf(), line: i + 1, msg };
            let (key, value) = line.split_once('=').ok_or_else(|| syntax("expected key = value".into()))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "workers" => {
                    self.workers = value.parse().map_err(|_| syntax(format!("bad integer {value:?}")))?;
                }
                "target_abs_err" | "radius_cap" | "top_height" | "snap_tol" => {
                    let v: f64 = value.parse().map_err(|_| syntax(format!("bad number {value:?}")))?;
                    match key {
                        "target_abs_err" => self.target_abs_err = v,
                        "radius_cap" => self.radius_cap = v,
                        "top_height" => self.top_height = v,
                        _ => self.snap_tol = v,
                    }
                }
                _ => return Err(syntax(format!("unknown key {key:?}"))),
            }
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let checks = [
            ("target_abs_err", self.target_abs_err),
            ("radius_cap", self.radius_cap),
            ("top_height", self.top_height),
            ("snap_tol", self.snap_tol),
            ("workers", self.workers as f64),
        ];
        for (key, v) in checks {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ConfigError::NotPositive { key, value: v.to_string() });
            }
        }
        Ok(())
    }

    /// Parameters for single evaluations; the target is enforced.
    pub fn eval_params(&self) -> EvalParams {
        EvalParams { target_abs_err: self.target_abs_err, radius_cap: self.radius_cap, ..EvalParams::default() }
    }

    /// Options for counting and locating. Evaluations along contours run at
    /// least as tight as the counter's own default and are not enforced.
    pub fn count_options(&self) -> CountOptions {
        let mut opts = CountOptions { top_height: self.top_height, snap_tol: self.snap_tol, ..CountOptions::default() };
        opts.eval.target_abs_err = opts.eval.target_abs_err.min(self.target_abs_err);
        opts.eval.radius_cap = opts.eval.radius_cap.min(self.radius_cap);
        opts
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_positive() {
        let c = RunConfig::default();
        assert!(c.validate().is_ok());
        assert_eq!(c.target_abs_err, 1e-10);
        assert_eq!(c.radius_cap, 1e6);
        assert_eq!(c.top_height, 8.0);
        assert_eq!(c.snap_tol, 0.05);
        assert!(c.workers >= 1);
    }

    #[test]
    fn file_overrides() {
        let mut c = RunConfig::default();
        c.apply_text("# comment\ntop_height = 6\n\nworkers=3  # trailing\n", Path::new("x")).unwrap();
        assert_eq!(c.top_height, 6.0);
        assert_eq!(c.workers, 3);
    }

    #[test]
    fn rejects_bad_lines() {
        let mut c = RunConfig::default();
        assert!(matches!(c.apply_text("top_height 6", Path::new("x")), Err(ConfigError::Syntax { line: 1, .. })));
        assert!(matches!(c.apply_text("colour = red", Path::new("x")), Err(ConfigError::Syntax { .. })));
        assert!(matches!(c.apply_text("snap_tol = -1", Path::new("x")), Err(ConfigError::NotPositive { .. })));
        assert!(matches!(c.apply_text("workers = 0", Path::new("x")), Err(ConfigError::NotPositive { .. })));
    }
}
