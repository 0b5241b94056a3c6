//! Run configuration: flat `key=value` config files with flag-over-file
//! precedence, and the translation into a generator configuration.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use spintomo::{Frame, GeneratorConfig, ScatteringAngle, ThetaMode};

use crate::{CliError, SharedArgs};

/// The effective parameters of one run. Fields left `None` fall back to
/// per-command defaults at the point of use, so commands can distinguish
/// "not requested" from an explicit value (for example, `tomograph` takes
/// analyzing powers from the event file unless they are overridden here).
#[derive(Clone, Debug, Default)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub events: Option<u64>,
    pub theta: Option<f64>,
    pub frame: Option<Frame>,
    pub alpha_plus: Option<f64>,
    pub alpha_minus: Option<f64>,
    pub bootstrap: Option<usize>,
    pub acceptance_cut: Option<f64>,
    pub tol_psd: Option<f64>,
    pub theta_start: Option<f64>,
    pub theta_stop: Option<f64>,
    pub theta_points: Option<usize>,
    pub out: Option<PathBuf>,
}

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_EVENTS: u64 = 10_000;
pub const DEFAULT_RESAMPLES: usize = 1_000;
pub const DEFAULT_SCAN_POINTS: usize = 25;

impl RunConfig {
    /// Builds the effective configuration: values from `--config FILE`
    /// (when given), overridden by any explicit flags.
    pub fn resolve(args: &SharedArgs) -> Result<Self, CliError> {
        let mut rc = RunConfig::default();
        if let Some(path) = &args.config {
            rc.apply_file(path)?;
        }
        if let Some(v) = args.seed {
            rc.seed = Some(v);
        }
        if let Some(v) = args.events {
            rc.events = Some(v);
        }
        if let Some(v) = args.theta {
            rc.theta = Some(v);
        }
        if let Some(v) = &args.frame {
            rc.frame = Some(parse_frame(v)?);
        }
        if let Some(v) = args.alpha_plus {
            rc.alpha_plus = Some(v);
        }
        if let Some(v) = args.alpha_minus {
            rc.alpha_minus = Some(v);
        }
        if let Some(v) = args.bootstrap {
            rc.bootstrap = Some(v);
        }
        if let Some(v) = args.acceptance_cut {
            rc.acceptance_cut = Some(v);
        }
        if let Some(v) = args.tol_psd {
            rc.tol_psd = Some(v);
        }
        if let Some(v) = args.theta_start {
            rc.theta_start = Some(v);
        }
        if let Some(v) = args.theta_stop {
            rc.theta_stop = Some(v);
        }
        if let Some(v) = args.theta_points {
            rc.theta_points = Some(v);
        }
        if let Some(v) = &args.out {
            rc.out = Some(v.clone());
        }
        Ok(rc)
    }

    /// Reads a flat `key=value` config file. Blank lines and `#` comments
    /// are skipped; unknown and duplicate keys are rejected so that a typo
    /// cannot silently change a run.
    fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Usage(format!("cannot read config file {}: {e}", path.display()))
        })?;
        let mut seen = HashSet::new();
        for (index, raw) in text.lines().enumerate() {
            let line_no = index + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(config_err(path, line_no, "expected key=value"));
            };
            let key = key.trim();
            let value = value.trim();
            if !seen.insert(key.to_string()) {
                return Err(config_err(path, line_no, &format!("duplicate key `{key}`")));
            }
            match key {
                "seed" => self.seed = Some(parse_value(path, line_no, key, value)?),
                "events" => self.events = Some(parse_value(path, line_no, key, value)?),
                "theta" => self.theta = Some(parse_value(path, line_no, key, value)?),
                "frame" => {
                    self.frame = Some(
                        parse_frame(value).map_err(|e| config_err(path, line_no, e.message()))?,
                    )
                }
                "alpha_plus" => self.alpha_plus = Some(parse_value(path, line_no, key, value)?),
                "alpha_minus" => self.alpha_minus = Some(parse_value(path, line_no, key, value)?),
                "bootstrap" => self.bootstrap = Some(parse_value(path, line_no, key, value)?),
                "acceptance_cut" => {
                    self.acceptance_cut = Some(parse_value(path, line_no, key, value)?)
                }
                "tol_psd" => self.tol_psd = Some(parse_value(path, line_no, key, value)?),
                "theta_start" => self.theta_start = Some(parse_value(path, line_no, key, value)?),
                "theta_stop" => self.theta_stop = Some(parse_value(path, line_no, key, value)?),
                "theta_points" => self.theta_points = Some(parse_value(path, line_no, key, value)?),
                "out" => self.out = Some(PathBuf::from(value)),
                _ => return Err(config_err(path, line_no, &format!("unknown key `{key}`"))),
            }
        }
        Ok(())
    }

    /// Translates the run parameters into a validated generator
    /// configuration (for `generate`, and per grid point for `scan`).
    pub fn generator_config(&self) -> Result<GeneratorConfig, CliError> {
        let mut config = GeneratorConfig::new(
            self.events.unwrap_or(DEFAULT_EVENTS),
            self.seed.unwrap_or(DEFAULT_SEED),
        );
        if let Some(theta) = self.theta {
            config.theta_mode = ThetaMode::Fixed(ScatteringAngle::new(theta)?);
        }
        if let Some(frame) = self.frame {
            config.frame = frame;
        }
        config.alpha_plus = self.alpha_plus.unwrap_or(1.0);
        config.alpha_minus = self.alpha_minus.unwrap_or(1.0);
        config.acceptance_cut = self.acceptance_cut;
        config.validate()?;
        Ok(config)
    }
}

fn config_err(path: &Path, line: usize, message: &str) -> CliError {
    CliError::Usage(format!("{}:{line}: {message}", path.display()))
}

fn parse_value<T: std::str::FromStr>(
    path: &Path,
    line: usize,
    key: &str,
    value: &str,
) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| config_err(path, line, &format!("cannot parse {key} from `{value}`")))
}

fn parse_frame(s: &str) -> Result<Frame, CliError> {
    s.parse().map_err(CliError::Usage)
}
