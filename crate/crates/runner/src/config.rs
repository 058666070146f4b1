//! Run configuration: experiment defaults, an optional TOML file and CLI overrides.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{RunError, RunResult};
use pxp_core::dynamics::Method;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Eigenstudy,
    Quench,
    Analytics,
    Separate,
    Fit,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Eigenstudy => "eigenstudy",
            Experiment::Quench => "quench",
            Experiment::Analytics => "analytics",
            Experiment::Separate => "separate",
            Experiment::Fit => "fit",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Propagator {
    #[default]
    Auto,
    Eigenbasis,
    Krylov,
}

impl From<Propagator> for Method {
    fn from(p: Propagator) -> Self {
        match p {
            Propagator::Auto => Method::Auto,
            Propagator::Eigenbasis => Method::Eigenbasis,
            Propagator::Krylov => Method::Krylov,
        }
    }
}

/// Largest eigenstudy length without `large_l`; beyond it dense diagonalization
/// of the full constrained space gets slow.
pub const EIGENSTUDY_DEFAULT_MAX_L: usize = 16;
pub const EIGENSTUDY_HARD_MAX_L: usize = 22;
pub const QUENCH_MAX_L: usize = 28;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub experiment: Experiment,
    #[serde(rename = "L")]
    pub lengths: Vec<usize>,
    /// Thermal weight of the interpolated state; 0 is the pure scar.
    pub lambda_grid: Vec<f64>,
    pub theta_grid: Vec<f64>,
    pub dt: f64,
    pub t_max: f64,
    pub window: [f64; 2],
    pub shell_tol: f64,
    pub max_thermal: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub large_l: bool,
    pub propagator: Propagator,
}

/// Any subset of [`RunConfig`] fields, as read from a file or the command line.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub experiment: Option<Experiment>,
    #[serde(rename = "L")]
    pub lengths: Option<Vec<usize>>,
    pub lambda_grid: Option<Vec<f64>>,
    pub theta_grid: Option<Vec<f64>>,
    pub dt: Option<f64>,
    pub t_max: Option<f64>,
    pub window: Option<[f64; 2]>,
    pub shell_tol: Option<f64>,
    pub max_thermal: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub large_l: Option<bool>,
    pub propagator: Option<Propagator>,
}

impl PartialConfig {
    pub fn from_file(path: &Path) -> RunResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| RunError::ConfigFile {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(toml::from_str(&text)?)
    }
}

fn round12(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

/// `n` evenly spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect(),
    }
}

impl RunConfig {
    pub fn defaults(experiment: Experiment) -> Self {
        let lengths = match experiment {
            Experiment::Quench => vec![12, 16],
            Experiment::Analytics => vec![16],
            _ => vec![10, 12, 14, 16],
        };
        let theta_grid = match experiment {
            Experiment::Analytics => linspace(0.0, PI / 2.0, 101),
            _ => linspace(0.0, PI / 2.0, 9),
        };
        Self {
            experiment,
            lengths,
            lambda_grid: (0..=10).map(|k| round12(k as f64 * 0.1)).collect(),
            theta_grid,
            dt: 0.5,
            t_max: 1000.0,
            window: [100.0, 1000.0],
            shell_tol: pxp_core::spectra::SHELL_TOL,
            max_thermal: 200,
            seed: 20240531,
            out: PathBuf::from("out"),
            large_l: false,
            propagator: Propagator::Auto,
        }
    }

    /// Fields set in `p` replace the current ones.
    pub fn apply(&mut self, p: &PartialConfig) {
        macro_rules! take {
            ($($f:ident),*) => { $( if let Some(v) = &p.$f { self.$f = v.clone(); } )* };
        }
        take!(lengths, lambda_grid, theta_grid, dt, t_max, window, shell_tol, max_thermal, seed, out, large_l, propagator);
    }

    /// Defaults for `experiment`, then the file, then CLI overrides; validated.
    pub fn resolve(
        experiment: Experiment,
        file: Option<&Path>,
        overrides: &PartialConfig,
    ) -> RunResult<Self> {
        let mut cfg = Self::defaults(experiment);
        if let Some(path) = file {
            let from_file = PartialConfig::from_file(path)?;
            if let Some(e) = from_file.experiment {
                if e != experiment {
                    log::warn!("config file names experiment {e}, running {experiment}");
                }
            }
            cfg.apply(&from_file);
        }
        cfg.apply(overrides);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> RunResult<()> {
        let bad = |m: String| Err(RunError::Config(m));
        if self.lengths.is_empty() {
            return bad("L list is empty".into());
        }
        let needs_4n = matches!(self.experiment, Experiment::Quench | Experiment::Analytics);
        for &l in &self.lengths {
            if l < 4 || l % 2 != 0 {
                return bad(format!("L = {l}: lengths must be even and at least 4"));
            }
            if needs_4n && l % 4 != 0 {
                return bad(format!("L = {l}: {} needs multiples of 4", self.experiment));
            }
            match self.experiment {
                Experiment::Eigenstudy | Experiment::Separate => {
                    if l > EIGENSTUDY_HARD_MAX_L {
                        return bad(format!("L = {l} exceeds {EIGENSTUDY_HARD_MAX_L}"));
                    }
                    if l > EIGENSTUDY_DEFAULT_MAX_L && !self.large_l {
                        return bad(format!(
                            "L = {l} > {EIGENSTUDY_DEFAULT_MAX_L} needs --large-l"
                        ));
                    }
                }
                Experiment::Quench if l > QUENCH_MAX_L => {
                    return bad(format!("L = {l} exceeds {QUENCH_MAX_L}"));
                }
                _ => {}
            }
        }
        if self.lambda_grid.is_empty() || self.lambda_grid.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return bad("lambda grid must be nonempty and inside [0, 1]".into());
        }
        if self.theta_grid.is_empty() || self.theta_grid.iter().any(|x| !(0.0..=PI).contains(x)) {
            return bad("theta grid must be nonempty and inside [0, pi]".into());
        }
        if !(self.dt > 0.0) || !(self.t_max >= self.dt) {
            return bad(format!("need 0 < dt <= tmax, got dt = {}, tmax = {}", self.dt, self.t_max));
        }
        let [t1, t2] = self.window;
        if !(0.0 <= t1 && t1 <= t2 && t2 <= self.t_max) {
            return bad(format!("window [{t1}, {t2}] must lie inside [0, tmax]"));
        }
        if !(self.shell_tol > 0.0) {
            return bad("shell tolerance must be positive".into());
        }
        if self.max_thermal == 0 {
            return bad("max_thermal must be at least 1".into());
        }
        Ok(())
    }
}

/// Parses `a:b:step` (inclusive) or a comma list. Entries may be written in
/// units of pi: `pi`, `pi/4`, `3pi/8`, `0.5pi`.
pub fn parse_grid(s: &str) -> RunResult<Vec<f64>> {
    let s = s.trim();
    if s.contains(':') {
        let parts: Vec<f64> = s.split(':').map(parse_value).collect::<RunResult<_>>()?;
        let [a, b, step] = parts[..] else {
            return Err(RunError::Config(format!("range '{s}' must be start:stop:step")));
        };
        if !(step > 0.0) || b < a {
            return Err(RunError::Config(format!("range '{s}' is empty")));
        }
        let n = ((b - a) / step + 1e-9).floor() as usize;
        return Ok((0..=n).map(|k| round12(a + k as f64 * step)).collect());
    }
    s.split(',').map(parse_value).collect()
}

fn parse_value(tok: &str) -> RunResult<f64> {
    let tok = tok.trim();
    let err = || RunError::Config(format!("cannot parse '{tok}' as a number"));
    if let Some(idx) = tok.find("pi") {
        let (coef, rest) = (&tok[..idx], &tok[idx + 2..]);
        let c = if coef.is_empty() { 1.0 } else { coef.trim_end_matches('*').parse::<f64>().map_err(|_| err())? };
        let d = match rest.strip_prefix('/') {
            Some(d) => d.parse::<f64>().map_err(|_| err())?,
            None if rest.is_empty() => 1.0,
            None => return Err(err()),
        };
        return Ok(c * PI / d);
    }
    tok.parse::<f64>().map_err(|_| err())
}

pub fn parse_lengths(s: &str) -> RunResult<Vec<usize>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| RunError::Config(format!("cannot parse length '{t}'")))
        })
        .collect()
}

/// `t1,t2` or `t1:t2`.
pub fn parse_window(s: &str) -> RunResult<[f64; 2]> {
    let v: Vec<f64> = s.split([',', ':']).map(parse_value).collect::<RunResult<_>>()?;
    match v[..] {
        [a, b] => Ok([a, b]),
        _ => Err(RunError::Config(format!("window '{s}' must have two entries"))),
    }
}
