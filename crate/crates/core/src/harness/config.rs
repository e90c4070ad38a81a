use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::evolution::{Dx12HReading, OddSystem};
use crate::scalar::Exact;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("unknown configuration key `{0}`")]
    UnknownKey(String),
    #[error("bad value `{value}` for `{key}`: {reason}")]
    BadValue { key: String, value: String, reason: String },
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("reading {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Parameters shared by every subcommand.
///
/// Exact parameters (`k`, `κ`, `τ`, `λ`) are kept as rationals so the
/// verification commands stay exact; simulations use their `f64` values.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    #[serde(serialize_with = "ser_rational")]
    pub k: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub kappa: BigRational,
    /// `None` means `2/(k+3/2)`.
    #[serde(serialize_with = "ser_opt_rational")]
    pub tau: Option<BigRational>,
    #[serde(serialize_with = "ser_rational")]
    pub lambda: BigRational,
    pub order: usize,
    pub depth: usize,
    pub dt: f64,
    pub t_max: f64,
    pub paths: usize,
    pub seed: u64,
    pub checkpoints: Vec<f64>,
    /// Trajectory rows are written every this many steps.
    pub record_every: usize,
    pub odd_system: OddSystem,
    pub dx12h: Dx12HReading,
    /// Half-width of the trace grid; `None` picks one from `κ` and `t_max`.
    pub grid_extent: Option<f64>,
    pub grid_points: usize,
    pub out: Option<PathBuf>,
    /// `None`: human-readable text for reports, CSV for data.
    pub format: Option<OutputFormat>,
}

fn ser_rational<S: serde::Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

fn ser_opt_rational<S: serde::Serializer>(q: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
    match q {
        Some(q) => s.serialize_str(&q.to_string()),
        None => s.serialize_none(),
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            k: BigRational::from_integer(1.into()),
            kappa: BigRational::from_integer(2.into()),
            tau: None,
            lambda: BigRational::zero(),
            order: 4,
            depth: 4,
            dt: 1e-3,
            t_max: 0.25,
            paths: 10_000,
            seed: 0,
            checkpoints: vec![0.1, 0.25],
            record_every: 1,
            odd_system: OddSystem::Printed,
            dx12h: Dx12HReading::WholeBracket,
            grid_extent: None,
            grid_points: 81,
            out: None,
            format: None,
        }
    }
}

/// Parses `3`, `-1/2`, `0.8`, `1e-3` or `2.5E+1` into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).ok()?;
        let d = BigInt::from_str(d.trim()).ok()?;
        return (!d.is_zero()).then(|| BigRational::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], i32::from_str(&s[i + 1..]).ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all = format!("{int}{frac}");
    let mut q = BigRational::from_integer(BigInt::from_str(if all.is_empty() { "0" } else { &all }).ok()?);
    let shift = exp - frac.len() as i32;
    let ten = BigRational::from_integer(10.into());
    for _ in 0..shift.unsigned_abs() {
        q = if shift > 0 { q * ten.clone() } else { q / ten.clone() };
    }
    Some(if neg { -q } else { q })
}

fn bad(key: &str, value: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::BadValue { key: key.into(), value: value.into(), reason: reason.into() }
}

impl RunConfig {
    /// Sets one `key = value` pair; dashes and underscores are interchangeable.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let key = key.trim().replace('-', "_");
        let value = value.trim();
        let rational = || parse_rational(value).ok_or_else(|| bad(&key, value, "expected a number or p/q"));
        let float = || -> Result<f64, ConfigError> {
            let f = f64::from_str(value).map_err(|e| bad(&key, value, e.to_string()))?;
            f.is_finite().then_some(f).ok_or_else(|| bad(&key, value, "not finite"))
        };
        let uint = || usize::from_str(value).map_err(|e| bad(&key, value, e.to_string()));
        match key.as_str() {
            "k" => self.k = rational()?,
            "kappa" => self.kappa = rational()?,
            "tau" => self.tau = if value == "default" { None } else { Some(rational()?) },
            "lambda" => self.lambda = rational()?,
            "order" => self.order = uint()?,
            "depth" => self.depth = uint()?,
            "dt" => self.dt = float()?,
            "t_max" => self.t_max = float()?,
            "paths" => self.paths = uint()?,
            "seed" => self.seed = u64::from_str(value).map_err(|e| bad(&key, value, e.to_string()))?,
            "checkpoints" => {
                self.checkpoints = value
                    .split(',')
                    .filter(|p| !p.trim().is_empty())
                    .map(|p| f64::from_str(p.trim()).map_err(|e| bad(&key, value, e.to_string())))
                    .collect::<Result<_, _>>()?
            }
            "record_every" => self.record_every = uint()?,
            "odd_system" => {
                self.odd_system = match value {
                    "printed" => OddSystem::Printed,
                    "group-consistent" | "group_consistent" => OddSystem::GroupConsistent,
                    _ => return Err(bad(&key, value, "expected printed or group-consistent")),
                }
            }
            "dx12h" => {
                self.dx12h = match value {
                    "whole-bracket" | "whole_bracket" => Dx12HReading::WholeBracket,
                    "literal" => Dx12HReading::Literal,
                    _ => return Err(bad(&key, value, "expected whole-bracket or literal")),
                }
            }
            "grid_extent" => self.grid_extent = Some(float()?),
            "grid_points" => self.grid_points = uint()?,
            "out" => self.out = Some(PathBuf::from(value)),
            "format" => {
                self.format = match value {
                    "csv" => Some(OutputFormat::Csv),
                    "json" => Some(OutputFormat::Json),
                    "auto" => None,
                    _ => return Err(bad(&key, value, "expected csv, json or auto")),
                }
            }
            _ => return Err(ConfigError::UnknownKey(key)),
        }
        Ok(())
    }

    /// Applies a plain `key = value` file; `#` starts a comment.
    pub fn apply_str(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        let mut cfg = RunConfig::default();
        cfg.apply_str(&text)?;
        Ok(cfg)
    }

    pub fn tau_exact(&self) -> BigRational {
        self.tau.clone().unwrap_or_else(|| {
            let two = BigRational::from_integer(2.into());
            two.clone() / (self.k.clone() + BigRational::new(3.into(), 2.into()))
        })
    }

    pub fn k_exact(&self) -> Exact {
        Exact::from_big_rational(self.k.clone())
    }

    pub fn kappa_exact(&self) -> Exact {
        Exact::from_big_rational(self.kappa.clone())
    }

    pub fn lambda_exact(&self) -> Exact {
        Exact::from_big_rational(self.lambda.clone())
    }

    pub fn tau_value(&self) -> Exact {
        Exact::from_big_rational(self.tau_exact())
    }

    pub fn k_f64(&self) -> f64 {
        self.k.to_f64().unwrap_or(f64::NAN)
    }

    pub fn kappa_f64(&self) -> f64 {
        self.kappa.to_f64().unwrap_or(f64::NAN)
    }

    pub fn tau_f64(&self) -> f64 {
        self.tau_exact().to_f64().unwrap_or(f64::NAN)
    }

    /// Number of Euler steps to reach `t`.
    pub fn steps_to(&self, t: f64) -> usize {
        (t / self.dt).round() as usize
    }

    /// The constraints a user-facing run must satisfy: `κ > 0`, `τ > 0`,
    /// `dt > 0`, `N ≥ 2`, `P ≥ 1`, plus everything in [`RunConfig::check_runnable`].
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.check_runnable()?;
        if !self.kappa.is_positive() {
            return Err(ConfigError::Invalid("kappa must be positive".into()));
        }
        if !self.tau_exact().is_positive() {
            return Err(ConfigError::Invalid("tau must be positive".into()));
        }
        Ok(())
    }

    /// Weaker check used by the library entry points: `κ = 0` and `τ = 0`
    /// are accepted as the degenerate noise-free and classical cases.
    pub fn check_runnable(&self) -> Result<(), ConfigError> {
        let fail = |m: &str| Err(ConfigError::Invalid(m.into()));
        if (self.k.clone() + BigRational::new(3.into(), 2.into())).is_zero() {
            return fail("critical level k = -3/2");
        }
        if self.kappa.is_negative() || self.tau_exact().is_negative() {
            return fail("kappa and tau must be nonnegative");
        }
        if !(self.dt > 0.0) {
            return fail("dt must be positive");
        }
        if !(self.t_max >= 0.0) {
            return fail("t_max must be nonnegative");
        }
        if self.order < 2 {
            return fail("order must be at least 2");
        }
        if self.depth < 1 {
            return fail("depth must be at least 1");
        }
        if self.paths < 1 {
            return fail("paths must be at least 1");
        }
        if self.record_every < 1 {
            return fail("record_every must be at least 1");
        }
        if self.grid_points < 2 {
            return fail("grid_points must be at least 2");
        }
        Ok(())
    }

    /// Checkpoints must lie in `[0, t_max]`; only the Monte Carlo test reads them.
    pub fn check_checkpoints(&self) -> Result<(), ConfigError> {
        if self.checkpoints.is_empty() {
            return Err(ConfigError::Invalid("no checkpoints".into()));
        }
        if let Some(t) = self.checkpoints.iter().find(|t| !(**t >= 0.0 && **t <= self.t_max + 0.5 * self.dt)) {
            return Err(ConfigError::Invalid(format!("checkpoint {t} outside [0, t_max]")));
        }
        Ok(())
    }
}
