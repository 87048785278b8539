//! Job description shared by the command line and TOML config files.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use gammasum::fox_h::Kind;
use gammasum::gamma_sum::{BranchParams, EvalOptions, PathChoice};
use gammasum::mellin_barnes::ContourSpec;
use gammasum::mrc::Modulation;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Pdf,
    Cdf,
    Outage,
    Ber,
    Hfun,
    Validate,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Pdf => "pdf",
            Command::Cdf => "cdf",
            Command::Outage => "outage",
            Command::Ber => "ber",
            Command::Hfun => "hfun",
            Command::Validate => "validate",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridUnit {
    LinearY,
    SnrDb,
}

/// `points` equally spaced values from `start` to `stop`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|i| {
                if i + 1 == n {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = String;

    /// `start:stop:points`
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, n] = parts[..] else {
            return Err(format!("expected start:stop:points, got {s:?}"));
        };
        let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("bad number {v:?}: {e}"));
        Ok(Grid {
            start: num(a)?,
            stop: num(b)?,
            points: n.trim().parse().map_err(|e| format!("bad point count {n:?}: {e}"))?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Branches {
    pub m: Vec<f64>,
    /// Mean powers; for `ber` a relative profile scaled by the SNR axis.
    /// Defaults to all ones.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<Vec<f64>>,
}

impl Branches {
    pub fn omega_or_ones(&self) -> Vec<f64> {
        self.omega.clone().unwrap_or_else(|| vec![1.0; self.m.len()])
    }

    pub fn params(&self) -> gammasum::Result<BranchParams> {
        BranchParams::from_slices(&self.m, &self.omega_or_ones())
    }

    pub fn scaled(&self, c: f64) -> gammasum::Result<BranchParams> {
        let omega: Vec<f64> = self.omega_or_ones().iter().map(|w| w * c).collect();
        BranchParams::from_slices(&self.m, &omega)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HfunSpec {
    pub kind: Kind,
    pub m: usize,
    pub n: usize,
    /// `(value, scale, exponent)` triplets.
    #[serde(default)]
    pub upper: Vec<[f64; 3]>,
    #[serde(default)]
    pub lower: Vec<[f64; 3]>,
    /// Single argument; otherwise the job grid supplies `z` values.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "default_abs_tol")]
    pub abs_tol: f64,
    #[serde(default = "default_max_refinements")]
    pub max_refinements: u32,
    /// Evaluate the H-bar form even for integer fading figures.
    #[serde(default)]
    pub force_general: bool,
}

fn default_rel_tol() -> f64 {
    ContourSpec::DEFAULT_REL_TOL
}

fn default_abs_tol() -> f64 {
    ContourSpec::DEFAULT_ABS_TOL
}

fn default_max_refinements() -> u32 {
    ContourSpec::DEFAULT_MAX_REFINEMENTS
}

fn default_samples() -> usize {
    100_000
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rel_tol: default_rel_tol(),
            abs_tol: default_abs_tol(),
            max_refinements: default_max_refinements(),
            force_general: false,
        }
    }
}

impl Tolerances {
    pub fn eval_options(&self) -> EvalOptions {
        EvalOptions {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_refinements: self.max_refinements,
            path: if self.force_general {
                PathChoice::General
            } else {
                PathChoice::Auto
            },
            anchor_shift: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub command: Command,
    #[serde(default)]
    pub format: Format,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Monte Carlo sample count for `validate`.
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub modulations: Vec<Modulation>,
    /// Filled from the command when absent: `snr_db` for `ber`, else `linear_y`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_unit: Option<GridUnit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Grid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branches: Option<Branches>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hfun: Option<HfunSpec>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{message}")]
    Malformed { message: String },
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
}

fn field(name: impl Into<String>, message: impl Into<String>) -> ParseError {
    ParseError::Field {
        field: name.into(),
        message: message.into(),
    }
}

impl JobSpec {
    pub fn new(command: Command) -> Self {
        JobSpec {
            command,
            format: Format::Csv,
            output: None,
            seed: None,
            samples: default_samples(),
            modulations: Vec::new(),
            grid_unit: None,
            grid: None,
            branches: None,
            hfun: None,
            tolerances: Tolerances::default(),
        }
    }

    pub fn fill_defaults(&mut self) {
        if self.grid_unit.is_none() {
            self.grid_unit = Some(match self.command {
                Command::Ber => GridUnit::SnrDb,
                _ => GridUnit::LinearY,
            });
        }
    }

    pub fn unit(&self) -> GridUnit {
        self.grid_unit.unwrap_or(match self.command {
            Command::Ber => GridUnit::SnrDb,
            _ => GridUnit::LinearY,
        })
    }

    /// Checks every invariant, naming the offending field.
    pub fn validate(&self) -> Result<(), ParseError> {
        let tol = &self.tolerances;
        if !(tol.rel_tol > 0.0 && tol.rel_tol < 1.0) {
            return Err(field("tolerances.rel_tol", format!("must lie in (0, 1), got {}", tol.rel_tol)));
        }
        if !(tol.abs_tol > 0.0 && tol.abs_tol.is_finite()) {
            return Err(field("tolerances.abs_tol", format!("must be positive, got {}", tol.abs_tol)));
        }
        if let Some(g) = &self.grid {
            if g.points < 2 {
                return Err(field("grid.points", format!("need at least 2 points, got {}", g.points)));
            }
            if !(g.start.is_finite() && g.stop.is_finite() && g.start < g.stop) {
                return Err(field("grid", format!("need start < stop, got {} .. {}", g.start, g.stop)));
            }
            if self.unit() == GridUnit::LinearY && g.start < 0.0 && self.command != Command::Hfun {
                return Err(field("grid.start", format!("must be non-negative, got {}", g.start)));
            }
        }
        match self.command {
            Command::Hfun => {
                let h = self.hfun.as_ref().ok_or_else(|| field("hfun", "required for the hfun command"))?;
                if self.grid.is_none() && h.z.is_none() {
                    return Err(field("hfun.z", "give either hfun.z or a grid of z values"));
                }
                if let Some(z) = h.z {
                    if !(z > 0.0 && z.is_finite()) {
                        return Err(field("hfun.z", format!("must be positive, got {z}")));
                    }
                }
                if let Some(g) = &self.grid {
                    if g.start <= 0.0 {
                        return Err(field("grid.start", "z values must be positive"));
                    }
                }
                self.hfun_spec(1.0).map_err(|e| field("hfun", e.to_string()))?;
            }
            _ => {
                let b = self
                    .branches
                    .as_ref()
                    .ok_or_else(|| field("branches", format!("required for the {} command", self.command)))?;
                if b.m.is_empty() {
                    return Err(field("branches.m", "need at least one branch"));
                }
                for (i, &m) in b.m.iter().enumerate() {
                    if !(m > 0.0 && m.is_finite()) {
                        return Err(field(format!("branches.m[{i}]"), format!("must be positive, got {m}")));
                    }
                }
                if let Some(w) = &b.omega {
                    if w.len() != b.m.len() {
                        return Err(field(
                            "branches.omega",
                            format!("has {} entries but branches.m has {}", w.len(), b.m.len()),
                        ));
                    }
                    for (i, &o) in w.iter().enumerate() {
                        if !(o > 0.0 && o.is_finite()) {
                            return Err(field(format!("branches.omega[{i}]"), format!("must be positive, got {o}")));
                        }
                    }
                }
                if self.grid.is_none() {
                    return Err(field("grid", format!("required for the {} command", self.command)));
                }
            }
        }
        if self.command == Command::Ber && self.modulations.is_empty() {
            return Err(field("modulations", "ber needs at least one modulation"));
        }
        if self.command == Command::Validate {
            if self.seed.is_none() {
                return Err(field("seed", "validate needs a seed"));
            }
            if self.seed.is_some_and(|s| s > i64::MAX as u64) {
                return Err(field("seed", "must fit a TOML integer (at most 2^63 - 1)"));
            }
            if self.samples == 0 {
                return Err(field("samples", "must be at least 1"));
            }
        }
        Ok(())
    }

    pub(crate) fn hfun_spec(&self, z: f64) -> gammasum::Result<gammasum::fox_h::HFamilySpec> {
        use gammasum::fox_h::{HFamilySpec, HParam};
        let h = self
            .hfun
            .as_ref()
            .ok_or_else(|| gammasum::Error::InvalidParameter("missing hfun section".into()))?;
        let conv = |v: &[[f64; 3]]| v.iter().map(|t| HParam::new(t[0], t[1], t[2])).collect();
        HFamilySpec::new(h.kind, h.m, h.n, conv(&h.upper), conv(&h.lower), z)
    }

    pub fn to_config_string(&self) -> String {
        toml::to_string(self).expect("JobSpec serializes to TOML")
    }
}

/// Parses a TOML job description, fills defaults and validates it.
pub fn parse_config_str(text: &str) -> Result<JobSpec, ParseError> {
    let mut job: JobSpec = toml::from_str(text).map_err(|e| match e.span() {
        Some(span) => {
            let before = &text[..span.start.min(text.len())];
            let line = before.matches('\n').count() + 1;
            let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
            ParseError::Syntax {
                line,
                column,
                message: e.message().to_string(),
            }
        }
        None => ParseError::Malformed {
            message: e.message().to_string(),
        },
    })?;
    job.fill_defaults();
    job.validate()?;
    Ok(job)
}

pub fn parse_config(path: &Path) -> Result<JobSpec, ParseError> {
    let text = std::fs::read_to_string(path).map_err(|source| ParseError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config_str(&text)
}
