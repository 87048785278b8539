//! Command-line flags and their translation into a [`JobSpec`].

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use gammasum::fox_h::Kind;
use gammasum::mrc::Modulation;

use crate::job::{parse_config, Branches, Command, Format, Grid, GridUnit, HfunSpec, JobSpec, ParseError};

#[derive(Debug, Parser)]
#[command(name = "gammasum", version, about = "Gamma-sum distributions, MRC outage and BER curves")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Default)]
pub struct Common {
    /// Output format [default: csv]
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of standard output
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true)]
    pub rel_tol: Option<f64>,
    #[arg(long, global = true)]
    pub abs_tol: Option<f64>,
    #[arg(long, global = true)]
    pub max_refinements: Option<u32>,
    /// Use the H-bar representation even for integer fading figures
    #[arg(long, global = true)]
    pub force_general: bool,
    /// Print the job as a TOML config instead of running it
    #[arg(long, global = true)]
    pub emit_config: bool,
}

#[derive(Debug, Args)]
pub struct BranchArgs {
    /// Fading figures, comma separated
    #[arg(long, value_delimiter = ',', required = true, allow_negative_numbers = true)]
    pub m: Vec<f64>,
    /// Mean branch SNRs (for ber: relative profile), comma separated
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub omega: Option<Vec<f64>>,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Density of the combined SNR
    Pdf {
        #[command(flatten)]
        branches: BranchArgs,
        /// start:stop:points
        #[arg(long, allow_hyphen_values = true)]
        grid: Grid,
    },
    /// Distribution function of the combined SNR
    Cdf {
        #[command(flatten)]
        branches: BranchArgs,
        #[arg(long, allow_hyphen_values = true)]
        grid: Grid,
    },
    /// Outage probability over a threshold grid
    Outage {
        #[command(flatten)]
        branches: BranchArgs,
        #[arg(long, allow_hyphen_values = true)]
        grid: Grid,
    },
    /// Average BER against per-branch SNR
    Ber {
        #[command(flatten)]
        branches: BranchArgs,
        /// cbfsk, cbpsk, nbfsk, dbpsk or custom(p,q), comma separated
        #[arg(long = "mod", required = true)]
        modulations: String,
        /// SNR grid in dB, start:stop:points
        #[arg(long, allow_hyphen_values = true)]
        snr: Grid,
        /// Read the SNR grid as linear instead of dB
        #[arg(long)]
        linear: bool,
    },
    /// Meijer G / Fox H / H-bar / H-hat function values
    Hfun {
        /// g, h, hbar or hhat
        #[arg(long)]
        kind: String,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        /// Number of upper parameters (checked against --upper)
        #[arg(long)]
        p: Option<usize>,
        /// Number of lower parameters (checked against --lower)
        #[arg(long)]
        q: Option<usize>,
        /// Upper parameter `value[,scale,exponent]`; repeat or separate with ';'
        #[arg(long)]
        upper: Vec<String>,
        /// Lower parameter `value[,scale,exponent]`; repeat or separate with ';'
        #[arg(long)]
        lower: Vec<String>,
        #[arg(long, conflicts_with = "grid", allow_negative_numbers = true)]
        z: Option<f64>,
        /// z grid, start:stop:points
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<Grid>,
    },
    /// Monte Carlo check of the analytic CDF
    Validate {
        #[command(flatten)]
        branches: BranchArgs,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        /// Tabulation points, start:stop:points
        #[arg(long, allow_hyphen_values = true)]
        grid: Grid,
    },
    /// Run a job described by a TOML config file
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

fn invalid(field: &str, message: impl Into<String>) -> ParseError {
    ParseError::Field {
        field: field.into(),
        message: message.into(),
    }
}

/// Splits on commas outside parentheses, so `custom(1,0.5)` stays whole.
fn split_top_level(s: &str) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut depth = 0;
    for c in s.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(String::new());
                continue;
            }
            _ => {}
        }
        out.last_mut().unwrap().push(c);
    }
    out.into_iter().filter(|p| !p.trim().is_empty()).collect()
}

pub fn parse_modulations(s: &str) -> Result<Vec<Modulation>, ParseError> {
    split_top_level(s)
        .iter()
        .map(|m| m.parse().map_err(|e: gammasum::Error| invalid("mod", e.to_string())))
        .collect()
}

fn parse_triplets(field: &str, values: &[String]) -> Result<Vec<[f64; 3]>, ParseError> {
    let mut out = Vec::new();
    for item in values.iter().flat_map(|v| v.split(';')) {
        let nums = item
            .split(',')
            .map(|x| x.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| invalid(field, format!("{item:?}: {e}")))?;
        match nums[..] {
            [v] => out.push([v, 1.0, 1.0]),
            [v, s, e] => out.push([v, s, e]),
            _ => return Err(invalid(field, format!("{item:?}: expected value or value,scale,exponent"))),
        }
    }
    Ok(out)
}

fn branches(b: BranchArgs) -> Branches {
    Branches { m: b.m, omega: b.omega }
}

fn distribution_job(command: Command, b: BranchArgs, grid: Grid) -> JobSpec {
    let mut job = JobSpec::new(command);
    job.branches = Some(branches(b));
    job.grid = Some(grid);
    job
}

impl Cli {
    /// The job to run; config-file values are overridden by flags given
    /// explicitly on the command line.
    pub fn into_job(self) -> Result<JobSpec, ParseError> {
        let mut job = match self.command {
            Cmd::Run { config } => parse_config(&config)?,
            Cmd::Pdf { branches: b, grid } => distribution_job(Command::Pdf, b, grid),
            Cmd::Cdf { branches: b, grid } => distribution_job(Command::Cdf, b, grid),
            Cmd::Outage { branches: b, grid } => distribution_job(Command::Outage, b, grid),
            Cmd::Ber {
                branches: b,
                modulations,
                snr,
                linear,
            } => {
                let mut job = JobSpec::new(Command::Ber);
                job.branches = Some(branches(b));
                job.modulations = parse_modulations(&modulations)?;
                job.grid = Some(snr);
                job.grid_unit = Some(if linear { GridUnit::LinearY } else { GridUnit::SnrDb });
                job
            }
            Cmd::Hfun {
                kind,
                m,
                n,
                p,
                q,
                upper,
                lower,
                z,
                grid,
            } => {
                let kind: Kind = kind.parse().map_err(|e: gammasum::Error| invalid("kind", e.to_string()))?;
                let upper = parse_triplets("upper", &upper)?;
                let lower = parse_triplets("lower", &lower)?;
                if let Some(p) = p.filter(|&p| p != upper.len()) {
                    return Err(invalid("p", format!("--p {p} but {} upper parameters given", upper.len())));
                }
                if let Some(q) = q.filter(|&q| q != lower.len()) {
                    return Err(invalid("q", format!("--q {q} but {} lower parameters given", lower.len())));
                }
                let mut job = JobSpec::new(Command::Hfun);
                job.hfun = Some(HfunSpec {
                    kind,
                    m,
                    n,
                    upper,
                    lower,
                    z,
                });
                job.grid = grid;
                job
            }
            Cmd::Validate {
                branches: b,
                seed,
                samples,
                grid,
            } => {
                let mut job = JobSpec::new(Command::Validate);
                job.branches = Some(branches(b));
                job.seed = Some(seed);
                job.samples = samples;
                job.grid = Some(grid);
                job
            }
        };
        let c = self.common;
        if let Some(f) = c.format {
            job.format = f;
        }
        if c.output.is_some() {
            job.output = c.output;
        }
        if let Some(v) = c.rel_tol {
            job.tolerances.rel_tol = v;
        }
        if let Some(v) = c.abs_tol {
            job.tolerances.abs_tol = v;
        }
        if let Some(v) = c.max_refinements {
            job.tolerances.max_refinements = v;
        }
        job.tolerances.force_general |= c.force_general;
        job.fill_defaults();
        job.validate()?;
        Ok(job)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn custom_modulation_keeps_its_comma() {
        let m = parse_modulations("cbpsk,custom(1,0.5),DBPSK").unwrap();
        assert_eq!(m.len(), 3);
        assert_eq!((m[1].p, m[1].q), (1.0, 0.5));
        assert!(parse_modulations("qpsk").is_err());
    }

    #[test]
    fn triplets() {
        let t = parse_triplets("lower", &["0,1,1;0.5".into()]).unwrap();
        assert_eq!(t, vec![[0.0, 1.0, 1.0], [0.5, 1.0, 1.0]]);
        assert!(parse_triplets("lower", &["0,1".into()]).is_err());
    }
}
