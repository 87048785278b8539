//! Evaluates a job into a table of rows in grid order.

use gammasum::fox_h::eval_h;
use gammasum::gamma_sum::{cdf_with, pdf_with, Estimate};
use gammasum::mellin_barnes::default_contour;
use gammasum::monte_carlo::{empirical_cdf_table, SimConfig};
use gammasum::mrc::{ber_detailed, outage_with, Modulation, ModulationKind};
use rayon::prelude::*;
use thiserror::Error;

use crate::job::{Command, GridUnit, JobSpec, ParseError};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Usage(String),
    #[error("at {axis} = {at}: {source}")]
    Numeric {
        axis: &'static str,
        at: f64,
        source: gammasum::Error,
    },
    #[error(transparent)]
    Numerics(#[from] gammasum::Error),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    /// 2 for numerical failures, 3 for bad input.
    pub fn exit_code(&self) -> i32 {
        use gammasum::Error as E;
        let numeric = |e: &E| {
            matches!(
                e,
                E::NoConvergence { .. } | E::NonReal { .. } | E::OracleDiverged { .. }
            )
        };
        match self {
            RunError::Numeric { source, .. } if numeric(source) => 2,
            RunError::Numerics(e) if numeric(e) => 2,
            _ => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Extra scalars reported after the rows (KS statistic for `validate`).
    pub summary: Vec<(String, f64)>,
}

fn column_name(m: &Modulation) -> String {
    match m.kind {
        ModulationKind::Custom => format!("ber_custom_{}_{}", m.p, m.q),
        _ => format!("ber_{}", m.name()),
    }
}

fn rows_over<F>(xs: &[f64], axis: &'static str, f: F) -> Result<Vec<Vec<f64>>, RunError>
where
    F: Fn(f64) -> gammasum::Result<Vec<f64>> + Sync,
{
    xs.par_iter()
        .map(|&x| {
            let mut row = vec![x];
            row.extend(f(x).map_err(|source| RunError::Numeric { axis, at: x, source })?);
            Ok(row)
        })
        .collect()
}

fn estimate_row(e: Estimate) -> Vec<f64> {
    vec![e.value, e.est_abs_error]
}

pub fn execute(job: &JobSpec) -> Result<Table, RunError> {
    job.validate()?;
    let opts = job.tolerances.eval_options();
    let grid = job.grid.map(|g| g.values()).unwrap_or_default();
    let cols = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    let table = match job.command {
        Command::Pdf | Command::Cdf | Command::Outage => {
            let params = job.branches.as_ref().expect("validated").params()?;
            let (x, f): (&str, fn(_, _, _) -> _) = match job.command {
                Command::Pdf => ("y", pdf_with),
                Command::Cdf => ("y", cdf_with),
                _ => ("y_th", outage_with),
            };
            Table {
                columns: cols(&[x, "value", "est_abs_error"]),
                rows: rows_over(&grid, "y", |y| f(&params, y, &opts).map(estimate_row))?,
                summary: vec![],
            }
        }
        Command::Ber => {
            let branches = job.branches.as_ref().expect("validated");
            let (axis, to_linear): (&str, fn(f64) -> f64) = match job.unit() {
                GridUnit::SnrDb => ("snr_db", |s| 10f64.powf(s / 10.0)),
                GridUnit::LinearY => ("snr", |s| s),
            };
            let mut columns = vec![axis.to_string()];
            columns.extend(job.modulations.iter().map(column_name));
            let rows = rows_over(&grid, "snr", |s| {
                let params = branches.scaled(to_linear(s))?;
                job.modulations
                    .iter()
                    .map(|&m| ber_detailed(&params, m, &opts).map(|b| b.value))
                    .collect()
            })?;
            Table {
                columns,
                rows,
                summary: vec![],
            }
        }
        Command::Hfun => {
            let zs = match job.hfun.as_ref().and_then(|h| h.z) {
                Some(z) => vec![z],
                None => grid,
            };
            let rows = rows_over(&zs, "z", |z| {
                let spec = job.hfun_spec(z)?;
                let mut contour = default_contour(&spec.terms(), spec.log_z)?
                    .with_tolerances(job.tolerances.rel_tol, job.tolerances.abs_tol);
                contour.max_refinements = job.tolerances.max_refinements;
                let r = eval_h(&spec, Some(&contour))?;
                Ok(vec![r.value, r.est_abs_error])
            })?;
            Table {
                columns: cols(&["z", "value", "est_abs_error"]),
                rows,
                summary: vec![],
            }
        }
        Command::Validate => {
            let params = job.branches.as_ref().expect("validated").params()?;
            let g = job.grid.expect("validated");
            let cfg = SimConfig {
                n_samples: job.samples,
                seed: job.seed.expect("validated"),
                histogram_bins: g.points - 1,
                y_range: Some((g.start, g.stop)),
            };
            let (rows, ks) = empirical_cdf_table(&params, &cfg)?;
            Table {
                columns: cols(&["y", "empirical", "analytic", "abs_diff"]),
                rows: rows
                    .iter()
                    .map(|r| vec![r.y, r.empirical, r.analytic, (r.empirical - r.analytic).abs()])
                    .collect(),
                summary: vec![("ks".into(), ks), ("n".into(), job.samples as f64)],
            }
        }
    };
    Ok(table)
}
