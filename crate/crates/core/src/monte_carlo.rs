//! Monte Carlo reference for the combined SNR and the MRC bit error rate.
//!
//! Samples are generated in fixed-size chunks, each from its own ChaCha8
//! stream keyed by `(seed, branch, chunk)`, so results do not depend on the
//! number of threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gamma_sum::{cdf_with, pdf_with, Branch, BranchParams, EvalOptions};
use crate::mrc::{cep, Modulation};

const CHUNK: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub n_samples: usize,
    pub seed: u64,
    pub histogram_bins: usize,
    /// Range of the tabulated CDF; `None` uses `[0, mean + 6 sd]`.
    pub y_range: Option<(f64, f64)>,
}

impl SimConfig {
    pub fn new(n_samples: usize, seed: u64) -> Self {
        SimConfig {
            n_samples,
            seed,
            histogram_bins: 50,
            y_range: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::invalid("n_samples must be at least 1"));
        }
        if self.histogram_bins == 0 {
            return Err(Error::invalid("histogram_bins must be at least 1"));
        }
        if let Some((a, b)) = self.y_range {
            if !(a.is_finite() && b.is_finite() && a >= 0.0 && a < b) {
                return Err(Error::invalid(format!("invalid y_range ({a}, {b})")));
            }
        }
        Ok(())
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn substream(seed: u64, branch: usize, chunk: usize) -> ChaCha8Rng {
    let key = splitmix64(seed ^ splitmix64(chunk as u64));
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(branch as u64);
    rng
}

fn gamma_dist(m: f64, omega: f64) -> Result<Gamma<f64>> {
    if !(m > 0.0 && omega > 0.0 && m.is_finite() && omega.is_finite()) {
        return Err(Error::invalid(format!("need m > 0 and omega > 0, got {m}, {omega}")));
    }
    Gamma::new(m, omega / m).map_err(|e| Error::invalid(e.to_string()))
}

fn chunks(n: usize) -> impl IndexedParallelIterator<Item = (usize, usize)> {
    let count = n.div_ceil(CHUNK);
    (0..count).into_par_iter().map(move |c| (c, CHUNK.min(n - c * CHUNK)))
}

/// `n` i.i.d. Gamma(shape `m`, scale `omega / m`) variates.
pub fn sample_gamma(m: f64, omega: f64, n: usize, seed: u64) -> Result<Vec<f64>> {
    let dist = gamma_dist(m, omega)?;
    Ok(chunks(n)
        .flat_map_iter(|(c, len)| {
            let mut rng = substream(seed, 0, c);
            (0..len).map(move |_| dist.sample(&mut rng)).collect::<Vec<_>>()
        })
        .collect())
}

/// `n` samples of `Y = Σ γ_l`.
pub fn sample_sum(params: &BranchParams, n: usize, seed: u64) -> Result<Vec<f64>> {
    let dists = params
        .branches()
        .iter()
        .map(|b| gamma_dist(b.m, b.omega))
        .collect::<Result<Vec<_>>>()?;
    Ok(chunks(n)
        .flat_map_iter(|(c, len)| {
            let mut acc = vec![0.0; len];
            for (l, d) in dists.iter().enumerate() {
                let mut rng = substream(seed, l, c);
                for v in acc.iter_mut() {
                    *v += d.sample(&mut rng);
                }
            }
            acc
        })
        .collect())
}

/// Analytic CDF on `[lo, hi]` as a piecewise cubic Hermite interpolant of
/// the CDF and the density.
struct CdfInterpolant {
    nodes: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl CdfInterpolant {
    fn new(params: &BranchParams, lo: f64, hi: f64) -> Result<Self> {
        const UNIFORM: usize = 512;
        const GEOMETRIC: usize = 64;
        let lo = lo.max(1e-300);
        let mut nodes: Vec<f64> = (0..=UNIFORM)
            .map(|i| lo + (hi - lo) * i as f64 / UNIFORM as f64)
            .chain((0..=GEOMETRIC).map(|i| lo * (hi / lo).powf(i as f64 / GEOMETRIC as f64)))
            .filter(|y| *y >= lo && *y <= hi)
            .collect();
        nodes.sort_by(f64::total_cmp);
        nodes.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
        let opts = EvalOptions::default();
        let evals = nodes
            .par_iter()
            .map(|&y| Ok((cdf_with(params, y, &opts)?.value, pdf_with(params, y, &opts)?.value)))
            .collect::<Result<Vec<_>>>()?;
        let (values, slopes) = evals.into_iter().unzip();
        Ok(CdfInterpolant { nodes, values, slopes })
    }

    fn eval(&self, y: f64) -> f64 {
        let n = &self.nodes;
        if y <= n[0] {
            return self.values[0];
        }
        if y >= n[n.len() - 1] {
            return self.values[n.len() - 1];
        }
        let i = n.partition_point(|&v| v <= y) - 1;
        let h = n[i + 1] - n[i];
        let t = (y - n[i]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let v = (2.0 * t3 - 3.0 * t2 + 1.0) * self.values[i]
            + (t3 - 2.0 * t2 + t) * h * self.slopes[i]
            + (-2.0 * t3 + 3.0 * t2) * self.values[i + 1]
            + (t3 - t2) * h * self.slopes[i + 1];
        v.clamp(0.0, 1.0)
    }
}

fn ks_sorted(sorted: &[f64], cdf: impl Fn(f64) -> f64 + Sync) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .par_iter()
        .enumerate()
        .map(|(i, &y)| {
            let f = cdf(y);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .reduce(|| 0.0, f64::max)
}

/// Kolmogorov-Smirnov distance between `samples` and a CDF.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64 + Sync) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.par_sort_unstable_by(f64::total_cmp);
    ks_sorted(&sorted, cdf)
}

/// KS distance between `samples` and the analytic CDF of `params`.
pub fn ks_against_model(samples: &[f64], params: &BranchParams) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::invalid("no samples"));
    }
    let mut sorted = samples.to_vec();
    sorted.par_sort_unstable_by(f64::total_cmp);
    ks_model_sorted(&sorted, params)
}

fn ks_model_sorted(sorted: &[f64], params: &BranchParams) -> Result<f64> {
    let interp = CdfInterpolant::new(params, sorted[0], sorted[sorted.len() - 1])?;
    Ok(ks_sorted(sorted, |y| interp.eval(y)))
}

/// KS distance between simulated `Y` and the analytic CDF, and the sample
/// count.
pub fn empirical_cdf_distance(params: &BranchParams, cfg: &SimConfig) -> Result<(f64, usize)> {
    cfg.validate()?;
    let samples = sample_sum(params, cfg.n_samples, cfg.seed)?;
    Ok((ks_against_model(&samples, params)?, samples.len()))
}

/// One row of an empirical-versus-analytic CDF table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdfRow {
    pub y: f64,
    pub empirical: f64,
    pub analytic: f64,
}

/// Empirical and analytic CDF at `histogram_bins + 1` equally spaced points
/// of `y_range`, plus the KS distance.
pub fn empirical_cdf_table(params: &BranchParams, cfg: &SimConfig) -> Result<(Vec<CdfRow>, f64)> {
    cfg.validate()?;
    let mut sorted = sample_sum(params, cfg.n_samples, cfg.seed)?;
    sorted.par_sort_unstable_by(f64::total_cmp);
    let (lo, hi) = cfg
        .y_range
        .unwrap_or((0.0, params.mean() + 6.0 * params.variance().sqrt()));
    let n = sorted.len() as f64;
    let opts = EvalOptions::default();
    let rows = (0..=cfg.histogram_bins)
        .into_par_iter()
        .map(|i| {
            let y = lo + (hi - lo) * i as f64 / cfg.histogram_bins as f64;
            let empirical = sorted.partition_point(|&v| v <= y) as f64 / n;
            let analytic = cdf_with(params, y, &opts)?.value;
            Ok(CdfRow { y, empirical, analytic })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((rows, ks_model_sorted(&sorted, params)?))
}

/// BER by averaging the conditional error probability over simulated SNRs.
/// Returns the estimate and its standard error.
pub fn simulate_ber(params: &BranchParams, modulation: Modulation, cfg: &SimConfig) -> Result<(f64, f64)> {
    cfg.validate()?;
    let samples = sample_sum(params, cfg.n_samples, cfg.seed)?;
    let values: Vec<f64> = samples.par_iter().map(|&y| cep(modulation, y)).collect();
    Ok(mean_and_stderr(&values))
}

/// BER by importance sampling: each branch is drawn from the exponentially
/// tilted law `Gamma(m, θ / (1 + t θ))`, `θ = Ω / m`, and the conditional
/// error is weighted by `∏ (1 + t θ_l)^{-m_l} e^{t Y}`. `tilt = 0` is
/// [`simulate_ber`]. A tilt near `q` keeps the relative error bounded deep
/// in the tail, where plain sampling never visits the small SNRs that
/// dominate the BER.
pub fn simulate_ber_tilted(
    params: &BranchParams,
    modulation: Modulation,
    cfg: &SimConfig,
    tilt: f64,
) -> Result<(f64, f64)> {
    cfg.validate()?;
    if !(tilt >= 0.0 && tilt.is_finite()) {
        return Err(Error::invalid(format!("tilt must be non-negative, got {tilt}")));
    }
    let tilted: Vec<Branch> = params
        .branches()
        .iter()
        .map(|b| Branch {
            m: b.m,
            omega: b.omega / (1.0 + tilt * b.omega / b.m),
        })
        .collect();
    let log_mgf: f64 = params
        .branches()
        .iter()
        .map(|b| -b.m * (tilt * b.omega / b.m).ln_1p())
        .sum();
    let samples = sample_sum(&BranchParams::new(tilted)?, cfg.n_samples, cfg.seed)?;
    let values: Vec<f64> = samples
        .par_iter()
        .map(|&y| cep(modulation, y) * (log_mgf + tilt * y).exp())
        .collect();
    Ok(mean_and_stderr(&values))
}

// Two-pass mean and standard error with per-chunk partial sums reduced in
// chunk order, so the result does not depend on the thread count.
fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let sum = |f: &(dyn Fn(f64) -> f64 + Sync)| -> f64 {
        let partial: Vec<f64> = values.par_chunks(CHUNK).map(|c| c.iter().map(|&v| f(v)).sum()).collect();
        partial.iter().sum()
    };
    let mean = sum(&|v| v) / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = sum(&|v| (v - mean) * (v - mean)) / (n - 1.0);
    (mean, (var / n).sqrt())
}
