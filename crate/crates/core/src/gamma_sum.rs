//! Distribution of `Y = Σ γ_l` for independent `γ_l ~ Gamma(m_l, Ω_l)`
//! (shape `m_l`, mean `Ω_l`).
//!
//! Both the density and the CDF are inverse Laplace transforms of the
//! product MGF `∏ x_l^{m_l} (x_l + s)^{-m_l}`, `x_l = m_l / Ω_l`, written as
//! Fox H-bar functions of `e^y` (general `m`) or Meijer G functions of `e^{-y}`
//! (integer `m`). Contours pass through the real saddle point of the
//! integrand and bend into the half plane where `e^{sy}` decays.

use serde::{Deserialize, Serialize};

use crate::complex_gamma::ln_gamma;
use crate::error::{Error, Result};
use crate::incomplete_gamma::regularized_lower;
use crate::mellin_barnes::{evaluate, ContourSpec, EvalResult, GammaTermSpec, Integrand, Slot};

/// One diversity branch: fading figure `m` and mean power `omega`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub m: f64,
    pub omega: f64,
}

impl Branch {
    /// `m / Ω`, the rate of the Gamma variate.
    pub fn rate(&self) -> f64 {
        self.m / self.omega
    }
}

/// Validated set of branches.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchParams {
    branches: Vec<Branch>,
    kappa: f64,
    integer: bool,
}

fn is_integer(v: f64) -> bool {
    (v - v.round()).abs() <= 1e-12 * v.abs().max(1.0)
}

impl BranchParams {
    pub fn new(branches: Vec<Branch>) -> Result<Self> {
        if branches.is_empty() {
            return Err(Error::invalid("at least one branch is required"));
        }
        for (l, b) in branches.iter().enumerate() {
            if !(b.m > 0.0 && b.m.is_finite()) {
                return Err(Error::invalid(format!("branch {l}: m must be positive, got {}", b.m)));
            }
            if !(b.omega > 0.0 && b.omega.is_finite()) {
                return Err(Error::invalid(format!(
                    "branch {l}: omega must be positive, got {}",
                    b.omega
                )));
            }
        }
        let kappa = branches.iter().map(|b| b.m).sum();
        let integer = branches.iter().all(|b| is_integer(b.m));
        Ok(BranchParams {
            branches,
            kappa,
            integer,
        })
    }

    /// Pairs `(m_l, Ω_l)`; the slices must have equal length.
    pub fn from_slices(m: &[f64], omega: &[f64]) -> Result<Self> {
        if m.len() != omega.len() {
            return Err(Error::invalid(format!(
                "{} fading figures but {} mean powers",
                m.len(),
                omega.len()
            )));
        }
        Self::new(
            m.iter()
                .zip(omega)
                .map(|(&m, &omega)| Branch { m, omega })
                .collect(),
        )
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    /// `κ = Σ m_l`.
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// All `m_l` are integers.
    pub fn is_integer(&self) -> bool {
        self.integer
    }

    pub fn mean(&self) -> f64 {
        self.branches.iter().map(|b| b.omega).sum()
    }

    pub fn variance(&self) -> f64 {
        self.branches.iter().map(|b| b.omega * b.omega / b.m).sum()
    }

    /// Same fading figures with every `Ω_l` multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(
            self.branches
                .iter()
                .map(|b| Branch {
                    m: b.m,
                    omega: b.omega * c,
                })
                .collect(),
        )
    }

    /// `Σ m_l ln x_l`.
    pub fn log_prefactor(&self) -> f64 {
        self.branches.iter().map(|b| b.m * b.rate().ln()).sum()
    }

    pub(crate) fn min_rate(&self) -> f64 {
        self.branches.iter().map(|b| b.rate()).fold(f64::INFINITY, f64::min)
    }

    pub(crate) fn rates(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.branches.iter().map(|b| (b.m, b.rate()))
    }
}

/// Which representation to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PathChoice {
    /// Meijer G when every `m_l` is an integer, H-bar otherwise.
    #[default]
    Auto,
    /// Always the H-bar form.
    General,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_refinements: u32,
    pub path: PathChoice,
    /// Moves the contour anchor by this fraction of the pole-free window
    /// centred on the default anchor (twice the distance to the nearest
    /// singularity). Zero by default; used for robustness checks.
    pub anchor_shift: f64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            rel_tol: ContourSpec::DEFAULT_REL_TOL,
            abs_tol: ContourSpec::DEFAULT_ABS_TOL,
            max_refinements: ContourSpec::DEFAULT_MAX_REFINEMENTS,
            path: PathChoice::Auto,
            anchor_shift: 0.0,
        }
    }
}

impl EvalOptions {
    pub fn general() -> Self {
        EvalOptions {
            path: PathChoice::General,
            ..Self::default()
        }
    }

    // `window` is the pole-free width around the default anchor.
    pub(crate) fn apply(&self, mut c: ContourSpec, window: f64) -> ContourSpec {
        let shift = self.anchor_shift * window;
        c.anchor += shift;
        c.bend_depth += shift;
        c.rel_tol = self.rel_tol;
        c.abs_tol = self.abs_tol;
        c.max_refinements = self.max_refinements;
        c
    }
}

/// A value with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub est_abs_error: f64,
}

impl From<EvalResult> for Estimate {
    fn from(r: EvalResult) -> Self {
        Estimate {
            value: r.value,
            est_abs_error: r.est_abs_error,
        }
    }
}

/// H-bar parameters of the density: upper `(1 - x_l, 1, m_l)`, lower
/// `(-x_l, 1, m_l)`.
pub fn pdf_terms(params: &BranchParams) -> Vec<GammaTermSpec> {
    let mut terms = Vec::with_capacity(2 * params.len());
    for (m, x) in params.rates() {
        terms.push(GammaTermSpec {
            alpha: 1.0 - x,
            scale: 1.0,
            exponent: m,
            slot: Slot::NumUpper,
        });
    }
    for (m, x) in params.rates() {
        terms.push(GammaTermSpec {
            alpha: -x,
            scale: 1.0,
            exponent: m,
            slot: Slot::DenLower,
        });
    }
    terms
}

/// H-bar parameters of the CDF: the density terms plus `(1, 1, 1)` upper and
/// `(0, 1, 1)` lower, which contribute the factor `1/s`.
pub fn cdf_terms(params: &BranchParams) -> Vec<GammaTermSpec> {
    let mut terms = pdf_terms(params);
    terms.push(GammaTermSpec {
        alpha: 1.0,
        scale: 1.0,
        exponent: 1.0,
        slot: Slot::NumUpper,
    });
    terms.push(GammaTermSpec {
        alpha: 0.0,
        scale: 1.0,
        exponent: 1.0,
        slot: Slot::DenLower,
    });
    terms
}

// Meijer-G parameters for integer m: each branch contributes x_l (lower,
// numerator) and 1 + x_l (upper, denominator) m_l times.
fn integer_terms(params: &BranchParams, with_cdf_pair: bool) -> Vec<GammaTermSpec> {
    let mut terms = Vec::new();
    for (m, x) in params.rates() {
        for _ in 0..m.round() as usize {
            terms.push(GammaTermSpec {
                alpha: x,
                scale: 1.0,
                exponent: 1.0,
                slot: Slot::NumLower,
            });
            terms.push(GammaTermSpec {
                alpha: 1.0 + x,
                scale: 1.0,
                exponent: 1.0,
                slot: Slot::DenUpper,
            });
        }
    }
    if with_cdf_pair {
        terms.push(GammaTermSpec {
            alpha: 0.0,
            scale: 1.0,
            exponent: 1.0,
            slot: Slot::NumLower,
        });
        terms.push(GammaTermSpec {
            alpha: 1.0,
            scale: 1.0,
            exponent: 1.0,
            slot: Slot::DenUpper,
        });
    }
    terms
}

// Root of an increasing function on (lo, hi) by bisection.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn sum_ratio(params: &BranchParams, sigma: f64) -> f64 {
    params.rates().map(|(m, x)| m / (x + sigma)).sum()
}

// Saddle of e^{σy} ∏(x+σ)^{-m} on σ > -x_min.
fn pdf_saddle(params: &BranchParams, y: f64) -> f64 {
    let xmin = params.min_rate();
    let m_near = params
        .rates()
        .filter(|&(_, x)| x == xmin)
        .map(|(m, _)| m)
        .sum::<f64>();
    let lo = m_near / y;
    let hi = params.kappa() / y;
    if hi - lo <= 1e-15 * hi {
        return hi - xmin;
    }
    let u = bisect(|u| y - sum_ratio(params, u - xmin), lo, hi);
    u - xmin
}

fn log_magnitude(params: &BranchParams, y: f64, sigma: f64, with_pole: bool) -> f64 {
    let mut v = sigma * y - params.rates().map(|(m, x)| m * (x + sigma).ln()).sum::<f64>();
    if with_pole {
        v -= sigma.abs().ln();
    }
    v
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum CdfSide {
    // contour right of s = 0: the integral is the CDF
    Right,
    // contour between -x_min and 0: the integral is CDF - 1
    Left,
}

fn cdf_saddle(params: &BranchParams, y: f64) -> (CdfSide, f64) {
    let xmin = params.min_rate();
    let dphi = |s: f64| y - sum_ratio(params, s) - 1.0 / s;
    let right = bisect(dphi, 0.0, (params.kappa() + 1.0) / y);
    let left = bisect(dphi, -xmin, 0.0);
    let phi_r = log_magnitude(params, y, right, true);
    let phi_l = log_magnitude(params, y, left, true);
    if left > -xmin && left < 0.0 && phi_l < phi_r {
        (CdfSide::Left, left)
    } else {
        (CdfSide::Right, right)
    }
}

// Hairpin through the saddle `sigma`, legs running left. `gap` is the
// distance to the nearest singularity.
fn saddle_contour(params: &BranchParams, y: f64, sigma: f64, gap: f64, with_pole: bool) -> ContourSpec {
    let height = 2.0 * gap;
    let mut growth: f64 = params
        .rates()
        .map(|(m, x)| m * ((x + sigma).abs() / height).ln().max(0.0))
        .sum();
    if with_pole {
        growth += (sigma.abs() / height).ln().max(0.0);
    }
    let depth = (40.0 + growth) / y;
    ContourSpec::bent(sigma, sigma - depth).with_height(height)
}

fn mirrored(c: ContourSpec) -> ContourSpec {
    ContourSpec {
        anchor: -c.anchor,
        bend_depth: -c.bend_depth,
        ..c
    }
}

fn check_y(y: f64) -> Result<()> {
    if !(y > 0.0 && y.is_finite()) {
        return Err(Error::domain(format!("density argument must be positive and finite, got {y}")));
    }
    Ok(())
}

fn require_integer(params: &BranchParams) -> Result<()> {
    if !params.is_integer() {
        return Err(Error::domain("integer-m representation needs every m_l to be an integer"));
    }
    Ok(())
}

/// Density of `Y` at `y > 0`.
///
/// ```
/// use gammasum::gamma_sum::{pdf, BranchParams};
/// let p = BranchParams::from_slices(&[1.0, 1.0], &[1.0, 2.0]).unwrap();
/// let v = pdf(&p, 1.0).unwrap();
/// let exact = ((-1.0f64).exp() - (-0.5f64).exp()) / (1.0 - 2.0);
/// assert!((v - exact).abs() < 1e-9);
/// ```
pub fn pdf(params: &BranchParams, y: f64) -> Result<f64> {
    pdf_with(params, y, &EvalOptions::default()).map(|e| e.value)
}

pub fn pdf_with(params: &BranchParams, y: f64, opts: &EvalOptions) -> Result<Estimate> {
    if opts.path == PathChoice::Auto && params.is_integer() {
        pdf_integer_with(params, y, opts)
    } else {
        pdf_general(params, y, opts)
    }
}

/// H-bar representation, valid for all `m_l > 0`.
pub fn pdf_general(params: &BranchParams, y: f64, opts: &EvalOptions) -> Result<Estimate> {
    Ok(pdf_general_detailed(params, y, opts)?.into())
}

/// As [`pdf_general`], returning the contour diagnostics.
pub fn pdf_general_detailed(params: &BranchParams, y: f64, opts: &EvalOptions) -> Result<EvalResult> {
    check_y(y)?;
    let sigma = pdf_saddle(params, y);
    let gap = sigma + params.min_rate();
    let contour = opts.apply(saddle_contour(params, y, sigma, gap, false), 2.0 * gap);
    let f = Integrand::compile(&pdf_terms(params), y, params.log_prefactor());
    evaluate(&f, &contour)
}

/// Meijer-G representation for integer `m_l`.
pub fn pdf_integer(params: &BranchParams, y: f64) -> Result<f64> {
    pdf_integer_with(params, y, &EvalOptions::default()).map(|e| e.value)
}

pub fn pdf_integer_with(params: &BranchParams, y: f64, opts: &EvalOptions) -> Result<Estimate> {
    require_integer(params)?;
    check_y(y)?;
    let sigma = pdf_saddle(params, y);
    let gap = sigma + params.min_rate();
    let contour = opts.apply(mirrored(saddle_contour(params, y, sigma, gap, false)), 2.0 * gap);
    let f = Integrand::compile(&integer_terms(params, false), -y, params.log_prefactor());
    Ok(evaluate(&f, &contour)?.into())
}

/// `P(Y <= y)`.
///
/// ```
/// use gammasum::gamma_sum::{cdf, BranchParams};
/// let p = BranchParams::from_slices(&[1.0, 1.0], &[1.0, 1.0]).unwrap();
/// let v = cdf(&p, 2.0).unwrap();
/// assert!((v - (1.0 - 3.0 * (-2.0f64).exp())).abs() < 1e-9);
/// ```
pub fn cdf(params: &BranchParams, y: f64) -> Result<f64> {
    cdf_with(params, y, &EvalOptions::default()).map(|e| e.value)
}

pub fn cdf_with(params: &BranchParams, y: f64, opts: &EvalOptions) -> Result<Estimate> {
    if opts.path == PathChoice::Auto && params.is_integer() {
        cdf_integer_with(params, y, opts)
    } else {
        cdf_general(params, y, opts)
    }
}

fn check_cdf_y(y: f64) -> Result<Option<Estimate>> {
    if y.is_nan() || y < 0.0 {
        return Err(Error::domain(format!("CDF argument must be non-negative, got {y}")));
    }
    if y == 0.0 {
        return Ok(Some(Estimate {
            value: 0.0,
            est_abs_error: 0.0,
        }));
    }
    if y.is_infinite() {
        return Ok(Some(Estimate {
            value: 1.0,
            est_abs_error: 0.0,
        }));
    }
    Ok(None)
}

fn clamp(e: Estimate) -> Estimate {
    Estimate {
        value: e.value.clamp(0.0, 1.0),
        ..e
    }
}

/// H-bar representation of the CDF.
///
/// When the integrand is smaller on the far side of the pole at `s = 0`, the
/// contour runs between `-min x_l` and `0` and the result is `1 + integral`.
pub fn cdf_general(params: &BranchParams, y: f64, opts: &EvalOptions) -> Result<Estimate> {
    if let Some(e) = check_cdf_y(y)? {
        return Ok(e);
    }
    let (side, sigma) = cdf_saddle(params, y);
    let gap = match side {
        CdfSide::Right => sigma,
        CdfSide::Left => (-sigma).min(sigma + params.min_rate()),
    };
    let contour = opts.apply(saddle_contour(params, y, sigma, gap, true), 2.0 * gap);
    let f = Integrand::compile(&cdf_terms(params), y, params.log_prefactor());
    let r = evaluate(&f, &contour)?;
    let value = match side {
        CdfSide::Right => r.value,
        CdfSide::Left => 1.0 + r.value,
    };
    Ok(clamp(Estimate {
        value,
        est_abs_error: r.est_abs_error,
    }))
}

/// Meijer-G representation of the CDF for integer `m_l`, on the standard
/// contour (all poles of the `1/s` factor and the branches on one side).
pub fn cdf_integer(params: &BranchParams, y: f64) -> Result<f64> {
    cdf_integer_with(params, y, &EvalOptions::default()).map(|e| e.value)
}

pub fn cdf_integer_with(params: &BranchParams, y: f64, opts: &EvalOptions) -> Result<Estimate> {
    require_integer(params)?;
    if let Some(e) = check_cdf_y(y)? {
        return Ok(e);
    }
    let dphi = |s: f64| y - sum_ratio(params, s) - 1.0 / s;
    let sigma = bisect(dphi, 0.0, (params.kappa() + 1.0) / y);
    let contour = opts.apply(mirrored(saddle_contour(params, y, sigma, sigma, true)), 2.0 * sigma);
    let f = Integrand::compile(&integer_terms(params, true), -y, params.log_prefactor());
    Ok(clamp(evaluate(&f, &contour)?.into()))
}

/// CDF of a single Gamma variate, `P(m, m γ / Ω)`.
pub fn cdf_single(m: f64, omega: f64, gamma: f64) -> Result<f64> {
    if !(m > 0.0 && omega > 0.0) {
        return Err(Error::invalid(format!("need m > 0 and omega > 0, got {m}, {omega}")));
    }
    if gamma.is_nan() || gamma < 0.0 {
        return Err(Error::domain(format!("CDF argument must be non-negative, got {gamma}")));
    }
    Ok(regularized_lower(m, m * gamma / omega))
}

/// Series oracle for the density (confluent Lauricella form), `L <= 3`.
///
/// Returns the truncated sum and a geometric bound on the neglected terms.
pub fn pdf_lauricella_oracle(params: &BranchParams, y: f64, max_terms: usize) -> Result<(f64, f64)> {
    if params.len() > 3 {
        return Err(Error::invalid("the series oracle supports at most three branches"));
    }
    check_y(y)?;
    let kappa = params.kappa();
    // Per-branch coefficients (m)_i (-x y)^i / i!, convolved term by term.
    let series: Vec<(f64, f64)> = params.rates().map(|(m, x)| (m, -x * y)).collect();
    let coeff = |m: f64, z: f64, n: usize| -> Vec<f64> {
        let mut c = Vec::with_capacity(n);
        let mut v = 1.0;
        for i in 0..n {
            c.push(v);
            v *= (m + i as f64) * z / (i as f64 + 1.0);
        }
        c
    };
    let mut conv = coeff(series[0].0, series[0].1, max_terms);
    for &(m, z) in &series[1..] {
        let c = coeff(m, z, max_terms);
        let mut next = vec![0.0; max_terms];
        for (n, slot) in next.iter_mut().enumerate() {
            *slot = (0..=n).map(|i| conv[i] * c[n - i]).sum();
        }
        conv = next;
    }
    let mut sum = 0.0;
    let mut poch = 1.0; // (κ)_n
    let mut prev = f64::INFINITY;
    let mut converged_at = None;
    for (n, c) in conv.iter().enumerate() {
        let term = c / poch;
        sum += term;
        poch *= kappa + n as f64;
        let mag = term.abs();
        if n > 4 && mag <= 1e-17 * sum.abs() && mag <= prev {
            converged_at = Some((n, mag, prev));
            break;
        }
        prev = mag.max(1e-300);
    }
    let Some((_, last, before)) = converged_at else {
        return Err(Error::OracleDiverged {
            terms: max_terms,
            last_term: conv.last().copied().unwrap_or(f64::NAN),
        });
    };
    let r = (last / before).min(0.99);
    let tail = last * r / (1.0 - r);
    let log_scale = (kappa - 1.0) * y.ln() + params.log_prefactor() - ln_gamma(kappa);
    let scale = log_scale.exp();
    Ok((scale * sum, scale * tail))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bp(m: &[f64], o: &[f64]) -> BranchParams {
        BranchParams::from_slices(m, o).unwrap()
    }

    #[test]
    fn rejects_bad_branches() {
        assert!(BranchParams::from_slices(&[1.0, -1.0], &[1.0, 1.0]).is_err());
        assert!(BranchParams::from_slices(&[1.0], &[0.0]).is_err());
        assert!(BranchParams::from_slices(&[], &[]).is_err());
        assert!(BranchParams::from_slices(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn integer_flag() {
        assert!(bp(&[1.0, 3.0], &[1.0, 2.0]).is_integer());
        assert!(!bp(&[1.0, 2.5], &[1.0, 2.0]).is_integer());
        assert_eq!(bp(&[1.0, 2.5], &[1.0, 2.0]).kappa(), 3.5);
    }

    #[test]
    fn saddle_solves_stationarity() {
        let p = bp(&[0.6, 1.1, 2.0], &[1.0, 1.0, 1.0]);
        for y in [0.01, 0.5, 3.0, 40.0, 900.0] {
            let s = pdf_saddle(&p, y);
            assert!(s > -p.min_rate());
            assert!((sum_ratio(&p, s) - y).abs() < 1e-10 * y);
        }
    }

    #[test]
    fn domain_errors() {
        let p = bp(&[1.0], &[1.0]);
        assert!(matches!(pdf(&p, 0.0), Err(Error::Domain(_))));
        assert!(matches!(pdf(&p, -1.0), Err(Error::Domain(_))));
        assert_eq!(cdf(&p, 0.0).unwrap(), 0.0);
        assert!(cdf(&p, -0.5).is_err());
        assert!(pdf_integer(&bp(&[1.5], &[1.0]), 1.0).is_err());
    }

    #[test]
    fn exponential() {
        let p = bp(&[1.0], &[1.0]);
        let e = pdf_general(&p, 1.0, &EvalOptions::default()).unwrap();
        assert!((e.value - (-1f64).exp()).abs() < 1e-10);
        let c = cdf_general(&p, 1.0, &EvalOptions::default()).unwrap();
        assert!((c.value - (1.0 - (-1f64).exp())).abs() < 1e-10);
    }
}
