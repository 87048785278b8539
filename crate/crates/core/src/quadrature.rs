//! Globally adaptive Gauss-Kronrod (G10/K21) quadrature for complex-valued
//! integrands over a set of unit pieces.
//!
//! The integrand is addressed as `f(piece, tau)` with `tau` in `[0, 1]`, so a
//! path made of several segments (or mapped half-lines) is integrated with a
//! single global error budget: the interval with the largest error estimate is
//! bisected first, whichever piece it belongs to.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::complex_gamma::Complex;
use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_478_310,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Number of integrand evaluations per interval.
pub const EVALS_PER_INTERVAL: usize = 21;

/// Stopping rule for [`integrate_pieces`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Complex,
    pub abs_error: f64,
    /// Integral of `|f|`, used for roundoff floors.
    pub abs_integral: f64,
    pub n_evals: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
struct Interval {
    piece: usize,
    a: f64,
    b: f64,
    value: Complex,
    error: f64,
    abs: f64,
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Interval {}
impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Interval {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F>(f: &F, piece: usize, a: f64, b: f64) -> Result<Interval>
where
    F: Fn(usize, f64) -> Result<Complex>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut fv = [Complex::new(0.0, 0.0); 21];
    for (j, &x) in XGK.iter().enumerate() {
        if j == 10 {
            fv[20] = f(piece, center)?;
        } else {
            fv[2 * j] = f(piece, center - half * x)?;
            fv[2 * j + 1] = f(piece, center + half * x)?;
        }
    }
    for v in &fv {
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::domain(format!(
                "integrand is not finite on piece {piece} near {center}"
            )));
        }
    }
    let mut resk = fv[20] * WGK[10];
    let mut resabs = fv[20].norm() * WGK[10];
    let mut resg = Complex::new(0.0, 0.0);
    for j in 0..10 {
        let pair = fv[2 * j] + fv[2 * j + 1];
        resk += pair * WGK[j];
        resabs += WGK[j] * (fv[2 * j].norm() + fv[2 * j + 1].norm());
        if j % 2 == 1 {
            resg += pair * WG[j / 2];
        }
    }
    let mean = resk * 0.5;
    let mut resasc = WGK[10] * (fv[20] - mean).norm();
    for j in 0..10 {
        resasc += WGK[j] * ((fv[2 * j] - mean).norm() + (fv[2 * j + 1] - mean).norm());
    }
    let scale = half.abs();
    let value = resk * half;
    let resabs = resabs * scale;
    let resasc = resasc * scale;
    let mut error = ((resk - resg) * half).norm();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Ok(Interval {
        piece,
        a,
        b,
        value,
        error,
        abs: resabs,
    })
}

/// Integrate `f(piece, tau)` over `tau in [0, 1]` for each of `pieces`
/// pieces and return the sum.
///
/// Stops when the summed error estimate is below
/// `max(abs_tol, rel_tol * |value|)` or when `max_intervals` intervals are in
/// use; in the latter case `converged` is false.
pub fn integrate_pieces<F>(f: F, pieces: usize, tol: Tolerance) -> Result<QuadResult>
where
    F: Fn(usize, f64) -> Result<Complex>,
{
    let mut heap = BinaryHeap::new();
    let mut n_evals = 0;
    for piece in 0..pieces {
        heap.push(kronrod(&f, piece, 0.0, 1.0)?);
        n_evals += EVALS_PER_INTERVAL;
    }
    // Intervals too short to split further; their error is final.
    let mut frozen: Vec<Interval> = Vec::new();
    let totals = |heap: &BinaryHeap<Interval>, frozen: &[Interval]| {
        let mut value = Complex::new(0.0, 0.0);
        let mut error = 0.0;
        for iv in heap.iter().chain(frozen.iter()) {
            value += iv.value;
            error += iv.error;
        }
        (value, error)
    };
    let (mut value, mut error) = totals(&heap, &frozen);
    let mut converged = false;
    let mut since_resum = 0;
    loop {
        if error <= tol.abs_tol.max(tol.rel_tol * value.norm()) {
            converged = true;
            break;
        }
        if heap.len() + frozen.len() >= tol.max_intervals {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if (worst.b - worst.a) < 1e-14 * worst.a.abs().max(1e-300) || mid <= worst.a || mid >= worst.b {
            frozen.push(worst);
            if heap.is_empty() {
                break;
            }
            continue;
        }
        let left = kronrod(&f, worst.piece, worst.a, mid)?;
        let right = kronrod(&f, worst.piece, mid, worst.b)?;
        n_evals += 2 * EVALS_PER_INTERVAL;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        since_resum += 1;
        if since_resum == 64 {
            (value, error) = totals(&heap, &frozen);
            since_resum = 0;
        }
    }
    let (value, error) = totals(&heap, &frozen);
    let abs_integral = heap.iter().chain(frozen.iter()).map(|iv| iv.abs).sum();
    Ok(QuadResult {
        value,
        abs_error: error,
        abs_integral,
        n_evals,
        converged: converged || error <= tol.abs_tol.max(tol.rel_tol * value.norm()),
    })
}

/// Real integral of `f` over `[a, b]` (finite).
pub fn integrate_real<F>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<(f64, f64, bool)>
where
    F: Fn(f64) -> Result<f64>,
{
    let width = b - a;
    let r = integrate_pieces(
        |_, tau| Ok(Complex::new(f(a + tau * width)? * width, 0.0)),
        1,
        tol,
    )?;
    Ok((r.value.re, r.abs_error, r.converged))
}
