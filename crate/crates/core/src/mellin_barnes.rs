//! Mellin-Barnes integrals `(1/2πi) ∫_C M(s) z^s ds` where `M` is a product
//! of real powers of Gamma functions with arguments linear in `s`.
//!
//! Contours are either a vertical line through `anchor` (with the two
//! half-line tails integrated after the substitution `t = T/u`) or a hairpin
//! that leaves the vertical segment at `±iT` and runs horizontally to
//! `bend_depth`, beyond which the neglected part is estimated by sampling.

use std::f64::consts::PI;

use crate::complex_gamma::{log_gamma, Complex};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_pieces, Tolerance};

/// Position of a Gamma term in the integrand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Slot {
    /// `Γ(1 - α + A s)^a`
    NumUpper,
    /// `Γ(β - B s)^b`
    NumLower,
    /// `1 / Γ(α - A s)^a`
    DenUpper,
    /// `1 / Γ(1 - β + B s)^b`
    DenLower,
}

impl Slot {
    pub fn is_numerator(self) -> bool {
        matches!(self, Slot::NumUpper | Slot::NumLower)
    }
}

/// One `(α, A, a)` or `(β, B, b)` triplet together with its slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaTermSpec {
    pub alpha: f64,
    pub scale: f64,
    pub exponent: f64,
    pub slot: Slot,
}

impl GammaTermSpec {
    pub fn new(slot: Slot, alpha: f64, scale: f64, exponent: f64) -> Result<Self> {
        let t = GammaTermSpec {
            alpha,
            scale,
            exponent,
            slot,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.alpha.is_finite() {
            return Err(Error::invalid(format!("term offset must be finite, got {}", self.alpha)));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::invalid(format!("term scale must be positive, got {}", self.scale)));
        }
        if !(self.exponent > 0.0 && self.exponent.is_finite()) {
            return Err(Error::invalid(format!(
                "term exponent must be positive, got {}",
                self.exponent
            )));
        }
        Ok(())
    }

    /// `(offset, coefficient)` of the Gamma argument `offset + coefficient * s`.
    pub fn linear_form(&self) -> (f64, f64) {
        match self.slot {
            Slot::NumUpper => (1.0 - self.alpha, self.scale),
            Slot::NumLower => (self.alpha, -self.scale),
            Slot::DenUpper => (self.alpha, -self.scale),
            Slot::DenLower => (1.0 - self.alpha, self.scale),
        }
    }

    pub fn argument(&self, s: Complex) -> Complex {
        let (c, k) = self.linear_form();
        s * k + c
    }

    fn signed_exponent(&self) -> f64 {
        if self.slot.is_numerator() {
            self.exponent
        } else {
            -self.exponent
        }
    }
}

/// The integrand `M(s) z^s`, evaluated directly from log-Gamma.
///
/// ```
/// use gammasum::mellin_barnes::{integrand, GammaTermSpec, Slot};
/// use gammasum::complex_gamma::Complex;
/// let t = GammaTermSpec::new(Slot::NumLower, 0.0, 1.0, 1.0).unwrap();
/// let v = integrand(&[t], 1.0, Complex::new(-0.5, 0.0)).unwrap();
/// assert!((v.re - std::f64::consts::PI.sqrt()).abs() < 1e-14);
/// ```
pub fn integrand(terms: &[GammaTermSpec], z: f64, s: Complex) -> Result<Complex> {
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::domain(format!("argument z must be positive, got {z}")));
    }
    let mut acc = s * z.ln();
    for t in terms {
        t.validate()?;
        acc += log_gamma(t.argument(s))? * t.signed_exponent();
    }
    Ok(acc.exp())
}

/// Open interval of real abscissae separating the poles of the numerator
/// Gamma terms.
///
/// `lower`/`upper` always hold finite values; when one side has no poles the
/// value is a fallback offset from the other side and the matching
/// `pole_*` field is `None`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleStrip {
    pub lower: f64,
    pub upper: f64,
    pub pole_lower: Option<f64>,
    pub pole_upper: Option<f64>,
}

impl PoleStrip {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    /// Whether a vertical line at `anchor` separates the two pole families.
    pub fn admits(&self, anchor: f64) -> bool {
        self.pole_lower.map_or(true, |l| anchor > l) && self.pole_upper.map_or(true, |u| anchor < u)
    }

    /// The strip in the reflected variable `s -> -s`.
    pub fn reflected(&self) -> (f64, f64) {
        (-self.upper, -self.lower)
    }
}

/// Pole strip of a term list.
///
/// `NumUpper` terms have poles at `s = (α - 1 - k)/A` (to the left),
/// `NumLower` terms at `s = (β + k)/B` (to the right), `k = 0, 1, ...`.
///
/// ```
/// use gammasum::mellin_barnes::{pole_strip, GammaTermSpec, Slot};
/// let terms = [
///     GammaTermSpec::new(Slot::NumLower, 1.0, 1.0, 1.0).unwrap(),
///     GammaTermSpec::new(Slot::NumUpper, 0.0, 1.0, 1.0).unwrap(),
/// ];
/// let strip = pole_strip(&terms).unwrap();
/// assert_eq!((strip.lower, strip.upper), (-1.0, 1.0));
/// ```
pub fn pole_strip(terms: &[GammaTermSpec]) -> Result<PoleStrip> {
    let mut lo: Option<f64> = None;
    let mut hi: Option<f64> = None;
    for t in terms {
        t.validate()?;
        match t.slot {
            Slot::NumUpper => {
                let p = (t.alpha - 1.0) / t.scale;
                lo = Some(lo.map_or(p, |l| l.max(p)));
            }
            Slot::NumLower => {
                let p = t.alpha / t.scale;
                hi = Some(hi.map_or(p, |h| h.min(p)));
            }
            _ => {}
        }
    }
    let (lower, upper) = match (lo, hi) {
        (Some(l), Some(h)) => (l, h),
        (Some(l), None) => (l, l + 1.0),
        (None, Some(h)) => (h - 0.1, h),
        (None, None) => {
            return Err(Error::invalid(
                "no numerator Gamma terms: the contour position is undetermined",
            ))
        }
    };
    if lower >= upper {
        return Err(Error::InconsistentCoefficients { lower, upper });
    }
    Ok(PoleStrip {
        lower,
        upper,
        pole_lower: lo,
        pole_upper: hi,
    })
}

/// How the parts of a straight contour beyond `|Im s| = height` are handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TailMode {
    /// Integrate them after mapping `t = height / u`.
    #[default]
    Integrate,
    /// Drop them and report their estimate as error.
    Truncate,
}

/// Integration path and stopping rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourSpec {
    pub anchor: f64,
    pub height: f64,
    /// Real part reached by the horizontal legs; equal to `anchor` for a
    /// straight contour.
    pub bend_depth: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_refinements: u32,
    pub tails: TailMode,
}

impl ContourSpec {
    pub const DEFAULT_HEIGHT: f64 = 100.0;
    pub const DEFAULT_BEND: f64 = 49.0;
    pub const DEFAULT_REL_TOL: f64 = 1e-9;
    pub const DEFAULT_ABS_TOL: f64 = 1e-12;
    pub const DEFAULT_MAX_REFINEMENTS: u32 = 12;

    pub fn straight(anchor: f64) -> Self {
        ContourSpec {
            anchor,
            height: Self::DEFAULT_HEIGHT,
            bend_depth: anchor,
            rel_tol: Self::DEFAULT_REL_TOL,
            abs_tol: Self::DEFAULT_ABS_TOL,
            max_refinements: Self::DEFAULT_MAX_REFINEMENTS,
            tails: TailMode::Integrate,
        }
    }

    pub fn bent(anchor: f64, bend_depth: f64) -> Self {
        ContourSpec {
            bend_depth,
            ..Self::straight(anchor)
        }
    }

    pub fn with_height(mut self, height: f64) -> Self {
        self.height = height;
        self
    }

    pub fn with_tolerances(mut self, rel_tol: f64, abs_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }

    pub fn is_straight(&self) -> bool {
        self.bend_depth == self.anchor
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.anchor, self.height, self.bend_depth, self.rel_tol, self.abs_tol]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::invalid("contour parameters must be finite"));
        }
        if self.height <= 0.0 {
            return Err(Error::invalid(format!("contour height must be positive, got {}", self.height)));
        }
        if self.rel_tol <= 0.0 || self.abs_tol <= 0.0 {
            return Err(Error::invalid("contour tolerances must be positive"));
        }
        Ok(())
    }
}

/// Result of a contour integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalResult {
    pub value: f64,
    pub est_abs_error: f64,
    pub n_evals: usize,
    /// Estimate of the integral beyond the truncated contour (for
    /// integrated tails this is a diagnostic, not part of the error).
    pub tail_bound: f64,
    /// Imaginary part discarded when casting to real.
    pub imag: f64,
    pub refinements: u32,
    /// Contour actually used after refinement.
    pub contour: ContourSpec,
}

#[derive(Debug, Clone, Copy)]
struct Factor {
    offset: f64,
    coeff: f64,
    power: f64,
}

impl Factor {
    fn arg(&self, s: Complex) -> Complex {
        s * self.coeff + self.offset
    }
}

/// Integrand with Gamma quotients `Γ(w)^e / Γ(w+1)^e` replaced by `w^-e`.
#[derive(Debug, Clone)]
pub(crate) struct Integrand {
    gammas: Vec<Factor>,
    linears: Vec<Factor>,
    ln_z: f64,
    log_scale: f64,
    /// `ln|M(-R)| ~ μ R ln R` as `R -> ∞`.
    pub(crate) leftward_rate: f64,
}

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

impl Integrand {
    pub(crate) fn compile(terms: &[GammaTermSpec], ln_z: f64, log_scale: f64) -> Self {
        let mut leftward_rate = 0.0;
        let mut open: Vec<Factor> = terms
            .iter()
            .map(|t| {
                let (offset, coeff) = t.linear_form();
                let power = t.signed_exponent();
                leftward_rate -= power * coeff;
                Factor { offset, coeff, power }
            })
            .collect();
        let mut linears = Vec::new();
        let mut i = 0;
        while i < open.len() {
            let a = open[i];
            let partner = open.iter().enumerate().position(|(j, b)| {
                j != i
                    && same(a.coeff, b.coeff)
                    && same(a.power, -b.power)
                    && same(a.offset + 1.0, b.offset)
            });
            match partner {
                Some(j) => {
                    // Γ(w)^p Γ(w+1)^-p = w^-p
                    linears.push(Factor {
                        offset: a.offset,
                        coeff: a.coeff,
                        power: -a.power,
                    });
                    let (hi, lo) = if i > j { (i, j) } else { (j, i) };
                    open.swap_remove(hi);
                    open.swap_remove(lo);
                    i = 0;
                }
                None => i += 1,
            }
        }
        Integrand {
            gammas: open,
            linears,
            ln_z,
            log_scale,
            leftward_rate,
        }
    }

    pub(crate) fn log_eval(&self, s: Complex) -> Result<Complex> {
        let mut acc = s * self.ln_z + self.log_scale;
        for g in &self.gammas {
            acc += log_gamma(g.arg(s))? * g.power;
        }
        for l in &self.linears {
            acc += l.arg(s).ln() * l.power;
        }
        Ok(acc)
    }

    pub(crate) fn eval(&self, s: Complex) -> Result<Complex> {
        let l = self.log_eval(s)?;
        if l.re < -745.0 {
            return Ok(Complex::new(0.0, 0.0));
        }
        Ok(l.exp())
    }
}

/// Default contour for a term list: anchor at the strip midpoint, bent
/// towards the side where the integrand decays.
pub fn default_contour(terms: &[GammaTermSpec], ln_z: f64) -> Result<ContourSpec> {
    let strip = pole_strip(terms)?;
    let anchor = strip.midpoint();
    let f = Integrand::compile(terms, ln_z, 0.0);
    let mu = f.leftward_rate;
    let tiny = 1e-12;
    let direction = if mu < -tiny || (mu.abs() <= tiny && ln_z > 0.0) {
        -1.0
    } else if mu > tiny || (mu.abs() <= tiny && ln_z < 0.0) {
        1.0
    } else {
        0.0
    };
    if direction == 0.0 {
        return Ok(ContourSpec::straight(anchor));
    }
    let depth = if mu.abs() > tiny {
        ContourSpec::DEFAULT_BEND
    } else {
        ContourSpec::DEFAULT_BEND.max(36.0 / ln_z.abs())
    };
    Ok(ContourSpec::bent(anchor, anchor + direction * depth))
}

/// `(1/2πi) ∫_C M(s) z^s ds` along `contour`.
///
/// The anchor must separate the pole families (see [`pole_strip`]).
pub fn integrate(terms: &[GammaTermSpec], z: f64, contour: &ContourSpec) -> Result<EvalResult> {
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::domain(format!("argument z must be positive, got {z}")));
    }
    integrate_log(terms, z.ln(), contour)
}

/// As [`integrate`] with the argument given as `ln z`, so that arguments
/// like `e^800` never need to be formed.
pub fn integrate_log(terms: &[GammaTermSpec], ln_z: f64, contour: &ContourSpec) -> Result<EvalResult> {
    if !ln_z.is_finite() {
        return Err(Error::domain(format!("ln z must be finite, got {ln_z}")));
    }
    let strip = pole_strip(terms)?;
    if !strip.admits(contour.anchor) {
        return Err(Error::invalid(format!(
            "contour anchor {} does not separate the poles (strip {}..{})",
            contour.anchor, strip.lower, strip.upper
        )));
    }
    evaluate(&Integrand::compile(terms, ln_z, 0.0), contour)
}

#[derive(Debug, Clone, Copy)]
enum Piece {
    Segment { from: Complex, to: Complex },
    /// Vertical half-line from `anchor + sign·i·height` to `sign·i∞`.
    Ray { anchor: f64, height: f64, sign: f64 },
}

impl Piece {
    // Point on the path and the Jacobian ds/dtau, oriented upwards.
    fn point(&self, tau: f64) -> Option<(Complex, Complex)> {
        match *self {
            Piece::Segment { from, to } => Some((from + (to - from) * tau, to - from)),
            Piece::Ray { anchor, height, sign } => {
                let t = height / tau;
                if !(t < 1e100) {
                    return None;
                }
                Some((Complex::new(anchor, sign * t), Complex::new(0.0, height / (tau * tau))))
            }
        }
    }
}

// Vertical segment from anchor - iT to anchor + iT, pre-split into panels
// that shrink geometrically towards the real axis so that a narrow peak at
// the anchor is never straddled by a single wide panel.
fn vertical_panels(a: f64, t: f64) -> Vec<Piece> {
    const LEVELS: i32 = 6;
    let at = |y: f64| Complex::new(a, y);
    let mut out = Vec::with_capacity(2 * LEVELS as usize + 1);
    for j in 0..LEVELS {
        let (outer, inner) = (t * 0.5f64.powi(j), t * 0.5f64.powi(j + 1));
        out.push(Piece::Segment {
            from: at(-outer),
            to: at(-inner),
        });
    }
    let core = t * 0.5f64.powi(LEVELS);
    out.push(Piece::Segment {
        from: at(-core),
        to: at(core),
    });
    for j in (0..LEVELS).rev() {
        let (outer, inner) = (t * 0.5f64.powi(j), t * 0.5f64.powi(j + 1));
        out.push(Piece::Segment {
            from: at(inner),
            to: at(outer),
        });
    }
    out
}

fn pieces(c: &ContourSpec) -> Vec<Piece> {
    let a = c.anchor;
    let t = c.height;
    let mut out = Vec::new();
    if !c.is_straight() {
        let b = c.bend_depth;
        out.push(Piece::Segment {
            from: Complex::new(b, -t),
            to: Complex::new(a, -t),
        });
        out.extend(vertical_panels(a, t));
        out.push(Piece::Segment {
            from: Complex::new(a, t),
            to: Complex::new(b, t),
        });
        return out;
    }
    if c.tails == TailMode::Integrate {
        out.push(Piece::Ray {
            anchor: a,
            height: t,
            sign: -1.0,
        });
    }
    out.extend(vertical_panels(a, t));
    if c.tails == TailMode::Integrate {
        out.push(Piece::Ray {
            anchor: a,
            height: t,
            sign: 1.0,
        });
    }
    out
}

const TWO_PI: f64 = 2.0 * PI;
const INITIAL_INTERVALS: usize = 400;
const MAX_INTERVALS: usize = 25_600;

// Power-law envelope of the straight-line tails beyond |t| = T, already
// divided by 2π.
fn straight_tail(f: &Integrand, anchor: f64, height: f64) -> Result<f64> {
    let mut total = 0.0;
    for sign in [-1.0, 1.0] {
        let near = f.eval(Complex::new(anchor, sign * 0.5 * height))?.norm();
        let far = f.eval(Complex::new(anchor, sign * height))?.norm();
        if far == 0.0 {
            continue;
        }
        let rho = (near / far).log2();
        if rho <= 1.0 {
            return Ok(f64::INFINITY);
        }
        total += far * height / (rho - 1.0);
    }
    Ok(total / TWO_PI)
}

// Sampled continuation of the horizontal legs beyond the bend, divided by 2π.
fn leg_tail(f: &Integrand, c: &ContourSpec) -> Result<f64> {
    const SAMPLES: usize = 32;
    let direction = (c.bend_depth - c.anchor).signum();
    let step = if f.leftward_rate.abs() > 1e-12 || f.ln_z == 0.0 {
        1.0
    } else {
        1.0 / f.ln_z.abs()
    };
    let mut total = 0.0;
    for sign in [-1.0, 1.0] {
        let mut last = 0.0;
        for j in 0..=SAMPLES {
            let s = Complex::new(c.bend_depth + direction * step * j as f64, sign * c.height);
            last = f.eval(s)?.norm();
            total += step * last;
        }
        total += last * step * SAMPLES as f64;
    }
    Ok(total / TWO_PI)
}

/// Integrate a compiled integrand without any pole-strip check.
pub(crate) fn evaluate(f: &Integrand, contour: &ContourSpec) -> Result<EvalResult> {
    contour.validate()?;
    let mut c = *contour;
    let mut budget = INITIAL_INTERVALS;
    let mut n_evals = 0;
    let mut last = (0.0, f64::INFINITY);
    for refinement in 0..=contour.max_refinements {
        let path = pieces(&c);
        let tol = Tolerance {
            rel_tol: 0.5 * c.rel_tol,
            abs_tol: 0.5 * c.abs_tol * TWO_PI,
            max_intervals: budget,
        };
        let q = integrate_pieces(
            |p, tau| match path[p].point(tau) {
                Some((s, jac)) => Ok(f.eval(s)? * jac),
                None => Ok(Complex::new(0.0, 0.0)),
            },
            path.len(),
            tol,
        )?;
        n_evals += q.n_evals;
        // (1/2πi) I
        let value = Complex::new(q.value.im, -q.value.re) / TWO_PI;
        let quad_err = q.abs_error / TWO_PI;
        let (tail_bound, neglected) = if c.is_straight() {
            let tb = straight_tail(f, c.anchor, c.height)?;
            (tb, if c.tails == TailMode::Truncate { tb } else { 0.0 })
        } else {
            let tb = leg_tail(f, &c)?;
            (tb, tb)
        };
        let est = quad_err + neglected;
        let target = c.abs_tol.max(c.rel_tol * value.norm());
        last = (value.re, est);
        if est <= target {
            let limit = 1e-8f64.max(1e-6 * value.re.abs());
            if value.im.abs() > limit {
                return Err(Error::NonReal {
                    re: value.re,
                    im: value.im,
                });
            }
            return Ok(EvalResult {
                value: value.re,
                est_abs_error: est,
                n_evals,
                tail_bound,
                imag: value.im,
                refinements: refinement,
                contour: c,
            });
        }
        let mut grew = false;
        if neglected > 0.25 * target {
            if c.is_straight() {
                c.height *= 2.0;
            } else {
                c.bend_depth = c.anchor + 2.0 * (c.bend_depth - c.anchor);
            }
            grew = true;
        }
        if !q.converged || !grew {
            budget = (budget * 2).min(MAX_INTERVALS);
        }
    }
    Err(Error::NoConvergence {
        value: last.0,
        est_abs_error: last.1,
        refinements: contour.max_refinements,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gamma_minus_s() -> Vec<GammaTermSpec> {
        vec![GammaTermSpec::new(Slot::NumLower, 0.0, 1.0, 1.0).unwrap()]
    }

    #[test]
    fn empty_product_is_power_of_z() {
        let v = integrand(&[], 2.0, Complex::new(1.0, 0.0)).unwrap();
        assert!((v.re - 2.0).abs() < 1e-15 && v.im == 0.0);
    }

    #[test]
    fn strip_fallbacks() {
        let s = pole_strip(&gamma_minus_s()).unwrap();
        assert_eq!((s.lower, s.upper), (-0.1, 0.0));
        assert_eq!(s.reflected(), (0.0, 0.1));
        let up = [GammaTermSpec::new(Slot::NumUpper, 1.0, 1.0, 1.0).unwrap()];
        let s = pole_strip(&up).unwrap();
        assert_eq!((s.lower, s.upper), (0.0, 1.0));
        assert!(s.admits(50.0));
        assert!(!s.admits(0.0));
    }

    #[test]
    fn degenerate_strip() {
        let terms = [
            GammaTermSpec::new(Slot::NumLower, 0.0, 1.0, 1.0).unwrap(),
            GammaTermSpec::new(Slot::NumUpper, 1.0, 1.0, 1.0).unwrap(),
        ];
        assert!(matches!(pole_strip(&terms), Err(Error::InconsistentCoefficients { .. })));
    }

    #[test]
    fn pairs_are_reduced() {
        let terms = [
            GammaTermSpec::new(Slot::NumUpper, 0.3, 1.0, 2.5).unwrap(),
            GammaTermSpec::new(Slot::DenLower, -0.7, 1.0, 2.5).unwrap(),
            GammaTermSpec::new(Slot::NumLower, 0.2, 1.0, 1.0).unwrap(),
        ];
        let f = Integrand::compile(&terms, 0.4, 0.0);
        assert_eq!(f.gammas.len(), 1);
        assert_eq!(f.linears.len(), 1);
        for k in 0..20 {
            let s = Complex::new(-0.1 - 0.3 * k as f64, 3.0 * k as f64 - 20.0);
            let a = f.eval(s).unwrap();
            let b = integrand(&terms, 0.4f64.exp(), s).unwrap();
            assert!((a - b).norm() <= 1e-12 * b.norm(), "{a} vs {b}");
        }
    }

    #[test]
    fn cahen_mellin() {
        let terms = gamma_minus_s();
        for z in [0.5, 1.0, 2.0] {
            let c = default_contour(&terms, f64::ln(z)).unwrap();
            let r = integrate(&terms, z, &c).unwrap();
            assert!((r.value - (-z).exp()).abs() < 1e-11, "z={z}: {r:?}");
        }
    }

    #[test]
    fn rejects_anchor_outside_strip() {
        let c = ContourSpec::straight(0.5);
        assert!(integrate(&gamma_minus_s(), 1.0, &c).is_err());
    }
}
