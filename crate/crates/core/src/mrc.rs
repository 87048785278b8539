//! Outage probability and average bit error rate of maximal ratio combining
//! over independent Nakagami-m branches.
//!
//! The conditional error probability of a binary scheme is
//! `Γ(p, q y) / (2 Γ(p))`; averaging it over the combined SNR density gives an
//! extended H-hat function at unit argument.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gamma_sum::{cdf_with, pdf_with, BranchParams, EvalOptions, Estimate, PathChoice};
use crate::incomplete_gamma::regularized_upper;
use crate::mellin_barnes::{evaluate, ContourSpec, GammaTermSpec, Integrand, Slot};
use crate::quadrature::{integrate_pieces, Tolerance};
use crate::complex_gamma::Complex;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModulationKind {
    Cbfsk,
    Cbpsk,
    Nbfsk,
    Dbpsk,
    Custom,
}

/// Binary modulation described by its CEP parameters `(p, q)`.
/// Serialized as its display name.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Modulation {
    pub kind: ModulationKind,
    pub p: f64,
    pub q: f64,
}

impl Modulation {
    /// Coherent BFSK.
    pub const CBFSK: Modulation = Modulation {
        kind: ModulationKind::Cbfsk,
        p: 0.5,
        q: 0.5,
    };
    /// Coherent BPSK.
    pub const CBPSK: Modulation = Modulation {
        kind: ModulationKind::Cbpsk,
        p: 0.5,
        q: 1.0,
    };
    /// Non-coherent BFSK.
    pub const NBFSK: Modulation = Modulation {
        kind: ModulationKind::Nbfsk,
        p: 1.0,
        q: 0.5,
    };
    /// Differential BPSK.
    pub const DBPSK: Modulation = Modulation {
        kind: ModulationKind::Dbpsk,
        p: 1.0,
        q: 1.0,
    };

    pub const NAMED: [Modulation; 4] = [Self::CBFSK, Self::CBPSK, Self::NBFSK, Self::DBPSK];

    pub fn custom(p: f64, q: f64) -> Result<Self> {
        if !(p > 0.0 && p.is_finite() && q > 0.0 && q.is_finite()) {
            return Err(Error::invalid(format!("modulation needs p > 0 and q > 0, got p = {p}, q = {q}")));
        }
        Ok(Modulation {
            kind: ModulationKind::Custom,
            p,
            q,
        })
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            ModulationKind::Cbfsk => "cbfsk",
            ModulationKind::Cbpsk => "cbpsk",
            ModulationKind::Nbfsk => "nbfsk",
            ModulationKind::Dbpsk => "dbpsk",
            ModulationKind::Custom => "custom",
        }
    }
}

impl fmt::Display for Modulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ModulationKind::Custom => write!(f, "custom({},{})", self.p, self.q),
            _ => f.write_str(self.name()),
        }
    }
}

impl FromStr for Modulation {
    type Err = Error;

    /// Named schemes (case-insensitive) or `custom(p,q)`.
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        if let Some(m) = Self::NAMED.iter().find(|m| m.name() == lower) {
            return Ok(*m);
        }
        if let Some(args) = lower.strip_prefix("custom(").and_then(|r| r.strip_suffix(')')) {
            let parts: Vec<_> = args.split(',').map(|v| v.trim().parse::<f64>()).collect();
            if let [Ok(p), Ok(q)] = parts[..] {
                return Modulation::custom(p, q);
            }
        }
        Err(Error::invalid(format!(
            "unknown modulation {s:?}; expected one of cbfsk, cbpsk, nbfsk, dbpsk or custom(p,q)"
        )))
    }
}

impl TryFrom<String> for Modulation {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Modulation> for String {
    fn from(m: Modulation) -> String {
        m.to_string()
    }
}

/// `P(Y < y_th)`.
pub fn outage(params: &BranchParams, y_th: f64) -> Result<f64> {
    outage_with(params, y_th, &EvalOptions::default()).map(|e| e.value)
}

pub fn outage_with(params: &BranchParams, y_th: f64, opts: &EvalOptions) -> Result<Estimate> {
    cdf_with(params, y_th, opts)
}

/// Conditional error probability `Γ(p, q y) / (2 Γ(p))` at SNR `y >= 0`.
pub fn cep(modulation: Modulation, y: f64) -> f64 {
    if y <= 0.0 {
        return 0.5;
    }
    0.5 * regularized_upper(modulation.p, modulation.q * y)
}

/// How a BER value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BerPath {
    General,
    IntegerCoherent,
    IntegerNoncoherent,
    /// The contour integral did not converge; direct averaging was used.
    QuadratureFallback,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerEstimate {
    pub value: f64,
    pub est_abs_error: f64,
    pub path: BerPath,
}

// H-hat parameters: upper (1-q, 1, p) then the branch entries and (1, 1, 1);
// lower (0, 1, 1), the branch entries, then (-q, 1, p). With `expand` every
// branch appears m_l times with unit exponent.
fn ber_terms(params: &BranchParams, modulation: Modulation, expand: bool) -> Vec<GammaTermSpec> {
    let term = |slot, alpha, exponent| GammaTermSpec {
        alpha,
        scale: 1.0,
        exponent,
        slot,
    };
    let (p, q) = (modulation.p, modulation.q);
    let mut terms = vec![term(Slot::NumUpper, 1.0 - q, p)];
    let branch = |terms: &mut Vec<GammaTermSpec>, slot, shift: f64| {
        for (m, x) in params.rates() {
            if expand {
                for _ in 0..m.round() as usize {
                    terms.push(term(slot, shift + x, 1.0));
                }
            } else {
                terms.push(term(slot, shift + x, m));
            }
        }
    };
    branch(&mut terms, Slot::DenUpper, 1.0);
    terms.push(term(Slot::DenUpper, 1.0, 1.0));
    terms.push(term(Slot::NumLower, 0.0, 1.0));
    branch(&mut terms, Slot::NumLower, 0.0);
    terms.push(term(Slot::DenLower, -q, p));
    terms
}

// Minimiser of -ln|σ| - p ln(q+σ) - Σ m ln(x-σ) on (-q, 0).
fn ber_saddle(params: &BranchParams, modulation: Modulation) -> f64 {
    let (p, q) = (modulation.p, modulation.q);
    let dphi = |s: f64| -1.0 / s - p / (q + s) + params.rates().map(|(m, x)| m / (x - s)).sum::<f64>();
    let (mut lo, mut hi) = (-q, 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if dphi(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn ber_contour(params: &BranchParams, modulation: Modulation, opts: &EvalOptions) -> ContourSpec {
    let saddle = ber_saddle(params, modulation);
    let anchor = saddle + opts.anchor_shift * 2.0 * (-saddle).min(saddle + modulation.q);
    // The height sets the scale of the first quadrature panels, so it must
    // match the width of the peak at the saddle; the mapped tails take the rest.
    let mut c = ContourSpec::straight(anchor).with_height(4.0 * modulation.q);
    c.rel_tol = opts.rel_tol;
    // The BER spans many decades; only the relative tolerance is meaningful.
    c.abs_tol = f64::MIN_POSITIVE;
    c.max_refinements = opts.max_refinements;
    c
}

fn ber_contour_integral(params: &BranchParams, modulation: Modulation, expand: bool, opts: &EvalOptions) -> Result<Estimate> {
    let log_scale =
        modulation.p * modulation.q.ln() - std::f64::consts::LN_2 + params.log_prefactor();
    let f = Integrand::compile(&ber_terms(params, modulation, expand), 0.0, log_scale);
    let r = evaluate(&f, &ber_contour(params, modulation, opts))?;
    Ok(Estimate {
        value: r.value,
        est_abs_error: r.est_abs_error,
    })
}

/// Average BER.
///
/// ```
/// use gammasum::gamma_sum::BranchParams;
/// use gammasum::mrc::{ber, Modulation};
/// let p = BranchParams::from_slices(&[1.0], &[10.0]).unwrap();
/// let v = ber(&p, Modulation::DBPSK).unwrap();
/// assert!((v - 1.0 / 22.0).abs() < 1e-10);
/// ```
pub fn ber(params: &BranchParams, modulation: Modulation) -> Result<f64> {
    ber_detailed(params, modulation, &EvalOptions::default()).map(|e| e.value)
}

/// Average BER with the path that produced it.
///
/// Integer `m_l` with `p = 1/2` or `p = 1` use the unit-exponent
/// representations unless `opts.path` forces the general one. If the contour
/// integral does not converge the result comes from
/// [`ber_quadrature_oracle`] and is flagged as such.
pub fn ber_detailed(params: &BranchParams, modulation: Modulation, opts: &EvalOptions) -> Result<BerEstimate> {
    let integer = opts.path == PathChoice::Auto && params.is_integer();
    let attempt = if integer && modulation.p == 0.5 {
        ber_integer_coherent_with(params, modulation, opts).map(|e| (e, BerPath::IntegerCoherent))
    } else if integer && modulation.p == 1.0 {
        ber_integer_noncoherent_with(params, modulation, opts).map(|e| (e, BerPath::IntegerNoncoherent))
    } else {
        ber_general(params, modulation, opts).map(|e| (e, BerPath::General))
    };
    match attempt {
        Ok((e, path)) => Ok(BerEstimate {
            value: e.value.clamp(0.0, 0.5),
            est_abs_error: e.est_abs_error,
            path,
        }),
        Err(Error::NoConvergence { .. }) => {
            let (value, est_abs_error) = quadrature_average(params, modulation, 4000)?;
            Ok(BerEstimate {
                value,
                est_abs_error,
                path: BerPath::QuadratureFallback,
            })
        }
        Err(e) => Err(e),
    }
}

/// H-hat representation with exponents `m_l` and `p`.
pub fn ber_general(params: &BranchParams, modulation: Modulation, opts: &EvalOptions) -> Result<Estimate> {
    ber_contour_integral(params, modulation, false, opts)
}

fn require_integer(params: &BranchParams) -> Result<()> {
    if !params.is_integer() {
        return Err(Error::domain("integer-m BER needs every m_l to be an integer"));
    }
    Ok(())
}

/// Coherent schemes (`p = 1/2`) with integer `m_l`.
pub fn ber_integer_coherent(params: &BranchParams, modulation: Modulation) -> Result<f64> {
    ber_integer_coherent_with(params, modulation, &EvalOptions::default()).map(|e| e.value)
}

pub fn ber_integer_coherent_with(params: &BranchParams, modulation: Modulation, opts: &EvalOptions) -> Result<Estimate> {
    require_integer(params)?;
    if modulation.p != 0.5 {
        return Err(Error::invalid(format!("coherent form needs p = 0.5, got {}", modulation.p)));
    }
    ber_contour_integral(params, modulation, true, opts)
}

/// Non-coherent schemes (`p = 1`) with integer `m_l`: a Meijer G function.
pub fn ber_integer_noncoherent(params: &BranchParams, modulation: Modulation) -> Result<f64> {
    ber_integer_noncoherent_with(params, modulation, &EvalOptions::default()).map(|e| e.value)
}

pub fn ber_integer_noncoherent_with(
    params: &BranchParams,
    modulation: Modulation,
    opts: &EvalOptions,
) -> Result<Estimate> {
    require_integer(params)?;
    if modulation.p != 1.0 {
        return Err(Error::invalid(format!("non-coherent form needs p = 1, got {}", modulation.p)));
    }
    ber_contour_integral(params, modulation, true, opts)
}

/// Direct average of the CEP over the density by adaptive quadrature, with
/// at most `n_nodes` Gauss-Kronrod panels.
pub fn ber_quadrature_oracle(params: &BranchParams, modulation: Modulation, n_nodes: usize) -> Result<f64> {
    quadrature_average(params, modulation, n_nodes).map(|(v, _)| v)
}

fn quadrature_average(params: &BranchParams, modulation: Modulation, n_nodes: usize) -> Result<(f64, f64)> {
    let opts = EvalOptions {
        rel_tol: 1e-11,
        abs_tol: f64::MIN_POSITIVE,
        ..EvalOptions::default()
    };
    let mean = params.mean();
    let xmin = params.rates().map(|(_, x)| x).fold(f64::INFINITY, f64::min);
    let upper = mean + 50.0 * params.variance().sqrt() + 100.0 / (xmin + modulation.q);
    let integrand = |y: f64| -> Result<f64> {
        if y <= 0.0 {
            return Ok(0.0);
        }
        Ok(cep(modulation, y) * pdf_with(params, y, &opts)?.value)
    };
    // [0, mean] and [mean, upper]
    let r = integrate_pieces(
        |piece, tau| {
            let (a, b) = if piece == 0 { (0.0, mean) } else { (mean, upper) };
            Ok(Complex::new(integrand(a + tau * (b - a))? * (b - a), 0.0))
        },
        2,
        Tolerance {
            rel_tol: 1e-10,
            abs_tol: f64::MIN_POSITIVE,
            max_intervals: n_nodes.max(2),
        },
    )?;
    if !r.converged {
        return Err(Error::NoConvergence {
            value: r.value.re,
            est_abs_error: r.abs_error,
            refinements: 0,
        });
    }
    Ok((r.value.re, r.abs_error))
}
