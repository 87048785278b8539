//! Principal-branch complex log-Gamma and real powers of Gamma.
//!
//! `log_gamma` is the analytic continuation of `ln Γ(x)` from the positive
//! real axis into the plane cut along the non-positive real axis. It is not
//! `ln(Γ(z))`: its imaginary part grows without bound along vertical lines,
//! which is what makes `Γ(z)^a` single valued along a contour for real `a`.

use std::f64::consts::{FRAC_PI_2, LN_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Complex = Complex64;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const LN_PI: f64 = 1.144_729_885_849_400_2;

/// Distance from a non-positive integer below which the argument is treated
/// as a pole.
pub const POLE_TOLERANCE: f64 = 1e-10;

const STIRLING_MIN_MODULUS: f64 = 10.0;

// B_{2k} / (2k (2k - 1)) for k = 1..=10
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
];

/// Principal log-Gamma.
///
/// Relative accuracy is close to machine precision away from the poles.
/// Arguments within [`POLE_TOLERANCE`] of `0, -1, -2, ...` return
/// [`Error::Pole`].
///
/// ```
/// use gammasum::complex_gamma::{log_gamma, Complex};
/// let l = log_gamma(Complex::new(0.5, 0.0)).unwrap();
/// assert!((l.re - std::f64::consts::PI.sqrt().ln()).abs() < 1e-14);
/// ```
pub fn log_gamma(z: Complex) -> Result<Complex> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::domain(format!("non-finite log_gamma argument {z}")));
    }
    check_pole(z)?;
    if z.im < 0.0 {
        Ok(upper_half(z.conj()).conj())
    } else {
        Ok(upper_half(z))
    }
}

/// Real log-Gamma for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    shifted_stirling(Complex::new(x, 0.0)).re
}

/// `Γ(z)^a = exp(a · log_gamma(z))` for real `a > 0`.
pub fn gamma_pow(z: Complex, a: f64) -> Result<Complex> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::invalid(format!("Gamma exponent must be positive, got {a}")));
    }
    Ok((log_gamma(z)? * a).exp())
}

fn check_pole(z: Complex) -> Result<()> {
    if z.re > 0.5 || z.im.abs() >= POLE_TOLERANCE {
        return Ok(());
    }
    let k = z.re.round();
    if k <= 0.0 && (z - Complex::new(k, 0.0)).norm() < POLE_TOLERANCE {
        return Err(Error::Pole { re: z.re, im: z.im });
    }
    Ok(())
}

// Im z >= 0 from here on.
fn upper_half(z: Complex) -> Complex {
    if z.re >= 0.5 {
        return shifted_stirling(z);
    }
    // Reflection: L(z) = ln pi - ln sin(pi z) - L(1 - z), with the branch of
    // ln sin(pi z) chosen continuous in the upper half plane.
    let one = Complex::new(1.0, 0.0);
    let w = (Complex::new(0.0, 2.0 * PI) * z).exp();
    let log_sin = Complex::new(0.0, -PI) * z + Complex::new(-LN_2, FRAC_PI_2) + (one - w).ln();
    let mut out = Complex::new(LN_PI, 0.0) - log_sin - shifted_stirling(one - z);
    if z.im == 0.0 && z.re > 0.0 {
        out.im = 0.0;
    }
    out
}

fn shifted_stirling(z: Complex) -> Complex {
    let mut w = z;
    let mut shift = Complex::new(0.0, 0.0);
    while w.norm() < STIRLING_MIN_MODULUS {
        shift += w.ln();
        w += 1.0;
    }
    stirling(w) - shift
}

fn stirling(w: Complex) -> Complex {
    let r = w.inv();
    let r2 = r * r;
    let mut series = Complex::new(STIRLING[STIRLING.len() - 1], 0.0);
    for c in STIRLING.iter().rev().skip(1) {
        series = series * r2 + c;
    }
    (w - 0.5) * w.ln() - w + LN_SQRT_2PI + series * r
}
