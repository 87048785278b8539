//! Regularized incomplete Gamma functions `P(a, x)` and `Q(a, x)`.
//!
//! Series for `x < a + 1`, Lentz continued fraction otherwise.

use crate::complex_gamma::ln_gamma;

const EPS: f64 = 1e-16;
const MAX_ITER: usize = 10_000;

/// Lower regularized incomplete Gamma `P(a, x) = γ(a, x) / Γ(a)`.
pub fn regularized_lower(a: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0);
    if x <= 0.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return 1.0;
    }
    if x < a + 1.0 {
        series(a, x)
    } else {
        1.0 - continued_fraction(a, x)
    }
}

/// Upper regularized incomplete Gamma `Q(a, x) = Γ(a, x) / Γ(a)`.
pub fn regularized_upper(a: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0);
    if x <= 0.0 {
        return 1.0;
    }
    if x.is_infinite() {
        return 0.0;
    }
    if x < a + 1.0 {
        1.0 - series(a, x)
    } else {
        continued_fraction(a, x)
    }
}

fn log_prefactor(a: f64, x: f64) -> f64 {
    a * x.ln() - x
}

fn series(a: f64, x: f64) -> f64 {
    let mut term = 1.0 / a;
    let mut sum = term;
    let mut ap = a;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * EPS {
            break;
        }
    }
    (log_prefactor(a, x) - ln_gamma(a)).exp() * sum
}

fn continued_fraction(a: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    (log_prefactor(a, x) - ln_gamma(a)).exp() * h
}
