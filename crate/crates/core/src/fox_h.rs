//! Meijer G, Fox H, Fox H-bar and the extended H-hat function.
//!
//! All four share one parameter layout: `p` upper triplets `(α, A, a)` and `q`
//! lower triplets `(β, B, b)`; the first `n` upper and the first `m` lower
//! entries sit in the numerator. The kind only restricts which scales and
//! exponents may differ from one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mellin_barnes::{
    default_contour, integrate_log, ContourSpec, EvalResult, GammaTermSpec, Slot,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Kind {
    MeijerG,
    FoxH,
    FoxHbar,
    ExtHhat,
}

impl std::str::FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "g" | "meijer-g" | "meijerg" => Ok(Kind::MeijerG),
            "h" | "fox-h" | "foxh" => Ok(Kind::FoxH),
            "hbar" | "fox-hbar" | "foxhbar" => Ok(Kind::FoxHbar),
            "hhat" | "ext-hhat" | "exthhat" => Ok(Kind::ExtHhat),
            _ => Err(Error::invalid(format!(
                "unknown function kind {s:?} (expected g, h, hbar or hhat)"
            ))),
        }
    }
}

impl std::fmt::Display for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Kind::MeijerG => "g",
            Kind::FoxH => "h",
            Kind::FoxHbar => "hbar",
            Kind::ExtHhat => "hhat",
        })
    }
}

impl TryFrom<String> for Kind {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Kind> for String {
    fn from(k: Kind) -> String {
        k.to_string()
    }
}

/// One `(value, scale, exponent)` parameter triplet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HParam {
    pub value: f64,
    pub scale: f64,
    pub exponent: f64,
}

impl HParam {
    pub fn new(value: f64, scale: f64, exponent: f64) -> Self {
        HParam {
            value,
            scale,
            exponent,
        }
    }

    /// Plain Meijer-G parameter: unit scale and exponent.
    pub fn plain(value: f64) -> Self {
        HParam::new(value, 1.0, 1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HFamilySpec {
    pub kind: Kind,
    pub m: usize,
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub upper: Vec<HParam>,
    pub lower: Vec<HParam>,
    /// `ln z`; the argument itself is never formed.
    pub log_z: f64,
}

impl HFamilySpec {
    pub fn new(kind: Kind, m: usize, n: usize, upper: Vec<HParam>, lower: Vec<HParam>, z: f64) -> Result<Self> {
        if !(z > 0.0 && z.is_finite()) {
            return Err(Error::domain(format!("argument z must be positive, got {z}")));
        }
        Self::with_log_z(kind, m, n, upper, lower, z.ln())
    }

    pub fn with_log_z(
        kind: Kind,
        m: usize,
        n: usize,
        upper: Vec<HParam>,
        lower: Vec<HParam>,
        log_z: f64,
    ) -> Result<Self> {
        let spec = HFamilySpec {
            kind,
            m,
            n,
            p: upper.len(),
            q: lower.len(),
            upper,
            lower,
            log_z,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.upper.len() != self.p || self.lower.len() != self.q {
            return Err(Error::invalid(format!(
                "parameter lists have lengths {}/{} but p = {}, q = {}",
                self.upper.len(),
                self.lower.len(),
                self.p,
                self.q
            )));
        }
        if self.m > self.q || self.n > self.p {
            return Err(Error::invalid(format!(
                "need m <= q and n <= p, got m = {}, n = {}, p = {}, q = {}",
                self.m, self.n, self.p, self.q
            )));
        }
        if self.m + self.n == 0 {
            return Err(Error::invalid("need at least one numerator Gamma term (m + n >= 1)"));
        }
        if !self.log_z.is_finite() {
            return Err(Error::domain(format!("ln z must be finite, got {}", self.log_z)));
        }
        for t in self.terms() {
            t.validate()?;
        }
        if !admits(self, self.kind) {
            return Err(Error::invalid(format!(
                "parameters violate the {:?} constraints on scales and exponents",
                self.kind
            )));
        }
        Ok(())
    }

    pub fn terms(&self) -> Vec<GammaTermSpec> {
        let upper = self.upper.iter().enumerate().map(|(j, h)| {
            let slot = if j < self.n { Slot::NumUpper } else { Slot::DenUpper };
            GammaTermSpec {
                alpha: h.value,
                scale: h.scale,
                exponent: h.exponent,
                slot,
            }
        });
        let lower = self.lower.iter().enumerate().map(|(j, h)| {
            let slot = if j < self.m { Slot::NumLower } else { Slot::DenLower };
            GammaTermSpec {
                alpha: h.value,
                scale: h.scale,
                exponent: h.exponent,
                slot,
            }
        });
        upper.chain(lower).collect()
    }
}

fn admits(spec: &HFamilySpec, kind: Kind) -> bool {
    let all = || spec.upper.iter().chain(spec.lower.iter());
    match kind {
        Kind::MeijerG => all().all(|h| h.scale == 1.0 && h.exponent == 1.0),
        Kind::FoxH => all().all(|h| h.exponent == 1.0),
        Kind::FoxHbar => {
            spec.upper[spec.n..].iter().all(|h| h.exponent == 1.0)
                && spec.lower[..spec.m].iter().all(|h| h.exponent == 1.0)
        }
        Kind::ExtHhat => true,
    }
}

/// Evaluate the function, on `contour_override` if given and otherwise on
/// [`default_contour`].
///
/// ```
/// use gammasum::fox_h::{eval_h, HFamilySpec, HParam, Kind};
/// // G^{1,0}_{0,1}[z | -; 0] = e^{-z}
/// let spec = HFamilySpec::new(Kind::MeijerG, 1, 0, vec![], vec![HParam::plain(0.0)], 2.0).unwrap();
/// let r = eval_h(&spec, None).unwrap();
/// assert!((r.value - (-2.0f64).exp()).abs() < 1e-10);
/// ```
pub fn eval_h(spec: &HFamilySpec, contour_override: Option<&ContourSpec>) -> Result<EvalResult> {
    spec.validate()?;
    let terms = spec.terms();
    let contour = match contour_override {
        Some(c) => *c,
        None => default_contour(&terms, spec.log_z)?,
    };
    integrate_log(&terms, spec.log_z, &contour)
}

/// The most specific kind whose constraints the parameters satisfy.
pub fn reduce_kind(spec: &HFamilySpec) -> HFamilySpec {
    let kind = [Kind::MeijerG, Kind::FoxH, Kind::FoxHbar]
        .into_iter()
        .find(|&k| admits(spec, k))
        .unwrap_or(Kind::ExtHhat);
    HFamilySpec {
        kind,
        ..spec.clone()
    }
}
