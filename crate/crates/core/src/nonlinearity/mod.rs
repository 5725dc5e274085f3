//! Closed-form nonlinearity families `f(s) = λ·g(s)`, their derivatives, the
//! growth functional `h`, and the plateau truncation `f_ε`.
//!
//! All builtin families are autonomous and non-negative on `[0, ∞)`.

mod certify;

use std::collections::BTreeMap;
use std::f64::consts::E;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dimension::Dimension;
use crate::error::{Error, Result};

pub use certify::{certify_hypotheses, Criticality, HypothesisReport, SampleConfig};

/// Shape of `g`. The log-corrected families carry the dimension because their
/// leading power is the critical one, `2* - 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// `(1 + s)^p`
    Power { p: f64 },
    /// `e^s`
    Exponential,
    /// `(1 + s)^{2*-1} / [log(e + s)]^β`
    LogCorrectedPower { beta: f64, dim: Dimension },
    /// `(1 + s)^{2*-1} / [log(e + log(1 + s))]^β`
    DoubleLogCorrected { beta: f64, dim: Dimension },
    /// `c`
    Constant { c: f64 },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Power { .. } => "power",
            Family::Exponential => "exp",
            Family::LogCorrectedPower { .. } => "logpower",
            Family::DoubleLogCorrected { .. } => "dlog",
            Family::Constant { .. } => "const",
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Family::Power { p } => p.is_finite() && p > 1.0,
            Family::Exponential => true,
            Family::LogCorrectedPower { beta, .. } | Family::DoubleLogCorrected { beta, .. } => {
                beta.is_finite() && beta > 0.0
            }
            Family::Constant { c } => c.is_finite() && c > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("parameters out of range for {self:?}")))
        }
    }

    fn g(&self, s: f64) -> f64 {
        match *self {
            Family::Power { p } => (1.0 + s).powf(p),
            Family::Exponential => s.exp(),
            Family::LogCorrectedPower { beta, dim } => {
                (1.0 + s).powf(dim.critical_power()) / (E + s).ln().powf(beta)
            }
            Family::DoubleLogCorrected { beta, dim } => {
                (1.0 + s).powf(dim.critical_power()) / (E + s.ln_1p()).ln().powf(beta)
            }
            Family::Constant { c } => c,
        }
    }

    fn dg(&self, s: f64) -> f64 {
        match *self {
            Family::Power { p } => p * (1.0 + s).powf(p - 1.0),
            Family::Exponential => s.exp(),
            Family::Constant { .. } => 0.0,
            Family::LogCorrectedPower { .. } | Family::DoubleLogCorrected { .. } => {
                self.g(s) * self.dlng(s)
            }
        }
    }

    fn ln_g(&self, s: f64) -> f64 {
        match *self {
            Family::Power { p } => p * s.ln_1p(),
            Family::Exponential => s,
            Family::LogCorrectedPower { beta, dim } => {
                dim.critical_power() * s.ln_1p() - beta * (E + s).ln().ln()
            }
            Family::DoubleLogCorrected { beta, dim } => {
                dim.critical_power() * s.ln_1p() - beta * (E + s.ln_1p()).ln().ln()
            }
            Family::Constant { c } => c.ln(),
        }
    }

    /// `g'/g`
    fn dlng(&self, s: f64) -> f64 {
        match *self {
            Family::Power { p } => p / (1.0 + s),
            Family::Exponential => 1.0,
            Family::LogCorrectedPower { beta, dim } => {
                let l = (E + s).ln();
                dim.critical_power() / (1.0 + s) - beta / (l * (E + s))
            }
            Family::DoubleLogCorrected { beta, dim } => {
                let inner = E + s.ln_1p();
                let m = inner.ln();
                dim.critical_power() / (1.0 + s) - beta / (m * inner * (1.0 + s))
            }
            Family::Constant { .. } => 0.0,
        }
    }

    /// True when `g` is non-decreasing on `[0, ∞)` for these parameters.
    pub fn is_monotone(&self) -> bool {
        match *self {
            Family::Power { .. } | Family::Exponential | Family::Constant { .. } => true,
            // (e+s)·log(e+s)/(1+s) ≥ 2.4 on [0, ∞), so q·2.4 ≥ β suffices.
            Family::LogCorrectedPower { beta, dim } => beta <= 2.4 * dim.critical_power(),
            // the correction term is at most β/e
            Family::DoubleLogCorrected { beta, dim } => beta <= E * dim.critical_power(),
        }
    }
}

/// A nonlinearity `f(s) = λ·g(s)`, optionally truncated to `f_ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpecRepr", into = "SpecRepr")]
pub struct NonlinearitySpec {
    family: Family,
    scale: f64,
    truncation: Option<f64>,
}

impl NonlinearitySpec {
    pub fn new(family: Family) -> Result<Self> {
        family.validate()?;
        Ok(NonlinearitySpec { family, scale: 1.0, truncation: None })
    }

    pub fn power(p: f64) -> Result<Self> {
        Self::new(Family::Power { p })
    }

    pub fn exponential() -> Self {
        NonlinearitySpec { family: Family::Exponential, scale: 1.0, truncation: None }
    }

    pub fn log_corrected(beta: f64, dim: Dimension) -> Result<Self> {
        Self::new(Family::LogCorrectedPower { beta, dim })
    }

    pub fn double_log_corrected(beta: f64, dim: Dimension) -> Result<Self> {
        Self::new(Family::DoubleLogCorrected { beta, dim })
    }

    pub fn constant(c: f64) -> Result<Self> {
        Self::new(Family::Constant { c })
    }

    /// Replaces the multiplicative scale `λ`.
    pub fn with_scale(self, scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::Domain(format!("scale must be positive, got {scale}")));
        }
        Ok(NonlinearitySpec { scale, ..self })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn truncation(&self) -> Option<f64> {
        self.truncation
    }

    pub fn is_truncated(&self) -> bool {
        self.truncation.is_some()
    }

    /// The same nonlinearity without truncation.
    pub fn untruncated(&self) -> Self {
        NonlinearitySpec { truncation: None, ..*self }
    }

    /// Builds `f_ε`: `(1-ε) f(s)` for `s ≤ 1/ε` and the constant `(1-ε) f(1/ε)` beyond.
    pub fn truncate(&self, eps: f64) -> Result<Self> {
        if self.truncation.is_some() {
            return Err(Error::AlreadyTruncated);
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::Domain(format!("truncation ε must lie in (0,1), got {eps}")));
        }
        Ok(NonlinearitySpec { truncation: Some(eps), ..*self })
    }

    /// `f(s)` for `s ≥ 0`.
    pub fn eval(&self, s: f64) -> Result<f64> {
        check_argument(s)?;
        Ok(self.value(s))
    }

    /// `∂f/∂s` for `s ≥ 0`; at the truncation kink the left value is returned.
    pub fn deriv(&self, s: f64) -> Result<f64> {
        check_argument(s)?;
        Ok(self.slope(s))
    }

    /// Unchecked evaluation. Negative arguments use the natural extension of
    /// the closed form, which the integrators need when a trajectory crosses zero.
    #[inline]
    pub fn value(&self, s: f64) -> f64 {
        match self.truncation {
            None => self.scale * self.family.g(s),
            Some(eps) => {
                let cut = 1.0 / eps;
                (1.0 - eps) * self.scale * self.family.g(s.min(cut))
            }
        }
    }

    /// Unchecked derivative, see [`NonlinearitySpec::value`].
    #[inline]
    pub fn slope(&self, s: f64) -> f64 {
        match self.truncation {
            None => self.scale * self.family.dg(s),
            Some(eps) if s > 1.0 / eps => 0.0,
            Some(eps) => (1.0 - eps) * self.scale * self.family.dg(s),
        }
    }

    /// `log f(s)`, evaluated without forming `f(s)`.
    pub fn ln_value(&self, s: f64) -> f64 {
        match self.truncation {
            None => self.scale.ln() + self.family.ln_g(s),
            Some(eps) => (-eps).ln_1p() + self.scale.ln() + self.family.ln_g(s.min(1.0 / eps)),
        }
    }

    /// `f'(s)/f(s)`.
    pub fn log_derivative(&self, s: f64) -> f64 {
        match self.truncation {
            Some(eps) if s > 1.0 / eps => 0.0,
            _ => self.family.dlng(s),
        }
    }

    /// `h(s) = s^{2*-1} / f(s)` for `s > s0`, computed in log space.
    ///
    /// The builtins live on `[0, ∞)`, so the maximum of `|f|` over `{-s, s}`
    /// is taken to be `f(s)`.
    pub fn h_of(&self, s: f64, dim: Dimension, s0: f64) -> Result<f64> {
        if self.truncation.is_some() {
            return Err(Error::Domain("h is defined for the untruncated nonlinearity".into()));
        }
        if !(s > s0) {
            return Err(Error::Domain(format!("h requires s > s0 = {s0}, got {s}")));
        }
        Ok(self.ln_h(s, dim).exp())
    }

    /// `log h(s)` without domain checks.
    pub fn ln_h(&self, s: f64, dim: Dimension) -> f64 {
        dim.critical_power() * s.ln() - self.ln_value(s)
    }

    pub fn is_monotone(&self) -> bool {
        self.family.is_monotone()
    }
}

fn check_argument(s: f64) -> Result<()> {
    if s >= 0.0 && s.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("nonlinearity evaluated at s = {s} < 0")))
    }
}

impl fmt::Display for NonlinearitySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::Power { p } => write!(f, "power(p={p})")?,
            Family::Exponential => write!(f, "exp")?,
            Family::LogCorrectedPower { beta, dim } => write!(f, "logpower(beta={beta}, N={dim})")?,
            Family::DoubleLogCorrected { beta, dim } => write!(f, "dlog(beta={beta}, N={dim})")?,
            Family::Constant { c } => write!(f, "const(c={c})")?,
        }
        if self.scale != 1.0 {
            write!(f, " x {}", self.scale)?;
        }
        if let Some(eps) = self.truncation {
            write!(f, " truncated eps={eps}")?;
        }
        Ok(())
    }
}

/// JSON form: `{"family": "power", "params": {"p": 3}, "lambda": 1, "eps": null}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct SpecRepr {
    family: String,
    params: BTreeMap<String, f64>,
    lambda: f64,
    eps: Option<f64>,
}

impl From<NonlinearitySpec> for SpecRepr {
    fn from(spec: NonlinearitySpec) -> Self {
        let mut params = BTreeMap::new();
        match spec.family {
            Family::Power { p } => {
                params.insert("p".to_string(), p);
            }
            Family::Exponential => {}
            Family::LogCorrectedPower { beta, dim } | Family::DoubleLogCorrected { beta, dim } => {
                params.insert("beta".to_string(), beta);
                params.insert("N".to_string(), dim.as_f64());
            }
            Family::Constant { c } => {
                params.insert("c".to_string(), c);
            }
        }
        SpecRepr {
            family: spec.family.name().to_string(),
            params,
            lambda: spec.scale,
            eps: spec.truncation,
        }
    }
}

impl TryFrom<SpecRepr> for NonlinearitySpec {
    type Error = Error;

    fn try_from(repr: SpecRepr) -> Result<Self> {
        let param = |key: &str| {
            repr.params
                .get(key)
                .copied()
                .ok_or_else(|| Error::Parse(format!("family {} needs parameter {key}", repr.family)))
        };
        let dim = || -> Result<Dimension> {
            let n = param("N")?;
            if n.fract() != 0.0 || n < 0.0 {
                return Err(Error::Parse(format!("N must be an integer, got {n}")));
            }
            Dimension::new(n as u32)
        };
        let family = match repr.family.as_str() {
            "power" => Family::Power { p: param("p")? },
            "exp" => Family::Exponential,
            "logpower" => Family::LogCorrectedPower { beta: param("beta")?, dim: dim()? },
            "dlog" => Family::DoubleLogCorrected { beta: param("beta")?, dim: dim()? },
            "const" => Family::Constant { c: param("c")? },
            other => return Err(Error::Parse(format!("unknown family {other:?}"))),
        };
        let spec = NonlinearitySpec::new(family)?.with_scale(repr.lambda)?;
        match repr.eps {
            Some(eps) => spec.truncate(eps),
            None => Ok(spec),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dim(n: u32) -> Dimension {
        Dimension::new(n).unwrap()
    }

    #[test]
    fn eval_examples() {
        let f = NonlinearitySpec::power(3.0).unwrap().with_scale(7.0).unwrap();
        // s = 1/r - 1 at r = 0.5
        assert_eq!(f.eval(1.0 / 0.5 - 1.0).unwrap(), 56.0);

        let g = NonlinearitySpec::power(2.0).unwrap().truncate(0.1).unwrap();
        assert!((g.eval(20.0).unwrap() - 108.9).abs() < 1e-12);

        let e = NonlinearitySpec::exponential().with_scale(16.0).unwrap();
        assert_eq!(e.eval(0.0).unwrap(), 16.0);
    }

    #[test]
    fn negative_arguments_are_rejected() {
        let f = NonlinearitySpec::exponential();
        assert!(matches!(f.eval(-1e-3), Err(Error::Domain(_))));
        assert!(matches!(f.deriv(-1.0), Err(Error::Domain(_))));
        assert!(f.eval(f64::NAN).is_err());
    }

    #[test]
    fn deriv_examples() {
        let f = NonlinearitySpec::power(3.0).unwrap().with_scale(7.0).unwrap();
        assert_eq!(f.deriv(1.0).unwrap(), 84.0);
        for base in [
            NonlinearitySpec::power(2.0).unwrap(),
            NonlinearitySpec::exponential(),
            NonlinearitySpec::log_corrected(1.0, dim(3)).unwrap(),
        ] {
            assert_eq!(base.truncate(0.1).unwrap().deriv(20.0).unwrap(), 0.0);
        }
        let e = NonlinearitySpec::exponential();
        assert!((e.deriv(2.0).unwrap() - 7.389_056_098_930_65).abs() < 1e-12);
    }

    #[test]
    fn kink_takes_left_derivative() {
        let f = NonlinearitySpec::power(2.0).unwrap();
        let t = f.truncate(0.5).unwrap();
        assert_eq!(t.deriv(2.0).unwrap(), 0.5 * f.deriv(2.0).unwrap());
        assert_eq!(t.deriv(2.0 + 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn truncation_examples() {
        let f = NonlinearitySpec::power(2.0).unwrap();
        let t = f.truncate(0.5).unwrap();
        assert_eq!(t.eval(1.0).unwrap(), 2.0);
        assert_eq!(t.eval(3.0).unwrap(), 4.5);
        let a = f.truncate(0.2).unwrap().eval(5.0).unwrap();
        let b = f.truncate(0.1).unwrap().eval(5.0).unwrap();
        assert!((a - 28.8).abs() < 1e-12 && (b - 32.4).abs() < 1e-12);
        assert!(b >= a);
        assert_eq!(t.truncate(0.1), Err(Error::AlreadyTruncated));
        assert!(f.truncate(0.0).is_err());
        assert!(f.truncate(1.0).is_err());
    }

    #[test]
    fn h_examples() {
        let f = NonlinearitySpec::power(1.4).unwrap();
        let h = f.h_of(100.0, dim(10), 1.0).unwrap();
        let oracle = 100f64.powf(1.5) / 101f64.powf(1.4);
        assert!((h - oracle).abs() < 1e-12 * oracle);
        assert!((h - 1.563).abs() < 1e-3);

        let g = NonlinearitySpec::log_corrected(2.0, dim(3)).unwrap();
        let h = g.h_of(1000.0, dim(3), 1.0).unwrap();
        let oracle = (1000f64 / 1001.0).powi(5) * (E + 1000.0).ln().powi(2);
        assert!((h - oracle).abs() < 1e-11 * oracle);
        assert!((h - 47.5).abs() < 0.05);
    }

    #[test]
    fn h_of_critical_power_tends_to_one() {
        for n in [3, 5, 10] {
            let d = dim(n);
            let f = NonlinearitySpec::power(d.critical_power()).unwrap();
            let mut prev = 0.0;
            for k in 1..=12 {
                let h = f.h_of(10f64.powi(k), d, 1.0).unwrap();
                assert!(h > prev && h < 1.0);
                prev = h;
            }
            assert!((1.0 - prev) < 1e-10);
        }
    }

    #[test]
    fn h_domain() {
        let f = NonlinearitySpec::power(1.4).unwrap();
        assert!(f.h_of(1.0, dim(10), 1.0).is_err());
        assert!(f.truncate(0.1).unwrap().h_of(5.0, dim(10), 1.0).is_err());
    }

    #[test]
    fn h_survives_large_arguments() {
        let f = NonlinearitySpec::power(1.2).unwrap();
        let h = f.h_of(1e12, dim(3), 1.0).unwrap();
        let expected = (5.0 * 1e12f64.ln() - 1.2 * (1e12f64).ln_1p()).exp();
        assert!(h.is_finite() && (h - expected).abs() < 1e-9 * expected);
    }

    #[test]
    fn json_round_trip() {
        let spec = NonlinearitySpec::log_corrected(2.0, dim(3))
            .unwrap()
            .with_scale(0.5)
            .unwrap()
            .truncate(0.25)
            .unwrap();
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(
            text,
            r#"{"family":"logpower","params":{"N":3.0,"beta":2.0},"lambda":0.5,"eps":0.25}"#
        );
        let back: NonlinearitySpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);

        let bad = r#"{"family":"power","params":{},"lambda":1,"eps":null}"#;
        assert!(serde_json::from_str::<NonlinearitySpec>(bad).is_err());
    }

    #[test]
    fn monotonicity_flags() {
        assert!(NonlinearitySpec::log_corrected(1.0, dim(10)).unwrap().is_monotone());
        assert!(!NonlinearitySpec::log_corrected(10.0, dim(10)).unwrap().is_monotone());
    }
}
