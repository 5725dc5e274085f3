//! A priori bound checks along computed branches.
//!
//! Every branch point is read as one problem `-Δu = λ_k f(u)` of a sequence,
//! so `h_k(s) = s^{(N+2)/(N-2)} / (λ_k f(s))`. For `θ ∈ (0, 1]` the bound
//! compared against is
//!
//! ```text
//! h_k(‖u‖∞) ≲ ‖u‖_{2*}^{e₁(θ)} ‖λ_k f(u)‖_{2N/(N+2)}^{e₂(θ)},
//! e₁ = (N+2)/(N-2) · 2(1-θ)/(N-2θ),   e₂ = 2(1+θ)/(N-2θ)
//! ```
//!
//! with an unknown constant, so only the spread of the ratio is meaningful.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::continuation::Branch;
use crate::dimension::Dimension;
use crate::error::{Error, Result};
use crate::nonlinearity::{certify_hypotheses, Criticality, NonlinearitySpec, SampleConfig};
use crate::profiles::{finite_difference, RadialProfile};

pub const DEFAULT_THETAS: [f64; 3] = [0.25, 0.5, 1.0];
/// Growth factor across the tail that counts as divergence.
pub const DIVERGENCE_FACTOR: f64 = 10.0;
pub const MIN_TAIL: usize = 10;

/// `(e₁, e₂)` for the given `θ`.
pub fn rhs_exponents(dim: Dimension, theta: f64) -> (f64, f64) {
    let n = dim.as_f64();
    let den = n - 2.0 * theta;
    (dim.critical_power() * 2.0 * (1.0 - theta) / den, 2.0 * (1.0 + theta) / den)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaRatio {
    pub theta: f64,
    pub rhs: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundPoint {
    pub a: f64,
    pub lambda: f64,
    pub sup_norm: f64,
    pub l2star_norm: f64,
    pub f_norm: f64,
    pub h_value: f64,
    pub ratios: Vec<ThetaRatio>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaSummary {
    pub theta: f64,
    pub max_ratio: f64,
    pub median_ratio: f64,
    pub max_over_median: f64,
    /// Largest observed ratio, the empirical stand-in for the constant.
    pub c_empirical: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedPoint {
    pub a: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub dim: Dimension,
    pub thetas: Vec<f64>,
    pub points: Vec<BoundPoint>,
    pub skipped: Vec<SkippedPoint>,
    pub summary: Vec<ThetaSummary>,
}

/// Bound ratios for every successful branch point. Failed points and points
/// with `‖u‖∞ ≤ s₀` (where `h` is undefined) are listed as skipped.
pub fn evaluate_bounds(branch: &Branch, thetas: &[f64]) -> Result<BoundReport> {
    if thetas.is_empty() || thetas.iter().any(|t| !(*t > 0.0 && *t <= 1.0)) {
        return Err(Error::Domain("θ values must lie in (0, 1]".into()));
    }
    let cfg = SampleConfig::default();
    let verdict = certify_hypotheses(&branch.spec, branch.dim, &cfg).subcritical_verdict;
    if verdict != Criticality::Subcritical {
        return Err(Error::Domain(format!("{} is {verdict:?}, bounds need a subcritical f", branch.spec)));
    }
    let dim = branch.dim;
    let mut skipped: Vec<SkippedPoint> =
        branch.failures.iter().map(|f| SkippedPoint { a: f.a, reason: f.error.clone() }).collect();
    let mut points = Vec::with_capacity(branch.points.len());
    for p in &branch.points {
        let h = match branch.spec.h_of(p.sup_norm, dim, cfg.s0) {
            Ok(h) => h / p.lambda,
            Err(e) => {
                skipped.push(SkippedPoint { a: p.a, reason: e.to_string() });
                continue;
            }
        };
        let ratios = thetas
            .iter()
            .map(|&theta| {
                let (e1, e2) = rhs_exponents(dim, theta);
                let ln_rhs = e1 * p.l2star_norm.ln() + e2 * p.f_norm.ln();
                ThetaRatio { theta, rhs: ln_rhs.exp(), ratio: (h.ln() - ln_rhs).exp() }
            })
            .collect();
        points.push(BoundPoint {
            a: p.a,
            lambda: p.lambda,
            sup_norm: p.sup_norm,
            l2star_norm: p.l2star_norm,
            f_norm: p.f_norm,
            h_value: h,
            ratios,
        });
    }
    skipped.sort_by(|x, y| x.a.total_cmp(&y.a));
    let summary = thetas
        .iter()
        .enumerate()
        .map(|(j, &theta)| {
            let values: Vec<f64> = points.iter().map(|p| p.ratios[j].ratio).collect();
            let max_ratio = values.iter().copied().fold(f64::NAN, f64::max);
            let median_ratio = median(&values);
            ThetaSummary {
                theta,
                max_ratio,
                median_ratio,
                max_over_median: max_ratio / median_ratio,
                c_empirical: max_ratio,
            }
        })
        .collect();
    Ok(BoundReport { dim, thetas: thetas.to_vec(), points, skipped, summary })
}

fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        sorted[m]
    } else {
        0.5 * (sorted[m - 1] + sorted[m])
    }
}

fn theta_column(theta: f64) -> String {
    format!("ratio_t{}", format!("{theta}").replace('.', ""))
}

impl BoundReport {
    /// CSV with header `a,sup,l2star,fnorm,h` followed by one `ratio_t…`
    /// column per θ (`ratio_t025,ratio_t05,ratio_t1` for the defaults).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("a,sup,l2star,fnorm,h");
        for &t in &self.thetas {
            out.push(',');
            out.push_str(&theta_column(t));
        }
        out.push('\n');
        for p in &self.points {
            let _ = write!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                p.a, p.sup_norm, p.l2star_norm, p.f_norm, p.h_value
            );
            for r in &p.ratios {
                let _ = write!(out, ",{:.16e}", r.ratio);
            }
            out.push('\n');
        }
        out
    }

    pub fn summary_for(&self, theta: f64) -> Option<&ThetaSummary> {
        self.summary.iter().find(|s| s.theta == theta)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorollaryCheck {
    pub l2star_diverges: bool,
    pub sup_diverges: bool,
    pub consistent: bool,
    pub rule: String,
}

/// Bounded `L^{2*}` norms must come with bounded sup norms along the branch.
pub fn check_corollary(branch: &Branch) -> Result<CorollaryCheck> {
    let sup: Vec<f64> = branch.points.iter().map(|p| p.sup_norm).collect();
    let l2star: Vec<f64> = branch.points.iter().map(|p| p.l2star_norm).collect();
    corollary_from_norms(&sup, &l2star)
}

/// [`check_corollary`] on bare norm sequences ordered by increasing `a`.
pub fn corollary_from_norms(sup: &[f64], l2star: &[f64]) -> Result<CorollaryCheck> {
    let len = sup.len().min(l2star.len());
    if len < MIN_TAIL {
        return Err(Error::InsufficientTail { len, needed: MIN_TAIL });
    }
    let sup_diverges = diverges(&sup[..len]);
    let l2star_diverges = diverges(&l2star[..len]);
    Ok(CorollaryCheck {
        l2star_diverges,
        sup_diverges,
        consistent: !(sup_diverges && !l2star_diverges),
        rule: format!("strictly increasing with last/first >= {DIVERGENCE_FACTOR}"),
    })
}

fn diverges(values: &[f64]) -> bool {
    let increasing = values.windows(2).all(|w| w[1] > w[0]);
    let first = values[0];
    let last = values[values.len() - 1];
    increasing && first > 0.0 && last / first >= DIVERGENCE_FACTOR
}

/// Relative defect `|∫|∇u|² - ∫ λ f(u) u| / ∫|∇u|²` of the weak formulation
/// tested with `u` itself. Both integrals use the trapezoid rule with the
/// Hermite end correction `h²/12 (g'ᵢ - g'ᵢ₊₁)` on every cell, `g'` from finite
/// differences. Returns 0 when both integrals vanish.
pub fn energy_identity_check(profile: &RadialProfile, spec: &NonlinearitySpec, lambda: f64) -> f64 {
    let n = profile.dim().as_f64();
    let r = profile.r();
    let weight = |i: usize| if r[i] == 0.0 { 0.0 } else { r[i].powf(n - 1.0) };
    let gradient: Vec<f64> = (0..r.len()).map(|i| profile.du()[i].powi(2) * weight(i)).collect();
    let source: Vec<f64> =
        (0..r.len()).map(|i| lambda * spec.value(profile.u()[i]) * profile.u()[i] * weight(i)).collect();
    let energy = corrected_trapezoid(r, &gradient);
    let work = corrected_trapezoid(r, &source);
    if energy == 0.0 && work == 0.0 {
        return 0.0;
    }
    (energy - work).abs() / energy.abs()
}

fn corrected_trapezoid(x: &[f64], g: &[f64]) -> f64 {
    let dg = finite_difference(x, g);
    (0..x.len() - 1)
        .map(|i| {
            let h = x[i + 1] - x[i];
            0.5 * h * (g[i] + g[i + 1]) + h * h / 12.0 * (dg[i] - dg[i + 1])
        })
        .sum()
}
