//! Solution branches `a ↦ (λ(a), norms, μ₁(a))` parameterized by the center
//! value `a = u(0)`, which is single-valued through folds.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::dimension::Dimension;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::nonlinearity::NonlinearitySpec;
use crate::profiles::RadialProfile;
use crate::shooting::{shoot, ShootConfig};
use crate::stability::{assemble, principal_eigenvalue};

#[derive(Debug, Clone, PartialEq)]
pub struct BranchPoint {
    pub a: f64,
    pub lambda: f64,
    pub sup_norm: f64,
    pub l2star_norm: f64,
    /// `‖λ f(u)‖_{2N/(N+2)}`
    pub f_norm: f64,
    pub mu1: Option<f64>,
    pub profile: RadialProfile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchFailure {
    pub a: f64,
    pub error: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub spec: NonlinearitySpec,
    pub dim: Dimension,
    /// Successful points, sorted by `a`.
    pub points: Vec<BranchPoint>,
    pub failures: Vec<BranchFailure>,
    pub turning_points: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TraceConfig {
    pub shoot: ShootConfig,
    pub with_stability: bool,
    pub execution: Execution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchSummary {
    pub turning_points: Vec<f64>,
    pub asymptote_estimate: f64,
    pub failures: Vec<BranchFailure>,
}

/// `count` center values from `lo` to `hi`, linear or logarithmic.
pub fn a_grid(lo: f64, hi: f64, count: usize, log_spaced: bool) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) || count == 0 {
        return Err(Error::Domain(format!("invalid a-range [{lo}, {hi}] with {count} points")));
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    let last = (count - 1) as f64;
    let mut values: Vec<f64> = (0..count)
        .map(|i| {
            let x = i as f64 / last;
            if log_spaced {
                (lo.ln() + x * (hi.ln() - lo.ln())).exp()
            } else {
                lo + x * (hi - lo)
            }
        })
        .collect();
    values[0] = lo;
    values[count - 1] = hi;
    Ok(values)
}

pub fn trace_branch(spec: &NonlinearitySpec, dim: Dimension, a_values: &[f64], cfg: &TraceConfig) -> Result<Branch> {
    if a_values.is_empty() {
        return Err(Error::Domain("a_values must not be empty".into()));
    }
    if a_values.iter().any(|a| !(*a > 0.0 && a.is_finite())) || a_values.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain("a_values must be positive and strictly increasing".into()));
    }
    let outcomes = cfg.execution.map(a_values, |&a| branch_point(spec, dim, a, cfg));
    let mut points = Vec::with_capacity(a_values.len());
    let mut failures = Vec::new();
    for (&a, outcome) in a_values.iter().zip(outcomes) {
        match outcome {
            Ok(point) => points.push(point),
            Err(e) => failures.push(BranchFailure { a, error: e.tag().to_string(), message: e.to_string() }),
        }
    }
    let a: Vec<f64> = points.iter().map(|p| p.a).collect();
    let lambda: Vec<f64> = points.iter().map(|p| p.lambda).collect();
    let turning_points = turning_point_values(&a, &lambda).into_iter().map(|(a, _)| a).collect();
    Ok(Branch { spec: *spec, dim, points, failures, turning_points })
}

fn branch_point(spec: &NonlinearitySpec, dim: Dimension, a: f64, cfg: &TraceConfig) -> Result<BranchPoint> {
    let shot = shoot(spec, a, dim, &cfg.shoot)?;
    let profile = shot.profile;
    let grid = profile.grid();
    let source: Vec<f64> = profile.u().iter().map(|&u| shot.lambda * spec.value(u)).collect();
    let mu1 = if cfg.with_stability {
        let op = assemble(&profile, spec, shot.lambda, 0.0)?;
        Some(principal_eigenvalue(&op)?.mu1)
    } else {
        None
    };
    Ok(BranchPoint {
        a,
        lambda: shot.lambda,
        sup_norm: profile.norm_sup(),
        l2star_norm: grid.lq_norm(profile.u(), dim.sobolev_exponent()),
        f_norm: grid.lq_norm(&source, dim.dual_exponent()),
        mu1,
        profile,
    })
}

/// Sign changes of successive differences of `λ`, located at the vertex of
/// the parabola through the three points around each change. Returns
/// `(a, λ)` at every vertex.
pub fn turning_point_values(a: &[f64], lambda: &[f64]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    if a.len() < 3 {
        return out;
    }
    let mut last_sign = 0.0;
    for i in 0..a.len() - 1 {
        let d = lambda[i + 1] - lambda[i];
        if d == 0.0 {
            continue;
        }
        let sign = d.signum();
        if last_sign != 0.0 && sign != last_sign {
            out.push(parabola_vertex(&a[i - 1..=i + 1], &lambda[i - 1..=i + 1]));
        }
        last_sign = sign;
    }
    out
}

fn parabola_vertex(x: &[f64], y: &[f64]) -> (f64, f64) {
    let d01 = (y[1] - y[0]) / (x[1] - x[0]);
    let d12 = (y[2] - y[1]) / (x[2] - x[1]);
    let d012 = (d12 - d01) / (x[2] - x[0]);
    if d012 == 0.0 {
        return (x[1], y[1]);
    }
    let xv = (0.5 * (x[0] + x[1]) - d01 / (2.0 * d012)).clamp(x[0], x[2]);
    let yv = y[0] + d01 * (xv - x[0]) + d012 * (xv - x[0]) * (xv - x[1]);
    (xv, yv)
}

pub fn detect_turning_points(branch: &Branch) -> Vec<f64> {
    let (a, lambda) = branch.columns();
    turning_point_values(&a, &lambda).into_iter().map(|(a, _)| a).collect()
}

impl Branch {
    fn columns(&self) -> (Vec<f64>, Vec<f64>) {
        (self.points.iter().map(|p| p.a).collect(), self.points.iter().map(|p| p.lambda).collect())
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.columns().1
    }

    /// Mean `λ` of the last two turning points, or the last computed `λ`
    /// when the branch has fewer than two.
    pub fn asymptote_estimate(&self) -> f64 {
        let (a, lambda) = self.columns();
        let turns = turning_point_values(&a, &lambda);
        match turns.as_slice() {
            [.., (_, l1), (_, l2)] => 0.5 * (l1 + l2),
            _ => lambda.last().copied().unwrap_or(f64::NAN),
        }
    }

    pub fn summary(&self) -> BranchSummary {
        BranchSummary {
            turning_points: self.turning_points.clone(),
            asymptote_estimate: self.asymptote_estimate(),
            failures: self.failures.clone(),
        }
    }

    /// Branch CSV with header `a,lambda,sup_norm,l2star_norm,f_norm,mu1`;
    /// `mu1` is empty when stability was not computed.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("a,lambda,sup_norm,l2star_norm,f_norm,mu1\n");
        for p in &self.points {
            let mu1 = p.mu1.map(|m| format!("{m:.16e}")).unwrap_or_default();
            let _ = writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{mu1}",
                p.a, p.lambda, p.sup_norm, p.l2star_norm, p.f_norm
            );
        }
        out
    }
}
