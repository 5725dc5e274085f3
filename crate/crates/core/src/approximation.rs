//! Truncated nonlinearities `f_ε` and monotone sub/supersolution iteration.
//!
//! The discrete problem is the finite-volume system `A u = W a f_ε(u)` with
//! `u = 0` at `r = 1`, where `A` is the stiffness matrix of
//! [`crate::discrete`], `W` the dual-cell volumes and `a(r)` an optional
//! spatial multiplier. One sweep solves
//!
//! ```text
//! (A + K W) u^{n+1} = W (a f_ε(u^n) + K u^n)
//! ```
//!
//! which is order preserving once `K ≥ sup f_ε'` on the bracketing interval.
//! Grids that exclude the origin carry a Dirichlet condition at their first
//! node equal to the supersolution's value there.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::discrete::{solve_tridiagonal, RadialStencil};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::nonlinearity::NonlinearitySpec;
use crate::profiles::{RadialGrid, RadialProfile};
use crate::singular::SingularSolution;

/// Positive weight `a(r)` multiplying the nonlinearity, with a declared Hölder
/// bound `|a(r) - a(s)| ≤ C |r - s|^α` that is checked on the grid.
#[derive(Clone)]
pub struct SpatialMultiplier {
    pub a: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub holder_exponent: f64,
    pub holder_constant: f64,
}

impl fmt::Debug for SpatialMultiplier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpatialMultiplier")
            .field("holder_exponent", &self.holder_exponent)
            .field("holder_constant", &self.holder_constant)
            .finish_non_exhaustive()
    }
}

impl SpatialMultiplier {
    fn sample(&self, nodes: &[f64]) -> Result<Vec<f64>> {
        if !(self.holder_exponent > 0.0 && self.holder_exponent <= 1.0 && self.holder_constant >= 0.0) {
            return Err(Error::Domain("Hölder exponent must lie in (0,1] with a nonnegative constant".into()));
        }
        let values: Vec<f64> = nodes.iter().map(|&r| (self.a)(r)).collect();
        if let Some(i) = values.iter().position(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::Domain(format!("multiplier must be positive, a({}) = {}", nodes[i], values[i])));
        }
        for i in 0..nodes.len() - 1 {
            let bound = self.holder_constant * (nodes[i + 1] - nodes[i]).powf(self.holder_exponent);
            if (values[i + 1] - values[i]).abs() > bound * (1.0 + 1e-12) + 1e-15 {
                return Err(Error::Domain(format!("multiplier violates its Hölder bound near r = {}", nodes[i])));
            }
        }
        Ok(values)
    }
}

#[derive(Debug, Clone)]
pub struct IterationConfig {
    /// Shift `K`; `None` selects `1.1 · max f_ε'` over `[0, ‖super‖∞]`.
    pub k: Option<f64>,
    pub tol_sup: f64,
    pub max_iter: usize,
    pub multiplier: Option<SpatialMultiplier>,
    /// Used for the independent runs of an ε schedule.
    pub execution: Execution,
}

impl Default for IterationConfig {
    fn default() -> Self {
        IterationConfig { k: None, tol_sup: 1e-10, max_iter: 100_000, multiplier: None, execution: Execution::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationOutcome {
    pub u_min: RadialProfile,
    pub u_max: RadialProfile,
    pub iterations_min: usize,
    pub iterations_max: usize,
    /// `‖u - T(u)‖∞` of the returned iterates, `T` one sweep.
    pub residual_min: f64,
    pub residual_max: f64,
    pub k: f64,
}

struct Scheme {
    stencil: RadialStencil,
    multiplier: Vec<f64>,
    /// First unknown: 0, or 1 when the first node carries Dirichlet data.
    lo: usize,
    /// Last unknown; the node `r = 1` is always Dirichlet.
    hi: usize,
    left_value: f64,
}

impl Scheme {
    fn new(grid: &RadialGrid, multiplier: Option<&SpatialMultiplier>, left_value: f64) -> Result<Self> {
        let nodes = grid.nodes();
        let multiplier = match multiplier {
            Some(m) => m.sample(nodes)?,
            None => vec![1.0; nodes.len()],
        };
        let lo = usize::from(grid.origin_excluded());
        Ok(Scheme { stencil: RadialStencil::new(nodes, grid.dim()), multiplier, lo, hi: nodes.len() - 2, left_value })
    }

    /// `(A u)_i - w_i a_i f(u_i)` at every unknown, using `u`'s own boundary values.
    fn defect(&self, spec: &NonlinearitySpec, u: &[f64]) -> Vec<(f64, f64)> {
        (self.lo..=self.hi)
            .map(|i| {
                let flux = self.stencil.apply_at(u, i);
                let source = self.stencil.weights[i] * self.multiplier[i] * spec.value(u[i]);
                let scale = flux.abs().max(source.abs()).max(
                    self.stencil.couplings[i] * u[i + 1].abs()
                        + if i > 0 { self.stencil.couplings[i - 1] * u[i - 1].abs() } else { 0.0 },
                );
                (flux - source, scale)
            })
            .collect()
    }

    fn sweep(&self, spec: &NonlinearitySpec, k: f64, u: &[f64]) -> Vec<f64> {
        let s = &self.stencil;
        let n = self.hi - self.lo + 1;
        let mut lower = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut upper = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        for (j, i) in (self.lo..=self.hi).enumerate() {
            let left = if i > 0 { s.couplings[i - 1] } else { 0.0 };
            let right = s.couplings[i];
            lower[j] = -left;
            upper[j] = -right;
            diag[j] = left + right + k * s.weights[i];
            rhs[j] = s.weights[i] * (self.multiplier[i] * spec.value(u[i]) + k * u[i]);
        }
        if self.lo == 1 {
            rhs[0] += s.couplings[0] * self.left_value;
        }
        solve_tridiagonal(&lower, &diag, &upper, &mut rhs);
        let mut next = vec![0.0; s.len()];
        if self.lo == 1 {
            next[0] = self.left_value;
        }
        next[self.lo..=self.hi].copy_from_slice(&rhs);
        next
    }
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// `1.1 · max f'` sampled at 1001 points of `[0, top]`.
pub fn default_shift(spec: &NonlinearitySpec, top: f64) -> f64 {
    let max_slope = (0..=1000)
        .map(|i| spec.slope(top * i as f64 / 1000.0))
        .fold(0.0, f64::max);
    1.1 * max_slope
}

/// Minimal and maximal discrete solutions in the order interval `[sub, super]`.
pub fn monotone_iterate(
    spec: &NonlinearitySpec,
    sub: &RadialProfile,
    sup: &RadialProfile,
    cfg: &IterationConfig,
) -> Result<IterationOutcome> {
    let grid = sup.grid();
    if sub.grid() != grid {
        return Err(Error::InvalidGrid("sub- and supersolution must share a grid".into()));
    }
    let (lower, upper) = (sub.u(), sup.u());
    let top = sup.norm_sup();
    let tol = 1e-12 * top.max(1.0);
    if let Some(i) = (0..lower.len()).find(|&i| lower[i] > upper[i] + tol) {
        return Err(Error::NotBracketed { node: i });
    }
    if upper.last().copied().unwrap_or(0.0) < -tol || lower.last().copied().unwrap_or(0.0) > tol {
        return Err(Error::NotBracketed { node: lower.len() - 1 });
    }
    let scheme = Scheme::new(grid, cfg.multiplier.as_ref(), upper[0])?;
    for (j, (d, scale)) in scheme.defect(spec, lower).into_iter().enumerate() {
        if d > 1e-12 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::NotBracketed { node: scheme.lo + j });
        }
    }
    for (j, (d, scale)) in scheme.defect(spec, upper).into_iter().enumerate() {
        if d < -1e-12 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::NotBracketed { node: scheme.lo + j });
        }
    }
    let k = match cfg.k {
        Some(k) if k >= 0.0 && k.is_finite() => k,
        Some(k) => return Err(Error::Domain(format!("shift K must be nonnegative, got {k}"))),
        None => default_shift(spec, top),
    };

    let run = |start: &[f64], upward: bool| -> Result<(Vec<f64>, usize, f64)> {
        let mut u = start.to_vec();
        if scheme.lo == 1 {
            u[0] = scheme.left_value;
        }
        *u.last_mut().expect("non-empty") = 0.0;
        for iteration in 1..=cfg.max_iter {
            let next = scheme.sweep(spec, k, &u);
            for i in 0..next.len() {
                let monotone = if upward { next[i] >= u[i] - tol } else { next[i] <= u[i] + tol };
                let inside = next[i] >= lower[i] - tol && next[i] <= upper[i] + tol;
                if !(monotone && inside) {
                    return Err(Error::MonotonicityViolation { iteration, node: i });
                }
            }
            let step = sup_diff(&next, &u);
            u = next;
            if step < cfg.tol_sup {
                let residual = sup_diff(&scheme.sweep(spec, k, &u), &u);
                return Ok((u, iteration, residual));
            }
        }
        Err(Error::NoConvergence { iterations: cfg.max_iter })
    };
    let (u_min, iterations_min, residual_min) = run(lower, true)?;
    let (u_max, iterations_max, residual_max) = run(upper, false)?;
    let symmetric = !grid.origin_excluded();
    Ok(IterationOutcome {
        u_min: RadialProfile::from_values(grid.clone(), u_min, symmetric)?,
        u_max: RadialProfile::from_values(grid.clone(), u_max, symmetric)?,
        iterations_min,
        iterations_max,
        residual_min,
        residual_max,
        k,
    })
}

/// Samples a singular solution as a supersolution on a geometric grid
/// `[r₁, 1]`, origin excluded.
pub fn singular_supersolution(sol: &SingularSolution, n: usize, r1: f64) -> Result<RadialProfile> {
    sol.profile(RadialGrid::geometric(sol.dim(), n, r1)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpsRun {
    pub eps: f64,
    pub outcome: IterationOutcome,
    pub sup_norm: f64,
    pub h1_seminorm: f64,
    pub sup_diff_to_target: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsReport {
    pub eps: f64,
    pub iterations: usize,
    pub sup_norm: f64,
    pub h1_seminorm: f64,
    pub sup_diff_to_target: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApproximationRun {
    /// Strictly decreasing.
    pub eps: Vec<f64>,
    pub runs: Vec<EpsRun>,
    pub supersolution_sup: f64,
    pub supersolution_h1: f64,
    /// Linear extrapolation to `ε = 0` of the minimal solutions at the last two `ε`.
    pub limit: Option<RadialProfile>,
}

impl ApproximationRun {
    pub fn report(&self) -> Vec<EpsReport> {
        self.runs
            .iter()
            .map(|r| EpsReport {
                eps: r.eps,
                iterations: r.outcome.iterations_min,
                sup_norm: r.sup_norm,
                h1_seminorm: r.h1_seminorm,
                sup_diff_to_target: r.sup_diff_to_target,
            })
            .collect()
    }
}

/// Runs the minimal/maximal iteration for `f_ε` at every `ε` of a strictly
/// decreasing schedule, between `0` and `supersolution`, then checks that
/// the minimal solutions increase as `ε` decreases.
pub fn approximate_weak_solution(
    spec: &NonlinearitySpec,
    supersolution: &RadialProfile,
    eps_schedule: &[f64],
    target: Option<&RadialProfile>,
    cfg: &IterationConfig,
) -> Result<ApproximationRun> {
    if spec.is_truncated() {
        return Err(Error::AlreadyTruncated);
    }
    if !spec.is_monotone() || spec.value(0.0) < 0.0 {
        return Err(Error::Domain(format!("{spec} is not nonnegative and nondecreasing")));
    }
    if eps_schedule.is_empty() || eps_schedule.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Domain("ε schedule must be non-empty and strictly decreasing".into()));
    }
    if let Some(t) = target {
        if t.grid() != supersolution.grid() {
            return Err(Error::InvalidGrid("target must share the supersolution grid".into()));
        }
    }
    let truncated: Vec<NonlinearitySpec> =
        eps_schedule.iter().map(|&e| spec.truncate(e)).collect::<Result<_>>()?;
    let sub = RadialProfile::zeros(supersolution.grid().clone());
    let outcomes = cfg.execution.map(&truncated, |f| monotone_iterate(f, &sub, supersolution, cfg));
    let mut runs = Vec::with_capacity(outcomes.len());
    for (&eps, outcome) in eps_schedule.iter().zip(outcomes) {
        let outcome = outcome?;
        let u = &outcome.u_min;
        runs.push(EpsRun {
            eps,
            sup_norm: u.norm_sup(),
            h1_seminorm: u.seminorm_h1(),
            sup_diff_to_target: target.map(|t| sup_diff(u.u(), t.u())),
            outcome,
        });
    }
    let tol = 1e-12 * supersolution.norm_sup().max(1.0);
    for (j, pair) in runs.windows(2).enumerate() {
        let (coarse, fine) = (pair[0].outcome.u_min.u(), pair[1].outcome.u_min.u());
        if let Some(node) = (0..coarse.len()).find(|&i| coarse[i] > fine[i] + tol) {
            return Err(Error::MonotonicityViolation { iteration: j + 1, node });
        }
    }
    let limit = match runs.as_slice() {
        [.., first, second] => {
            let w = second.eps / (first.eps - second.eps);
            let values: Vec<f64> = second
                .outcome
                .u_min
                .u()
                .iter()
                .zip(first.outcome.u_min.u())
                .map(|(u2, u1)| u2 + (u2 - u1) * w)
                .collect();
            let grid = supersolution.grid().clone();
            let symmetric = !grid.origin_excluded();
            Some(RadialProfile::from_values(grid, values, symmetric)?)
        }
        _ => None,
    };
    Ok(ApproximationRun {
        eps: eps_schedule.to_vec(),
        runs,
        supersolution_sup: supersolution.norm_sup(),
        supersolution_h1: supersolution.seminorm_h1(),
        limit,
    })
}
