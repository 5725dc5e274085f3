//! Classical radial solutions by first-zero rescaling.
//!
//! For an autonomous `f`, the solution `v` of `v'' + (N-1)v'/s + f(v) = 0`,
//! `v(0) = a`, `v'(0) = 0` with first zero `s₀` gives `u(r) = v(s₀ r)`, a
//! solution of `-Δu = λ f(u)` on the unit ball with `λ = s₀²`.
//!
//! The IVP is integrated in the Emden–Fowler variable `t = ln s` with
//! `y₁ = v`, `y₂ = s v'`:
//!
//! ```text
//! y₁' = y₂,    y₂' = -(N-2) y₂ - e^{2t} f(y₁)
//! ```
//!
//! A uniform step in `t` resolves every length scale of the profile, which
//! matters once `a` is large and the core of the solution is tiny. The
//! removable singularity at `s = 0` is bridged by the Taylor series of `v`.

use serde::{Deserialize, Serialize};

use crate::dimension::Dimension;
use crate::error::{Error, Result};
use crate::nonlinearity::NonlinearitySpec;
use crate::profiles::{RadialGrid, RadialProfile};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootConfig {
    /// Base RK4 step in `t = ln s`.
    pub dt: f64,
    /// Integration gives up with `NoZero` beyond this `s`.
    pub s_max: f64,
    /// Bisection target `|v(s₀)|`.
    pub zero_tol: f64,
    /// Halving stops once successive first zeros differ by less than
    /// `rel_tol · max(1, s₀)`.
    pub rel_tol: f64,
    pub max_halvings: u32,
    /// Series start `s = start_factor · ℓ`, `ℓ` the intrinsic length at `a`.
    pub start_factor: f64,
    /// Profile grid: graded `(i/n)^γ` nodes, refined geometrically around the core.
    pub grid_n: usize,
    pub grid_gamma: f64,
}

impl Default for ShootConfig {
    fn default() -> Self {
        ShootConfig {
            dt: 1e-2,
            s_max: 1e3,
            zero_tol: 1e-12,
            rel_tol: 1e-9,
            max_halvings: 12,
            start_factor: 1e-3,
            grid_n: 2000,
            grid_gamma: 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorStats {
    /// RK4 steps over all passes.
    pub steps: u64,
    pub halvings: u32,
    /// Step used by the final pass.
    pub dt_final: f64,
    pub s_start: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShotResult {
    pub a: f64,
    pub lambda: f64,
    pub first_zero: f64,
    pub profile: RadialProfile,
    pub stats: IntegratorStats,
}

/// `v''(0) = -f(a)/N`.
pub fn regularize_origin(spec: &NonlinearitySpec, a: f64, dim: Dimension) -> f64 {
    -spec.value(a) / dim.as_f64()
}

struct Ode<'a> {
    spec: &'a NonlinearitySpec,
    dim: f64,
    a: f64,
    f_a: f64,
    df_a: f64,
}

type State = [f64; 2];

impl<'a> Ode<'a> {
    fn new(spec: &'a NonlinearitySpec, a: f64, dim: Dimension) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Domain(format!("center value must be positive, got {a}")));
        }
        let f_a = spec.value(a);
        if !(f_a > 0.0 && spec.value(0.0) > 0.0 && f_a.is_finite()) {
            return Err(Error::Domain(format!("f must be positive on [0, a], f(a) = {f_a}")));
        }
        Ok(Ode { spec, dim: dim.as_f64(), a, f_a, df_a: spec.slope(a) })
    }

    /// RK4 stages may step past the first zero; `f` is frozen at `f(0)` there.
    fn rhs(&self, t: f64, y: State) -> State {
        [y[1], -(self.dim - 2.0) * y[1] - (2.0 * t).exp() * self.spec.value(y[0].max(0.0))]
    }

    fn rk4(&self, t: f64, y: State, h: f64) -> State {
        let k1 = self.rhs(t, y);
        let k2 = self.rhs(t + 0.5 * h, [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
        let k3 = self.rhs(t + 0.5 * h, [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
        let k4 = self.rhs(t + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
        [
            y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ]
    }

    /// Length over which `v` changes by `O(a)`.
    fn length_scale(&self) -> f64 {
        let rate = (self.f_a / self.a).max(self.f_a).max(self.df_a);
        1.0 / rate.sqrt()
    }

    /// `(v, v')` from the fourth-order series about the origin.
    fn series(&self, s: f64) -> (f64, f64) {
        let n = self.dim;
        let (f, df) = (self.f_a, self.df_a);
        let s2 = s * s;
        let v = self.a - f * s2 / (2.0 * n) + f * df * s2 * s2 / (8.0 * n * (n + 2.0));
        let dv = -f * s / n + f * df * s2 * s / (2.0 * n * (n + 2.0));
        (v, dv)
    }

    fn start(&self, s_start: f64) -> (f64, State) {
        let (v, dv) = self.series(s_start);
        (s_start.ln(), [v, s_start * dv])
    }
}

struct Crossing {
    t: f64,
    y: State,
    steps: u64,
}

fn integrate_to_zero(ode: &Ode, s_start: f64, dt: f64, cfg: &ShootConfig) -> Result<Crossing> {
    let (t0, mut y) = ode.start(s_start);
    let t_max = cfg.s_max.ln();
    let mut steps = 0u64;
    for k in 0u64.. {
        let t = t0 + k as f64 * dt;
        if t > t_max {
            return Err(Error::NoZero { s_max: cfg.s_max });
        }
        let next = ode.rk4(t, y, dt);
        steps += 1;
        if !(next[0].is_finite() && next[1].is_finite()) {
            return Err(Error::StiffFailure { step: dt });
        }
        if next[0] <= 0.0 {
            let (mut lo, mut hi) = (0.0, dt);
            let mut best = (dt, next);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let ym = ode.rk4(t, y, mid);
                steps += 1;
                if ym[0] > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if ym[0].abs() < best.1[0].abs() {
                    best = (mid, ym);
                }
                if ym[0].abs() <= cfg.zero_tol || hi - lo <= f64::EPSILON * (t.abs() + dt) {
                    break;
                }
            }
            // one Newton step on the residual |v| ≤ zero_tol, using dv/dt = y₂
            let (h, y_cross) = best;
            let correction = if y_cross[1] < 0.0 { -y_cross[0] / y_cross[1] } else { 0.0 };
            return Ok(Crossing { t: t + h + correction, y: [0.0, y_cross[1]], steps });
        }
        y = next;
    }
    unreachable!("the step loop only exits by returning")
}

/// First zero `s₀` of the IVP with center value `a`, refined by step halving.
pub fn first_zero(spec: &NonlinearitySpec, a: f64, dim: Dimension, cfg: &ShootConfig) -> Result<(f64, IntegratorStats)> {
    let ode = Ode::new(spec, a, dim)?;
    let (s0, _, stats) = converge(&ode, cfg)?;
    Ok((s0, stats))
}

fn converge(ode: &Ode, cfg: &ShootConfig) -> Result<(f64, State, IntegratorStats)> {
    let s_start = cfg.start_factor * ode.length_scale();
    let mut dt = cfg.dt;
    let mut previous = integrate_to_zero(ode, s_start, dt, cfg)?;
    let mut steps = previous.steps;
    for halving in 1..=cfg.max_halvings {
        dt *= 0.5;
        let current = integrate_to_zero(ode, s_start, dt, cfg)?;
        steps += current.steps;
        let (s_prev, s_cur) = (previous.t.exp(), current.t.exp());
        if (s_cur - s_prev).abs() < cfg.rel_tol * s_cur.max(1.0) {
            let stats = IntegratorStats { steps, halvings: halving, dt_final: dt, s_start };
            return Ok((s_cur, current.y, stats));
        }
        previous = current;
    }
    Err(Error::StiffFailure { step: dt })
}

/// Shoots from `u(0) = a` and samples the rescaled solution on the default
/// profile grid.
pub fn shoot(spec: &NonlinearitySpec, a: f64, dim: Dimension, cfg: &ShootConfig) -> Result<ShotResult> {
    let ode = Ode::new(spec, a, dim)?;
    let (s0, crossing, stats) = converge(&ode, cfg)?;
    let core = ode.length_scale() / s0;
    let grid = profile_grid(dim, cfg, core)?;
    finish(&ode, s0, crossing, stats, grid)
}

/// As [`shoot`], sampling the profile on a caller-supplied grid containing the origin.
pub fn shoot_on_grid(
    spec: &NonlinearitySpec,
    a: f64,
    grid: RadialGrid,
    cfg: &ShootConfig,
) -> Result<ShotResult> {
    if grid.origin_excluded() {
        return Err(Error::InvalidGrid("shooting profiles need a grid containing r = 0".into()));
    }
    let ode = Ode::new(spec, a, grid.dim())?;
    let (s0, crossing, stats) = converge(&ode, cfg)?;
    finish(&ode, s0, crossing, stats, grid)
}

fn finish(ode: &Ode, s0: f64, crossing: State, mut stats: IntegratorStats, grid: RadialGrid) -> Result<ShotResult> {
    let dt = stats.dt_final;
    let (mut t, mut y) = ode.start(stats.s_start);
    let t_start = t;
    let nodes = grid.nodes();
    let mut u = Vec::with_capacity(nodes.len());
    let mut du = Vec::with_capacity(nodes.len());
    for &r in nodes {
        if r == 0.0 {
            u.push(ode.a);
            du.push(0.0);
        } else if r == 1.0 {
            u.push(0.0);
            du.push(crossing[1]);
        } else if s0 * r <= stats.s_start {
            let (v, dv) = ode.series(s0 * r);
            u.push(v);
            du.push(s0 * dv);
        } else {
            let target = (s0 * r).ln().max(t_start);
            while t < target {
                let h = dt.min(target - t);
                y = ode.rk4(t, y, h);
                t = if h == target - t { target } else { t + h };
                stats.steps += 1;
            }
            u.push(y[0]);
            du.push(y[1] / r);
        }
    }
    let profile = RadialProfile::new(grid, u, du)?;
    Ok(ShotResult { a: ode.a, lambda: s0 * s0, first_zero: s0, profile, stats })
}

/// Graded nodes, with the innermost ones replaced by 40-per-decade geometric
/// nodes starting at `core/100` whenever the core is finer than the graded
/// grid. The geometric part runs until the graded neighbour ratio drops below
/// the geometric one, so `1/r²`-like potentials stay resolved.
fn profile_grid(dim: Dimension, cfg: &ShootConfig, core: f64) -> Result<RadialGrid> {
    let base = RadialGrid::graded(dim, cfg.grid_n, cfg.grid_gamma)?;
    let nodes = base.nodes();
    let lo = 0.01 * core;
    if !(lo < nodes[1]) {
        return Ok(base);
    }
    let ratio = 10f64.powf(1.0 / 40.0);
    let join = (1..nodes.len() - 1)
        .find(|&i| nodes[i + 1] / nodes[i] <= ratio && nodes[i] > lo)
        .unwrap_or(nodes.len() - 1);
    let decades = (nodes[join] / lo).log10();
    let count = (decades * 40.0).ceil() as usize;
    let mut refined = Vec::with_capacity(nodes.len() - join + count + 1);
    refined.push(0.0);
    refined.extend((0..count).map(|i| lo * 10f64.powf(decades * i as f64 / count as f64)));
    refined.extend_from_slice(&nodes[join..]);
    RadialGrid::from_nodes(dim, refined)
}

/// Minimal solution at a prescribed `λ`: bisection on the center value over
/// the initial increasing part of the branch.
pub fn shoot_at_lambda(spec: &NonlinearitySpec, lambda: f64, dim: Dimension, cfg: &ShootConfig) -> Result<ShotResult> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Domain(format!("λ must be positive, got {lambda}")));
    }
    let lam = |a: f64| first_zero(spec, a, dim, cfg).map(|(s0, _)| s0 * s0);
    let (mut lo, mut lam_lo) = (0.0, 0.0);
    let mut hi = 1e-3;
    loop {
        let lam_hi = lam(hi)?;
        if lam_hi >= lambda {
            break;
        }
        if lam_hi <= lam_lo {
            return Err(Error::Domain(format!(
                "λ = {lambda} lies beyond the first fold of the branch (max ≈ {lam_lo})"
            )));
        }
        lo = hi;
        lam_lo = lam_hi;
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::Domain(format!("no minimal solution found for λ = {lambda}")));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-14 * hi {
            break;
        }
        if lam(mid)? < lambda {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    shoot(spec, 0.5 * (lo + hi), dim, cfg)
}
