//! Semi-stability of radial solutions: the linearized operator
//! `φ ↦ -φ'' - (N-1)φ'/r - λ f'(u) φ` on the unit ball, its principal
//! eigenpair, Hardy quotients and the algebraic thresholds for the explicit
//! singular solutions.
//!
//! The operator is discretized with the finite-volume stencil of
//! [`crate::discrete`] and symmetrized as `W^{-1/2} (K - V W) W^{-1/2}`, where
//! `W` holds the dual-cell volumes. The Dirichlet node `r = 1` is eliminated;
//! `φ'(0) = 0` is the natural condition of the stencil at the origin.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::dimension::Dimension;
use crate::discrete::{solve_tridiagonal, sturm_count, RadialStencil};
use crate::error::{Error, Result};
use crate::nonlinearity::NonlinearitySpec;
use crate::profiles::{finite_difference, RadialGrid, RadialProfile};
use crate::singular::{self, SingularSolution};

/// Default cutoff radius for singular potentials.
pub const DEFAULT_R_MIN: f64 = 1e-4;
/// `μ₁ ≥ -SEMISTABLE_TOL` counts as semi-stable.
pub const SEMISTABLE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearizedOperator {
    dim: Dimension,
    stencil: RadialStencil,
    /// Potential at the unknowns (all nodes but `r = 1`).
    potential: Vec<f64>,
    diag: Vec<f64>,
    off: Vec<f64>,
    r_min: f64,
}

impl LinearizedOperator {
    /// Operator with the potential `v` sampled at the nodes (including the
    /// origin, prepended when the grid excludes it). Nodes below `r_min` take
    /// the value at the first node at or beyond `r_min`.
    pub fn from_potential(grid: &RadialGrid, r_min: f64, v: impl Fn(f64) -> f64) -> Result<Self> {
        let nodes = with_origin(grid.nodes());
        let values: Vec<f64> = nodes.iter().map(|&r| v(r)).collect();
        Self::from_values(grid.dim(), nodes, values, r_min)
    }

    pub fn dirichlet_laplacian(grid: &RadialGrid) -> Result<Self> {
        Self::from_potential(grid, 0.0, |_| 0.0)
    }

    fn from_values(dim: Dimension, nodes: Vec<f64>, mut values: Vec<f64>, r_min: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&r_min) {
            return Err(Error::Domain(format!("r_min must lie in [0,1), got {r_min}")));
        }
        let m = nodes.len();
        if m < 3 {
            return Err(Error::InvalidGrid("operator needs at least three nodes".into()));
        }
        let first_kept = nodes.iter().position(|&r| r >= r_min).unwrap_or(m - 1);
        let cap = values[first_kept];
        for v in values.iter_mut().take(first_kept) {
            *v = cap;
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularPotential);
        }
        let stencil = RadialStencil::new(&nodes, dim);
        let unknowns = m - 1;
        values.truncate(unknowns);
        let w = &stencil.weights;
        let k = &stencil.couplings;
        let diag: Vec<f64> = (0..unknowns)
            .map(|i| {
                let left = if i > 0 { k[i - 1] } else { 0.0 };
                (left + k[i]) / w[i] - values[i]
            })
            .collect();
        let off: Vec<f64> =
            (0..unknowns - 1).map(|i| -k[i] / (w[i] * w[i + 1]).sqrt()).collect();
        Ok(LinearizedOperator { dim, stencil, potential: values, diag, off, r_min })
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    /// Operator nodes, origin first and `r = 1` last.
    pub fn nodes(&self) -> &[f64] {
        &self.stencil.nodes
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    pub fn off_diagonal(&self) -> &[f64] {
        &self.off
    }

    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    /// Number of unknowns.
    pub fn size(&self) -> usize {
        self.diag.len()
    }

    /// Discrete form `Σ k (Δφ)² - Σ w V φ²` (without the sphere area).
    /// `phi` holds values at every node; the value at `r = 1` is ignored.
    pub fn quadratic_form(&self, phi: &[f64]) -> f64 {
        let n = self.size();
        let k = &self.stencil.couplings;
        let at = |i: usize| if i < n { phi[i] } else { 0.0 };
        let energy: f64 = (0..n).map(|i| k[i] * (at(i + 1) - at(i)).powi(2)).sum();
        let potential: f64 =
            (0..n).map(|i| self.stencil.weights[i] * self.potential[i] * phi[i] * phi[i]).sum();
        energy - potential
    }

    /// Discrete `Σ w φ²` matching [`Self::quadratic_form`].
    pub fn mass(&self, phi: &[f64]) -> f64 {
        (0..self.size()).map(|i| self.stencil.weights[i] * phi[i] * phi[i]).sum()
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.size();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut radius = 0.0;
            if i > 0 {
                radius += self.off[i - 1].abs();
            }
            if i + 1 < n {
                radius += self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - radius);
            hi = hi.max(self.diag[i] + radius);
        }
        (lo, hi)
    }
}

fn with_origin(nodes: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(nodes.len() + 1);
    if nodes[0] > 0.0 {
        out.push(0.0);
    }
    out.extend_from_slice(nodes);
    out
}

/// Linearization of `-Δu = λ f(u)` at `profile`. Profiles on grids excluding
/// the origin are singular and need `r_min > 0`.
pub fn assemble(
    profile: &RadialProfile,
    spec: &NonlinearitySpec,
    lambda: f64,
    r_min: f64,
) -> Result<LinearizedOperator> {
    let grid = profile.grid();
    if grid.origin_excluded() && r_min == 0.0 {
        return Err(Error::SingularPotential);
    }
    let mut values: Vec<f64> = profile.u().iter().map(|&u| lambda * spec.slope(u)).collect();
    if grid.origin_excluded() {
        values.insert(0, f64::NAN);
        if r_min <= grid.nodes()[0] {
            values[0] = values[1];
        }
    }
    let nodes = with_origin(grid.nodes());
    LinearizedOperator::from_values(grid.dim(), nodes, values, r_min)
}

/// Linearization at an explicit singular solution, with the potential `c/r²`
/// evaluated exactly and capped at `r_min`.
pub fn assemble_singular(sol: &SingularSolution, grid: &RadialGrid, r_min: f64) -> Result<LinearizedOperator> {
    if r_min <= 0.0 {
        return Err(Error::SingularPotential);
    }
    let c = sol.potential_coefficient();
    LinearizedOperator::from_potential(grid, r_min, |r| c / r.max(r_min).powi(2))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalEigenpair {
    pub mu1: f64,
    /// Positive, normalized to unit `L²(B₁)` norm; vanishes at `r = 1`.
    pub eigenvector: RadialProfile,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenSummary {
    pub mu1: f64,
    pub iterations: usize,
}

impl PrincipalEigenpair {
    pub fn summary(&self) -> EigenSummary {
        EigenSummary { mu1: self.mu1, iterations: self.iterations }
    }

    pub fn is_semistable(&self) -> bool {
        self.mu1 >= -SEMISTABLE_TOL
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenConfig {
    pub max_iter: usize,
    /// Relative tolerance on successive Rayleigh quotients.
    pub tol: f64,
}

impl Default for EigenConfig {
    fn default() -> Self {
        EigenConfig { max_iter: 10_000, tol: 1e-10 }
    }
}

pub fn principal_eigenvalue(op: &LinearizedOperator) -> Result<PrincipalEigenpair> {
    principal_eigenvalue_with(op, &EigenConfig::default())
}

/// Shifted inverse iteration. The shift is placed just below `μ₁` using Sturm
/// counts, so each solve is well conditioned and convergence is fast.
pub fn principal_eigenvalue_with(op: &LinearizedOperator, cfg: &EigenConfig) -> Result<PrincipalEigenpair> {
    let n = op.size();
    let (mut lo, mut hi) = op.gershgorin();
    let span = (hi - lo).max(1.0);
    // keep sturm_count(lo) = 0 and sturm_count(hi) ≥ 1
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sturm_count(&op.diag, &op.off, mid) == 0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-6 * hi.abs().max(1.0) {
            break;
        }
    }
    let shift = lo - 1e-6 * span.min(hi.abs().max(1.0));

    let diag: Vec<f64> = op.diag.iter().map(|d| d - shift).collect();
    let mut lower = vec![0.0; n];
    lower[1..].copy_from_slice(&op.off);
    let mut upper = vec![0.0; n];
    upper[..n - 1].copy_from_slice(&op.off);

    let mut psi: Vec<f64> = op.stencil.weights[..n].iter().map(|w| w.sqrt()).collect();
    normalize(&mut psi);
    let mut previous = rayleigh(op, &psi);
    for iteration in 1..=cfg.max_iter {
        solve_tridiagonal(&lower, &diag, &upper, &mut psi);
        normalize(&mut psi);
        let rho = rayleigh(op, &psi);
        if (rho - previous).abs() < cfg.tol * rho.abs().max(1.0) {
            return Ok(PrincipalEigenpair {
                mu1: rho,
                eigenvector: eigenvector_profile(op, &psi)?,
                iterations: iteration,
            });
        }
        previous = rho;
    }
    Err(Error::NoConvergence { iterations: cfg.max_iter })
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
}

fn rayleigh(op: &LinearizedOperator, psi: &[f64]) -> f64 {
    let n = psi.len();
    let mut acc = 0.0;
    for i in 0..n {
        let mut bpsi = op.diag[i] * psi[i];
        if i > 0 {
            bpsi += op.off[i - 1] * psi[i - 1];
        }
        if i + 1 < n {
            bpsi += op.off[i] * psi[i + 1];
        }
        acc += psi[i] * bpsi;
    }
    acc / psi.iter().map(|x| x * x).sum::<f64>()
}

fn eigenvector_profile(op: &LinearizedOperator, psi: &[f64]) -> Result<RadialProfile> {
    let w = &op.stencil.weights;
    let mut phi: Vec<f64> = psi.iter().zip(w).map(|(p, w)| p / w.sqrt()).collect();
    phi.push(0.0);
    let sign = if phi.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
    let scale = sign / (op.dim.sphere_area() * op.mass(&phi)).sqrt();
    phi.iter_mut().for_each(|x| *x *= scale);
    let grid = RadialGrid::from_nodes(op.dim, op.nodes().to_vec())?;
    let du = finite_difference(grid.nodes(), &phi);
    RadialProfile::new(grid, phi, du)
}

/// First Dirichlet eigenvalue of `-Δ` on the unit ball, `j²_{N/2-1,1}`,
/// computed by Richardson extrapolation of two discrete solves.
pub fn dirichlet_principal_eigenvalue(dim: Dimension) -> f64 {
    let solve = |n: usize| {
        let grid = RadialGrid::uniform(dim, n).expect("valid grid");
        let op = LinearizedOperator::dirichlet_laplacian(&grid).expect("finite potential");
        principal_eigenvalue(&op).expect("Laplacian eigensolve converges").mu1
    };
    let coarse = solve(1000);
    let fine = solve(2000);
    (4.0 * fine - coarse) / 3.0
}

/// `∫ φ'² r^{N-1} / ∫ φ² r^{N-3}` by trapezoid quadrature on the profile grid.
pub fn hardy_quotient(phi: &RadialProfile) -> Result<f64> {
    hardy_quotient_with_tails(phi, 0.0, 0.0)
}

/// As [`hardy_quotient`], adding the given values of the two integrals over
/// `[0, r₀]` for profiles whose grid starts at `r₀ > 0`.
pub fn hardy_quotient_with_tails(phi: &RadialProfile, numerator_tail: f64, denominator_tail: f64) -> Result<f64> {
    let scale = phi.norm_sup();
    let last = *phi.u().last().expect("non-empty profile");
    if last.abs() > 1e-12 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::Domain(format!("test function must vanish at r = 1, got {last}")));
    }
    let n = phi.dim().as_f64();
    let grid = phi.grid();
    let du2: Vec<f64> = phi.du().iter().map(|d| d * d).collect();
    let u2: Vec<f64> = phi.u().iter().map(|u| u * u).collect();
    let num = grid.trapezoid_with_power(&du2, n - 1.0) + numerator_tail;
    let den = grid.trapezoid_with_power(&u2, n - 3.0) + denominator_tail;
    if !(den > f64::MIN_POSITIVE) {
        return Err(Error::Domain("Hardy denominator vanishes".into()));
    }
    Ok(num / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SemistabilityVerdict {
    pub semistable: bool,
    pub threshold_p: f64,
    pub lambda: f64,
    pub hardy_lhs: f64,
    pub potential_coeff: f64,
}

/// Algebraic semi-stability of `u = r^{-2/(p-1)} - 1`: `λp ≤ ((N-2)/2)²`,
/// decided in exact arithmetic on the binary value of `p`.
pub fn singular_semistable(p: f64, dim: Dimension) -> Result<SemistabilityVerdict> {
    let exact_p = singular::exact(p)?;
    let semistable = singular_semistable_exact(&exact_p, dim)?;
    let lambda = singular::power_tail_lambda_exact(dim, &exact_p);
    let coeff = &lambda * &exact_p;
    Ok(SemistabilityVerdict {
        semistable,
        threshold_p: threshold_p(dim),
        lambda: lambda.to_f64().unwrap_or(f64::NAN),
        hardy_lhs: dim.hardy_constant(),
        potential_coeff: coeff.to_f64().unwrap_or(f64::NAN),
    })
}

pub fn singular_semistable_exact(p: &BigRational, dim: Dimension) -> Result<bool> {
    if !singular::power_tail_admissible(dim, p) {
        return Err(Error::Domain(format!(
            "power-tail singular solution needs p > N/(N-2), got {}",
            p.to_f64().unwrap_or(f64::NAN)
        )));
    }
    let lambda_p = singular::power_tail_lambda_exact(dim, p) * p;
    Ok(lambda_p <= hardy_constant_exact(dim))
}

/// `((N-2)/2)²` as a rational.
pub fn hardy_constant_exact(dim: Dimension) -> BigRational {
    let half = BigRational::new(BigInt::from(dim.get()) - 2, BigInt::from(2));
    &half * &half
}

/// `(N + 2√(N-1)) / (N - 4 + 2√(N-1))`.
pub fn threshold_p(dim: Dimension) -> f64 {
    if let Some(exact) = threshold_p_exact(dim) {
        return exact.to_f64().unwrap_or(f64::NAN);
    }
    let n = dim.as_f64();
    let root = (n - 1.0).sqrt();
    (n + 2.0 * root) / (n - 4.0 + 2.0 * root)
}

/// The threshold as a rational when `N - 1` is a perfect square.
pub fn threshold_p_exact(dim: Dimension) -> Option<BigRational> {
    let m = BigInt::from(dim.get() - 1);
    let root = m.sqrt();
    if &root * &root != m {
        return None;
    }
    let n = BigInt::from(dim.get());
    let two_root = BigInt::from(2) * root;
    let den: BigInt = &n - BigInt::from(4) + &two_root;
    if den.is_zero() || den.is_negative() {
        return None;
    }
    Some(BigRational::new(n + two_root, den))
}

/// `2(N-2) ≤ ((N-2)/2)²`, i.e. `N ≥ 10`.
pub fn exp_singular_semistable(dim: Dimension) -> bool {
    let lhs = BigRational::from_integer(singular::exp_log_lambda_exact(dim));
    lhs <= hardy_constant_exact(dim)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::singular::{make_singular, SingularKind};

    fn dim(n: u32) -> Dimension {
        Dimension::new(n).unwrap()
    }

    #[test]
    fn laplacian_eigenvalue_at_n3() {
        let grid = RadialGrid::uniform(dim(3), 2000).unwrap();
        let op = LinearizedOperator::dirichlet_laplacian(&grid).unwrap();
        let pair = principal_eigenvalue(&op).unwrap();
        assert!((pair.mu1 - PI * PI).abs() < 1e-3 * PI * PI, "{}", pair.mu1);
        // eigenfunction sin(πr)/(πr) up to normalization
        let v = pair.eigenvector.u();
        let r = pair.eigenvector.r();
        assert!(v.iter().all(|&x| x >= 0.0));
        let i = 700;
        let ratio = v[i] / v[0];
        let expected = (PI * r[i]).sin() / (PI * r[i]);
        assert!((ratio - expected).abs() < 1e-4);
    }

    #[test]
    fn constant_potential_shifts_the_spectrum() {
        let grid = RadialGrid::graded(dim(5), 400, 1.5).unwrap();
        let base = principal_eigenvalue(&LinearizedOperator::dirichlet_laplacian(&grid).unwrap()).unwrap();
        let shifted =
            principal_eigenvalue(&LinearizedOperator::from_potential(&grid, 0.0, |_| 7.25).unwrap()).unwrap();
        assert!((base.mu1 - 7.25 - shifted.mu1).abs() < 1e-9 * base.mu1);
    }

    #[test]
    fn reference_eigenvalues() {
        // j_{1/2,1} = π and j_{3/2,1} = 4.493409457909064
        assert!((dirichlet_principal_eigenvalue(dim(3)) - PI * PI).abs() < 1e-6);
        let j = 4.493_409_457_909_064_f64;
        assert!((dirichlet_principal_eigenvalue(dim(5)) - j * j).abs() < 1e-5);
    }

    #[test]
    fn singular_potentials_are_exact() {
        let grid = RadialGrid::geometric(dim(10), 200, 1e-3).unwrap();
        let exp = make_singular(SingularKind::ExpLog, dim(10)).unwrap();
        let op = assemble_singular(&exp, &grid, 1e-4).unwrap();
        let r = op.nodes()[50];
        assert!((op.potential()[50] - 16.0 / (r * r)).abs() < 1e-9 * op.potential()[50]);

        let pow = make_singular(SingularKind::PowerTail { p: 3.0 }, dim(10)).unwrap();
        let profile = pow.profile(grid.clone()).unwrap();
        let op = assemble(&profile, &pow.nonlinearity(), pow.lambda(), 1e-4).unwrap();
        let r = op.nodes()[80];
        assert!((op.potential()[80] - 21.0 / (r * r)).abs() < 1e-9 * op.potential()[80]);
        assert!(matches!(
            assemble(&profile, &pow.nonlinearity(), pow.lambda(), 0.0),
            Err(Error::SingularPotential)
        ));
        assert!(matches!(assemble_singular(&pow, &grid, 0.0), Err(Error::SingularPotential)));
    }

    #[test]
    fn subcritical_singular_solution_is_stable_numerically() {
        let sol = make_singular(SingularKind::PowerTail { p: 1.3 }, dim(10)).unwrap();
        let grid = RadialGrid::graded(dim(10), 4000, 2.0).unwrap();
        let pair = principal_eigenvalue(&assemble_singular(&sol, &grid, 1e-4).unwrap()).unwrap();
        assert!(pair.mu1 >= -SEMISTABLE_TOL, "{}", pair.mu1);

        let sol = make_singular(SingularKind::PowerTail { p: 3.0 }, dim(10)).unwrap();
        let pair = principal_eigenvalue(&assemble_singular(&sol, &grid, 1e-4).unwrap()).unwrap();
        assert!(pair.mu1 < 0.0);
    }

    #[test]
    fn form_matches_eigenvalue() {
        let grid = RadialGrid::graded(dim(4), 300, 1.3).unwrap();
        let op = LinearizedOperator::from_potential(&grid, 0.0, |r| 40.0 * (1.0 - r)).unwrap();
        let pair = principal_eigenvalue(&op).unwrap();
        let phi = pair.eigenvector.u();
        assert!((op.quadratic_form(phi) / op.mass(phi) - pair.mu1).abs() < 1e-8 * pair.mu1.abs().max(1.0));
        let trial: Vec<f64> = op.nodes().iter().map(|r| 1.0 - r * r).collect();
        assert!(op.quadratic_form(&trial) / op.mass(&trial) >= pair.mu1 - 1e-10);
    }

    #[test]
    fn threshold_examples() {
        let v = singular_semistable(3.0, dim(10)).unwrap();
        assert!(!v.semistable);
        assert_eq!(v.lambda, 7.0);
        assert_eq!(v.potential_coeff, 21.0);
        assert_eq!(v.hardy_lhs, 16.0);
        assert_eq!(threshold_p_exact(dim(10)), Some(BigRational::new(4.into(), 3.into())));
        assert_eq!(threshold_p(dim(10)), 4.0 / 3.0);

        let v = singular_semistable(1.3, dim(10)).unwrap();
        assert!(v.semistable);
        assert!((v.lambda - 8.888_888_888_9).abs() < 1e-6);
        assert!((v.potential_coeff - 11.555_555_555_6).abs() < 1e-6);
        assert!(singular_semistable(1.2, dim(10)).is_err());
    }

    #[test]
    fn exp_threshold() {
        assert!(exp_singular_semistable(dim(10)));
        assert!(!exp_singular_semistable(dim(9)));
        assert!(exp_singular_semistable(dim(11)));
        assert!(!exp_singular_semistable(dim(3)));
    }

    #[test]
    fn hardy_quotient_of_polynomial() {
        // φ = 1 - r², N = 3: ∫ 4r⁴ = 4/5, ∫ (1-r²)² = 8/15, quotient 1.5
        let grid = RadialGrid::uniform(dim(3), 4000).unwrap();
        let phi = RadialProfile::from_fn(grid, |r| 1.0 - r * r, |r| -2.0 * r).unwrap();
        let q = hardy_quotient(&phi).unwrap();
        assert!((q - 1.5).abs() < 1e-6);
        assert!(q >= 0.25);
    }

    #[test]
    fn hardy_rejects_nonzero_boundary_value() {
        let grid = RadialGrid::uniform(dim(3), 10).unwrap();
        let phi = RadialProfile::from_fn(grid, |_| 1.0, |_| 0.0).unwrap();
        assert!(hardy_quotient(&phi).is_err());
    }

    #[test]
    fn summary_json() {
        let grid = RadialGrid::uniform(dim(3), 100).unwrap();
        let pair = principal_eigenvalue(&LinearizedOperator::dirichlet_laplacian(&grid).unwrap()).unwrap();
        let json = serde_json::to_value(pair.summary()).unwrap();
        assert!(json.get("mu1").is_some() && json.get("iterations").is_some());
    }
}
