//! The explicit singular solutions on the unit ball:
//!
//! * `u(r) = -2 log r` for `f(s) = e^s` at `λ = 2(N-2)`;
//! * `u(r) = r^{-2/(p-1)} - 1` for `f(s) = (1+s)^p`, `p > N/(N-2)`,
//!   at `λ = (2/(p-1)) (N - 2p/(p-1))`.
//!
//! Sobolev membership is decided by comparing exponents; quadrature only
//! corroborates.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, gamma_ur};

use crate::dimension::Dimension;
use crate::error::{Error, Result};
use crate::nonlinearity::NonlinearitySpec;
use crate::profiles::{RadialGrid, RadialProfile};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SingularKind {
    ExpLog,
    PowerTail { p: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SobolevSpace {
    /// `H¹₀(B₁)`; the reported norm is the Dirichlet seminorm.
    H10,
    /// `W^{1,N/(N-1)}₀(B₁)`; the reported norm is the gradient seminorm.
    W1NOverNm1,
    /// `L^{2*}(B₁)`
    L2Star,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub member: bool,
    /// Closed-form norm, when one exists.
    pub norm: Option<f64>,
    /// Quadrature value with the analytic origin tail added.
    pub numeric_norm: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingularSolution {
    kind: SingularKind,
    dim: Dimension,
    lambda: f64,
}

/// `λ = (2/(p-1)) (N - 2p/(p-1))` in exact rational arithmetic.
pub fn power_tail_lambda_exact(dim: Dimension, p: &BigRational) -> BigRational {
    let one = BigRational::one();
    let two = BigRational::from_integer(BigInt::from(2));
    let n = BigRational::from_integer(BigInt::from(dim.get()));
    let pm1 = p - &one;
    (&two / &pm1) * (n - &two * p / &pm1)
}

/// `λ = 2(N-2)`.
pub fn exp_log_lambda_exact(dim: Dimension) -> BigInt {
    BigInt::from(2) * (BigInt::from(dim.get()) - 2)
}

/// Exact test of `p > N/(N-2)`, the existence range of the power-tail solution.
pub(crate) fn power_tail_admissible(dim: Dimension, p: &BigRational) -> bool {
    let n = BigInt::from(dim.get());
    p * BigRational::from_integer(&n - 2) > BigRational::from_integer(n)
}

pub(crate) fn exact(p: f64) -> Result<BigRational> {
    BigRational::from_float(p).ok_or_else(|| Error::Domain(format!("p = {p} is not finite")))
}

pub fn make_singular(kind: SingularKind, dim: Dimension) -> Result<SingularSolution> {
    let lambda = match kind {
        SingularKind::ExpLog => 2.0 * (dim.as_f64() - 2.0),
        SingularKind::PowerTail { p } => {
            let exact_p = exact(p)?;
            if !power_tail_admissible(dim, &exact_p) {
                return Err(Error::Domain(format!(
                    "power-tail singular solution needs p > N/(N-2) = {}, got {p}",
                    dim.as_f64() / (dim.as_f64() - 2.0)
                )));
            }
            power_tail_lambda_exact(dim, &exact_p).to_f64().unwrap_or(f64::NAN)
        }
    };
    Ok(SingularSolution { kind, dim, lambda })
}

impl SingularSolution {
    pub fn kind(&self) -> SingularKind {
        self.kind
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `2/(p-1)` for the power tail, `0` for the logarithm.
    fn tail_exponent(&self) -> f64 {
        match self.kind {
            SingularKind::ExpLog => 0.0,
            SingularKind::PowerTail { p } => 2.0 / (p - 1.0),
        }
    }

    /// The nonlinearity `f` (unit scale) this solution solves `-Δu = λ f(u)` for.
    pub fn nonlinearity(&self) -> NonlinearitySpec {
        match self.kind {
            SingularKind::ExpLog => NonlinearitySpec::exponential(),
            SingularKind::PowerTail { p } => {
                NonlinearitySpec::power(p).expect("admissible p exceeds 1")
            }
        }
    }

    pub fn u(&self, r: f64) -> f64 {
        match self.kind {
            SingularKind::ExpLog => -2.0 * r.ln(),
            SingularKind::PowerTail { .. } => r.powf(-self.tail_exponent()) - 1.0,
        }
    }

    pub fn du(&self, r: f64) -> f64 {
        match self.kind {
            SingularKind::ExpLog => -2.0 / r,
            SingularKind::PowerTail { .. } => {
                let b = self.tail_exponent();
                -b * r.powf(-b - 1.0)
            }
        }
    }

    pub fn d2u(&self, r: f64) -> f64 {
        match self.kind {
            SingularKind::ExpLog => 2.0 / (r * r),
            SingularKind::PowerTail { .. } => {
                let b = self.tail_exponent();
                b * (b + 1.0) * r.powf(-b - 2.0)
            }
        }
    }

    /// Linearization potential `λ f'(u(r))`; equals `c/r²` for both kinds.
    pub fn potential(&self, r: f64) -> f64 {
        self.lambda * self.nonlinearity().slope(self.u(r))
    }

    /// Coefficient `c` of the potential `c/r²`: `2(N-2)` or `λp`.
    pub fn potential_coefficient(&self) -> f64 {
        match self.kind {
            SingularKind::ExpLog => self.lambda,
            SingularKind::PowerTail { p } => self.lambda * p,
        }
    }

    /// Pointwise residual of `-u'' - (N-1)u'/r - λ f(u)` and the magnitude of
    /// its largest term.
    pub fn residual_at(&self, r: f64) -> (f64, f64) {
        let n = self.dim.as_f64();
        let second = self.d2u(r);
        let first = (n - 1.0) * self.du(r) / r;
        let source = self.lambda * self.nonlinearity().value(self.u(r));
        let res = -(second + first) - source;
        (res.abs(), second.abs().max(first.abs()).max(source.abs()))
    }

    /// Maximum relative residual over the sample radii (all must be positive).
    pub fn residual(&self, samples: &[f64]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for &r in samples {
            if !(r > 0.0 && r <= 1.0) {
                return Err(Error::Domain(format!("residual samples must lie in (0,1], got {r}")));
            }
            let (res, scale) = self.residual_at(r);
            worst = worst.max(res / scale);
        }
        Ok(worst)
    }

    /// Samples the solution on a grid that excludes the origin.
    pub fn profile(&self, grid: RadialGrid) -> Result<RadialProfile> {
        if !grid.origin_excluded() {
            return Err(Error::InvalidGrid("singular profiles need a grid excluding r = 0".into()));
        }
        RadialProfile::from_fn(grid, |r| self.u(r), |r| self.du(r))
    }

    /// Exponent comparison deciding membership.
    pub fn is_member(&self, space: SobolevSpace) -> bool {
        let n = self.dim.as_f64();
        match self.kind {
            SingularKind::ExpLog => true,
            SingularKind::PowerTail { p } => {
                let pe = exact(p).expect("finite p");
                let nn = BigInt::from(self.dim.get());
                let lhs = pe * BigRational::from_integer(&nn - 2);
                match space {
                    // p > (N+2)/(N-2)
                    SobolevSpace::H10 | SobolevSpace::L2Star => {
                        lhs > BigRational::from_integer(&nn + 2)
                    }
                    // p > N/(N-2), always true for an admissible solution
                    SobolevSpace::W1NOverNm1 => {
                        let _ = n;
                        lhs > BigRational::from_integer(nn)
                    }
                }
            }
        }
    }

    fn space_exponent(&self, space: SobolevSpace) -> f64 {
        let n = self.dim.as_f64();
        match space {
            SobolevSpace::H10 => 2.0,
            SobolevSpace::W1NOverNm1 => n / (n - 1.0),
            SobolevSpace::L2Star => self.dim.sobolev_exponent(),
        }
    }

    /// Integrand of `‖·‖^q` without the `r^{N-1}` weight.
    fn integrand(&self, space: SobolevSpace, r: f64) -> f64 {
        let q = self.space_exponent(space);
        match space {
            SobolevSpace::H10 | SobolevSpace::W1NOverNm1 => self.du(r).abs().powf(q),
            SobolevSpace::L2Star => self.u(r).abs().powf(q),
        }
    }

    /// `∫₀^{r₁} integrand · r^{N-1} dr` in closed form, where one exists
    /// (exact for gradient norms, leading order for the power-tail `L^{2*}` norm).
    pub fn origin_tail(&self, space: SobolevSpace, r1: f64) -> Option<f64> {
        if !self.is_member(space) {
            return None;
        }
        let n = self.dim.as_f64();
        let q = self.space_exponent(space);
        let power_tail = |coeff: f64, exponent: f64| coeff * r1.powf(exponent) / exponent;
        match (self.kind, space) {
            (SingularKind::ExpLog, SobolevSpace::L2Star) => {
                // ∫_{-log r₁}^∞ (2x)^q e^{-Nx} dx
                let x1 = -r1.ln();
                Some(2f64.powf(q) * gamma(q + 1.0) * gamma_ur(q + 1.0, n * x1) / n.powf(q + 1.0))
            }
            (SingularKind::ExpLog, _) => Some(power_tail(2f64.powf(q), n - q)),
            (SingularKind::PowerTail { .. }, SobolevSpace::L2Star) => {
                let b = self.tail_exponent();
                Some(power_tail(1.0, n - b * q))
            }
            (SingularKind::PowerTail { .. }, _) => {
                let b = self.tail_exponent();
                Some(power_tail(b.powf(q), n - (b + 1.0) * q))
            }
        }
    }

    /// Closed-form norm, `None` when not a member or no closed form exists.
    pub fn exact_norm(&self, space: SobolevSpace) -> Option<f64> {
        if !self.is_member(space) {
            return None;
        }
        let n = self.dim.as_f64();
        let q = self.space_exponent(space);
        let omega = self.dim.sphere_area();
        let integral = match (self.kind, space) {
            (SingularKind::ExpLog, SobolevSpace::L2Star) => {
                2f64.powf(q) * gamma(q + 1.0) / n.powf(q + 1.0)
            }
            (SingularKind::ExpLog, _) => 2f64.powf(q) / (n - q),
            (SingularKind::PowerTail { .. }, SobolevSpace::L2Star) => return None,
            (SingularKind::PowerTail { .. }, _) => {
                let b = self.tail_exponent();
                b.powf(q) / (n - (b + 1.0) * q)
            }
        };
        Some((omega * integral).powf(1.0 / q))
    }

    /// `ω_{N-1} ∫_{r_min}^1 integrand · r^{N-1} dr` by quadrature on a geometric grid.
    pub fn truncated_integral(&self, space: SobolevSpace, r_min: f64) -> Result<f64> {
        let grid = RadialGrid::geometric(self.dim, 20_000, r_min)?;
        let values: Vec<f64> = grid.nodes().iter().map(|&r| self.integrand(space, r)).collect();
        Ok(grid.integrate(&values))
    }

    pub fn sobolev_membership(&self, space: SobolevSpace) -> Membership {
        let member = self.is_member(space);
        if !member {
            return Membership { member, norm: None, numeric_norm: None };
        }
        let r1 = 1e-8;
        let q = self.space_exponent(space);
        let numeric = self.truncated_integral(space, r1).ok().map(|body| {
            let tail = self.origin_tail(space, r1).unwrap_or(0.0) * self.dim.sphere_area();
            (body + tail).powf(1.0 / q)
        });
        Membership { member, norm: self.exact_norm(space).or(numeric), numeric_norm: numeric }
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    fn dim(n: u32) -> Dimension {
        Dimension::new(n).unwrap()
    }

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn make_singular_examples() {
        let s = make_singular(SingularKind::ExpLog, dim(10)).unwrap();
        assert_eq!(s.lambda(), 16.0);
        assert!((s.u((-0.5f64).exp()) - 1.0).abs() < 1e-15);

        let s = make_singular(SingularKind::PowerTail { p: 3.0 }, dim(10)).unwrap();
        assert_eq!(s.lambda(), 7.0);
        assert_eq!(s.u(0.5), 1.0);

        assert_eq!(power_tail_lambda_exact(dim(3), &ratio(4, 1)), ratio(2, 9));
        let s = make_singular(SingularKind::PowerTail { p: 4.0 }, dim(3)).unwrap();
        assert!((s.lambda() - 2.0 / 9.0).abs() < 1e-16);
    }

    #[test]
    fn rejects_inadmissible_powers() {
        assert!(make_singular(SingularKind::PowerTail { p: 1.25 }, dim(10)).is_err());
        assert!(make_singular(SingularKind::PowerTail { p: 3.0 }, dim(3)).is_err());
        assert!(make_singular(SingularKind::PowerTail { p: 1.2500001 }, dim(10)).is_ok());
    }

    #[test]
    fn residual_examples() {
        let s = make_singular(SingularKind::ExpLog, dim(10)).unwrap();
        let (res, scale) = s.residual_at(0.3);
        assert!(res <= 1e-10 * scale);
        assert!((s.potential(0.3) - 16.0 / 0.09).abs() < 1e-10);

        let s = make_singular(SingularKind::PowerTail { p: 3.0 }, dim(10)).unwrap();
        let (res, scale) = s.residual_at(0.2);
        assert!(res <= 1e-10 * scale);
        assert!((s.potential(0.2) - 21.0 / 0.04).abs() < 1e-9);
        assert!(s.residual(&[1.0]).unwrap() <= 1e-10);
        assert!(s.residual(&[0.0]).is_err());
    }

    #[test]
    fn membership_examples() {
        let s = make_singular(SingularKind::ExpLog, dim(10)).unwrap();
        let m = s.sobolev_membership(SobolevSpace::H10);
        assert!(m.member);
        let sq = m.norm.unwrap().powi(2);
        assert!((sq - PI.powi(5) / 24.0).abs() < 1e-12);
        assert!((m.numeric_norm.unwrap().powi(2) - sq).abs() < 1e-4 * sq);

        let s = make_singular(SingularKind::PowerTail { p: 1.4 }, dim(10)).unwrap();
        assert!(!s.sobolev_membership(SobolevSpace::H10).member);
        let w = s.sobolev_membership(SobolevSpace::W1NOverNm1);
        assert!(w.member);
        let (exact, numeric) = (w.norm.unwrap(), w.numeric_norm.unwrap());
        assert!((exact - numeric).abs() < 1e-4 * exact, "{exact} vs {numeric}");
    }

    #[test]
    fn l2star_norms_agree_with_quadrature() {
        let s = make_singular(SingularKind::ExpLog, dim(5)).unwrap();
        let m = s.sobolev_membership(SobolevSpace::L2Star);
        let (exact, numeric) = (m.norm.unwrap(), m.numeric_norm.unwrap());
        assert!((exact - numeric).abs() < 1e-4 * exact, "{exact} vs {numeric}");

        let s = make_singular(SingularKind::PowerTail { p: 3.0 }, dim(10)).unwrap();
        let m = s.sobolev_membership(SobolevSpace::L2Star);
        assert!(m.member && m.norm.is_some());
    }

    #[test]
    fn boundary_exponent_is_not_a_member() {
        // p = (N+2)/(N-2) exactly: the Dirichlet integral diverges logarithmically
        let s = make_singular(SingularKind::PowerTail { p: 1.5 }, dim(10)).unwrap();
        assert!(!s.is_member(SobolevSpace::H10));
        assert!(s.is_member(SobolevSpace::W1NOverNm1));
    }

    #[test]
    fn origin_tail_of_exp_log_matches_quadrature() {
        let s = make_singular(SingularKind::ExpLog, dim(4)).unwrap();
        let r1 = 1e-3;
        let tail = s.origin_tail(SobolevSpace::L2Star, r1).unwrap() * dim(4).sphere_area();
        let full = s.exact_norm(SobolevSpace::L2Star).unwrap().powf(4.0);
        let body = s.truncated_integral(SobolevSpace::L2Star, r1).unwrap();
        assert!((full - body - tail).abs() < 1e-5 * full);
    }
}
