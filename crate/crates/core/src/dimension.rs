use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Space dimension `N` of the ball `B₁ ⊂ ℝᴺ`; always at least 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Dimension(u32);

impl Dimension {
    pub fn new(n: u32) -> Result<Self> {
        if n < 3 {
            return Err(Error::Domain(format!("dimension must exceed 2, got {n}")));
        }
        Ok(Dimension(n))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.0)
    }

    /// Critical Sobolev exponent `2* = 2N/(N-2)`.
    pub fn sobolev_exponent(self) -> f64 {
        let n = self.as_f64();
        2.0 * n / (n - 2.0)
    }

    /// `2* - 1 = (N+2)/(N-2)`, the critical power.
    pub fn critical_power(self) -> f64 {
        let n = self.as_f64();
        (n + 2.0) / (n - 2.0)
    }

    /// Dual exponent `2N/(N+2)` used for the norm of the right-hand side.
    pub fn dual_exponent(self) -> f64 {
        let n = self.as_f64();
        2.0 * n / (n + 2.0)
    }

    /// Hardy constant `((N-2)/2)²`.
    pub fn hardy_constant(self) -> f64 {
        let h = (self.as_f64() - 2.0) / 2.0;
        h * h
    }

    /// Surface area `ω_{N-1} = 2π^{N/2} / Γ(N/2)` of the unit sphere.
    pub fn sphere_area(self) -> f64 {
        let half = self.as_f64() / 2.0;
        // Γ(N/2) by the recursion from Γ(1) = 1 or Γ(1/2) = √π
        let (mut x, mut gamma) = if self.0.is_multiple_of(2) { (1.0, 1.0) } else { (0.5, PI.sqrt()) };
        while x < half {
            gamma *= x;
            x += 1.0;
        }
        2.0 * PI.powf(half) / gamma
    }

    pub fn ball_volume(self) -> f64 {
        self.sphere_area() / self.as_f64()
    }
}

impl TryFrom<u32> for Dimension {
    type Error = Error;

    fn try_from(n: u32) -> Result<Self> {
        Dimension::new(n)
    }
}

impl From<Dimension> for u32 {
    fn from(d: Dimension) -> u32 {
        d.0
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}
