//! Radial grids on `[0, 1]`, sampled radial profiles and the weighted norms
//! every check is phrased in.
//!
//! Integrals over the ball reduce to `ω_{N-1} ∫ g(r) r^{N-1} dr` and are
//! evaluated with the composite trapezoid rule on the grid nodes. Grids whose
//! first node is positive represent singular profiles: the origin is excluded
//! and integrals start at that node.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dimension::Dimension;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    dim: Dimension,
    nodes: Vec<f64>,
}

impl RadialGrid {
    /// Graded grid `r_i = (i/n)^γ`, `i = 0..=n`.
    pub fn graded(dim: Dimension, n: usize, gamma: f64) -> Result<Self> {
        check_shape(n, gamma)?;
        let mut nodes: Vec<f64> = (0..=n).map(|i| (i as f64 / n as f64).powf(gamma)).collect();
        nodes[n] = 1.0;
        Ok(RadialGrid { dim, nodes })
    }

    pub fn uniform(dim: Dimension, n: usize) -> Result<Self> {
        Self::graded(dim, n, 1.0)
    }

    /// Graded grid on `[r_first, 1]`, origin excluded.
    pub fn graded_from(dim: Dimension, n: usize, gamma: f64, r_first: f64) -> Result<Self> {
        check_shape(n, gamma)?;
        check_first(r_first)?;
        let mut nodes: Vec<f64> = (0..=n)
            .map(|i| r_first + (1.0 - r_first) * (i as f64 / n as f64).powf(gamma))
            .collect();
        nodes[0] = r_first;
        nodes[n] = 1.0;
        Ok(RadialGrid { dim, nodes })
    }

    /// Geometric grid `r_i = r_first^{1 - i/n}` on `[r_first, 1]`, origin excluded.
    /// Constant ratio between neighbours suits power-law singularities.
    pub fn geometric(dim: Dimension, n: usize, r_first: f64) -> Result<Self> {
        check_shape(n, 1.0)?;
        check_first(r_first)?;
        let ln_first = r_first.ln();
        let mut nodes: Vec<f64> =
            (0..=n).map(|i| (ln_first * (1.0 - i as f64 / n as f64)).exp()).collect();
        nodes[0] = r_first;
        nodes[n] = 1.0;
        Ok(RadialGrid { dim, nodes })
    }

    pub fn from_nodes(dim: Dimension, nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(Error::InvalidGrid("need at least three nodes".into()));
        }
        if !(nodes[0] >= 0.0 && nodes[0] < 1.0) || *nodes.last().unwrap() != 1.0 {
            return Err(Error::InvalidGrid("nodes must start in [0,1) and end at exactly 1".into()));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidGrid("nodes must be strictly increasing".into()));
        }
        Ok(RadialGrid { dim, nodes })
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// True when the first node is positive (singular profile storage).
    pub fn origin_excluded(&self) -> bool {
        self.nodes[0] > 0.0
    }

    /// `∫ g(r) r^k dr` by the trapezoid rule over the nodes.
    pub fn trapezoid_with_power(&self, values: &[f64], k: f64) -> f64 {
        debug_assert_eq!(values.len(), self.nodes.len());
        let weighted = |i: usize| {
            let r = self.nodes[i];
            if r == 0.0 {
                if k == 0.0 {
                    values[i]
                } else {
                    0.0
                }
            } else {
                values[i] * r.powf(k)
            }
        };
        (1..self.nodes.len())
            .map(|i| 0.5 * (self.nodes[i] - self.nodes[i - 1]) * (weighted(i - 1) + weighted(i)))
            .sum()
    }

    /// `(ω_{N-1} ∫ |g|^q r^{N-1} dr)^{1/q}` of nodal values.
    pub fn lq_norm(&self, values: &[f64], q: f64) -> f64 {
        let powered: Vec<f64> = values.iter().map(|x| x.abs().powf(q)).collect();
        self.integrate(&powered).powf(1.0 / q)
    }

    /// `ω_{N-1} ∫ g(r) r^{N-1} dr`, the integral of a radial function over the ball.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        let n = self.dim.as_f64();
        self.dim.sphere_area() * self.trapezoid_with_power(values, n - 1.0)
    }
}

fn check_shape(n: usize, gamma: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidGrid(format!("need n ≥ 2 intervals, got {n}")));
    }
    if !(gamma >= 1.0 && gamma.is_finite()) {
        return Err(Error::InvalidGrid(format!("grading exponent must be ≥ 1, got {gamma}")));
    }
    Ok(())
}

fn check_first(r_first: f64) -> Result<()> {
    if r_first > 0.0 && r_first < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidGrid(format!("first node must lie in (0,1), got {r_first}")))
    }
}

/// A radial function sampled at the nodes of a grid, with its radial derivative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    grid: RadialGrid,
    u: Vec<f64>,
    du: Vec<f64>,
}

impl RadialProfile {
    pub fn new(grid: RadialGrid, u: Vec<f64>, du: Vec<f64>) -> Result<Self> {
        if u.len() != grid.len() || du.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "profile has {} values and {} derivatives for {} nodes",
                u.len(),
                du.len(),
                grid.len()
            )));
        }
        if let Some(i) = u.iter().chain(&du).position(|x| !x.is_finite()) {
            return Err(Error::Domain(format!("non-finite profile entry at position {i}")));
        }
        Ok(RadialProfile { grid, u, du })
    }

    /// Samples closed-form `u` and `u'` at the grid nodes.
    pub fn from_fn(grid: RadialGrid, u: impl Fn(f64) -> f64, du: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.nodes().iter().map(|&r| u(r)).collect();
        let slopes = grid.nodes().iter().map(|&r| du(r)).collect();
        Self::new(grid, values, slopes)
    }

    /// Builds a profile from nodal values, differentiating with second-order
    /// finite differences. `symmetric_origin` pins `u'(0) = 0`.
    pub fn from_values(grid: RadialGrid, u: Vec<f64>, symmetric_origin: bool) -> Result<Self> {
        if u.len() != grid.len() {
            return Err(Error::InvalidGrid("value count does not match grid".into()));
        }
        let mut du = finite_difference(grid.nodes(), &u);
        if symmetric_origin && !grid.origin_excluded() {
            du[0] = 0.0;
        }
        Self::new(grid, u, du)
    }

    pub fn zeros(grid: RadialGrid) -> Self {
        let n = grid.len();
        RadialProfile { grid, u: vec![0.0; n], du: vec![0.0; n] }
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn dim(&self) -> Dimension {
        self.grid.dim()
    }

    pub fn r(&self) -> &[f64] {
        self.grid.nodes()
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn du(&self) -> &[f64] {
        &self.du
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    /// `max_i |u_i|`
    pub fn norm_sup(&self) -> f64 {
        self.u.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// `(ω_{N-1} ∫ |u|^q r^{N-1} dr)^{1/q}`
    pub fn norm_lq(&self, q: f64) -> Result<f64> {
        if !(q >= 1.0) {
            return Err(Error::Domain(format!("Lq norm needs q ≥ 1, got {q}")));
        }
        Ok(self.grid.lq_norm(&self.u, q))
    }

    /// `(ω_{N-1} ∫ u'(r)² r^{N-1} dr)^{1/2}`
    pub fn seminorm_h1(&self) -> f64 {
        let values: Vec<f64> = self.du.iter().map(|d| d * d).collect();
        self.grid.integrate(&values).sqrt()
    }

    /// Profile CSV: header `r,u,du`, 17 significant digits per value.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * self.len());
        out.push_str("r,u,du\n");
        for ((r, u), du) in self.r().iter().zip(&self.u).zip(&self.du) {
            let _ = writeln!(out, "{r:.16e},{u:.16e},{du:.16e}");
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    pub fn from_csv(text: &str, dim: Dimension) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == "r,u,du" => {}
            other => return Err(Error::Parse(format!("expected header r,u,du, got {other:?}"))),
        }
        let (mut r, mut u, mut du) = (Vec::new(), Vec::new(), Vec::new());
        for (lineno, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(Error::Parse(format!("line {}: expected 3 fields", lineno + 2)));
            }
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 2)))
            };
            r.push(parse(fields[0])?);
            u.push(parse(fields[1])?);
            du.push(parse(fields[2])?);
        }
        Self::new(RadialGrid::from_nodes(dim, r)?, u, du)
    }
}

/// Second-order finite differences on a non-uniform grid.
pub(crate) fn finite_difference(r: &[f64], u: &[f64]) -> Vec<f64> {
    let n = r.len();
    let mut du = vec![0.0; n];
    for i in 1..n - 1 {
        let h1 = r[i] - r[i - 1];
        let h2 = r[i + 1] - r[i];
        du[i] = -h2 / (h1 * (h1 + h2)) * u[i - 1] + (h2 - h1) / (h1 * h2) * u[i]
            + h1 / (h2 * (h1 + h2)) * u[i + 1];
    }
    let (h1, h2) = (r[1] - r[0], r[2] - r[1]);
    du[0] = -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * u[0] + (h1 + h2) / (h1 * h2) * u[1]
        - h1 / (h2 * (h1 + h2)) * u[2];
    let (h1, h2) = (r[n - 2] - r[n - 3], r[n - 1] - r[n - 2]);
    du[n - 1] = h2 / (h1 * (h1 + h2)) * u[n - 3] - (h1 + h2) / (h1 * h2) * u[n - 2]
        + (2.0 * h2 + h1) / (h2 * (h1 + h2)) * u[n - 1];
    du
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    fn dim(n: u32) -> Dimension {
        Dimension::new(n).unwrap()
    }

    fn default_grid(n: u32) -> RadialGrid {
        RadialGrid::graded(dim(n), 2000, 2.0).unwrap()
    }

    #[test]
    fn grids_have_exact_endpoints() {
        let g = RadialGrid::graded(dim(3), 7, 2.3).unwrap();
        assert_eq!(g.nodes()[0], 0.0);
        assert_eq!(*g.nodes().last().unwrap(), 1.0);
        let g = RadialGrid::geometric(dim(3), 50, 1e-6).unwrap();
        assert_eq!(g.nodes()[0], 1e-6);
        assert_eq!(*g.nodes().last().unwrap(), 1.0);
        assert!(g.origin_excluded());
        assert!(RadialGrid::graded(dim(3), 1, 2.0).is_err());
        assert!(RadialGrid::graded(dim(3), 10, 0.5).is_err());
        assert!(RadialGrid::from_nodes(dim(3), vec![0.0, 0.5, 0.5, 1.0]).is_err());
        assert!(RadialGrid::from_nodes(dim(3), vec![0.0, 0.5, 0.9]).is_err());
    }

    #[test]
    fn sup_norm_examples() {
        let g = default_grid(3);
        assert_eq!(RadialProfile::zeros(g.clone()).norm_sup(), 0.0);
        let p = RadialProfile::from_fn(g, |r| 1.0 - r * r, |r| -2.0 * r).unwrap();
        assert_eq!(p.norm_sup(), 1.0);

        // u*₂ with p = 3 on a grid starting at 10⁻³
        let g = RadialGrid::graded_from(dim(10), 100, 2.0, 1e-3).unwrap();
        let p = RadialProfile::from_fn(g, |r| 1.0 / r - 1.0, |r| -1.0 / (r * r)).unwrap();
        assert!((p.norm_sup() - 999.0).abs() < 1e-9);
    }

    #[test]
    fn lq_examples() {
        let g = default_grid(10);
        let one = RadialProfile::from_fn(g.clone(), |_| 1.0, |_| 0.0).unwrap();
        let vol = one.norm_lq(1.0).unwrap();
        let oracle = PI.powi(5) / 12.0 / 10.0;
        assert!((vol - oracle).abs() < 1e-5 * oracle, "{vol} vs {oracle}");
        assert!((vol - 2.55016).abs() < 1e-4);

        assert_eq!(RadialProfile::zeros(g).norm_lq(2.0).unwrap(), 0.0);

        let p = RadialProfile::from_fn(default_grid(3), |r| r, |_| 1.0).unwrap();
        let oracle = (4.0 * PI / 5.0).sqrt();
        assert!((p.norm_lq(2.0).unwrap() - oracle).abs() < 1e-5 * oracle);
        assert!(p.norm_lq(0.5).is_err());
    }

    #[test]
    fn h1_examples() {
        let p = RadialProfile::from_fn(default_grid(3), |r| 1.0 - r * r, |r| -2.0 * r).unwrap();
        let oracle = (16.0 * PI / 5.0).sqrt();
        assert!((p.seminorm_h1() - oracle).abs() < 1e-5 * oracle);
        assert!((p.seminorm_h1() - 3.17065).abs() < 1e-4);

        let c = RadialProfile::from_fn(default_grid(5), |_| 3.0, |_| 0.0).unwrap();
        assert_eq!(c.seminorm_h1(), 0.0);

        // u*₁ = -2 log r on [10⁻⁶, 1]
        let g = RadialGrid::graded_from(dim(10), 2000, 2.0, 1e-6).unwrap();
        let p = RadialProfile::from_fn(g, |r| -2.0 * r.ln(), |r| -2.0 / r).unwrap();
        let sq = p.seminorm_h1().powi(2);
        let oracle = PI.powi(5) / 24.0;
        assert!((sq - oracle).abs() < 5e-3 * oracle);
        assert!((sq - 12.7508).abs() < 1e-3);
    }

    #[test]
    fn quadrature_is_second_order() {
        let d = dim(3);
        let exact = {
            // ∫ (1-r²)² r² dr · 4π = 4π · 8/105
            4.0 * PI * 8.0 / 105.0
        };
        let err = |n: usize| {
            let g = RadialGrid::uniform(d, n).unwrap();
            let p = RadialProfile::from_fn(g, |r| 1.0 - r * r, |r| -2.0 * r).unwrap();
            (p.norm_lq(2.0).unwrap().powi(2) - exact).abs()
        };
        // endpoint derivatives of the integrand vanish, so the rate is at least second order
        let (e1, e2) = (err(100), err(200));
        assert!(e1 / e2 > 3.5, "ratio {}", e1 / e2);
        assert!(e1 < 100.0 / (100.0f64).powi(2));
    }

    #[test]
    fn finite_differences_are_exact_on_quadratics() {
        let g = RadialGrid::graded(dim(3), 40, 2.0).unwrap();
        let u: Vec<f64> = g.nodes().iter().map(|r| 3.0 * r * r - r + 2.0).collect();
        let p = RadialProfile::from_values(g, u, false).unwrap();
        for (r, du) in p.r().iter().zip(p.du()) {
            assert!((du - (6.0 * r - 1.0)).abs() < 1e-9);
        }
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let g = RadialGrid::graded(dim(4), 25, 2.0).unwrap();
        let p = RadialProfile::from_fn(g, |r| (1.0 - r * r) / 7.0, |r| -2.0 * r / 7.0).unwrap();
        let text = p.to_csv();
        assert!(text.starts_with("r,u,du\n"));
        let back = RadialProfile::from_csv(&text, dim(4)).unwrap();
        assert_eq!(back, p);
        assert!(RadialProfile::from_csv("x,y\n", dim(4)).is_err());
    }

    #[test]
    fn non_finite_entries_are_rejected() {
        let g = RadialGrid::graded(dim(3), 4, 1.0).unwrap();
        assert!(RadialProfile::from_fn(g, |r| 1.0 / r, |_| 0.0).is_err());
    }
}
