//! Vertex-centred finite-volume discretization of the radial Laplacian
//! `-r^{1-N} (r^{N-1} φ')'`.
//!
//! Dual cells are bounded by the midpoints between nodes. Cell volumes
//! `∫ r^{N-1} dr` and the P1 fluxes `∫ r^{N-1} dr / h²` are integrated exactly,
//! so `Σ k_{i+1/2} (φ_{i+1} - φ_i)²` is the exact Dirichlet energy of the
//! piecewise-linear interpolant. The common factor `ω_{N-1}` is dropped.

use crate::dimension::Dimension;

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct RadialStencil {
    pub nodes: Vec<f64>,
    /// Dual-cell volume for every node.
    pub weights: Vec<f64>,
    /// `k_{i+1/2}` between nodes `i` and `i+1`.
    pub couplings: Vec<f64>,
}

impl RadialStencil {
    pub fn new(nodes: &[f64], dim: Dimension) -> Self {
        let n = dim.as_f64();
        let pow = |r: f64| r.powf(n);
        let m = nodes.len();
        let mids: Vec<f64> = nodes.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        let weights = (0..m)
            .map(|i| {
                let lo = if i == 0 { nodes[0] } else { mids[i - 1] };
                let hi = if i == m - 1 { nodes[m - 1] } else { mids[i] };
                (pow(hi) - pow(lo)) / n
            })
            .collect();
        let couplings = nodes
            .windows(2)
            .map(|w| {
                let h = w[1] - w[0];
                (pow(w[1]) - pow(w[0])) / (n * h * h)
            })
            .collect();
        RadialStencil { nodes: nodes.to_vec(), weights, couplings }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    /// `(A u)_i`; the first node carries no flux to the left.
    pub fn apply_at(&self, u: &[f64], i: usize) -> f64 {
        let mut acc = 0.0;
        if i > 0 {
            acc += self.couplings[i - 1] * (u[i] - u[i - 1]);
        }
        if i + 1 < self.nodes.len() {
            acc += self.couplings[i] * (u[i] - u[i + 1]);
        }
        acc
    }
}

/// Solves a tridiagonal system in place (Thomas algorithm). `lower[0]` and
/// `upper[n-1]` are ignored. The matrices used here are diagonally dominant
/// or symmetric positive definite, so no pivoting is needed.
pub(crate) fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &mut [f64]) {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut beta = diag[0];
    c[0] = if n > 1 { upper[0] / beta } else { 0.0 };
    rhs[0] /= beta;
    for i in 1..n {
        beta = diag[i] - lower[i] * c[i - 1];
        if i + 1 < n {
            c[i] = upper[i] / beta;
        }
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= c[i] * rhs[i + 1];
    }
}

/// Number of eigenvalues of the symmetric tridiagonal matrix `(diag, off)`
/// strictly below `sigma` (Sturm sequence via the LDLᵀ pivots).
pub(crate) fn sturm_count(diag: &[f64], off: &[f64], sigma: f64) -> usize {
    let mut count = 0;
    let mut q = diag[0] - sigma;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        let guard = if q == 0.0 { f64::MIN_POSITIVE.sqrt() } else { q };
        q = diag[i] - sigma - off[i - 1] * off[i - 1] / guard;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thomas_solves_small_system() {
        // [2 -1 0; -1 2 -1; 0 -1 2] x = [1 0 1] → x = [1 1 1]
        let mut rhs = vec![1.0, 0.0, 1.0];
        solve_tridiagonal(&[0.0, -1.0, -1.0], &[2.0; 3], &[-1.0, -1.0, 0.0], &mut rhs);
        for x in rhs {
            assert!((x - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn sturm_counts_eigenvalues() {
        // eigenvalues of tridiag(-1, 2, -1) of size 3: 2 - √2, 2, 2 + √2
        let d = [2.0; 3];
        let e = [-1.0; 2];
        assert_eq!(sturm_count(&d, &e, 0.5), 0);
        assert_eq!(sturm_count(&d, &e, 1.0), 1);
        assert_eq!(sturm_count(&d, &e, 2.5), 2);
        assert_eq!(sturm_count(&d, &e, 4.0), 3);
    }

    #[test]
    fn weights_sum_to_the_ball_measure() {
        let dim = Dimension::new(5).unwrap();
        let nodes: Vec<f64> = (0..=50).map(|i| (i as f64 / 50.0).powi(2)).collect();
        let s = RadialStencil::new(&nodes, dim);
        let total: f64 = s.weights.iter().sum();
        assert!((total - 0.2).abs() < 1e-14);
    }

    #[test]
    fn linear_functions_have_exact_energy() {
        // φ = 1 - r: Σ k (Δφ)² = ∫ r^{N-1} dr = 1/N
        let dim = Dimension::new(3).unwrap();
        let nodes: Vec<f64> = (0..=17).map(|i| (i as f64 / 17.0).powf(1.7)).collect();
        let s = RadialStencil::new(&nodes, dim);
        let phi: Vec<f64> = nodes.iter().map(|r| 1.0 - r).collect();
        let energy: f64 = s
            .couplings
            .iter()
            .enumerate()
            .map(|(i, k)| k * (phi[i + 1] - phi[i]).powi(2))
            .sum();
        assert!((energy - 1.0 / 3.0).abs() < 1e-14);
    }
}
