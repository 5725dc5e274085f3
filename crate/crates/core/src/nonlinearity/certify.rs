//! Sampling-based evidence for the growth hypotheses on a nonlinearity.
//!
//! Everything here is evaluated on a finite log-spaced grid; the estimates are
//! evidence, not proofs.

use serde::{Deserialize, Serialize};

use super::NonlinearitySpec;
use crate::dimension::Dimension;
use crate::stability;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Criticality {
    Subcritical,
    Critical,
    Supercritical,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleConfig {
    /// First positive sample; `s = 0` is always sampled in addition.
    pub s_min: f64,
    pub s_max: f64,
    pub points_per_decade: usize,
    /// Threshold above which `h` and the lower bound `M0` are considered.
    pub s0: f64,
    /// Number of trailing decades treated as the asymptotic tail.
    pub tail_decades: usize,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig { s_min: 1e-2, s_max: 1e12, points_per_decade: 64, s0: 1.0, tail_decades: 6 }
    }
}

impl SampleConfig {
    fn grid(&self) -> Vec<f64> {
        let lo = self.s_min.log10();
        let hi = self.s_max.log10();
        let count = ((hi - lo) * self.points_per_decade as f64).round() as usize;
        let mut s: Vec<f64> = (0..=count)
            .map(|i| 10f64.powf(lo + (hi - lo) * i as f64 / count as f64))
            .collect();
        s.insert(0, 0.0);
        s
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub subcritical_verdict: Criticality,
    /// `(s, log f(s) - (2*-1) log s)` over the tail decades.
    pub h1_ratio_tail: Vec<(f64, f64)>,
    /// Sampled `limsup max_{[0,s]} f / f(s)`; the interior maximum is capped at the grid.
    pub c0_estimate: f64,
    pub m0: f64,
    pub s0: f64,
    /// Sampled `liminf s f'(s)/f(s)` over the tail.
    pub c0_h4_estimate: f64,
    /// Sampled `inf f'(s)` over the whole grid including `s = 0`.
    pub c1_h5_estimate: f64,
    /// First Dirichlet eigenvalue of the Laplacian on the unit ball.
    pub lambda1_reference: f64,
    pub h4_holds_sampled: bool,
    pub h5_holds_sampled: bool,
    pub note: String,
}

/// Samples `spec` and reports the growth class and the hypothesis constants.
pub fn certify_hypotheses(spec: &NonlinearitySpec, dim: Dimension, cfg: &SampleConfig) -> HypothesisReport {
    let grid = cfg.grid();
    let q = dim.critical_power();
    let tail_start = cfg.s_max / 10f64.powi(cfg.tail_decades as i32);
    let tail: Vec<(f64, f64)> = grid
        .iter()
        .filter(|&&s| s >= tail_start * (1.0 - 1e-12))
        .map(|&s| (s, spec.ln_value(s) - q * s.ln()))
        .collect();

    let verdict = classify_tail(&tail, cfg.points_per_decade);

    // running maximum of log f; equal to log f(s) itself for monotone f
    let mut running = f64::NEG_INFINITY;
    let mut c0: f64 = 1.0;
    for &s in &grid {
        let lf = spec.ln_value(s);
        running = running.max(lf);
        if s >= tail_start * (1.0 - 1e-12) {
            c0 = c0.max((running - lf).exp());
        }
    }

    let m0 = grid
        .iter()
        .filter(|&&s| s > cfg.s0)
        .map(|&s| spec.value(s))
        .fold(f64::INFINITY, f64::min);

    let c0_h4 = tail
        .iter()
        .map(|&(s, _)| s * spec.log_derivative(s))
        .fold(f64::INFINITY, f64::min);

    let c1 = grid.iter().map(|&s| spec.slope(s)).fold(f64::INFINITY, f64::min);
    let lambda1 = stability::dirichlet_principal_eigenvalue(dim);

    HypothesisReport {
        subcritical_verdict: verdict,
        h1_ratio_tail: tail,
        c0_estimate: c0,
        m0,
        s0: cfg.s0,
        c0_h4_estimate: c0_h4,
        c1_h5_estimate: c1,
        lambda1_reference: lambda1,
        h4_holds_sampled: c0_h4 > 1.0,
        h5_holds_sampled: c1 > lambda1,
        note: "sampled, not proven".to_string(),
    }
}

/// A tail that is strictly monotone with per-decade increments that do not
/// collapse geometrically is taken to diverge; anything else settles to a
/// finite limit, which is the critical case.
fn classify_tail(tail: &[(f64, f64)], per_decade: usize) -> Criticality {
    if tail.len() < 2 * per_decade + 1 {
        return Criticality::Critical;
    }
    let decreasing = tail.windows(2).all(|w| w[1].1 < w[0].1);
    let increasing = tail.windows(2).all(|w| w[1].1 > w[0].1);
    let increments: Vec<f64> = tail
        .chunks(per_decade)
        .filter(|c| c.len() == per_decade)
        .map(|c| c[c.len() - 1].1 - c[0].1)
        .collect();
    let first = increments.first().copied().unwrap_or(0.0).abs();
    let last = increments.last().copied().unwrap_or(0.0).abs();
    let sustained = first > 0.0 && last >= 1e-3 * first;
    match (decreasing, increasing, sustained) {
        (true, _, true) => Criticality::Subcritical,
        (_, true, true) => Criticality::Supercritical,
        _ => Criticality::Critical,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dim(n: u32) -> Dimension {
        Dimension::new(n).unwrap()
    }

    fn verdict(spec: NonlinearitySpec, n: u32) -> Criticality {
        certify_hypotheses(&spec, dim(n), &SampleConfig::default()).subcritical_verdict
    }

    #[test]
    fn classification_examples() {
        assert_eq!(verdict(NonlinearitySpec::power(1.4).unwrap(), 10), Criticality::Subcritical);
        assert_eq!(
            verdict(NonlinearitySpec::log_corrected(1.0, dim(3)).unwrap(), 3),
            Criticality::Subcritical
        );
        assert_eq!(verdict(NonlinearitySpec::exponential(), 10), Criticality::Supercritical);
    }

    #[test]
    fn classification_edges() {
        assert_eq!(verdict(NonlinearitySpec::power(1.5).unwrap(), 10), Criticality::Critical);
        assert_eq!(verdict(NonlinearitySpec::power(5.0).unwrap(), 3), Criticality::Critical);
        assert_eq!(verdict(NonlinearitySpec::power(3.0).unwrap(), 10), Criticality::Supercritical);
        assert_eq!(verdict(NonlinearitySpec::constant(2.0).unwrap(), 5), Criticality::Subcritical);
        for beta in [0.5, 1.0, 2.0] {
            for n in [3, 5, 10] {
                let d = dim(n);
                assert_eq!(
                    verdict(NonlinearitySpec::double_log_corrected(beta, d).unwrap(), n),
                    Criticality::Subcritical
                );
                assert_eq!(
                    verdict(NonlinearitySpec::log_corrected(beta, d).unwrap(), n),
                    Criticality::Subcritical
                );
            }
        }
    }

    #[test]
    fn monotone_families_have_unit_c0() {
        for spec in [
            NonlinearitySpec::power(2.0).unwrap(),
            NonlinearitySpec::exponential(),
            NonlinearitySpec::log_corrected(1.0, dim(3)).unwrap(),
            NonlinearitySpec::constant(3.0).unwrap(),
        ] {
            let report = certify_hypotheses(&spec, dim(3), &SampleConfig::default());
            assert_eq!(report.c0_estimate, 1.0, "{spec}");
        }
    }

    #[test]
    fn h_diverges_for_subcritical_families() {
        let cases = [
            (NonlinearitySpec::power(1.4).unwrap(), 10),
            (NonlinearitySpec::log_corrected(1.0, dim(3)).unwrap(), 3),
            (NonlinearitySpec::double_log_corrected(1.0, dim(5)).unwrap(), 5),
            (NonlinearitySpec::constant(1.0).unwrap(), 3),
        ];
        let cfg = SampleConfig::default();
        for (spec, n) in cases {
            let d = dim(n);
            assert_eq!(certify_hypotheses(&spec, d, &cfg).subcritical_verdict, Criticality::Subcritical);
            let best = cfg
                .grid()
                .into_iter()
                .filter(|&s| s > cfg.s0)
                .map(|s| spec.h_of(s, d, cfg.s0).unwrap())
                .fold(0.0, f64::max);
            assert!(best > 2.0, "{spec}: sup h = {best}");
        }
    }

    #[test]
    fn h4_h5_estimates() {
        let report = certify_hypotheses(&NonlinearitySpec::power(3.0).unwrap(), dim(3), &SampleConfig::default());
        assert!((report.c0_h4_estimate - 3.0).abs() < 1e-5);
        assert!(report.h4_holds_sampled);
        assert_eq!(report.c1_h5_estimate, 3.0);
        assert!((report.lambda1_reference - std::f64::consts::PI.powi(2)).abs() < 1e-2);
        assert!(!report.h5_holds_sampled);
        // first sample above s0 = 1 is 10^{1/64}
        let expected_m0 = (1.0 + 10f64.powf(1.0 / 64.0)).powi(3);
        assert!((report.m0 - expected_m0).abs() < 1e-9 * expected_m0);
        assert_eq!(report.note, "sampled, not proven");
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("Subcritical"));
    }
}
