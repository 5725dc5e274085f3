mod common;

use common::{reference_first_zero, rel_diff};
use radlab::shooting::{shoot, ShootConfig};
use radlab::{Dimension, NonlinearitySpec};

const STEP: f64 = 2.5e-3;

#[test]
fn reference_reproduces_constant_source() {
    // w = a - s²/(2N) vanishes at s² = 2Na
    for n in [3, 5, 10] {
        let r = reference_first_zero(|_| 1.0, 2.0, n, STEP).unwrap();
        assert!(rel_diff(r.lambda, 4.0 * n as f64) < 1e-10, "N={n}: {}", r.lambda);
    }
}

#[test]
fn exponential_branch_matches_reference() {
    let cfg = ShootConfig::default();
    for (n, a) in [(3, 1.0), (3, 7.5), (3, 25.0), (10, 2.0), (10, 12.0), (10, 30.0)] {
        let d = Dimension::new(n).unwrap();
        let ours = shoot(&NonlinearitySpec::exponential(), a, d, &cfg).unwrap();
        let reference = reference_first_zero(f64::exp, a, n, STEP).unwrap();
        assert!(rel_diff(ours.lambda, reference.lambda) < 1e-6, "N={n} a={a}: {} vs {}", ours.lambda, reference.lambda);
    }
}

#[test]
fn power_shots_match_reference() {
    let cfg = ShootConfig::default();
    for (n, p, a) in [(10, 3.0, 5.0), (10, 1.4, 100.0), (3, 2.0, 3.0), (5, 1.5, 40.0)] {
        let d = Dimension::new(n).unwrap();
        let ours = shoot(&NonlinearitySpec::power(p).unwrap(), a, d, &cfg).unwrap();
        let reference = reference_first_zero(|s| (1.0 + s).powf(p), a, n, STEP).unwrap();
        assert!(rel_diff(ours.lambda, reference.lambda) < 1e-6, "N={n} p={p} a={a}");
    }
}

#[test]
fn log_corrected_shot_matches_reference() {
    let d = Dimension::new(3).unwrap();
    let spec = NonlinearitySpec::log_corrected(1.0, d).unwrap();
    let ours = shoot(&spec, 20.0, d, &ShootConfig::default()).unwrap();
    let reference = reference_first_zero(|s| spec.value(s), 20.0, 3, STEP).unwrap();
    assert!(rel_diff(ours.lambda, reference.lambda) < 1e-6);
}

#[test]
fn cubic_branch_oscillates_towards_singular_lambda() {
    use radlab::continuation::{a_grid, trace_branch, TraceConfig};
    let d = Dimension::new(10).unwrap();
    let a = a_grid(1.0, 2000.0, 160, true).unwrap();
    let branch = trace_branch(&NonlinearitySpec::power(3.0).unwrap(), d, &a, &TraceConfig::default()).unwrap();
    assert!(branch.failures.is_empty());
    // unstable singular solution: the branch folds around λ = 7 instead of approaching monotonically
    assert!(branch.turning_points.len() >= 3, "{:?}", branch.turning_points);
    let estimate = branch.asymptote_estimate();
    assert!(rel_diff(estimate, 7.0) < 0.02, "{estimate}");
    for p in branch.points.iter().step_by(20) {
        let reference = reference_first_zero(|s| (1.0 + s).powi(3), p.a, 10, STEP).unwrap();
        assert!(rel_diff(p.lambda, reference.lambda) < 1e-4, "a={}", p.a);
    }
}
