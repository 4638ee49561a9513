use semion_core::decoders::{CodeKind, DecoderKind};
use semion_core::experiments::{
    curve_crossing, evaluate_mlp_with, fit_quadratic, generate_records, spearman, spearman_p_value, suppression_fit,
    threshold_from_curves, wilson_interval, Curriculum, ExperimentError, LabeledBits, RateSpec,
};
use semion_core::lattice::CodeLattice;
use semion_core::noise::{NoiseKind, NoiseModel};

fn spec(d: usize, p: f64, n: u64) -> RateSpec {
    RateSpec {
        d,
        code: CodeKind::Semion,
        noise: NoiseKind::Independent,
        p_eff: p,
        decoder: DecoderKind::Mwpm,
        n,
        master_seed: 77,
        cap: semion_core::algebra::DEFAULT_CAP,
    }
}

fn pool(n: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap()
}

#[test]
fn wilson_interval_against_closed_form() {
    // k = n/2: centre is exactly 1/2 and the half width has a closed form
    let (lo, hi) = wilson_interval(50, 100, 2.0);
    let half = 2.0 * (0.25 / 100.0 + 4.0 / 40000.0f64).sqrt() / (1.0 + 4.0 / 100.0);
    assert!((lo - (0.5 - half)).abs() < 1e-15 && (hi - (0.5 + half)).abs() < 1e-15);
    let (lo, hi) = wilson_interval(0, 1000, 1.96);
    assert_eq!(lo, 0.0);
    assert!(hi > 0.0 && hi < 0.004);
    assert_eq!(wilson_interval(0, 0, 1.96), (0.0, 1.0));
}

#[test]
fn zero_noise_has_zero_logical_rate() {
    let p = pool(2).install(|| semion_core::experiments::estimate_rate(&spec(5, 0.0, 3000))).unwrap();
    assert_eq!(p.failures, 0);
    assert_eq!(p.p_bar, 0.0);
    assert_eq!(p.fallback_fraction, 0.0);
}

#[test]
fn rate_is_independent_of_worker_count() {
    let s = spec(5, 0.08, 5000);
    let a = pool(1).install(|| semion_core::experiments::estimate_rate(&s)).unwrap();
    let b = pool(4).install(|| semion_core::experiments::estimate_rate(&s)).unwrap();
    assert_eq!(a, b);
    assert!(a.failures > 0 && a.ci_low <= a.p_bar && a.p_bar <= a.ci_high);
}

#[test]
fn quadratic_fit_is_exact_on_a_parabola() {
    let t: Vec<f64> = (0..7).map(|i| -0.3 + 0.1 * i as f64).collect();
    let y: Vec<f64> = t.iter().map(|x| 0.7 - 1.3 * x + 2.9 * x * x).collect();
    let (a, b, c) = fit_quadratic(&t, &y);
    assert!((a - 0.7).abs() < 1e-9 && (b + 1.3).abs() < 1e-9 && (c - 2.9).abs() < 1e-9);
}

fn logistic(p: f64, pc: f64, d: usize) -> f64 {
    0.5 / (1.0 + (-(p - pc) * 8.0 * d as f64).exp())
}

#[test]
fn crossing_of_synthetic_curves() {
    let grid: Vec<f64> = (0..9).map(|i| 0.06 + 0.005 * i as f64).collect();
    let distances = [4, 5, 6, 7];
    // exact crossing at 0.077 for every pair: all curves equal 1/4 there
    let curves: Vec<Vec<f64>> = distances.iter().map(|&d| grid.iter().map(|&p| logistic(p, 0.077, d)).collect()).collect();
    let est = threshold_from_curves(&distances, &grid, &curves).unwrap();
    assert_eq!(est.crossings.len(), 3);
    for c in &est.crossings {
        assert!((c.p - 0.077).abs() < 5e-4, "{c:?}");
    }
    assert!((est.value - 0.077).abs() < 5e-4 && est.spread < 5e-4);
}

#[test]
fn straight_lines_cross_where_expected() {
    let grid: Vec<f64> = (0..6).map(|i| i as f64).collect();
    let small: Vec<f64> = grid.iter().map(|x| 1.0 + 0.5 * x).collect();
    let large: Vec<f64> = grid.iter().map(|x| x - 0.3).collect();
    // 1 + 0.5x = x - 0.3 at x = 2.6
    assert!((curve_crossing(&grid, &small, &large).unwrap() - 2.6).abs() < 1e-9);
}

#[test]
fn an_isolated_noisy_sign_flip_does_not_win() {
    let grid: Vec<f64> = (0..9).map(|i| i as f64).collect();
    let small = vec![0.0; 9];
    let large = vec![-1.0, 0.1, -1.0, -0.5, -0.2, 0.3, 0.6, 1.0, 1.4];
    let x = curve_crossing(&grid, &small, &large).unwrap();
    assert!(x > 4.0 && x < 5.0, "{x}");
}

#[test]
fn parallel_curves_have_no_crossing() {
    let grid: Vec<f64> = (0..9).map(|i| 0.06 + 0.005 * i as f64).collect();
    let small: Vec<f64> = grid.iter().map(|p| 2.0 * p).collect();
    let large: Vec<f64> = grid.iter().map(|p| 1.5 * p).collect();
    let err = threshold_from_curves(&[4, 5], &grid, &[small, large]).unwrap_err();
    assert!(matches!(err, ExperimentError::NoCrossingInWindow(4, 5)));
    let err = threshold_from_curves(&[4], &grid, &[grid.clone()]).unwrap_err();
    assert!(matches!(err, ExperimentError::TooFew { need: 2, .. }));
}

#[test]
fn exponential_fit_recovers_parameters() {
    let pts: Vec<(usize, f64)> = (4..=9).map(|d| (d, 0.8 * (-0.55 * d as f64).exp())).collect();
    let f = suppression_fit(&pts).unwrap();
    assert!((f.alpha - 0.55).abs() < 1e-9 && (f.amplitude - 0.8).abs() < 1e-9 && (f.r_squared - 1.0).abs() < 1e-9);
    assert!(f.is_suppressed());
    let growing: Vec<(usize, f64)> = (4..=9).map(|d| (d, 0.01 * (0.2 * d as f64).exp())).collect();
    assert!(!suppression_fit(&growing).unwrap().is_suppressed());
    assert!(matches!(suppression_fit(&[(4, 0.1), (5, 0.0), (6, 0.01)]), Err(ExperimentError::NonPositiveRates)));
    assert!(matches!(suppression_fit(&[(4, 0.1), (5, 0.05)]), Err(ExperimentError::TooFew { .. })));
}

#[test]
fn spearman_known_values() {
    let x = [1.0, 2.0, 3.0, 4.0, 5.0];
    assert!((spearman(&x, &[2.0, 4.0, 6.0, 8.0, 10.0]) - 1.0).abs() < 1e-12);
    assert!((spearman(&x, &[5.0, 4.0, 3.0, 2.0, 1.0]) + 1.0).abs() < 1e-12);
    // 1 - 6 Σd² / (n(n²-1)) with d = (0, 0, 1, -1, 0)
    assert!((spearman(&x, &[1.0, 2.0, 4.0, 3.0, 5.0]) - 0.9).abs() < 1e-12);
    let y: Vec<f64> = (0..12).map(|i| i as f64).collect();
    let p = spearman_p_value(&y, &y, 2000, 1);
    assert!(p < 0.002, "{p}");
    let rev: Vec<f64> = y.iter().rev().cloned().collect();
    assert!(spearman_p_value(&y, &rev, 2000, 1) > 0.99);
}

#[test]
fn records_do_not_depend_on_how_they_are_split() {
    let lat = CodeLattice::new(4).unwrap();
    let model = NoiseModel::with_p_eff(NoiseKind::Depolarizing, 0.09).unwrap();
    let gen = |a, b| generate_records(&lat, &model, CodeKind::Semion, DecoderKind::Simple, 22, 5, a, b, true).unwrap();
    let whole = gen(0, 5000);
    let mut parts = gen(0, 1234);
    parts.extend(gen(1234, 2049));
    parts.extend(gen(2049, 5000));
    assert_eq!(whole, parts);
    assert_eq!(whole[0].bits.len(), 3 * 16);
}

#[test]
fn oracle_and_identity_predictors() {
    let oracle = |r: &[LabeledBits]| Ok(r.iter().map(|x| x.label.value()).collect());
    let e = evaluate_mlp_with(&oracle, 4, NoiseKind::Independent, 0.08, 4000, 3, 22).unwrap();
    assert_eq!(e.mlp_failures, 0);
    assert_eq!(e.mlp_accuracy, 1.0);
    assert!(e.mwpm_failures > 0 && e.mlp_better_by(3.0));
    let identity = |r: &[LabeledBits]| Ok(vec![0; r.len()]);
    let e = evaluate_mlp_with(&identity, 4, NoiseKind::Independent, 0.08, 4000, 3, 22).unwrap();
    assert_eq!(e.mlp_failures, e.simple_failures);
    // MWPM beats the bare simple decoder, so the identity predictor loses
    assert!(e.paired_difference > 0.0 && !e.mlp_better_by(0.0));
}

#[test]
fn curriculum_split() {
    let c = Curriculum::new(NoiseKind::Independent, 0.09, 1000);
    assert_eq!(c.warmup_records(), 100);
    assert!((c.warmup_p_eff - 0.045).abs() < 1e-15);
}
