//! Monte Carlo drivers: logical error rates, threshold crossings,
//! exponential suppression fits, MLP training data and evaluation.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decoders::{decode, logical_class, sample_record, ClassLabel, CodeKind, DecodeError, DecoderKind};
use crate::lattice::CodeLattice;
use crate::mlp::{train_more, Mlp, MlpConfig, MlpError};
use crate::noise::{NoiseError, NoiseKind, NoiseModel};
use crate::rng::{derive_seed, RngTrace};

/// Samples per parallel work unit. Results are summed in unit order, so
/// they do not depend on the number of workers.
pub const CHUNK: u64 = 2048;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error(transparent)]
    Mlp(#[from] MlpError),
    #[error("no crossing between d={0} and d={1} inside the scanned window")]
    NoCrossingInWindow(usize, usize),
    #[error("need at least {need} {what}, got {got}")]
    TooFew { what: &'static str, need: usize, got: usize },
    #[error("logical error rates must be positive for a log fit")]
    NonPositiveRates,
}

/// Wilson score interval at `z` standard deviations.
pub fn wilson_interval(successes: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub d: usize,
    pub code: CodeKind,
    pub noise: NoiseKind,
    pub p_eff: f64,
    pub decoder: DecoderKind,
    pub n_samples: u64,
    pub failures: u64,
    pub p_bar: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub fallback_fraction: f64,
    pub wrapped_fraction: f64,
    pub master_seed: u64,
    pub cap: usize,
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    failures: u64,
    fallback: u64,
    wrapped: u64,
}

/// Everything needed to regenerate a rate point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateSpec {
    pub d: usize,
    pub code: CodeKind,
    pub noise: NoiseKind,
    pub p_eff: f64,
    pub decoder: DecoderKind,
    pub n: u64,
    pub master_seed: u64,
    pub cap: usize,
}

/// Logical error rate: fraction of samples whose corrected class is not
/// the identity. Runs on the current rayon pool.
pub fn estimate_rate(spec: &RateSpec) -> Result<RatePoint, ExperimentError> {
    let lat = CodeLattice::new(spec.d).expect("valid distance");
    let model = NoiseModel::with_p_eff(spec.noise, spec.p_eff)?;
    let chunks: Vec<u64> = (0..spec.n.div_ceil(CHUNK)).collect();
    let tallies: Vec<Result<Tally, DecodeError>> = chunks
        .par_iter()
        .map(|&c| {
            let mut t = Tally::default();
            for index in c * CHUNK..((c + 1) * CHUNK).min(spec.n) {
                let trace = RngTrace { master_seed: spec.master_seed, index };
                let (error, s) = sample_record(&lat, &model, spec.code, spec.cap, trace);
                let r = decode(&lat, spec.decoder, &s)?;
                if !logical_class(&lat, &error, &s.residual_zq, &r)?.is_identity() {
                    t.failures += 1;
                }
                t.fallback += s.flags.used_fallback as u64;
                t.wrapped += s.flags.wrapped_component as u64;
            }
            Ok(t)
        })
        .collect();
    let mut total = Tally::default();
    for t in tallies {
        let t = t?;
        total.failures += t.failures;
        total.fallback += t.fallback;
        total.wrapped += t.wrapped;
    }
    let n = spec.n.max(1) as f64;
    let (ci_low, ci_high) = wilson_interval(total.failures, spec.n, 1.96);
    Ok(RatePoint {
        d: spec.d,
        code: spec.code,
        noise: spec.noise,
        p_eff: spec.p_eff,
        decoder: spec.decoder,
        n_samples: spec.n,
        failures: total.failures,
        p_bar: total.failures as f64 / n,
        ci_low,
        ci_high,
        fallback_fraction: total.fallback as f64 / n,
        wrapped_fraction: total.wrapped as f64 / n,
        master_seed: spec.master_seed,
        cap: spec.cap,
    })
}

/// Per-point seed so that every point of a scan has its own streams.
pub fn point_seed(master: u64, d: usize, grid_index: usize) -> u64 {
    derive_seed(master, ((d as u64) << 32) | grid_index as u64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub d_small: usize,
    pub d_large: usize,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEstimate {
    pub crossings: Vec<Crossing>,
    /// Mean of the pairwise crossings.
    pub value: f64,
    /// Half of their range.
    pub spread: f64,
}

/// Least-squares quadratic `(a, b, c)` for `y = a + b t + c t²`.
pub fn fit_quadratic(t: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let mut s = [0.0f64; 5];
    let mut r = [0.0f64; 3];
    for (&x, &v) in t.iter().zip(y) {
        let mut pw = 1.0;
        for k in 0..5 {
            s[k] += pw;
            if k < 3 {
                r[k] += pw * v;
            }
            pw *= x;
        }
    }
    let m = [[s[0], s[1], s[2]], [s[1], s[2], s[3]], [s[2], s[3], s[4]]];
    let det3 = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let det = det3(m);
    let solve = |col: usize| {
        let mut mm = m;
        for row in 0..3 {
            mm[row][col] = r[row];
        }
        det3(mm) / det
    };
    (solve(0), solve(1), solve(2))
}

/// Crossing of two curves sampled on the same grid: quadratic fits over the
/// window of up to five points around the sign change of their difference,
/// then the root of the fitted difference inside that interval. With noisy
/// curves the difference can change sign more than once; the interval used
/// is the split that agrees with the most signs (larger distance below on the
/// left, above on the right).
pub fn curve_crossing(grid: &[f64], small: &[f64], large: &[f64]) -> Option<f64> {
    let diff: Vec<f64> = small.iter().zip(large).map(|(a, b)| b - a).collect();
    let score = |k: usize| diff[..=k].iter().filter(|&&x| x < 0.0).count() + diff[k + 1..].iter().filter(|&&x| x > 0.0).count();
    let k = (0..grid.len() - 1)
        .filter(|&i| diff[i] <= 0.0 && diff[i + 1] > 0.0 || diff[i] < 0.0 && diff[i + 1] >= 0.0)
        .max_by_key(|&i| (score(i), std::cmp::Reverse(i)))?;
    let lo = k.saturating_sub(2).min(grid.len().saturating_sub(5));
    let hi = (lo + 5).min(grid.len());
    let centre = grid[k];
    let t: Vec<f64> = grid[lo..hi].iter().map(|p| p - centre).collect();
    let fa = fit_quadratic(&t, &small[lo..hi]);
    let fb = fit_quadratic(&t, &large[lo..hi]);
    let (a, b, c) = (fb.0 - fa.0, fb.1 - fa.1, fb.2 - fa.2);
    let (t0, t1) = (grid[k] - centre, grid[k + 1] - centre);
    let f = |x: f64| a + b * x + c * x * x;
    if f(t0) * f(t1) > 0.0 {
        // the fit smoothed the sign change away; fall back to the chord
        let x = t0 + (t1 - t0) * diff[k] / (diff[k] - diff[k + 1]);
        return Some(centre + x);
    }
    // bisection on the fitted difference
    let (mut l, mut h) = (t0, t1);
    for _ in 0..200 {
        let mid = 0.5 * (l + h);
        if f(l) * f(mid) <= 0.0 {
            h = mid;
        } else {
            l = mid;
        }
    }
    Some(centre + 0.5 * (l + h))
}

/// `curves[i]` holds p̄ over `grid` for `distances[i]` (ascending).
pub fn threshold_from_curves(distances: &[usize], grid: &[f64], curves: &[Vec<f64>]) -> Result<ThresholdEstimate, ExperimentError> {
    if distances.len() < 2 {
        return Err(ExperimentError::TooFew { what: "distances", need: 2, got: distances.len() });
    }
    if grid.len() < 5 {
        return Err(ExperimentError::TooFew { what: "grid points", need: 5, got: grid.len() });
    }
    let mut crossings = Vec::new();
    for i in 0..distances.len() - 1 {
        let p = curve_crossing(grid, &curves[i], &curves[i + 1])
            .ok_or(ExperimentError::NoCrossingInWindow(distances[i], distances[i + 1]))?;
        crossings.push(Crossing { d_small: distances[i], d_large: distances[i + 1], p });
    }
    let ps: Vec<f64> = crossings.iter().map(|c| c.p).collect();
    let value = ps.iter().sum::<f64>() / ps.len() as f64;
    let lo = ps.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(ThresholdEstimate { crossings, value, spread: 0.5 * (hi - lo) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdScan {
    pub points: Vec<RatePoint>,
    pub estimate: Result<ThresholdEstimate, String>,
}

/// Rate points for every (distance, grid point), then pairwise crossings.
#[allow(clippy::too_many_arguments)]
pub fn threshold_scan(
    code: CodeKind,
    noise: NoiseKind,
    decoder: DecoderKind,
    distances: &[usize],
    grid: &[f64],
    n: u64,
    seed: u64,
    cap: usize,
    mut progress: impl FnMut(&RatePoint),
) -> Result<ThresholdScan, ExperimentError> {
    if distances.len() < 2 {
        return Err(ExperimentError::TooFew { what: "distances", need: 2, got: distances.len() });
    }
    if grid.len() < 5 {
        return Err(ExperimentError::TooFew { what: "grid points", need: 5, got: grid.len() });
    }
    let mut points = Vec::new();
    let mut curves = Vec::new();
    for &d in distances {
        let mut curve = Vec::new();
        for (gi, &p) in grid.iter().enumerate() {
            let spec = RateSpec { d, code, noise, p_eff: p, decoder, n, master_seed: point_seed(seed, d, gi), cap };
            let point = estimate_rate(&spec)?;
            progress(&point);
            curve.push(point.p_bar);
            points.push(point);
        }
        curves.push(curve);
    }
    let estimate = threshold_from_curves(distances, grid, &curves).map_err(|e| e.to_string());
    Ok(ThresholdScan { points, estimate })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuppressionFit {
    pub amplitude: f64,
    pub alpha: f64,
    pub r_squared: f64,
}

impl SuppressionFit {
    /// True when the rate falls with distance.
    pub fn is_suppressed(&self) -> bool {
        self.alpha > 0.0
    }
}

/// Least squares of `ln p̄ = ln A - α d`.
pub fn suppression_fit(points: &[(usize, f64)]) -> Result<SuppressionFit, ExperimentError> {
    if points.len() < 3 {
        return Err(ExperimentError::TooFew { what: "distances", need: 3, got: points.len() });
    }
    if points.iter().any(|&(_, p)| !(p > 0.0)) {
        return Err(ExperimentError::NonPositiveRates);
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|&(d, _)| d as f64).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, p)| p.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    Ok(SuppressionFit { amplitude: intercept.exp(), alpha: -slope, r_squared })
}

/// Training and evaluation records: stabilizer bits (vertices, then
/// plaquettes) and the class left by the labelling decoder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledBits {
    pub bits: Vec<u8>,
    pub label: ClassLabel,
    /// Class left by MWPM on the same sample.
    pub mwpm_class: Option<ClassLabel>,
}

/// Records `start..end` of stream `master_seed`, in index order.
#[allow(clippy::too_many_arguments)]
pub fn generate_records(
    lat: &CodeLattice,
    model: &NoiseModel,
    code: CodeKind,
    label_decoder: DecoderKind,
    cap: usize,
    master_seed: u64,
    start: u64,
    end: u64,
    with_mwpm: bool,
) -> Result<Vec<LabeledBits>, ExperimentError> {
    let chunks: Vec<u64> = (start / CHUNK..end.div_ceil(CHUNK)).collect();
    let parts: Vec<Result<Vec<LabeledBits>, DecodeError>> = chunks
        .par_iter()
        .map(|&c| {
            let lo = (c * CHUNK).max(start);
            let hi = ((c + 1) * CHUNK).min(end);
            (lo..hi)
                .map(|index| {
                    let (error, s) = sample_record(lat, model, code, cap, RngTrace { master_seed, index });
                    let r = decode(lat, label_decoder, &s)?;
                    let label = logical_class(lat, &error, &s.residual_zq, &r)?;
                    let mwpm_class = if with_mwpm {
                        let r = decode(lat, DecoderKind::Mwpm, &s)?;
                        Some(logical_class(lat, &error, &s.residual_zq, &r)?)
                    } else {
                        None
                    };
                    Ok(LabeledBits { bits: s.stabilizer_bits(), label, mwpm_class })
                })
                .collect()
        })
        .collect();
    let mut out = Vec::with_capacity((end - start) as usize);
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

/// Warm-up on a lower rate before the target rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Curriculum {
    pub noise: NoiseKind,
    pub p_eff: f64,
    pub warmup_p_eff: f64,
    pub warmup_fraction: f64,
    pub records: u64,
}

impl Curriculum {
    /// 10% of the records at half the target rate.
    pub fn new(noise: NoiseKind, p_eff: f64, records: u64) -> Self {
        Curriculum { noise, p_eff, warmup_p_eff: p_eff / 2.0, warmup_fraction: 0.1, records }
    }

    pub fn warmup_records(&self) -> u64 {
        (self.records as f64 * self.warmup_fraction).round() as u64
    }
}

/// Seeds of the warm-up and main training streams and of evaluation.
pub fn training_seed(seed: u64) -> (u64, u64) {
    (derive_seed(seed, 0x7761_726d), derive_seed(seed, 0x6d61_696e))
}

pub fn evaluation_seed(seed: u64, p_eff: f64) -> u64 {
    derive_seed(seed, 0x6576_616c ^ p_eff.to_bits())
}

/// Single pass over freshly generated records, generated one block at a
/// time so memory stays bounded.
pub fn train_mlp(
    config: MlpConfig,
    d: usize,
    curriculum: &Curriculum,
    seed: u64,
    cap: usize,
    mut on_step: impl FnMut(u64, f64),
) -> Result<Mlp, ExperimentError> {
    let lat = CodeLattice::new(d).expect("valid distance");
    let mut net = Mlp::init(config)?;
    let (warm_seed, main_seed) = training_seed(seed);
    let warm_n = curriculum.warmup_records();
    let stages = [
        (curriculum.warmup_p_eff, warm_seed, warm_n),
        (curriculum.p_eff, main_seed, curriculum.records - warm_n),
    ];
    let block = (net.config().batch_size as u64 * 20).max(CHUNK);
    for (p, stage_seed, n) in stages {
        let model = NoiseModel::with_p_eff(curriculum.noise, p)?;
        let mut start = 0;
        while start < n {
            let end = (start + block).min(n);
            let recs = generate_records(&lat, &model, CodeKind::Semion, DecoderKind::Simple, cap, stage_seed, start, end, false)?;
            train_more(&mut net, recs.into_iter().map(|r| (r.bits, r.label.value())), &mut on_step)?;
            start = end;
        }
    }
    Ok(net)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpEvaluation {
    pub d: usize,
    pub noise: NoiseKind,
    pub p_eff: f64,
    pub n: u64,
    pub master_seed: u64,
    pub mlp_failures: u64,
    pub mwpm_failures: u64,
    pub simple_failures: u64,
    pub mlp_accuracy: f64,
    pub mwpm_accuracy: f64,
    pub mlp_p_bar: f64,
    pub mwpm_p_bar: f64,
    pub simple_p_bar: f64,
    pub mlp_ci: (f64, f64),
    pub mwpm_ci: (f64, f64),
    /// Mean and standard error of the per-sample difference
    /// `fail(MLP) - fail(MWPM)`.
    pub paired_difference: f64,
    pub paired_std_error: f64,
}

impl MlpEvaluation {
    /// `p̄(MLP) < p̄(MWPM)` by at least `sigmas` paired standard errors.
    pub fn mlp_better_by(&self, sigmas: f64) -> bool {
        self.paired_difference + sigmas * self.paired_std_error < 0.0
    }
}

/// Paired evaluation: the MLP predicts the simple-decoder label, MWPM
/// decodes the same samples. A prediction is correct when it matches the
/// label, so accuracy is `1 - p̄`.
pub fn evaluate_mlp_with(
    predict: &dyn Fn(&[LabeledBits]) -> Result<Vec<u8>, MlpError>,
    d: usize,
    noise: NoiseKind,
    p_eff: f64,
    n: u64,
    master_seed: u64,
    cap: usize,
) -> Result<MlpEvaluation, ExperimentError> {
    let lat = CodeLattice::new(d).expect("valid distance");
    let model = NoiseModel::with_p_eff(noise, p_eff)?;
    let (mut mlp_f, mut mwpm_f, mut simple_f) = (0u64, 0u64, 0u64);
    let (mut sum_diff, mut sum_diff2) = (0f64, 0f64);
    let block = 20_000;
    let mut start = 0;
    while start < n {
        let end = (start + block).min(n);
        let recs = generate_records(&lat, &model, CodeKind::Semion, DecoderKind::Simple, cap, master_seed, start, end, true)?;
        let pred = predict(&recs)?;
        for (r, &p) in recs.iter().zip(&pred) {
            let a = (p != r.label.value()) as i32;
            let b = !r.mwpm_class.expect("mwpm class").is_identity() as i32;
            mlp_f += a as u64;
            mwpm_f += b as u64;
            simple_f += !r.label.is_identity() as u64;
            let diff = (a - b) as f64;
            sum_diff += diff;
            sum_diff2 += diff * diff;
        }
        start = end;
    }
    let nf = n.max(1) as f64;
    let mean = sum_diff / nf;
    let var = if n > 1 { (sum_diff2 - nf * mean * mean) / (nf - 1.0) } else { 0.0 };
    Ok(MlpEvaluation {
        d,
        noise,
        p_eff,
        n,
        master_seed,
        mlp_failures: mlp_f,
        mwpm_failures: mwpm_f,
        simple_failures: simple_f,
        mlp_accuracy: 1.0 - mlp_f as f64 / nf,
        mwpm_accuracy: 1.0 - mwpm_f as f64 / nf,
        mlp_p_bar: mlp_f as f64 / nf,
        mwpm_p_bar: mwpm_f as f64 / nf,
        simple_p_bar: simple_f as f64 / nf,
        mlp_ci: wilson_interval(mlp_f, n, 1.96),
        mwpm_ci: wilson_interval(mwpm_f, n, 1.96),
        paired_difference: mean,
        paired_std_error: (var.max(0.0) / nf).sqrt(),
    })
}

pub fn evaluate_mlp(net: &Mlp, d: usize, noise: NoiseKind, p_eff: f64, n: u64, master_seed: u64, cap: usize) -> Result<MlpEvaluation, ExperimentError> {
    let width = net.config().input_dim;
    let predict = |recs: &[LabeledBits]| {
        let rows: Vec<Vec<u8>> = recs.iter().map(|r| r.bits.clone()).collect();
        net.predict(crate::mlp::to_matrix(&rows, width)?.view())
    };
    evaluate_mlp_with(&predict, d, noise, p_eff, n, master_seed, cap)
}

/// Spearman rank correlation, with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].partial_cmp(&v[b]).unwrap());
        let mut r = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0 + 1.0;
            for k in i..=j {
                r[idx[k]] = avg;
            }
            i = j + 1;
        }
        r
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    if vx == 0.0 || vy == 0.0 {
        return 0.0;
    }
    cov / (vx * vy).sqrt()
}

/// One-sided permutation p-value for a positive Spearman correlation.
pub fn spearman_p_value(x: &[f64], y: &[f64], permutations: usize, seed: u64) -> f64 {
    let observed = spearman(x, y);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut shuffled = y.to_vec();
    let mut hits = 0;
    for _ in 0..permutations {
        shuffled.shuffle(&mut rng);
        if spearman(x, &shuffled) >= observed - 1e-12 {
            hits += 1;
        }
    }
    (hits + 1) as f64 / (permutations + 1) as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityRow {
    pub hidden_layers: usize,
    pub nodes: usize,
    pub parameters: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityScan {
    pub rows: Vec<CapacityRow>,
    pub spearman: f64,
    pub p_value: f64,
}

/// Train one MLP per `(H, N)` with the same data budget and evaluate each
/// on the same held-out samples.
#[allow(clippy::too_many_arguments)]
pub fn capacity_scan(
    d: usize,
    curriculum: &Curriculum,
    grid: &[(usize, usize)],
    base: &MlpConfig,
    eval_n: u64,
    seed: u64,
    cap: usize,
    mut progress: impl FnMut(&CapacityRow),
) -> Result<CapacityScan, ExperimentError> {
    let mut rows = Vec::new();
    for &(h, n) in grid {
        let config = MlpConfig { hidden_layers: h, nodes: n, input_dim: 3 * d * d, ..base.clone() };
        let net = train_mlp(config, d, curriculum, seed, cap, |_, _| {})?;
        let eval = evaluate_mlp(&net, d, curriculum.noise, curriculum.p_eff, eval_n, evaluation_seed(seed, curriculum.p_eff), cap)?;
        let row = CapacityRow { hidden_layers: h, nodes: n, parameters: net.parameter_count(), accuracy: eval.mlp_accuracy };
        progress(&row);
        rows.push(row);
    }
    let params: Vec<f64> = rows.iter().map(|r| r.parameters as f64).collect();
    let acc: Vec<f64> = rows.iter().map(|r| r.accuracy).collect();
    let (rho, p) = if rows.len() >= 3 { (spearman(&params, &acc), spearman_p_value(&params, &acc, 10_000, seed)) } else { (0.0, 1.0) };
    Ok(CapacityScan { rows, spearman: rho, p_value: p })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_contains_estimate() {
        for (k, n) in [(0, 10), (5, 10), (10, 10), (37, 1000)] {
            let (lo, hi) = wilson_interval(k, n, 1.96);
            let p = k as f64 / n as f64;
            assert!(lo <= p && p <= hi);
        }
    }
}
