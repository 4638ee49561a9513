mod common;

use common::max_relative_gradient_error;
use ndarray::{Array2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use semion_core::mlp::{to_matrix, train, train_more, Mlp, MlpConfig, MlpError, N_CLASSES};

fn random_batch(rng: &mut ChaCha8Rng, rows: usize, width: usize) -> (Array2<f64>, Vec<u8>) {
    let x = Array2::from_shape_fn((rows, width), |_| rng.gen_range(0..2) as f64);
    let y = (0..rows).map(|_| rng.gen_range(0..N_CLASSES as u8)).collect();
    (x, y)
}

#[test]
fn gradients_match_central_differences() {
    let mut config = MlpConfig::new(6, 2, 8);
    config.seed = 3;
    let mut net = Mlp::init(config).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    // move batch-norm scale and shift away from their initial values
    for l in 0..2 {
        for k in [2, 3] {
            net.params_mut()[4 * l + k].mapv_inplace(|v| v + rng.gen_range(-0.3..0.3));
        }
    }
    let (x, y) = random_batch(&mut rng, 12, 6);
    let worst = max_relative_gradient_error(&mut net, x.view(), &y);
    assert!(worst < 1e-5, "max relative error {worst}");
}

#[test]
fn probabilities_are_normalised() {
    let mut c = MlpConfig::new(20, 3, 32);
    c.seed = 5;
    let net = Mlp::init(c).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (x, _) = random_batch(&mut rng, 64, 20);
    for training in [true, false] {
        let p = net.forward(x.view(), training).unwrap();
        assert_eq!(p.dim(), (64, N_CLASSES));
        for row in p.rows() {
            assert!(row.iter().all(|&v| v >= 0.0));
            assert!((row.sum() - 1.0).abs() < 1e-9);
        }
    }
}

#[test]
fn fresh_network_is_near_uniform() {
    let mut c = MlpConfig::new(75, 2, 128);
    c.seed = 8;
    let net = Mlp::init(c).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (x, _) = random_batch(&mut rng, 2000, 75);
    let p = net.forward(x.view(), true).unwrap();
    let entropy: f64 = p.rows().into_iter().map(|r| -r.iter().map(|&q| q * q.ln()).sum::<f64>()).sum::<f64>() / 2000.0;
    let max = (N_CLASSES as f64).ln();
    assert!(entropy > 0.8 * max && entropy <= max + 1e-12, "entropy {entropy}");
}

#[test]
fn batch_norm_statistics() {
    let mut c = MlpConfig::new(30, 2, 40);
    c.seed = 9;
    let net = Mlp::init(c).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (x, _) = random_batch(&mut rng, 500, 30);
    for xhat in net.normalized_preactivations(x.view()).unwrap() {
        let mean = xhat.mean_axis(Axis(0)).unwrap();
        let var = xhat.mapv(|v| v * v).mean_axis(Axis(0)).unwrap();
        assert!(mean.iter().all(|m| m.abs() < 1e-6));
        // the batch-norm epsilon shrinks the variance slightly below 1
        assert!(var.iter().all(|v| (v - 1.0).abs() < 1e-4), "{var}");
    }
}

#[test]
fn width_mismatch_is_rejected() {
    let net = Mlp::init(MlpConfig::new(10, 1, 4)).unwrap();
    let x = Array2::zeros((3, 9));
    assert!(matches!(net.forward(x.view(), false), Err(MlpError::WidthMismatch { expected: 10, got: 9 })));
    let x = Array2::zeros((3, 10));
    assert!(matches!(net.loss_and_gradients(x.view(), &[1, 2]), Err(MlpError::LabelMismatch { .. })));
    assert!(matches!(net.loss_and_gradients(x.view(), &[1, 2, 16]), Err(MlpError::LabelOutOfRange(16))));
}

#[test]
fn overfits_a_fixed_batch() {
    let mut c = MlpConfig::new(16, 2, 64);
    c.seed = 10;
    c.learning_rate = 3e-3;
    let mut net = Mlp::init(c).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (x, y) = random_batch(&mut rng, 64, 16);
    let losses: Vec<f64> = (0..60).map(|_| net.train_step(x.view(), &y).unwrap()).collect();
    for w in losses[3..].windows(2) {
        assert!(w[1] < w[0], "loss went up: {losses:?}");
    }
    assert!(net.is_finite());
}

#[test]
fn learns_four_bit_parity() {
    let mut c = MlpConfig::new(4, 2, 32);
    c.seed = 11;
    c.batch_size = 16;
    c.learning_rate = 1e-2;
    let inputs: Vec<Vec<u8>> = (0..16u8).map(|v| (0..4).map(|b| v >> b & 1).collect()).collect();
    let labels: Vec<u8> = (0..16u8).map(|v| (v.count_ones() % 2) as u8).collect();
    let stream = (0..3000).flat_map(|_| inputs.clone().into_iter().zip(labels.clone()));
    let net = train(c, stream).unwrap();
    let x = to_matrix(&inputs, 4).unwrap();
    assert_eq!(net.accuracy(x.view(), &labels).unwrap(), 1.0);
}

#[test]
fn empty_stream_leaves_initial_state() {
    let mut c = MlpConfig::new(12, 2, 8);
    c.seed = 12;
    let trained = train(c.clone(), std::iter::empty()).unwrap();
    assert_eq!(trained, Mlp::init(c).unwrap());
    assert_eq!(trained.step(), 0);
}

fn stream(seed: u64, n: usize, width: usize) -> impl Iterator<Item = (Vec<u8>, u8)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(move |_| {
        let bits: Vec<u8> = (0..width).map(|_| rng.gen_range(0..2)).collect();
        let label = (bits[0] + 2 * bits[1]) as u8;
        (bits, label)
    })
}

#[test]
fn training_is_deterministic() {
    let mut c = MlpConfig::new(12, 2, 16);
    c.seed = 13;
    c.batch_size = 50;
    let a = train(c.clone(), stream(1, 1000, 12)).unwrap();
    let b = train(c.clone(), stream(1, 1000, 12)).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.step(), 20);
    assert_ne!(a, Mlp::init(c).unwrap());
    let same_init = Mlp::init(MlpConfig { seed: 13, ..MlpConfig::new(12, 2, 16) }).unwrap();
    assert_eq!(same_init, Mlp::init(MlpConfig { seed: 13, ..MlpConfig::new(12, 2, 16) }).unwrap());
}

#[test]
fn partial_final_batch_is_used() {
    let mut c = MlpConfig::new(12, 1, 8);
    c.batch_size = 40;
    let mut net = Mlp::init(c).unwrap();
    let mut steps = Vec::new();
    train_more(&mut net, stream(2, 100, 12), |s, loss| {
        assert!(loss.is_finite());
        steps.push(s)
    })
    .unwrap();
    assert_eq!(steps, vec![1, 2, 3]);
}

#[test]
fn checkpoint_round_trip() {
    let mut c = MlpConfig::new(12, 2, 16);
    c.batch_size = 25;
    let net = train(c, stream(3, 500, 12)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.smlp");
    net.save(&path).unwrap();
    let back = Mlp::load(&path).unwrap();
    assert_eq!(back, net);
    let bytes = std::fs::read(&path).unwrap();
    assert_eq!(&bytes[..4], b"SMLP");
    // trainable parameters, running moments, two Adam moments, header
    let floats = 3 * net.parameter_count() + 2 * 2 * 16;
    assert_eq!(bytes.len(), 5 + 5 * 8 + 6 * 8 + 16 + 8 * floats);
    std::fs::write(&path, &bytes[..bytes.len() - 8]).unwrap();
    assert!(matches!(Mlp::load(&path), Err(MlpError::Checkpoint(_))));
    let mut bad = bytes.clone();
    bad[0] = b'X';
    std::fs::write(&path, &bad).unwrap();
    assert!(matches!(Mlp::load(&path), Err(MlpError::Checkpoint(_))));
    assert!(matches!(Mlp::load(&dir.path().join("missing")), Err(MlpError::Io(_))));
}

#[test]
fn reported_parameter_counts() {
    let d5 = MlpConfig::for_distance(5, 6, 900);
    let n5 = d5.parameter_count();
    println!("d=5 H=6 N=900: {n5} parameters");
    assert_eq!(n5, 75 * 900 + 3 * 900 + 5 * (900 * 900 + 3 * 900) + 900 * 16 + 16);
    let d7 = MlpConfig::for_distance(7, 8, 1400).parameter_count();
    println!("d=7 H=8 N=1400: {d7} parameters");
    assert!((d7 as f64 / 1.2e7).log10().abs() < 0.1, "{d7}");
}
