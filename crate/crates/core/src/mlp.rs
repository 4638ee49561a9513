//! Fully connected 16-way classifier: affine, batch norm and ReLU per hidden
//! layer, softmax output, cross-entropy loss, Adam.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::{Array1, Array2, ArrayD, ArrayView2, Axis, Ix1, Ix2, IxDyn, Zip};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const CHECKPOINT_MAGIC: &[u8; 4] = b"SMLP";
pub const CHECKPOINT_VERSION: u8 = 1;
pub const N_CLASSES: usize = 16;

#[derive(Debug, Error)]
pub enum MlpError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("input width {got}, expected {expected}")]
    WidthMismatch { expected: usize, got: usize },
    #[error("{inputs} inputs but {labels} labels")]
    LabelMismatch { inputs: usize, labels: usize },
    #[error("label {0} out of range")]
    LabelOutOfRange(u8),
    #[error("batch of {0} examples is too small for batch statistics")]
    BatchTooSmall(usize),
    #[error("non-finite loss {loss} at step {step}")]
    NonFinite { step: u64, loss: f64 },
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpConfig {
    pub input_dim: usize,
    pub hidden_layers: usize,
    pub nodes: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    /// Weight of the newest batch in the running moments.
    pub bn_momentum: f64,
    pub bn_epsilon: f64,
    pub seed: u64,
}

impl MlpConfig {
    pub fn new(input_dim: usize, hidden_layers: usize, nodes: usize) -> Self {
        MlpConfig {
            input_dim,
            hidden_layers,
            nodes,
            batch_size: 10_000,
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            bn_momentum: 0.1,
            bn_epsilon: 1e-5,
            seed: 0,
        }
    }

    /// Input width for distance `d`: every vertex and plaquette bit.
    pub fn for_distance(d: usize, hidden_layers: usize, nodes: usize) -> Self {
        Self::new(3 * d * d, hidden_layers, nodes)
    }

    pub fn validate(&self) -> Result<(), MlpError> {
        let bad = |m: &str| Err(MlpError::InvalidConfig(m.to_string()));
        if self.input_dim == 0 {
            return bad("input_dim must be positive");
        }
        if self.hidden_layers == 0 || self.nodes == 0 {
            return bad("need at least one hidden layer with one node");
        }
        if self.batch_size < 2 {
            return bad("batch_size must be at least 2");
        }
        if !(self.learning_rate > 0.0) || !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return bad("Adam hyperparameters out of range");
        }
        if !(self.bn_momentum > 0.0 && self.bn_momentum <= 1.0) {
            return bad("bn_momentum must be in (0, 1]");
        }
        Ok(())
    }

    /// Trainable parameters: weights, biases, and batch-norm scale and shift.
    pub fn parameter_count(&self) -> usize {
        let (n, h) = (self.nodes, self.hidden_layers);
        (self.input_dim * n + 3 * n) + (h - 1) * (n * n + 3 * n) + n * N_CLASSES + N_CLASSES
    }
}

struct Cache {
    /// Layer inputs: the batch, then each hidden activation.
    activations: Vec<Array2<f64>>,
    xhat: Vec<Array2<f64>>,
    inv_std: Vec<Array1<f64>>,
    batch_mean: Vec<Array1<f64>>,
    batch_var: Vec<Array1<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    config: MlpConfig,
    /// Per hidden layer `[W, b, gamma, beta]`, then `[W_out, b_out]`.
    params: Vec<ArrayD<f64>>,
    running_mean: Vec<Array1<f64>>,
    running_var: Vec<Array1<f64>>,
    adam_m: Vec<ArrayD<f64>>,
    adam_v: Vec<ArrayD<f64>>,
    step: u64,
}

fn view2(a: &ArrayD<f64>) -> ArrayView2<'_, f64> {
    a.view().into_dimensionality::<Ix2>().expect("matrix parameter")
}

fn view1(a: &ArrayD<f64>) -> ndarray::ArrayView1<'_, f64> {
    a.view().into_dimensionality::<Ix1>().expect("vector parameter")
}

fn softmax_rows(logits: &mut Array2<f64>) {
    for mut row in logits.rows_mut() {
        let max = row.fold(f64::NEG_INFINITY, |m, &v| m.max(v));
        row.mapv_inplace(|v| (v - max).exp());
        let s = row.sum();
        row.mapv_inplace(|v| v / s);
    }
}

impl Mlp {
    pub fn init(config: MlpConfig) -> Result<Self, MlpError> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut params = Vec::new();
        let mut he = |fan_in: usize, fan_out: usize| {
            let normal = Normal::new(0.0, (2.0 / fan_in as f64).sqrt()).unwrap();
            ArrayD::from_shape_fn(IxDyn(&[fan_in, fan_out]), |_| normal.sample(&mut rng))
        };
        let n = config.nodes;
        let mut fan_in = config.input_dim;
        for _ in 0..config.hidden_layers {
            params.push(he(fan_in, n));
            params.push(ArrayD::zeros(IxDyn(&[n])));
            params.push(ArrayD::ones(IxDyn(&[n])));
            params.push(ArrayD::zeros(IxDyn(&[n])));
            fan_in = n;
        }
        params.push(he(n, N_CLASSES));
        params.push(ArrayD::zeros(IxDyn(&[N_CLASSES])));
        let zeros: Vec<ArrayD<f64>> = params.iter().map(|p| ArrayD::zeros(p.raw_dim())).collect();
        Ok(Mlp {
            running_mean: vec![Array1::zeros(n); config.hidden_layers],
            running_var: vec![Array1::ones(n); config.hidden_layers],
            adam_m: zeros.clone(),
            adam_v: zeros,
            params,
            config,
            step: 0,
        })
    }

    pub fn config(&self) -> &MlpConfig {
        &self.config
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn params(&self) -> &[ArrayD<f64>] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [ArrayD<f64>] {
        &mut self.params
    }

    pub fn parameter_count(&self) -> usize {
        self.params.iter().map(|p| p.len()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.params.iter().chain(&self.adam_m).chain(&self.adam_v).all(|p| p.iter().all(|v| v.is_finite()))
            && self.running_mean.iter().chain(&self.running_var).all(|p| p.iter().all(|v| v.is_finite()))
    }

    fn check_width(&self, x: &ArrayView2<f64>) -> Result<(), MlpError> {
        if x.ncols() != self.config.input_dim {
            return Err(MlpError::WidthMismatch { expected: self.config.input_dim, got: x.ncols() });
        }
        Ok(())
    }

    /// Hidden pre-activations after batch norm, for inspection.
    pub fn normalized_preactivations(&self, x: ArrayView2<f64>) -> Result<Vec<Array2<f64>>, MlpError> {
        self.check_width(&x)?;
        Ok(self.forward_cached(x).1.xhat)
    }

    fn forward_cached(&self, x: ArrayView2<f64>) -> (Array2<f64>, Cache) {
        let m = x.nrows() as f64;
        let eps = self.config.bn_epsilon;
        let mut cache = Cache {
            activations: vec![x.to_owned()],
            xhat: Vec::new(),
            inv_std: Vec::new(),
            batch_mean: Vec::new(),
            batch_var: Vec::new(),
        };
        for l in 0..self.config.hidden_layers {
            let p = &self.params[4 * l..4 * l + 4];
            let mut z = cache.activations[l].dot(&view2(&p[0]));
            z += &view1(&p[1]);
            let mean = z.sum_axis(Axis(0)) / m;
            z -= &mean;
            let var = z.mapv(|v| v * v).sum_axis(Axis(0)) / m;
            let inv_std = var.mapv(|v| 1.0 / (v + eps).sqrt());
            z *= &inv_std;
            let (gamma, beta) = (view1(&p[2]), view1(&p[3]));
            let mut a = Array2::zeros(z.raw_dim());
            Zip::from(a.rows_mut()).and(z.rows()).for_each(|mut ar, zr| {
                Zip::from(&mut ar).and(&zr).and(&gamma).and(&beta).for_each(|o, &xh, &g, &b| *o = (g * xh + b).max(0.0));
            });
            cache.xhat.push(z);
            cache.inv_std.push(inv_std);
            cache.batch_mean.push(mean);
            cache.batch_var.push(var);
            cache.activations.push(a);
        }
        let h = self.config.hidden_layers;
        let mut logits = cache.activations[h].dot(&view2(&self.params[4 * h]));
        logits += &view1(&self.params[4 * h + 1]);
        softmax_rows(&mut logits);
        (logits, cache)
    }

    fn forward_inference(&self, x: ArrayView2<f64>) -> Array2<f64> {
        let eps = self.config.bn_epsilon;
        let mut a = x.to_owned();
        for l in 0..self.config.hidden_layers {
            let p = &self.params[4 * l..4 * l + 4];
            let scale = Zip::from(&view1(&p[2])).and(&self.running_var[l]).map_collect(|&g, &v| g / (v + eps).sqrt());
            let shift = Zip::from(&view1(&p[1]))
                .and(&self.running_mean[l])
                .and(&scale)
                .and(&view1(&p[3]))
                .map_collect(|&b, &mu, &s, &beta| (b - mu) * s + beta);
            let mut z = a.dot(&view2(&p[0]));
            Zip::from(z.rows_mut()).for_each(|mut r| {
                Zip::from(&mut r).and(&scale).and(&shift).for_each(|o, &s, &t| *o = (*o * s + t).max(0.0));
            });
            a = z;
        }
        let h = self.config.hidden_layers;
        let mut logits = a.dot(&view2(&self.params[4 * h]));
        logits += &view1(&self.params[4 * h + 1]);
        softmax_rows(&mut logits);
        logits
    }

    /// Class probabilities. Training mode normalises with batch statistics,
    /// inference mode with the running moments.
    pub fn forward(&self, x: ArrayView2<f64>, training: bool) -> Result<Array2<f64>, MlpError> {
        self.check_width(&x)?;
        if training {
            if x.nrows() < 2 {
                return Err(MlpError::BatchTooSmall(x.nrows()));
            }
            Ok(self.forward_cached(x).0)
        } else {
            Ok(self.forward_inference(x))
        }
    }

    /// Most probable class per row, in inference mode.
    pub fn predict(&self, x: ArrayView2<f64>) -> Result<Vec<u8>, MlpError> {
        self.check_width(&x)?;
        let mut out = Vec::with_capacity(x.nrows());
        for chunk in x.axis_chunks_iter(Axis(0), 4096) {
            let probs = self.forward_inference(chunk);
            for row in probs.rows() {
                let mut best = 0;
                for k in 1..N_CLASSES {
                    if row[k] > row[best] {
                        best = k;
                    }
                }
                out.push(best as u8);
            }
        }
        Ok(out)
    }

    fn check_batch(&self, x: &ArrayView2<f64>, labels: &[u8]) -> Result<(), MlpError> {
        self.check_width(x)?;
        if x.nrows() != labels.len() {
            return Err(MlpError::LabelMismatch { inputs: x.nrows(), labels: labels.len() });
        }
        if x.nrows() < 2 {
            return Err(MlpError::BatchTooSmall(x.nrows()));
        }
        if let Some(&l) = labels.iter().find(|&&l| l as usize >= N_CLASSES) {
            return Err(MlpError::LabelOutOfRange(l));
        }
        Ok(())
    }

    /// Mean cross-entropy in training mode and its gradient for every
    /// parameter, in `params()` order.
    pub fn loss_and_gradients(&self, x: ArrayView2<f64>, labels: &[u8]) -> Result<(f64, Vec<ArrayD<f64>>), MlpError> {
        self.check_batch(&x, labels)?;
        let (probs, cache) = self.forward_cached(x);
        Ok(self.backward(probs, &cache, labels))
    }

    fn backward(&self, probs: Array2<f64>, cache: &Cache, labels: &[u8]) -> (f64, Vec<ArrayD<f64>>) {
        let m = labels.len() as f64;
        let h = self.config.hidden_layers;
        let loss = labels.iter().enumerate().map(|(i, &y)| -probs[[i, y as usize]].max(f64::MIN_POSITIVE).ln()).sum::<f64>() / m;
        let mut grads: Vec<ArrayD<f64>> = vec![ArrayD::zeros(IxDyn(&[0])); self.params.len()];
        let mut delta = probs;
        for (i, &y) in labels.iter().enumerate() {
            delta[[i, y as usize]] -= 1.0;
        }
        delta /= m;
        grads[4 * h] = cache.activations[h].t().dot(&delta).into_dyn();
        grads[4 * h + 1] = delta.sum_axis(Axis(0)).into_dyn();
        let mut da = delta.dot(&view2(&self.params[4 * h]).t());
        for l in (0..h).rev() {
            let p = &self.params[4 * l..4 * l + 4];
            let (gamma, beta) = (view1(&p[2]), view1(&p[3]));
            let xhat = &cache.xhat[l];
            // through ReLU, recomputing the pre-activation sign
            Zip::from(da.rows_mut()).and(xhat.rows()).for_each(|mut dr, xr| {
                Zip::from(&mut dr).and(&xr).and(&gamma).and(&beta).for_each(|d, &xh, &g, &b| {
                    if g * xh + b <= 0.0 {
                        *d = 0.0;
                    }
                });
            });
            let dy = da;
            grads[4 * l + 2] = (&dy * xhat).sum_axis(Axis(0)).into_dyn();
            grads[4 * l + 3] = dy.sum_axis(Axis(0)).into_dyn();
            let mut dxhat = dy;
            dxhat *= &gamma;
            let sum_dxhat = dxhat.sum_axis(Axis(0));
            let sum_dxhat_xhat = (&dxhat * xhat).sum_axis(Axis(0));
            let inv_std = &cache.inv_std[l];
            let mut dz = dxhat;
            Zip::from(dz.rows_mut()).and(xhat.rows()).for_each(|mut dr, xr| {
                Zip::from(&mut dr).and(&xr).and(&sum_dxhat).and(&sum_dxhat_xhat).and(inv_std).for_each(
                    |d, &xh, &s1, &s2, &is| *d = is * (*d - s1 / m - xh * s2 / m),
                );
            });
            grads[4 * l] = cache.activations[l].t().dot(&dz).into_dyn();
            grads[4 * l + 1] = dz.sum_axis(Axis(0)).into_dyn();
            da = if l > 0 { dz.dot(&view2(&p[0]).t()) } else { Array2::zeros((0, 0)) };
        }
        (loss, grads)
    }

    /// One Adam step on the mean cross-entropy of the batch.
    pub fn train_step(&mut self, x: ArrayView2<f64>, labels: &[u8]) -> Result<f64, MlpError> {
        self.check_batch(&x, labels)?;
        let (probs, cache) = self.forward_cached(x);
        let (loss, grads) = self.backward(probs, &cache, labels);
        if !loss.is_finite() {
            return Err(MlpError::NonFinite { step: self.step, loss });
        }
        let c = &self.config;
        let mom = c.bn_momentum;
        for l in 0..c.hidden_layers {
            Zip::from(&mut self.running_mean[l]).and(&cache.batch_mean[l]).for_each(|r, &b| *r = (1.0 - mom) * *r + mom * b);
            Zip::from(&mut self.running_var[l]).and(&cache.batch_var[l]).for_each(|r, &b| *r = (1.0 - mom) * *r + mom * b);
        }
        self.step += 1;
        let t = self.step as i32;
        let (b1, b2, lr, eps) = (c.beta1, c.beta2, c.learning_rate, c.epsilon);
        let bc1 = 1.0 - b1.powi(t);
        let bc2 = 1.0 - b2.powi(t);
        for ((p, g), (m, v)) in self.params.iter_mut().zip(&grads).zip(self.adam_m.iter_mut().zip(self.adam_v.iter_mut())) {
            Zip::from(p).and(g).and(m).and(v).for_each(|p, &g, m, v| {
                *m = b1 * *m + (1.0 - b1) * g;
                *v = b2 * *v + (1.0 - b2) * g * g;
                *p -= lr * (*m / bc1) / ((*v / bc2).sqrt() + eps);
            });
        }
        Ok(loss)
    }

    /// Fraction of rows whose predicted class equals the label.
    pub fn accuracy(&self, x: ArrayView2<f64>, labels: &[u8]) -> Result<f64, MlpError> {
        let pred = self.predict(x)?;
        if pred.len() != labels.len() {
            return Err(MlpError::LabelMismatch { inputs: pred.len(), labels: labels.len() });
        }
        let hits = pred.iter().zip(labels).filter(|(a, b)| a == b).count();
        Ok(hits as f64 / labels.len().max(1) as f64)
    }

    pub fn save(&self, path: &Path) -> Result<(), MlpError> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<(), MlpError> {
        let c = &self.config;
        w.write_all(CHECKPOINT_MAGIC)?;
        w.write_all(&[CHECKPOINT_VERSION])?;
        for v in [c.input_dim, c.hidden_layers, c.nodes, N_CLASSES, c.batch_size] {
            w.write_all(&(v as u64).to_le_bytes())?;
        }
        for v in [c.learning_rate, c.beta1, c.beta2, c.epsilon, c.bn_momentum, c.bn_epsilon] {
            w.write_all(&v.to_le_bytes())?;
        }
        w.write_all(&c.seed.to_le_bytes())?;
        w.write_all(&self.step.to_le_bytes())?;
        let mut put = |a: &mut dyn Iterator<Item = f64>| -> io::Result<()> {
            for v in a {
                w.write_all(&v.to_le_bytes())?;
            }
            Ok(())
        };
        for l in 0..c.hidden_layers {
            for p in &self.params[4 * l..4 * l + 4] {
                put(&mut p.iter().copied())?;
            }
            put(&mut self.running_mean[l].iter().copied())?;
            put(&mut self.running_var[l].iter().copied())?;
        }
        let h = c.hidden_layers;
        for p in &self.params[4 * h..] {
            put(&mut p.iter().copied())?;
        }
        for m in self.adam_m.iter().chain(&self.adam_v) {
            put(&mut m.iter().copied())?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, MlpError> {
        let mut r = BufReader::new(File::open(path)?);
        Self::read_from(&mut r)
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self, MlpError> {
        let short = |e: io::Error| match e.kind() {
            io::ErrorKind::UnexpectedEof => MlpError::Checkpoint("file truncated".into()),
            _ => MlpError::Io(e),
        };
        let mut magic = [0u8; 5];
        r.read_exact(&mut magic).map_err(short)?;
        if &magic[..4] != CHECKPOINT_MAGIC {
            return Err(MlpError::Checkpoint("bad magic".into()));
        }
        if magic[4] != CHECKPOINT_VERSION {
            return Err(MlpError::Checkpoint(format!("unsupported version {}", magic[4])));
        }
        let mut word = || -> Result<[u8; 8], MlpError> {
            let mut b = [0u8; 8];
            r.read_exact(&mut b).map_err(short)?;
            Ok(b)
        };
        let mut ints = [0usize; 5];
        for v in ints.iter_mut() {
            *v = u64::from_le_bytes(word()?) as usize;
        }
        if ints[3] != N_CLASSES {
            return Err(MlpError::Checkpoint(format!("{} output classes", ints[3])));
        }
        let mut reals = [0f64; 6];
        for v in reals.iter_mut() {
            *v = f64::from_le_bytes(word()?);
        }
        let seed = u64::from_le_bytes(word()?);
        let step = u64::from_le_bytes(word()?);
        let config = MlpConfig {
            input_dim: ints[0],
            hidden_layers: ints[1],
            nodes: ints[2],
            batch_size: ints[4],
            learning_rate: reals[0],
            beta1: reals[1],
            beta2: reals[2],
            epsilon: reals[3],
            bn_momentum: reals[4],
            bn_epsilon: reals[5],
            seed,
        };
        config.validate().map_err(|e| MlpError::Checkpoint(e.to_string()))?;
        if config.input_dim * config.nodes > 1 << 28 || config.nodes * config.nodes > 1 << 28 {
            return Err(MlpError::Checkpoint("implausible layer size".into()));
        }
        let mut net = Mlp::init(config)?;
        net.step = step;
        let mut fill = |a: &mut dyn Iterator<Item = &mut f64>| -> Result<(), MlpError> {
            for v in a {
                *v = f64::from_le_bytes(word()?);
            }
            Ok(())
        };
        let h = net.config.hidden_layers;
        for l in 0..h {
            for p in &mut net.params[4 * l..4 * l + 4] {
                fill(&mut p.iter_mut())?;
            }
            fill(&mut net.running_mean[l].iter_mut())?;
            fill(&mut net.running_var[l].iter_mut())?;
        }
        for p in &mut net.params[4 * h..] {
            fill(&mut p.iter_mut())?;
        }
        for m in net.adam_m.iter_mut().chain(net.adam_v.iter_mut()) {
            fill(&mut m.iter_mut())?;
        }
        let mut rest = [0u8; 1];
        if r.read(&mut rest)? != 0 {
            return Err(MlpError::Checkpoint("trailing bytes".into()));
        }
        Ok(net)
    }
}

/// Single pass over `records`, `batch_size` at a time. A final partial batch
/// is used if it holds at least two examples.
pub fn train<I>(config: MlpConfig, records: I) -> Result<Mlp, MlpError>
where
    I: IntoIterator<Item = (Vec<u8>, u8)>,
{
    let mut net = Mlp::init(config)?;
    train_more(&mut net, records, |_, _| {})?;
    Ok(net)
}

/// Continue training `net`; `on_step(step, loss)` is called after each batch.
pub fn train_more<I, F>(net: &mut Mlp, records: I, mut on_step: F) -> Result<(), MlpError>
where
    I: IntoIterator<Item = (Vec<u8>, u8)>,
    F: FnMut(u64, f64),
{
    let width = net.config.input_dim;
    let bs = net.config.batch_size;
    let mut x = Vec::with_capacity(bs * width);
    let mut y = Vec::with_capacity(bs);
    let mut run = |net: &mut Mlp, x: &mut Vec<f64>, y: &mut Vec<u8>| -> Result<(), MlpError> {
        let batch = ArrayView2::from_shape((y.len(), width), x).expect("batch shape");
        let loss = net.train_step(batch, y)?;
        on_step(net.step, loss);
        x.clear();
        y.clear();
        Ok(())
    };
    for (bits, label) in records {
        if bits.len() != width {
            return Err(MlpError::WidthMismatch { expected: width, got: bits.len() });
        }
        x.extend(bits.iter().map(|&b| b as f64));
        y.push(label);
        if y.len() == bs {
            run(net, &mut x, &mut y)?;
        }
    }
    if y.len() >= 2 {
        run(net, &mut x, &mut y)?;
    }
    Ok(())
}

/// Rows of {0, 1} inputs as a matrix.
pub fn to_matrix(rows: &[Vec<u8>], width: usize) -> Result<Array2<f64>, MlpError> {
    let mut data = Vec::with_capacity(rows.len() * width);
    for r in rows {
        if r.len() != width {
            return Err(MlpError::WidthMismatch { expected: width, got: r.len() });
        }
        data.extend(r.iter().map(|&b| b as f64));
    }
    Ok(Array2::from_shape_vec((rows.len(), width), data).expect("shape"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameter_count_matches_layout() {
        let c = MlpConfig::for_distance(5, 6, 900);
        let net = Mlp::init(c.clone()).unwrap();
        assert_eq!(net.parameter_count(), c.parameter_count());
    }

    #[test]
    fn invalid_configs() {
        assert!(Mlp::init(MlpConfig::new(6, 0, 8)).is_err());
        assert!(Mlp::init(MlpConfig::new(6, 2, 0)).is_err());
        let mut c = MlpConfig::new(6, 1, 4);
        c.batch_size = 1;
        assert!(Mlp::init(c).is_err());
    }
}
