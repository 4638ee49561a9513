use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use log::info;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use semion_core::algebra::DEFAULT_CAP;
use semion_core::dataset::{export_csv, read_dataset, syndrome_to_image, DatasetRecord, DatasetWriter};
use semion_core::decoders::{CodeKind, DecoderKind};
use semion_core::experiments::{
    capacity_scan, estimate_rate, evaluate_mlp, evaluate_mlp_with, evaluation_seed, generate_records, suppression_fit,
    threshold_scan, train_mlp, Curriculum, LabeledBits, RatePoint, RateSpec, CHUNK,
};
use semion_core::lattice::CodeLattice;
use semion_core::mlp::{Mlp, MlpConfig};
use semion_core::noise::{p_eff_from_p0, NoiseKind, NoiseModel};
use semion_core::verify::{default_fixture_dir, run_checks};

const EXIT_VERIFY: u8 = 1;
const EXIT_NO_RESULT: u8 = 2;
const EXIT_USAGE: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Debug)]
enum Failure {
    Verify(String),
    NoResult(String),
    Usage(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verify(_) => EXIT_VERIFY,
            Failure::NoResult(_) => EXIT_NO_RESULT,
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Io(_) => EXIT_IO,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Verify(m) | Failure::NoResult(m) | Failure::Usage(m) | Failure::Io(m) => m,
        }
    }
}

fn io_err(e: impl std::fmt::Display) -> Failure {
    Failure::Io(e.to_string())
}

#[derive(Parser, Debug)]
#[command(name = "semion", version, about = "Semion code simulator and decoder workbench")]
struct Cli {
    /// Worker threads for sampling and evaluation; outputs do not depend on it.
    #[arg(long, global = true, env = "SEMION_WORKERS")]
    workers: Option<usize>,
    /// TOML file with default values; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Re-run the command recorded in a manifest.
    #[arg(long, value_name = "MANIFEST")]
    replay: Option<PathBuf>,
    /// With --replay: write the primary output here instead.
    #[arg(long, requires = "replay", value_name = "PATH")]
    replay_out: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the exact operator algebra, syndrome tables and image mapping.
    Verify(VerifyArgs),
    /// Write a SEMD dataset of labelled syndromes.
    Sample(SampleArgs),
    /// Logical error rate at one operating point.
    Rate(RateArgs),
    /// Logical error rates over distances and rates, and their crossings.
    Threshold(ThresholdArgs),
    /// Exponential fit of the logical error rate against distance.
    Suppression(SuppressionArgs),
    /// Train an MLP decoder on freshly generated records.
    TrainMlp(TrainArgs),
    /// Paired evaluation of a predictor against MWPM.
    Eval(EvalArgs),
    /// MLP accuracy across a grid of depths and widths.
    Capacity(CapacityArgs),
    /// Convert a SEMD file to CSV.
    ExportCsv(ExportArgs),
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
struct VerifyArgs {
    /// Run a single suite.
    #[arg(long)]
    only: Option<String>,
    #[arg(long)]
    fixtures: Option<PathBuf>,
}

/// Options shared by the sampling commands.
#[derive(Args, Debug, Default, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
struct NoiseArgs {
    #[arg(long, value_enum)]
    noise: Option<NoiseKind>,
    /// Total error probability per qubit.
    #[arg(long, conflicts_with = "p0")]
    p_eff: Option<f64>,
    /// Single-flip rate of independent noise; converted to p_eff.
    #[arg(long)]
    p0: Option<f64>,
    #[arg(long, value_enum)]
    code: Option<CodeKind>,
    /// Largest Conn support sampled exactly.
    #[arg(long)]
    cap: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
struct SampleArgs {
    #[arg(long)]
    d: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    noise: NoiseArgs,
    #[arg(long)]
    n: Option<u64>,
    /// Decoder whose residual class labels the records.
    #[arg(long, value_enum)]
    decoder: Option<DecoderKind>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the records as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
struct RateArgs {
    #[arg(long)]
    d: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    noise: NoiseArgs,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long, value_enum)]
    decoder: Option<DecoderKind>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
struct ThresholdArgs {
    /// Comma-separated code distances, at least two.
    #[arg(long, value_delimiter = ',')]
    distances: Option<Vec<usize>>,
    /// Comma-separated p_eff grid.
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<f64>>,
    #[command(flatten)]
    #[serde(flatten)]
    noise: NoiseArgs,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long, value_enum)]
    decoder: Option<DecoderKind>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
struct SuppressionArgs {
    #[arg(long, value_delimiter = ',')]
    distances: Option<Vec<usize>>,
    #[command(flatten)]
    #[serde(flatten)]
    noise: NoiseArgs,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long, value_enum)]
    decoder: Option<DecoderKind>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
struct TrainArgs {
    #[arg(long)]
    d: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    noise: NoiseArgs,
    #[arg(long)]
    hidden: Option<usize>,
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long)]
    batch: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    /// Total training records, warm-up included.
    #[arg(long)]
    records: Option<u64>,
    #[arg(long)]
    warmup_p_eff: Option<f64>,
    #[arg(long)]
    warmup_fraction: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
enum Predictor {
    Mlp,
    /// The true labels; p̄ is zero by construction.
    Oracle,
    /// Always the identity class; p̄ equals the simple decoder's.
    Identity,
    /// Labels read from a file, one per line in sample order.
    External,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
struct EvalArgs {
    #[arg(long, value_enum)]
    predictor: Option<Predictor>,
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    #[arg(long)]
    predictions: Option<PathBuf>,
    #[arg(long)]
    d: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    noise: NoiseArgs,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
struct CapacityArgs {
    #[arg(long)]
    d: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    noise: NoiseArgs,
    /// Comma-separated hidden-layer counts.
    #[arg(long, value_delimiter = ',')]
    hidden: Option<Vec<usize>>,
    /// Comma-separated widths.
    #[arg(long, value_delimiter = ',')]
    nodes: Option<Vec<usize>>,
    #[arg(long)]
    records: Option<u64>,
    #[arg(long)]
    batch: Option<usize>,
    #[arg(long)]
    eval_n: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
struct ExportArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Fill unset flags from the config file: keys of the command's own table
/// first, then top-level keys.
fn merge_with_file<T: Serialize + DeserializeOwned>(flags: &T, file: Option<&toml::Table>, section: &str) -> Result<T, Failure> {
    let mut merged = serde_json::Map::new();
    if let Some(table) = file {
        for (k, v) in table {
            if !v.is_table() {
                merged.insert(k.clone(), serde_json::to_value(v).map_err(io_err)?);
            }
        }
        if let Some(toml::Value::Table(sec)) = table.get(section) {
            for (k, v) in sec {
                merged.insert(k.clone(), serde_json::to_value(v).map_err(io_err)?);
            }
        }
    }
    if let serde_json::Value::Object(set) = serde_json::to_value(flags).map_err(io_err)? {
        for (k, v) in set {
            if !v.is_null() {
                merged.insert(k, v);
            }
        }
    }
    serde_json::from_value(serde_json::Value::Object(merged)).map_err(|e| Failure::Usage(format!("config file: {e}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct ResolvedNoise {
    noise: NoiseKind,
    p_eff: f64,
    code: CodeKind,
    cap: usize,
    seed: u64,
}

fn resolve_noise(a: &NoiseArgs, default_p: Option<f64>) -> Result<ResolvedNoise, Failure> {
    let noise = a.noise.unwrap_or(NoiseKind::Independent);
    let p_eff = match (a.p_eff, a.p0) {
        (Some(_), Some(_)) => return Err(Failure::Usage("--p-eff and --p0 are mutually exclusive".into())),
        (Some(p), None) => p,
        (None, Some(p0)) => {
            if noise != NoiseKind::Independent {
                return Err(Failure::Usage("--p0 applies to independent noise only".into()));
            }
            let p = p_eff_from_p0(p0);
            info!("p0 = {p0} converted to p_eff = 2 p0 - p0^2 = {p}");
            p
        }
        (None, None) => default_p.ok_or_else(|| Failure::Usage("--p-eff or --p0 is required".into()))?,
    };
    NoiseModel::with_p_eff(noise, p_eff).map_err(|e| Failure::Usage(e.to_string()))?;
    let cap = a.cap.unwrap_or(DEFAULT_CAP);
    if !(4..=semion_core::algebra::DENSE_LIMIT).contains(&cap) {
        return Err(Failure::Usage(format!("--cap must be in 4..={}", semion_core::algebra::DENSE_LIMIT)));
    }
    Ok(ResolvedNoise { noise, p_eff, code: a.code.unwrap_or(CodeKind::Semion), cap, seed: a.seed.unwrap_or(1) })
}

fn check_distance(d: usize) -> Result<usize, Failure> {
    CodeLattice::new(d).map(|_| d).map_err(|e| Failure::Usage(e.to_string()))
}

fn required<T>(v: Option<T>, flag: &str) -> Result<T, Failure> {
    v.ok_or_else(|| Failure::Usage(format!("--{flag} is required")))
}

/// Fully resolved commands; this is what a manifest records.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
enum Job {
    Sample { d: usize, noise: ResolvedNoise, n: u64, decoder: DecoderKind, out: PathBuf, csv: Option<PathBuf> },
    Rate { spec: RateSpec, out: Option<PathBuf> },
    Threshold { distances: Vec<usize>, grid: Vec<f64>, noise: ResolvedNoise, n: u64, decoder: DecoderKind, out: Option<PathBuf> },
    Suppression { distances: Vec<usize>, noise: ResolvedNoise, n: u64, decoder: DecoderKind, out: Option<PathBuf> },
    TrainMlp { d: usize, noise: ResolvedNoise, config: MlpConfig, curriculum: Curriculum, out: PathBuf },
    Eval { predictor: Predictor, checkpoint: Option<PathBuf>, predictions: Option<PathBuf>, d: usize, noise: ResolvedNoise, n: u64, out: Option<PathBuf> },
    Capacity { d: usize, noise: ResolvedNoise, grid: Vec<(usize, usize)>, config: MlpConfig, curriculum: Curriculum, eval_n: u64, out: Option<PathBuf> },
}

impl Job {
    fn primary_output(&mut self) -> Option<&mut PathBuf> {
        match self {
            Job::Sample { out, .. } | Job::TrainMlp { out, .. } => Some(out),
            Job::Rate { out, .. }
            | Job::Threshold { out, .. }
            | Job::Suppression { out, .. }
            | Job::Eval { out, .. }
            | Job::Capacity { out, .. } => out.as_mut(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    tool: String,
    version: String,
    /// Informational; outputs do not depend on it.
    workers: usize,
    job: Job,
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn write_manifest(job: &Job, workers: usize) -> Result<(), Failure> {
    let mut job = job.clone();
    let Some(out) = job.primary_output().cloned() else {
        return Ok(());
    };
    let manifest = Manifest { tool: "semion".into(), version: env!("CARGO_PKG_VERSION").into(), workers, job };
    let text = serde_json::to_string_pretty(&manifest).map_err(io_err)?;
    std::fs::write(manifest_path(&out), text + "\n").map_err(io_err)?;
    Ok(())
}

fn resolve(command: Command, file: Option<&toml::Table>) -> Result<Option<Job>, Failure> {
    Ok(Some(match command {
        Command::Verify(a) => {
            let a: VerifyArgs = merge_with_file(&a, file, "verify")?;
            let dir = a.fixtures.unwrap_or_else(default_fixture_dir);
            let checks = run_checks(&dir, a.only.as_deref()).map_err(Failure::Usage)?;
            for c in &checks {
                println!("{c}");
            }
            let failed = checks.iter().filter(|c| !c.passed).count();
            println!("{} checks, {failed} failed", checks.len());
            if failed > 0 {
                return Err(Failure::Verify(format!("{failed} checks failed")));
            }
            return Ok(None);
        }
        Command::ExportCsv(a) => {
            let a: ExportArgs = merge_with_file(&a, file, "export-csv")?;
            let input = required(a.input, "input")?;
            let out = required(a.out, "out")?;
            let (header, records) = read_dataset(&input).map_err(io_err)?;
            export_csv(header.d as usize, &records, &out).map_err(io_err)?;
            println!("{} records written to {}", records.len(), out.display());
            return Ok(None);
        }
        Command::Sample(a) => {
            let a: SampleArgs = merge_with_file(&a, file, "sample")?;
            Job::Sample {
                d: check_distance(required(a.d, "d")?)?,
                noise: resolve_noise(&a.noise, None)?,
                n: required(a.n, "n")?,
                decoder: a.decoder.unwrap_or(DecoderKind::Simple),
                out: required(a.out, "out")?,
                csv: a.csv,
            }
        }
        Command::Rate(a) => {
            let a: RateArgs = merge_with_file(&a, file, "rate")?;
            let noise = resolve_noise(&a.noise, None)?;
            Job::Rate {
                spec: RateSpec {
                    d: check_distance(required(a.d, "d")?)?,
                    code: noise.code,
                    noise: noise.noise,
                    p_eff: noise.p_eff,
                    decoder: a.decoder.unwrap_or(DecoderKind::Mwpm),
                    n: a.n.unwrap_or(100_000),
                    master_seed: noise.seed,
                    cap: noise.cap,
                },
                out: a.out,
            }
        }
        Command::Threshold(a) => {
            let a: ThresholdArgs = merge_with_file(&a, file, "threshold")?;
            let distances = a.distances.unwrap_or_else(|| vec![4, 5, 6, 7]);
            if distances.len() < 2 {
                return Err(Failure::Usage("threshold needs at least two distances".into()));
            }
            for &d in &distances {
                check_distance(d)?;
            }
            let grid = a.grid.unwrap_or_else(|| (0..9).map(|i| 0.06 + 0.005 * i as f64).collect());
            if grid.len() < 5 {
                return Err(Failure::Usage("threshold needs at least five grid points".into()));
            }
            Job::Threshold {
                distances,
                grid,
                noise: resolve_noise(&a.noise, Some(0.0))?,
                n: a.n.unwrap_or(100_000),
                decoder: a.decoder.unwrap_or(DecoderKind::Mwpm),
                out: a.out,
            }
        }
        Command::Suppression(a) => {
            let a: SuppressionArgs = merge_with_file(&a, file, "suppression")?;
            let distances = a.distances.unwrap_or_else(|| (4..=9).collect());
            if distances.len() < 3 {
                return Err(Failure::Usage("suppression needs at least three distances".into()));
            }
            for &d in &distances {
                check_distance(d)?;
            }
            Job::Suppression {
                distances,
                noise: resolve_noise(&a.noise, Some(0.04))?,
                n: a.n.unwrap_or(100_000),
                decoder: a.decoder.unwrap_or(DecoderKind::Mwpm),
                out: a.out,
            }
        }
        Command::TrainMlp(a) => {
            let a: TrainArgs = merge_with_file(&a, file, "train-mlp")?;
            let d = check_distance(required(a.d, "d")?)?;
            let noise = resolve_noise(&a.noise, Some(0.09))?;
            let mut config = MlpConfig::for_distance(d, a.hidden.unwrap_or(6), a.nodes.unwrap_or(900));
            config.batch_size = a.batch.unwrap_or(config.batch_size);
            config.learning_rate = a.lr.unwrap_or(config.learning_rate);
            config.seed = noise.seed;
            config.validate().map_err(|e| Failure::Usage(e.to_string()))?;
            let mut curriculum = Curriculum::new(noise.noise, noise.p_eff, a.records.unwrap_or(1_000_000));
            curriculum.warmup_p_eff = a.warmup_p_eff.unwrap_or(curriculum.warmup_p_eff);
            curriculum.warmup_fraction = a.warmup_fraction.unwrap_or(curriculum.warmup_fraction);
            if !(0.0..=1.0).contains(&curriculum.warmup_fraction) {
                return Err(Failure::Usage("--warmup-fraction must be in [0, 1]".into()));
            }
            Job::TrainMlp { d, noise, config, curriculum, out: required(a.out, "out")? }
        }
        Command::Eval(a) => {
            let a: EvalArgs = merge_with_file(&a, file, "eval")?;
            let predictor = a.predictor.unwrap_or(Predictor::Mlp);
            if predictor == Predictor::Mlp && a.checkpoint.is_none() {
                return Err(Failure::Usage("--checkpoint is required for the mlp predictor".into()));
            }
            if predictor == Predictor::External && a.predictions.is_none() {
                return Err(Failure::Usage("--predictions is required for the external predictor".into()));
            }
            Job::Eval {
                predictor,
                checkpoint: a.checkpoint,
                predictions: a.predictions,
                d: check_distance(required(a.d, "d")?)?,
                noise: resolve_noise(&a.noise, None)?,
                n: a.n.unwrap_or(100_000),
                out: a.out,
            }
        }
        Command::Capacity(a) => {
            let a: CapacityArgs = merge_with_file(&a, file, "capacity")?;
            let d = check_distance(a.d.unwrap_or(5))?;
            let noise = resolve_noise(&a.noise, Some(p_eff_from_p0(0.045)))?;
            let hidden = a.hidden.unwrap_or_else(|| vec![4, 6, 8, 10]);
            let nodes = a.nodes.unwrap_or_else(|| vec![266, 400, 600, 900, 1400]);
            let grid: Vec<(usize, usize)> = hidden.iter().flat_map(|&h| nodes.iter().map(move |&n| (h, n))).collect();
            let mut config = MlpConfig::for_distance(d, 1, 1);
            config.batch_size = a.batch.unwrap_or(1000);
            config.seed = noise.seed;
            Job::Capacity {
                d,
                noise,
                grid,
                config,
                curriculum: Curriculum::new(noise.noise, noise.p_eff, a.records.unwrap_or(200_000)),
                eval_n: a.eval_n.unwrap_or(20_000),
                out: a.out,
            }
        }
    }))
}

fn write_csv<T: Serialize>(rows: &[T], path: &Path) -> Result<(), Failure> {
    let mut w = csv::Writer::from_path(path).map_err(io_err)?;
    for r in rows {
        w.serialize(r).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

#[derive(Serialize)]
struct EvalRow {
    d: usize,
    noise: NoiseKind,
    p_eff: f64,
    n: u64,
    master_seed: u64,
    predictor: Predictor,
    accuracy: f64,
    mwpm_accuracy: f64,
    p_bar: f64,
    ci_low: f64,
    ci_high: f64,
    mwpm_p_bar: f64,
    mwpm_ci_low: f64,
    mwpm_ci_high: f64,
    simple_p_bar: f64,
    paired_difference: f64,
    paired_std_error: f64,
}

fn print_point(p: &RatePoint) {
    println!(
        "d={:<2} p_eff={:.4} p_bar={:.5} [{:.5}, {:.5}] fallback={:.2e} wrapped={:.2e}",
        p.d, p.p_eff, p.p_bar, p.ci_low, p.ci_high, p.fallback_fraction, p.wrapped_fraction
    );
}

fn bits_to_image(d: usize, bits: &[u8]) -> semion_core::dataset::SyndromeImage {
    let nv = 2 * d * d;
    let v = semion_core::bits::Mask::from_indices(nv, (0..nv).filter(|&i| bits[i] == 1));
    let p = semion_core::bits::Mask::from_indices(d * d, (0..d * d).filter(|&i| bits[nv + i] == 1));
    syndrome_to_image(d, &v, &p).expect("sizes match")
}

fn run_job(job: &Job) -> Result<(), Failure> {
    let started = Instant::now();
    match job {
        Job::Sample { d, noise, n, decoder, out, csv } => {
            let lat = CodeLattice::new(*d).expect("checked");
            let model = NoiseModel::with_p_eff(noise.noise, noise.p_eff).expect("checked");
            let mut writer = DatasetWriter::create(out, *d as u8, noise.noise, noise.p_eff).map_err(io_err)?;
            let mut histogram = [0u64; 16];
            let mut csv_records = Vec::new();
            let block = 64 * CHUNK;
            let mut start = 0;
            while start < *n {
                let end = (start + block).min(*n);
                let recs = generate_records(&lat, &model, noise.code, *decoder, noise.cap, noise.seed, start, end, false)
                    .map_err(io_err)?;
                for r in recs {
                    histogram[r.label.value() as usize] += 1;
                    let rec = DatasetRecord { image: bits_to_image(*d, &r.bits), label: r.label.value() };
                    writer.push(&rec).map_err(io_err)?;
                    if csv.is_some() {
                        csv_records.push(rec);
                    }
                }
                start = end;
            }
            let header = writer.finish().map_err(io_err)?;
            if let Some(path) = csv {
                export_csv(*d, &csv_records, path).map_err(io_err)?;
            }
            println!("{} records written to {}", header.record_count, out.display());
            println!("label histogram:");
            for (l, c) in histogram.iter().enumerate() {
                let name = semion_core::decoders::ClassLabel::new(l as u8).expect("label");
                println!("  {l:>2} {name} {c}");
            }
            let present = histogram.iter().filter(|&&c| c > 0).count();
            println!("{present} of 16 labels present");
        }
        Job::Rate { spec, out } => {
            let point = estimate_rate(spec).map_err(io_err)?;
            print_point(&point);
            if let Some(path) = out {
                write_csv(std::slice::from_ref(&point), path)?;
            }
        }
        Job::Threshold { distances, grid, noise, n, decoder, out } => {
            let scan = threshold_scan(noise.code, noise.noise, *decoder, distances, grid, *n, noise.seed, noise.cap, print_point)
                .map_err(io_err)?;
            if let Some(path) = out {
                write_csv(&scan.points, path)?;
            }
            match scan.estimate {
                Ok(est) => {
                    for c in &est.crossings {
                        println!("crossing d={} / d={}: p_eff = {:.5}", c.d_small, c.d_large, c.p);
                    }
                    println!("threshold p_eff = {:.5} ± {:.5}", est.value, est.spread);
                }
                Err(e) => return Err(Failure::NoResult(e)),
            }
        }
        Job::Suppression { distances, noise, n, decoder, out } => {
            let mut points = Vec::new();
            for (i, &d) in distances.iter().enumerate() {
                let spec = RateSpec {
                    d,
                    code: noise.code,
                    noise: noise.noise,
                    p_eff: noise.p_eff,
                    decoder: *decoder,
                    n: *n,
                    master_seed: semion_core::experiments::point_seed(noise.seed, d, i),
                    cap: noise.cap,
                };
                let p = estimate_rate(&spec).map_err(io_err)?;
                print_point(&p);
                points.push(p);
            }
            if let Some(path) = out {
                write_csv(&points, path)?;
            }
            let data: Vec<(usize, f64)> = points.iter().map(|p| (p.d, p.p_bar)).collect();
            let fit = suppression_fit(&data).map_err(|e| Failure::NoResult(e.to_string()))?;
            println!("p_bar ≈ {:.4} exp(-{:.4} d), R² = {:.4}", fit.amplitude, fit.alpha, fit.r_squared);
            if !fit.is_suppressed() {
                return Err(Failure::NoResult("logical error rate does not decrease with distance".into()));
            }
        }
        Job::TrainMlp { d, noise, config, curriculum, out } => {
            println!("{} trainable parameters", config.parameter_count());
            let net = train_mlp(config.clone(), *d, curriculum, noise.seed, noise.cap, |step, loss| {
                if step % 50 == 0 {
                    info!("step {step} loss {loss:.5}");
                }
            })
            .map_err(io_err)?;
            net.save(out).map_err(io_err)?;
            println!("{} steps, checkpoint written to {}", net.step(), out.display());
        }
        Job::Eval { predictor, checkpoint, predictions, d, noise, n, out } => {
            let seed = evaluation_seed(noise.seed, noise.p_eff);
            let eval = match predictor {
                Predictor::Mlp => {
                    let path = checkpoint.as_ref().expect("checked");
                    let net = Mlp::load(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
                    if net.config().input_dim != 3 * d * d {
                        return Err(Failure::Usage(format!("checkpoint expects {} inputs, d={d} gives {}", net.config().input_dim, 3 * d * d)));
                    }
                    evaluate_mlp(&net, *d, noise.noise, noise.p_eff, *n, seed, noise.cap)
                }
                Predictor::Oracle => {
                    evaluate_mlp_with(&|r: &[LabeledBits]| Ok(r.iter().map(|x| x.label.value()).collect()), *d, noise.noise, noise.p_eff, *n, seed, noise.cap)
                }
                Predictor::Identity => evaluate_mlp_with(&|r: &[LabeledBits]| Ok(vec![0; r.len()]), *d, noise.noise, noise.p_eff, *n, seed, noise.cap),
                Predictor::External => {
                    let path = predictions.as_ref().expect("checked");
                    let labels = read_predictions(path, *n)?;
                    let cursor = std::cell::Cell::new(0usize);
                    let f = |r: &[LabeledBits]| {
                        let s = cursor.get();
                        cursor.set(s + r.len());
                        Ok(labels[s..s + r.len()].to_vec())
                    };
                    evaluate_mlp_with(&f, *d, noise.noise, noise.p_eff, *n, seed, noise.cap)
                }
            }
            .map_err(io_err)?;
            println!("accuracy {:.5} (MWPM {:.5})", eval.mlp_accuracy, eval.mwpm_accuracy);
            println!(
                "p_bar {:.5} [{:.5}, {:.5}]  MWPM {:.5} [{:.5}, {:.5}]  simple {:.5}",
                eval.mlp_p_bar, eval.mlp_ci.0, eval.mlp_ci.1, eval.mwpm_p_bar, eval.mwpm_ci.0, eval.mwpm_ci.1, eval.simple_p_bar
            );
            println!("paired difference {:.5} ± {:.5}", eval.paired_difference, eval.paired_std_error);
            if let Some(path) = out {
                let row = EvalRow {
                    d: eval.d,
                    noise: eval.noise,
                    p_eff: eval.p_eff,
                    n: eval.n,
                    master_seed: eval.master_seed,
                    predictor: *predictor,
                    accuracy: eval.mlp_accuracy,
                    mwpm_accuracy: eval.mwpm_accuracy,
                    p_bar: eval.mlp_p_bar,
                    ci_low: eval.mlp_ci.0,
                    ci_high: eval.mlp_ci.1,
                    mwpm_p_bar: eval.mwpm_p_bar,
                    mwpm_ci_low: eval.mwpm_ci.0,
                    mwpm_ci_high: eval.mwpm_ci.1,
                    simple_p_bar: eval.simple_p_bar,
                    paired_difference: eval.paired_difference,
                    paired_std_error: eval.paired_std_error,
                };
                write_csv(&[row], path)?;
            }
        }
        Job::Capacity { d, noise, grid, config, curriculum, eval_n, out } => {
            let scan = capacity_scan(*d, curriculum, grid, config, *eval_n, noise.seed, noise.cap, |r| {
                println!("H={:<3} N={:<5} parameters={:<9} accuracy={:.5}", r.hidden_layers, r.nodes, r.parameters, r.accuracy)
            })
            .map_err(io_err)?;
            println!("Spearman rho = {:.4}, one-sided p = {:.4}", scan.spearman, scan.p_value);
            if let Some(path) = out {
                write_csv(&scan.rows, path)?;
            }
        }
    }
    info!("finished in {:.1?}", started.elapsed());
    Ok(())
}

fn read_predictions(path: &Path, n: u64) -> Result<Vec<u8>, Failure> {
    let file = std::fs::File::open(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(io_err)?;
        if line.trim().is_empty() {
            continue;
        }
        let v: u8 = line.trim().parse().map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        if v >= 16 {
            return Err(Failure::Io(format!("{}: label {v} out of range", path.display())));
        }
        out.push(v);
    }
    if (out.len() as u64) < n {
        return Err(Failure::Io(format!("{}: {} predictions for {n} samples", path.display(), out.len())));
    }
    Ok(out)
}

fn load_config(path: &Path) -> Result<toml::Table, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    text.parse::<toml::Table>().map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), Failure> {
    let workers = cli.workers.unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    if workers == 0 {
        return Err(Failure::Usage("--workers must be positive".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build().map_err(io_err)?;
    let job = if let Some(path) = &cli.replay {
        if cli.command.is_some() {
            return Err(Failure::Usage("--replay takes no subcommand".into()));
        }
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        let manifest: Manifest = serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        let mut job = manifest.job;
        if let Some(new_out) = &cli.replay_out {
            match job.primary_output() {
                Some(out) => *out = new_out.clone(),
                None => return Err(Failure::Usage("the recorded command has no output to redirect".into())),
            }
        }
        job
    } else {
        let Some(command) = cli.command else {
            return Err(Failure::Usage("a subcommand is required; see --help".into()));
        };
        let file = cli.config.as_deref().map(load_config).transpose()?;
        match resolve(command, file.as_ref())? {
            Some(job) => job,
            None => return Ok(()),
        }
    };
    info!("{workers} workers");
    let result = pool.install(|| run_job(&job));
    if matches!(result, Ok(()) | Err(Failure::NoResult(_))) {
        write_manifest(&job, workers)?;
    }
    result
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).format_timestamp(None).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
