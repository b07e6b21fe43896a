//! Command-line front end for the temporal-clustering engine: train and
//! evaluate models, stream signals through a saved model, dump spike
//! encodings, synthesize labeled fixtures, and estimate silicon cost.

use std::fmt::Display;
use std::fs;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use sha2::{Digest, Sha256};

use tnncluster_core::config::{validate, ConfigBuilder, TnnConfig, ValidatedConfig};
use tnncluster_core::data::{load_archive, split, synth_two_tone, znorm_rows, SplitSpec};
use tnncluster_core::eval::EvalRecord;
use tnncluster_core::hw::{
    dimensionality_reduction, fit_coefficients, reference_coefficients, CalibrationPoint,
};
use tnncluster_core::pipeline::{
    encode_dataset, evaluate_model, fit_encoder, load_model_file, predict, save_model_file,
    stream_step, train, TrainedModel,
};

/// Restarts used for the K-means baseline during evaluation.
const KMEANS_RESTARTS: usize = 10;

#[derive(Parser)]
#[command(
    name = "tnncluster",
    version,
    about = "Online temporal-coded clustering of univariate time series"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train on an archive (or a directory of *_TRAIN/*_TEST pairs), evaluate, write artifacts
    Train(TrainArgs),
    /// Cluster signals read line-by-line from a file or standard input
    Stream(StreamArgs),
    /// Print the spike encoding of every sample, one line per sample
    Encode(EncodeArgs),
    /// Estimate silicon area, latency, and power for a column design
    Hwcost(HwcostArgs),
    /// Write a labeled two-tone synthetic archive
    Synth(SynthArgs),
}

#[derive(Args)]
struct ConfigArgs {
    /// Config file: one key=value per line, `#` comments
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Override one config key, e.g. --set t_max=32 (repeatable; wins over --config)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Random seed (wins over rng_seed from --config/--set; omitting it means seed 0)
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct TrainArgs {
    /// Archive file, or a directory holding *_TRAIN/*_TEST archive pairs
    train_path: PathBuf,
    /// Separate evaluation archive (single-file mode; default: evaluate on the training data)
    #[arg(long, value_name = "FILE")]
    test: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigArgs,
    /// Directory receiving model.tnn, metrics.jsonl, results.json, assignments.tsv, manifest.json
    #[arg(long, default_value = "tnncluster-out", value_name = "DIR")]
    out: PathBuf,
    /// Z-normalize every signal before use
    #[arg(long)]
    znorm: bool,
}

#[derive(Args)]
struct StreamArgs {
    /// Model file written by `train`
    model: PathBuf,
    /// Signal source: a text file with one signal per line, or `-` for standard input
    #[arg(default_value = "-")]
    input: String,
    /// Update the model online after each signal and save it at end of input
    #[arg(long)]
    learn: bool,
    /// With --learn: where to save the updated model (default: overwrite the model file)
    #[arg(long, value_name = "FILE")]
    save_to: Option<PathBuf>,
}

#[derive(Args)]
struct EncodeArgs {
    /// Archive file to encode
    dataset: PathBuf,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct HwcostArgs {
    /// Estimate for the column this config file describes
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Override one config key (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Estimate for an explicit synapse count instead of a config
    #[arg(long, value_name = "N", conflicts_with_all = ["config", "set"])]
    synapses: Option<u64>,
    /// Calibration file replacing the built-in reference designs:
    /// one `synapses area_mm2 latency_ns power_mw` line per design, `#` comments
    #[arg(long, value_name = "FILE")]
    calibration: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    /// Output archive path (tab-separated: label, then the signal values)
    out: PathBuf,
    /// Samples per class (two classes, interleaved)
    #[arg(long, default_value_t = 50)]
    per_class: usize,
    /// Signal length L
    #[arg(long, default_value_t = 64)]
    length: usize,
    /// Generator seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Usage/input problems exit 2; failures past input validation exit 1.
enum CliError {
    Usage(String),
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Internal(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Internal(m) => m,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn usage(e: impl Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn internal(e: impl Display) -> CliError {
    CliError::Internal(e.to_string())
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {}", e.message());
        std::process::exit(e.exit_code());
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Train(args) => cmd_train(args),
        Command::Stream(args) => cmd_stream(args),
        Command::Encode(args) => cmd_encode(args),
        Command::Hwcost(args) => cmd_hwcost(args),
        Command::Synth(args) => cmd_synth(args),
    }
}

// ---------------------------------------------------------------- config

fn parse_overrides(sets: &[String]) -> CliResult<ConfigBuilder> {
    let mut builder = ConfigBuilder::default();
    for kv in sets {
        let (key, value) = kv
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--set expects KEY=VALUE, got `{kv}`")))?;
        builder.set(key.trim(), value.trim()).map_err(usage)?;
    }
    Ok(builder)
}

/// Resolve file < --set < --seed into a validated configuration.
fn build_config(
    args: &ConfigArgs,
    fallback_signal_length: Option<usize>,
    fallback_num_clusters: Option<usize>,
) -> CliResult<ValidatedConfig> {
    let file = match &args.config {
        Some(path) => ConfigBuilder::from_file(path).map_err(usage)?,
        None => ConfigBuilder::default(),
    };
    let mut merged = file.merge(parse_overrides(&args.set)?);
    if let Some(seed) = args.seed {
        merged.rng_seed = Some(seed);
    }
    let cfg = merged
        .resolve(fallback_signal_length, fallback_num_clusters)
        .map_err(usage)?;
    validate(cfg).map_err(usage)
}

fn config_json(cfg: &TnnConfig) -> serde_json::Value {
    let mut map = serde_json::Map::new();
    for (k, v) in cfg.to_key_values() {
        map.insert(k, json!(v));
    }
    serde_json::Value::Object(map)
}

// ---------------------------------------------------------------- train

struct TrainJob {
    name: String,
    train: PathBuf,
    test: Option<PathBuf>,
    /// Directory receiving this dataset's artifacts.
    dir: PathBuf,
    /// Artifact key prefix inside the manifest ("" or "<name>/").
    rel: String,
}

/// What one finished training job hands back: its evaluation record, the
/// resolved configuration, and `(relative path, sha256)` pairs for every
/// artifact it wrote.
type JobOutput = (EvalRecord, TnnConfig, Vec<(String, String)>);

fn stem_of(path: &Path) -> String {
    path.file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("dataset")
        .to_string()
}

fn collect_jobs(args: &TrainArgs) -> CliResult<Vec<TrainJob>> {
    let meta = fs::metadata(&args.train_path)
        .map_err(|e| usage(format!("cannot read {}: {e}", args.train_path.display())))?;
    if meta.is_file() {
        return Ok(vec![TrainJob {
            name: stem_of(&args.train_path),
            train: args.train_path.clone(),
            test: args.test.clone(),
            dir: args.out.clone(),
            rel: String::new(),
        }]);
    }
    if args.test.is_some() {
        return Err(CliError::Usage(
            "--test applies only when TRAIN_PATH is a single file".into(),
        ));
    }
    let entries = fs::read_dir(&args.train_path)
        .map_err(|e| usage(format!("cannot read {}: {e}", args.train_path.display())))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    paths.sort();
    let mut jobs = Vec::new();
    for path in paths {
        let Some(fname) = path.file_name().and_then(|s| s.to_str()) else {
            continue;
        };
        if !fname.contains("_TRAIN") {
            continue;
        }
        let test_path = path.with_file_name(fname.replace("_TRAIN", "_TEST"));
        let name = fname.split("_TRAIN").next().unwrap_or(fname).to_string();
        jobs.push(TrainJob {
            dir: args.out.join(&name),
            rel: format!("{name}/"),
            train: path.clone(),
            test: test_path.is_file().then_some(test_path),
            name,
        });
    }
    if jobs.is_empty() {
        return Err(usage(format!(
            "no *_TRAIN archives found in {}",
            args.train_path.display()
        )));
    }
    Ok(jobs)
}

fn run_train_job(job: &TrainJob, args: &TrainArgs) -> CliResult<JobOutput> {
    let mut train_ds = load_archive(&job.train).map_err(usage)?;
    train_ds.name = job.name.clone();
    let spec = match &job.test {
        Some(path) => {
            let mut test_ds = load_archive(path).map_err(usage)?;
            test_ds.name = job.name.clone();
            if test_ds.signal_length() != train_ds.signal_length() {
                return Err(usage(format!(
                    "{}: test signal length {} does not match train length {}",
                    job.name,
                    test_ds.signal_length(),
                    train_ds.signal_length()
                )));
            }
            SplitSpec::TrainTest(test_ds)
        }
        None => SplitSpec::Whole,
    };
    let (mut train_ds, mut eval_ds) = split(train_ds, spec);
    if args.znorm {
        znorm_rows(&mut train_ds);
        znorm_rows(&mut eval_ds);
    }
    let clusters = train_ds.num_classes.max(eval_ds.num_classes);
    let cfg = build_config(&args.config, Some(train_ds.signal_length()), Some(clusters))?;

    let (model, stats) = train(&train_ds.samples, &cfg).map_err(internal)?;
    let record = evaluate_model(&model, &eval_ds, KMEANS_RESTARTS).map_err(internal)?;

    fs::create_dir_all(&job.dir)
        .map_err(|e| internal(format!("cannot create {}: {e}", job.dir.display())))?;
    save_model_file(&model, &job.dir.join("model.tnn")).map_err(internal)?;

    let mut metrics = String::new();
    for epoch_stats in &stats {
        metrics.push_str(&serde_json::to_string(epoch_stats).map_err(internal)?);
        metrics.push('\n');
    }
    fs::write(job.dir.join("metrics.jsonl"), &metrics).map_err(internal)?;

    let assigned = predict(&model, &eval_ds.samples).map_err(internal)?;
    let mut tsv = String::from("index\tcluster\tspike_time\tlabel\n");
    for (i, ((cluster, time), label)) in assigned.iter().zip(&eval_ds.labels).enumerate() {
        tsv.push_str(&format!("{i}\t{cluster}\t{time}\t{label}\n"));
    }
    fs::write(job.dir.join("assignments.tsv"), &tsv).map_err(internal)?;

    let mut artifacts = Vec::new();
    for file in ["model.tnn", "metrics.jsonl", "assignments.tsv"] {
        let sum = sha256_file(&job.dir.join(file))?;
        artifacts.push((format!("{}{file}", job.rel), sum));
    }
    Ok((record, cfg.into_inner(), artifacts))
}

fn cmd_train(args: TrainArgs) -> CliResult<()> {
    let started = Instant::now();
    let jobs = collect_jobs(&args)?;
    fs::create_dir_all(&args.out)
        .map_err(|e| internal(format!("cannot create {}: {e}", args.out.display())))?;

    let mut records: Vec<EvalRecord> = Vec::new();
    let mut datasets_json = Vec::new();
    let mut checksums = serde_json::Map::new();
    for job in &jobs {
        let (record, cfg, artifacts) = run_train_job(job, &args)?;
        datasets_json.push(json!({
            "name": job.name,
            "train": job.train.display().to_string(),
            "test": job.test.as_ref().map(|p| p.display().to_string()),
            "config": config_json(&cfg),
        }));
        for (rel, sum) in artifacts {
            checksums.insert(rel, json!(sum));
        }
        records.push(record);
    }

    let results_text = serde_json::to_string_pretty(&records).map_err(internal)? + "\n";
    fs::write(args.out.join("results.json"), &results_text).map_err(internal)?;
    checksums.insert(
        "results.json".into(),
        json!(sha256_hex(results_text.as_bytes())),
    );

    let manifest = json!({
        "command": "train",
        "argv": std::env::args().skip(1).collect::<Vec<String>>(),
        "seed": records.first().map(|r| r.seed),
        "datasets": datasets_json,
        "output_dir": args.out.display().to_string(),
        "wall_clock_seconds": started.elapsed().as_secs_f64(),
        "artifact_sha256": checksums,
    });
    let manifest_text = serde_json::to_string_pretty(&manifest).map_err(internal)? + "\n";
    fs::write(args.out.join("manifest.json"), manifest_text).map_err(internal)?;

    print_results_table(&records);
    Ok(())
}

fn print_results_table(records: &[EvalRecord]) {
    let name_width = records
        .iter()
        .map(|r| r.name.len())
        .max()
        .unwrap_or(0)
        .max("dataset".len());
    println!(
        "{:<name_width$}  {:>8}  {:>9}  {:>13}  {:>6}  {:>6}",
        "dataset", "tnn_ri", "kmeans_ri", "normalized_ri", "epochs", "seed"
    );
    for r in records {
        println!(
            "{:<name_width$}  {:>8.4}  {:>9.4}  {:>13.4}  {:>6}  {:>6}",
            r.name, r.tnn_ri, r.kmeans_ri, r.normalized_ri, r.epochs, r.seed
        );
    }
    if records.len() > 1 {
        let mean = records.iter().map(|r| r.normalized_ri).sum::<f64>() / records.len() as f64;
        println!(
            "mean normalized RI over {} datasets: {mean:.4}",
            records.len()
        );
    }
}

// ---------------------------------------------------------------- stream

fn parse_signal(line: &str) -> Result<Vec<f64>, String> {
    line.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|token| !token.is_empty())
        .map(|token| {
            token
                .parse::<f64>()
                .map_err(|_| format!("`{token}` is not a number"))
        })
        .collect()
}

fn save_model_atomically(model: &TrainedModel, target: &Path) -> CliResult<()> {
    let mut tmp_name = target
        .file_name()
        .map(|s| s.to_os_string())
        .unwrap_or_else(|| "model.tnn".into());
    tmp_name.push(".tmp");
    let tmp = target.with_file_name(tmp_name);
    save_model_file(model, &tmp).map_err(internal)?;
    fs::rename(&tmp, target)
        .map_err(|e| internal(format!("cannot replace {}: {e}", target.display())))
}

fn cmd_stream(args: StreamArgs) -> CliResult<()> {
    let mut model = load_model_file(&args.model).map_err(usage)?;
    let mut reader: Box<dyn BufRead> = if args.input == "-" {
        Box::new(BufReader::new(io::stdin()))
    } else {
        let file = fs::File::open(&args.input)
            .map_err(|e| usage(format!("cannot read {}: {e}", args.input)))?;
        Box::new(BufReader::new(file))
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let mut lineno = 0usize;
    loop {
        let mut line = String::new();
        if reader.read_line(&mut line).map_err(internal)? == 0 {
            break;
        }
        lineno += 1;
        if line.trim().is_empty() {
            continue;
        }
        match parse_signal(&line) {
            Ok(values) => match stream_step(&mut model, &values, args.learn) {
                Ok((cluster, time)) => {
                    writeln!(out, "{cluster} {time}").map_err(internal)?;
                }
                Err(e) => eprintln!("line {lineno}: {e}"),
            },
            Err(msg) => eprintln!("line {lineno}: {msg}"),
        }
    }
    drop(out);
    if args.learn {
        let target = args.save_to.as_deref().unwrap_or(&args.model);
        save_model_atomically(&model, target)?;
        eprintln!("saved updated model to {}", target.display());
    }
    Ok(())
}

// ---------------------------------------------------------------- encode

fn cmd_encode(args: EncodeArgs) -> CliResult<()> {
    let ds = load_archive(&args.dataset).map_err(usage)?;
    let cfg = build_config(&args.config, Some(ds.signal_length()), Some(ds.num_classes))?;
    let (projection, bank) = fit_encoder(&ds.samples, &cfg).map_err(internal)?;
    let spikes = encode_dataset(&ds.samples, &projection, &bank, cfg.t_max).map_err(internal)?;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    for sv in &spikes {
        writeln!(out, "{}", sv.to_line()).map_err(internal)?;
    }
    Ok(())
}

// ---------------------------------------------------------------- hwcost

fn parse_calibration(path: &Path) -> CliResult<Vec<CalibrationPoint>> {
    let text = fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let mut points = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |what: &str, token: &str| {
            usage(format!(
                "{} line {}: bad {what} `{token}`",
                path.display(),
                idx + 1
            ))
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(usage(format!(
                "{} line {}: expected `synapses area_mm2 latency_ns power_mw`",
                path.display(),
                idx + 1
            )));
        }
        points.push(CalibrationPoint {
            synapses: fields[0]
                .parse()
                .map_err(|_| bad("synapse count", fields[0]))?,
            area_mm2: fields[1].parse().map_err(|_| bad("area", fields[1]))?,
            latency_ns: fields[2].parse().map_err(|_| bad("latency", fields[2]))?,
            power_mw: fields[3].parse().map_err(|_| bad("power", fields[3]))?,
        });
    }
    Ok(points)
}

fn cmd_hwcost(args: HwcostArgs) -> CliResult<()> {
    let coeffs = match &args.calibration {
        Some(path) => fit_coefficients(&parse_calibration(path)?).map_err(usage)?,
        None => reference_coefficients(),
    };
    let (estimate, reduction) = if let Some(n) = args.synapses {
        (coeffs.estimate(n).map_err(usage)?, None)
    } else if args.config.is_some() || !args.set.is_empty() {
        let config_args = ConfigArgs {
            config: args.config.clone(),
            set: args.set.clone(),
            seed: None,
        };
        let cfg = build_config(&config_args, None, None)?;
        let est = coeffs.estimate_for(&cfg).map_err(usage)?;
        let red =
            dimensionality_reduction(cfg.encoding_neurons, cfg.reduced_length, cfg.signal_length);
        (est, Some(red))
    } else {
        return Err(CliError::Usage(
            "give --synapses N, or --config/--set describing the column".into(),
        ));
    };

    println!(
        "{:>10}  {:>12}  {:>12}  {:>12}",
        "synapses", "area_mm2", "latency_ns", "power_mw"
    );
    println!(
        "{:>10}  {:>12.6}  {:>12.3}  {:>12.6}",
        estimate.synapses, estimate.area_mm2, estimate.latency_ns, estimate.power_mw
    );
    if let Some(r) = reduction {
        println!(
            "encoded input lines vs raw signal length: {:.1}% {}",
            r.abs() * 100.0,
            if r >= 0.0 { "saved" } else { "added" }
        );
    }
    let mut record = serde_json::to_value(estimate).map_err(internal)?;
    if let Some(r) = reduction {
        record
            .as_object_mut()
            .expect("estimate serializes to an object")
            .insert("dimensionality_reduction".into(), json!(r));
    }
    println!("{record}");
    Ok(())
}

// ---------------------------------------------------------------- synth

fn cmd_synth(args: SynthArgs) -> CliResult<()> {
    let ds = synth_two_tone(args.per_class, args.length, args.seed).map_err(usage)?;
    let mut text = String::new();
    for (label, signal) in ds.labels.iter().zip(&ds.samples) {
        text.push_str(&label.to_string());
        for v in signal {
            text.push('\t');
            text.push_str(&v.to_string());
        }
        text.push('\n');
    }
    if let Some(parent) = args.out.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .map_err(|e| internal(format!("cannot create {}: {e}", parent.display())))?;
        }
    }
    fs::write(&args.out, text)
        .map_err(|e| internal(format!("cannot write {}: {e}", args.out.display())))?;
    println!(
        "wrote {} samples (L={}, {} classes) to {}",
        ds.len(),
        ds.signal_length(),
        ds.num_classes,
        args.out.display()
    );
    Ok(())
}

// ---------------------------------------------------------------- util

fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn sha256_file(path: &Path) -> CliResult<String> {
    Ok(sha256_hex(&fs::read(path).map_err(internal)?))
}
