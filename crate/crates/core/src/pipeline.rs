//! The assembled engine: encoder fitting, batch training, prediction,
//! one-sample streaming updates, evaluation, and the plain-text model file.
//!
//! Training is unsupervised end to end — labels never enter `train` or
//! `stream_step`; they are consulted only by [`evaluate_model`] afterwards.
//!
//! Convergence is judged on the stability of the learned bimodal code: a
//! weight counts as changed over an epoch when it ends in a different half of
//! the weight range (low `0..=w_max/2` vs high) than it started. The
//! stochastic rule never stops moving raw values — synapses driven by one
//! cluster and suppressed by the other trade +1/-1 steps at the rails
//! indefinitely, so raw-motion counts plateau far above any useful threshold
//! — but once every weight settles into its attractor half, the code the
//! column computes with is fixed and the run has converged.

use std::io::{BufRead, Write};
use std::path::Path;

use serde::Serialize;

use crate::config::{validate, ConfigBuilder, TnnConfig, ValidatedConfig};
use crate::data::Dataset;
use crate::encoding::{
    encode, fit_receptive_fields, make_projection, ProjectionMatrix, ReceptiveFieldBank,
    SpikeVector,
};
use crate::error::{Error, Result};
use crate::eval::{kmeans_baseline, normalized_ri, rand_index, EvalRecord};
use crate::learning::apply_stdp;
use crate::rng::{domain, StreamKey};
use crate::tnn::{assign_cluster, TnnColumn};
use crate::SpikeTime;

/// First line of every model file; bump the version on format changes.
pub const MODEL_HEADER: &str = "tnncluster-model v1";

/// Everything needed to reproduce assignments: the encoder, the column, the
/// configuration that built them, and the training bookkeeping that lets a
/// stream continue exactly where batch training stopped.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainedModel {
    pub projection: ProjectionMatrix,
    pub bank: ReceptiveFieldBank,
    pub column: TnnColumn,
    pub config: TnnConfig,
    pub epochs_run: usize,
    pub converged: bool,
    /// Plasticity updates applied so far; also the stream position of the
    /// next update, which is what makes `stream_step` deterministic across
    /// save/load boundaries.
    pub stdp_steps: u64,
}

/// Per-epoch training telemetry, one JSON object per line in metrics files.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpochStats {
    pub epoch: usize,
    /// Fraction of weights whose effective (binarized) value changed over the
    /// epoch: the weight ended in a different half of `[0, w_max]` than it
    /// started. Sub-threshold values trigger convergence.
    pub weights_changed_frac: f64,
    /// Fraction of samples whose winning neuron actually reached threshold.
    pub spike_rate: f64,
    /// Samples won by each neuron this epoch.
    pub win_counts: Vec<u64>,
}

/// Build the encoder for a training set: the seeded ternary projection plus
/// receptive fields fitted to the projected value ranges.
pub fn fit_encoder(
    samples: &[Vec<f64>],
    cfg: &ValidatedConfig,
) -> Result<(ProjectionMatrix, ReceptiveFieldBank)> {
    let proj_seed = StreamKey::root(cfg.rng_seed)
        .child(domain::PROJECTION)
        .as_u64();
    let projection = make_projection(cfg.signal_length, cfg.reduced_length, proj_seed)?;
    let projected: Vec<Vec<f64>> = samples
        .iter()
        .map(|s| projection.project(s))
        .collect::<Result<_>>()?;
    let bank = fit_receptive_fields(&projected, cfg.encoding_neurons, cfg.gamma)?;
    Ok((projection, bank))
}

/// Encode every sample with a fixed encoder.
pub fn encode_dataset(
    samples: &[Vec<f64>],
    projection: &ProjectionMatrix,
    bank: &ReceptiveFieldBank,
    t_max: SpikeTime,
) -> Result<Vec<SpikeVector>> {
    samples
        .iter()
        .map(|s| encode(&projection.project(s)?, bank, t_max))
        .collect()
}

/// Batch training: fit the encoder once, then present the encoded samples
/// for up to `max_epochs` epochs (shuffled per epoch unless disabled),
/// applying one plasticity update per presentation. Stops early once the
/// fraction of weights that switched attractor halves over an epoch falls
/// below `convergence_frac`.
pub fn train(
    samples: &[Vec<f64>],
    cfg: &ValidatedConfig,
) -> Result<(TrainedModel, Vec<EpochStats>)> {
    let (projection, bank) = fit_encoder(samples, cfg)?;
    let spike_vectors = encode_dataset(samples, &projection, &bank, cfg.t_max)?;
    let root = StreamKey::root(cfg.rng_seed);
    let mut column = TnnColumn::with_random_weights(
        cfg.num_clusters,
        cfg.encoding_neurons * cfg.reduced_length,
        cfg.theta,
        cfg.t_max,
        cfg.w_max,
        root.child(domain::WEIGHTS),
    )?;
    let stdp_key = root.child(domain::STDP);
    let mut stats = Vec::new();
    let mut step: u64 = 0;
    let mut converged = false;
    let mut epochs_run = 0;
    for epoch in 0..cfg.max_epochs {
        let mut order: Vec<usize> = (0..samples.len()).collect();
        if cfg.shuffle {
            root.child(domain::SHUFFLE)
                .child(epoch as u64)
                .rng()
                .shuffle(&mut order);
        }
        let start_weights = column.weights().to_vec();
        let mut win_counts = vec![0u64; cfg.num_clusters];
        let mut winner_spikes = 0usize;
        for &idx in &order {
            let fr = column.forward(&spike_vectors[idx])?;
            win_counts[fr.winner] += 1;
            if fr.wta_times[fr.winner] < cfg.t_max {
                winner_spikes += 1;
            }
            apply_stdp(
                &mut column,
                &spike_vectors[idx],
                &fr.wta_times,
                &cfg.stdp,
                stdp_key.child(step),
                None,
            )?;
            step += 1;
        }
        let half = cfg.w_max / 2;
        let moved = column
            .weights()
            .iter()
            .zip(&start_weights)
            .filter(|(a, b)| (**a > half) != (**b > half))
            .count();
        let frac = moved as f64 / start_weights.len() as f64;
        stats.push(EpochStats {
            epoch,
            weights_changed_frac: frac,
            spike_rate: winner_spikes as f64 / samples.len() as f64,
            win_counts,
        });
        epochs_run = epoch + 1;
        if frac < cfg.convergence_frac {
            converged = true;
            break;
        }
    }
    let model = TrainedModel {
        projection,
        bank,
        column,
        config: cfg.clone().into_inner(),
        epochs_run,
        converged,
        stdp_steps: step,
    };
    Ok((model, stats))
}

impl TrainedModel {
    /// Project and encode one raw signal with this model's frozen encoder.
    pub fn encode_signal(&self, signal: &[f64]) -> Result<SpikeVector> {
        let projected = self.projection.project(signal)?;
        encode(&projected, &self.bank, self.config.t_max)
    }
}

/// Cluster one signal: `(winning neuron, its propagated spike time)`. The
/// time is the confidence — lower is sharper, `t_max` means the winner was
/// chosen on potential alone.
pub fn predict_one(model: &TrainedModel, signal: &[f64]) -> Result<(usize, SpikeTime)> {
    let spikes = model.encode_signal(signal)?;
    let fr = model.column.forward(&spikes)?;
    Ok(assign_cluster(&fr))
}

/// Cluster a batch of signals without changing the model.
pub fn predict(model: &TrainedModel, samples: &[Vec<f64>]) -> Result<Vec<(usize, SpikeTime)>> {
    samples.iter().map(|s| predict_one(model, s)).collect()
}

/// Process one sample from a stream. With `learn` set this is the online
/// training mode: the receptive-field ranges absorb out-of-range values and
/// one plasticity update is applied, continuing the exact update stream that
/// batch training used (so a one-epoch unshuffled batch run and a pass of
/// `stream_step` calls produce identical weights). Without `learn` it is a
/// pure prediction.
pub fn stream_step(
    model: &mut TrainedModel,
    signal: &[f64],
    learn: bool,
) -> Result<(usize, SpikeTime)> {
    if signal.iter().any(|v| !v.is_finite()) {
        return Err(Error::Data(
            "stream sample contains a non-finite value".into(),
        ));
    }
    let projected = model.projection.project(signal)?;
    if learn {
        model.bank.update_running_range(&projected)?;
    }
    let spikes = encode(&projected, &model.bank, model.config.t_max)?;
    let fr = model.column.forward(&spikes)?;
    if learn {
        let key = StreamKey::root(model.config.rng_seed)
            .child(domain::STDP)
            .child(model.stdp_steps);
        apply_stdp(
            &mut model.column,
            &spikes,
            &fr.wta_times,
            &model.config.stdp,
            key,
            None,
        )?;
        model.stdp_steps += 1;
    }
    Ok(assign_cluster(&fr))
}

/// Score a model against a labeled dataset, including the seeded K-means
/// baseline run with the model's own seed.
pub fn evaluate_model(
    model: &TrainedModel,
    ds: &Dataset,
    kmeans_restarts: usize,
) -> Result<EvalRecord> {
    let assignments: Vec<usize> = predict(model, &ds.samples)?
        .into_iter()
        .map(|(c, _)| c)
        .collect();
    let tnn_ri = rand_index(&ds.labels, &assignments)?;
    let baseline = kmeans_baseline(
        ds,
        model.config.num_clusters,
        model.config.rng_seed,
        kmeans_restarts,
    )?;
    let kmeans_ri = rand_index(&ds.labels, &baseline)?;
    Ok(EvalRecord {
        name: ds.name.clone(),
        tnn_ri,
        kmeans_ri,
        normalized_ri: normalized_ri(tnn_ri, kmeans_ri)?,
        epochs: model.epochs_run,
        seed: model.config.rng_seed,
    })
}

/// Write a model in the plain-text format:
///
/// ```text
/// tnncluster-model v1
/// config <key>=<value>        (one line per configuration key)
/// projection <rows> <cols> <seed>
/// range <i> <min> <max>       (one line per projected feature)
/// column <C> <S> <theta> <t_max> <w_max>
/// <S weights>                 (one line per neuron)
/// epochs_run <n>
/// converged <bool>
/// stdp_steps <n>
/// ```
///
/// Floats print in Rust's shortest round-trip decimal form, so save/load is
/// lossless and re-saving a loaded model reproduces the bytes exactly.
pub fn save_model<W: Write>(model: &TrainedModel, out: &mut W) -> Result<()> {
    writeln!(out, "{MODEL_HEADER}")?;
    for (k, v) in model.config.to_key_values() {
        writeln!(out, "config {k}={v}")?;
    }
    writeln!(
        out,
        "projection {} {} {}",
        model.projection.rows(),
        model.projection.cols(),
        model.projection.seed()
    )?;
    for i in 0..model.bank.num_features() {
        let (lo, hi) = model.bank.range(i);
        writeln!(out, "range {i} {lo} {hi}")?;
    }
    model.column.write_snapshot(out)?;
    writeln!(out, "epochs_run {}", model.epochs_run)?;
    writeln!(out, "converged {}", model.converged)?;
    writeln!(out, "stdp_steps {}", model.stdp_steps)?;
    Ok(())
}

fn next_line<R: BufRead>(input: &mut R, what: &str) -> Result<String> {
    let mut line = String::new();
    if input.read_line(&mut line)? == 0 {
        return Err(Error::ModelFile(format!("file ends before {what}")));
    }
    Ok(line.trim_end().to_string())
}

fn tail_of<'a>(line: &'a str, key: &str) -> Result<&'a str> {
    match line.split_once(' ') {
        Some((k, rest)) if k == key => Ok(rest.trim()),
        _ => Err(Error::ModelFile(format!(
            "expected `{key} ...`, got `{line}`"
        ))),
    }
}

fn parse_field<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.parse()
        .map_err(|_| Error::ModelFile(format!("bad {what} `{s}`")))
}

/// Read a model written by [`save_model`], revalidating the configuration and
/// cross-checking every shape against it.
pub fn load_model<R: BufRead>(input: &mut R) -> Result<TrainedModel> {
    let header = next_line(input, "the header")?;
    if header.trim() != MODEL_HEADER {
        return Err(Error::ModelFile(format!(
            "not a model file (header `{header}`)"
        )));
    }
    let mut builder = ConfigBuilder::default();
    let mut line = next_line(input, "the configuration")?;
    while let Some(rest) = line.strip_prefix("config ") {
        let (k, v) = rest
            .split_once('=')
            .ok_or_else(|| Error::ModelFile(format!("bad config line `{line}`")))?;
        builder.set(k.trim(), v.trim())?;
        line = next_line(input, "the projection header")?;
    }
    let cfg = validate(builder.resolve(None, None)?)?;

    let parts: Vec<&str> = line.split_whitespace().collect();
    if parts.len() != 4 || parts[0] != "projection" {
        return Err(Error::ModelFile(format!("bad projection header `{line}`")));
    }
    let rows: usize = parse_field(parts[1], "projection row count")?;
    let cols: usize = parse_field(parts[2], "projection column count")?;
    let proj_seed: u64 = parse_field(parts[3], "projection seed")?;
    if rows != cfg.signal_length || cols != cfg.reduced_length {
        return Err(Error::ModelFile(format!(
            "projection is {rows}x{cols} but the configuration says {}x{}",
            cfg.signal_length, cfg.reduced_length
        )));
    }
    let projection = make_projection(rows, cols, proj_seed)?;

    let mut ranges = Vec::with_capacity(cols);
    for i in 0..cols {
        let line = next_line(input, "a feature range")?;
        let p: Vec<&str> = line.split_whitespace().collect();
        if p.len() != 4 || p[0] != "range" {
            return Err(Error::ModelFile(format!("bad range line `{line}`")));
        }
        let idx: usize = parse_field(p[1], "range index")?;
        if idx != i {
            return Err(Error::ModelFile(format!(
                "range {idx} out of order (expected {i})"
            )));
        }
        let lo: f64 = parse_field(p[2], "range minimum")?;
        let hi: f64 = parse_field(p[3], "range maximum")?;
        ranges.push((lo, hi));
    }
    let bank = ReceptiveFieldBank::from_ranges(&ranges, cfg.encoding_neurons, cfg.gamma)?;

    let column = TnnColumn::read_snapshot(input)?;
    if column.num_neurons() != cfg.num_clusters
        || column.num_synapses() != cfg.encoding_neurons * cfg.reduced_length
    {
        return Err(Error::ModelFile(format!(
            "column is {}x{} but the configuration needs {}x{}",
            column.num_neurons(),
            column.num_synapses(),
            cfg.num_clusters,
            cfg.encoding_neurons * cfg.reduced_length
        )));
    }
    if column.theta != cfg.theta || column.t_max != cfg.t_max || column.w_max != cfg.w_max {
        return Err(Error::ModelFile(
            "column firing parameters disagree with the configuration".into(),
        ));
    }

    let epochs_run: usize = parse_field(
        tail_of(&next_line(input, "epochs_run")?, "epochs_run")?,
        "epoch count",
    )?;
    let converged: bool = parse_field(
        tail_of(&next_line(input, "converged")?, "converged")?,
        "convergence flag",
    )?;
    let stdp_steps: u64 = parse_field(
        tail_of(&next_line(input, "stdp_steps")?, "stdp_steps")?,
        "update count",
    )?;
    Ok(TrainedModel {
        projection,
        bank,
        column,
        config: cfg.into_inner(),
        epochs_run,
        converged,
        stdp_steps,
    })
}

pub fn save_model_file(model: &TrainedModel, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)
        .map_err(|e| Error::ModelFile(format!("cannot create {}: {e}", path.display())))?;
    let mut out = std::io::BufWriter::new(file);
    save_model(model, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn load_model_file(path: &Path) -> Result<TrainedModel> {
    let file = std::fs::File::open(path)
        .map_err(|e| Error::ModelFile(format!("cannot open {}: {e}", path.display())))?;
    load_model(&mut std::io::BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{synth_two_tone, synth_two_tone_with};

    fn cfg_with_seed(seed: u64) -> ValidatedConfig {
        let mut cfg = TnnConfig::defaults_for(64, 2);
        cfg.rng_seed = seed;
        validate(cfg).unwrap()
    }

    #[test]
    fn training_is_bit_reproducible() {
        let ds = synth_two_tone(15, 64, 6).unwrap();
        let vcfg = cfg_with_seed(11);
        let (a, sa) = train(&ds.samples, &vcfg).unwrap();
        let (b, sb) = train(&ds.samples, &vcfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(sa, sb);
    }

    #[test]
    fn zero_epochs_keeps_the_initial_weights() {
        let ds = synth_two_tone(6, 64, 8).unwrap();
        let mut cfg = TnnConfig::defaults_for(64, 2);
        cfg.rng_seed = 4;
        cfg.max_epochs = 0;
        let vcfg = validate(cfg).unwrap();
        let (model, stats) = train(&ds.samples, &vcfg).unwrap();
        assert_eq!(model.epochs_run, 0);
        assert!(!model.converged);
        assert_eq!(model.stdp_steps, 0);
        assert!(stats.is_empty());
        let fresh = TnnColumn::with_random_weights(
            2,
            64,
            vcfg.theta,
            vcfg.t_max,
            vcfg.w_max,
            StreamKey::root(4).child(domain::WEIGHTS),
        )
        .unwrap();
        assert_eq!(model.column, fresh);
    }

    #[test]
    fn model_files_round_trip_exactly() {
        let ds = synth_two_tone(10, 64, 3).unwrap();
        let mut cfg = TnnConfig::defaults_for(64, 2);
        cfg.rng_seed = 2;
        cfg.max_epochs = 3;
        let (model, _) = train(&ds.samples, &validate(cfg).unwrap()).unwrap();
        let mut buf = Vec::new();
        save_model(&model, &mut buf).unwrap();
        let back = load_model(&mut buf.as_slice()).unwrap();
        assert_eq!(model, back);
        let mut again = Vec::new();
        save_model(&back, &mut again).unwrap();
        assert_eq!(
            buf, again,
            "re-saving a loaded model must be byte-identical"
        );
    }

    #[test]
    fn model_file_helpers_write_and_read_paths() {
        let ds = synth_two_tone(5, 64, 13).unwrap();
        let mut cfg = TnnConfig::defaults_for(64, 2);
        cfg.max_epochs = 1;
        let (model, _) = train(&ds.samples, &validate(cfg).unwrap()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.tnn");
        save_model_file(&model, &path).unwrap();
        assert_eq!(load_model_file(&path).unwrap(), model);
        assert!(load_model_file(&dir.path().join("absent.tnn")).is_err());
    }

    #[test]
    fn corrupted_model_files_are_rejected() {
        let ds = synth_two_tone(5, 64, 13).unwrap();
        let mut cfg = TnnConfig::defaults_for(64, 2);
        cfg.max_epochs = 1;
        let (model, _) = train(&ds.samples, &validate(cfg).unwrap()).unwrap();
        let mut buf = Vec::new();
        save_model(&model, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();

        assert!(load_model(&mut "not a model\n".as_bytes()).is_err());
        let tampered = text.replace("config num_clusters=2", "config num_clusters=3");
        assert!(
            load_model(&mut tampered.as_bytes()).is_err(),
            "shape mismatch"
        );
        let cut = &text[..text.find("epochs_run").unwrap()];
        assert!(load_model(&mut cut.as_bytes()).is_err(), "truncation");
        let bad_theta = text.replace("config theta=112", "config theta=113");
        assert!(
            load_model(&mut bad_theta.as_bytes()).is_err(),
            "theta mismatch"
        );
    }

    #[test]
    fn prediction_and_pure_streaming_leave_the_model_untouched() {
        let ds = synth_two_tone(10, 64, 5).unwrap();
        let (mut model, _) = train(&ds.samples, &cfg_with_seed(5)).unwrap();
        let reference = model.clone();
        for s in &ds.samples {
            let direct = predict_one(&reference, s).unwrap();
            let streamed = stream_step(&mut model, s, false).unwrap();
            assert_eq!(direct, streamed);
        }
        assert_eq!(model, reference);
    }

    #[test]
    fn one_epoch_batch_equals_streaming_in_order() {
        let ds = synth_two_tone(12, 64, 21).unwrap();
        let mut cfg = TnnConfig::defaults_for(64, 2);
        cfg.rng_seed = 5;
        cfg.shuffle = false;
        cfg.max_epochs = 1;
        let (batch, _) = train(&ds.samples, &validate(cfg.clone()).unwrap()).unwrap();

        cfg.max_epochs = 0;
        let (mut streamed, _) = train(&ds.samples, &validate(cfg).unwrap()).unwrap();
        for s in &ds.samples {
            stream_step(&mut streamed, s, true).unwrap();
        }
        assert_eq!(batch.column, streamed.column);
        assert_eq!(batch.bank, streamed.bank);
        assert_eq!(batch.stdp_steps, streamed.stdp_steps);
    }

    #[test]
    fn two_tone_training_converges_and_clusters() {
        let ds = synth_two_tone(50, 64, 7).unwrap();
        let vcfg = cfg_with_seed(1);
        let (model, stats) = train(&ds.samples, &vcfg).unwrap();
        assert!(
            model.converged,
            "no convergence within {} epochs",
            model.epochs_run
        );
        let w = model.column.weights();
        let near_rail = w.iter().filter(|&&x| x <= 1 || x >= vcfg.w_max - 1).count();
        let bimodal_frac = near_rail as f64 / w.len() as f64;
        assert!(bimodal_frac >= 0.8, "weights not bimodal: {bimodal_frac}");
        let assigned: Vec<usize> = predict(&model, &ds.samples)
            .unwrap()
            .into_iter()
            .map(|(c, _)| c)
            .collect();
        let ri = rand_index(&ds.labels, &assigned).unwrap();
        assert!(ri >= 0.95, "rand index {ri}");
        assert!(
            stats.last().unwrap().weights_changed_frac < vcfg.convergence_frac,
            "final epoch should sit below the convergence threshold"
        );
    }

    #[test]
    fn weight_motion_decays_over_training() {
        // zero threshold disables early stopping, so the full epoch budget runs
        let ds = synth_two_tone(50, 64, 7).unwrap();
        let mut cfg = TnnConfig::defaults_for(64, 2);
        cfg.rng_seed = 1;
        cfg.convergence_frac = 0.0;
        let (model, stats) = train(&ds.samples, &validate(cfg).unwrap()).unwrap();
        assert!(!model.converged);
        assert_eq!(stats.len(), 50);
        let first = stats.first().unwrap().weights_changed_frac;
        let last = stats.last().unwrap().weights_changed_frac;
        assert!(
            last < first,
            "weight motion should decay: first {first}, last {last}"
        );
        // after the early migration the fraction never climbs by more than
        // 0.05 from one epoch to the next
        for pair in stats[3..].windows(2) {
            assert!(
                pair[1].weights_changed_frac <= pair[0].weights_changed_frac + 0.05,
                "epoch {}: {} -> {}",
                pair[1].epoch,
                pair[0].weights_changed_frac,
                pair[1].weights_changed_frac
            );
        }
    }

    #[test]
    fn streaming_recovers_after_the_classes_move() {
        let vcfg = cfg_with_seed(3);
        let before = synth_two_tone_with(40, 64, 11, (2.0, 5.0)).unwrap();
        let (mut model, _) = train(&before.samples, &vcfg).unwrap();

        let after = synth_two_tone_with(150, 64, 12, (9.0, 13.0)).unwrap();
        let assigned: Vec<usize> = after
            .samples
            .iter()
            .map(|s| stream_step(&mut model, s, true).unwrap().0)
            .collect();
        const WINDOW: usize = 40;
        let n = assigned.len();
        let tail_ri = rand_index(&after.labels[n - WINDOW..], &assigned[n - WINDOW..]).unwrap();
        assert!(tail_ri >= 0.9, "trailing-window rand index {tail_ri}");
    }

    #[test]
    fn constant_signals_train_and_assign_consistently() {
        let samples: Vec<Vec<f64>> = (0..20).map(|_| vec![1.25; 64]).collect();
        let (model, _) = train(&samples, &cfg_with_seed(9)).unwrap();
        assert!(model.converged);
        let preds = predict(&model, &samples).unwrap();
        assert!(preds.iter().all(|p| p == &preds[0]));
    }

    #[test]
    fn wrong_or_non_finite_signals_are_rejected() {
        let vcfg = cfg_with_seed(0);
        assert!(train(&[vec![0.0; 32]], &vcfg).is_err());
        let ds = synth_two_tone(4, 64, 1).unwrap();
        let (mut model, _) = train(&ds.samples, &vcfg).unwrap();
        assert!(stream_step(&mut model, &[0.0; 32], true).is_err());
        assert!(stream_step(&mut model, &vec![f64::NAN; 64], false).is_err());
    }

    #[test]
    fn evaluation_reports_consistent_ratios() {
        let ds = synth_two_tone(20, 64, 7).unwrap();
        let (model, _) = train(&ds.samples, &cfg_with_seed(1)).unwrap();
        let rec = evaluate_model(&model, &ds, 8).unwrap();
        assert_eq!(rec.epochs, model.epochs_run);
        assert_eq!(rec.seed, 1);
        assert_eq!(rec.name, "two_tone");
        assert!(rec.kmeans_ri > 0.0);
        assert!((rec.normalized_ri - rec.tnn_ri / rec.kmeans_ri).abs() < 1e-12);
    }
}
