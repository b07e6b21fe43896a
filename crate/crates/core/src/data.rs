//! Dataset ingestion: archive-format loading, synthetic fixtures, label
//! remapping, and train/eval splitting.

use std::path::Path;

use crate::error::{Error, Result};
use crate::rng::{domain, StreamKey};

/// A labeled set of equal-length univariate time series. Labels are remapped
/// to the dense range `0..num_classes` and are used only for evaluation —
/// training never sees them.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub samples: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    pub num_classes: usize,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Length L shared by every signal.
    pub fn signal_length(&self) -> usize {
        self.samples.first().map_or(0, Vec::len)
    }

    /// Build from raw (label, signal) rows, remapping labels to 0..k by
    /// ascending raw value (a fixed bijection, so evaluation is unaffected).
    fn from_rows(name: &str, rows: Vec<(f64, Vec<f64>)>) -> Result<Dataset> {
        if rows.is_empty() {
            return Err(Error::Data(format!("{name}: no data rows")));
        }
        let mut distinct: Vec<f64> = rows.iter().map(|(l, _)| *l).collect();
        distinct.sort_by(|a, b| a.partial_cmp(b).expect("labels checked finite"));
        distinct.dedup();
        let class_of = |raw: f64| distinct.iter().position(|&d| d == raw).unwrap();
        let labels: Vec<usize> = rows.iter().map(|(l, _)| class_of(*l)).collect();
        let samples: Vec<Vec<f64>> = rows.into_iter().map(|(_, s)| s).collect();
        Ok(Dataset {
            name: name.to_string(),
            num_classes: distinct.len(),
            samples,
            labels,
        })
    }
}

/// Parse archive text: one sample per line, class label first, then the L
/// signal values. Tab- and comma-separated files are auto-detected from the
/// first data line.
pub fn parse_archive(name: &str, text: &str) -> Result<Dataset> {
    let mut rows: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut expected_len: Option<usize> = None;
    let mut delim: Option<char> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let d = *delim.get_or_insert_with(|| if line.contains('\t') { '\t' } else { ',' });
        let mut fields = line.split(d).map(str::trim);
        let label_field = fields.next().unwrap_or("");
        let label: f64 = label_field.parse().map_err(|_| {
            Error::Data(format!(
                "{name} line {}: label `{label_field}` is not numeric",
                lineno + 1
            ))
        })?;
        if !label.is_finite() {
            return Err(Error::Data(format!(
                "{name} line {}: label must be finite",
                lineno + 1
            )));
        }
        let mut signal = Vec::new();
        for (col, field) in fields.enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                Error::Data(format!(
                    "{name} line {} value {}: `{field}` is not numeric",
                    lineno + 1,
                    col + 1
                ))
            })?;
            if !v.is_finite() {
                return Err(Error::Data(format!(
                    "{name} line {} value {}: non-finite sample value",
                    lineno + 1,
                    col + 1
                )));
            }
            signal.push(v);
        }
        if signal.is_empty() {
            return Err(Error::Data(format!(
                "{name} line {}: row has a label but no signal values",
                lineno + 1
            )));
        }
        match expected_len {
            None => expected_len = Some(signal.len()),
            Some(l) if l != signal.len() => {
                return Err(Error::Data(format!(
                    "{name} line {}: expected {l} signal values, found {}",
                    lineno + 1,
                    signal.len()
                )));
            }
            Some(_) => {}
        }
        rows.push((label, signal));
    }
    Dataset::from_rows(name, rows)
}

/// Load an archive-format file; the dataset takes its name from the file stem.
pub fn load_archive(path: &Path) -> Result<Dataset> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Data(format!("cannot read {}: {e}", path.display())))?;
    let name = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("dataset");
    parse_archive(name, &text)
}

/// Two-class synthetic fixture: noisy sinusoids at two well-separated
/// frequencies, interleaved 0,1,0,1,... and balanced exactly 50/50.
pub fn synth_two_tone(n_per_class: usize, signal_length: usize, seed: u64) -> Result<Dataset> {
    synth_two_tone_with(n_per_class, signal_length, seed, (2.0, 5.0))
}

/// Two-tone generator with explicit class frequencies (in cycles per signal),
/// used by drift experiments that move the classes mid-stream.
pub fn synth_two_tone_with(
    n_per_class: usize,
    signal_length: usize,
    seed: u64,
    freqs: (f64, f64),
) -> Result<Dataset> {
    if n_per_class == 0 {
        return Err(Error::Data("n_per_class must be positive".into()));
    }
    if signal_length < 16 {
        return Err(Error::Data(format!(
            "signal_length must be >= 16 for distinct tones, got {signal_length}"
        )));
    }
    let key = StreamKey::root(seed).child(domain::SYNTH);
    let freq = [freqs.0, freqs.1];
    let mut samples = Vec::with_capacity(2 * n_per_class);
    let mut labels = Vec::with_capacity(2 * n_per_class);
    for s in 0..n_per_class {
        for (class, &tone) in freq.iter().enumerate() {
            let mut rng = key.child((s * 2 + class) as u64).rng();
            let amplitude = 0.9 + 0.2 * rng.next_f64();
            let phase = 0.6 * (rng.next_f64() - 0.5);
            let signal = (0..signal_length)
                .map(|t| {
                    let angle =
                        std::f64::consts::TAU * tone * t as f64 / signal_length as f64 + phase;
                    amplitude * angle.sin() + 0.1 * rng.gaussian()
                })
                .collect();
            samples.push(signal);
            labels.push(class);
        }
    }
    Ok(Dataset {
        name: "two_tone".into(),
        samples,
        labels,
        num_classes: 2,
    })
}

/// How the evaluation view is obtained from the loaded data.
#[derive(Clone, Debug)]
pub enum SplitSpec {
    /// Evaluate on the training set itself.
    Whole,
    /// Evaluate on a separately loaded test set.
    TrainTest(Dataset),
}

/// Produce the (train, eval) pair for a split policy.
pub fn split(train: Dataset, spec: SplitSpec) -> (Dataset, Dataset) {
    match spec {
        SplitSpec::Whole => {
            let eval = train.clone();
            (train, eval)
        }
        SplitSpec::TrainTest(test) => (train, test),
    }
}

/// Per-row z-normalization: subtract the row mean and divide by the row
/// standard deviation (constant rows become all zeros).
pub fn znorm_rows(ds: &mut Dataset) {
    for row in &mut ds.samples {
        let n = row.len() as f64;
        let mean = row.iter().sum::<f64>() / n;
        let var = row.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        let sd = var.sqrt();
        if sd > 0.0 {
            for x in row.iter_mut() {
                *x = (*x - mean) / sd;
            }
        } else {
            for x in row.iter_mut() {
                *x = 0.0;
            }
        }
    }
}
