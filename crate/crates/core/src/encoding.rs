//! Signal-to-spike encoding: a sparse ternary random projection compresses
//! the raw signal, then per-feature Gaussian receptive fields convert each
//! projected value into integer spike latencies.
//!
//! Intensity-to-latency rule for feature value `x` against center `mu` and
//! width `sigma`: `t = round(t_max * (1 - exp(-((x-mu)/sigma)^2 / 2)))`,
//! rounding half away from zero. A result of `t_max` means "no spike" and is
//! carried as a sentinel rather than an Option so downstream stays integer.

use crate::error::{Error, Result};
use crate::rng::StreamKey;
use crate::SpikeTime;

/// Sparse ternary projection with entries in {-1, 0, +1} drawn with
/// probabilities 1/6, 2/3, 1/6. The classical construction scales entries by
/// sqrt(3); that scalar is dropped here because the receptive-field encoder
/// normalizes each projected feature by its own min/max, which cancels any
/// uniform scaling (see `scaling_entries_does_not_change_spikes`).
///
/// A matrix is reconstructible exactly from `(rows, cols, seed)`; entries are
/// drawn row-major, one uniform draw in [0, 6) per entry.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionMatrix {
    rows: usize,
    cols: usize,
    seed: u64,
    entries: Vec<i8>,
}

/// Construct the projection for signal length `rows` down to `cols` features.
pub fn make_projection(rows: usize, cols: usize, seed: u64) -> Result<ProjectionMatrix> {
    if rows == 0 || cols == 0 {
        return Err(Error::Shape(format!(
            "projection dimensions must be positive, got {rows}x{cols}"
        )));
    }
    if cols > rows {
        return Err(Error::Shape(format!(
            "projection must not expand: {cols} output features from {rows} inputs"
        )));
    }
    let mut rng = StreamKey::root(seed).rng();
    let entries = (0..rows * cols)
        .map(|_| match rng.uniform(6) {
            0 => 1i8,
            5 => -1i8,
            _ => 0i8,
        })
        .collect();
    Ok(ProjectionMatrix {
        rows,
        cols,
        seed,
        entries,
    })
}

impl ProjectionMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn entry(&self, row: usize, col: usize) -> i8 {
        self.entries[row * self.cols + col]
    }

    pub fn entries(&self) -> &[i8] {
        &self.entries
    }

    /// Project a raw signal of length `rows` to `cols` features.
    pub fn project(&self, signal: &[f64]) -> Result<Vec<f64>> {
        if signal.len() != self.rows {
            return Err(Error::Shape(format!(
                "signal length {} does not match projection input {}",
                signal.len(),
                self.rows
            )));
        }
        let mut out = vec![0.0; self.cols];
        for (i, &x) in signal.iter().enumerate() {
            let row = &self.entries[i * self.cols..(i + 1) * self.cols];
            for (o, &e) in out.iter_mut().zip(row) {
                match e {
                    1 => *o += x,
                    -1 => *o -= x,
                    _ => {}
                }
            }
        }
        Ok(out)
    }
}

/// Receptive fields of one projected feature: `E` Gaussian curves whose
/// centers straddle the observed value range.
#[derive(Clone, Debug, PartialEq)]
struct FieldColumn {
    x_min: f64,
    x_max: f64,
    /// Zero marks a degenerate (constant-valued) feature.
    sigma: f64,
    centers: Vec<f64>,
}

fn build_column(x_min: f64, x_max: f64, neurons: usize, gamma: f64) -> FieldColumn {
    if x_max > x_min {
        let sigma = gamma * (x_max - x_min) / (neurons as f64 - 2.0);
        let centers = (0..neurons)
            .map(|j| x_min + (2.0 * j as f64 - 3.0) / 2.0 * sigma)
            .collect();
        FieldColumn {
            x_min,
            x_max,
            sigma,
            centers,
        }
    } else {
        FieldColumn {
            x_min,
            x_max,
            sigma: 0.0,
            centers: Vec::new(),
        }
    }
}

/// Per-feature Gaussian receptive fields fitted to a projected training set.
#[derive(Clone, Debug, PartialEq)]
pub struct ReceptiveFieldBank {
    neurons_per_feature: usize,
    gamma: f64,
    columns: Vec<FieldColumn>,
}

/// Fit receptive fields to projected training data (N x l values).
pub fn fit_receptive_fields(
    projected: &[Vec<f64>],
    neurons_per_feature: usize,
    gamma: f64,
) -> Result<ReceptiveFieldBank> {
    if projected.is_empty() {
        return Err(Error::Data(
            "cannot fit receptive fields to an empty set".into(),
        ));
    }
    let width = projected[0].len();
    if width == 0 {
        return Err(Error::Shape("projected rows are empty".into()));
    }
    for row in projected {
        if row.len() != width {
            return Err(Error::Shape(format!(
                "projected rows disagree on width: {} vs {width}",
                row.len()
            )));
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data("non-finite projected value".into()));
        }
    }
    let mut ranges = vec![(f64::INFINITY, f64::NEG_INFINITY); width];
    for row in projected {
        for (r, &v) in ranges.iter_mut().zip(row) {
            r.0 = r.0.min(v);
            r.1 = r.1.max(v);
        }
    }
    ReceptiveFieldBank::from_ranges(&ranges, neurons_per_feature, gamma)
}

impl ReceptiveFieldBank {
    /// Build directly from per-feature (min, max) ranges; the single
    /// construction path shared by batch fitting, incremental range updates,
    /// and model-file loading.
    pub fn from_ranges(
        ranges: &[(f64, f64)],
        neurons_per_feature: usize,
        gamma: f64,
    ) -> Result<ReceptiveFieldBank> {
        if neurons_per_feature < 3 {
            return Err(Error::Config(format!(
                "receptive fields need at least 3 neurons per feature, got {neurons_per_feature}"
            )));
        }
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::Config(format!(
                "gamma must be positive, got {gamma}"
            )));
        }
        if ranges.is_empty() {
            return Err(Error::Shape("no feature ranges".into()));
        }
        for &(lo, hi) in ranges {
            if !(lo.is_finite() && hi.is_finite()) || lo > hi {
                return Err(Error::Data(format!("invalid feature range [{lo}, {hi}]")));
            }
        }
        let columns = ranges
            .iter()
            .map(|&(lo, hi)| build_column(lo, hi, neurons_per_feature, gamma))
            .collect();
        Ok(ReceptiveFieldBank {
            neurons_per_feature,
            gamma,
            columns,
        })
    }

    pub fn num_features(&self) -> usize {
        self.columns.len()
    }

    pub fn neurons_per_feature(&self) -> usize {
        self.neurons_per_feature
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Observed (min, max) of one feature.
    pub fn range(&self, feature: usize) -> (f64, f64) {
        let c = &self.columns[feature];
        (c.x_min, c.x_max)
    }

    /// Receptive-field width of one feature (zero if degenerate).
    pub fn sigma(&self, feature: usize) -> f64 {
        self.columns[feature].sigma
    }

    /// Center of receptive field `j` of a non-degenerate feature.
    pub fn center(&self, feature: usize, j: usize) -> f64 {
        self.columns[feature].centers[j]
    }

    /// Widen per-feature ranges to cover one new projected sample; only the
    /// columns whose extrema actually moved are rebuilt. Values inside the
    /// known ranges leave the bank bit-for-bit unchanged.
    pub fn update_running_range(&mut self, projected: &[f64]) -> Result<()> {
        if projected.len() != self.columns.len() {
            return Err(Error::Shape(format!(
                "projected width {} does not match bank width {}",
                projected.len(),
                self.columns.len()
            )));
        }
        for (col, &v) in self.columns.iter_mut().zip(projected) {
            if v < col.x_min || v > col.x_max {
                let lo = col.x_min.min(v);
                let hi = col.x_max.max(v);
                *col = build_column(lo, hi, self.neurons_per_feature, self.gamma);
            }
        }
        Ok(())
    }
}

/// Integer spike times of one encoded sample, feature-major: the time of
/// receptive-field neuron `j` of feature `i` sits at slot `i * E + j`.
/// `t_max` is the no-spike sentinel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpikeVector {
    pub times: Vec<SpikeTime>,
}

impl SpikeVector {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Dump line: space-separated integers, sentinels printed as `t_max`.
    pub fn to_line(&self) -> String {
        let mut s = String::with_capacity(self.times.len() * 3);
        for (i, t) in self.times.iter().enumerate() {
            if i > 0 {
                s.push(' ');
            }
            s.push_str(&t.to_string());
        }
        s
    }
}

/// Encode one projected sample into spike times.
///
/// A degenerate feature (constant over the training range) emits `t = 0` on
/// its receptive-field neuron `j = 2` — the center that coincides with the
/// observed value under the center formula — and stays silent elsewhere.
pub fn encode(
    projected: &[f64],
    bank: &ReceptiveFieldBank,
    t_max: SpikeTime,
) -> Result<SpikeVector> {
    if projected.len() != bank.num_features() {
        return Err(Error::Shape(format!(
            "projected width {} does not match bank width {}",
            projected.len(),
            bank.num_features()
        )));
    }
    let e = bank.neurons_per_feature;
    let mut times = Vec::with_capacity(projected.len() * e);
    for (col, &x) in bank.columns.iter().zip(projected) {
        if col.sigma == 0.0 {
            for j in 0..e {
                times.push(if j == 2 { 0 } else { t_max });
            }
            continue;
        }
        for center in &col.centers {
            let z = (x - center) / col.sigma;
            let intensity = (-0.5 * z * z).exp();
            let t = (f64::from(t_max) * (1.0 - intensity)).round();
            times.push(if t >= f64::from(t_max) {
                t_max
            } else {
                t as SpikeTime
            });
        }
    }
    Ok(SpikeVector { times })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::StreamKey;

    #[test]
    fn projection_is_deterministic_in_its_seed() {
        let a = make_projection(100, 10, 42).unwrap();
        let b = make_projection(100, 10, 42).unwrap();
        assert_eq!(a, b);
        let c = make_projection(100, 10, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn projection_rejects_bad_shapes() {
        assert!(make_projection(0, 1, 0).is_err());
        assert!(make_projection(10, 0, 0).is_err());
        assert!(make_projection(10, 11, 0).is_err());
    }

    #[test]
    fn entry_distribution_matches_the_ternary_law() {
        // 1000 x 100 entries; exact binomial 3-sigma bounds on the counts.
        let p = make_projection(1000, 100, 7).unwrap();
        let n = p.entries().len() as f64;
        let zeros = p.entries().iter().filter(|&&e| e == 0).count() as f64;
        let plus = p.entries().iter().filter(|&&e| e == 1).count() as f64;
        let minus = p.entries().iter().filter(|&&e| e == -1).count() as f64;
        let bound = |prob: f64| 3.0 * (prob * (1.0 - prob) / n).sqrt();
        assert!(
            (zeros / n - 2.0 / 3.0).abs() <= bound(2.0 / 3.0),
            "zeros {}",
            zeros / n
        );
        assert!(
            (plus / n - 1.0 / 6.0).abs() <= bound(1.0 / 6.0),
            "plus {}",
            plus / n
        );
        assert!(
            (minus / n - 1.0 / 6.0).abs() <= bound(1.0 / 6.0),
            "minus {}",
            minus / n
        );
    }

    #[test]
    fn single_selector_column_copies_the_input() {
        // Find a (row, col) holding +1 and check that feature is exactly
        // the selected signal coordinate when all other rows are zeroed.
        let p = make_projection(20, 5, 3).unwrap();
        let (row, col) = (0..20)
            .flat_map(|r| (0..5).map(move |c| (r, c)))
            .find(|&(r, c)| p.entry(r, c) == 1)
            .expect("some +1 entry exists");
        let mut signal = vec![0.0; 20];
        signal[row] = 2.75;
        let out = p.project(&signal).unwrap();
        assert_eq!(out[col], 2.75);
    }

    #[test]
    fn zero_signal_projects_to_zero() {
        let p = make_projection(64, 8, 1).unwrap();
        assert_eq!(p.project(&vec![0.0; 64]).unwrap(), vec![0.0; 8]);
    }

    #[test]
    fn projection_length_mismatch_is_rejected() {
        let p = make_projection(64, 8, 1).unwrap();
        assert!(p.project(&vec![0.0; 63]).is_err());
    }

    /// Pairwise distances survive the projection: with the sqrt(3/l)
    /// correction for unit-variance entries, distance ratios concentrate
    /// near 1 (within +/-40% for at least 90% of pairs).
    #[test]
    fn projection_roughly_preserves_pairwise_distances() {
        let p = make_projection(256, 64, 11).unwrap();
        let mut rng = StreamKey::root(100).child(1).rng();
        let points: Vec<Vec<f64>> = (0..20)
            .map(|_| (0..256).map(|_| rng.gaussian()).collect())
            .collect();
        let projected: Vec<Vec<f64>> = points.iter().map(|x| p.project(x).unwrap()).collect();
        let dist = |a: &[f64], b: &[f64]| -> f64 {
            a.iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt()
        };
        let scale = (3.0 / 64.0f64).sqrt();
        let mut within = 0;
        let mut total = 0;
        for i in 0..points.len() {
            for j in (i + 1)..points.len() {
                let ratio =
                    scale * dist(&projected[i], &projected[j]) / dist(&points[i], &points[j]);
                total += 1;
                if (ratio - 1.0).abs() <= 0.4 {
                    within += 1;
                }
            }
        }
        assert!(
            within * 10 >= total * 9,
            "only {within}/{total} pairs within 40%"
        );
    }

    #[test]
    fn fitted_widths_and_centers_match_the_closed_form() {
        // One feature observed on [0, 6] with E = 8, gamma = 3/2:
        // sigma = 1.5 * 6 / 6 = 1.5 and center_0 = 0 + (-3/2) * 1.5 = -2.25.
        let rows = vec![vec![0.0], vec![6.0], vec![3.0]];
        let bank = fit_receptive_fields(&rows, 8, 1.5).unwrap();
        assert_eq!(bank.sigma(0), 1.5);
        assert_eq!(bank.center(0, 0), -2.25);
        // centers step by exactly sigma
        for j in 1..8 {
            let step = bank.center(0, j) - bank.center(0, j - 1);
            assert!((step - 1.5).abs() < 1e-12);
        }
    }

    #[test]
    fn shifting_the_data_shifts_centers_but_not_widths() {
        let rows: Vec<Vec<f64>> = vec![vec![0.2], vec![1.7], vec![0.9]];
        let shifted: Vec<Vec<f64>> = rows.iter().map(|r| vec![r[0] + 10.0]).collect();
        let a = fit_receptive_fields(&rows, 8, 1.5).unwrap();
        let b = fit_receptive_fields(&shifted, 8, 1.5).unwrap();
        assert!((a.sigma(0) - b.sigma(0)).abs() < 1e-12);
        for j in 0..8 {
            assert!((b.center(0, j) - a.center(0, j) - 10.0).abs() < 1e-9);
        }
    }

    #[test]
    fn fit_rejects_empty_and_non_finite_input() {
        assert!(fit_receptive_fields(&[], 8, 1.5).is_err());
        assert!(fit_receptive_fields(&[vec![f64::NAN]], 8, 1.5).is_err());
        assert!(fit_receptive_fields(&[vec![1.0]], 2, 1.5).is_err());
    }

    fn one_feature_bank(lo: f64, hi: f64) -> ReceptiveFieldBank {
        ReceptiveFieldBank::from_ranges(&[(lo, hi)], 8, 1.5).unwrap()
    }

    #[test]
    fn value_on_a_center_spikes_immediately() {
        let bank = one_feature_bank(0.0, 6.0);
        let x = bank.center(0, 4);
        let sv = encode(&[x], &bank, 16).unwrap();
        assert_eq!(sv.times[4], 0);
    }

    #[test]
    fn value_one_sigma_away_spikes_at_six_of_sixteen() {
        // 16 * (1 - exp(-1/2)) = 6.295... rounds to 6.
        let bank = one_feature_bank(0.0, 6.0);
        let x = bank.center(0, 4) + bank.sigma(0);
        let sv = encode(&[x], &bank, 16).unwrap();
        assert_eq!(sv.times[4], 6);
    }

    #[test]
    fn value_four_sigma_away_is_silent() {
        // 16 * (1 - exp(-8)) rounds to 16, the sentinel.
        let bank = one_feature_bank(0.0, 6.0);
        let x = bank.center(0, 0) + 4.0 * bank.sigma(0);
        let sv = encode(&[x], &bank, 16).unwrap();
        assert_eq!(sv.times[0], 16);
    }

    #[test]
    fn degenerate_feature_emits_the_fixed_pattern() {
        let rows = vec![vec![3.0, 1.0], vec![3.0, 2.0]];
        let bank = fit_receptive_fields(&rows, 8, 1.5).unwrap();
        let sv = encode(&[3.0, 1.5], &bank, 16).unwrap();
        assert_eq!(&sv.times[..8], &[16, 16, 0, 16, 16, 16, 16, 16]);
        assert!(sv.times[8..].iter().any(|&t| t < 16));
    }

    #[test]
    fn spike_times_are_monotone_in_distance_from_center() {
        let bank = one_feature_bank(-2.0, 10.0);
        let mut rng = StreamKey::root(8).child(2).rng();
        for j in 0..8 {
            let mu = bank.center(0, j);
            for _ in 0..200 {
                let d1 = 6.0 * rng.next_f64();
                let d2 = d1 + 6.0 * rng.next_f64();
                let t1 = encode(&[mu + d1], &bank, 16).unwrap().times[j];
                let t2 = encode(&[mu + d2], &bank, 16).unwrap().times[j];
                assert!(t1 <= t2, "|d|={d1} gave t={t1}, |d|={d2} gave t={t2}");
                let t1n = encode(&[mu - d1], &bank, 16).unwrap().times[j];
                assert_eq!(t1, t1n, "encoding must be symmetric around the center");
            }
        }
    }

    /// With the default gamma the centers tile the observed range densely
    /// enough that every in-range value excites some neuron almost
    /// immediately: min_j t_j <= round(t_max * (1 - exp(-1/8))) = 2.
    #[test]
    fn every_in_range_value_spikes_early_somewhere() {
        let bank = one_feature_bank(-1.0, 3.0);
        let mut rng = StreamKey::root(12).child(4).rng();
        for _ in 0..2000 {
            let x = -1.0 + 4.0 * rng.next_f64();
            let sv = encode(&[x], &bank, 16).unwrap();
            let min = sv.times.iter().min().unwrap();
            assert!(*min <= 2, "x = {x} earliest spike {min}");
        }
    }

    #[test]
    fn incremental_range_updates_match_batch_fitting() {
        let mut rng = StreamKey::root(21).child(9).rng();
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|_| (0..6).map(|_| 10.0 * rng.next_f64() - 5.0).collect())
            .collect();
        let batch = fit_receptive_fields(&rows, 8, 1.5).unwrap();
        let mut incremental = fit_receptive_fields(&rows[..1], 8, 1.5).unwrap();
        for row in &rows[1..] {
            incremental.update_running_range(row).unwrap();
        }
        assert_eq!(batch, incremental);
    }

    #[test]
    fn in_range_updates_change_nothing() {
        let rows = vec![vec![0.0, -1.0], vec![4.0, 5.0]];
        let mut bank = fit_receptive_fields(&rows, 8, 1.5).unwrap();
        let before = bank.clone();
        bank.update_running_range(&[2.0, 3.0]).unwrap();
        assert_eq!(bank, before);
    }

    #[test]
    fn out_of_range_updates_touch_only_their_feature() {
        let rows = vec![vec![0.0, -1.0], vec![4.0, 5.0]];
        let mut bank = fit_receptive_fields(&rows, 8, 1.5).unwrap();
        let before = bank.clone();
        bank.update_running_range(&[9.0, 0.0]).unwrap();
        assert_eq!(bank.range(0), (0.0, 9.0));
        assert_eq!(bank.range(1), before.range(1));
        assert_eq!(bank.sigma(1), before.sigma(1));
        assert_ne!(bank.sigma(0), before.sigma(0));
    }

    /// Dropping the sqrt(3) of the classical ternary construction is sound:
    /// uniformly scaling every projected value rescales the fitted ranges,
    /// widths, and centers together, leaving spike times unchanged.
    #[test]
    fn scaling_entries_does_not_change_spikes() {
        let p = make_projection(64, 8, 5).unwrap();
        let mut rng = StreamKey::root(30).child(3).rng();
        let signals: Vec<Vec<f64>> = (0..50)
            .map(|_| (0..64).map(|_| rng.gaussian()).collect())
            .collect();
        let plain: Vec<Vec<f64>> = signals.iter().map(|s| p.project(s).unwrap()).collect();
        let scaled: Vec<Vec<f64>> = plain
            .iter()
            .map(|r| r.iter().map(|v| v * 3.0f64.sqrt()).collect())
            .collect();
        let bank_plain = fit_receptive_fields(&plain, 8, 1.5).unwrap();
        let bank_scaled = fit_receptive_fields(&scaled, 8, 1.5).unwrap();
        for (a, b) in plain.iter().zip(&scaled) {
            let sa = encode(a, &bank_plain, 16).unwrap();
            let sb = encode(b, &bank_scaled, 16).unwrap();
            assert_eq!(sa, sb);
        }
    }

    #[test]
    fn dump_line_prints_sentinels_as_t_max() {
        let sv = SpikeVector {
            times: vec![0, 6, 16],
        };
        assert_eq!(sv.to_line(), "0 6 16");
    }
}
