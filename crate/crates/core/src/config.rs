//! Hyperparameter record shared by every stage of the engine, plus the
//! plain-text `key=value` configuration format and its validation rules.
//!
//! All other modules take a [`ValidatedConfig`]; nothing else re-checks
//! parameter consistency.

use std::collections::BTreeMap;
use std::ops::Deref;
use std::path::Path;

use crate::error::{Error, Result};

/// Stochastic update probabilities for the plasticity rule.
///
/// The defaults are dyadic rationals so Bernoulli draws reduce to exact
/// comparisons: search probability 1/8 < capture 1/2 < backoff 3/4, with a
/// 1/4 floor that keeps saturated weights from freezing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StdpParams {
    /// P(+1) when only the input spiked (search).
    pub pi_s: f64,
    /// Gate probability when both sides spiked (capture).
    pub pi_c: f64,
    /// Gate probability when only the output spiked (backoff).
    pub pi_b: f64,
    /// Floor probability OR-ed with the weight-dependent stabilizer.
    pub pi_min: f64,
}

impl Default for StdpParams {
    fn default() -> Self {
        StdpParams {
            pi_s: 0.125,
            pi_c: 0.5,
            pi_b: 0.75,
            pi_min: 0.25,
        }
    }
}

/// Complete hyperparameter set for one clustering run.
#[derive(Clone, Debug, PartialEq)]
pub struct TnnConfig {
    /// Receptive-field neurons per projected feature (E).
    pub encoding_neurons: usize,
    /// Spike-time horizon; `t_max` itself is the no-spike sentinel.
    pub t_max: u16,
    /// Maximum synaptic weight; must be 2^b - 1 for some bit-width b.
    pub w_max: u8,
    /// Receptive-field width multiplier.
    pub gamma: f64,
    /// Firing threshold on the membrane potential.
    pub theta: u32,
    /// Neurons in the column = number of clusters (C).
    pub num_clusters: usize,
    /// Raw signal length (L).
    pub signal_length: usize,
    /// Projected feature count (l).
    pub reduced_length: usize,
    pub stdp: StdpParams,
    /// Master seed; every random stream in a run derives from it.
    pub rng_seed: u64,
    pub max_epochs: usize,
    /// Stop when the fraction of weights that switched halves of the weight
    /// range over an epoch drops below this. Zero disables early stopping,
    /// so training always runs the full `max_epochs`.
    pub convergence_frac: f64,
    /// Shuffle presentation order each epoch (disable to compare batch
    /// training against one-by-one streaming).
    pub shuffle: bool,
}

/// Default threshold: a quarter of the maximum reachable potential.
pub fn default_theta(encoding_neurons: usize, reduced_length: usize, w_max: u8) -> u32 {
    let max_potential = (encoding_neurons * reduced_length) as f64 * w_max as f64;
    (max_potential / 4.0).round() as u32
}

impl TnnConfig {
    /// Defaults for a signal length and cluster count: E=8, T_max=16,
    /// 3-bit weights, l = L/8 (floored), gamma = 3/2, theta = E*l*w_max/4.
    pub fn defaults_for(signal_length: usize, num_clusters: usize) -> TnnConfig {
        let encoding_neurons = 8;
        let reduced_length = signal_length / 8;
        let w_max = 7;
        TnnConfig {
            encoding_neurons,
            t_max: 16,
            w_max,
            gamma: 1.5,
            theta: default_theta(encoding_neurons, reduced_length, w_max),
            num_clusters,
            signal_length,
            reduced_length,
            stdp: StdpParams::default(),
            rng_seed: 0,
            max_epochs: 50,
            convergence_frac: 0.01,
            shuffle: true,
        }
    }

    /// Stable `key=value` view, used by config snapshots and model files.
    pub fn to_key_values(&self) -> Vec<(String, String)> {
        vec![
            ("encoding_neurons".into(), self.encoding_neurons.to_string()),
            ("t_max".into(), self.t_max.to_string()),
            ("w_max".into(), self.w_max.to_string()),
            ("gamma".into(), self.gamma.to_string()),
            ("theta".into(), self.theta.to_string()),
            ("num_clusters".into(), self.num_clusters.to_string()),
            ("signal_length".into(), self.signal_length.to_string()),
            ("reduced_length".into(), self.reduced_length.to_string()),
            ("pi_s".into(), self.stdp.pi_s.to_string()),
            ("pi_c".into(), self.stdp.pi_c.to_string()),
            ("pi_b".into(), self.stdp.pi_b.to_string()),
            ("pi_min".into(), self.stdp.pi_min.to_string()),
            ("rng_seed".into(), self.rng_seed.to_string()),
            ("max_epochs".into(), self.max_epochs.to_string()),
            ("convergence_frac".into(), self.convergence_frac.to_string()),
            ("shuffle".into(), self.shuffle.to_string()),
        ]
    }

    /// Same view as a sorted map (for JSON manifests).
    pub fn to_map(&self) -> BTreeMap<String, String> {
        self.to_key_values().into_iter().collect()
    }
}

/// Proof of validation; the only config type the rest of the engine accepts.
#[derive(Clone, Debug, PartialEq)]
pub struct ValidatedConfig(TnnConfig);

impl ValidatedConfig {
    pub fn into_inner(self) -> TnnConfig {
        self.0
    }
}

impl Deref for ValidatedConfig {
    type Target = TnnConfig;
    fn deref(&self) -> &TnnConfig {
        &self.0
    }
}

/// Check every cross-parameter invariant; idempotent on already-valid input.
pub fn validate(cfg: TnnConfig) -> Result<ValidatedConfig> {
    fn fail(msg: impl Into<String>) -> Result<ValidatedConfig> {
        Err(Error::Config(msg.into()))
    }

    if cfg.encoding_neurons < 3 {
        return fail(format!(
            "encoding_neurons must be >= 3 (receptive-field width divides by E-2), got {}",
            cfg.encoding_neurons
        ));
    }
    if cfg.t_max == 0 {
        return fail("t_max must be positive");
    }
    if cfg.w_max == 0 || !(cfg.w_max as u16 + 1).is_power_of_two() {
        return fail(format!(
            "w_max must be 2^b - 1 for a weight bit-width b, got {}",
            cfg.w_max
        ));
    }
    if !(cfg.gamma.is_finite() && cfg.gamma > 0.0) {
        return fail(format!(
            "gamma must be finite and positive, got {}",
            cfg.gamma
        ));
    }
    if cfg.num_clusters == 0 {
        return fail("num_clusters must be positive");
    }
    if cfg.signal_length == 0 {
        return fail("signal_length must be positive");
    }
    if cfg.reduced_length == 0 {
        return fail("reduced_length must be >= 1 (is signal_length at least 8?)");
    }
    if cfg.reduced_length > cfg.signal_length {
        return fail(format!(
            "reduced_length {} exceeds signal_length {}",
            cfg.reduced_length, cfg.signal_length
        ));
    }
    let max_potential = cfg.encoding_neurons as u64 * cfg.reduced_length as u64 * cfg.w_max as u64;
    if cfg.theta == 0 {
        return fail("theta must be positive");
    }
    if u64::from(cfg.theta) > max_potential {
        return fail(format!(
            "theta {} is unreachable: max potential is E*l*w_max = {}",
            cfg.theta, max_potential
        ));
    }
    let p = &cfg.stdp;
    for (name, v) in [
        ("pi_s", p.pi_s),
        ("pi_c", p.pi_c),
        ("pi_b", p.pi_b),
        ("pi_min", p.pi_min),
    ] {
        if !(v.is_finite() && (0.0..=1.0).contains(&v)) {
            return fail(format!("{name} must be a probability in [0, 1], got {v}"));
        }
    }
    if !(p.pi_s < p.pi_c && p.pi_c < p.pi_b) {
        return fail(format!(
            "plasticity probabilities must satisfy pi_s < pi_c < pi_b, got {} / {} / {}",
            p.pi_s, p.pi_c, p.pi_b
        ));
    }
    if !(cfg.convergence_frac.is_finite()
        && 0.0 <= cfg.convergence_frac
        && cfg.convergence_frac < 1.0)
    {
        return fail(format!(
            "convergence_frac must lie in [0, 1), got {}",
            cfg.convergence_frac
        ));
    }
    Ok(ValidatedConfig(cfg))
}

/// Partial configuration overlay: file contents and CLI overrides both parse
/// into one of these, later overlays win, and [`ConfigBuilder::resolve`]
/// fills the remaining fields from defaults.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigBuilder {
    pub encoding_neurons: Option<usize>,
    pub t_max: Option<u16>,
    pub w_max: Option<u8>,
    pub gamma: Option<f64>,
    pub theta: Option<u32>,
    pub num_clusters: Option<usize>,
    pub signal_length: Option<usize>,
    pub reduced_length: Option<usize>,
    pub pi_s: Option<f64>,
    pub pi_c: Option<f64>,
    pub pi_b: Option<f64>,
    pub pi_min: Option<f64>,
    pub rng_seed: Option<u64>,
    pub max_epochs: Option<usize>,
    pub convergence_frac: Option<f64>,
    pub shuffle: Option<bool>,
}

fn parse_as<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("invalid value `{value}` for key `{key}`")))
}

impl ConfigBuilder {
    /// Parse one `key=value` assignment. Unknown keys are errors.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "encoding_neurons" => self.encoding_neurons = Some(parse_as(key, value)?),
            "t_max" => self.t_max = Some(parse_as(key, value)?),
            "w_max" => self.w_max = Some(parse_as(key, value)?),
            "gamma" => self.gamma = Some(parse_as(key, value)?),
            "theta" => self.theta = Some(parse_as(key, value)?),
            "num_clusters" => self.num_clusters = Some(parse_as(key, value)?),
            "signal_length" => self.signal_length = Some(parse_as(key, value)?),
            "reduced_length" => self.reduced_length = Some(parse_as(key, value)?),
            "pi_s" => self.pi_s = Some(parse_as(key, value)?),
            "pi_c" => self.pi_c = Some(parse_as(key, value)?),
            "pi_b" => self.pi_b = Some(parse_as(key, value)?),
            "pi_min" => self.pi_min = Some(parse_as(key, value)?),
            "rng_seed" => self.rng_seed = Some(parse_as(key, value)?),
            "max_epochs" => self.max_epochs = Some(parse_as(key, value)?),
            "convergence_frac" => self.convergence_frac = Some(parse_as(key, value)?),
            "shuffle" => self.shuffle = Some(parse_as(key, value)?),
            _ => return Err(Error::Config(format!("unknown config key `{key}`"))),
        }
        Ok(())
    }

    /// Parse a config file body: one `key=value` per line, `#` comments.
    pub fn parse_str(text: &str) -> Result<ConfigBuilder> {
        let mut builder = ConfigBuilder::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(idx) => &raw[..idx],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!(
                    "line {}: expected key=value, got `{line}`",
                    lineno + 1
                ))
            })?;
            builder.set(key.trim(), value.trim())?;
        }
        Ok(builder)
    }

    pub fn from_file(path: &Path) -> Result<ConfigBuilder> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Config(format!("cannot read config file {}: {e}", path.display()))
        })?;
        Self::parse_str(&text)
    }

    /// Overlay `other` on top of `self` (fields set in `other` win).
    pub fn merge(mut self, other: ConfigBuilder) -> ConfigBuilder {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(
            encoding_neurons,
            t_max,
            w_max,
            gamma,
            theta,
            num_clusters,
            signal_length,
            reduced_length,
            pi_s,
            pi_c,
            pi_b,
            pi_min,
            rng_seed,
            max_epochs,
            convergence_frac,
            shuffle
        );
        self
    }

    /// Fill unset fields from defaults. `signal_length` and `num_clusters`
    /// must come from the overlay or the fallbacks (usually the dataset).
    pub fn resolve(
        &self,
        fallback_signal_length: Option<usize>,
        fallback_num_clusters: Option<usize>,
    ) -> Result<TnnConfig> {
        let signal_length = self
            .signal_length
            .or(fallback_signal_length)
            .ok_or_else(|| Error::Config("signal_length is required".into()))?;
        let num_clusters = self
            .num_clusters
            .or(fallback_num_clusters)
            .ok_or_else(|| Error::Config("num_clusters is required".into()))?;
        let mut cfg = TnnConfig::defaults_for(signal_length, num_clusters);
        if let Some(v) = self.encoding_neurons {
            cfg.encoding_neurons = v;
        }
        if let Some(v) = self.t_max {
            cfg.t_max = v;
        }
        if let Some(v) = self.w_max {
            cfg.w_max = v;
        }
        if let Some(v) = self.gamma {
            cfg.gamma = v;
        }
        if let Some(v) = self.reduced_length {
            cfg.reduced_length = v;
        }
        // The derived threshold must see the post-override E, l, and w_max.
        cfg.theta = self
            .theta
            .unwrap_or_else(|| default_theta(cfg.encoding_neurons, cfg.reduced_length, cfg.w_max));
        if let Some(v) = self.pi_s {
            cfg.stdp.pi_s = v;
        }
        if let Some(v) = self.pi_c {
            cfg.stdp.pi_c = v;
        }
        if let Some(v) = self.pi_b {
            cfg.stdp.pi_b = v;
        }
        if let Some(v) = self.pi_min {
            cfg.stdp.pi_min = v;
        }
        if let Some(v) = self.rng_seed {
            cfg.rng_seed = v;
        }
        if let Some(v) = self.max_epochs {
            cfg.max_epochs = v;
        }
        if let Some(v) = self.convergence_frac {
            cfg.convergence_frac = v;
        }
        if let Some(v) = self.shuffle {
            cfg.shuffle = v;
        }
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_the_documented_constants() {
        let cfg = TnnConfig::defaults_for(64, 2);
        assert_eq!(cfg.encoding_neurons, 8);
        assert_eq!(cfg.t_max, 16);
        assert_eq!(cfg.w_max, 7);
        assert_eq!(cfg.gamma, 1.5);
        assert_eq!(cfg.reduced_length, 8);
        // quarter of max potential: 8 * 8 * 7 / 4
        assert_eq!(cfg.theta, 112);
        assert_eq!(cfg.stdp, StdpParams::default());
        assert_eq!(cfg.rng_seed, 0);
        assert_eq!(cfg.max_epochs, 50);
        assert!(cfg.shuffle);
        assert!(validate(cfg).is_ok());
    }

    #[test]
    fn validation_is_idempotent() {
        let cfg = TnnConfig::defaults_for(128, 3);
        let once = validate(cfg).unwrap();
        let twice = validate(once.clone().into_inner()).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn too_few_encoding_neurons_is_rejected() {
        let mut cfg = TnnConfig::defaults_for(64, 2);
        cfg.encoding_neurons = 2;
        let err = validate(cfg).unwrap_err().to_string();
        assert!(err.contains("encoding_neurons"), "{err}");
    }

    #[test]
    fn probability_ordering_is_enforced() {
        let mut cfg = TnnConfig::defaults_for(64, 2);
        cfg.stdp.pi_s = 0.9;
        let err = validate(cfg).unwrap_err().to_string();
        assert!(err.contains("pi_s < pi_c < pi_b"), "{err}");
    }

    #[test]
    fn unreachable_threshold_is_rejected() {
        let mut cfg = TnnConfig::defaults_for(64, 2);
        cfg.theta = 8 * 8 * 7 + 1;
        let err = validate(cfg).unwrap_err().to_string();
        assert!(err.contains("unreachable"), "{err}");
    }

    #[test]
    fn w_max_must_fill_a_bit_width() {
        let mut cfg = TnnConfig::defaults_for(64, 2);
        cfg.w_max = 6;
        assert!(validate(cfg.clone()).is_err());
        cfg.w_max = 15;
        assert!(validate(cfg).is_ok());
    }

    #[test]
    fn reduced_length_zero_is_rejected() {
        // L = 7 floors to l = 0, which validation must catch.
        let cfg = TnnConfig::defaults_for(7, 2);
        assert_eq!(cfg.reduced_length, 0);
        assert!(validate(cfg).is_err());
    }

    #[test]
    fn file_parsing_handles_comments_and_blank_lines() {
        let text = "\n# full-line comment\n t_max = 32 # trailing comment\nrng_seed=9\n";
        let b = ConfigBuilder::parse_str(text).unwrap();
        assert_eq!(b.t_max, Some(32));
        assert_eq!(b.rng_seed, Some(9));
        assert_eq!(b.gamma, None);
    }

    #[test]
    fn unknown_keys_are_errors() {
        let err = ConfigBuilder::parse_str("tmax=32").unwrap_err().to_string();
        assert!(err.contains("unknown config key"), "{err}");
    }

    #[test]
    fn malformed_lines_are_errors() {
        assert!(ConfigBuilder::parse_str("just words").is_err());
        assert!(ConfigBuilder::parse_str("gamma=notanumber").is_err());
    }

    #[test]
    fn later_overlays_win() {
        let file = ConfigBuilder::parse_str("rng_seed=1\ngamma=2.0").unwrap();
        let mut cli = ConfigBuilder::default();
        cli.set("rng_seed", "7").unwrap();
        let merged = file.merge(cli);
        let cfg = merged.resolve(Some(64), Some(2)).unwrap();
        assert_eq!(cfg.rng_seed, 7);
        assert_eq!(cfg.gamma, 2.0);
    }

    #[test]
    fn derived_theta_tracks_overridden_dimensions() {
        let mut b = ConfigBuilder::default();
        b.set("reduced_length", "4").unwrap();
        let cfg = b.resolve(Some(64), Some(2)).unwrap();
        // 8 * 4 * 7 / 4
        assert_eq!(cfg.theta, 56);

        let mut b = ConfigBuilder::default();
        b.set("theta", "99").unwrap();
        b.set("reduced_length", "4").unwrap();
        let cfg = b.resolve(Some(64), Some(2)).unwrap();
        assert_eq!(cfg.theta, 99);
    }

    #[test]
    fn resolve_requires_dimensions() {
        let b = ConfigBuilder::default();
        assert!(b.resolve(None, Some(2)).is_err());
        assert!(b.resolve(Some(64), None).is_err());
    }

    #[test]
    fn key_value_round_trip_preserves_everything() {
        let mut cfg = TnnConfig::defaults_for(64, 2);
        cfg.gamma = 1.25;
        cfg.convergence_frac = 0.015625;
        let mut b = ConfigBuilder::default();
        for (k, v) in cfg.to_key_values() {
            b.set(&k, &v).unwrap();
        }
        let back = b.resolve(None, None).unwrap();
        assert_eq!(back, cfg);
    }
}
