//! Shared fixtures for the criterion benchmarks: deterministic datasets,
//! encoders, and trained models sized like the published design points.

use tnncluster_core::config::{validate, TnnConfig, ValidatedConfig};
use tnncluster_core::data::{synth_two_tone, Dataset};
use tnncluster_core::encoding::SpikeVector;
use tnncluster_core::pipeline::{encode_dataset, fit_encoder, train, TrainedModel};

/// The desk-scale fixture: 100 samples, L = 64, two classes.
pub fn fixture() -> Dataset {
    synth_two_tone(50, 64, 7).expect("fixture generates")
}

/// Validated defaults for the fixture with a fixed training seed.
pub fn fixture_config() -> ValidatedConfig {
    let mut cfg = TnnConfig::defaults_for(64, 2);
    cfg.rng_seed = 1;
    validate(cfg).expect("defaults validate")
}

/// A trained model over the fixture, for forward/streaming benchmarks.
pub fn trained_model() -> TrainedModel {
    let ds = fixture();
    let (model, _) = train(&ds.samples, &fixture_config()).expect("training succeeds");
    model
}

/// Pre-encoded spike vectors of every fixture sample.
pub fn encoded_fixture() -> Vec<SpikeVector> {
    let ds = fixture();
    let cfg = fixture_config();
    let (projection, bank) = fit_encoder(&ds.samples, &cfg).expect("encoder fits");
    encode_dataset(&ds.samples, &projection, &bank, cfg.t_max).expect("samples encode")
}
