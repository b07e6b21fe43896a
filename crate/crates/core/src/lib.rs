//! Integer-arithmetic engine for online, unsupervised clustering of
//! univariate time series with a temporal (spiking) neural network.
//!
//! The processing chain: a sparse ternary random projection compresses each
//! raw signal ([`encoding`]), Gaussian receptive fields translate the
//! projected features into integer spike latencies, and a single
//! winner-take-all column of ramp-no-leak neurons assigns the cluster
//! ([`tnn`]). Weights adapt online with a stochastic integer plasticity rule
//! ([`learning`]), so inference and training run in integer arithmetic end to
//! end — floats appear only while fitting the encoder and in the evaluation
//! and silicon-costing utilities ([`eval`], [`hw`]).
//!
//! Every random choice in a run derives from one 64-bit seed through
//! counter-based streams ([`rng`]), which makes training, streaming, and the
//! model files bit-for-bit reproducible. [`pipeline`] ties the stages
//! together; [`config`] and [`data`] hold the shared parameter record and
//! dataset handling.

pub mod config;
pub mod data;
pub mod encoding;
pub mod error;
pub mod eval;
pub mod hw;
pub mod learning;
pub mod pipeline;
pub mod rng;
pub mod tnn;

/// Integer spike time; a value equal to the configured `t_max` is the
/// "did not spike" sentinel.
pub type SpikeTime = u16;

/// Synaptic weight; valid values are `0..=w_max` with `w_max = 2^b - 1` for
/// the configured bit-width `b`.
pub type Weight = u8;

pub use config::{validate, ConfigBuilder, StdpParams, TnnConfig, ValidatedConfig};
pub use data::{load_archive, parse_archive, synth_two_tone, znorm_rows, Dataset, SplitSpec};
pub use encoding::{
    encode, fit_receptive_fields, make_projection, ProjectionMatrix, ReceptiveFieldBank,
    SpikeVector,
};
pub use error::{Error, Result};
pub use eval::{kmeans_baseline, normalized_ri, pair_counts, rand_index, EvalRecord, PairCounts};
pub use hw::{
    dimensionality_reduction, fit_coefficients, reference_coefficients, synapse_count,
    synapses_for, CalibrationPoint, HwCoefficients, HwEstimate, REFERENCE_DESIGNS,
};
pub use learning::{apply_stdp, stdp_delta};
pub use pipeline::{
    evaluate_model, load_model, load_model_file, predict, predict_one, save_model, save_model_file,
    stream_step, train, EpochStats, TrainedModel,
};
pub use rng::{DetRng, StreamKey};
pub use tnn::{assign_cluster, ForwardResult, TnnColumn};
