//! Stochastic integer plasticity.
//!
//! Each (input spike time, output spike time) pair selects one of five update
//! cases — using `t_max` as the "did not spike" sentinel on both sides — and
//! the weight moves by at most one step:
//!
//! | input | output | condition        | update                                |
//! |-------|--------|------------------|---------------------------------------|
//! | yes   | no     |                  | +B(pi_s)                              |
//! | yes   | yes    | t_in <= t_out    | +B(pi_c) * max(B(s_pos(w)), B(pi_min))|
//! | yes   | yes    | t_in >  t_out    | -B(pi_c) * max(B(s_neg(w)), B(pi_min))|
//! | no    | yes    |                  | -B(pi_b) * max(B(s_neg(w)), B(pi_min))|
//! | no    | no     |                  | 0                                     |
//!
//! `B(p)` is a fresh Bernoulli draw and the max of two independent draws is
//! realized as their logical OR. The stabilizers push weights toward the
//! rails: potentiation is likeliest for already-strong weights, depression
//! for already-weak ones, which is what drives converged weight vectors to
//! the bimodal {0, w_max} shape. Results are clamped to [0, w_max].
//!
//! Draw order per synapse is fixed (gate, then stabilizer, then floor) and a
//! zero gate short-circuits the remaining draws; each synapse draws from its
//! own derived stream, so updates are order-independent.

use crate::config::StdpParams;
use crate::encoding::SpikeVector;
use crate::error::{Error, Result};
use crate::rng::{DetRng, StreamKey};
use crate::tnn::TnnColumn;
use crate::{SpikeTime, Weight};

/// Potentiation stabilizer probability: `(w/w_max) * (2 - w/w_max)`.
pub fn stabilizer_pos(weight: Weight, w_max: Weight) -> f64 {
    let r = f64::from(weight) / f64::from(w_max);
    r * (2.0 - r)
}

/// Depression stabilizer probability: `(1 - w/w_max) * (1 + w/w_max)`.
pub fn stabilizer_neg(weight: Weight, w_max: Weight) -> f64 {
    let r = f64::from(weight) / f64::from(w_max);
    (1.0 - r) * (1.0 + r)
}

fn gated_step(gate_p: f64, stabilizer_p: f64, floor_p: f64, rng: &mut DetRng) -> i8 {
    if !rng.bernoulli(gate_p) {
        return 0;
    }
    let stabilized = rng.bernoulli(stabilizer_p);
    let floored = rng.bernoulli(floor_p);
    i8::from(stabilized || floored)
}

/// One stochastic update step in {-1, 0, +1} for a single synapse.
pub fn stdp_delta(
    t_in: SpikeTime,
    t_out: SpikeTime,
    weight: Weight,
    w_max: Weight,
    t_max: SpikeTime,
    params: &StdpParams,
    rng: &mut DetRng,
) -> i8 {
    let in_spiked = t_in != t_max;
    let out_spiked = t_out != t_max;
    match (in_spiked, out_spiked) {
        (true, false) => i8::from(rng.bernoulli(params.pi_s)),
        (true, true) if t_in <= t_out => gated_step(
            params.pi_c,
            stabilizer_pos(weight, w_max),
            params.pi_min,
            rng,
        ),
        (true, true) => -gated_step(
            params.pi_c,
            stabilizer_neg(weight, w_max),
            params.pi_min,
            rng,
        ),
        (false, true) => -gated_step(
            params.pi_b,
            stabilizer_neg(weight, w_max),
            params.pi_min,
            rng,
        ),
        (false, false) => 0,
    }
}

/// Apply one sample's updates to every synapse of every neuron (losers too:
/// their sentinel output times select the search/idle rows). `key` must be
/// unique per sample — each synapse then draws from `key.child(flat_index)`.
/// Pass `changed` to record which weights moved (epoch convergence tracking).
pub fn apply_stdp(
    column: &mut TnnColumn,
    inputs: &SpikeVector,
    output_times: &[SpikeTime],
    params: &StdpParams,
    key: StreamKey,
    mut changed: Option<&mut [bool]>,
) -> Result<()> {
    let neurons = column.num_neurons();
    let synapses = column.num_synapses();
    if inputs.len() != synapses {
        return Err(Error::Shape(format!(
            "input spike vector length {} does not match {synapses} synapses",
            inputs.len()
        )));
    }
    if output_times.len() != neurons {
        return Err(Error::Shape(format!(
            "{} output times for {neurons} neurons",
            output_times.len()
        )));
    }
    if let Some(flags) = changed.as_deref() {
        if flags.len() != neurons * synapses {
            return Err(Error::Shape(format!(
                "change-tracking slice has {} slots for {} weights",
                flags.len(),
                neurons * synapses
            )));
        }
    }
    let (w_max, t_max) = (column.w_max, column.t_max);
    let weights = column.weights_mut();
    for (k, &t_out) in output_times.iter().enumerate() {
        for j in 0..synapses {
            let idx = k * synapses + j;
            let mut rng = key.child(idx as u64).rng();
            let delta = stdp_delta(
                inputs.times[j],
                t_out,
                weights[idx],
                w_max,
                t_max,
                params,
                &mut rng,
            );
            let updated = match delta {
                1 if weights[idx] < w_max => weights[idx] + 1,
                -1 if weights[idx] > 0 => weights[idx] - 1,
                _ => weights[idx],
            };
            if updated != weights[idx] {
                weights[idx] = updated;
                if let Some(flags) = changed.as_deref_mut() {
                    flags[idx] = true;
                }
            }
        }
    }
    Ok(())
}
