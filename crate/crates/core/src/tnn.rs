//! A single winner-take-all column of ramp-no-leak integrate-and-fire
//! neurons operating on integer spike times.
//!
//! Forward semantics are defined by stepped evaluation: the membrane
//! potential is examined at integer times `t = 0 .. t_max-1` and the neuron's
//! raw spike time is the first `t` whose potential reaches the threshold
//! (`t_max` = never spiked). Lateral inhibition then lets only the earliest
//! raw spike propagate, ties falling to the lowest neuron index; if nothing
//! spiked, the winner is the neuron with the highest end-of-window potential
//! (again lowest index on ties) and every propagated time stays `t_max`.

use std::io::{BufRead, Write};

use crate::encoding::SpikeVector;
use crate::error::{Error, Result};
use crate::rng::StreamKey;
use crate::{SpikeTime, Weight};

/// Ramp-no-leak response of one synapse: no effect before the input spike,
/// then a unit-slope ramp capped at the weight.
#[inline]
pub fn response(t: i64, weight: Weight) -> u64 {
    if t < 0 {
        0
    } else if t < i64::from(weight) {
        t as u64
    } else {
        u64::from(weight)
    }
}

/// Weight matrix plus firing parameters of one WTA column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TnnColumn {
    num_neurons: usize,
    num_synapses: usize,
    /// Row-major: weight of (neuron k, synapse j) at `k * num_synapses + j`.
    weights: Vec<Weight>,
    pub theta: u32,
    pub t_max: SpikeTime,
    pub w_max: Weight,
}

/// Everything the forward pass observed for one sample.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForwardResult {
    /// Per-neuron spike time before lateral inhibition (`t_max` = silent).
    pub raw_times: Vec<SpikeTime>,
    /// Per-neuron spike time after 1-WTA: only the winner keeps a finite
    /// time, and only if it actually spiked.
    pub wta_times: Vec<SpikeTime>,
    pub winner: usize,
    /// Membrane potential of each neuron at `t_max - 1`.
    pub potentials_at_end: Vec<u64>,
}

impl TnnColumn {
    fn check_params(
        num_neurons: usize,
        num_synapses: usize,
        theta: u32,
        t_max: SpikeTime,
        w_max: Weight,
    ) -> Result<()> {
        if num_neurons == 0 || num_synapses == 0 {
            return Err(Error::Shape(format!(
                "column must have neurons and synapses, got {num_neurons}x{num_synapses}"
            )));
        }
        if t_max == 0 {
            return Err(Error::Config("t_max must be positive".into()));
        }
        if theta == 0 {
            return Err(Error::Config("theta must be positive".into()));
        }
        if w_max == 0 {
            return Err(Error::Config("w_max must be positive".into()));
        }
        Ok(())
    }

    /// Column with every weight zero.
    pub fn new(
        num_neurons: usize,
        num_synapses: usize,
        theta: u32,
        t_max: SpikeTime,
        w_max: Weight,
    ) -> Result<TnnColumn> {
        Self::check_params(num_neurons, num_synapses, theta, t_max, w_max)?;
        Ok(TnnColumn {
            num_neurons,
            num_synapses,
            weights: vec![0; num_neurons * num_synapses],
            theta,
            t_max,
            w_max,
        })
    }

    /// Column with weights drawn uniformly from `0..=w_max`.
    pub fn with_random_weights(
        num_neurons: usize,
        num_synapses: usize,
        theta: u32,
        t_max: SpikeTime,
        w_max: Weight,
        key: StreamKey,
    ) -> Result<TnnColumn> {
        let mut col = Self::new(num_neurons, num_synapses, theta, t_max, w_max)?;
        let mut rng = key.rng();
        for w in &mut col.weights {
            *w = rng.uniform(u64::from(w_max) + 1) as Weight;
        }
        Ok(col)
    }

    /// Column from an existing weight matrix (e.g. a parsed snapshot).
    pub fn from_weights(
        num_neurons: usize,
        weights: Vec<Weight>,
        theta: u32,
        t_max: SpikeTime,
        w_max: Weight,
    ) -> Result<TnnColumn> {
        if num_neurons == 0 || !weights.len().is_multiple_of(num_neurons) {
            return Err(Error::Shape(format!(
                "{} weights do not divide into {num_neurons} neurons",
                weights.len()
            )));
        }
        let num_synapses = weights.len() / num_neurons;
        Self::check_params(num_neurons, num_synapses, theta, t_max, w_max)?;
        if let Some(w) = weights.iter().find(|&&w| w > w_max) {
            return Err(Error::ModelFile(format!(
                "weight {w} exceeds w_max {w_max}"
            )));
        }
        Ok(TnnColumn {
            num_neurons,
            num_synapses,
            weights,
            theta,
            t_max,
            w_max,
        })
    }

    pub fn num_neurons(&self) -> usize {
        self.num_neurons
    }

    pub fn num_synapses(&self) -> usize {
        self.num_synapses
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    pub(crate) fn weights_mut(&mut self) -> &mut [Weight] {
        &mut self.weights
    }

    pub fn weight(&self, neuron: usize, synapse: usize) -> Weight {
        self.weights[neuron * self.num_synapses + synapse]
    }

    /// Membrane potential of `neuron` at integer time `t` for the given
    /// input spikes. Sentinel inputs (`t_in = t_max`) contribute nothing at
    /// any evaluated time.
    pub fn potential(&self, neuron: usize, spikes: &SpikeVector, t: i64) -> u64 {
        let row = &self.weights[neuron * self.num_synapses..(neuron + 1) * self.num_synapses];
        row.iter()
            .zip(&spikes.times)
            .map(|(&w, &t_in)| response(t - i64::from(t_in), w))
            .sum()
    }

    /// Stepped forward pass plus lateral inhibition. Pure: two calls with the
    /// same inputs return the same result.
    pub fn forward(&self, spikes: &SpikeVector) -> Result<ForwardResult> {
        if spikes.len() != self.num_synapses {
            return Err(Error::Shape(format!(
                "spike vector length {} does not match {} synapses",
                spikes.len(),
                self.num_synapses
            )));
        }
        let t_max = self.t_max;
        let mut raw_times = Vec::with_capacity(self.num_neurons);
        let mut potentials_at_end = Vec::with_capacity(self.num_neurons);
        for k in 0..self.num_neurons {
            let mut raw = t_max;
            for t in 0..i64::from(t_max) {
                if self.potential(k, spikes, t) >= u64::from(self.theta) {
                    raw = t as SpikeTime;
                    break;
                }
            }
            raw_times.push(raw);
            potentials_at_end.push(self.potential(k, spikes, i64::from(t_max) - 1));
        }

        let earliest = *raw_times.iter().min().expect("column has neurons");
        let mut wta_times = vec![t_max; self.num_neurons];
        let winner = if earliest < t_max {
            let w = raw_times.iter().position(|&t| t == earliest).unwrap();
            wta_times[w] = earliest;
            w
        } else {
            let best = *potentials_at_end.iter().max().unwrap();
            potentials_at_end.iter().position(|&v| v == best).unwrap()
        };
        Ok(ForwardResult {
            raw_times,
            wta_times,
            winner,
            potentials_at_end,
        })
    }

    /// Plain-text snapshot: a header line `column C S theta t_max w_max`
    /// followed by one row of S weights per neuron.
    pub fn write_snapshot<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(
            out,
            "column {} {} {} {} {}",
            self.num_neurons, self.num_synapses, self.theta, self.t_max, self.w_max
        )?;
        for k in 0..self.num_neurons {
            let row = &self.weights[k * self.num_synapses..(k + 1) * self.num_synapses];
            let line: Vec<String> = row.iter().map(|w| w.to_string()).collect();
            writeln!(out, "{}", line.join(" "))?;
        }
        Ok(())
    }

    pub fn read_snapshot<R: BufRead>(input: &mut R) -> Result<TnnColumn> {
        let mut header = String::new();
        if input.read_line(&mut header)? == 0 {
            return Err(Error::ModelFile("missing column header".into()));
        }
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() != 6 || parts[0] != "column" {
            return Err(Error::ModelFile(format!(
                "bad column header `{}`",
                header.trim_end()
            )));
        }
        let parse = |s: &str, what: &str| -> Result<u64> {
            s.parse()
                .map_err(|_| Error::ModelFile(format!("bad {what} `{s}` in column header")))
        };
        let num_neurons = parse(parts[1], "neuron count")? as usize;
        let num_synapses = parse(parts[2], "synapse count")? as usize;
        let theta = parse(parts[3], "theta")? as u32;
        let t_max = parse(parts[4], "t_max")? as SpikeTime;
        let w_max = parse(parts[5], "w_max")? as Weight;
        let mut weights = Vec::with_capacity(num_neurons * num_synapses);
        for k in 0..num_neurons {
            let mut line = String::new();
            if input.read_line(&mut line)? == 0 {
                return Err(Error::ModelFile(format!("missing weight row {k}")));
            }
            for tok in line.split_whitespace() {
                let w: u64 = tok
                    .parse()
                    .map_err(|_| Error::ModelFile(format!("bad weight `{tok}` in row {k}")))?;
                if w > u64::from(Weight::MAX) {
                    return Err(Error::ModelFile(format!(
                        "weight {w} out of range in row {k}"
                    )));
                }
                weights.push(w as Weight);
            }
            if weights.len() != (k + 1) * num_synapses {
                return Err(Error::ModelFile(format!(
                    "weight row {k} has {} values, expected {num_synapses}",
                    weights.len() - k * num_synapses
                )));
            }
        }
        TnnColumn::from_weights(num_neurons, weights, theta, t_max, w_max)
    }
}

/// Cluster assignment of one forward pass: the winning neuron's index and
/// its propagated spike time (`t_max` when the sample produced no spike —
/// lower is more confident).
pub fn assign_cluster(result: &ForwardResult) -> (usize, SpikeTime) {
    (result.winner, result.wta_times[result.winner])
}
