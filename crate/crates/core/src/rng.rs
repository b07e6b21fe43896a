//! Deterministic, counter-based random number generation.
//!
//! Every stochastic choice in this crate flows from a single 64-bit seed
//! through one fixed key-derivation scheme, so a run is bit-reproducible from
//! its seed alone. The scheme is part of the on-disk compatibility contract
//! (model files store raw projection stream seeds) and must not change:
//!
//! * `mix` is the SplitMix64 finalizer.
//! * `StreamKey::root(seed) = mix(seed ^ ROOT_SALT)`
//! * `key.child(tag) = mix(key ^ mix(tag ^ CHILD_SALT))`
//! * `DetRng` drawing from a key is plain SplitMix64: the internal counter
//!   starts at the key value and advances by the golden-ratio increment
//!   before each `mix`.
//!
//! Subsystems take disjoint [`domain`] tags off the root key, and anything
//! that needs per-item streams (one per synapse, per sample, per epoch, ...)
//! derives one child per item index. Distinct keys yield statistically
//! independent streams, which is what makes per-synapse weight updates safe
//! to reorder or parallelize without changing results.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const ROOT_SALT: u64 = 0xA5A5_0F0F_3C3C_9696;
const CHILD_SALT: u64 = 0x6336_9F8A_1D2B_C4E7;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Tags separating the independent stream families drawn from one root seed.
pub mod domain {
    /// Sparse ternary projection matrix entries.
    pub const PROJECTION: u64 = 1;
    /// Initial synaptic weights.
    pub const WEIGHTS: u64 = 2;
    /// Per-epoch presentation-order shuffles.
    pub const SHUFFLE: u64 = 3;
    /// Per-sample plasticity draws.
    pub const STDP: u64 = 4;
    /// Synthetic dataset generation.
    pub const SYNTH: u64 = 5;
    /// K-means baseline restarts.
    pub const KMEANS: u64 = 6;
}

/// Identifier of one deterministic random stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StreamKey(u64);

impl StreamKey {
    /// Entry point: the stream family of a user-supplied seed.
    pub fn root(seed: u64) -> Self {
        StreamKey(mix(seed ^ ROOT_SALT))
    }

    /// Derive the independent sub-stream identified by `tag`.
    pub fn child(self, tag: u64) -> Self {
        StreamKey(mix(self.0 ^ mix(tag ^ CHILD_SALT)))
    }

    /// Raw key value, e.g. for persisting a derived seed in a model file.
    pub fn as_u64(self) -> u64 {
        self.0
    }

    /// Generator positioned at the start of this stream.
    pub fn rng(self) -> DetRng {
        DetRng { state: self.0 }
    }
}

/// SplitMix64 generator positioned at a [`StreamKey`].
#[derive(Clone, Debug)]
pub struct DetRng {
    state: u64,
}

impl DetRng {
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix(self.state)
    }

    /// Uniform in [0, 1) with 53 random mantissa bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// One Bernoulli draw. Exact for dyadic-rational `p`.
    pub fn bernoulli(&mut self, p: f64) -> bool {
        if p >= 1.0 {
            return true;
        }
        if p <= 0.0 {
            return false;
        }
        self.next_f64() < p
    }

    /// Unbiased integer in [0, n). `n` must be nonzero.
    pub fn uniform(&mut self, n: u64) -> u64 {
        assert!(n > 0, "uniform(0) is undefined");
        // Lemire multiply-shift with rejection of the biased low zone.
        let threshold = n.wrapping_neg() % n;
        loop {
            let m = u128::from(self.next_u64()) * u128::from(n);
            if (m as u64) >= threshold {
                return (m >> 64) as u64;
            }
        }
    }

    /// Standard normal via Box-Muller (two uniform draws per call).
    pub fn gaussian(&mut self) -> f64 {
        let mut u1 = self.next_f64();
        if u1 <= 0.0 {
            u1 = 1.0 / (1u64 << 53) as f64;
        }
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// In-place Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.uniform(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}
