//! Seedable bit-corruption channels.
//!
//! Randomness comes from SplitMix64, reproduced here bit-exactly so that any
//! implementation can regenerate the same corruption pattern from a seed:
//!
//! ```text
//! state  = state + 0x9E3779B97F4A7C15          (wrapping)
//! z      = state
//! z      = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 (wrapping)
//! z      = (z ^ (z >> 27)) * 0x94D049BB133111EB (wrapping)
//! output = z ^ (z >> 31)
//! ```
//!
//! The initial state is the seed. A uniform draw is `(output >> 11) * 2^-53`,
//! in `[0, 1)`. Bits are visited in stream order (byte order, MSB first).
//!
//! * BSC: one draw per bit; the bit flips when the draw is `< p`.
//! * Burst: one draw per visited position; when the draw is `< burst_rate`,
//!   `burst_len` consecutive bits flip (clamped at the end) and the walk
//!   resumes after them, otherwise it advances by one bit.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ChannelError {
    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),
    #[error("burst length must be at least 1")]
    ZeroBurstLength,
}

/// SplitMix64 generator.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelKind {
    /// Binary symmetric channel with per-bit flip probability.
    Bsc { p: f64 },
    /// Fixed-length bursts starting at each position with probability `rate`.
    Burst { rate: f64, len: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelModel {
    kind: ChannelKind,
    seed: u64,
}

fn check_probability(p: f64) -> Result<(), ChannelError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(ChannelError::InvalidProbability(p))
    }
}

impl ChannelModel {
    pub fn bsc(p: f64, seed: u64) -> Result<Self, ChannelError> {
        check_probability(p)?;
        Ok(ChannelModel {
            kind: ChannelKind::Bsc { p },
            seed,
        })
    }

    pub fn burst(rate: f64, len: usize, seed: u64) -> Result<Self, ChannelError> {
        check_probability(rate)?;
        if len == 0 {
            return Err(ChannelError::ZeroBurstLength);
        }
        Ok(ChannelModel {
            kind: ChannelKind::Burst { rate, len },
            seed,
        })
    }

    pub fn noiseless() -> Self {
        ChannelModel {
            kind: ChannelKind::Bsc { p: 0.0 },
            seed: 0,
        }
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn with_seed(self, seed: u64) -> Self {
        ChannelModel { seed, ..self }
    }

    /// Calls `flip` with each corrupted bit index in increasing order.
    fn for_each_flip(&self, len: usize, mut flip: impl FnMut(usize)) {
        let mut rng = SplitMix64::new(self.seed);
        match self.kind {
            ChannelKind::Bsc { p } => {
                for i in 0..len {
                    if rng.next_f64() < p {
                        flip(i);
                    }
                }
            }
            ChannelKind::Burst { rate, len: burst } => {
                let mut i = 0;
                while i < len {
                    if rng.next_f64() < rate {
                        (i..(i + burst).min(len)).for_each(&mut flip);
                        i += burst;
                    } else {
                        i += 1;
                    }
                }
            }
        }
    }

    pub fn transmit(&self, bits: &[bool]) -> Vec<bool> {
        let mut out = bits.to_vec();
        self.for_each_flip(out.len(), |i| out[i] ^= true);
        out
    }

    /// Same corruption as [`ChannelModel::transmit`] on the MSB-first bit view.
    pub fn transmit_bytes(&self, bytes: &[u8]) -> Vec<u8> {
        let mut out = bytes.to_vec();
        self.for_each_flip(out.len() * 8, |i| out[i / 8] ^= 0x80 >> (i % 8));
        out
    }
}
