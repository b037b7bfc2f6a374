//! BPSK over AWGN, with reproducible per-trial noise streams.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Human-readable identity of the generator behind [`RngStream`].
pub const RNG_ALGORITHM: &str =
    "ChaCha12 (rand_chacha 0.9), seed_from_u64(seed), set_stream(stream_id)";

/// Noise level of the AWGN channel for a coded BPSK link.
///
/// Eb is information-bit energy: `sigma^2 = 1 / (2 R Eb/N0)` with the
/// nominal code rate `R`, and the channel reliability is `lc = 2 / sigma^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    ebn0_db: f64,
    code_rate: f64,
    noise_variance: f64,
    lc: f64,
}

impl ChannelParams {
    pub fn new(ebn0_db: f64, code_rate: f64) -> Result<Self> {
        if !ebn0_db.is_finite() {
            return Err(Error::InvalidChannel(format!(
                "Eb/N0 must be finite, got {ebn0_db}"
            )));
        }
        if !(code_rate > 0.0 && code_rate <= 1.0) {
            return Err(Error::InvalidChannel(format!(
                "code rate must be in (0, 1], got {code_rate}"
            )));
        }
        let ebn0 = 10f64.powf(ebn0_db / 10.0);
        let noise_variance = 1.0 / (2.0 * code_rate * ebn0);
        let lc = 4.0 * code_rate * ebn0;
        if !(noise_variance > 0.0 && noise_variance.is_finite() && lc.is_finite()) {
            return Err(Error::InvalidChannel(format!(
                "Eb/N0 of {ebn0_db} dB gives a degenerate noise variance"
            )));
        }
        Ok(Self {
            ebn0_db,
            code_rate,
            noise_variance,
            lc,
        })
    }

    /// Rate-1/2 link at the given Eb/N0.
    pub fn half_rate(ebn0_db: f64) -> Result<Self> {
        Self::new(ebn0_db, 0.5)
    }

    pub fn ebn0_db(&self) -> f64 {
        self.ebn0_db
    }

    pub fn code_rate(&self) -> f64 {
        self.code_rate
    }

    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }

    pub fn sigma(&self) -> f64 {
        self.noise_variance.sqrt()
    }

    pub fn lc(&self) -> f64 {
        self.lc
    }
}

/// A seeded, independently addressable random stream.
///
/// Each `(seed, stream_id)` pair selects a distinct ChaCha12 stream, so
/// trials can run in any order or on any thread and still see the same
/// numbers.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha12Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform random bits.
    pub fn bits(&mut self, len: usize) -> Vec<u8> {
        let mut out = Vec::with_capacity(len);
        while out.len() < len {
            let word = self.rng.next_u64();
            let take = (len - out.len()).min(64);
            out.extend((0..take).map(|j| ((word >> j) & 1) as u8));
        }
        out
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Maps bit 0 to `+1.0` and bit 1 to `-1.0`.
pub fn modulate(bits: &[u8]) -> Vec<f64> {
    bits.iter()
        .map(|&b| if b & 1 == 0 { 1.0 } else { -1.0 })
        .collect()
}

/// Adds i.i.d. zero-mean Gaussian noise of variance `params.noise_variance()`.
pub fn transmit(symbols: &[f64], params: &ChannelParams, rng: &mut RngStream) -> Vec<f64> {
    let sigma = params.sigma();
    symbols
        .iter()
        .map(|&x| {
            let n: f64 = StandardNormal.sample(rng);
            x + sigma * n
        })
        .collect()
}

/// Exact BPSK/AWGN L-values, `lc * y`.
pub fn channel_llr(received: &[f64], params: &ChannelParams) -> Vec<f64> {
    received.iter().map(|&y| params.lc * y).collect()
}
