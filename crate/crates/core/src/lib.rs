//! Soft input decryption (SID) with iterative feedback, simulated over a
//! BPSK/AWGN link protected by a rate-1/2 convolutional code.
//!
//! A frame carries two blocks, each a message followed by a truncated HMAC.
//! The blocks are interleaved, encoded, sent and decoded with a BCJR
//! decoder. SID then tries to repair each block by flipping its least
//! reliable bits until the HMAC verifies, and a verified block is fed back
//! to the decoder as pinned a-priori knowledge for a second decoding pass.
//!
//! The modules build on each other:
//!
//! * [`codec`]: trellis, encoder and log-domain BCJR decoder.
//! * [`channel`]: BPSK, AWGN noise and channel L-values.
//! * [`ccf`]: check values and SID blocks.
//! * [`sid`]: the least-reliable-bits search.
//! * [`framing`]: block interleaving.
//! * [`pipeline`]: baseline, feedback, serial and parallel trials.
//! * [`harness`]: sweeps, BER records, coding gains and CSV output.
//!
//! ```
//! use sidlab::harness::{simulate_point, FrameLayout, SimConfig};
//! use sidlab::pipeline::Scheme;
//!
//! let cfg = SimConfig {
//!     scheme: Scheme::Serial,
//!     trials: 20,
//!     layout: FrameLayout::symmetric(128, 64),
//!     ..SimConfig::default()
//! };
//! let record = simulate_point(&cfg, 3.0).unwrap();
//! assert!(record.sid2.unwrap().ber <= record.cd1.ber);
//! ```

pub mod ccf;
pub mod channel;
pub mod codec;
pub mod error;
pub mod framing;
pub mod harness;
pub mod pipeline;
pub mod sid;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/codec.md")]
    mod codec {}
    #[doc = include_str!("../../../book/src/channel.md")]
    mod channel {}
    #[doc = include_str!("../../../book/src/check-values.md")]
    mod check_values {}
    #[doc = include_str!("../../../book/src/sid.md")]
    mod sid {}
    #[doc = include_str!("../../../book/src/framing.md")]
    mod framing {}
    #[doc = include_str!("../../../book/src/schemes.md")]
    mod schemes {}
    #[doc = include_str!("../../../book/src/harness.md")]
    mod harness {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
