//! Per-trial experiment schemes.
//!
//! Every scheme starts the same way: the joint message is encoded,
//! sent over the AWGN channel and decoded once (stage `cd1`). From there:
//!
//! * `baseline` stops.
//! * `feedback` runs SID on block a; on success the corrected bits are fed
//!   back as pinned priors and the frame is decoded again (`1sid`, `cd2`).
//! * `serial` continues with SID on the re-decoded block b (`2sid`).
//! * `parallel` runs SID on both blocks after the first decoding and feeds
//!   back from whichever verified; if both verified the frame is done.
//!
//! Error counts are taken over the whole frame against the transmitted
//! bits, so a block that verified but differs from the truth still counts.

use std::fmt;
use std::str::FromStr;

use crate::ccf::{CcfKey, SidBlock};
use crate::channel::{channel_llr, modulate, transmit, ChannelParams, RngStream};
use crate::codec::{SoftWord, Trellis};
use crate::error::{Error, Result};
use crate::framing::{deinterleave, interleave, FrameGeometry, FramePair};
use crate::sid::{soft_input_decrypt, SidConfig, SidResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Baseline,
    Feedback,
    Serial,
    Parallel,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [
        Scheme::Baseline,
        Scheme::Feedback,
        Scheme::Serial,
        Scheme::Parallel,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::Baseline => "baseline",
            Scheme::Feedback => "feedback",
            Scheme::Serial => "serial",
            Scheme::Parallel => "parallel",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|scheme| scheme.as_str() == s)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown scheme `{s}` (expected baseline, feedback, serial or parallel)"
                ))
            })
    }
}

/// Which block of a frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    A,
    B,
}

impl Branch {
    pub fn other(self) -> Branch {
        match self {
            Branch::A => Branch::B,
            Branch::B => Branch::A,
        }
    }
}

/// Bit errors after each stage of one trial.
///
/// Stages a scheme does not define are `None`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageTrace {
    pub scheme: Scheme,
    pub bits_total: usize,
    pub errors_cd1: usize,
    pub errors_1sid: Option<usize>,
    pub errors_cd2: Option<usize>,
    pub errors_2sid: Option<usize>,
    pub sid_a_success: bool,
    pub sid_b_success: bool,
    /// A second decoding with fed-back priors took place.
    pub redecoded: bool,
    /// Some block verified yet differs from what was sent.
    pub false_accept: bool,
}

/// Code and channel shared by all trials at one operating point.
#[derive(Debug, Clone)]
pub struct Link {
    pub trellis: Trellis,
    pub channel: ChannelParams,
}

impl Link {
    pub fn new(trellis: Trellis, channel: ChannelParams) -> Self {
        Self { trellis, channel }
    }
}

/// A-priori L-values over the joint message that pin the bits of
/// `corrected` (block `which`) and leave the other block uninformed.
pub fn feedback_llrs(corrected: &SidBlock, which: Branch, g: &FrameGeometry) -> Result<Vec<f64>> {
    let pinned: Vec<f64> = corrected
        .to_bits()
        .iter()
        .map(|&b| {
            if b == 0 {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect();
    match which {
        Branch::A => interleave(&pinned, &vec![0.0; g.len_b()], g),
        Branch::B => interleave(&vec![0.0; g.len_a()], &pinned, g),
    }
}

fn hamming(x: &[u8], y: &[u8]) -> usize {
    x.iter().zip(y).filter(|(a, b)| a != b).count()
}

/// Decoder output split into the two blocks.
struct Decoded {
    joint: SoftWord,
    a: SoftWord,
    b: SoftWord,
}

impl Decoded {
    fn block(&self, which: Branch) -> &SoftWord {
        match which {
            Branch::A => &self.a,
            Branch::B => &self.b,
        }
    }
}

/// State shared by the stages of one trial.
struct Trial<'a> {
    frame: &'a FramePair,
    link: &'a Link,
    key: &'a CcfKey,
    cfg: &'a SidConfig,
    truth_u: Vec<u8>,
    truth_a: Vec<u8>,
    truth_b: Vec<u8>,
    channel_llr: Vec<f64>,
}

impl<'a> Trial<'a> {
    fn transmit(
        frame: &'a FramePair,
        link: &'a Link,
        key: &'a CcfKey,
        cfg: &'a SidConfig,
        rng: &mut RngStream,
    ) -> Result<Self> {
        let truth_u = frame.joint_bits();
        let coded = link.trellis.encode(&truth_u)?;
        let received = transmit(&modulate(&coded), &link.channel, rng);
        Ok(Self {
            frame,
            link,
            key,
            cfg,
            truth_a: frame.block_a.to_bits(),
            truth_b: frame.block_b.to_bits(),
            truth_u,
            channel_llr: channel_llr(&received, &link.channel),
        })
    }

    fn decode(&self, prior: &[f64]) -> Result<Decoded> {
        let joint = self.link.trellis.decode_map(&self.channel_llr, prior)?;
        let (a, b) = deinterleave(joint.llr(), &self.frame.geometry)?;
        Ok(Decoded {
            joint,
            a: SoftWord::from_llr(a),
            b: SoftWord::from_llr(b),
        })
    }

    fn first_decode(&self) -> Result<Decoded> {
        self.decode(&vec![0.0; self.truth_u.len()])
    }

    fn sid(&self, word: &SoftWord, which: Branch) -> Result<SidResult> {
        let tag_bits = match which {
            Branch::A => self.frame.block_a.tag().len(),
            Branch::B => self.frame.block_b.tag().len(),
        };
        soft_input_decrypt(word, self.key, tag_bits, self.cfg)
    }

    fn truth(&self, which: Branch) -> &[u8] {
        match which {
            Branch::A => &self.truth_a,
            Branch::B => &self.truth_b,
        }
    }

    fn errors_in(&self, which: Branch, bits: &[u8]) -> usize {
        hamming(bits, self.truth(which))
    }

    fn errors_total(&self, word: &SoftWord) -> usize {
        hamming(word.bits(), &self.truth_u)
    }

    fn trace(&self, scheme: Scheme, errors_cd1: usize) -> StageTrace {
        StageTrace {
            scheme,
            bits_total: self.truth_u.len(),
            errors_cd1,
            errors_1sid: None,
            errors_cd2: None,
            errors_2sid: None,
            sid_a_success: false,
            sid_b_success: false,
            redecoded: false,
            false_accept: false,
        }
    }

    /// Feeds back the verified block `from`, decodes again and optionally
    /// runs SID on the other block. Fills `1sid`, `cd2` and `2sid`.
    fn feedback_branch(
        &self,
        trace: &mut StageTrace,
        first: &Decoded,
        from: Branch,
        corrected: &SidBlock,
        third_step: bool,
    ) -> Result<()> {
        let other = from.other();
        let corrected_bits = corrected.to_bits();
        let corrected_errors = self.errors_in(from, &corrected_bits);
        trace.false_accept |= corrected_errors > 0;
        trace.errors_1sid =
            Some(corrected_errors + self.errors_in(other, first.block(other).bits()));

        let prior = feedback_llrs(corrected, from, &self.frame.geometry)?;
        let second = self.decode(&prior)?;
        trace.redecoded = true;
        let cd2 = self.errors_total(&second.joint);
        trace.errors_cd2 = Some(cd2);

        if third_step {
            let res = self.sid(second.block(other), other)?;
            trace.errors_2sid = Some(match &res.corrected {
                Some(block) => {
                    set_success(trace, other);
                    let errs = self.errors_in(other, &block.to_bits());
                    trace.false_accept |= errs > 0;
                    corrected_errors + errs
                }
                None => cd2,
            });
        }
        Ok(())
    }
}

fn set_success(trace: &mut StageTrace, which: Branch) {
    match which {
        Branch::A => trace.sid_a_success = true,
        Branch::B => trace.sid_b_success = true,
    }
}

/// Channel decoding only.
pub fn run_baseline(
    frame: &FramePair,
    link: &Link,
    key: &CcfKey,
    cfg: &SidConfig,
    rng: &mut RngStream,
) -> Result<StageTrace> {
    let trial = Trial::transmit(frame, link, key, cfg, rng)?;
    let first = trial.first_decode()?;
    Ok(trial.trace(Scheme::Baseline, trial.errors_total(&first.joint)))
}

fn run_a_first(
    scheme: Scheme,
    frame: &FramePair,
    link: &Link,
    key: &CcfKey,
    cfg: &SidConfig,
    rng: &mut RngStream,
) -> Result<StageTrace> {
    let trial = Trial::transmit(frame, link, key, cfg, rng)?;
    let first = trial.first_decode()?;
    let cd1 = trial.errors_total(&first.joint);
    let mut trace = trial.trace(scheme, cd1);
    let third_step = scheme == Scheme::Serial;

    let res = trial.sid(&first.a, Branch::A)?;
    match &res.corrected {
        Some(block) => {
            trace.sid_a_success = true;
            trial.feedback_branch(&mut trace, &first, Branch::A, block, third_step)?;
        }
        None => {
            trace.errors_1sid = Some(cd1);
            trace.errors_cd2 = Some(cd1);
            if third_step {
                trace.errors_2sid = Some(cd1);
            }
        }
    }
    Ok(trace)
}

/// SID on block a, then a second decoding with block a pinned.
pub fn run_feedback(
    frame: &FramePair,
    link: &Link,
    key: &CcfKey,
    cfg: &SidConfig,
    rng: &mut RngStream,
) -> Result<StageTrace> {
    run_a_first(Scheme::Feedback, frame, link, key, cfg, rng)
}

/// Feedback followed by SID on the re-decoded block b.
pub fn run_serial(
    frame: &FramePair,
    link: &Link,
    key: &CcfKey,
    cfg: &SidConfig,
    rng: &mut RngStream,
) -> Result<StageTrace> {
    run_a_first(Scheme::Serial, frame, link, key, cfg, rng)
}

/// SID on both blocks, then feedback from the one that verified.
pub fn run_parallel(
    frame: &FramePair,
    link: &Link,
    key: &CcfKey,
    cfg: &SidConfig,
    rng: &mut RngStream,
) -> Result<StageTrace> {
    let trial = Trial::transmit(frame, link, key, cfg, rng)?;
    let first = trial.first_decode()?;
    let cd1 = trial.errors_total(&first.joint);
    let mut trace = trial.trace(Scheme::Parallel, cd1);

    let res_a = trial.sid(&first.a, Branch::A)?;
    let res_b = trial.sid(&first.b, Branch::B)?;
    match (res_a.corrected, res_b.corrected) {
        (Some(a), Some(b)) => {
            trace.sid_a_success = true;
            trace.sid_b_success = true;
            let errs =
                trial.errors_in(Branch::A, &a.to_bits()) + trial.errors_in(Branch::B, &b.to_bits());
            trace.false_accept = errs > 0;
            trace.errors_1sid = Some(errs);
            trace.errors_cd2 = Some(errs);
            trace.errors_2sid = Some(errs);
        }
        (Some(a), None) => {
            trace.sid_a_success = true;
            trial.feedback_branch(&mut trace, &first, Branch::A, &a, true)?;
        }
        (None, Some(b)) => {
            trace.sid_b_success = true;
            trial.feedback_branch(&mut trace, &first, Branch::B, &b, true)?;
        }
        (None, None) => {
            trace.errors_1sid = Some(cd1);
            trace.errors_cd2 = Some(cd1);
            trace.errors_2sid = Some(cd1);
        }
    }
    Ok(trace)
}

pub fn run_scheme(
    scheme: Scheme,
    frame: &FramePair,
    link: &Link,
    key: &CcfKey,
    cfg: &SidConfig,
    rng: &mut RngStream,
) -> Result<StageTrace> {
    match scheme {
        Scheme::Baseline => run_baseline(frame, link, key, cfg, rng),
        Scheme::Feedback => run_feedback(frame, link, key, cfg, rng),
        Scheme::Serial => run_serial(frame, link, key, cfg, rng),
        Scheme::Parallel => run_parallel(frame, link, key, cfg, rng),
    }
}
