//! Monte Carlo driver: Eb/N0 sweeps, aggregation, coding gains and output.
//!
//! Trial `t` at any Eb/N0 point draws its messages from stream
//! `MESSAGE_STREAM | t` and its channel noise from stream `t` of the
//! configured seed. Every point and every scheme therefore sees the same
//! messages and the same unit-variance noise, scaled to the point's
//! noise level.

mod config;
mod gain;
mod report;

use rayon::prelude::*;

pub use config::{EbN0Sweep, FrameLayout, SimConfig, DEFAULT_KEY_HEX};
pub use gain::{coding_gain, crossing_db, Curve, GainReport};
pub use report::{emit_csv, parse_csv, render_csv, render_manifest, CSV_HEADER};

use crate::ccf::make_sid_block;
use crate::channel::{ChannelParams, RngStream};
use crate::codec::build_trellis;
use crate::error::Result;
use crate::framing::{FrameGeometry, FramePair};
use crate::pipeline::{run_scheme, Link, StageTrace};

/// High bit marking the message stream of a trial.
pub const MESSAGE_STREAM: u64 = 1 << 63;

/// Nominal code rate used for the noise level.
pub const CODE_RATE: f64 = 0.5;

/// Aggregated bit errors of one stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageStat {
    pub errors: u64,
    pub ber: f64,
    /// `sqrt(ber * (1 - ber) / bits)`.
    pub se: f64,
}

impl StageStat {
    pub fn from_counts(errors: u64, bits: u64) -> Self {
        let ber = errors as f64 / bits as f64;
        Self {
            errors,
            ber,
            se: (ber * (1.0 - ber) / bits as f64).sqrt(),
        }
    }

    /// No error was observed, so the BER is only bounded by the bit count.
    pub fn unresolved(&self) -> bool {
        self.errors == 0
    }
}

/// Results at one Eb/N0 point.
#[derive(Debug, Clone, PartialEq)]
pub struct BerRecord {
    pub ebn0_db: f64,
    pub cd1: StageStat,
    pub sid1: Option<StageStat>,
    pub cd2: Option<StageStat>,
    pub sid2: Option<StageStat>,
    pub sid_a_rate: Option<f64>,
    pub sid_b_rate: Option<f64>,
    pub trials: u64,
    /// Information bits over all trials.
    pub bits: u64,
    pub false_accepts: u64,
}

/// A stage column of a [`BerRecord`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Cd1,
    Sid1,
    Cd2,
    Sid2,
}

impl Stage {
    pub const ALL: [Stage; 4] = [Stage::Cd1, Stage::Sid1, Stage::Cd2, Stage::Sid2];

    pub fn column(&self) -> &'static str {
        match self {
            Stage::Cd1 => "ber_cd1",
            Stage::Sid1 => "ber_1sid",
            Stage::Cd2 => "ber_cd2",
            Stage::Sid2 => "ber_2sid",
        }
    }

    pub fn from_column(name: &str) -> Option<Stage> {
        Stage::ALL.into_iter().find(|s| s.column() == name)
    }
}

impl BerRecord {
    pub fn stage(&self, stage: Stage) -> Option<&StageStat> {
        match stage {
            Stage::Cd1 => Some(&self.cd1),
            Stage::Sid1 => self.sid1.as_ref(),
            Stage::Cd2 => self.cd2.as_ref(),
            Stage::Sid2 => self.sid2.as_ref(),
        }
    }
}

/// The BER curve of one stage over a sweep.
pub fn stage_curve(id: impl Into<String>, records: &[BerRecord], stage: Stage) -> Curve {
    Curve::new(
        id,
        records
            .iter()
            .filter_map(|r| r.stage(stage).map(|s| (r.ebn0_db, s.ber)))
            .collect(),
    )
}

/// Sums per-trial traces into a record.
pub fn aggregate(ebn0_db: f64, traces: &[StageTrace]) -> BerRecord {
    let bits: u64 = traces.iter().map(|t| t.bits_total as u64).sum();
    let trials = traces.len() as u64;
    let stage = |f: &dyn Fn(&StageTrace) -> Option<usize>| -> Option<StageStat> {
        let mut total = 0u64;
        for t in traces {
            total += f(t)? as u64;
        }
        Some(StageStat::from_counts(total, bits))
    };
    let rate = |f: &dyn Fn(&StageTrace) -> bool| {
        traces.iter().filter(|t| f(t)).count() as f64 / trials as f64
    };
    let has_sid = traces.iter().all(|t| t.errors_1sid.is_some());
    BerRecord {
        ebn0_db,
        cd1: StageStat::from_counts(traces.iter().map(|t| t.errors_cd1 as u64).sum(), bits),
        sid1: stage(&|t| t.errors_1sid),
        cd2: stage(&|t| t.errors_cd2),
        sid2: stage(&|t| t.errors_2sid),
        sid_a_rate: has_sid.then(|| rate(&|t| t.sid_a_success)),
        sid_b_rate: has_sid.then(|| rate(&|t| t.sid_b_success)),
        trials,
        bits,
        false_accepts: traces.iter().filter(|t| t.false_accept).count() as u64,
    }
}

/// One frame with fresh uniform messages for trial `trial`.
pub fn trial_frame(cfg: &SimConfig, geometry: FrameGeometry, trial: u64) -> Result<FramePair> {
    let mut rng = RngStream::new(cfg.seed, MESSAGE_STREAM | trial);
    let l = &cfg.layout;
    let ma = rng.bits(l.msg_bits_a);
    let mb = rng.bits(l.msg_bits_b);
    FramePair::from_blocks(
        make_sid_block(&ma, &cfg.key, l.tag_bits_a)?,
        make_sid_block(&mb, &cfg.key, l.tag_bits_b)?,
        geometry,
    )
}

/// Runs every trial at one point and returns the per-trial traces in
/// trial order.
pub fn simulate_traces(cfg: &SimConfig, ebn0_db: f64) -> Result<Vec<StageTrace>> {
    cfg.validate()?;
    let geometry = cfg.layout.geometry()?;
    let link = Link::new(
        build_trellis(cfg.code),
        ChannelParams::new(ebn0_db, CODE_RATE)?,
    );
    (0..cfg.trials as u64)
        .into_par_iter()
        .map(|t| {
            let frame = trial_frame(cfg, geometry, t)?;
            let mut noise = RngStream::new(cfg.seed, t);
            run_scheme(cfg.scheme, &frame, &link, &cfg.key, &cfg.sid, &mut noise)
        })
        .collect()
}

pub fn simulate_point(cfg: &SimConfig, ebn0_db: f64) -> Result<BerRecord> {
    Ok(aggregate(ebn0_db, &simulate_traces(cfg, ebn0_db)?))
}

/// One record per sweep point, ascending in Eb/N0.
pub fn sweep(cfg: &SimConfig) -> Result<Vec<BerRecord>> {
    cfg.validate()?;
    cfg.sweep
        .points()
        .into_iter()
        .map(|db| simulate_point(cfg, db))
        .collect()
}

/// Gains of every later stage over `cd1` at `target_ber`, where bracketed.
pub fn stage_gains(records: &[BerRecord], target_ber: f64) -> Vec<GainReport> {
    let reference = stage_curve("cd1", records, Stage::Cd1);
    [Stage::Sid1, Stage::Cd2, Stage::Sid2]
        .into_iter()
        .filter_map(|s| {
            let test = stage_curve(&s.column()[4..], records, s);
            coding_gain(&reference, &test, target_ber).ok()
        })
        .collect()
}
