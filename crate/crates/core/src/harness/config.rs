//! Simulation configuration and its TOML file form.

use std::path::PathBuf;

use serde::Deserialize;

use crate::ccf::CcfKey;
use crate::codec::CodeSpec;
use crate::error::{Error, Result};
use crate::framing::FrameGeometry;
use crate::pipeline::Scheme;
use crate::sid::SidConfig;

/// Key used when a configuration does not name one.
pub const DEFAULT_KEY_HEX: &str =
    "000102030405060708090a0b0c0d0e0f101112131415161718191a1b1c1d1e1f";

/// Ascending Eb/N0 grid in dB, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EbN0Sweep {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl EbN0Sweep {
    pub fn new(start: f64, stop: f64, step: f64) -> Result<Self> {
        if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
            return Err(Error::Config("sweep bounds must be finite".to_string()));
        }
        if stop < start {
            return Err(Error::Config(format!(
                "sweep stop {stop} is below start {start}"
            )));
        }
        if step <= 0.0 && stop > start {
            return Err(Error::Config(format!(
                "sweep step must be positive, got {step}"
            )));
        }
        Ok(Self { start, stop, step })
    }

    pub fn single(ebn0_db: f64) -> Result<Self> {
        Self::new(ebn0_db, ebn0_db, 1.0)
    }

    /// Parses `START:STOP:STEP`, or a single value.
    pub fn parse(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.split(':').collect();
        let num = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("`{s}` in sweep `{spec}` is not a number")))
        };
        match parts.as_slice() {
            [single] => Self::single(num(single)?),
            [start, stop, step] => Self::new(num(start)?, num(stop)?, num(step)?),
            _ => Err(Error::Config(format!(
                "sweep `{spec}` is not of the form START:STOP:STEP"
            ))),
        }
    }

    pub fn points(&self) -> Vec<f64> {
        if self.stop == self.start {
            return vec![self.start];
        }
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.start + i as f64 * self.step).collect()
    }
}

/// Message and tag lengths of blocks a and b.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameLayout {
    pub msg_bits_a: usize,
    pub tag_bits_a: usize,
    pub msg_bits_b: usize,
    pub tag_bits_b: usize,
    /// Permit block lengths that do not divide.
    pub uneven: bool,
}

impl FrameLayout {
    pub fn new(msg_bits_a: usize, tag_bits_a: usize, msg_bits_b: usize, tag_bits_b: usize) -> Self {
        Self {
            msg_bits_a,
            tag_bits_a,
            msg_bits_b,
            tag_bits_b,
            uneven: false,
        }
    }

    /// Equal blocks of `len` bits each carrying a `tag_bits` check value.
    pub fn symmetric(len: usize, tag_bits: usize) -> Self {
        let m = len.saturating_sub(tag_bits);
        Self::new(m, tag_bits, m, tag_bits)
    }

    pub fn geometry(&self) -> Result<FrameGeometry> {
        let len_a = self.msg_bits_a + self.tag_bits_a;
        let len_b = self.msg_bits_b + self.tag_bits_b;
        if self.uneven {
            FrameGeometry::uneven(len_a, len_b)
        } else {
            FrameGeometry::new(len_a, len_b)
        }
    }
}

impl Default for FrameLayout {
    fn default() -> Self {
        Self::symmetric(320, 64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub code: CodeSpec,
    pub sweep: EbN0Sweep,
    /// Frames per Eb/N0 point.
    pub trials: usize,
    pub layout: FrameLayout,
    pub sid: SidConfig,
    pub scheme: Scheme,
    pub seed: u64,
    pub key: CcfKey,
    pub out: Option<PathBuf>,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            code: CodeSpec::default(),
            sweep: EbN0Sweep {
                start: 0.0,
                stop: 6.0,
                step: 0.5,
            },
            trials: 50_000,
            layout: FrameLayout::default(),
            sid: SidConfig::default(),
            scheme: Scheme::Serial,
            seed: 1,
            key: CcfKey::new(&hex::decode(DEFAULT_KEY_HEX).expect("valid hex"))
                .expect("default key is long enough"),
            out: None,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::Config("trials must be at least 1".to_string()));
        }
        if self.sweep.points().is_empty() {
            return Err(Error::Config("sweep has no points".to_string()));
        }
        self.layout.geometry()?;
        for n in [self.layout.tag_bits_a, self.layout.tag_bits_b] {
            if !(crate::ccf::MIN_TAG_BITS..=crate::ccf::MAX_TAG_BITS).contains(&n) {
                return Err(Error::TagLengthOutOfRange(n));
            }
        }
        Ok(())
    }

    /// Reads the TOML form; absent keys keep their defaults.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        raw.into_config()
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text)
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    scheme: Option<String>,
    seed: Option<u64>,
    trials: Option<usize>,
    ebno: Option<String>,
    ebn0_db: Option<f64>,
    ebn0_start: Option<f64>,
    ebn0_stop: Option<f64>,
    ebn0_step: Option<f64>,
    memory: Option<u32>,
    generators: Option<[String; 2]>,
    terminated: Option<bool>,
    msg_bits_a: Option<usize>,
    msg_bits_b: Option<usize>,
    tag_bits: Option<usize>,
    tag_bits_a: Option<usize>,
    tag_bits_b: Option<usize>,
    uneven_interleave: Option<bool>,
    flip_budget: Option<u32>,
    key_hex: Option<String>,
    out: Option<PathBuf>,
}

impl RawConfig {
    fn into_config(self) -> Result<SimConfig> {
        let mut cfg = SimConfig::default();
        if let Some(s) = self.scheme {
            cfg.scheme = s.parse()?;
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(trials) = self.trials {
            cfg.trials = trials;
        }

        let range_keys = [self.ebn0_start, self.ebn0_stop, self.ebn0_step];
        let given = [
            self.ebno.is_some(),
            self.ebn0_db.is_some(),
            range_keys.iter().any(Option::is_some),
        ];
        if given.iter().filter(|&&g| g).count() > 1 {
            return Err(Error::Config(
                "give the sweep as one of `ebno`, `ebn0_db` or `ebn0_start`/`ebn0_stop`/`ebn0_step`"
                    .to_string(),
            ));
        }
        if let Some(spec) = &self.ebno {
            cfg.sweep = EbN0Sweep::parse(spec)?;
        } else if let Some(db) = self.ebn0_db {
            cfg.sweep = EbN0Sweep::single(db)?;
        } else if given[2] {
            let d = cfg.sweep;
            cfg.sweep = EbN0Sweep::new(
                self.ebn0_start.unwrap_or(d.start),
                self.ebn0_stop.unwrap_or(d.stop),
                self.ebn0_step.unwrap_or(d.step),
            )?;
        }

        let memory = self.memory.unwrap_or(cfg.code.memory());
        let terminated = self.terminated.unwrap_or(cfg.code.terminated());
        cfg.code = match &self.generators {
            Some([g0, g1]) => CodeSpec::from_octal(memory, [g0, g1], terminated)?,
            None => CodeSpec::new(memory, cfg.code.generators(), terminated)?,
        };

        let tag = self.tag_bits.unwrap_or(cfg.layout.tag_bits_a);
        cfg.layout = FrameLayout {
            msg_bits_a: self.msg_bits_a.unwrap_or(cfg.layout.msg_bits_a),
            tag_bits_a: self.tag_bits_a.unwrap_or(tag),
            msg_bits_b: self.msg_bits_b.unwrap_or(cfg.layout.msg_bits_b),
            tag_bits_b: self.tag_bits_b.unwrap_or(tag),
            uneven: self.uneven_interleave.unwrap_or(false),
        };
        if let Some(d) = self.flip_budget {
            cfg.sid = SidConfig::new(d)?;
        }
        if let Some(h) = &self.key_hex {
            let bytes = hex::decode(h.trim())
                .map_err(|e| Error::Config(format!("key_hex is not valid hex: {e}")))?;
            cfg.key = CcfKey::new(&bytes)?;
        }
        cfg.out = self.out;
        cfg.validate()?;
        Ok(cfg)
    }
}
