//! CSV results and the run manifest written beside them.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use super::{BerRecord, GainReport, SimConfig, Stage, StageStat, CODE_RATE, MESSAGE_STREAM};
use crate::channel::RNG_ALGORITHM;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "ebn0_db,ber_cd1,se_cd1,ber_1sid,se_1sid,ber_cd2,se_cd2,ber_2sid,se_2sid,sid_a_rate,sid_b_rate,trials,bits";

fn push_opt(row: &mut String, v: Option<f64>) {
    row.push(',');
    if let Some(v) = v {
        let _ = write!(row, "{v:.9e}");
    }
}

pub fn render_csv(records: &[BerRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        let mut row = format!("{:.6}", r.ebn0_db);
        for stage in Stage::ALL {
            let stat = r.stage(stage);
            push_opt(&mut row, stat.map(|s| s.ber));
            push_opt(&mut row, stat.map(|s| s.se));
        }
        push_opt(&mut row, r.sid_a_rate);
        push_opt(&mut row, r.sid_b_rate);
        let _ = writeln!(row, ",{},{}", r.trials, r.bits);
        out.push_str(&row);
    }
    out
}

/// Reads records written by [`render_csv`]. Error counts are recovered
/// from `ber * bits`; false accepts are not stored and read back as zero.
pub fn parse_csv(text: &str) -> Result<Vec<BerRecord>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == CSV_HEADER => {}
        _ => return Err(Error::Csv("missing or unexpected header".to_string())),
    }
    let mut records = Vec::new();
    for (n, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let row = n + 2;
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != 13 {
            return Err(Error::Csv(format!(
                "line {row}: expected 13 fields, got {}",
                cells.len()
            )));
        }
        let float = |i: usize| -> Result<Option<f64>> {
            if cells[i].is_empty() {
                return Ok(None);
            }
            cells[i]
                .parse::<f64>()
                .map(Some)
                .map_err(|_| Error::Csv(format!("line {row}: `{}` is not a number", cells[i])))
        };
        let int = |i: usize| -> Result<u64> {
            cells[i]
                .parse::<u64>()
                .map_err(|_| Error::Csv(format!("line {row}: `{}` is not a count", cells[i])))
        };
        let bits = int(12)?;
        let stat = |i: usize| -> Result<Option<StageStat>> {
            Ok(match (float(i)?, float(i + 1)?) {
                (Some(ber), Some(se)) => Some(StageStat {
                    errors: (ber * bits as f64).round() as u64,
                    ber,
                    se,
                }),
                (None, None) => None,
                _ => {
                    return Err(Error::Csv(format!(
                        "line {row}: BER without standard error"
                    )))
                }
            })
        };
        records.push(BerRecord {
            ebn0_db: float(0)?.ok_or_else(|| Error::Csv(format!("line {row}: missing ebn0_db")))?,
            cd1: stat(1)?.ok_or_else(|| Error::Csv(format!("line {row}: missing ber_cd1")))?,
            sid1: stat(3)?,
            cd2: stat(5)?,
            sid2: stat(7)?,
            sid_a_rate: float(9)?,
            sid_b_rate: float(10)?,
            trials: int(11)?,
            bits,
            false_accepts: 0,
        });
    }
    Ok(records)
}

pub fn manifest_path(csv: &Path) -> PathBuf {
    let mut name = csv.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest");
    csv.with_file_name(name)
}

/// `key=value` description of a run. Only the `timestamp` line differs
/// between runs of the same configuration.
pub fn render_manifest(
    cfg: &SimConfig,
    records: &[BerRecord],
    gains: &[GainReport],
    timestamp: u64,
) -> String {
    let mut m = String::new();
    let mut kv = |k: &str, v: &dyn std::fmt::Display| {
        let _ = writeln!(m, "{k}={v}");
    };
    let l = &cfg.layout;
    let s = &cfg.sweep;
    kv("artifact", &format!("sidlab {}", env!("CARGO_PKG_VERSION")));
    kv("scheme", &cfg.scheme);
    kv("seed", &cfg.seed);
    kv("rng", &RNG_ALGORITHM);
    kv("noise_stream", &"trial index");
    kv(
        "message_stream",
        &format!("trial index | {MESSAGE_STREAM:#x}"),
    );
    kv("trials", &cfg.trials);
    kv("trials_unit", &"frames (block a + block b)");
    kv("ebno", &format!("{}:{}:{}", s.start, s.stop, s.step));
    kv("memory", &cfg.code.memory());
    kv("generators", &cfg.code.generators_octal());
    kv("terminated", &cfg.code.terminated());
    kv("code_rate", &CODE_RATE);
    kv("noise_variance", &"1 / (2 * code_rate * 10^(ebn0_db / 10))");
    kv(
        "decoder",
        &"BCJR log-MAP (exact max-star), posteriors clamped to +-50",
    );
    kv("msg_bits_a", &l.msg_bits_a);
    kv("tag_bits_a", &l.tag_bits_a);
    kv("msg_bits_b", &l.msg_bits_b);
    kv("tag_bits_b", &l.tag_bits_b);
    kv("uneven_interleave", &l.uneven);
    kv("flip_budget", &cfg.sid.flip_budget());
    kv(
        "ccf",
        &"HMAC-SHA-256, leading tag bits; 8-byte big-endian bit length + MSB-first packing",
    );
    kv("key_hex", &hex::encode(cfg.key.as_bytes()));
    let unresolved: Vec<String> = records
        .iter()
        .flat_map(|r| {
            Stage::ALL.into_iter().filter_map(move |st| {
                r.stage(st)
                    .filter(|s| s.unresolved())
                    .map(|_| format!("{}:{}", r.ebn0_db, st.column()))
            })
        })
        .collect();
    kv("unresolved", &unresolved.join(","));
    let fa: Vec<String> = records
        .iter()
        .filter(|r| r.false_accepts > 0)
        .map(|r| format!("{}:{}", r.ebn0_db, r.false_accepts))
        .collect();
    kv("false_accepts", &fa.join(","));
    for g in gains {
        kv(
            &format!("gain.{}.{}@{:e}", g.reference, g.test, g.target_ber),
            &format!("{:.4}", g.gain_db),
        );
    }
    kv("timestamp", &timestamp);
    m
}

/// Writes the CSV at `path` and the manifest at `<path>.manifest`.
pub fn emit_csv(
    records: &[BerRecord],
    gains: &[GainReport],
    cfg: &SimConfig,
    path: &Path,
) -> Result<PathBuf> {
    if records.is_empty() {
        return Err(Error::Csv("no records to write".to_string()));
    }
    let io = |p: &Path| {
        let p = p.to_path_buf();
        move |source| Error::Io { path: p, source }
    };
    std::fs::write(path, render_csv(records)).map_err(io(path))?;
    let timestamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let manifest = manifest_path(path);
    std::fs::write(&manifest, render_manifest(cfg, records, gains, timestamp))
        .map_err(io(&manifest))?;
    Ok(manifest)
}
