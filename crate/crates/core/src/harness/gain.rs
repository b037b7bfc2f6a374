//! Coding gain between two BER curves.
//!
//! Each curve is interpolated linearly in dB against `log10(BER)`; the gain
//! is the horizontal distance `reference_db - test_db` at the target BER.
//! Points with zero BER carry no position on a log axis and are skipped.

use crate::error::{Error, Result};

/// A named BER curve, `(ebn0_db, ber)` in ascending Eb/N0.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub id: String,
    pub points: Vec<(f64, f64)>,
}

impl Curve {
    pub fn new(id: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self {
            id: id.into(),
            points,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GainReport {
    pub reference: String,
    pub test: String,
    pub target_ber: f64,
    pub reference_db: f64,
    pub test_db: f64,
    pub gain_db: f64,
}

/// Eb/N0 at which `curve` first falls to `target_ber`.
pub fn crossing_db(curve: &Curve, target_ber: f64) -> Result<f64> {
    if !(target_ber > 0.0 && target_ber < 1.0) {
        return Err(Error::TargetNotBracketed(target_ber));
    }
    let pts: Vec<(f64, f64)> = curve
        .points
        .iter()
        .copied()
        .filter(|&(_, b)| b > 0.0)
        .collect();
    let target = target_ber.log10();
    for w in pts.windows(2) {
        let ((x0, b0), (x1, b1)) = (w[0], w[1]);
        if b0 == target_ber {
            return Ok(x0);
        }
        if b0 > target_ber && b1 <= target_ber {
            let (l0, l1) = (b0.log10(), b1.log10());
            return Ok(x0 + (target - l0) / (l1 - l0) * (x1 - x0));
        }
    }
    match pts.last() {
        Some(&(x, b)) if b == target_ber => Ok(x),
        _ => Err(Error::TargetNotBracketed(target_ber)),
    }
}

pub fn coding_gain(reference: &Curve, test: &Curve, target_ber: f64) -> Result<GainReport> {
    let reference_db = crossing_db(reference, target_ber)?;
    let test_db = crossing_db(test, target_ber)?;
    Ok(GainReport {
        reference: reference.id.clone(),
        test: test.id.clone(),
        target_ber,
        reference_db,
        test_db,
        gain_db: reference_db - test_db,
    })
}
