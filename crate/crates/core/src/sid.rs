//! Soft input decryption: correct a block by flipping its least reliable
//! bits until the check value verifies.
//!
//! The search walks a binary counter over the `d` positions with the
//! smallest `|L|`. Counter bit `j` selects the position of rank `j`, so
//! attempt 1 flips the least reliable bit, attempt 2 the second least,
//! attempt 3 both of them, attempt 4 the third, and so on. Attempt 0 is
//! the received word itself.

use crate::ccf::{self, CcfKey, SidBlock};
use crate::codec::SoftWord;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SidConfig {
    flip_budget: u32,
}

impl SidConfig {
    pub const MAX_FLIP_BUDGET: u32 = 24;
    pub const DEFAULT_FLIP_BUDGET: u32 = 8;

    pub fn new(flip_budget: u32) -> Result<Self> {
        if flip_budget > Self::MAX_FLIP_BUDGET {
            return Err(Error::FlipBudgetTooLarge(flip_budget));
        }
        Ok(Self { flip_budget })
    }

    pub fn flip_budget(&self) -> u32 {
        self.flip_budget
    }

    pub fn max_attempts(&self) -> u64 {
        1 << self.flip_budget
    }
}

impl Default for SidConfig {
    fn default() -> Self {
        Self {
            flip_budget: Self::DEFAULT_FLIP_BUDGET,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SidStatus {
    Success,
    Failure,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SidResult {
    pub status: SidStatus,
    /// The verifying block, on success.
    pub corrected: Option<SidBlock>,
    /// Verifications performed, the unmodified word included.
    pub attempts_used: u64,
    /// Flipped positions in ascending order (empty on failure).
    pub flipped_positions: Vec<usize>,
}

impl SidResult {
    pub fn is_success(&self) -> bool {
        self.status == SidStatus::Success
    }
}

/// Positions sorted by increasing `|llr|`, ties by position.
pub fn reliability_order(llr: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..llr.len()).collect();
    order.sort_by(|&a, &b| llr[a].abs().total_cmp(&llr[b].abs()));
    order
}

/// Positions flipped by counter value `attempt` under a `budget`-bit counter.
pub fn flip_pattern(attempt: u64, order: &[usize], budget: u32) -> Result<Vec<usize>> {
    let budget = budget.min(order.len() as u32);
    if budget >= 64 || attempt >> budget != 0 {
        return Err(Error::AttemptOutOfRange { attempt, budget });
    }
    Ok((0..budget as usize)
        .filter(|j| (attempt >> j) & 1 == 1)
        .map(|j| order[j])
        .collect())
}

/// Runs the counter search over `word`, read as `message ++ tag` with a
/// `tag_bits`-bit tag. Returns the first verifying candidate.
pub fn soft_input_decrypt(
    word: &SoftWord,
    key: &CcfKey,
    tag_bits: usize,
    cfg: &SidConfig,
) -> Result<SidResult> {
    let bits = word.bits();
    if !(ccf::MIN_TAG_BITS..=ccf::MAX_TAG_BITS).contains(&tag_bits) {
        return Err(Error::TagLengthOutOfRange(tag_bits));
    }
    if bits.len() < tag_bits {
        return Err(Error::LengthMismatch {
            expected: tag_bits,
            actual: bits.len(),
        });
    }
    let msg_len = bits.len() - tag_bits;
    let order = reliability_order(word.llr());
    let budget = cfg.flip_budget.min(bits.len() as u32);
    let attempts = 1u64 << budget;

    // The message is kept packed so each candidate costs one HMAC.
    let mut packed = ccf::pack_message(&bits[..msg_len]);
    let mut tag = bits[msg_len..].to_vec();
    for attempt in 0..attempts {
        if attempt > 0 {
            let changed = (attempt - 1) ^ attempt;
            for (j, &pos) in order.iter().enumerate().take(budget as usize) {
                if (changed >> j) & 1 == 1 {
                    if pos < msg_len {
                        packed[8 + pos / 8] ^= 0x80 >> (pos % 8);
                    } else {
                        tag[pos - msg_len] ^= 1;
                    }
                }
            }
        }
        let digest = key.hmac(&packed);
        if ccf::digest_matches(&digest, &tag) {
            let mut flipped = flip_pattern(attempt, &order, budget)?;
            flipped.sort_unstable();
            let mut corrected = bits.to_vec();
            for &p in &flipped {
                corrected[p] ^= 1;
            }
            return Ok(SidResult {
                status: SidStatus::Success,
                corrected: Some(SidBlock::from_bits(&corrected, tag_bits)?),
                attempts_used: attempt + 1,
                flipped_positions: flipped,
            });
        }
    }
    Ok(SidResult {
        status: SidStatus::Failure,
        corrected: None,
        attempts_used: attempts,
        flipped_positions: Vec::new(),
    })
}
