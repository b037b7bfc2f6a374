//! Cryptographic check function: truncated HMAC-SHA-256 over bit messages.
//!
//! A message of `m` bits is packed most-significant-bit first into bytes
//! (the last byte zero-padded) and prefixed with `m` as an 8-byte
//! big-endian integer. The check value is the leading `n` bits of the
//! HMAC-SHA-256 of that byte string, again most-significant-bit first.

use std::fmt;

use hmac::{Hmac, Mac};
use sha2::Sha256;

use crate::error::{Error, Result};

type HmacSha256 = Hmac<Sha256>;

pub const MIN_TAG_BITS: usize = 8;
pub const MAX_TAG_BITS: usize = 256;
pub const MIN_KEY_BYTES: usize = 16;

/// Shared secret of the sender and receiver models.
#[derive(Clone)]
pub struct CcfKey {
    bytes: Vec<u8>,
    // Keyed state, cloned per evaluation so the pads are hashed once.
    keyed: HmacSha256,
}

impl CcfKey {
    pub fn new(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < MIN_KEY_BYTES {
            return Err(Error::KeyTooShort(bytes.len()));
        }
        Ok(Self::new_unchecked(bytes))
    }

    fn new_unchecked(bytes: &[u8]) -> Self {
        let keyed = HmacSha256::new_from_slice(bytes).expect("HMAC accepts any key length");
        Self {
            bytes: bytes.to_vec(),
            keyed,
        }
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    /// Full HMAC-SHA-256 of raw bytes.
    pub fn hmac(&self, data: &[u8]) -> [u8; 32] {
        let mut mac = self.keyed.clone();
        mac.update(data);
        mac.finalize().into_bytes().into()
    }
}

impl fmt::Debug for CcfKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CcfKey")
            .field("len", &self.bytes.len())
            .finish_non_exhaustive()
    }
}

impl PartialEq for CcfKey {
    fn eq(&self, other: &Self) -> bool {
        self.bytes == other.bytes
    }
}

/// A message together with its check value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SidBlock {
    message: Vec<u8>,
    tag: Vec<u8>,
}

impl SidBlock {
    pub fn new(message: Vec<u8>, tag: Vec<u8>) -> Result<Self> {
        check_tag_len(tag.len())?;
        Ok(Self { message, tag })
    }

    /// Splits a flat `message ++ tag` bit sequence.
    pub fn from_bits(bits: &[u8], tag_bits: usize) -> Result<Self> {
        check_tag_len(tag_bits)?;
        if bits.len() < tag_bits {
            return Err(Error::LengthMismatch {
                expected: tag_bits,
                actual: bits.len(),
            });
        }
        let (message, tag) = bits.split_at(bits.len() - tag_bits);
        Ok(Self {
            message: message.to_vec(),
            tag: tag.to_vec(),
        })
    }

    pub fn message(&self) -> &[u8] {
        &self.message
    }

    pub fn tag(&self) -> &[u8] {
        &self.tag
    }

    pub fn len(&self) -> usize {
        self.message.len() + self.tag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_bits(&self) -> Vec<u8> {
        let mut bits = Vec::with_capacity(self.len());
        bits.extend_from_slice(&self.message);
        bits.extend_from_slice(&self.tag);
        bits
    }
}

fn check_tag_len(n: usize) -> Result<()> {
    if (MIN_TAG_BITS..=MAX_TAG_BITS).contains(&n) {
        Ok(())
    } else {
        Err(Error::TagLengthOutOfRange(n))
    }
}

/// Length header followed by the bits packed MSB first.
pub fn pack_message(message: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + message.len().div_ceil(8));
    out.extend_from_slice(&(message.len() as u64).to_be_bytes());
    out.extend(message.chunks(8).map(|chunk| {
        chunk
            .iter()
            .enumerate()
            .fold(0u8, |acc, (j, &b)| acc | ((b & 1) << (7 - j)))
    }));
    out
}

/// Leading `n` bits of `bytes`, MSB first.
pub fn leading_bits(bytes: &[u8], n: usize) -> Vec<u8> {
    (0..n).map(|i| (bytes[i / 8] >> (7 - i % 8)) & 1).collect()
}

/// Whether the leading `tag.len()` bits of `digest` equal `tag`.
pub(crate) fn digest_matches(digest: &[u8; 32], tag: &[u8]) -> bool {
    tag.iter()
        .enumerate()
        .all(|(i, &b)| (digest[i / 8] >> (7 - i % 8)) & 1 == b & 1)
}

/// Check value of `message`: the leading `n` bits of its HMAC.
pub fn tag(message: &[u8], key: &CcfKey, n: usize) -> Result<Vec<u8>> {
    check_tag_len(n)?;
    let digest = key.hmac(&pack_message(message));
    Ok(leading_bits(&digest, n))
}

pub fn verify(block: &SidBlock, key: &CcfKey) -> bool {
    let digest = key.hmac(&pack_message(&block.message));
    digest_matches(&digest, &block.tag)
}

pub fn make_sid_block(message: &[u8], key: &CcfKey, n: usize) -> Result<SidBlock> {
    let tag = tag(message, key, n)?;
    Ok(SidBlock {
        message: message.iter().map(|b| b & 1).collect(),
        tag,
    })
}
