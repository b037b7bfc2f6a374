//! Two-block frames and their interleaving into one joint message.
//!
//! With `r = len_b / len_a`, every element of block a is followed by the
//! next `r` elements of block b:
//!
//! ```text
//! r = 1:  a1 b1 a2 b2 ...
//! r = 2:  a1 b1 b2 a2 b3 b4 ...
//! ```
//!
//! The same permutation is used for bits before encoding and for L-values
//! after decoding.
//!
//! Frames whose lengths do not divide can be built with
//! [`FrameGeometry::uneven`]: a-element `i` is then followed by b-elements
//! `floor(i * len_b / len_a) .. floor((i + 1) * len_b / len_a)`, which is
//! the rule above whenever `len_a` divides `len_b`.

use crate::ccf::{make_sid_block, CcfKey, SidBlock};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameGeometry {
    len_a: usize,
    len_b: usize,
}

impl FrameGeometry {
    pub fn new(len_a: usize, len_b: usize) -> Result<Self> {
        if len_a == 0 {
            return Err(Error::GeometryViolation("block a is empty".to_string()));
        }
        if len_b < len_a {
            return Err(Error::GeometryViolation(format!(
                "block b ({len_b} bits) is shorter than block a ({len_a} bits)"
            )));
        }
        if !len_b.is_multiple_of(len_a) {
            return Err(Error::GeometryViolation(format!(
                "block b ({len_b} bits) is not a multiple of block a ({len_a} bits)"
            )));
        }
        Ok(Self { len_a, len_b })
    }

    /// Geometry that only requires `len_b >= len_a`, for splits such as
    /// 212/428 where the block lengths do not divide.
    pub fn uneven(len_a: usize, len_b: usize) -> Result<Self> {
        if len_a == 0 || len_b < len_a {
            return Err(Error::GeometryViolation(format!(
                "need 0 < len_a <= len_b, got {len_a}/{len_b}"
            )));
        }
        Ok(Self { len_a, len_b })
    }

    pub fn is_even(&self) -> bool {
        self.len_b.is_multiple_of(self.len_a)
    }

    pub fn len_a(&self) -> usize {
        self.len_a
    }

    pub fn len_b(&self) -> usize {
        self.len_b
    }

    pub fn len_u(&self) -> usize {
        self.len_a + self.len_b
    }

    /// `len_b / len_a`, rounded down for uneven frames.
    pub fn ratio(&self) -> usize {
        self.len_b / self.len_a
    }

    /// Index of the first b-element following `a[i]`.
    fn group_start(&self, i: usize) -> usize {
        i * self.len_b / self.len_a
    }

    /// Position of `a[i]` in the joint message.
    pub fn position_a(&self, i: usize) -> usize {
        i + self.group_start(i)
    }

    /// Position of `b[j]` in the joint message.
    pub fn position_b(&self, j: usize) -> usize {
        let group = ((j + 1) * self.len_a).div_ceil(self.len_b) - 1;
        j + group + 1
    }
}

pub fn interleave<T: Clone>(a: &[T], b: &[T], g: &FrameGeometry) -> Result<Vec<T>> {
    if a.len() != g.len_a || b.len() != g.len_b {
        return Err(Error::GeometryMismatch(format!(
            "blocks of {} and {} elements for a {}/{} frame",
            a.len(),
            b.len(),
            g.len_a,
            g.len_b
        )));
    }
    let mut u = Vec::with_capacity(g.len_u());
    for (i, x) in a.iter().enumerate() {
        u.push(x.clone());
        u.extend_from_slice(&b[g.group_start(i)..g.group_start(i + 1)]);
    }
    Ok(u)
}

pub fn deinterleave<T: Clone>(u: &[T], g: &FrameGeometry) -> Result<(Vec<T>, Vec<T>)> {
    if u.len() != g.len_u() {
        return Err(Error::GeometryMismatch(format!(
            "joint message of {} elements for a {}-element frame",
            u.len(),
            g.len_u()
        )));
    }
    let mut a = Vec::with_capacity(g.len_a);
    let mut b = Vec::with_capacity(g.len_b);
    let mut at = 0;
    for i in 0..g.len_a {
        let width = g.group_start(i + 1) - g.group_start(i);
        a.push(u[at].clone());
        b.extend_from_slice(&u[at + 1..at + 1 + width]);
        at += 1 + width;
    }
    Ok((a, b))
}

/// Block a, block b and the geometry joining them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FramePair {
    pub block_a: SidBlock,
    pub block_b: SidBlock,
    pub geometry: FrameGeometry,
}

impl FramePair {
    pub fn from_blocks(
        block_a: SidBlock,
        block_b: SidBlock,
        geometry: FrameGeometry,
    ) -> Result<Self> {
        if block_a.len() != geometry.len_a || block_b.len() != geometry.len_b {
            return Err(Error::GeometryMismatch(format!(
                "blocks of {} and {} bits for a {}/{} frame",
                block_a.len(),
                block_b.len(),
                geometry.len_a,
                geometry.len_b
            )));
        }
        Ok(Self {
            block_a,
            block_b,
            geometry,
        })
    }

    /// The interleaved joint message.
    pub fn joint_bits(&self) -> Vec<u8> {
        interleave(
            &self.block_a.to_bits(),
            &self.block_b.to_bits(),
            &self.geometry,
        )
        .expect("frame blocks match their geometry")
    }
}

pub fn build_frame(ma: &[u8], mb: &[u8], key: &CcfKey, n1: usize, n2: usize) -> Result<FramePair> {
    let geometry = FrameGeometry::new(ma.len() + n1, mb.len() + n2)?;
    Ok(FramePair {
        block_a: make_sid_block(ma, key, n1)?,
        block_b: make_sid_block(mb, key, n2)?,
        geometry,
    })
}
