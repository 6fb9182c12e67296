//! Deterministic extendable-output hashing, built from SHA-256 in counter
//! mode. This is the single byte oracle behind every random oracle, seed
//! expansion and deterministic witness derivation in the crate.
//!
//! Input layout is bit-exact and shared by all callers: a sequence of
//! tagged, length-prefixed fields, each encoded as
//! `tag byte ‖ 4-byte big-endian length ‖ field bytes`.
//! Output is `SHA-256(input ‖ 4-byte big-endian block counter)` for
//! counter 0, 1, ..., concatenated and truncated to the requested length.

use sha2::{Digest, Sha256};

pub(crate) const TAG_H1: u8 = 0x01;
pub(crate) const TAG_H2: u8 = 0x02;
pub(crate) const TAG_HA: u8 = 0x03;
pub(crate) const TAG_HDM_DOMAIN: u8 = 0x04;
pub(crate) const TAG_HDM_ATTR: u8 = 0x05;
pub(crate) const TAG_COUNTER: u8 = 0x06;
pub(crate) const TAG_GENERATOR_SEED: u8 = 0x07;
pub(crate) const TAG_SCALAR_SEED: u8 = 0x08;
pub(crate) const TAG_SCALAR_LABEL: u8 = 0x09;
pub(crate) const TAG_PRIME_SEED: u8 = 0x0a;
pub(crate) const TAG_MR_WITNESS: u8 = 0x0b;
pub(crate) const TAG_TRIAL_SEED: u8 = 0x0c;
pub(crate) const TAG_TRIAL_ROLE: u8 = 0x0d;

/// Builder for a tagged, length-prefixed hash input.
#[derive(Clone, Debug, Default)]
pub(crate) struct XofInput {
    buf: Vec<u8>,
}

impl XofInput {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn field(mut self, tag: u8, bytes: &[u8]) -> Self {
        let len = u32::try_from(bytes.len()).expect("field longer than 4 GiB");
        self.buf.push(tag);
        self.buf.extend_from_slice(&len.to_be_bytes());
        self.buf.extend_from_slice(bytes);
        self
    }

    pub fn u32_field(self, tag: u8, value: u32) -> Self {
        self.field(tag, &value.to_be_bytes())
    }

    pub fn u64_field(self, tag: u8, value: u64) -> Self {
        self.field(tag, &value.to_be_bytes())
    }

    /// Expand the accumulated input to `out_len` bytes.
    pub fn bytes(&self, out_len: usize) -> Vec<u8> {
        let mut out = Vec::with_capacity(out_len);
        let mut counter: u32 = 0;
        while out.len() < out_len {
            let mut hasher = Sha256::new();
            hasher.update(&self.buf);
            hasher.update(counter.to_be_bytes());
            out.extend_from_slice(&hasher.finalize());
            counter += 1;
        }
        out.truncate(out_len);
        out
    }

    /// Fixed 32-byte digest, for seeds and transcript digests.
    pub fn digest(&self) -> [u8; 32] {
        let mut out = [0u8; 32];
        out.copy_from_slice(&self.bytes(32));
        out
    }
}
