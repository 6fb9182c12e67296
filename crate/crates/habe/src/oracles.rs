//! The random-oracle suite: H₁ hashing public keys onto G₁, H₂ turning
//! pairing values into message-width pads, H_A mapping user public keys to
//! nonzero scalars, and the per-domain family H_dm. Every oracle is a
//! domain-separated instance of the SHA-256 counter-mode XOF in [`crate::xof`],
//! so the whole suite is deterministic and publicly evaluable.
//!
//! H_dm is keyed by the domain's *public* key. The two key-recovery attacks
//! require the adversary to evaluate the per-domain oracle on attribute
//! public keys, so the family must be publicly computable; keying by the
//! public identifier keeps distinct domains on distinct oracles while
//! matching that capability.

use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::curve::G1Point;
use crate::error::{Error, Result};
use crate::field::{FpElement, PrimeModulus};
use crate::pairing::{hash_to_g1, GtElement, PairingParams};
use crate::xof::{XofInput, TAG_COUNTER, TAG_H2, TAG_HA, TAG_HDM_ATTR, TAG_HDM_DOMAIN};

/// Oracle configuration: the pairing parameters plus the message width n
/// (in bits, a positive multiple of 8).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleSuite {
    params: PairingParams,
    n_bits: usize,
}

impl OracleSuite {
    pub fn new(params: PairingParams, n_bits: usize) -> Result<Self> {
        if n_bits == 0 || !n_bits.is_multiple_of(8) {
            return Err(Error::InvalidParams(
                "n must be a positive multiple of 8".into(),
            ));
        }
        Ok(Self { params, n_bits })
    }

    pub fn params(&self) -> &PairingParams {
        &self.params
    }

    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    pub fn n_bytes(&self) -> usize {
        self.n_bits / 8
    }

    /// H₁: {0,1}* → G₁.
    pub fn h1(&self, public_key: &[u8]) -> Result<G1Point> {
        hash_to_g1(&self.params, public_key)
    }

    /// H₂: G₂ → {0,1}ⁿ.
    pub fn h2(&self, value: &GtElement) -> Vec<u8> {
        h2_bytes(value, self.n_bits)
    }

    /// H_A: {0,1}* → Z_q \ {0}.
    pub fn h_a(&self, user_public_key: &[u8]) -> FpElement {
        h_a_scalar(self.params.modulus(), user_public_key)
    }

    /// H_dm: the per-domain oracle, keyed by the domain public key.
    pub fn h_dm(&self, domain_public_key: &[u8], attribute_public_key: &[u8]) -> FpElement {
        h_dm_scalar(self.params.modulus(), domain_public_key, attribute_public_key)
    }
}

/// Canonical fixed-width byte form of a G₂ element: both components as
/// big-endian integers, each padded to the byte length of p.
fn gt_canonical_bytes(value: &GtElement) -> Vec<u8> {
    let width = value.modulus().p().bits().div_ceil(8) as usize;
    let mut out = Vec::with_capacity(2 * width);
    for part in [value.value().real(), value.value().imag()] {
        let raw = part.value().to_bytes_be();
        out.extend(std::iter::repeat_n(0u8, width - raw.len()));
        out.extend_from_slice(&raw);
    }
    out
}

pub fn h2_bytes(value: &GtElement, n_bits: usize) -> Vec<u8> {
    XofInput::new()
        .field(TAG_H2, &gt_canonical_bytes(value))
        .bytes(n_bits / 8)
}

/// Scalar oracle output in [1, q): reduce the XOF stream mod q and re-hash
/// with an appended counter in the (overwhelmingly unlikely) zero case, so
/// the result is always invertible.
fn scalar_from_xof(ctx: &Arc<PrimeModulus>, base: XofInput) -> FpElement {
    let width = ctx.q().bits().div_ceil(8) as usize + 16;
    let first = BigUint::from_bytes_be(&base.bytes(width)) % ctx.q();
    if !first.is_zero() {
        return ctx.zq(first);
    }
    for counter in 0u32.. {
        let raw = base.clone().u32_field(TAG_COUNTER, counter).bytes(width);
        let value = BigUint::from_bytes_be(&raw) % ctx.q();
        if !value.is_zero() {
            return ctx.zq(value);
        }
    }
    unreachable!("a nonzero residue always appears")
}

pub fn h_a_scalar(ctx: &Arc<PrimeModulus>, user_public_key: &[u8]) -> FpElement {
    scalar_from_xof(ctx, XofInput::new().field(TAG_HA, user_public_key))
}

pub fn h_dm_scalar(
    ctx: &Arc<PrimeModulus>,
    domain_public_key: &[u8],
    attribute_public_key: &[u8],
) -> FpElement {
    scalar_from_xof(
        ctx,
        XofInput::new()
            .field(TAG_HDM_DOMAIN, domain_public_key)
            .field(TAG_HDM_ATTR, attribute_public_key),
    )
}
