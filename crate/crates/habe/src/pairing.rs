//! The symmetric bilinear map ê: G₁ × G₁ → G₂, realized as the Tate pairing
//! on y² = x³ + x composed with the distortion map, followed by the final
//! exponentiation to the power (p² − 1)/q = (p − 1)·h. Embedding degree 2
//! lets vertical-line factors be dropped from the Miller loop, since values
//! in F_p are annihilated by the final exponentiation.

use std::str::FromStr;
use std::sync::Arc;

use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, Zero};
use rand::RngCore;

use crate::curve::{tangent_slope, G1Point};
use crate::error::{Error, Result};
use crate::field::{is_probable_prime, FpElement, PrimeModulus, MILLER_RABIN_ROUNDS};
use crate::fp2::Fp2Element;
use crate::xof::{
    XofInput, TAG_COUNTER, TAG_GENERATOR_SEED, TAG_H1, TAG_PRIME_SEED, TAG_SCALAR_LABEL,
    TAG_SCALAR_SEED,
};

const MAX_SEARCH_CANDIDATES: usize = 1_000_000;
const MAX_HASH_ATTEMPTS: u32 = 256;

/// Named parameter sizes. These are desk-scale demonstration parameters and
/// carry no security whatsoever.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// q = 11, p = 43: tiny enough for exhaustive checks.
    Toy,
    /// q of 80 bits, p of 512 bits.
    Small,
    Custom { q_bits: u32, p_bits: u32 },
}

impl Preset {
    pub fn name(&self) -> &'static str {
        match self {
            Preset::Toy => "toy",
            Preset::Small => "small",
            Preset::Custom { .. } => "custom",
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "toy" => Ok(Preset::Toy),
            "small" => Ok(Preset::Small),
            other => Err(Error::InvalidInput(format!("unknown preset `{other}`"))),
        }
    }
}

/// Public pairing parameters: the validated modulus triple and a generator
/// P₀ of the order-q subgroup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairingParams {
    modulus: Arc<PrimeModulus>,
    p0: G1Point,
}

impl PairingParams {
    pub fn from_preset(preset: &Preset, seed: &[u8]) -> Result<Self> {
        match preset {
            Preset::Toy => Self::from_primes(BigUint::from(11u32), BigUint::from(4u32), seed),
            Preset::Small => Self::generate(80, 512, seed),
            Preset::Custom { q_bits, p_bits } => Self::generate(*q_bits, *p_bits, seed),
        }
    }

    /// Deterministically derive parameters from a seed: sample a prime q of
    /// `q_bits` bits, then search successive even cofactors h until
    /// p = h·q − 1 is a prime congruent to 3 mod 4 with `p_bits` bits, and
    /// hash the seed onto the subgroup for the generator.
    pub fn generate(q_bits: u32, p_bits: u32, seed: &[u8]) -> Result<Self> {
        if q_bits < 8 {
            return Err(Error::InvalidParams("q_bits must be at least 8".into()));
        }
        if p_bits < q_bits + 3 {
            return Err(Error::InvalidParams(
                "p_bits must exceed q_bits by at least 3".into(),
            ));
        }

        let q = sample_prime(q_bits, seed)?;

        // smallest even h giving p at least 2^(p_bits - 1)
        let floor = BigUint::one() << (p_bits - 1);
        let mut h = (&floor + &q - 1u32) / &q;
        if h.bit(0) {
            h += 1u32;
        }
        let mut found = None;
        for _ in 0..MAX_SEARCH_CANDIDATES {
            let p = &h * &q - 1u32;
            if &p % 4u32 == BigUint::from(3u32) && is_probable_prime(&p, MILLER_RABIN_ROUNDS) {
                found = Some(h.clone());
                break;
            }
            h += 2u32;
        }
        let h = found.ok_or(Error::SearchExhausted(MAX_SEARCH_CANDIDATES))?;
        Self::from_primes(q, h, seed)
    }

    /// Assemble parameters from a known (q, h) pair, deriving the generator
    /// from the seed.
    pub fn from_primes(q: BigUint, h: BigUint, seed: &[u8]) -> Result<Self> {
        let p = &h * &q - 1u32;
        let modulus = Arc::new(PrimeModulus::new(p, q, h)?);
        let p0 = hash_to_curve_tagged(&modulus, TAG_GENERATOR_SEED, seed)?;
        Ok(Self { modulus, p0 })
    }

    /// Rebuild from deserialized parts, re-checking the generator.
    pub fn from_parts(modulus: Arc<PrimeModulus>, p0: G1Point) -> Result<Self> {
        if p0.modulus() != &modulus {
            return Err(Error::ModulusMismatch);
        }
        if p0.is_infinity() || !p0.in_subgroup() {
            return Err(Error::WrongOrderPoint);
        }
        Ok(Self { modulus, p0 })
    }

    pub fn modulus(&self) -> &Arc<PrimeModulus> {
        &self.modulus
    }

    pub fn generator(&self) -> &G1Point {
        &self.p0
    }
}

fn sample_prime(bits: u32, seed: &[u8]) -> Result<BigUint> {
    let byte_len = bits.div_ceil(8) as usize;
    let excess = (byte_len * 8) as u32 - bits;
    for counter in 0..MAX_SEARCH_CANDIDATES {
        let raw = XofInput::new()
            .field(TAG_PRIME_SEED, seed)
            .u32_field(TAG_COUNTER, counter as u32)
            .bytes(byte_len);
        let mut candidate = BigUint::from_bytes_be(&raw) >> excess;
        candidate.set_bit(u64::from(bits) - 1, true);
        candidate.set_bit(0, true);
        if is_probable_prime(&candidate, MILLER_RABIN_ROUNDS) {
            return Ok(candidate);
        }
    }
    Err(Error::SearchExhausted(MAX_SEARCH_CANDIDATES))
}

/// Element of the order-q subgroup of F_p²^*, i.e. a pairing value after
/// final exponentiation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GtElement {
    ctx: Arc<PrimeModulus>,
    value: Fp2Element,
}

impl GtElement {
    pub fn one(ctx: Arc<PrimeModulus>) -> Self {
        let one = ctx.fp_u64(1);
        let zero = ctx.fp_u64(0);
        Self {
            ctx,
            value: Fp2Element::new(one, zero).expect("same modulus"),
        }
    }

    pub fn value(&self) -> &Fp2Element {
        &self.value
    }

    pub fn modulus(&self) -> &Arc<PrimeModulus> {
        &self.ctx
    }

    pub fn is_one(&self) -> bool {
        self.value.is_one()
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.ctx != rhs.ctx {
            return Err(Error::ModulusMismatch);
        }
        Ok(Self {
            ctx: self.ctx.clone(),
            value: self.value.mul(&rhs.value)?,
        })
    }

    /// Exponentiation; the exponent is reduced modulo the group order q.
    pub fn pow(&self, exponent: &BigUint) -> Result<Self> {
        Ok(Self {
            ctx: self.ctx.clone(),
            value: self.value.pow(&(exponent % self.ctx.q()))?,
        })
    }

    pub fn inv(&self) -> Result<Self> {
        Ok(Self {
            ctx: self.ctx.clone(),
            value: self.value.inv()?,
        })
    }

    pub(crate) fn from_parts(ctx: Arc<PrimeModulus>, value: Fp2Element) -> Self {
        Self { ctx, value }
    }
}

/// The bilinear map. Inputs must lie in the order-q subgroup; either input
/// at infinity yields the identity of G₂.
pub fn pairing(a: &G1Point, b: &G1Point) -> Result<GtElement> {
    if a.modulus() != b.modulus() {
        return Err(Error::ModulusMismatch);
    }
    let ctx = a.modulus().clone();
    if !a.in_subgroup() || !b.in_subgroup() {
        return Err(Error::WrongOrderPoint);
    }
    if a.is_infinity() || b.is_infinity() {
        return Ok(GtElement::one(ctx));
    }

    // Distorted image of b: x' = −x_b (real), y' = y_b·i. The line values
    // below keep the two components separate so all slope arithmetic stays
    // in F_p.
    let (xb, yb) = b.coords().expect("finite");
    let xq = xb.neg();
    let yq = yb.clone();

    let order = ctx.q().clone();
    let (xa, ya) = a.coords().expect("finite");
    let mut f = Fp2Element::from_base(ctx.fp_u64(1));
    let mut t = a.clone();
    for i in (0..order.bits() - 1).rev() {
        f = f.square()?;
        let coords = t.coords().map(|(x, y)| (x.clone(), y.clone()));
        if let Some((xt, yt)) = &coords {
            let lambda = tangent_slope(xt, yt)?;
            f = f.mul(&line_value(&lambda, xt, yt, &xq, &yq)?)?;
        }
        t = t.add(&t)?;
        if order.bit(i) {
            match t.coords().map(|(x, y)| (x.clone(), y.clone())) {
                Some((xt, yt)) => {
                    if &xt == xa && yt.add(ya)?.is_zero() {
                        // vertical line through T and −T: the value lies in
                        // F_p and is erased by the final exponentiation
                        t = G1Point::infinity(ctx.clone());
                    } else {
                        let lambda = if &xt == xa {
                            tangent_slope(&xt, &yt)?
                        } else {
                            yt.sub(ya)?.mul(&xt.sub(xa)?.inv()?)?
                        };
                        f = f.mul(&line_value(&lambda, &xt, &yt, &xq, &yq)?)?;
                        t = t.add(a)?;
                    }
                }
                None => {
                    t = t.add(a)?;
                }
            }
        }
    }

    // final exponentiation: (p² − 1)/q = (p − 1)·h, with the p − 1 part
    // computed through Frobenius as f^(p−1) = conj(f)·f⁻¹
    let value = f.conj().mul(&f.inv()?)?.pow(ctx.h())?;
    Ok(GtElement::from_parts(ctx, value))
}

/// Value at (x', y'·i) of the line through (xt, yt) with slope λ:
/// y'·i − yt − λ(x' − xt) = (λ(xt − x') − yt) + y'·i, with x' = −x_b already
/// folded into `xq`.
fn line_value(
    lambda: &FpElement,
    xt: &FpElement,
    yt: &FpElement,
    xq: &FpElement,
    yq: &FpElement,
) -> Result<Fp2Element> {
    let real = lambda.mul(&xt.sub(xq)?)?.sub(yt)?;
    Fp2Element::new(real, yq.clone())
}

/// Hash arbitrary bytes onto the order-q subgroup by try-and-increment: for
/// counter c = 0, 1, ... derive an x-candidate, take the deterministic square
/// root of x³ + x when it exists, clear the cofactor and reject the identity.
pub fn hash_to_g1(params: &PairingParams, msg: &[u8]) -> Result<G1Point> {
    hash_to_curve_tagged(params.modulus(), TAG_H1, msg)
}

pub(crate) fn hash_to_curve_tagged(
    ctx: &Arc<PrimeModulus>,
    tag: u8,
    msg: &[u8],
) -> Result<G1Point> {
    let width = ctx.p().bits().div_ceil(8) as usize + 16;
    for counter in 0..MAX_HASH_ATTEMPTS {
        let raw = XofInput::new()
            .field(tag, msg)
            .u32_field(TAG_COUNTER, counter)
            .bytes(width);
        let x = ctx.fp(BigUint::from_bytes_be(&raw));
        let rhs = x.mul(&x).and_then(|x2| x2.mul(&x)).and_then(|x3| x3.add(&x));
        let rhs = rhs.expect("same modulus by construction");
        if let Some(y) = rhs.sqrt() {
            let point = G1Point::from_coords(ctx.clone(), x, y);
            let cleared = point.clear_cofactor();
            if !cleared.is_infinity() {
                return Ok(cleared);
            }
        }
    }
    Err(Error::HashToCurveFailed(MAX_HASH_ATTEMPTS))
}

/// Deterministic scalar in [1, q) derived from a seed and a label.
pub(crate) fn derive_scalar(ctx: &Arc<PrimeModulus>, seed: &[u8], label: &[u8]) -> FpElement {
    let width = ctx.q().bits().div_ceil(8) as usize + 16;
    for counter in 0u32.. {
        let raw = XofInput::new()
            .field(TAG_SCALAR_SEED, seed)
            .field(TAG_SCALAR_LABEL, label)
            .u32_field(TAG_COUNTER, counter)
            .bytes(width);
        let value = BigUint::from_bytes_be(&raw) % ctx.q();
        if !value.is_zero() {
            return ctx.zq(value);
        }
    }
    unreachable!("a nonzero residue always appears")
}

/// Uniform scalar in [1, q) from the caller's randomness source.
pub(crate) fn random_scalar<R: RngCore>(ctx: &Arc<PrimeModulus>, rng: &mut R) -> FpElement {
    loop {
        let value = rng.gen_biguint_below(ctx.q());
        if !value.is_zero() {
            return ctx.zq(value);
        }
    }
}
