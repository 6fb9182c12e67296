//! Arbitrary-precision modular arithmetic over the base prime field F_p and
//! the scalar field Z_q, with plain canonical residues throughout. Values are
//! immutable after construction and safe to share across threads.

use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::xof::{XofInput, TAG_MR_WITNESS};

/// Rounds of Miller-Rabin used when validating moduli.
pub const MILLER_RABIN_ROUNDS: u32 = 64;

const SMALL_PRIMES: [u32; 54] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
    97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191,
    193, 197, 199, 211, 223, 227, 229, 233, 239, 241, 251,
];

/// Validated modulus triple: base field characteristic `p`, pairing group
/// order `q` and cofactor `h` with `p + 1 = h·q` and `p ≡ 3 (mod 4)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeModulus {
    p: Arc<BigUint>,
    q: Arc<BigUint>,
    h: BigUint,
}

impl PrimeModulus {
    pub fn new(p: BigUint, q: BigUint, h: BigUint) -> Result<Self> {
        if !is_probable_prime(&p, MILLER_RABIN_ROUNDS) {
            return Err(Error::NotPrime("p"));
        }
        if !is_probable_prime(&q, MILLER_RABIN_ROUNDS) {
            return Err(Error::NotPrime("q"));
        }
        if &p % 4u32 != BigUint::from(3u32) {
            return Err(Error::InvalidParams("p is not congruent to 3 mod 4".into()));
        }
        if &h * &q != &p + 1u32 {
            return Err(Error::InvalidParams("h·q does not equal p + 1".into()));
        }
        Ok(Self {
            p: Arc::new(p),
            q: Arc::new(q),
            h,
        })
    }

    pub fn p(&self) -> &BigUint {
        &self.p
    }

    pub fn q(&self) -> &BigUint {
        &self.q
    }

    pub fn h(&self) -> &BigUint {
        &self.h
    }

    /// Residue in the base field F_p.
    pub fn fp(&self, value: BigUint) -> FpElement {
        FpElement::new(value, self.p.clone())
    }

    pub fn fp_u64(&self, value: u64) -> FpElement {
        self.fp(BigUint::from(value))
    }

    /// Residue in the scalar field Z_q.
    pub fn zq(&self, value: BigUint) -> FpElement {
        FpElement::new(value, self.q.clone())
    }

    pub fn zq_u64(&self, value: u64) -> FpElement {
        self.zq(BigUint::from(value))
    }
}

/// Canonical residue modulo a prime. The modulus travels with the value, and
/// every operation re-reduces so `0 <= value < modulus` always holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpElement {
    value: BigUint,
    modulus: Arc<BigUint>,
}

impl FpElement {
    pub fn new(value: BigUint, modulus: Arc<BigUint>) -> Self {
        let value = value % &*modulus;
        Self { value, modulus }
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn modulus_arc(&self) -> Arc<BigUint> {
        self.modulus.clone()
    }

    pub fn zero_like(&self) -> Self {
        Self {
            value: BigUint::zero(),
            modulus: self.modulus.clone(),
        }
    }

    pub fn one_like(&self) -> Self {
        Self {
            value: BigUint::one(),
            modulus: self.modulus.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.value.is_one()
    }

    fn check_same_modulus(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.modulus, &other.modulus) || self.modulus == other.modulus {
            Ok(())
        } else {
            Err(Error::ModulusMismatch)
        }
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.check_same_modulus(rhs)?;
        let mut value = &self.value + &rhs.value;
        if value >= *self.modulus {
            value -= &*self.modulus;
        }
        Ok(Self {
            value,
            modulus: self.modulus.clone(),
        })
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.check_same_modulus(rhs)?;
        let value = if self.value >= rhs.value {
            &self.value - &rhs.value
        } else {
            &*self.modulus - &rhs.value + &self.value
        };
        Ok(Self {
            value,
            modulus: self.modulus.clone(),
        })
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        self.check_same_modulus(rhs)?;
        Ok(Self {
            value: (&self.value * &rhs.value) % &*self.modulus,
            modulus: self.modulus.clone(),
        })
    }

    pub fn neg(&self) -> Self {
        let value = if self.value.is_zero() {
            BigUint::zero()
        } else {
            &*self.modulus - &self.value
        };
        Self {
            value,
            modulus: self.modulus.clone(),
        }
    }

    /// Multiplicative inverse. Zero (or any value sharing a factor with the
    /// modulus) is not invertible.
    pub fn inv(&self) -> Result<Self> {
        let value = mod_inverse(&self.value, &self.modulus).ok_or(Error::NotInvertible)?;
        Ok(Self {
            value,
            modulus: self.modulus.clone(),
        })
    }

    /// Square-and-multiply exponentiation with a non-negative exponent.
    pub fn pow(&self, exponent: &BigUint) -> Self {
        Self {
            value: self.value.modpow(exponent, &self.modulus),
            modulus: self.modulus.clone(),
        }
    }

    /// Square root via the `x^((m+1)/4)` rule, valid because the base field
    /// characteristic is 3 mod 4. Returns the lexicographically smaller of
    /// the two roots so serialization is deterministic, or `None` when the
    /// value is a non-residue. The candidate root is verified by squaring, so
    /// a wrong-shape modulus can never yield a bogus root.
    pub fn sqrt(&self) -> Option<Self> {
        let exponent = (&*self.modulus + 1u32) >> 2;
        let candidate = self.value.modpow(&exponent, &self.modulus);
        if (&candidate * &candidate) % &*self.modulus != self.value {
            return None;
        }
        let other = if candidate.is_zero() {
            BigUint::zero()
        } else {
            &*self.modulus - &candidate
        };
        Some(Self {
            value: candidate.min(other),
            modulus: self.modulus.clone(),
        })
    }
}

/// Extended-Euclid modular inverse; `None` when gcd(a, m) != 1.
fn mod_inverse(a: &BigUint, m: &BigUint) -> Option<BigUint> {
    if a.is_zero() {
        return None;
    }
    let a = BigInt::from(a.clone());
    let m = BigInt::from(m.clone());
    let ext = a.extended_gcd(&m);
    if !ext.gcd.is_one() {
        return None;
    }
    ext.x.mod_floor(&m).to_biguint()
}

/// Miller-Rabin probabilistic primality test. Candidates below 2^64 use the
/// first twelve primes as witnesses, which is a deterministic test in that
/// range; larger candidates use `rounds` witnesses derived from the candidate
/// itself, keeping the whole test deterministic per input.
pub fn is_probable_prime(n: &BigUint, rounds: u32) -> bool {
    if *n < BigUint::from(2u32) {
        return false;
    }
    for sp in SMALL_PRIMES {
        let sp = BigUint::from(sp);
        if *n == sp {
            return true;
        }
        if (n % &sp).is_zero() {
            return false;
        }
    }

    let one = BigUint::one();
    let n_minus_one = n - &one;
    let s = n_minus_one.trailing_zeros().expect("n - 1 > 0");
    let d = &n_minus_one >> s;

    let witnesses: Vec<BigUint> = if n.bits() <= 64 {
        [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]
            .iter()
            .map(|&w| BigUint::from(w))
            .collect()
    } else {
        derive_witnesses(n, rounds)
    };

    'witness: for a in witnesses {
        let a = a % n;
        if a.is_zero() || a.is_one() || a == n_minus_one {
            continue;
        }
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n_minus_one {
            continue;
        }
        for _ in 0..s.saturating_sub(1) {
            x = (&x * &x) % n;
            if x == n_minus_one {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn derive_witnesses(n: &BigUint, rounds: u32) -> Vec<BigUint> {
    let n_bytes = n.to_bytes_be();
    let span = n - 3u32;
    let width = n.bits().div_ceil(8) as usize + 16;
    (0..rounds)
        .map(|round| {
            let raw = XofInput::new()
                .field(TAG_MR_WITNESS, &n_bytes)
                .u32_field(TAG_MR_WITNESS, round)
                .bytes(width);
            BigUint::from_bytes_be(&raw) % &span + 2u32
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::RandBigInt;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn toy() -> PrimeModulus {
        PrimeModulus::new(BigUint::from(43u32), BigUint::from(11u32), BigUint::from(4u32))
            .expect("toy modulus is valid")
    }

    // secp256k1's base field prime: a convenient large prime that is 3 mod 4.
    fn big_prime() -> Arc<BigUint> {
        Arc::new(
            BigUint::parse_bytes(
                b"fffffffffffffffffffffffffffffffffffffffffffffffffffffffefffffc2f",
                16,
            )
            .unwrap(),
        )
    }

    fn rng() -> ChaCha20Rng {
        ChaCha20Rng::from_seed([7u8; 32])
    }

    #[test]
    fn modulus_triple_is_validated() {
        assert!(toy().p() == &BigUint::from(43u32));
        // composite p
        assert_eq!(
            PrimeModulus::new(BigUint::from(45u32), BigUint::from(11u32), BigUint::from(4u32)),
            Err(Error::NotPrime("p"))
        );
        // composite q
        assert_eq!(
            PrimeModulus::new(BigUint::from(43u32), BigUint::from(9u32), BigUint::from(4u32)),
            Err(Error::NotPrime("q"))
        );
        // p = 13 is 1 mod 4 (13 + 1 = 2·7)
        assert!(matches!(
            PrimeModulus::new(BigUint::from(13u32), BigUint::from(7u32), BigUint::from(2u32)),
            Err(Error::InvalidParams(_))
        ));
        // h·q != p + 1
        assert!(matches!(
            PrimeModulus::new(BigUint::from(43u32), BigUint::from(11u32), BigUint::from(2u32)),
            Err(Error::InvalidParams(_))
        ));
    }

    #[test]
    fn add_wraps_canonically() {
        let m = toy();
        // add(5, 9) mod 11 -> 3
        let a = m.zq_u64(5);
        let b = m.zq_u64(9);
        assert_eq!(a.add(&b).unwrap().value(), &BigUint::from(3u32));
        // mul(6, 8) mod 43 -> 5
        let c = m.fp_u64(6);
        let d = m.fp_u64(8);
        assert_eq!(c.mul(&d).unwrap().value(), &BigUint::from(5u32));
        // subtraction wraps: 2 - 5 mod 11 -> 8
        assert_eq!(
            m.zq_u64(2).sub(&m.zq_u64(5)).unwrap().value(),
            &BigUint::from(8u32)
        );
    }

    #[test]
    fn mul_by_one_is_identity() {
        let modulus = big_prime();
        let mut rng = rng();
        for _ in 0..50 {
            let x = FpElement::new(rng.gen_biguint_below(&modulus), modulus.clone());
            let one = x.one_like();
            assert_eq!(x.mul(&one).unwrap(), x);
        }
    }

    #[test]
    fn modulus_mismatch_is_an_error() {
        let m = toy();
        let a = m.fp_u64(5);
        let b = m.zq_u64(5);
        assert_eq!(a.add(&b), Err(Error::ModulusMismatch));
        assert_eq!(a.sub(&b), Err(Error::ModulusMismatch));
        assert_eq!(a.mul(&b), Err(Error::ModulusMismatch));
    }

    #[test]
    fn inverse_examples() {
        let m = toy();
        // inv(3) mod 11 -> 4
        let three = m.zq_u64(3);
        assert_eq!(three.inv().unwrap().value(), &BigUint::from(4u32));
        // inv(1) -> 1
        let one = m.fp_u64(1);
        assert_eq!(one.inv().unwrap(), one);
        // zero is not invertible
        assert_eq!(m.fp_u64(0).inv(), Err(Error::NotInvertible));
    }

    #[test]
    fn inverse_is_an_involution() {
        let modulus = big_prime();
        let mut rng = rng();
        for _ in 0..100 {
            let mut x = FpElement::new(rng.gen_biguint_below(&modulus), modulus.clone());
            if x.is_zero() {
                x = x.one_like();
            }
            assert_eq!(x.inv().unwrap().inv().unwrap(), x);
            assert!(x.mul(&x.inv().unwrap()).unwrap().is_one());
        }
    }

    #[test]
    fn pow_examples() {
        let m = toy();
        // pow(x, 0) -> 1
        let x = m.fp_u64(17);
        assert!(x.pow(&BigUint::zero()).is_one());
        // 2^10 mod 11 -> 1 (Fermat)
        assert!(m.zq_u64(2).pow(&BigUint::from(10u32)).is_one());
    }

    #[test]
    fn fermat_little_theorem_holds() {
        let modulus = big_prime();
        let exponent = &*modulus - 1u32;
        let mut rng = rng();
        for _ in 0..25 {
            let mut g = FpElement::new(rng.gen_biguint_below(&modulus), modulus.clone());
            if g.is_zero() {
                g = g.one_like();
            }
            assert!(g.pow(&exponent).is_one());
        }
    }

    #[test]
    fn sqrt_examples() {
        let m = toy();
        // 4^11 mod 43 = 41; the smaller of {41, 2} is 2.
        let four = m.fp_u64(4);
        assert_eq!(four.sqrt().unwrap().value(), &BigUint::from(2u32));
        // sqrt(0) -> 0
        assert!(m.fp_u64(0).sqrt().unwrap().is_zero());
    }

    #[test]
    fn sqrt_agrees_with_euler_criterion_exhaustively() {
        let m = toy();
        let euler_exp = BigUint::from(21u32); // (43 - 1) / 2
        for v in 0u64..43 {
            let x = m.fp_u64(v);
            let root = x.sqrt();
            let symbol = x.pow(&euler_exp);
            let is_residue = v == 0 || symbol.is_one();
            assert_eq!(root.is_some(), is_residue, "disagreement at {v}");
            if let Some(r) = root {
                assert_eq!(r.mul(&r).unwrap(), x);
                // tie-break: never the larger root
                let other = r.neg();
                assert!(r.value() <= other.value());
            }
        }
    }

    #[test]
    fn field_axioms_hold_on_random_triples() {
        let modulus = big_prime();
        let mut rng = rng();
        for _ in 0..1000 {
            let a = FpElement::new(rng.gen_biguint_below(&modulus), modulus.clone());
            let b = FpElement::new(rng.gen_biguint_below(&modulus), modulus.clone());
            let c = FpElement::new(rng.gen_biguint_below(&modulus), modulus.clone());
            // associativity + commutativity
            let ab_c = a.add(&b).unwrap().add(&c).unwrap();
            let a_bc = a.add(&b.add(&c).unwrap()).unwrap();
            assert_eq!(ab_c, a_bc);
            assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
            // distributivity
            let lhs = a.mul(&b.add(&c).unwrap()).unwrap();
            let rhs = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
            // canonical reduction
            assert!(lhs.value() < &*modulus);
            // additive inverse
            assert!(a.add(&a.neg()).unwrap().is_zero());
        }
    }

    #[test]
    fn primality_test_known_values() {
        for p in [2u64, 3, 11, 43, 257, 65537, 4294967311] {
            assert!(is_probable_prime(&BigUint::from(p), MILLER_RABIN_ROUNDS), "{p}");
        }
        for c in [1u64, 4, 9, 45, 561, 6601, 4294967297] {
            assert!(!is_probable_prime(&BigUint::from(c), MILLER_RABIN_ROUNDS), "{c}");
        }
        // 2^127 - 1 is a Mersenne prime and exercises the big-candidate path.
        let m127 = (BigUint::one() << 127u32) - 1u32;
        assert!(is_probable_prime(&m127, MILLER_RABIN_ROUNDS));
        let m128 = (BigUint::one() << 128u32) - 1u32;
        assert!(!is_probable_prime(&m128, MILLER_RABIN_ROUNDS));
    }
}
