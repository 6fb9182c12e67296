//! Quadratic extension F_p² = F_p(i) with i² = −1, which is a field because
//! p ≡ 3 (mod 4) makes −1 a non-residue. All pairing values live here.

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::field::FpElement;

/// Element `a + b·i` of F_p².
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fp2Element {
    a: FpElement,
    b: FpElement,
}

impl Fp2Element {
    pub fn new(a: FpElement, b: FpElement) -> Result<Self> {
        if a.modulus() != b.modulus() {
            return Err(Error::ModulusMismatch);
        }
        Ok(Self { a, b })
    }

    /// Embed an F_p element as `a + 0·i`.
    pub fn from_base(a: FpElement) -> Self {
        let b = a.zero_like();
        Self { a, b }
    }

    pub fn zero_like(&self) -> Self {
        Self {
            a: self.a.zero_like(),
            b: self.b.zero_like(),
        }
    }

    pub fn one_like(&self) -> Self {
        Self {
            a: self.a.one_like(),
            b: self.b.zero_like(),
        }
    }

    pub fn real(&self) -> &FpElement {
        &self.a
    }

    pub fn imag(&self) -> &FpElement {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero()
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        Ok(Self {
            a: self.a.add(&rhs.a)?,
            b: self.b.add(&rhs.b)?,
        })
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        Ok(Self {
            a: self.a.sub(&rhs.a)?,
            b: self.b.sub(&rhs.b)?,
        })
    }

    /// Schoolbook product: (a+bi)(c+di) = (ac − bd) + (ad + bc)i.
    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        let ac = self.a.mul(&rhs.a)?;
        let bd = self.b.mul(&rhs.b)?;
        let ad = self.a.mul(&rhs.b)?;
        let bc = self.b.mul(&rhs.a)?;
        Ok(Self {
            a: ac.sub(&bd)?,
            b: ad.add(&bc)?,
        })
    }

    pub fn square(&self) -> Result<Self> {
        self.mul(self)
    }

    pub fn neg(&self) -> Self {
        Self {
            a: self.a.neg(),
            b: self.b.neg(),
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            a: self.a.clone(),
            b: self.b.neg(),
        }
    }

    /// (a+bi)⁻¹ = (a − bi) / (a² + b²).
    pub fn inv(&self) -> Result<Self> {
        let norm = self.a.mul(&self.a)?.add(&self.b.mul(&self.b)?)?;
        let norm_inv = norm.inv()?;
        Ok(Self {
            a: self.a.mul(&norm_inv)?,
            b: self.b.neg().mul(&norm_inv)?,
        })
    }

    pub fn pow(&self, exponent: &BigUint) -> Result<Self> {
        let mut acc = self.one_like();
        if exponent.is_zero() {
            return Ok(acc);
        }
        let bits = exponent.bits();
        for i in (0..bits).rev() {
            acc = acc.square()?;
            if exponent.bit(i) {
                acc = acc.mul(self)?;
            }
        }
        Ok(acc)
    }
}
