//! The supersingular curve E: y² = x³ + x over F_p. With p ≡ 3 (mod 4) the
//! curve has exactly p + 1 = h·q points, and the order-q subgroup is the
//! pairing group G₁. Affine coordinates throughout; points are immutable.

use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::field::{FpElement, PrimeModulus};
use crate::fp2::Fp2Element;

/// Affine point on the curve, or the point at infinity.
///
/// Points carry a conservative subgroup-membership hint: `true` means the
/// point is known to lie in the order-q subgroup (it came out of cofactor
/// clearing or of group operations on known members), `false` means unknown.
/// The hint never affects equality.
#[derive(Debug, Clone, Eq)]
pub struct G1Point {
    ctx: Arc<PrimeModulus>,
    coords: Option<(FpElement, FpElement)>,
    member_hint: bool,
}

impl PartialEq for G1Point {
    fn eq(&self, other: &Self) -> bool {
        self.ctx == other.ctx && self.coords == other.coords
    }
}

impl G1Point {
    /// Construct a finite point, rejecting coordinates that do not satisfy
    /// the curve equation. Subgroup membership is established eagerly so
    /// deserialized points can be used in pairings without re-checking.
    pub fn new(ctx: Arc<PrimeModulus>, x: BigUint, y: BigUint) -> Result<Self> {
        let x = ctx.fp(x);
        let y = ctx.fp(y);
        if !equation_holds(&x, &y)? {
            return Err(Error::OffCurvePoint);
        }
        let mut point = Self {
            ctx,
            coords: Some((x, y)),
            member_hint: false,
        };
        point.member_hint = point.mul_unreduced(point.ctx.q()).is_infinity();
        Ok(point)
    }

    pub fn infinity(ctx: Arc<PrimeModulus>) -> Self {
        Self {
            ctx,
            coords: None,
            member_hint: true,
        }
    }

    pub(crate) fn from_coords(ctx: Arc<PrimeModulus>, x: FpElement, y: FpElement) -> Self {
        Self::from_coords_hinted(ctx, x, y, false)
    }

    fn from_coords_hinted(
        ctx: Arc<PrimeModulus>,
        x: FpElement,
        y: FpElement,
        member_hint: bool,
    ) -> Self {
        debug_assert!(equation_holds(&x, &y).unwrap_or(false));
        Self {
            ctx,
            coords: Some((x, y)),
            member_hint,
        }
    }

    pub fn is_infinity(&self) -> bool {
        self.coords.is_none()
    }

    pub fn coords(&self) -> Option<(&FpElement, &FpElement)> {
        self.coords.as_ref().map(|(x, y)| (x, y))
    }

    pub fn modulus(&self) -> &Arc<PrimeModulus> {
        &self.ctx
    }

    fn check_same_curve(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.ctx, &other.ctx) || self.ctx == other.ctx {
            Ok(())
        } else {
            Err(Error::ModulusMismatch)
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            ctx: self.ctx.clone(),
            coords: self
                .coords
                .as_ref()
                .map(|(x, y)| (x.clone(), y.neg())),
            member_hint: self.member_hint,
        }
    }

    /// Chord-and-tangent addition.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_curve(other)?;
        let (x1, y1) = match &self.coords {
            None => return Ok(other.clone()),
            Some(c) => c,
        };
        let (x2, y2) = match &other.coords {
            None => return Ok(self.clone()),
            Some(c) => c,
        };

        let lambda = if x1 == x2 {
            if y1.add(y2)?.is_zero() {
                // P + (−P), which covers the y = 0 two-torsion doubling too.
                return Ok(Self::infinity(self.ctx.clone()));
            }
            tangent_slope(x1, y1)?
        } else {
            y2.sub(y1)?.mul(&x2.sub(x1)?.inv()?)?
        };

        let x3 = lambda.mul(&lambda)?.sub(x1)?.sub(x2)?;
        let y3 = lambda.mul(&x1.sub(&x3)?)?.sub(y1)?;
        Ok(Self::from_coords_hinted(
            self.ctx.clone(),
            x3,
            y3,
            self.member_hint && other.member_hint,
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// Scalar multiplication for subgroup points: the scalar is reduced
    /// modulo the group order q first.
    pub fn scalar_mul(&self, k: &BigUint) -> Self {
        self.mul_unreduced(&(k % self.ctx.q()))
    }

    /// Double-and-add without reduction, for scalars that are not mod-q
    /// residues (cofactor clearing, order checks on arbitrary curve points).
    pub(crate) fn mul_unreduced(&self, k: &BigUint) -> Self {
        let mut acc = Self::infinity(self.ctx.clone());
        if k.is_zero() || self.is_infinity() {
            return acc;
        }
        for i in (0..k.bits()).rev() {
            acc = acc.add(&acc).expect("same curve");
            if k.bit(i) {
                acc = acc.add(self).expect("same curve");
            }
        }
        acc
    }

    /// Multiply by the cofactor h, which always lands in the order-q
    /// subgroup: q·(h·P) = (p + 1)·P = ∞.
    pub(crate) fn clear_cofactor(&self) -> Self {
        let h = self.ctx.h().clone();
        let mut cleared = self.mul_unreduced(&h);
        cleared.member_hint = true;
        cleared
    }

    /// Whether q·P = ∞, i.e. the point lies in the pairing subgroup.
    pub fn in_subgroup(&self) -> bool {
        self.member_hint || self.mul_unreduced(self.ctx.q()).is_infinity()
    }

    /// Distortion endomorphism φ(x, y) = (−x, i·y) into E(F_p²), mapping the
    /// subgroup onto a linearly independent copy so the Tate pairing of a
    /// point with its own image is non-degenerate. Returns `None` for ∞.
    pub fn distorted(&self) -> Option<(Fp2Element, Fp2Element)> {
        self.coords.as_ref().map(|(x, y)| {
            let zero = x.zero_like();
            let dx = Fp2Element::new(x.neg(), zero.clone()).expect("same modulus");
            let dy = Fp2Element::new(zero, y.clone()).expect("same modulus");
            (dx, dy)
        })
    }
}

/// λ for doubling: (3x² + 1) / (2y).
pub(crate) fn tangent_slope(x: &FpElement, y: &FpElement) -> Result<FpElement> {
    let x2 = x.mul(x)?;
    let three_x2 = x2.add(&x2)?.add(&x2)?;
    let numerator = three_x2.add(&x.one_like())?;
    let denominator = y.add(y)?;
    numerator.mul(&denominator.inv()?)
}

fn equation_holds(x: &FpElement, y: &FpElement) -> Result<bool> {
    let lhs = y.mul(y)?;
    let rhs = x.mul(x)?.mul(x)?.add(x)?;
    Ok(lhs == rhs)
}
