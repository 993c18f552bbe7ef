use core::cmp::Ordering;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::RealPlace;
use crate::mp::{Ctx, Real};

/// `a + b sqrt D` with exact rational coordinates.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ElementF {
    radicand: i64,
    a: BigRational,
    b: BigRational,
}

impl ElementF {
    pub fn new(radicand: i64, a: BigRational, b: BigRational) -> Self {
        ElementF { radicand, a, b }
    }

    pub fn from_ints(radicand: i64, a: i64, b: i64) -> Self {
        ElementF::new(radicand, BigRational::from_integer(a.into()), BigRational::from_integer(b.into()))
    }

    pub fn zero(radicand: i64) -> Self {
        ElementF::from_ints(radicand, 0, 0)
    }

    pub fn one(radicand: i64) -> Self {
        ElementF::from_ints(radicand, 1, 0)
    }

    pub fn radicand(&self) -> i64 {
        self.radicand
    }

    pub fn a(&self) -> &BigRational {
        &self.a
    }

    pub fn b(&self) -> &BigRational {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn conj(&self) -> ElementF {
        ElementF::new(self.radicand, self.a.clone(), -&self.b)
    }

    pub fn norm(&self) -> BigRational {
        let d = BigRational::from_integer(self.radicand.into());
        &self.a * &self.a - &d * &self.b * &self.b
    }

    pub fn trace(&self) -> BigRational {
        &self.a + &self.a
    }

    pub fn inv(&self) -> Option<ElementF> {
        let n = self.norm();
        if n.is_zero() {
            return None;
        }
        let c = self.conj();
        Some(ElementF::new(self.radicand, &c.a / &n, &c.b / &n))
    }

    pub fn pow(&self, k: i64) -> ElementF {
        let mut base = if k < 0 { self.inv().expect("invertible") } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = ElementF::one(self.radicand);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn scale(&self, r: &BigRational) -> ElementF {
        ElementF::new(self.radicand, &self.a * r, &self.b * r)
    }

    pub fn scale_int(&self, n: i64) -> ElementF {
        self.scale(&BigRational::from_integer(n.into()))
    }

    pub fn div(&self, other: &ElementF) -> Option<ElementF> {
        Some(self * &other.inv()?)
    }

    /// Exact sign of `tau(self)`: -1, 0 or 1.
    pub fn sign_at(&self, place: RealPlace) -> i32 {
        let b = if place == RealPlace::Tau1 { self.b.clone() } else { -&self.b };
        let sa = sign(&self.a);
        let sb = sign(&b);
        if sa == 0 {
            return sb;
        }
        if sb == 0 || sa == sb {
            return sa;
        }
        let d = BigRational::from_integer(self.radicand.into());
        match (&self.a * &self.a).cmp(&(&d * &b * &b)) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    pub fn is_totally_positive(&self) -> bool {
        self.sign_at(RealPlace::Tau1) > 0 && self.sign_at(RealPlace::Tau2) > 0
    }

    /// `tau(self)` in f64.
    pub fn approx(&self, place: RealPlace) -> f64 {
        let r = libm::sqrt(self.radicand as f64);
        let a = ratio_f64(&self.a);
        let b = ratio_f64(&self.b);
        if place == RealPlace::Tau1 {
            a + b * r
        } else {
            a - b * r
        }
    }

    /// `tau(self)` at the working precision of `ctx`.
    pub fn embed(&self, place: RealPlace, ctx: &Ctx) -> Real {
        let a = ctx.ratio(&self.a);
        if self.b.is_zero() {
            return a;
        }
        let b = ctx.ratio(&self.b);
        let root = ctx.int(self.radicand).sqrt();
        let br = &b * &root;
        if place == RealPlace::Tau1 {
            &a + &br
        } else {
            &a - &br
        }
    }

    /// Largest absolute numerator or denominator of the coordinates.
    pub fn height(&self) -> BigInt {
        let parts = [self.a.numer(), self.a.denom(), self.b.numer(), self.b.denom()];
        parts.iter().map(|x| x.abs()).max().unwrap_or_default()
    }
}

fn sign(r: &BigRational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_negative() {
        -1
    } else {
        1
    }
}

pub(crate) fn ratio_f64(r: &BigRational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(900) as usize;
            let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (r.denom() >> shift).to_f64().unwrap_or(1.0);
            n / d
        }
    }
}

impl<'a> Add<&'a ElementF> for &'a ElementF {
    type Output = ElementF;
    fn add(self, rhs: &'a ElementF) -> ElementF {
        debug_assert_eq!(self.radicand, rhs.radicand);
        ElementF::new(self.radicand, &self.a + &rhs.a, &self.b + &rhs.b)
    }
}

impl<'a> Sub<&'a ElementF> for &'a ElementF {
    type Output = ElementF;
    fn sub(self, rhs: &'a ElementF) -> ElementF {
        debug_assert_eq!(self.radicand, rhs.radicand);
        ElementF::new(self.radicand, &self.a - &rhs.a, &self.b - &rhs.b)
    }
}

impl<'a> Mul<&'a ElementF> for &'a ElementF {
    type Output = ElementF;
    fn mul(self, rhs: &'a ElementF) -> ElementF {
        debug_assert_eq!(self.radicand, rhs.radicand);
        let d = BigRational::from_integer(self.radicand.into());
        let a = &self.a * &rhs.a + &d * &self.b * &rhs.b;
        let b = &self.a * &rhs.b + &self.b * &rhs.a;
        ElementF::new(self.radicand, a, b)
    }
}

impl<'a> Neg for &'a ElementF {
    type Output = ElementF;
    fn neg(self) -> ElementF {
        ElementF::new(self.radicand, -&self.a, -&self.b)
    }
}

impl Add for ElementF {
    type Output = ElementF;
    fn add(self, rhs: ElementF) -> ElementF {
        &self + &rhs
    }
}

impl Sub for ElementF {
    type Output = ElementF;
    fn sub(self, rhs: ElementF) -> ElementF {
        &self - &rhs
    }
}

impl Mul for ElementF {
    type Output = ElementF;
    fn mul(self, rhs: ElementF) -> ElementF {
        &self * &rhs
    }
}

impl Neg for ElementF {
    type Output = ElementF;
    fn neg(self) -> ElementF {
        -&self
    }
}

impl core::fmt::Display for ElementF {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        if self.a.is_zero() {
            return write!(f, "({})*sqrt({})", self.b, self.radicand);
        }
        write!(f, "{} + ({})*sqrt({})", self.a, self.b, self.radicand)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_signs() {
        let x = ElementF::from_ints(5, 2, -1);
        assert_eq!(x.sign_at(RealPlace::Tau1), -1);
        assert_eq!(x.sign_at(RealPlace::Tau2), 1);
        let y = ElementF::from_ints(5, 3, 1);
        assert!(y.is_totally_positive());
        assert_eq!(y.norm(), BigRational::from_integer(4.into()));
        let z = &y * &y.inv().unwrap();
        assert!(z.is_one());
    }

    #[test]
    fn embedding_matches_f64() {
        let ctx = Ctx::new(128);
        let x = ElementF::new(5, BigRational::new(1.into(), 2.into()), BigRational::new(1.into(), 2.into()));
        let v = x.embed(RealPlace::Tau1, &ctx).to_f64();
        assert!((v - 1.618_033_988_749_895).abs() < 1e-15);
        assert!((x.approx(RealPlace::Tau2) + 0.618_033_988_749_895).abs() < 1e-15);
    }
}
