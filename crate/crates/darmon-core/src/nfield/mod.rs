//! Real quadratic fields `F = Q(sqrt D)` with narrow class number one, their
//! ideals, residue rings, quadratic extensions and local symbols.

mod element;
mod ext;
mod ideal;
mod local;
mod residue;

pub use element::ElementF;
pub use ext::{ArchType, ElementK, QuadExtension};
pub use ideal::{factor_integer, is_prime_u64, principal_hnf_coords, splitting_type, valuation, Hnf, IdealF, PrimeDecomposition, PrimeKind};
pub use local::{hilbert_by_norms, hilbert_symbol, norm_classes, prime_splitting, Place, SquareClasses, Splitting};
pub use residue::{Residue, ResidueRing};

use alloc::vec::Vec;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Squarefree `D < 100` with narrow class number one.
pub const NARROW_CLASS_ONE: [i64; 12] = [2, 5, 13, 17, 29, 37, 41, 53, 61, 73, 89, 97];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("radicand {0} is not squarefree")]
    NotSquarefree(i64),
    #[error("radicand {0} must exceed 1")]
    RadicandTooSmall(i64),
    #[error("narrow class number of Q(sqrt {0}) is not one")]
    NarrowClassNumberNotOne(i64),
    #[error("fundamental unit search exceeded {0} partial quotients")]
    UnitSearchExceeded(usize),
    #[error("element is not integral")]
    NotIntegral,
    #[error("zero has no ideal")]
    ZeroIdeal,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("search bound {bound} exceeded while {what}")]
    SearchBoundExceeded { what: &'static str, bound: u64 },
    #[error("extension is not admissible: {0}")]
    NotAdmissible(&'static str),
}

/// One of the two real embeddings; `Tau1` sends `sqrt D` to the positive root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RealPlace {
    Tau1,
    Tau2,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealQuadraticField {
    radicand: i64,
    disc: i64,
    omega_trace: i64,
    omega_sq_const: i64,
    fund_unit: ElementF,
    positive_unit: ElementF,
    different_gen: ElementF,
    narrow_h1: bool,
}

pub fn is_squarefree(n: i64) -> bool {
    let n = n.unsigned_abs();
    let mut p = 2u64;
    while p * p <= n {
        if n % (p * p) == 0 {
            return false;
        }
        p += 1;
    }
    true
}

pub fn isqrt(n: u128) -> u128 {
    if n == 0 {
        return 0;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// Checked field constructor for pipeline use.
pub fn make_field(d: i64) -> Result<RealQuadraticField, FieldError> {
    let f = RealQuadraticField::new(d)?;
    if !f.narrow_h1 {
        return Err(FieldError::NarrowClassNumberNotOne(d));
    }
    Ok(f)
}

impl RealQuadraticField {
    /// Builds the field; `narrow_h1` reports table membership.
    pub fn new(d: i64) -> Result<Self, FieldError> {
        if d <= 1 {
            return Err(FieldError::RadicandTooSmall(d));
        }
        if !is_squarefree(d) {
            return Err(FieldError::NotSquarefree(d));
        }
        let one_mod_four = d.rem_euclid(4) == 1;
        let (disc, omega_trace, omega_sq_const) = if one_mod_four { (d, 1, (d - 1) / 4) } else { (4 * d, 0, d) };
        let fund_unit = fundamental_unit(d, one_mod_four)?;
        let positive_unit = if fund_unit.norm().is_negative() { &fund_unit * &fund_unit } else { fund_unit.clone() };
        let mut field = RealQuadraticField {
            radicand: d,
            disc,
            omega_trace,
            omega_sq_const,
            fund_unit: fund_unit.clone(),
            positive_unit,
            different_gen: ElementF::one(d),
            narrow_h1: NARROW_CLASS_ONE.contains(&d),
        };
        let root = ElementF::new(d, BigRational::zero(), BigRational::one());
        let base = if one_mod_four { root } else { root.scale_int(2) };
        field.different_gen = match field.totally_positive_associate(&base) {
            Some(gen) => field.normalize_generator(&gen),
            None => base,
        };
        Ok(field)
    }

    pub fn radicand(&self) -> i64 {
        self.radicand
    }

    pub fn disc(&self) -> i64 {
        self.disc
    }

    pub fn fund_unit(&self) -> &ElementF {
        &self.fund_unit
    }

    /// Generator of the totally positive units.
    pub fn positive_unit(&self) -> &ElementF {
        &self.positive_unit
    }

    pub fn different_gen(&self) -> &ElementF {
        &self.different_gen
    }

    pub fn narrow_h1(&self) -> bool {
        self.narrow_h1
    }

    /// `omega^2 = t omega + s` for the integral basis `(1, omega)`.
    pub fn omega_relation(&self) -> (i64, i64) {
        (self.omega_trace, self.omega_sq_const)
    }

    pub fn omega(&self) -> ElementF {
        self.from_coords(&BigInt::zero(), &BigInt::one())
    }

    pub fn elt(&self, a: i64, b: i64) -> ElementF {
        ElementF::from_ints(self.radicand, a, b)
    }

    pub fn rational(&self, num: i64, den: i64) -> ElementF {
        ElementF::new(self.radicand, BigRational::new(num.into(), den.into()), BigRational::zero())
    }

    pub fn int(&self, n: i64) -> ElementF {
        ElementF::from_ints(self.radicand, n, 0)
    }

    /// `x + y omega`.
    pub fn from_coords(&self, x: &BigInt, y: &BigInt) -> ElementF {
        let xr = BigRational::from_integer(x.clone());
        let yr = BigRational::from_integer(y.clone());
        if self.omega_trace == 1 {
            let half = BigRational::new(1.into(), 2.into());
            ElementF::new(self.radicand, &xr + &(&yr * &half), &yr * &half)
        } else {
            ElementF::new(self.radicand, xr, yr)
        }
    }

    pub fn from_small_coords(&self, x: i64, y: i64) -> ElementF {
        self.from_coords(&BigInt::from(x), &BigInt::from(y))
    }

    /// Coordinates in the basis `(1, omega)`, rational in general.
    pub fn rational_coords(&self, e: &ElementF) -> (BigRational, BigRational) {
        if self.omega_trace == 1 {
            let y = e.b() * BigRational::from_integer(2.into());
            (e.a() - e.b(), y)
        } else {
            (e.a().clone(), e.b().clone())
        }
    }

    /// Integer coordinates, or `None` when `e` is not in `O_F`.
    pub fn coords(&self, e: &ElementF) -> Option<(BigInt, BigInt)> {
        let (x, y) = self.rational_coords(e);
        if x.is_integer() && y.is_integer() {
            Some((x.to_integer(), y.to_integer()))
        } else {
            None
        }
    }

    pub fn small_coords(&self, e: &ElementF) -> Option<(i64, i64)> {
        let (x, y) = self.coords(e)?;
        Some((x.to_i64()?, y.to_i64()?))
    }

    pub fn is_integral(&self, e: &ElementF) -> bool {
        self.coords(e).is_some()
    }

    /// Smallest positive integer `m` with `m e` integral.
    pub fn denominator(&self, e: &ElementF) -> BigInt {
        let (x, y) = self.rational_coords(e);
        x.denom().lcm(y.denom())
    }

    /// A totally positive associate `u e` with `u` a unit, if one exists.
    pub fn totally_positive_associate(&self, e: &ElementF) -> Option<ElementF> {
        if e.is_zero() {
            return None;
        }
        let mut g = e.clone();
        if g.norm().is_negative() {
            if !self.fund_unit.norm().is_negative() {
                return None;
            }
            g = &g * &self.fund_unit;
        }
        if g.sign_at(RealPlace::Tau1) < 0 {
            g = -&g;
        }
        Some(g)
    }

    /// Canonical representative of a totally positive `g` modulo totally
    /// positive units: the ratio `tau1(g)/tau2(g)` is placed in `[1, tau1(u)^2)`.
    pub fn normalize_generator(&self, g: &ElementF) -> ElementF {
        assert!(g.is_totally_positive(), "normalizing a generator that is not totally positive");
        let u = &self.positive_unit;
        let u_inv = u.inv().expect("unit");
        let r1 = g.approx(RealPlace::Tau1).abs();
        let r2 = g.approx(RealPlace::Tau2).abs();
        let mut out = g.clone();
        if r1 > 0.0 && r2 > 0.0 {
            let log_ratio = libm::log(r1 / r2);
            let step = 2.0 * libm::log(u.approx(RealPlace::Tau1));
            let k = -libm::floor(log_ratio / step) as i64;
            if k != 0 {
                out = &out * &u.pow(k);
            }
        }
        while out.b().is_negative() {
            out = &out * u;
        }
        loop {
            let down = &out * &u_inv;
            if down.b().is_negative() {
                break;
            }
            out = down;
        }
        out
    }

    /// Totally positive canonical generator of `(e)`.
    pub fn canonical_generator(&self, e: &ElementF) -> Option<ElementF> {
        let g = self.totally_positive_associate(e)?;
        Some(self.normalize_generator(&g))
    }

    /// `|N(x + y omega)|` for small integral coordinates.
    pub fn small_norm(&self, x: i64, y: i64) -> i128 {
        let (t, s) = (self.omega_trace as i128, self.omega_sq_const as i128);
        let (x, y) = (x as i128, y as i128);
        x * x + t * x * y - s * y * y
    }

    /// `tau_j(omega)` in f64.
    pub fn omega_approx(&self, place: RealPlace) -> f64 {
        let r = libm::sqrt(self.radicand as f64);
        let s = if place == RealPlace::Tau1 { r } else { -r };
        if self.omega_trace == 1 {
            (1.0 + s) / 2.0
        } else {
            s
        }
    }

    /// Coordinates `(x, y)` of all `x + y omega` with `tau1` in `[lo1, hi1]`
    /// and `tau2` in `[lo2, hi2]`, up to a relative slack of `1e-9`.
    pub fn box_elements(&self, lo1: f64, hi1: f64, lo2: f64, hi2: f64) -> Vec<(i64, i64)> {
        let w1 = self.omega_approx(RealPlace::Tau1);
        let w2 = self.omega_approx(RealPlace::Tau2);
        let slack = 1e-9 * (1.0 + lo1.abs() + hi1.abs() + lo2.abs() + hi2.abs());
        let (lo1, hi1, lo2, hi2) = (lo1 - slack, hi1 + slack, lo2 - slack, hi2 + slack);
        let ymin = libm::ceil((lo1 - hi2) / (w1 - w2)) as i64;
        let ymax = libm::floor((hi1 - lo2) / (w1 - w2)) as i64;
        let mut out = Vec::new();
        for y in ymin..=ymax {
            let yf = y as f64;
            let xlo = libm::ceil(f64::max(lo1 - yf * w1, lo2 - yf * w2)) as i64;
            let xhi = libm::floor(f64::min(hi1 - yf * w1, hi2 - yf * w2)) as i64;
            for x in xlo..=xhi {
                out.push((x, y));
            }
        }
        out
    }

    /// All units `x + y omega` with `|coords| <= bound`, brute force.
    pub fn small_units(&self, bound: i64) -> Vec<(i64, i64)> {
        let mut out = Vec::new();
        for x in -bound..=bound {
            for y in -bound..=bound {
                if self.small_norm(x, y).abs() == 1 {
                    out.push((x, y));
                }
            }
        }
        out
    }
}

// Continued fraction of (sqrt D - 1)/2 or sqrt D; the first convergent p/q
// with N(p + q omega) = +-1 gives the fundamental unit.
fn fundamental_unit(d: i64, one_mod_four: bool) -> Result<ElementF, FieldError> {
    const LIMIT: usize = 100_000;
    let root = isqrt(d as u128) as i64;
    let (mut p_num, mut q_den): (i64, i64) = if one_mod_four { (-1, 2) } else { (0, 1) };
    let (mut p_prev, mut p_cur) = (BigInt::zero(), BigInt::one());
    let (mut q_prev, mut q_cur) = (BigInt::one(), BigInt::zero());
    let (t, s) = if one_mod_four { (BigInt::one(), BigInt::from((d - 1) / 4)) } else { (BigInt::zero(), BigInt::from(d)) };
    for _ in 0..LIMIT {
        let a = (p_num + root).div_euclid(q_den);
        let p_next = &p_cur * a + &p_prev;
        let q_next = &q_cur * a + &q_prev;
        p_prev = core::mem::replace(&mut p_cur, p_next);
        q_prev = core::mem::replace(&mut q_cur, q_next);
        let n = &p_cur * &p_cur + &t * &p_cur * &q_cur - &s * &q_cur * &q_cur;
        if n.abs().is_one() && !q_cur.is_zero() {
            let x = BigRational::from_integer(p_cur.clone());
            let y = BigRational::from_integer(q_cur.clone());
            let unit = if one_mod_four {
                let half = BigRational::new(1.into(), 2.into());
                ElementF::new(d, &x + &(&y * &half), &y * &half)
            } else {
                ElementF::new(d, x, y)
            };
            return Ok(unit);
        }
        p_num = a * q_den - p_num;
        q_den = (d - p_num * p_num) / q_den;
    }
    Err(FieldError::UnitSearchExceeded(LIMIT))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn units_of_small_fields() {
        let f5 = make_field(5).unwrap();
        assert_eq!(f5.fund_unit(), &f5.from_small_coords(0, 1));
        assert_eq!(f5.fund_unit().norm(), BigRational::from_integer((-1).into()));
        let f2 = make_field(2).unwrap();
        assert_eq!(f2.fund_unit(), &f2.elt(1, 1));
        assert!(matches!(make_field(4), Err(FieldError::NotSquarefree(4))));
        assert!(matches!(make_field(3), Err(FieldError::NarrowClassNumberNotOne(3))));
        let f3 = RealQuadraticField::new(3).unwrap();
        assert_eq!(f3.fund_unit(), &f3.elt(2, 1));
    }

    #[test]
    fn different_generator_is_totally_positive() {
        for &d in NARROW_CLASS_ONE.iter() {
            let f = make_field(d).unwrap();
            let g = f.different_gen();
            assert!(g.is_totally_positive(), "D={d}");
            let expected = if d % 4 == 1 { d } else { 4 * d };
            assert_eq!(g.norm(), BigRational::from_integer(expected.into()), "D={d}");
        }
        let f = make_field(5).unwrap();
        assert_eq!(f.different_gen(), &ElementF::new(5, BigRational::new(5.into(), 2.into()), BigRational::new(1.into(), 2.into())));
    }

    #[test]
    fn normalization_is_idempotent_and_in_range() {
        let f = make_field(5).unwrap();
        let u = f.positive_unit().clone();
        let g = f.elt(7, 2);
        let n = f.normalize_generator(&g);
        assert_eq!(f.normalize_generator(&(&n * &u.pow(5))), n);
        assert_eq!(f.normalize_generator(&(&n * &u.pow(-3))), n);
        assert!(!n.b().is_negative());
        assert!((&n * &u.inv().unwrap()).b().is_negative());
    }
}
