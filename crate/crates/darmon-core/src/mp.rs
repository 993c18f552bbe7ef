//! Multiprecision real and complex numbers over `astro-float`.

use alloc::vec::Vec;
use core::cell::RefCell;
use core::cmp::Ordering;
use core::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_bigint::{BigInt, Sign as BigSign};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

const RM: RoundingMode = RoundingMode::ToEven;

/// Working precision plus a constant cache for transcendental functions.
///
/// Not `Sync`: threads build their own context.
pub struct Ctx {
    prec: usize,
    consts: RefCell<Consts>,
}

impl core::fmt::Debug for Ctx {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("Ctx").field("prec", &self.prec).finish()
    }
}

impl Ctx {
    pub fn new(prec_bits: usize) -> Self {
        let words = (prec_bits.max(64) + 63) / 64;
        Ctx {
            prec: words * 64,
            consts: RefCell::new(Consts::new().expect("allocating constant cache")),
        }
    }

    pub fn prec(&self) -> usize {
        self.prec
    }

    /// A context with `extra` more bits.
    pub fn widened(&self, extra: usize) -> Ctx {
        Ctx::new(self.prec + extra)
    }

    pub fn zero(&self) -> Real {
        Real(BigFloat::from_word(0, self.prec))
    }

    pub fn one(&self) -> Real {
        Real(BigFloat::from_word(1, self.prec))
    }

    pub fn int(&self, v: i64) -> Real {
        Real(BigFloat::from_i64(v, self.prec))
    }

    pub fn f64(&self, v: f64) -> Real {
        Real(BigFloat::from_f64(v, self.prec))
    }

    pub fn bigint(&self, v: &BigInt) -> Real {
        let (sign, digits) = v.to_u64_digits();
        let bits = digits.len() * 64 + 64;
        let p = self.prec.max(bits);
        let base = BigFloat::from_word(1, 128).mul(&BigFloat::from_u128(1u128 << 64, 128), 128, RM);
        let mut acc = BigFloat::from_word(0, p);
        for d in digits.iter().rev() {
            acc = acc.mul(&base, p, RM).add(&BigFloat::from_u64(*d, 64), p, RM);
        }
        if sign == BigSign::Minus {
            acc.inv_sign();
        }
        let mut r = Real(acc);
        r.0.set_precision(self.prec, RM).expect("precision");
        r
    }

    pub fn ratio(&self, v: &BigRational) -> Real {
        let n = self.bigint(v.numer());
        if v.denom() == &BigInt::from(1) {
            return n;
        }
        let d = self.bigint(v.denom());
        &n / &d
    }

    pub fn pi(&self) -> Real {
        Real(self.consts.borrow_mut().pi(self.prec, RM))
    }

    pub fn exp(&self, x: &Real) -> Real {
        Real(x.0.exp(self.prec, RM, &mut self.consts.borrow_mut()))
    }

    pub fn ln(&self, x: &Real) -> Real {
        Real(x.0.ln(self.prec, RM, &mut self.consts.borrow_mut()))
    }

    pub fn sin(&self, x: &Real) -> Real {
        Real(x.0.sin(self.prec, RM, &mut self.consts.borrow_mut()))
    }

    pub fn cos(&self, x: &Real) -> Real {
        Real(x.0.cos(self.prec, RM, &mut self.consts.borrow_mut()))
    }

    pub fn sinh(&self, x: &Real) -> Real {
        Real(x.0.sinh(self.prec, RM, &mut self.consts.borrow_mut()))
    }

    pub fn cosh(&self, x: &Real) -> Real {
        Real(x.0.cosh(self.prec, RM, &mut self.consts.borrow_mut()))
    }

    pub fn atan(&self, x: &Real) -> Real {
        Real(x.0.atan(self.prec, RM, &mut self.consts.borrow_mut()))
    }

    /// Angle of (x, y) in (-pi, pi].
    pub fn atan2(&self, y: &Real, x: &Real) -> Real {
        if x.is_zero() {
            let half = &self.pi() / &self.int(2);
            return if y.is_negative() { -half } else { half };
        }
        let base = self.atan(&(y / x));
        if !x.is_negative() {
            base
        } else if y.is_negative() {
            &base - &self.pi()
        } else {
            &base + &self.pi()
        }
    }

    /// `e(x) = exp(2 pi i x)` for complex `x`.
    pub fn e(&self, x: &Complex) -> Complex {
        let two_pi = &self.pi() * &self.int(2);
        let modulus = self.exp(&-(&two_pi * &x.im));
        let angle = &two_pi * &x.re;
        Complex::new(&modulus * &self.cos(&angle), &modulus * &self.sin(&angle))
    }

    pub fn cexp(&self, z: &Complex) -> Complex {
        let m = self.exp(&z.re);
        Complex::new(&m * &self.cos(&z.im), &m * &self.sin(&z.im))
    }

    pub fn csqrt(&self, z: &Complex) -> Complex {
        if z.im.is_zero() {
            if z.re.is_negative() {
                return Complex::new(self.zero(), (-&z.re).sqrt());
            }
            return Complex::new(z.re.sqrt(), self.zero());
        }
        let r = z.abs();
        let re = ((&r + &z.re) / self.int(2)).sqrt();
        let mut im = ((&r - &z.re) / self.int(2)).sqrt();
        if z.im.is_negative() {
            im = -im;
        }
        Complex::new(re, im)
    }

    pub fn complex(&self, re: f64, im: f64) -> Complex {
        Complex::new(self.f64(re), self.f64(im))
    }

    /// `2^k` as a real.
    pub fn pow2(&self, k: i64) -> Real {
        let two = self.int(2);
        let p = two.0.powi(k.unsigned_abs() as usize, self.prec, RM);
        if k >= 0 {
            Real(p)
        } else {
            Real(p.reciprocal(self.prec, RM))
        }
    }

    pub fn epsilon(&self) -> Real {
        self.pow2(-(self.prec as i64))
    }
}

#[derive(Clone, Debug)]
pub struct Real(pub(crate) BigFloat);

impl Real {
    pub fn prec(&self) -> usize {
        self.0.mantissa_max_bit_len().unwrap_or(64)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        !self.0.is_zero() && self.0.is_negative()
    }

    pub fn is_finite(&self) -> bool {
        !self.0.is_nan() && !self.0.is_inf()
    }

    pub fn abs(&self) -> Real {
        Real(self.0.abs())
    }

    pub fn sqrt(&self) -> Real {
        Real(self.0.sqrt(self.prec(), RM))
    }

    pub fn recip(&self) -> Real {
        Real(self.0.reciprocal(self.prec(), RM))
    }

    pub fn powi(&self, n: usize) -> Real {
        Real(self.0.powi(n, self.prec(), RM))
    }

    pub fn floor(&self) -> Real {
        Real(self.0.floor())
    }

    pub fn round(&self) -> Real {
        Real(self.0.round(0, RM))
    }

    /// Binary exponent `e` with `|x| in [2^(e-1), 2^e)`.
    pub fn exponent(&self) -> Option<i64> {
        self.0.exponent().map(|e| e as i64)
    }

    pub fn scale2(&self, k: i64) -> Real {
        let mut r = self.0.clone();
        if let Some(e) = r.exponent() {
            r.set_exponent((e as i64 + k) as astro_float::Exponent);
        }
        Real(r)
    }

    pub fn max(&self, other: &Real) -> Real {
        if self.cmp_real(other) == Ordering::Less {
            other.clone()
        } else {
            self.clone()
        }
    }

    pub fn cmp_real(&self, other: &Real) -> Ordering {
        self.0.partial_cmp(&other.0).unwrap_or(Ordering::Equal)
    }

    pub fn lt(&self, other: &Real) -> bool {
        self.cmp_real(other) == Ordering::Less
    }

    pub fn to_f64(&self) -> f64 {
        match self.0.as_raw_parts() {
            None => f64::NAN,
            Some((m, _, s, e, _)) => {
                if self.0.is_zero() || m.is_empty() {
                    return 0.0;
                }
                let top = m[m.len() - 1] as f64;
                let next = if m.len() > 1 { m[m.len() - 2] as f64 } else { 0.0 };
                let frac = top / 18446744073709551616.0 + next / 340282366920938463463374607431768211456.0;
                let v = libm::ldexp(frac, e as i32);
                if s == Sign::Neg {
                    -v
                } else {
                    v
                }
            }
        }
    }

    /// Nearest integer, exactly.
    pub fn to_bigint(&self) -> Option<BigInt> {
        if !self.is_finite() {
            return None;
        }
        let r = self.0.round(0, RM);
        if r.is_zero() {
            return Some(BigInt::zero());
        }
        let (m, _, s, e, _) = r.as_raw_parts()?;
        if e <= 0 {
            return Some(BigInt::zero());
        }
        let mut mant = BigInt::zero();
        for w in m.iter().rev() {
            mant = (mant << 64) + BigInt::from(*w);
        }
        let total_bits = (m.len() * 64) as i64;
        let shift = e as i64 - total_bits;
        let v = if shift >= 0 { mant << (shift as usize) } else { mant >> ((-shift) as usize) };
        Some(if s == Sign::Neg { -v } else { v })
    }

    pub fn to_i64(&self) -> Option<i64> {
        self.to_bigint().and_then(|b| b.to_i64())
    }

    /// Decimal rendering with `digits` significant digits.
    pub fn to_decimal(&self, digits: usize) -> alloc::string::String {
        use alloc::string::String;
        use core::fmt::Write;
        if !self.is_finite() {
            return String::from("nan");
        }
        if self.is_zero() {
            return String::from("0");
        }
        let prec = self.prec().max(64);
        let ctx = Ctx::new(prec + 32);
        let ten = ctx.int(10);
        let mut x = self.abs();
        x.0.set_precision(ctx.prec(), RM).expect("precision");
        let log10 = (x.to_f64().abs().log10_approx()).floor() as i64;
        let shift = digits as i64 - 1 - log10;
        let scale = ten.0.powi(shift.unsigned_abs() as usize, ctx.prec(), RM);
        let scaled = if shift >= 0 { x.0.mul(&scale, ctx.prec(), RM) } else { x.0.div(&scale, ctx.prec(), RM) };
        let mant = Real(scaled).to_bigint().unwrap_or_default();
        let mut s = mant.abs().to_str_radix(10);
        let mut exp10 = log10;
        if s.len() > digits {
            s.truncate(digits);
            exp10 += 1;
        }
        let mut out = String::new();
        if self.is_negative() {
            out.push('-');
        }
        out.push_str(&s[..1]);
        if s.len() > 1 {
            out.push('.');
            out.push_str(&s[1..]);
        }
        let _ = write!(out, "e{}", exp10);
        out
    }
}

trait Log10Approx {
    fn log10_approx(self) -> f64;
}

impl Log10Approx for f64 {
    fn log10_approx(self) -> f64 {
        libm::log10(self)
    }
}

fn prec2(a: &Real, b: &Real) -> usize {
    a.prec().max(b.prec())
}

macro_rules! binop {
    ($tr:ident, $m:ident) => {
        impl<'a> $tr<&'a Real> for &'a Real {
            type Output = Real;
            fn $m(self, rhs: &'a Real) -> Real {
                Real(self.0.$m(&rhs.0, prec2(self, rhs), RM))
            }
        }
        impl $tr<Real> for Real {
            type Output = Real;
            fn $m(self, rhs: Real) -> Real {
                Real(self.0.$m(&rhs.0, prec2(&self, &rhs), RM))
            }
        }
        impl<'a> $tr<&'a Real> for Real {
            type Output = Real;
            fn $m(self, rhs: &'a Real) -> Real {
                Real(self.0.$m(&rhs.0, prec2(&self, rhs), RM))
            }
        }
        impl<'a> $tr<Real> for &'a Real {
            type Output = Real;
            fn $m(self, rhs: Real) -> Real {
                Real(self.0.$m(&rhs.0, prec2(self, &rhs), RM))
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(BigFloat::neg(&self.0))
    }
}

impl<'a> Neg for &'a Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(BigFloat::neg(&self.0))
    }
}

#[derive(Clone, Debug)]
pub struct Complex {
    pub re: Real,
    pub im: Real,
}

impl Complex {
    pub fn new(re: Real, im: Real) -> Self {
        Complex { re, im }
    }

    pub fn from_real(re: Real) -> Self {
        let im = Real(BigFloat::from_word(0, re.prec()));
        Complex { re, im }
    }

    pub fn zero(ctx: &Ctx) -> Self {
        Complex::new(ctx.zero(), ctx.zero())
    }

    pub fn one(ctx: &Ctx) -> Self {
        Complex::new(ctx.one(), ctx.zero())
    }

    pub fn i(ctx: &Ctx) -> Self {
        Complex::new(ctx.zero(), ctx.one())
    }

    pub fn conj(&self) -> Complex {
        Complex::new(self.re.clone(), -&self.im)
    }

    pub fn norm_sqr(&self) -> Real {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }

    pub fn abs(&self) -> Real {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, s: &Real) -> Complex {
        Complex::new(&self.re * s, &self.im * s)
    }

    pub fn mul_i(&self) -> Complex {
        Complex::new(-&self.im, self.re.clone())
    }

    pub fn recip(&self) -> Complex {
        let n = self.norm_sqr();
        Complex::new(&self.re / &n, -(&self.im / &n))
    }

    pub fn powi(&self, n: i64) -> Complex {
        let mut base = if n < 0 { self.recip() } else { self.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = Complex::from_real(Real(BigFloat::from_word(1, self.re.prec())));
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl<'a> Add<&'a Complex> for &'a Complex {
    type Output = Complex;
    fn add(self, rhs: &'a Complex) -> Complex {
        Complex::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl<'a> Sub<&'a Complex> for &'a Complex {
    type Output = Complex;
    fn sub(self, rhs: &'a Complex) -> Complex {
        Complex::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl<'a> Mul<&'a Complex> for &'a Complex {
    type Output = Complex;
    fn mul(self, rhs: &'a Complex) -> Complex {
        let re = &(&self.re * &rhs.re) - &(&self.im * &rhs.im);
        let im = &(&self.re * &rhs.im) + &(&self.im * &rhs.re);
        Complex::new(re, im)
    }
}

impl<'a> Div<&'a Complex> for &'a Complex {
    type Output = Complex;
    fn div(self, rhs: &'a Complex) -> Complex {
        self * &rhs.recip()
    }
}

impl Neg for &Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        Complex::new(-&self.re, -&self.im)
    }
}

impl Add for Complex {
    type Output = Complex;
    fn add(self, rhs: Complex) -> Complex {
        &self + &rhs
    }
}

impl Sub for Complex {
    type Output = Complex;
    fn sub(self, rhs: Complex) -> Complex {
        &self - &rhs
    }
}

impl Mul for Complex {
    type Output = Complex;
    fn mul(self, rhs: Complex) -> Complex {
        &self * &rhs
    }
}

/// Neumaier-compensated running sum of complex terms.
#[derive(Clone, Debug)]
pub struct CompensatedSum {
    re: (Real, Real),
    im: (Real, Real),
}

fn two_sum_step(acc: &mut (Real, Real), x: &Real) {
    let t = &acc.0 + x;
    let c = if acc.0.abs().lt(&x.abs()) { &(x - &t) + &acc.0 } else { &(&acc.0 - &t) + x };
    acc.0 = t;
    acc.1 = &acc.1 + &c;
}

impl CompensatedSum {
    pub fn new(ctx: &Ctx) -> Self {
        CompensatedSum { re: (ctx.zero(), ctx.zero()), im: (ctx.zero(), ctx.zero()) }
    }

    pub fn add(&mut self, z: &Complex) {
        two_sum_step(&mut self.re, &z.re);
        two_sum_step(&mut self.im, &z.im);
    }

    pub fn add_sum(&mut self, other: &CompensatedSum) {
        self.add(&other.value());
    }

    pub fn value(&self) -> Complex {
        Complex::new(&self.re.0 + &self.re.1, &self.im.0 + &self.im.1)
    }
}

/// Real arithmetic-geometric mean.
pub fn agm(ctx: &Ctx, a: &Real, b: &Real) -> Real {
    let mut a = a.clone();
    let mut b = b.clone();
    let two = ctx.int(2);
    let tol = ctx.pow2(-(ctx.prec() as i64) + 4);
    for _ in 0..200 {
        let diff = (&a - &b).abs();
        if !(tol.clone() * a.abs()).lt(&diff) {
            break;
        }
        let next_a = &(&a + &b) / &two;
        let next_b = (&a * &b).sqrt();
        a = next_a;
        b = next_b;
    }
    &(&a + &b) / &two
}

/// exp-sinh quadrature of `f` over `[0, inf)`.
///
/// Returns the estimate and the difference between the last two levels.
pub fn integrate_half_line<F>(ctx: &Ctx, f: F) -> (Real, Real)
where
    F: Fn(&Real) -> Real,
{
    let half_pi = &ctx.pi() / &ctx.int(2);
    let tiny = ctx.pow2(-(ctx.prec() as i64) - 20);
    let node = |s: &Real| -> Option<Real> {
        let es = ctx.exp(s);
        let esi = es.recip();
        let sh = &(&es - &esi) / &ctx.int(2);
        let ch = &(&es + &esi) / &ctx.int(2);
        let t = ctx.exp(&(&half_pi * &sh));
        let w = &(&half_pi * &ch) * &t;
        let v = &f(&t) * &w;
        if !v.is_finite() {
            return None;
        }
        Some(v)
    };
    refine_trapezoid(ctx, &node, &tiny)
}

fn refine_trapezoid<G>(ctx: &Ctx, node: &G, tiny: &Real) -> (Real, Real)
where
    G: Fn(&Real) -> Option<Real>,
{
    let mut h = ctx.f64(0.5);
    let mut sum = sum_nodes(ctx, node, &h, tiny, false);
    let mut est = &sum * &h;
    let mut delta = est.abs();
    for _ in 0..14 {
        h = &h / &ctx.int(2);
        sum = &sum + &sum_nodes(ctx, node, &h, tiny, true);
        let next = &sum * &h;
        delta = (&next - &est).abs();
        est = next;
        if delta.lt(&(&est.abs() * &ctx.pow2(-(ctx.prec() as i64) + 8))) {
            break;
        }
    }
    (est, delta)
}

// Sum of f(k h) over all integers k (or over odd k only) until terms are negligible.
fn sum_nodes<G>(ctx: &Ctx, node: &G, h: &Real, tiny: &Real, odd_only: bool) -> Real
where
    G: Fn(&Real) -> Option<Real>,
{
    let mut acc = ctx.zero();
    let step: i64 = if odd_only { 2 } else { 1 };
    let start: i64 = if odd_only { 1 } else { 0 };
    if !odd_only {
        if let Some(v) = node(&ctx.zero()) {
            acc = &acc + &v;
        }
    }
    for dir in [1i64, -1i64] {
        let mut k = start.max(1);
        let mut small_run = 0;
        loop {
            let s = &ctx.int(dir * k) * h;
            if s.abs().to_f64() > 8.0 {
                break;
            }
            match node(&s) {
                Some(v) => {
                    let negligible = v.abs().lt(tiny);
                    acc = &acc + &v;
                    if negligible {
                        small_run += 1;
                        if small_run >= 3 {
                            break;
                        }
                    } else {
                        small_run = 0;
                    }
                }
                None => break,
            }
            k += step;
        }
    }
    acc
}

/// tanh-sinh quadrature over a finite interval `[a, b]`.
///
/// `f` receives `(x, x - a, b - x)` so that endpoint singularities can be
/// evaluated without cancellation.
pub fn integrate_interval<F>(ctx: &Ctx, a: &Real, b: &Real, f: F) -> (Real, Real)
where
    F: Fn(&Real, &Real, &Real) -> Real,
{
    let half_pi = &ctx.pi() / &ctx.int(2);
    let half_len = &(b - a) / &ctx.int(2);
    let mid = &(a + b) / &ctx.int(2);
    let tiny = ctx.pow2(-(ctx.prec() as i64) - 20);
    let node = |s: &Real| -> Option<Real> {
        let es = ctx.exp(s);
        let esi = es.recip();
        let sh = &(&es - &esi) / &ctx.int(2);
        let ch = &(&es + &esi) / &ctx.int(2);
        let u = &half_pi * &sh;
        let eu = ctx.exp(&u);
        let cu = &(&eu + &eu.recip()) / &ctx.int(2);
        // 1 - tanh(u) = 2 / (1 + e^{2u}), 1 + tanh(u) = 2 / (1 + e^{-2u})
        let e2u = &eu * &eu;
        let one = ctx.one();
        let one_minus = &ctx.int(2) / &(&one + &e2u);
        let one_plus = &ctx.int(2) / &(&one + &e2u.recip());
        let dist_a = &half_len * &one_plus;
        let dist_b = &half_len * &one_minus;
        if dist_a.is_zero() || dist_b.is_zero() {
            return None;
        }
        let x = &mid + &(&half_len * &(&one_plus - &one));
        let w = &(&half_len * &(&half_pi * &ch)) / &(&cu * &cu);
        let v = &f(&x, &dist_a, &dist_b) * &w;
        if !v.is_finite() {
            return None;
        }
        Some(v)
    };
    refine_trapezoid(ctx, &node, &tiny)
}

/// Real roots of a cubic `4x^3 - g2 x - g3`, sorted decreasingly, or the single
/// real root followed by the complex pair.
pub fn weierstrass_roots(ctx: &Ctx, g2: &Real, g3: &Real) -> CubicRoots {
    // Newton from a Cardano seed in f64, refined at full precision.
    let g2f = g2.to_f64();
    let g3f = g3.to_f64();
    let seeds = cubic_seeds_f64(g2f, g3f);
    let refine = |x0: f64| -> Real {
        let mut x = ctx.f64(x0);
        for _ in 0..200 {
            let fx = &(&(&ctx.int(4) * &(&x * &(&x * &x))) - &(g2 * &x)) - g3;
            let dfx = &(&ctx.int(12) * &(&x * &x)) - g2;
            if dfx.is_zero() {
                break;
            }
            let step = &fx / &dfx;
            x = &x - &step;
            let scale = x.abs().max(&ctx.one());
            if step.abs().lt(&(&scale * &ctx.pow2(-(ctx.prec() as i64) + 2))) {
                break;
            }
        }
        x
    };
    match seeds {
        Seeds::Three(a, b, c) => {
            let mut r: Vec<Real> = [a, b, c].iter().map(|&s| refine(s)).collect();
            r.sort_by(|x, y| y.cmp_real(x));
            CubicRoots::Real([r[0].clone(), r[1].clone(), r[2].clone()])
        }
        Seeds::One(a) => {
            let e1 = refine(a);
            // remaining quadratic: x^2 + e1 x + (e1^2 - g2/4)
            let c = &(&e1 * &e1) - &(g2 / &ctx.int(4));
            let disc = &(&e1 * &e1) - &(&ctx.int(4) * &c);
            let re = -(&e1 / &ctx.int(2));
            let im = ((-disc).sqrt()) / ctx.int(2);
            CubicRoots::Complex(e1, Complex::new(re, im))
        }
    }
}

#[derive(Clone, Debug)]
pub enum CubicRoots {
    /// e1 > e2 > e3.
    Real([Real; 3]),
    /// The real root and the root with positive imaginary part.
    Complex(Real, Complex),
}

enum Seeds {
    Three(f64, f64, f64),
    One(f64),
}

fn cubic_seeds_f64(g2: f64, g3: f64) -> Seeds {
    // x^3 + p x + q with p = -g2/4, q = -g3/4
    let p = -g2 / 4.0;
    let q = -g3 / 4.0;
    let disc = -(4.0 * p * p * p + 27.0 * q * q);
    if disc > 0.0 {
        let m = 2.0 * libm::sqrt(-p / 3.0);
        let theta = libm::acos((3.0 * q / (p * m)).clamp(-1.0, 1.0)) / 3.0;
        let two_pi_3 = 2.0 * core::f64::consts::PI / 3.0;
        Seeds::Three(m * libm::cos(theta), m * libm::cos(theta - two_pi_3), m * libm::cos(theta - 2.0 * two_pi_3))
    } else {
        let s = libm::sqrt(q * q / 4.0 + p * p * p / 27.0);
        let u = libm::cbrt(-q / 2.0 + s);
        let v = libm::cbrt(-q / 2.0 - s);
        Seeds::One(u + v)
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Real) -> bool {
        self.cmp_real(other) == Ordering::Equal
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_and_exp() {
        let ctx = Ctx::new(128);
        let pi = ctx.pi();
        assert!((pi.to_f64() - core::f64::consts::PI).abs() < 1e-15);
        let e = ctx.exp(&ctx.one());
        assert!((e.to_f64() - core::f64::consts::E).abs() < 1e-15);
    }

    #[test]
    fn bigint_roundtrip() {
        let ctx = Ctx::new(256);
        let v: BigInt = BigInt::from(12345678901234567890u64) * BigInt::from(987654321u64) - BigInt::from(5);
        let r = ctx.bigint(&v);
        assert_eq!(r.to_bigint().unwrap(), v);
        let n = ctx.bigint(&(-v.clone()));
        assert_eq!(n.to_bigint().unwrap(), -v);
        assert_eq!(ctx.int(-7).to_i64(), Some(-7));
        assert_eq!(ctx.f64(2.5).round().to_i64(), Some(2));
    }

    #[test]
    fn half_line_quadrature() {
        let ctx = Ctx::new(128);
        // int_0^inf dt/(1+t^2) = pi/2
        let (v, _) = integrate_half_line(&ctx, |t| (&ctx.one() + &(t * t)).recip());
        let err = (&v - &(&ctx.pi() / &ctx.int(2))).abs();
        assert!(err.to_f64() < 1e-30, "{}", err.to_f64());
    }

    #[test]
    fn interval_quadrature_endpoint_singularity() {
        let ctx = Ctx::new(128);
        // int_0^1 dx / sqrt(x (1-x)) = pi
        let (v, _) = integrate_interval(&ctx, &ctx.zero(), &ctx.one(), |_, da, db| (da * db).sqrt().recip());
        let err = (&v - &ctx.pi()).abs();
        assert!(err.to_f64() < 1e-30, "{}", err.to_f64());
    }

    #[test]
    fn agm_of_one_and_sqrt2() {
        let ctx = Ctx::new(128);
        let g = agm(&ctx, &ctx.one(), &ctx.int(2).sqrt());
        assert!((g.to_f64() - 1.198_140_234_735_592_2).abs() < 1e-15);
    }

    #[test]
    fn decimal_rendering() {
        let ctx = Ctx::new(128);
        assert_eq!(ctx.pi().to_decimal(10), "3.141592654e0");
        assert_eq!((-ctx.f64(0.00125)).to_decimal(3), "-1.25e-3");
    }
}
