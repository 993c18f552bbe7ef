use core::ops::{Add, Mul, Neg, Sub};

use alloc::vec::Vec;

use super::ideal::{valuation, IdealF};
use super::local::{hilbert_symbol, prime_splitting, Place, Splitting};
use super::{ElementF, FieldError, RealPlace, RealQuadraticField};
use crate::mp::{Complex, Ctx};

/// `alpha + beta sqrt(delta)` in `K = F(sqrt delta)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ElementK {
    alpha: ElementF,
    beta: ElementF,
    delta: ElementF,
}

impl ElementK {
    pub fn new(alpha: ElementF, beta: ElementF, delta: &ElementF) -> ElementK {
        ElementK { alpha, beta, delta: delta.clone() }
    }

    pub fn from_base(x: &ElementF, delta: &ElementF) -> ElementK {
        ElementK::new(x.clone(), ElementF::zero(x.radicand()), delta)
    }

    pub fn alpha(&self) -> &ElementF {
        &self.alpha
    }

    pub fn beta(&self) -> &ElementF {
        &self.beta
    }

    pub fn delta(&self) -> &ElementF {
        &self.delta
    }

    pub fn conj(&self) -> ElementK {
        ElementK::new(self.alpha.clone(), -&self.beta, &self.delta)
    }

    /// `N_{K/F}`.
    pub fn rel_norm(&self) -> ElementF {
        &(&self.alpha * &self.alpha) - &(&(&self.delta * &self.beta) * &self.beta)
    }

    pub fn rel_trace(&self) -> ElementF {
        self.alpha.scale_int(2)
    }

    pub fn is_zero(&self) -> bool {
        self.alpha.is_zero() && self.beta.is_zero()
    }

    pub fn inv(&self) -> Option<ElementK> {
        let n = self.rel_norm().inv()?;
        let c = self.conj();
        Some(ElementK::new(&c.alpha * &n, &c.beta * &n, &self.delta))
    }

    pub fn pow(&self, k: i64) -> ElementK {
        let mut base = if k < 0 { self.inv().expect("invertible") } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = ElementK::from_base(&ElementF::one(self.alpha.radicand()), &self.delta);
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

    /// Image at `tau1`, where `delta` is negative: `sqrt delta -> i sqrt|delta|`.
    pub fn embed_complex(&self, ctx: &Ctx) -> Complex {
        let a = self.alpha.embed(RealPlace::Tau1, ctx);
        let b = self.beta.embed(RealPlace::Tau1, ctx);
        let d = self.delta.embed(RealPlace::Tau1, ctx).abs().sqrt();
        Complex::new(a, &b * &d)
    }

    /// The two real images above `tau2`, `sqrt delta -> +sqrt` first.
    pub fn embed_real_pair(&self, ctx: &Ctx) -> (crate::mp::Real, crate::mp::Real) {
        let a = self.alpha.embed(RealPlace::Tau2, ctx);
        let b = self.beta.embed(RealPlace::Tau2, ctx);
        let d = self.delta.embed(RealPlace::Tau2, ctx).abs().sqrt();
        let bd = &b * &d;
        (&a + &bd, &a - &bd)
    }

    pub fn approx_real_pair(&self) -> (f64, f64) {
        let a = self.alpha.approx(RealPlace::Tau2);
        let b = self.beta.approx(RealPlace::Tau2);
        let d = libm::sqrt(libm::fabs(self.delta.approx(RealPlace::Tau2)));
        (a + b * d, a - b * d)
    }

    pub fn approx_complex(&self) -> (f64, f64) {
        let a = self.alpha.approx(RealPlace::Tau1);
        let b = self.beta.approx(RealPlace::Tau1);
        let d = libm::sqrt(libm::fabs(self.delta.approx(RealPlace::Tau1)));
        (a, b * d)
    }
}

impl<'a> Add<&'a ElementK> for &'a ElementK {
    type Output = ElementK;
    fn add(self, rhs: &'a ElementK) -> ElementK {
        ElementK::new(&self.alpha + &rhs.alpha, &self.beta + &rhs.beta, &self.delta)
    }
}

impl<'a> Sub<&'a ElementK> for &'a ElementK {
    type Output = ElementK;
    fn sub(self, rhs: &'a ElementK) -> ElementK {
        ElementK::new(&self.alpha - &rhs.alpha, &self.beta - &rhs.beta, &self.delta)
    }
}

impl<'a> Mul<&'a ElementK> for &'a ElementK {
    type Output = ElementK;
    fn mul(self, rhs: &'a ElementK) -> ElementK {
        let a = &(&self.alpha * &rhs.alpha) + &(&(&self.delta * &self.beta) * &rhs.beta);
        let b = &(&self.alpha * &rhs.beta) + &(&self.beta * &rhs.alpha);
        ElementK::new(a, b, &self.delta)
    }
}

impl<'a> Neg for &'a ElementK {
    type Output = ElementK;
    fn neg(self) -> ElementK {
        ElementK::new(-&self.alpha, -&self.beta, &self.delta)
    }
}

impl core::fmt::Display for ElementK {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "[{}] + [{}]*sqrt(delta)", self.alpha, self.beta)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArchType {
    Split,
    Ramified,
}

/// `K = F(sqrt delta)` with `O_K = O_F + O_F theta`, `theta = (x + sqrt delta)/lambda`.
#[derive(Clone, Debug)]
pub struct QuadExtension {
    base: RealQuadraticField,
    delta: ElementF,
    theta_shift: ElementF,
    theta_den: ElementF,
    theta_trace: ElementF,
    theta_norm: ElementF,
    arch_type: [ArchType; 2],
    rel_disc: IdealF,
    rel_fund_unit: Option<ElementK>,
}

/// Default ceiling for the `tau2` size of the relative unit search.
pub const UNIT_SEARCH_BOUND: f64 = 1.0e7;

impl QuadExtension {
    /// Builds `K`; `delta` is first stripped of square ideal factors.
    pub fn new(base: &RealQuadraticField, delta: &ElementF) -> Result<QuadExtension, FieldError> {
        if delta.is_zero() || !base.is_integral(delta) {
            return Err(FieldError::NotIntegral);
        }
        let delta = strip_squares(base, delta)?;
        if delta.is_one() {
            return Err(FieldError::NotAdmissible("delta is a square"));
        }
        let (shift, den) = integral_basis(base, &delta)?;
        let theta_trace = shift.scale_int(2).div(&den).expect("nonzero");
        let theta_norm = (&(&shift * &shift) - &delta).div(&(&den * &den)).expect("nonzero");
        if !base.is_integral(&theta_trace) || !base.is_integral(&theta_norm) {
            return Err(FieldError::NotIntegral);
        }
        let disc_gen = delta.scale_int(4).div(&(&den * &den)).expect("nonzero");
        let rel_disc = IdealF::principal(base, &disc_gen)?;
        let arch = |p: RealPlace| if delta.sign_at(p) > 0 { ArchType::Split } else { ArchType::Ramified };
        let arch_type = [arch(RealPlace::Tau1), arch(RealPlace::Tau2)];
        let mut k = QuadExtension { base: base.clone(), delta, theta_shift: shift, theta_den: den, theta_trace, theta_norm, arch_type, rel_disc, rel_fund_unit: None };
        if k.is_admissible() {
            k.rel_fund_unit = Some(k.relative_fund_unit(UNIT_SEARCH_BOUND)?);
        }
        Ok(k)
    }

    /// `new` followed by the archimedean admissibility check.
    pub fn admissible(base: &RealQuadraticField, delta: &ElementF) -> Result<QuadExtension, FieldError> {
        let k = QuadExtension::new(base, delta)?;
        if !k.is_admissible() {
            return Err(FieldError::NotAdmissible("need tau1(delta) < 0 < tau2(delta)"));
        }
        Ok(k)
    }

    pub fn base(&self) -> &RealQuadraticField {
        &self.base
    }

    pub fn delta(&self) -> &ElementF {
        &self.delta
    }

    pub fn arch_type(&self, place: RealPlace) -> ArchType {
        self.arch_type[place as usize]
    }

    pub fn is_admissible(&self) -> bool {
        self.arch_type == [ArchType::Ramified, ArchType::Split]
    }

    pub fn rel_disc(&self) -> &IdealF {
        &self.rel_disc
    }

    pub fn rel_fund_unit(&self) -> Option<&ElementK> {
        self.rel_fund_unit.as_ref()
    }

    /// `theta` with `theta^2 = t theta - n`, `(t, n)` returned.
    pub fn theta_poly(&self) -> (&ElementF, &ElementF) {
        (&self.theta_trace, &self.theta_norm)
    }

    /// `(x, lambda)` with `theta = (x + sqrt delta)/lambda`.
    pub fn theta_parts(&self) -> (&ElementF, &ElementF) {
        (&self.theta_shift, &self.theta_den)
    }

    pub fn theta(&self) -> ElementK {
        let inv = self.theta_den.inv().expect("nonzero");
        ElementK::new(&self.theta_shift * &inv, inv, &self.delta)
    }

    /// `a + b theta`.
    pub fn from_basis(&self, a: &ElementF, b: &ElementF) -> ElementK {
        &ElementK::from_base(a, &self.delta) + &(&ElementK::from_base(b, &self.delta) * &self.theta())
    }

    /// Coordinates in the basis `(1, theta)`.
    pub fn basis_coords(&self, e: &ElementK) -> (ElementF, ElementF) {
        let b = e.beta() * &self.theta_den;
        let a = e.alpha() - &(&b * &self.theta_shift.div(&self.theta_den).expect("nonzero"));
        (a, b)
    }

    pub fn is_integral(&self, e: &ElementK) -> bool {
        let (a, b) = self.basis_coords(e);
        self.base.is_integral(&a) && self.base.is_integral(&b)
    }

    pub fn place_splitting(&self, place: &Place) -> Result<Splitting, FieldError> {
        match place {
            Place::Real(p) => Ok(match self.arch_type(*p) {
                ArchType::Split => Splitting::Split,
                ArchType::Ramified => Splitting::Ramified,
            }),
            Place::Finite(prime) => prime_splitting(&self.base, &self.delta, prime),
        }
    }

    /// `eta_{K,v}(-1) = (-1, delta)_v`. At a dyadic prime that is alone
    /// above 2 the symbol comes from the product formula.
    pub fn eta_local(&self, place: &Place) -> Result<i32, FieldError> {
        let minus_one = self.base.int(-1);
        if let Place::Finite(prime) = place {
            if prime.norm() % 2 == 0 && super::ideal::splitting_type(&self.base, 2)?.primes.len() == 1 {
                let mut s = 1;
                for tau in [RealPlace::Tau1, RealPlace::Tau2] {
                    s *= hilbert_symbol(&self.base, &minus_one, &self.delta, &Place::Real(tau))?;
                }
                for (q, _) in IdealF::principal(&self.base, &self.delta)?.factor(&self.base) {
                    if q.norm() % 2 == 1 {
                        s *= hilbert_symbol(&self.base, &minus_one, &self.delta, &Place::Finite(q))?;
                    }
                }
                return Ok(s);
            }
        }
        hilbert_symbol(&self.base, &minus_one, &self.delta, place)
    }

    /// Generator of the relative norm-one units modulo `+-1`, normalized to
    /// `sigma(eta) > 1` at the first real place above `tau2`.
    pub fn relative_fund_unit(&self, bound: f64) -> Result<ElementK, FieldError> {
        if !self.is_admissible() {
            return Err(FieldError::NotAdmissible("relative units need one complex place"));
        }
        let f = &self.base;
        let theta = self.theta();
        let (_, im_theta) = theta.approx_complex();
        let (re_theta, _) = theta.approx_complex();
        let (s1, s2) = theta.approx_real_pair();
        let gap = s1 - s2;
        let im_theta = libm::fabs(im_theta);
        let one = f.int(1);
        let mut rmax = 16.0;
        loop {
            let b2max = rmax / libm::fabs(gap);
            let (b2lo, b2hi) = if gap > 0.0 { (0.0, b2max) } else { (-b2max, 0.0) };
            let b1 = 1.0 / im_theta;
            let mut best: Option<(f64, ElementK)> = None;
            for (bx, by) in f.box_elements(-b1, b1, b2lo, b2hi) {
                if bx == 0 && by == 0 {
                    continue;
                }
                let b = f.from_small_coords(bx, by);
                let bt1 = b.approx(RealPlace::Tau1);
                let bt2 = b.approx(RealPlace::Tau2);
                let a1c = -bt1 * re_theta;
                let a2c = -bt2 * s2;
                for (ax, ay) in f.box_elements(a1c - 1.0, a1c + 1.0, a2c, a2c + 1.0) {
                    let a = f.from_small_coords(ax, ay);
                    let eta = self.from_basis(&a, &b);
                    if eta.rel_norm() != one {
                        continue;
                    }
                    let (r, _) = eta.approx_real_pair();
                    let r = libm::fabs(r);
                    if r <= 1.0 + 1e-9 {
                        continue;
                    }
                    if best.as_ref().map_or(true, |(br, _)| r < *br) {
                        best = Some((r, eta));
                    }
                }
            }
            if let Some((_, eta)) = best {
                let (r, _) = eta.approx_real_pair();
                return Ok(if r < 0.0 { -&eta } else { eta });
            }
            if rmax >= bound {
                return Err(FieldError::SearchBoundExceeded { what: "searching the relative unit", bound: bound as u64 });
            }
            rmax *= 4.0;
        }
    }
}

/// Removes square prime-ideal factors from `(delta)`.
fn strip_squares(base: &RealQuadraticField, delta: &ElementF) -> Result<ElementF, FieldError> {
    let ideal = IdealF::principal(base, delta)?;
    let mut out = delta.clone();
    for (prime, _) in ideal.factor(base) {
        let v = valuation(base, &prime, &out);
        if v >= 2 {
            out = &out * &prime.gen().pow(-2 * (v / 2));
        }
    }
    Ok(out)
}

/// `(x, lambda)` with `lambda | 2` of largest norm such that
/// `(x + sqrt delta)/lambda` is integral.
fn integral_basis(base: &RealQuadraticField, delta: &ElementF) -> Result<(ElementF, ElementF), FieldError> {
    let two = IdealF::principal(base, &base.int(2))?;
    let mut divisors: Vec<IdealF> = alloc::vec![IdealF::unit(base)];
    for (prime, k) in two.factor(base) {
        let mut next = Vec::new();
        for d in &divisors {
            for j in 0..=k {
                next.push(d.mul(base, &prime.pow(base, j)));
            }
        }
        divisors = next;
    }
    divisors.sort();
    for lam in divisors.iter().rev() {
        let h = lam.hnf();
        let gen = lam.gen();
        let sq = gen * gen;
        for y in 0..h.c {
            for x in 0..h.a {
                let xe = base.from_small_coords(x, y);
                let n = (&(&xe * &xe) - delta).div(&sq).expect("nonzero");
                if base.is_integral(&n) {
                    return Ok((xe, gen.clone()));
                }
            }
        }
    }
    Err(FieldError::NotIntegral)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nfield::{make_field, splitting_type};

    fn k5(a: i64, b: i64) -> QuadExtension {
        let f = make_field(5).unwrap();
        QuadExtension::new(&f, &f.elt(a, b)).unwrap()
    }

    #[test]
    fn maximal_order_and_discriminant() {
        let f = make_field(5).unwrap();
        let k = k5(-11, 0);
        assert!(!k.is_admissible());
        let e = f.from_small_coords(1, -3);
        let k = QuadExtension::new(&f, &e).unwrap();
        let (t, n) = k.theta_poly();
        assert!(f.is_integral(t) && f.is_integral(n));
        let disc = &(t * t) - &n.scale_int(4);
        assert_eq!(IdealF::principal(&f, &disc).unwrap(), *k.rel_disc());
        let k4 = QuadExtension::new(&f, &f.int(-4 * 7)).unwrap();
        assert_eq!(k4.delta(), &f.int(-7));
    }

    #[test]
    fn relative_unit_has_norm_one() {
        let f = make_field(5).unwrap();
        let delta = f.from_small_coords(1, -3);
        assert!(delta.sign_at(RealPlace::Tau1) < 0 && delta.sign_at(RealPlace::Tau2) > 0);
        let k = QuadExtension::admissible(&f, &delta).unwrap();
        let eta = k.rel_fund_unit().unwrap();
        assert!(eta.rel_norm().is_one());
        assert!(k.is_integral(eta));
        let (r, s) = eta.approx_real_pair();
        assert!(r > 1.0 && s > 0.0 && s < 1.0);
    }

    #[test]
    fn splitting_and_eta() {
        let f = make_field(5).unwrap();
        let delta = f.from_small_coords(1, -3);
        let k = QuadExtension::admissible(&f, &delta).unwrap();
        assert_eq!(k.place_splitting(&Place::Real(RealPlace::Tau1)).unwrap(), Splitting::Ramified);
        assert_eq!(k.place_splitting(&Place::Real(RealPlace::Tau2)).unwrap(), Splitting::Split);
        assert_eq!(k.eta_local(&Place::Real(RealPlace::Tau1)).unwrap(), -1);
        assert_eq!(k.eta_local(&Place::Real(RealPlace::Tau2)).unwrap(), 1);
        for p in [3u64, 7, 11, 19, 29, 31] {
            for prime in splitting_type(&f, p).unwrap().primes {
                let s = k.place_splitting(&Place::Finite(prime.clone())).unwrap();
                let eta = k.eta_local(&Place::Finite(prime.clone())).unwrap();
                if s != Splitting::Ramified {
                    assert_eq!(eta, 1, "p={p}");
                }
            }
        }
    }

    #[test]
    fn dyadic_eta_matches_norm_search() {
        let f = make_field(5).unwrap();
        let two = splitting_type(&f, 2).unwrap().primes[0].clone();
        let minus_one = f.int(-1);
        let mut seen = [0usize; 2];
        for (x, y) in [(1, -3), (-1, -1), (0, -1), (-3, -5), (2, -3), (-2, -6), (1, -6), (-7, 2)] {
            let Ok(k) = QuadExtension::admissible(&f, &f.from_small_coords(x, y)) else { continue };
            let fast = k.eta_local(&Place::Finite(two.clone())).unwrap();
            let slow = crate::nfield::hilbert_by_norms(&f, &minus_one, k.delta(), &two).unwrap();
            assert_eq!(fast, slow, "delta = {}", k.delta());
            seen[(fast > 0) as usize] += 1;
        }
        assert!(seen[0] > 0 && seen[1] > 0, "{seen:?}");
    }
}
