use core::cmp::Ordering;

use alloc::vec::Vec;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::{ElementF, FieldError, RealPlace, RealQuadraticField};

/// Hermite normal form `(a, b, c)` of an ideal viewed as a sublattice of
/// `Z + Z omega`: basis `a` and `b + c omega` with `0 <= b < a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hnf {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl Hnf {
    pub fn contains(&self, x: i128, y: i128) -> bool {
        let (a, b, c) = (self.a as i128, self.b as i128, self.c as i128);
        if y.rem_euclid(c) != 0 {
            return false;
        }
        (x - (y / c) * b).rem_euclid(a) == 0
    }

    /// Reduces a lattice vector modulo this sublattice to `0 <= x < a`, `0 <= y < c`.
    pub fn reduce(&self, x: i128, y: i128) -> (i64, i64) {
        let (a, b, c) = (self.a as i128, self.b as i128, self.c as i128);
        let q = y.div_euclid(c);
        let y2 = y - q * c;
        let x2 = (x - q * b).rem_euclid(a);
        (x2 as i64, y2 as i64)
    }
}

/// HNF of the lattice spanned by integer vectors.
pub(crate) fn hnf_of(vectors: &[(i128, i128)]) -> Option<Hnf> {
    let mut c = 0i128;
    let mut w = (0i128, 0i128);
    for &(x, y) in vectors {
        if y == 0 {
            continue;
        }
        if c == 0 {
            c = y;
            w = (x, y);
            continue;
        }
        let eg = c.extended_gcd(&y);
        w = (eg.x * w.0 + eg.y * x, eg.gcd);
        c = eg.gcd;
    }
    if c == 0 {
        return None;
    }
    if c < 0 {
        c = -c;
        w = (-w.0, -w.1);
    }
    let mut a = 0i128;
    for &(x, y) in vectors {
        let r = x - (y / c) * w.0;
        a = a.gcd(&r);
    }
    if a == 0 {
        return None;
    }
    let b = w.0.rem_euclid(a);
    Some(Hnf { a: a as i64, b: b as i64, c: c as i64 })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PrimeKind {
    Split,
    Inert,
    Ramified,
}

/// Decomposition of a rational prime in `O_F`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeDecomposition {
    pub p: u64,
    pub kind: PrimeKind,
    pub primes: Vec<IdealF>,
}

/// Integral ideal of `O_F`, keyed by its HNF, with a canonical totally
/// positive generator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IdealF {
    hnf: Hnf,
    norm: u64,
    gen: ElementF,
}

impl PartialOrd for IdealF {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for IdealF {
    fn cmp(&self, other: &Self) -> Ordering {
        self.norm.cmp(&other.norm).then(self.hnf.cmp(&other.hnf))
    }
}

impl IdealF {
    pub fn unit(field: &RealQuadraticField) -> IdealF {
        IdealF { hnf: Hnf { a: 1, b: 0, c: 1 }, norm: 1, gen: field.int(1) }
    }

    pub fn principal(field: &RealQuadraticField, e: &ElementF) -> Result<IdealF, FieldError> {
        if e.is_zero() {
            return Err(FieldError::ZeroIdeal);
        }
        let (x, y) = field.small_coords(e).ok_or(FieldError::NotIntegral)?;
        let hnf = principal_hnf(field, x as i128, y as i128).ok_or(FieldError::ZeroIdeal)?;
        let norm = (hnf.a as u64) * (hnf.c as u64);
        let gen = field.canonical_generator(e).ok_or(FieldError::NarrowClassNumberNotOne(field.radicand()))?;
        Ok(IdealF { hnf, norm, gen })
    }

    pub fn from_hnf(field: &RealQuadraticField, hnf: Hnf) -> Result<IdealF, FieldError> {
        let norm = (hnf.a as u64) * (hnf.c as u64);
        let gen = find_generator(field, &hnf, norm)?;
        Ok(IdealF { hnf, norm, gen })
    }

    pub fn hnf(&self) -> Hnf {
        self.hnf
    }

    pub fn norm(&self) -> u64 {
        self.norm
    }

    pub fn gen(&self) -> &ElementF {
        &self.gen
    }

    pub fn is_unit(&self) -> bool {
        self.norm == 1
    }

    pub fn mul(&self, field: &RealQuadraticField, other: &IdealF) -> IdealF {
        IdealF::principal(field, &(&self.gen * &other.gen)).expect("product of integral ideals")
    }

    pub fn pow(&self, field: &RealQuadraticField, k: u32) -> IdealF {
        IdealF::principal(field, &self.gen.pow(k as i64)).expect("power of an integral ideal")
    }

    pub fn contains(&self, field: &RealQuadraticField, e: &ElementF) -> bool {
        match field.coords(e) {
            Some((x, y)) => match (x.to_i128(), y.to_i128()) {
                (Some(x), Some(y)) => self.hnf.contains(x, y),
                _ => {
                    let q = self.div_exact(field, e);
                    q.is_some()
                }
            },
            None => false,
        }
    }

    fn div_exact(&self, field: &RealQuadraticField, e: &ElementF) -> Option<ElementF> {
        let q = e.div(&self.gen)?;
        field.is_integral(&q).then_some(q)
    }

    /// `other` is contained in `self`.
    pub fn divides(&self, field: &RealQuadraticField, other: &IdealF) -> bool {
        self.contains(field, &other.gen)
    }

    /// Exact quotient `other / self` when `self` divides `other`.
    pub fn quotient(&self, field: &RealQuadraticField, other: &IdealF) -> Option<IdealF> {
        let q = self.div_exact(field, &other.gen)?;
        IdealF::principal(field, &q).ok()
    }

    pub fn is_coprime(&self, field: &RealQuadraticField, other: &IdealF) -> bool {
        let g = hnf_sum(&self.hnf, &other.hnf, field);
        g.a == 1 && g.c == 1
    }

    /// Prime factorization, primes in increasing order.
    pub fn factor(&self, field: &RealQuadraticField) -> Vec<(IdealF, u32)> {
        let mut out = Vec::new();
        for (p, _) in factor_integer(self.norm) {
            let dec = splitting_type(field, p).expect("prime");
            for prime in dec.primes {
                let v = valuation(field, &prime, &self.gen);
                if v > 0 {
                    out.push((prime, v as u32));
                }
            }
        }
        out.sort();
        out
    }

    /// A prime ideal, recognized by factoring its norm.
    pub fn is_prime(&self, field: &RealQuadraticField) -> bool {
        let f = self.factor(field);
        f.len() == 1 && f[0].1 == 1
    }
}

fn principal_hnf(field: &RealQuadraticField, x: i128, y: i128) -> Option<Hnf> {
    let (t, s) = field.omega_relation();
    ((x, y) != (0, 0)).then(|| principal_hnf_coords(t, s, x, y))
}

/// HNF of `(x + y omega)` for `omega^2 = t omega + s`; `(x, y) != 0`.
pub fn principal_hnf_coords(t: i64, s: i64, x: i128, y: i128) -> Hnf {
    let (t, s) = (t as i128, s as i128);
    hnf_of(&[(x, y), (y * s, x + y * t)]).expect("nonzero element")
}

fn hnf_sum(h1: &Hnf, h2: &Hnf, field: &RealQuadraticField) -> Hnf {
    let (t, s) = field.omega_relation();
    let (t, s) = (t as i128, s as i128);
    let mut gens = Vec::new();
    for h in [h1, h2] {
        let v1 = (h.a as i128, 0i128);
        let v2 = (h.b as i128, h.c as i128);
        for (x, y) in [v1, v2] {
            gens.push((x, y));
            gens.push((y * s, x + y * t));
        }
    }
    hnf_of(&gens).expect("nonzero")
}

/// `max k` with `pi^k | e`, for `pi` a prime generator and `e` in `F^x`.
pub fn valuation(field: &RealQuadraticField, prime: &IdealF, e: &ElementF) -> i64 {
    assert!(!e.is_zero(), "valuation of zero");
    let den = field.denominator(e);
    let num = e.scale(&BigRational::from_integer(den.clone()));
    let den_e = ElementF::new(field.radicand(), BigRational::from_integer(den), BigRational::zero());
    integral_valuation(field, prime, &num) - integral_valuation(field, prime, &den_e)
}

fn integral_valuation(field: &RealQuadraticField, prime: &IdealF, e: &ElementF) -> i64 {
    let (x, y) = field.coords(e).expect("integral");
    let p = BigInt::from(prime.hnf().a);
    let (_, ram) = prime_shape(field, prime);
    let mut g = x.gcd(&y);
    let mut m = 0i64;
    while !g.is_zero() && (&g % &p).is_zero() {
        g /= &p;
        m += 1;
    }
    let pm = BigRational::from_integer(num_traits::pow(p.clone(), m as usize));
    let mut cur = e.scale(&pm.recip());
    let mut v = m * ram;
    let pinv = prime.gen.inv().expect("nonzero");
    loop {
        let next = &cur * &pinv;
        if !field.is_integral(&next) {
            return v;
        }
        cur = next;
        v += 1;
    }
}

/// `(f, e)` of a prime from its HNF: inert primes have `a = c = p`.
fn prime_shape(field: &RealQuadraticField, prime: &IdealF) -> (u32, i64) {
    let h = prime.hnf();
    if h.c == h.a {
        (2, 1)
    } else if field.disc() % h.a == 0 {
        (1, 2)
    } else {
        (1, 1)
    }
}

pub fn factor_integer(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut k = 0;
            while n % p == 0 {
                n /= p;
                k += 1;
            }
            out.push((p, k));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime_u64(n: u64) -> bool {
    n >= 2 && factor_integer(n) == [(n, 1)]
}

/// Decomposition of `p O_F` read off the roots of the minimal polynomial of
/// `omega` modulo `p`.
pub fn splitting_type(field: &RealQuadraticField, p: u64) -> Result<PrimeDecomposition, FieldError> {
    if !is_prime_u64(p) {
        return Err(FieldError::NotPrime(p));
    }
    let (t, s) = field.omega_relation();
    let pi = p as i128;
    let roots: Vec<i128> = (0..pi).filter(|&r| (r * r - t as i128 * r - s as i128).rem_euclid(pi) == 0).collect();
    let prime_at = |r: i128| -> Result<IdealF, FieldError> {
        let hnf = Hnf { a: p as i64, b: (-r).rem_euclid(pi) as i64, c: 1 };
        IdealF::from_hnf(field, hnf)
    };
    let (kind, primes) = match roots.len() {
        0 => {
            let gen = field.int(p as i64);
            (PrimeKind::Inert, alloc::vec![IdealF::principal(field, &gen)?])
        }
        1 => (PrimeKind::Ramified, alloc::vec![prime_at(roots[0])?]),
        _ if roots[0] == roots[1] => (PrimeKind::Ramified, alloc::vec![prime_at(roots[0])?]),
        _ => {
            let mut v = alloc::vec![prime_at(roots[0])?, prime_at(roots[1])?];
            v.sort();
            (PrimeKind::Split, v)
        }
    };
    Ok(PrimeDecomposition { p, kind, primes })
}

/// Searches the box `tau1 in [sqrt N, sqrt N * u)` for a totally positive
/// element of norm `N` in the lattice.
fn find_generator(field: &RealQuadraticField, hnf: &Hnf, norm: u64) -> Result<ElementF, FieldError> {
    let u = field.positive_unit().approx(RealPlace::Tau1);
    let w1 = field.omega_approx(RealPlace::Tau1);
    let w2 = field.omega_approx(RealPlace::Tau2);
    let rn = libm::sqrt(norm as f64);
    let slack = 1e-6 * (1.0 + rn * u);
    let lo1 = rn - slack;
    let hi1 = rn * u + slack;
    let lo2 = rn / u - slack;
    let hi2 = rn + slack;
    let ymax = (hi1 - lo2) / (w1 - w2);
    let ymin = (lo1 - hi2) / (w1 - w2);
    let (a, b, c) = (hnf.a as i128, hnf.b as i128, hnf.c as i128);
    let nmin = libm::floor(ymin / c as f64) as i128 - 1;
    let nmax = libm::ceil(ymax / c as f64) as i128 + 1;
    let target = norm as i128;
    let (t, s) = field.omega_relation();
    let (t, s) = (t as i128, s as i128);
    for n in nmin..=nmax {
        let y = n * c;
        let xlo = f64::max(lo1 - y as f64 * w1, lo2 - y as f64 * w2);
        let xhi = f64::min(hi1 - y as f64 * w1, hi2 - y as f64 * w2);
        if xlo > xhi {
            continue;
        }
        let base = n * b;
        let mut m = libm::floor((xlo - base as f64) / a as f64) as i128 - 1;
        loop {
            let x = base + m * a;
            if x as f64 > xhi + 1.0 {
                break;
            }
            m += 1;
            if x * x + t * x * y - s * y * y != target {
                continue;
            }
            let e = field.from_coords(&BigInt::from(x), &BigInt::from(y));
            if e.is_totally_positive() {
                return Ok(field.normalize_generator(&e));
            }
        }
    }
    Err(FieldError::SearchBoundExceeded { what: "searching an ideal generator", bound: norm })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nfield::make_field;

    #[test]
    fn splitting_examples() {
        let f = make_field(5).unwrap();
        assert_eq!(splitting_type(&f, 11).unwrap().kind, PrimeKind::Split);
        assert_eq!(splitting_type(&f, 5).unwrap().kind, PrimeKind::Ramified);
        assert_eq!(splitting_type(&f, 2).unwrap().kind, PrimeKind::Inert);
        assert!(matches!(splitting_type(&f, 9), Err(FieldError::NotPrime(9))));
    }

    #[test]
    fn prime_generators_have_prime_norm() {
        for &d in &[2i64, 5, 13, 17, 29, 41] {
            let f = make_field(d).unwrap();
            for p in (2u64..200).filter(|&p| is_prime_u64(p)) {
                let dec = splitting_type(&f, p).unwrap();
                let total: u64 = dec.primes.iter().map(|q| q.norm()).product::<u64>()
                    * if dec.kind == PrimeKind::Ramified { dec.primes[0].norm() } else { 1 };
                assert_eq!(total, p * p, "D={d} p={p}");
                for q in &dec.primes {
                    assert!(q.gen().is_totally_positive());
                    let n = q.gen().norm().to_integer().to_u64().unwrap();
                    assert!(n == p || n == p * p);
                    assert!(q.contains(&f, q.gen()));
                    assert!(q.contains(&f, &f.int(p as i64)));
                    assert_eq!(IdealF::principal(&f, q.gen()).unwrap(), *q);
                }
            }
        }
    }

    #[test]
    fn factorization_roundtrip() {
        let f = make_field(5).unwrap();
        let e = f.elt(123, 7);
        let id = IdealF::principal(&f, &e).unwrap();
        let mut prod = IdealF::unit(&f);
        for (p, k) in id.factor(&f) {
            prod = prod.mul(&f, &p.pow(&f, k));
        }
        assert_eq!(prod, id);
    }
}
