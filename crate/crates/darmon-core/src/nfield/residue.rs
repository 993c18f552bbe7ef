use alloc::vec::Vec;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::ideal::{factor_integer, valuation, Hnf};
use super::{ElementF, FieldError, IdealF, RealQuadraticField};

/// Class of `x + y omega` modulo `p^k`, in reduced coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Residue {
    pub x: i64,
    pub y: i64,
}

/// The finite ring `O_F / p^k` for a prime ideal `p`.
#[derive(Clone, Debug)]
pub struct ResidueRing {
    prime: IdealF,
    p: u64,
    ram_index: u32,
    inertia_degree: u32,
    k: u32,
    omega_trace: i64,
    omega_sq: i64,
    powers: Vec<Hnf>,
}

impl ResidueRing {
    pub fn new(field: &RealQuadraticField, prime: &IdealF, k: u32) -> Result<ResidueRing, FieldError> {
        let fac = factor_integer(prime.norm());
        if fac.len() != 1 || fac[0].1 > 2 || !prime.is_prime(field) {
            return Err(FieldError::NotPrime(prime.norm()));
        }
        let (p, f) = fac[0];
        let inertia_degree = f;
        let p_ideal = IdealF::principal(field, &field.int(p as i64))?;
        let ram_index = if inertia_degree == 1 && p_ideal.norm() == prime.norm() * prime.norm() && prime.pow(field, 2) == p_ideal {
            2
        } else {
            1
        };
        let powers = (0..=k).map(|j| prime.pow(field, j).hnf()).collect();
        let (t, s) = field.omega_relation();
        Ok(ResidueRing { prime: prime.clone(), p, ram_index, inertia_degree, k, omega_trace: t, omega_sq: s, powers })
    }

    pub fn prime(&self) -> &IdealF {
        &self.prime
    }

    pub fn residue_char(&self) -> u64 {
        self.p
    }

    /// Residue field cardinality.
    pub fn q(&self) -> u64 {
        self.prime.norm()
    }

    pub fn ram_index(&self) -> u32 {
        self.ram_index
    }

    pub fn inertia_degree(&self) -> u32 {
        self.inertia_degree
    }

    pub fn exponent(&self) -> u32 {
        self.k
    }

    pub fn size(&self) -> u64 {
        let h = self.powers[self.k as usize];
        (h.a as u64) * (h.c as u64)
    }

    fn modulus(&self) -> &Hnf {
        &self.powers[self.k as usize]
    }

    pub fn from_coords(&self, x: i128, y: i128) -> Residue {
        let (x, y) = self.modulus().reduce(x, y);
        Residue { x, y }
    }

    pub fn zero(&self) -> Residue {
        Residue { x: 0, y: 0 }
    }

    pub fn one(&self) -> Residue {
        self.from_coords(1, 0)
    }

    pub fn int(&self, n: i64) -> Residue {
        self.from_coords(n as i128, 0)
    }

    /// Dense index in `0..size`.
    pub fn index(&self, r: Residue) -> usize {
        (r.x as usize) + (self.modulus().a as usize) * (r.y as usize)
    }

    pub fn elements(&self) -> impl Iterator<Item = Residue> + '_ {
        let h = *self.modulus();
        (0..h.c).flat_map(move |y| (0..h.a).map(move |x| Residue { x, y }))
    }

    pub fn add(&self, a: Residue, b: Residue) -> Residue {
        self.from_coords(a.x as i128 + b.x as i128, a.y as i128 + b.y as i128)
    }

    pub fn sub(&self, a: Residue, b: Residue) -> Residue {
        self.from_coords(a.x as i128 - b.x as i128, a.y as i128 - b.y as i128)
    }

    pub fn neg(&self, a: Residue) -> Residue {
        self.from_coords(-(a.x as i128), -(a.y as i128))
    }

    pub fn mul(&self, a: Residue, b: Residue) -> Residue {
        let (x1, y1, x2, y2) = (a.x as i128, a.y as i128, b.x as i128, b.y as i128);
        let (t, s) = (self.omega_trace as i128, self.omega_sq as i128);
        self.from_coords(x1 * x2 + s * y1 * y2, x1 * y2 + x2 * y1 + t * y1 * y2)
    }

    pub fn pow(&self, a: Residue, mut e: u64) -> Residue {
        let mut base = a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Largest `j <= k` with `r` in `p^j`.
    pub fn valuation(&self, r: Residue) -> u32 {
        let mut v = 0;
        while v < self.k && self.powers[(v + 1) as usize].contains(r.x as i128, r.y as i128) {
            v += 1;
        }
        v
    }

    pub fn is_unit(&self, r: Residue) -> bool {
        self.k > 0 && self.valuation(r) == 0
    }

    pub fn inv(&self, r: Residue) -> Option<Residue> {
        if !self.is_unit(r) {
            return None;
        }
        let q = self.q();
        let order = q.pow(self.k - 1) * (q - 1);
        Some(self.pow(r, order - 1))
    }

    /// Reduction of a `p`-integral element of `F`.
    pub fn reduce(&self, field: &RealQuadraticField, e: &ElementF) -> Option<Residue> {
        if e.is_zero() {
            return Some(self.zero());
        }
        let den = field.denominator(e);
        let num = e.scale(&BigRational::from_integer(den.clone()));
        let den_e = ElementF::new(field.radicand(), BigRational::from_integer(den), BigRational::zero());
        let shift = valuation(field, &self.prime, &den_e);
        if valuation(field, &self.prime, &num) < shift {
            return None;
        }
        let pinv = self.prime.gen().inv()?.pow(shift);
        let n = self.reduce_integral(field, &(&num * &pinv))?;
        let d = self.reduce_integral(field, &(&den_e * &pinv))?;
        Some(self.mul(n, self.inv(d)?))
    }

    fn reduce_integral(&self, field: &RealQuadraticField, e: &ElementF) -> Option<Residue> {
        let (x, y) = field.coords(e)?;
        let h = self.modulus();
        let m = BigInt::from(h.a) * BigInt::from(h.c);
        let x = mod_big(&x, &m);
        let y = mod_big(&y, &m);
        Some(self.from_coords(x, y))
    }

    /// Lift to an element of `O_F`.
    pub fn lift(&self, field: &RealQuadraticField, r: Residue) -> ElementF {
        field.from_small_coords(r.x, r.y)
    }
}

fn mod_big(x: &BigInt, m: &BigInt) -> i128 {
    let r = x % m;
    let r = if r < BigInt::zero() { r + m } else { r };
    r.to_i128().expect("reduced")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nfield::make_field;
    use crate::nfield::ideal::splitting_type;

    #[test]
    fn unit_group_orders() {
        let f = make_field(5).unwrap();
        for p in [2u64, 3, 5, 11] {
            for prime in splitting_type(&f, p).unwrap().primes {
                for k in 1..=3 {
                    let r = ResidueRing::new(&f, &prime, k).unwrap();
                    let q = prime.norm();
                    assert_eq!(r.size(), q.pow(k));
                    let units = r.elements().filter(|&x| r.is_unit(x)).count() as u64;
                    assert_eq!(units, q.pow(k - 1) * (q - 1));
                    for x in r.elements().filter(|&x| r.is_unit(x)).take(20) {
                        assert_eq!(r.mul(x, r.inv(x).unwrap()), r.one());
                    }
                }
            }
        }
    }

    #[test]
    fn reduction_of_fractions() {
        let f = make_field(5).unwrap();
        let prime = splitting_type(&f, 11).unwrap().primes[0].clone();
        let r = ResidueRing::new(&f, &prime, 2).unwrap();
        let third = f.rational(1, 3);
        let t = r.reduce(&f, &third).unwrap();
        assert_eq!(r.mul(t, r.int(3)), r.one());
        let bad = prime.gen().inv().unwrap();
        assert!(r.reduce(&f, &bad).is_none());
        let g = r.reduce(&f, &(prime.gen() * &f.rational(1, 11))).unwrap();
        assert!(r.is_unit(g));
    }
}
