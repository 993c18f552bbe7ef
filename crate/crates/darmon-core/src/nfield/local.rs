use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use super::ideal::valuation;
use super::residue::{Residue, ResidueRing};
use super::{ElementF, FieldError, IdealF, RealPlace, RealQuadraticField};

/// A place of `F`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Real(RealPlace),
    Finite(IdealF),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Splitting {
    Split,
    Inert,
    Ramified,
}

impl Splitting {
    pub fn label(self) -> &'static str {
        match self {
            Splitting::Split => "split",
            Splitting::Inert => "inert",
            Splitting::Ramified => "ramified",
        }
    }
}

/// Square classes of `F_p^x` for one prime, as `(parity of v, unit class)`.
pub struct SquareClasses {
    ring: ResidueRing,
    squares: BTreeSet<Residue>,
}

pub type SquareClass = (u32, Residue);

impl SquareClasses {
    pub fn new(field: &RealQuadraticField, prime: &IdealF) -> Result<SquareClasses, FieldError> {
        let probe = ResidueRing::new(field, prime, 1)?;
        let k = if probe.residue_char() == 2 { 2 * probe.ram_index() + 1 } else { 1 };
        let ring = ResidueRing::new(field, prime, k)?;
        let squares = ring.elements().filter(|&x| ring.is_unit(x)).map(|x| ring.mul(x, x)).collect();
        Ok(SquareClasses { ring, squares })
    }

    pub fn ring(&self) -> &ResidueRing {
        &self.ring
    }

    /// Number of unit classes modulo squares.
    pub fn unit_index(&self) -> usize {
        let units = self.ring.elements().filter(|&x| self.ring.is_unit(x)).count();
        units / self.squares.len()
    }

    fn canonical_unit(&self, u: Residue) -> Residue {
        self.squares.iter().map(|&s| self.ring.mul(u, s)).min().expect("nonempty")
    }

    pub fn is_unit_square(&self, u: Residue) -> bool {
        self.squares.contains(&u)
    }

    /// Splits `e = pi^v u` and returns `(v, u mod p^k)`.
    pub fn decompose(&self, field: &RealQuadraticField, e: &ElementF) -> (i64, Residue) {
        let v = valuation(field, self.ring.prime(), e);
        let unit = e * &self.ring.prime().gen().pow(-v);
        let r = self.ring.reduce(field, &unit).expect("unit part is integral");
        (v, r)
    }

    pub fn class_of(&self, field: &RealQuadraticField, e: &ElementF) -> SquareClass {
        let (v, u) = self.decompose(field, e);
        (v.rem_euclid(2) as u32, self.canonical_unit(u))
    }

    pub fn is_square(&self, field: &RealQuadraticField, e: &ElementF) -> bool {
        let (v, u) = self.decompose(field, e);
        v.rem_euclid(2) == 0 && self.is_unit_square(u)
    }

    pub fn mul_class(&self, a: SquareClass, b: SquareClass) -> SquareClass {
        ((a.0 + b.0) % 2, self.canonical_unit(self.ring.mul(a.1, b.1)))
    }

    pub fn group_order(&self) -> usize {
        2 * self.unit_index()
    }
}

/// Hilbert symbol `(a, b)_v` for nonzero `a, b` in `F`.
pub fn hilbert_symbol(field: &RealQuadraticField, a: &ElementF, b: &ElementF, place: &Place) -> Result<i32, FieldError> {
    match place {
        Place::Real(tau) => Ok(if a.sign_at(*tau) < 0 && b.sign_at(*tau) < 0 { -1 } else { 1 }),
        Place::Finite(prime) => {
            let probe = ResidueRing::new(field, prime, 1)?;
            if probe.residue_char() == 2 {
                hilbert_by_norms(field, a, b, prime)
            } else {
                Ok(hilbert_tame(field, a, b, prime, &probe))
            }
        }
    }
}

fn legendre(ring: &ResidueRing, u: Residue) -> i32 {
    let q = ring.q();
    if ring.pow(u, (q - 1) / 2) == ring.one() {
        1
    } else {
        -1
    }
}

fn hilbert_tame(field: &RealQuadraticField, a: &ElementF, b: &ElementF, prime: &IdealF, ring: &ResidueRing) -> i32 {
    let va = valuation(field, prime, a);
    let vb = valuation(field, prime, b);
    let pi = prime.gen();
    let ua = a * &pi.pow(-va);
    let ub = b * &pi.pow(-vb);
    let mut sym = ElementF::one(field.radicand());
    if (va * vb).rem_euclid(2) == 1 {
        sym = -&sym;
    }
    let sym = &(&sym * &ua.pow(vb)) * &ub.pow(-va);
    let r = ring.reduce(field, &sym).expect("unit");
    legendre(ring, r)
}

/// `(a, b) = 1` iff `b` is a norm from `F(sqrt a)`; the norm subgroup of the
/// square-class group is generated by exhaustive search modulo `p^(2e+3)`.
pub fn hilbert_by_norms(field: &RealQuadraticField, a: &ElementF, b: &ElementF, prime: &IdealF) -> Result<i32, FieldError> {
    let classes = SquareClasses::new(field, prime)?;
    if classes.is_square(field, a) {
        return Ok(1);
    }
    let norms = norm_classes(field, a, prime, &classes)?;
    Ok(if norms.contains(&classes.class_of(field, b)) { 1 } else { -1 })
}

/// The index-2 subgroup of square classes represented by `x^2 - a y^2`.
pub fn norm_classes(field: &RealQuadraticField, a: &ElementF, prime: &IdealF, classes: &SquareClasses) -> Result<BTreeSet<SquareClass>, FieldError> {
    let target = classes.group_order() / 2;
    let ring = classes.ring();
    let depth = if ring.residue_char() == 2 { 2 * ring.ram_index() + 3 } else { 1 };
    let search = ResidueRing::new(field, prime, depth)?;
    let reps: Vec<ElementF> = search.elements().map(|r| search.lift(field, r)).collect();
    let mut group: BTreeSet<SquareClass> = BTreeSet::new();
    group.insert(classes.class_of(field, &field.int(1)));
    let pi = prime.gen();
    for x in &reps {
        for y in &reps {
            for shift in [false, true] {
                let y = if shift { y * pi } else { y.clone() };
                let n = &(x * x) - &(&(a * &y) * &y);
                if n.is_zero() {
                    continue;
                }
                let c = classes.class_of(field, &n);
                if group.contains(&c) {
                    continue;
                }
                let snapshot: Vec<SquareClass> = group.iter().copied().collect();
                for g in snapshot {
                    group.insert(classes.mul_class(g, c));
                }
                if group.len() == target {
                    return Ok(group);
                }
            }
        }
    }
    Err(FieldError::SearchBoundExceeded { what: "generating the local norm group", bound: search.size() })
}

/// Splitting of `p` in `F(sqrt delta)` from the square class of `delta`.
pub fn prime_splitting(field: &RealQuadraticField, delta: &ElementF, prime: &IdealF) -> Result<Splitting, FieldError> {
    let classes = SquareClasses::new(field, prime)?;
    let (v, u) = classes.decompose(field, delta);
    if v.rem_euclid(2) == 1 {
        return Ok(Splitting::Ramified);
    }
    if classes.is_unit_square(u) {
        return Ok(Splitting::Split);
    }
    let ring = classes.ring();
    if ring.residue_char() != 2 {
        return Ok(Splitting::Inert);
    }
    let e = ring.ram_index();
    let four = ResidueRing::new(field, prime, 2 * e)?;
    let lifted = ring.lift(field, u);
    let target = four.reduce(field, &lifted).expect("integral");
    let square_mod_four = four.elements().any(|s| four.mul(s, s) == target);
    Ok(if square_mod_four { Splitting::Inert } else { Splitting::Ramified })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nfield::ideal::{is_prime_u64, splitting_type};
    use crate::nfield::make_field;

    #[test]
    fn square_class_group_orders() {
        let f = make_field(5).unwrap();
        let p2 = splitting_type(&f, 2).unwrap().primes[0].clone();
        let c = SquareClasses::new(&f, &p2).unwrap();
        assert_eq!(c.group_order(), 16);
        let p3 = splitting_type(&f, 3).unwrap().primes[0].clone();
        assert_eq!(SquareClasses::new(&f, &p3).unwrap().group_order(), 4);
        let f2 = make_field(2).unwrap();
        let q2 = splitting_type(&f2, 2).unwrap().primes[0].clone();
        assert_eq!(SquareClasses::new(&f2, &q2).unwrap().group_order(), 16);
        let f17 = make_field(17).unwrap();
        for q in splitting_type(&f17, 2).unwrap().primes {
            assert_eq!(SquareClasses::new(&f17, &q).unwrap().group_order(), 8);
        }
    }

    #[test]
    fn tame_formula_matches_norm_search() {
        let f = make_field(5).unwrap();
        let elems = [f.elt(-1, 0), f.elt(3, 1), f.elt(2, -1), f.elt(7, 0), f.elt(-11, 2)];
        for p in [3u64, 11, 19] {
            for prime in splitting_type(&f, p).unwrap().primes {
                let probe = ResidueRing::new(&f, &prime, 1).unwrap();
                for a in &elems {
                    for b in &elems {
                        let tame = hilbert_tame(&f, a, b, &prime, &probe);
                        let norms = hilbert_by_norms(&f, a, b, &prime).unwrap();
                        assert_eq!(tame, norms, "p={p} a={a} b={b}");
                    }
                }
            }
        }
    }

    #[test]
    fn product_formula() {
        for d in [2i64, 5, 13] {
            let f = make_field(d).unwrap();
            let elems = [f.elt(-1, 0), f.elt(3, 1), f.elt(1, -2), f.elt(-7, 3), f.elt(6, 1)];
            for a in &elems {
                for b in &elems {
                    let mut prod = 1;
                    prod *= hilbert_symbol(&f, a, b, &Place::Real(RealPlace::Tau1)).unwrap();
                    prod *= hilbert_symbol(&f, a, b, &Place::Real(RealPlace::Tau2)).unwrap();
                    let n = (a.norm() * b.norm()).numer().clone();
                    let n = n.magnitude().clone();
                    let mut bad: Vec<u64> = alloc::vec![2];
                    let n64: u64 = num_traits::ToPrimitive::to_u64(&n).unwrap();
                    for p in 3..=n64 {
                        if n64 % p == 0 && is_prime_u64(p) {
                            bad.push(p);
                        }
                    }
                    for p in bad {
                        for prime in splitting_type(&f, p).unwrap().primes {
                            prod *= hilbert_symbol(&f, a, b, &Place::Finite(prime)).unwrap();
                        }
                    }
                    assert_eq!(prod, 1, "D={d} a={a} b={b}");
                }
            }
        }
    }
}
