#![allow(dead_code)]

use darmon_core::ecurve::{ConductorPrime, EllipticCurveF, ReductionType};
use darmon_core::nfield::{make_field, splitting_type, ElementF, IdealF, QuadExtension, RealQuadraticField};

pub fn field() -> RealQuadraticField {
    make_field(5).unwrap()
}

pub fn prime_containing(f: &RealQuadraticField, p: u64, e: &ElementF) -> IdealF {
    splitting_type(f, p).unwrap().primes.into_iter().find(|q| q.contains(f, e)).unwrap()
}

/// Nonsplit at the prime `(6 + sqrt 5)` of norm 31.
pub fn e31() -> EllipticCurveF {
    let f = field();
    let phi = f.from_small_coords(0, 1);
    let a = [f.int(1), &f.int(-1) - &phi, phi.clone(), f.int(0), f.int(0)];
    let p31 = prime_containing(&f, 31, &f.elt(6, 1));
    EllipticCurveF::new(&f, a, vec![ConductorPrime { prime: p31, kind: ReductionType::NonsplitMult }], None).unwrap()
}

/// `y^2 + y = x^3 - x`, split at the inert prime 37.
pub fn e37() -> EllipticCurveF {
    let f = field();
    let a = [f.int(0), f.int(0), f.int(1), f.int(-1), f.int(0)];
    let p37 = splitting_type(&f, 37).unwrap().primes[0].clone();
    EllipticCurveF::new(&f, a, vec![ConductorPrime { prime: p37, kind: ReductionType::SplitMult }], Some((f.int(0), f.int(0)))).unwrap()
}

/// `K = F(sqrt(-phi))`.
pub fn k31() -> QuadExtension {
    let f = field();
    QuadExtension::admissible(&f, &-&f.from_small_coords(0, 1)).unwrap()
}
