//! Elliptic curves over `F`: reduction data, Frobenius traces, root numbers
//! and exact point arithmetic.

mod point;

pub use point::{Model, Point, Scalar};

use alloc::vec::Vec;

use crate::nfield::{valuation, ElementF, FieldError, IdealF, Place, RealQuadraticField, Residue, ResidueRing};

/// Default ceiling on `N p` for point counting.
pub const NORM_BOUND: u64 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ReductionType {
    SplitMult,
    NonsplitMult,
}

impl ReductionType {
    pub fn label(self) -> &'static str {
        match self {
            ReductionType::SplitMult => "split_mult",
            ReductionType::NonsplitMult => "nonsplit_mult",
        }
    }

    pub fn flipped(self) -> ReductionType {
        match self {
            ReductionType::SplitMult => ReductionType::NonsplitMult,
            ReductionType::NonsplitMult => ReductionType::SplitMult,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reduction {
    Good,
    Mult(ReductionType),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConductorPrime {
    pub prime: IdealF,
    pub kind: ReductionType,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CurveError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("coefficient a{0} is not integral")]
    NotIntegral(u8),
    #[error("discriminant vanishes")]
    Singular,
    #[error("additive or non-minimal reduction at the prime of norm {0}")]
    AdditiveReduction(u64),
    #[error("prime of norm {0} divides the discriminant but is missing from the conductor")]
    MissingConductorPrime(u64),
    #[error("prime of norm {0} is listed in the conductor but has good reduction")]
    NotBadPrime(u64),
    #[error("conductor lists the prime of norm {0} twice")]
    ConductorNotSquarefree(u64),
    #[error("declared {declared} reduction at the prime of norm {norm}, found otherwise")]
    ReductionMismatch { norm: u64, declared: &'static str },
    #[error("point hint is not on the curve")]
    NotOnCurve,
    #[error("prime norm {norm} exceeds the counting bound {bound}")]
    NormBoundExceeded { norm: u64, bound: u64 },
}

/// `E: y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6` over `O_F`.
#[derive(Clone, Debug)]
pub struct EllipticCurveF {
    field: RealQuadraticField,
    a: [ElementF; 5],
    conductor: Vec<ConductorPrime>,
    generator_hint: Option<(ElementF, ElementF)>,
    norm_bound: u64,
}

/// `b2, b4, b6, b8, c4, c6, disc` of a Weierstrass model, generic in the scalar.
pub fn invariants(a: &[ElementF; 5]) -> [ElementF; 7] {
    let [a1, a2, a3, a4, a6] = a;
    let b2 = &(a1 * a1) + &a2.scale_int(4);
    let b4 = &a4.scale_int(2) + &(a1 * a3);
    let b6 = &(a3 * a3) + &a6.scale_int(4);
    let b8 = &(&(&(&(&(a1 * a1) * a6) + &(&a2.scale_int(4) * a6)) - &(&(a1 * a3) * a4)) + &(&(a2 * a3) * a3)) - &(a4 * a4);
    let c4 = &(&b2 * &b2) - &b4.scale_int(24);
    let c6 = &(&(-&(&(&b2 * &b2) * &b2)) + &(&(&b2 * &b4) * &ElementF::from_ints(a1.radicand(), 36, 0))) - &b6.scale_int(216);
    let disc = &(&(&(-&(&(&b2 * &b2) * &b8)) - &(&(&b4 * &b4) * &b4).scale_int(8)) - &(&b6 * &b6).scale_int(27)) + &(&(&b2 * &b4) * &b6).scale_int(9);
    [b2, b4, b6, b8, c4, c6, disc]
}

impl EllipticCurveF {
    /// Validates the model, the declared conductor and the point hint.
    pub fn new(
        field: &RealQuadraticField,
        a: [ElementF; 5],
        conductor: Vec<ConductorPrime>,
        generator_hint: Option<(ElementF, ElementF)>,
    ) -> Result<EllipticCurveF, CurveError> {
        for (i, ai) in a.iter().enumerate() {
            if !field.is_integral(ai) {
                return Err(CurveError::NotIntegral([1, 2, 3, 4, 6][i]));
            }
        }
        let mut conductor = conductor;
        conductor.sort_by(|x, y| x.prime.cmp(&y.prime));
        for w in conductor.windows(2) {
            if w[0].prime == w[1].prime {
                return Err(CurveError::ConductorNotSquarefree(w[0].prime.norm()));
            }
        }
        let curve = EllipticCurveF { field: field.clone(), a, conductor, generator_hint, norm_bound: NORM_BOUND };
        let inv = curve.invariants();
        let disc = &inv[6];
        if disc.is_zero() {
            return Err(CurveError::Singular);
        }
        let disc_ideal = IdealF::principal(field, disc)?;
        let bad: Vec<IdealF> = disc_ideal.factor(field).into_iter().map(|(p, _)| p).collect();
        for p in &bad {
            let vc4 = if inv[4].is_zero() { i64::MAX } else { valuation(field, p, &inv[4]) };
            if vc4 > 0 {
                return Err(CurveError::AdditiveReduction(p.norm()));
            }
            if !curve.conductor.iter().any(|c| c.prime == *p) {
                return Err(CurveError::MissingConductorPrime(p.norm()));
            }
        }
        for c in &curve.conductor {
            if !bad.contains(&c.prime) {
                return Err(CurveError::NotBadPrime(c.prime.norm()));
            }
            curve.verify_reduction(c)?;
        }
        if let Some((x, y)) = &curve.generator_hint {
            if !curve.model_f().contains(&Point::Affine(x.clone(), y.clone())) {
                return Err(CurveError::NotOnCurve);
            }
        }
        Ok(curve)
    }

    pub fn with_norm_bound(mut self, bound: u64) -> EllipticCurveF {
        self.norm_bound = bound;
        self
    }

    pub fn field(&self) -> &RealQuadraticField {
        &self.field
    }

    pub fn coefficients(&self) -> &[ElementF; 5] {
        &self.a
    }

    pub fn conductor(&self) -> &[ConductorPrime] {
        &self.conductor
    }

    pub fn generator_hint(&self) -> Option<Point<ElementF>> {
        self.generator_hint.as_ref().map(|(x, y)| Point::Affine(x.clone(), y.clone()))
    }

    /// `[b2, b4, b6, b8, c4, c6, disc]`.
    pub fn invariants(&self) -> [ElementF; 7] {
        invariants(&self.a)
    }

    pub fn discriminant(&self) -> ElementF {
        self.invariants()[6].clone()
    }

    pub fn conductor_ideal(&self) -> IdealF {
        self.conductor.iter().fold(IdealF::unit(&self.field), |acc, c| acc.mul(&self.field, &c.prime))
    }

    pub fn model_f(&self) -> Model<ElementF> {
        Model::from_base(&self.field.int(0), &self.a)
    }

    pub fn reduction_at(&self, prime: &IdealF) -> Reduction {
        match self.conductor.iter().find(|c| c.prime == *prime) {
            Some(c) => Reduction::Mult(c.kind),
            None => Reduction::Good,
        }
    }

    fn verify_reduction(&self, c: &ConductorPrime) -> Result<(), CurveError> {
        let counted = self.count_trace(&c.prime)?;
        let expected = match c.kind {
            ReductionType::SplitMult => 1,
            ReductionType::NonsplitMult => -1,
        };
        let mismatch = CurveError::ReductionMismatch { norm: c.prime.norm(), declared: c.kind.label() };
        if counted != expected {
            return Err(mismatch);
        }
        let ring = ResidueRing::new(&self.field, &c.prime, 1)?;
        if ring.residue_char() != 2 {
            let c6 = ring.reduce(&self.field, &self.invariants()[5]).expect("integral");
            let minus_c6 = ring.neg(c6);
            let square = ring.pow(minus_c6, (ring.q() - 1) / 2) == ring.one();
            if square != (c.kind == ReductionType::SplitMult) {
                return Err(mismatch);
            }
        }
        Ok(())
    }

    /// `N p + 1 - #E(k_p)`, counting the singular point when there is one.
    fn count_trace(&self, prime: &IdealF) -> Result<i64, CurveError> {
        let q = prime.norm();
        if q > self.norm_bound {
            return Err(CurveError::NormBoundExceeded { norm: q, bound: self.norm_bound });
        }
        let ring = ResidueRing::new(&self.field, prime, 1)?;
        let red = |e: &ElementF| ring.reduce(&self.field, e).expect("integral");
        let elems: Vec<Residue> = ring.elements().collect();
        if ring.residue_char() == 2 {
            let [a1, a2, a3, a4, a6] = [red(&self.a[0]), red(&self.a[1]), red(&self.a[2]), red(&self.a[3]), red(&self.a[4])];
            let mut count = 1i64;
            for &x in &elems {
                let x2 = ring.mul(x, x);
                let rhs = ring.add(ring.add(ring.mul(x2, x), ring.mul(a2, x2)), ring.add(ring.mul(a4, x), a6));
                for &y in &elems {
                    let lhs = ring.add(ring.mul(y, y), ring.mul(ring.add(ring.mul(a1, x), a3), y));
                    if lhs == rhs {
                        count += 1;
                    }
                }
            }
            return Ok(q as i64 + 1 - count);
        }
        let mut chi = alloc::vec![-1i8; ring.size() as usize];
        chi[ring.index(ring.zero())] = 0;
        for &y in &elems {
            let s = ring.mul(y, y);
            if s != ring.zero() {
                chi[ring.index(s)] = 1;
            }
        }
        let inv = invariants(&self.a);
        let b2 = red(&inv[0]);
        let b4 = red(&inv[1]);
        let b6 = red(&inv[2]);
        let two_b4 = ring.add(b4, b4);
        let four = ring.int(4);
        let mut sum = 0i64;
        for &x in &elems {
            let x2 = ring.mul(x, x);
            let f = ring.add(ring.add(ring.mul(four, ring.mul(x2, x)), ring.mul(b2, x2)), ring.add(ring.mul(two_b4, x), b6));
            sum += chi[ring.index(f)] as i64;
        }
        Ok(-sum)
    }

    /// Hecke eigenvalue `a_p` for a prime ideal `p`.
    pub fn a_p(&self, prime: &IdealF) -> Result<i64, CurveError> {
        match self.reduction_at(prime) {
            Reduction::Mult(ReductionType::SplitMult) => Ok(1),
            Reduction::Mult(ReductionType::NonsplitMult) => Ok(-1),
            Reduction::Good => self.count_trace(prime),
        }
    }

    pub fn local_root_number(&self, place: &Place) -> i32 {
        match place {
            Place::Real(_) => -1,
            Place::Finite(p) => match self.reduction_at(p) {
                Reduction::Good => 1,
                Reduction::Mult(ReductionType::SplitMult) => -1,
                Reduction::Mult(ReductionType::NonsplitMult) => 1,
            },
        }
    }

    pub fn global_root_number(&self) -> i32 {
        let arch = 1;
        self.conductor.iter().fold(arch, |acc, c| acc * self.local_root_number(&Place::Finite(c.prime.clone())))
    }

    /// The same curve with the reduction type at conductor prime `i` flipped,
    /// without re-verification.
    pub fn with_flipped_type(&self, i: usize) -> EllipticCurveF {
        let mut out = self.clone();
        out.conductor[i].kind = out.conductor[i].kind.flipped();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nfield::{make_field, splitting_type};

    #[test]
    fn e37_over_q_sqrt5() {
        let f = make_field(5).unwrap();
        let a = [f.int(0), f.int(0), f.int(1), f.int(-1), f.int(0)];
        let p37 = splitting_type(&f, 37).unwrap().primes[0].clone();
        let e = EllipticCurveF::new(&f, a.clone(), alloc::vec![ConductorPrime { prime: p37.clone(), kind: ReductionType::SplitMult }], Some((f.int(0), f.int(0))))
            .unwrap();
        assert_eq!(e.global_root_number(), -1);
        assert_eq!(e.a_p(&p37).unwrap(), 1);
        let bad = EllipticCurveF::new(&f, a, alloc::vec![ConductorPrime { prime: p37, kind: ReductionType::NonsplitMult }], None);
        assert!(matches!(bad, Err(CurveError::ReductionMismatch { .. })));
    }

    #[test]
    fn group_law_on_e37() {
        let f = make_field(5).unwrap();
        let a = [f.int(0), f.int(0), f.int(1), f.int(-1), f.int(0)];
        let m = Model::from_base(&f.int(0), &a);
        let p = Point::Affine(f.int(0), f.int(0));
        let p2 = m.add(&p, &p);
        assert_eq!(p2, Point::Affine(f.int(1), f.int(0)));
        let p3 = m.add(&p2, &p);
        assert_eq!(p3, Point::Affine(f.int(-1), f.int(-1)));
        assert!(m.contains(&m.mul(&p, 7)));
        assert_eq!(m.sub(&m.mul(&p, 5), &m.mul(&p, 3)), p2);
        assert!(m.torsion_order(&p, 30).is_none());
        assert!(m.add(&p, &m.neg(&p)).is_infinity());
    }
}
