mod common;

use darmon_core::ecurve::EllipticCurveF;
use darmon_core::hmf::{build_table, prime_ideals_up_to};
use darmon_core::nfield::{ElementF, IdealF, RealQuadraticField};

/// `u + v omega` modulo `p`, with `omega^2 = t omega + s`.
#[derive(Clone, Copy, PartialEq, Eq)]
struct Fq {
    u: i64,
    v: i64,
}

struct Residue {
    p: i64,
    t: i64,
    s: i64,
    /// `Some(r)` when `omega = r` in the residue field.
    root: Option<i64>,
}

impl Residue {
    fn new(f: &RealQuadraticField, prime: &IdealF) -> Residue {
        let n = prime.norm() as i64;
        let (t, s) = f.omega_relation();
        let omega = f.from_small_coords(0, 1);
        let p = if (2..n).any(|d| d * d == n) { (n as f64).sqrt().round() as i64 } else { n };
        let root = (0..p).find(|r| p == n && prime.contains(f, &(&omega - &f.int(*r))));
        Residue { p, t, s, root }
    }

    fn reduce(&self, f: &RealQuadraticField, e: &ElementF) -> Fq {
        let (x, y) = f.small_coords(e).unwrap();
        match self.root {
            Some(r) => Fq { u: (x + y * r).rem_euclid(self.p), v: 0 },
            None => Fq { u: x.rem_euclid(self.p), v: y.rem_euclid(self.p) },
        }
    }

    fn elements(&self) -> Vec<Fq> {
        let vs = if self.root.is_some() { 1 } else { self.p };
        (0..vs).flat_map(|v| (0..self.p).map(move |u| Fq { u, v })).collect()
    }

    fn add(&self, a: Fq, b: Fq) -> Fq {
        Fq { u: (a.u + b.u) % self.p, v: (a.v + b.v) % self.p }
    }

    fn mul(&self, a: Fq, b: Fq) -> Fq {
        let p = self.p;
        let vv = a.v * b.v % p;
        Fq { u: (a.u * b.u + vv * self.s).rem_euclid(p), v: (a.u * b.v + a.v * b.u + vv * self.t).rem_euclid(p) }
    }
}

/// `N p + 1 - #E(O/p)` by enumerating every affine pair.
fn naive_ap(e: &EllipticCurveF, prime: &IdealF) -> i64 {
    let f = e.field();
    let r = Residue::new(f, prime);
    let a: Vec<Fq> = e.coefficients().iter().map(|c| r.reduce(f, c)).collect();
    let els = r.elements();
    let mut count = 1i64;
    for &x in &els {
        let x2 = r.mul(x, x);
        let rhs = r.add(r.add(r.mul(x2, x), r.mul(a[1], x2)), r.add(r.mul(a[3], x), a[4]));
        for &y in &els {
            let lhs = r.add(r.mul(y, y), r.add(r.mul(a[0], r.mul(x, y)), r.mul(a[2], y)));
            if lhs == rhs {
                count += 1;
            }
        }
    }
    prime.norm() as i64 + 1 - count
}

#[test]
fn prime_coefficients_match_point_counts() {
    for e in [common::e31(), common::e37()] {
        let f = e.field().clone();
        let table = build_table(&e, 400).unwrap();
        let mut checked = 0;
        for prime in prime_ideals_up_to(&f, 400) {
            let naive = naive_ap(&e, &prime);
            assert_eq!(e.a_p(&prime).unwrap(), naive, "norm {}", prime.norm());
            assert_eq!(table.get_ideal(&prime), Some(naive), "norm {}", prime.norm());
            checked += 1;
        }
        assert!(checked > 40);
    }
}

#[test]
fn table_is_multiplicative_and_satisfies_the_recurrence() {
    let e = common::e37();
    let f = e.field().clone();
    let table = build_table(&e, 2000).unwrap();
    assert!(table.check_multiplicativity(&f).unwrap() > 500);
    assert!(table.check_recurrence(&f).unwrap() > 10);
    for (p, ap, _) in table.primes() {
        assert!((ap * ap) as u64 <= 4 * p.norm());
    }
}

#[test]
fn unit_ideal_has_coefficient_one() {
    let e = common::e31();
    let f = e.field().clone();
    let table = build_table(&e, 50).unwrap();
    assert_eq!(table.get_ideal(&IdealF::unit(&f)), Some(1));
}
