//! Hecke eigenvalue tables of the parallel weight two form attached to `E`,
//! and enumeration of totally positive Fourier indices in the inverse different.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::ecurve::{CurveError, EllipticCurveF};
use crate::nfield::{is_prime_u64, splitting_type, ElementF, Hnf, IdealF, PrimeKind, RealPlace, RealQuadraticField};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TableError {
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error("ideal of norm {norm} is outside the table bound {bound}")]
    TableTooSmall { norm: u64, bound: u64 },
    #[error("inconsistent table: {0}")]
    Inconsistent(&'static str),
}

/// `a_m` for all integral ideals with `N m <= bound`.
#[derive(Clone, Debug)]
pub struct CoefficientTable {
    bound: u64,
    entries: BTreeMap<Hnf, (IdealF, i64)>,
    primes: Vec<(IdealF, i64, bool)>,
}

/// Prime ideals of norm at most `bound`, in increasing order.
pub fn prime_ideals_up_to(field: &RealQuadraticField, bound: u64) -> Vec<IdealF> {
    let mut out = Vec::new();
    for p in 2..=bound {
        if !is_prime_u64(p) {
            continue;
        }
        let dec = splitting_type(field, p).expect("prime");
        if dec.kind == PrimeKind::Inert && p * p > bound {
            continue;
        }
        out.extend(dec.primes);
    }
    out.sort();
    out
}

/// Every integral ideal of norm at most `bound`.
pub fn ideals_up_to(field: &RealQuadraticField, bound: u64) -> Vec<IdealF> {
    let mut out = alloc::vec![IdealF::unit(field)];
    for p in prime_ideals_up_to(field, bound) {
        let mut added = Vec::new();
        for m in &out {
            let mut pk = m.mul(field, &p);
            while pk.norm() <= bound {
                added.push(pk.clone());
                pk = pk.mul(field, &p);
            }
        }
        out.extend(added);
    }
    out.sort();
    out
}

/// Sequential table construction.
pub fn build_table(curve: &EllipticCurveF, bound: u64) -> Result<CoefficientTable, TableError> {
    let primes = prime_ideals_up_to(curve.field(), bound);
    let mut aps = Vec::with_capacity(primes.len());
    for p in primes {
        let a = curve.a_p(&p)?;
        aps.push((p, a));
    }
    Ok(table_from_primes(curve, bound, aps))
}

/// Closes prime eigenvalues under the Hecke recurrence and multiplicativity.
pub fn table_from_primes(curve: &EllipticCurveF, bound: u64, aps: Vec<(IdealF, i64)>) -> CoefficientTable {
    let field = curve.field();
    let mut entries: Vec<(IdealF, i64)> = alloc::vec![(IdealF::unit(field), 1)];
    let mut primes = Vec::with_capacity(aps.len());
    for (p, ap) in aps {
        let bad = curve.conductor().iter().any(|c| c.prime == p);
        let q = p.norm() as i64;
        let mut powers: Vec<(IdealF, i64)> = Vec::new();
        let (mut prev, mut cur) = (1i64, ap);
        let mut ideal = p.clone();
        while ideal.norm() <= bound {
            powers.push((ideal.clone(), cur));
            let next = if bad { cur * ap } else { ap * cur - q * prev };
            prev = cur;
            cur = next;
            ideal = ideal.mul(field, &p);
        }
        let mut added = Vec::new();
        for (m, am) in &entries {
            for (pk, apk) in &powers {
                if m.norm() * pk.norm() > bound {
                    break;
                }
                added.push((m.mul(field, pk), am * apk));
            }
        }
        entries.extend(added);
        primes.push((p, ap, bad));
    }
    let entries = entries.into_iter().map(|(m, a)| (m.hnf(), (m, a))).collect();
    CoefficientTable { bound, entries, primes }
}

impl CoefficientTable {
    /// Rebuilds a table from cached `(ideal, a_m)` records, checking closure.
    pub fn from_records(curve: &EllipticCurveF, bound: u64, records: Vec<(IdealF, i64)>) -> Result<CoefficientTable, TableError> {
        let field = curve.field();
        let map: BTreeMap<Hnf, (IdealF, i64)> = records.into_iter().map(|(m, a)| (m.hnf(), (m, a))).collect();
        let primes: Vec<(IdealF, i64, bool)> = prime_ideals_up_to(field, bound)
            .into_iter()
            .map(|p| {
                let a = map.get(&p.hnf()).map(|e| e.1);
                let bad = curve.conductor().iter().any(|c| c.prime == p);
                (p, a, bad)
            })
            .map(|(p, a, bad)| a.map(|a| (p, a, bad)).ok_or(TableError::Inconsistent("missing prime")))
            .collect::<Result<_, _>>()?;
        let rebuilt = table_from_primes(curve, bound, primes.iter().map(|(p, a, _)| (p.clone(), *a)).collect());
        if rebuilt.entries.len() != map.len() || rebuilt.entries.iter().any(|(k, v)| map.get(k).map(|e| e.1) != Some(v.1)) {
            return Err(TableError::Inconsistent("cached coefficients do not close under the recurrence"));
        }
        Ok(rebuilt)
    }

    /// A table with the given entries and zero elsewhere below `bound`.
    pub fn synthetic(field: &RealQuadraticField, bound: u64, records: Vec<(IdealF, i64)>) -> CoefficientTable {
        let mut entries: BTreeMap<Hnf, (IdealF, i64)> = BTreeMap::new();
        for m in ideals_up_to(field, bound) {
            entries.insert(m.hnf(), (m, 0));
        }
        for (m, a) in records {
            entries.insert(m.hnf(), (m, a));
        }
        CoefficientTable { bound, entries, primes: Vec::new() }
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, hnf: &Hnf) -> Option<i64> {
        self.entries.get(hnf).map(|e| e.1)
    }

    pub fn get_ideal(&self, m: &IdealF) -> Option<i64> {
        self.get(&m.hnf())
    }

    /// `a_m`, failing when `N m` exceeds the bound.
    pub fn coefficient(&self, hnf: &Hnf) -> Result<i64, TableError> {
        let norm = (hnf.a as u64) * (hnf.c as u64);
        if norm > self.bound {
            return Err(TableError::TableTooSmall { norm, bound: self.bound });
        }
        self.get(hnf).ok_or(TableError::Inconsistent("ideal missing below the bound"))
    }

    /// Entries sorted by `(norm, hnf)`.
    pub fn iter(&self) -> impl Iterator<Item = (&IdealF, i64)> {
        let mut v: Vec<(&IdealF, i64)> = self.entries.values().map(|(m, a)| (m, *a)).collect();
        v.sort_by(|x, y| x.0.cmp(y.0));
        v.into_iter()
    }

    /// `(prime, a_p, divides conductor)`.
    pub fn primes(&self) -> &[(IdealF, i64, bool)] {
        &self.primes
    }

    /// Checks `a_mn = a_m a_n` over all coprime pairs inside the bound.
    pub fn check_multiplicativity(&self, field: &RealQuadraticField) -> Result<usize, (u64, u64)> {
        let all: Vec<(&IdealF, i64)> = self.iter().collect();
        let mut checked = 0;
        for (i, (m, am)) in all.iter().enumerate() {
            if m.is_unit() {
                continue;
            }
            for (n, an) in all[i..].iter() {
                if n.is_unit() {
                    continue;
                }
                if m.norm() * n.norm() > self.bound {
                    break;
                }
                if !m.is_coprime(field, n) {
                    continue;
                }
                let mn = m.mul(field, n);
                if self.get_ideal(&mn) != Some(am * an) {
                    return Err((m.norm(), n.norm()));
                }
                checked += 1;
            }
        }
        Ok(checked)
    }

    /// Checks the Hecke recurrence at every prime power inside the bound.
    pub fn check_recurrence(&self, field: &RealQuadraticField) -> Result<usize, u64> {
        let mut checked = 0;
        for (p, ap, bad) in &self.primes {
            let q = p.norm() as i64;
            let mut prev = IdealF::unit(field);
            let mut cur = p.clone();
            loop {
                let next = cur.mul(field, p);
                if next.norm() > self.bound {
                    break;
                }
                let (a_prev, a_cur, a_next) = (self.get_ideal(&prev), self.get_ideal(&cur), self.get_ideal(&next));
                let ok = match (a_prev, a_cur, a_next) {
                    (Some(x), Some(y), Some(z)) => {
                        if *bad {
                            z == y * ap
                        } else {
                            z == ap * y - q * x
                        }
                    }
                    _ => false,
                };
                if !ok {
                    return Err(next.norm());
                }
                checked += 1;
                prev = cur;
                cur = next;
            }
        }
        Ok(checked)
    }
}

/// A totally positive `nu = mu / d` in the inverse different, `d` the
/// canonical generator of the different.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierIndex {
    pub nu: ElementF,
    /// Coordinates of `mu = nu d` in the basis `(1, omega)`.
    pub mu: (i64, i64),
    /// HNF of `(nu) d = (mu)`.
    pub ideal: Hnf,
    pub norm: u64,
    /// `(tau1(nu), tau2(nu))`.
    pub emb: (f64, f64),
}

impl FourierIndex {
    pub fn ideal(&self, field: &RealQuadraticField) -> IdealF {
        IdealF::from_hnf(field, self.ideal).expect("principal")
    }
}

/// Every totally positive `nu` in `d^-1` with
/// `exp(-2 pi (tau1(nu) Y1 + tau2(nu) Y2)) >= tol`, sorted by
/// `(N(mu), mu)`.
pub fn enumerate_indices(field: &RealQuadraticField, y1: f64, y2: f64, tol: f64) -> Vec<FourierIndex> {
    assert!(y1 > 0.0 && y2 > 0.0 && tol > 0.0 && tol < 1.0);
    let limit = libm::log(1.0 / tol) / (2.0 * core::f64::consts::PI);
    let d = field.different_gen();
    let d1 = d.approx(RealPlace::Tau1);
    let d2 = d.approx(RealPlace::Tau2);
    let (t, s) = field.omega_relation();
    let dinv = d.inv().expect("nonzero");
    let mut out = Vec::new();
    for (x, y) in field.box_elements(0.0, limit * d1 / y1, 0.0, limit * d2 / y2) {
        let mu = field.from_small_coords(x, y);
        if !mu.is_totally_positive() {
            continue;
        }
        let n1 = mu.approx(RealPlace::Tau1) / d1;
        let n2 = mu.approx(RealPlace::Tau2) / d2;
        if n1 * y1 + n2 * y2 > limit {
            continue;
        }
        let norm = field.small_norm(x, y) as u64;
        let hnf = crate::nfield::principal_hnf_coords(t, s, x as i128, y as i128);
        out.push(FourierIndex { nu: &mu * &dinv, mu: (x, y), ideal: hnf, norm, emb: (n1, n2) });
    }
    out.sort_by(|a, b| (a.norm, a.mu).cmp(&(b.norm, b.mu)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ecurve::{ConductorPrime, ReductionType};
    use crate::nfield::make_field;

    fn e37() -> EllipticCurveF {
        let f = make_field(5).unwrap();
        let a = [f.int(0), f.int(0), f.int(1), f.int(-1), f.int(0)];
        let p37 = splitting_type(&f, 37).unwrap().primes[0].clone();
        EllipticCurveF::new(&f, a, alloc::vec![ConductorPrime { prime: p37, kind: ReductionType::SplitMult }], None).unwrap()
    }

    #[test]
    fn small_table_closes() {
        let e = e37();
        let t = build_table(&e, 200).unwrap();
        let f = e.field();
        assert_eq!(t.get_ideal(&IdealF::unit(f)), Some(1));
        assert!(t.check_multiplicativity(f).unwrap() > 0);
        assert!(t.check_recurrence(f).unwrap() > 0);
        for (p, ap, _) in t.primes() {
            let p2 = p.mul(f, p);
            if p2.norm() <= 200 {
                assert_eq!(t.get_ideal(&p2), Some(ap * ap - p.norm() as i64));
            }
        }
    }

    #[test]
    fn indices_match_brute_force() {
        let f = make_field(5).unwrap();
        let idx = enumerate_indices(&f, 1.0, 1.0, 1e-10);
        let limit = libm::log(1e10) / (2.0 * core::f64::consts::PI);
        let d = f.different_gen();
        let mut brute = Vec::new();
        for x in -60i64..=60 {
            for y in -60i64..=60 {
                let mu = f.from_small_coords(x, y);
                if !mu.is_totally_positive() {
                    continue;
                }
                let nu = mu.div(d).unwrap();
                if nu.approx(RealPlace::Tau1) + nu.approx(RealPlace::Tau2) <= limit {
                    brute.push((x, y));
                }
            }
        }
        let mut got: Vec<(i64, i64)> = idx.iter().map(|i| i.mu).collect();
        got.sort();
        brute.sort();
        assert_eq!(got, brute);
        assert!(!got.is_empty());
    }
}
