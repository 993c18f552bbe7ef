mod common;

use std::collections::BTreeSet;

use darmon_core::ajmap::RecognitionSearch;
use darmon_core::gkzscan::{admissible_t, lvalue_terms, lvalue_twist, scan_row, RowTag, ScanConfig};
use darmon_core::hmf::{build_table, prime_ideals_up_to};
use darmon_core::nfield::{IdealF, QuadExtension, RealPlace};

/// Squarefree totally positive `t` prime to the bad set, found in a box of
/// coordinates and deduplicated by ideal.
fn brute_force_count(t_max: u64) -> usize {
    let f = common::field();
    let phi = f.from_small_coords(0, 1);
    let mut bad: Vec<IdealF> = common::e31().conductor().iter().map(|c| c.prime.clone()).collect();
    bad.extend(QuadExtension::new(&f, &-&phi).unwrap().rel_disc().factor(&f).into_iter().map(|(p, _)| p));
    let primes = prime_ideals_up_to(&f, t_max);
    let mut seen = BTreeSet::new();
    for y in -30i64..=30 {
        for x in -30i64..=30 {
            let t = f.from_small_coords(x, y);
            if t.sign_at(RealPlace::Tau1) <= 0 || t.sign_at(RealPlace::Tau2) <= 0 {
                continue;
            }
            let n = t.norm().to_integer();
            if n > t_max.into() {
                continue;
            }
            if primes.iter().any(|p| p.pow(&f, 2).contains(&f, &t)) {
                continue;
            }
            if bad.iter().any(|p| p.contains(&f, &t)) {
                continue;
            }
            if QuadExtension::admissible(&f, &-&(&phi * &t)).is_err() {
                continue;
            }
            seen.insert(IdealF::principal(&f, &t).unwrap().hnf());
        }
    }
    seen.len()
}

#[test]
fn admissible_t_matches_brute_force() {
    let f = common::field();
    let phi = f.from_small_coords(0, 1);
    let conductor: Vec<IdealF> = common::e31().conductor().iter().map(|c| c.prime.clone()).collect();
    for t_max in [30u64, 50] {
        let ts = admissible_t(&f, &phi, &conductor, t_max).unwrap();
        assert_eq!(ts.len(), brute_force_count(t_max), "t_max = {t_max}");
        for t in &ts {
            let d = -&(&phi * t);
            assert!(d.sign_at(RealPlace::Tau1) < 0 && d.sign_at(RealPlace::Tau2) > 0);
        }
        assert!(ts[0].is_one());
    }
    assert!(admissible_t(&f, &-&phi, &conductor, 50).is_err());
}

fn config() -> ScanConfig {
    let f = common::field();
    ScanConfig {
        curve: common::e31(),
        d0: f.from_small_coords(0, 1),
        t_max: 50,
        beta: 1,
        precision: 64,
        tol: 1e-12,
        search: RecognitionSearch { m_max: 4, height_max: 1000 },
        dlog_bound: 200,
        lvalues: true,
    }
}

#[test]
fn sign_vanishing_rows_skip_integration() {
    let cfg = config();
    let table = build_table(&cfg.curve, 3000).unwrap();
    let f = common::field();
    let t = &f.from_small_coords(2, 1);
    let row = scan_row(&cfg, &table, t).unwrap();
    assert_eq!(row.multiplicity, 0);
    assert_eq!(row.tag, RowTag::SignVanishing);
    assert_eq!(row.coefficient, Some(0));
    assert!(row.j.is_none() && row.report.is_none());
    let again = scan_row(&cfg, &table, t).unwrap();
    assert_eq!(again.tag, row.tag);
    assert_eq!(again.lvalue, row.lvalue);
}

#[test]
fn lvalue_is_stable_under_truncation() {
    let e = common::e31();
    let f = common::field();
    let k = QuadExtension::admissible(&f, &f.from_small_coords(0, -3)).unwrap();
    let n = lvalue_terms(&e, &k);
    let table = build_table(&e, n).unwrap();
    let full = lvalue_twist(&e, &k, &table, n).unwrap();
    let half = lvalue_twist(&e, &k, &table, n / 2).unwrap();
    assert_eq!(full.sign, 1);
    assert!(full.value > -full.error);
    assert!((full.value - half.value).abs() <= half.error, "{full:?} {half:?}");
    let vanishing = lvalue_twist(&e, &common::k31(), &table, 10).unwrap();
    assert_eq!((vanishing.sign, vanishing.value), (-1, 0.0));
}
