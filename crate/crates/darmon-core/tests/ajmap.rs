mod common;

use darmon_core::ajmap::{antiderivative, darmon_j, semi_indefinite, AjError};
use darmon_core::cycles::{build_embedding, cycle_data};
use darmon_core::gkzscan::balanced_basepoint;
use darmon_core::hmf::build_table;
use darmon_core::mp::Ctx;
use darmon_core::signs::{conductor_split, predicted_invariants};

#[test]
fn j_is_stable_under_precision_increase() {
    let e = common::e31();
    let k = common::k31();
    let f = e.field().clone();
    let table = build_table(&e, 6000).unwrap();
    let (plus, _) = conductor_split(&e, &predicted_invariants(&e, &k, 2).unwrap());
    let mut values = Vec::new();
    for bits in [64usize, 96] {
        let ctx = Ctx::new(bits);
        let q = build_embedding(&k, &plus[0]).unwrap();
        let cycle = cycle_data(&q, &ctx).unwrap();
        let w = balanced_basepoint(&ctx, &cycle);
        let j = darmon_j(&ctx, &f, &table, &cycle, 1, &w, 1e-12).unwrap();
        assert!(j.tail < 1e-9);
        values.push(j.value.to_f64());
    }
    let (a, b) = (values[0], values[1]);
    let err = ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt();
    assert!(err < 1e-10, "{a:?} {b:?}");
}

#[test]
fn reversed_path_negates() {
    let e = common::e31();
    let f = e.field().clone();
    let table = build_table(&e, 3000).unwrap();
    let ctx = Ctx::new(96);
    let z1 = ctx.complex(0.2, 0.9);
    let (x1, x2) = (ctx.complex(0.1, 0.8), ctx.complex(-0.3, 1.2));
    for beta in [1, -1] {
        let s = semi_indefinite(&ctx, &f, &table, &z1, &x1, &x2, beta, 1e-20).unwrap();
        let r = semi_indefinite(&ctx, &f, &table, &z1, &x2, &x1, beta, 1e-20).unwrap();
        assert!((&s.value + &r.value).abs().to_f64() < 1e-25);
    }
}

#[test]
fn rejects_bad_inputs() {
    let e = common::e31();
    let f = e.field().clone();
    let table = build_table(&e, 200).unwrap();
    let ctx = Ctx::new(64);
    let z = ctx.complex(0.0, 1.0);
    assert!(matches!(antiderivative(&ctx, &f, &table, &[(z.clone(), z.clone())], 1e-2), Err(AjError::BadTolerance(_))));
    let low = ctx.complex(0.0, -1.0);
    assert!(matches!(antiderivative(&ctx, &f, &table, &[(z, low)], 1e-8), Err(AjError::NotInUpperHalfPlane)));
}
