mod common;

use darmon_core::mp::Ctx;
use darmon_core::nfield::RealPlace;
use darmon_core::periods::{lattice_from_invariants, period_lattice, periods_by_quadrature, weierstrass_point, EmbeddedModel, WeierstrassImage};

#[test]
fn agm_matches_quadrature_at_both_places() {
    let ctx = Ctx::new(128);
    for e in [common::e31(), common::e37()] {
        for place in [RealPlace::Tau1, RealPlace::Tau2] {
            let m = EmbeddedModel::new(&e, place, &ctx);
            let lat = lattice_from_invariants(&ctx, &m.g2, &m.g3).unwrap();
            let ((p, dp), (q, dq)) = periods_by_quadrature(&ctx, &m.g2, &m.g3);
            let ep = (&(&lat.omega_plus.re - &p).abs() / &p).to_f64();
            let eq = (&(&lat.omega_minus.im - &q).abs() / &q).to_f64();
            assert!(ep < 1e-30 && eq < 1e-30, "{ep:e} {eq:e}");
            assert!(dp.to_f64() < 1e-25 && dq.to_f64() < 1e-25);
            assert_eq!(lat.is_rectangular(), !m.disc(&ctx).is_negative());
        }
    }
}

#[test]
fn uniformization_lands_on_the_curve() {
    let ctx = Ctx::new(96);
    let e = common::e37();
    let lat = period_lattice(&e, RealPlace::Tau1, &ctx).unwrap();
    let model = EmbeddedModel::new(&e, RealPlace::Tau1, &ctx);
    let (w1, w2) = lat.basis(&ctx);
    for (s, t) in [(0.13, 0.27), (0.41, 0.05), (0.77, 0.61)] {
        let z = &w1.scale(&ctx.f64(s)) + &w2.scale(&ctx.f64(t));
        match weierstrass_point(&ctx, &z, &lat, &model) {
            WeierstrassImage::Affine(x, y) => {
                let r = model.residual(&x, &y).abs().to_f64();
                assert!(r < 1e-20 * (1.0 + x.abs().to_f64().powi(3)), "{r:e}");
            }
            WeierstrassImage::Infinity => panic!("generic point mapped to infinity"),
        }
    }
}
