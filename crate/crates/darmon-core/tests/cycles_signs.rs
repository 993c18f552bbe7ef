mod common;

use darmon_core::cycles::{build_embedding, conjugation_flip, cycle_data, mobius};
use darmon_core::mp::{Complex, Ctx};
use darmon_core::nfield::{QuadExtension, RealPlace};
use darmon_core::signs::{conductor_split, heegner_check, multiplicity_factor, parity_check, predicted_invariants};

#[test]
fn embedding_and_cycle_for_the_reference_pair() {
    let e = common::e31();
    let k = common::k31();
    let f = e.field().clone();
    let profile = predicted_invariants(&e, &k, 2).unwrap();
    let (plus, minus) = conductor_split(&e, &profile);
    assert_eq!((plus.len(), minus.len()), (1, 0));
    assert!(heegner_check(&k, &plus, &minus).unwrap().is_ok());
    let q = build_embedding(&k, &plus[0]).unwrap();
    let (t, n) = k.theta_poly();
    assert_eq!(&q.m_theta.trace(), t);
    assert_eq!(&q.m_theta.det(), n);
    assert!(q.m_theta.in_eichler(&f, &plus[0]));

    let ctx = Ctx::new(96);
    let cycle = cycle_data(&q, &ctx).unwrap();
    assert!(cycle.gamma_eps.det().is_one());
    assert!(cycle.gamma_eps.in_eichler(&f, &plus[0]));
    let g1 = cycle.gamma_eps.embed(RealPlace::Tau1, &ctx);
    let moved = mobius(&g1, &cycle.z1_star);
    assert!((&moved - &cycle.z1_star).abs().to_f64() < 1e-20);
    let g2 = cycle.gamma_eps.embed(RealPlace::Tau2, &ctx);
    for end in [&cycle.endpoints.0, &cycle.endpoints.1] {
        let x = Complex::from_real(end.clone());
        assert!((&mobius(&g2, &x) - &x).abs().to_f64() < 1e-15 * (1.0 + end.abs().to_f64()));
    }
    let back = conjugation_flip(&conjugation_flip(&cycle));
    assert_eq!(back.orientation, cycle.orientation);
    assert_eq!(back.oriented_gamma(), cycle.gamma_eps);
    assert_eq!(conjugation_flip(&cycle).oriented_gamma().mul(&cycle.gamma_eps), darmon_core::cycles::Mat2::identity(5));
}

#[test]
fn multiplicity_follows_the_splitting_of_the_conductor() {
    let e = common::e31();
    let f = e.field().clone();
    let conductor: Vec<_> = e.conductor().iter().map(|c| c.prime.clone()).collect();
    for ((x, y), want) in [((-1, -1), 2u64), ((-5, -3), 0)] {
        let delta = darmon_core::nfield::ElementF::new(5, num_rational::BigRational::new(x.into(), 2.into()), num_rational::BigRational::new(y.into(), 2.into()));
        let k = QuadExtension::admissible(&f, &delta).unwrap();
        let profile = predicted_invariants(&e, &k, 2).unwrap();
        assert_eq!(parity_check(&profile).ok(), want != 0);
        assert_eq!(multiplicity_factor(&profile, &conductor), want, "delta = {delta}");
        assert_eq!(profile.n_minus().len(), if want == 0 { 1 } else { 0 });
    }
}
