//! Period lattices of `E` at the real places, `Omega^beta`, and the
//! Weierstrass uniformization `C/Lambda -> E(C)`.

use crate::ecurve::EllipticCurveF;
use crate::mp::{agm, integrate_half_line, integrate_interval, weierstrass_roots, Complex, CubicRoots, Ctx, Real};
use crate::nfield::RealPlace;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PeriodError {
    #[error("embedded discriminant vanishes at working precision")]
    SingularEmbedding,
    #[error("precision must be at least 64 bits, got {0}")]
    PrecisionTooLow(usize),
}

/// `E` over `R` through `tau_j`, with its short model `Y^2 = 4X^3 - g2 X - g3`.
#[derive(Clone, Debug)]
pub struct EmbeddedModel {
    pub a: [Real; 5],
    pub b2: Real,
    pub g2: Real,
    pub g3: Real,
}

impl EmbeddedModel {
    pub fn new(curve: &EllipticCurveF, place: RealPlace, ctx: &Ctx) -> EmbeddedModel {
        let a = curve.coefficients().clone().map(|c| c.embed(place, ctx));
        let inv = curve.invariants();
        let b2 = inv[0].embed(place, ctx);
        let g2 = &inv[4].embed(place, ctx) / &ctx.int(12);
        let g3 = &inv[5].embed(place, ctx) / &ctx.int(216);
        EmbeddedModel { a, b2, g2, g3 }
    }

    /// `g2^3 - 27 g3^2`, a positive multiple of the discriminant.
    pub fn disc(&self, ctx: &Ctx) -> Real {
        let g2c = &(&self.g2 * &self.g2) * &self.g2;
        &g2c - &(&ctx.int(27) * &(&self.g3 * &self.g3))
    }

    /// `(x, y)` on the input model from `(wp, wp')`.
    pub fn transport(&self, ctx: &Ctx, wp: &Complex, dwp: &Complex) -> (Complex, Complex) {
        let shift = Complex::from_real(&self.b2 / &ctx.int(12));
        let x = wp - &shift;
        let a1 = Complex::from_real(self.a[0].clone());
        let a3 = Complex::from_real(self.a[2].clone());
        let half = ctx.f64(0.5);
        let y = (&(dwp - &(&a1 * &x)) - &a3).scale(&half);
        (x, y)
    }

    /// `y^2 + a1 xy + a3 y - (x^3 + a2 x^2 + a4 x + a6)`.
    pub fn residual(&self, x: &Complex, y: &Complex) -> Complex {
        let c = |r: &Real| Complex::from_real(r.clone());
        let [a1, a2, a3, a4, a6] = [c(&self.a[0]), c(&self.a[1]), c(&self.a[2]), c(&self.a[3]), c(&self.a[4])];
        let lhs = &(&(y * y) + &(&(&a1 * x) * y)) + &(&a3 * y);
        let x2 = x * x;
        let rhs = &(&(&(&x2 * x) + &(&a2 * &x2)) + &(&a4 * x)) + &a6;
        &lhs - &rhs
    }
}

/// `Omega^+` real positive, `Omega^-` purely imaginary with positive
/// imaginary part. The period lattice is `Z Omega^+ + Z Omega^-` when the
/// discriminant is positive and `Z Omega^+ + Z (Omega^+ + Omega^-)/2` otherwise.
#[derive(Clone, Debug)]
pub struct PeriodLattice {
    pub omega_plus: Complex,
    pub omega_minus: Complex,
    pub covolume: Real,
    pub disc_positive: bool,
}

impl PeriodLattice {
    /// A basis `(w1, w2)` of the period lattice itself.
    pub fn basis(&self, ctx: &Ctx) -> (Complex, Complex) {
        if self.disc_positive {
            (self.omega_plus.clone(), self.omega_minus.clone())
        } else {
            let half = ctx.f64(0.5);
            (self.omega_plus.clone(), (&self.omega_plus + &self.omega_minus).scale(&half))
        }
    }

    /// Real coordinates `(s, t)` with `z = s Omega^+ + t Omega^-`.
    pub fn lambda1_coords(&self, z: &Complex) -> (Real, Real) {
        (&z.re / &self.omega_plus.re, &z.im / &self.omega_minus.im)
    }

    pub fn is_rectangular(&self) -> bool {
        self.disc_positive
    }
}

pub fn period_lattice(curve: &EllipticCurveF, place: RealPlace, ctx: &Ctx) -> Result<PeriodLattice, PeriodError> {
    let model = EmbeddedModel::new(curve, place, ctx);
    lattice_from_invariants(ctx, &model.g2, &model.g3)
}

/// AGM periods of `Y^2 = 4X^3 - g2 X - g3`.
pub fn lattice_from_invariants(ctx: &Ctx, g2: &Real, g3: &Real) -> Result<PeriodLattice, PeriodError> {
    if ctx.prec() < 64 {
        return Err(PeriodError::PrecisionTooLow(ctx.prec()));
    }
    let disc = &(&(g2 * g2) * g2) - &(&ctx.int(27) * &(g3 * g3));
    let scale = (g2 * g2).abs().max(&(g3 * g3).abs());
    if disc.abs().lt(&(&scale * &ctx.pow2(-(ctx.prec() as i64) / 2))) {
        return Err(PeriodError::SingularEmbedding);
    }
    let pi = ctx.pi();
    let (wp, wm, positive) = match weierstrass_roots(ctx, g2, g3) {
        CubicRoots::Real([e1, e2, e3]) => {
            let a = (&e1 - &e3).sqrt();
            let wp = &pi / &agm(ctx, &a, &(&e1 - &e2).sqrt());
            let wm = &pi / &agm(ctx, &a, &(&e2 - &e3).sqrt());
            (wp, wm, true)
        }
        CubicRoots::Complex(e1, _) => {
            let beta = (&(&ctx.int(3) * &(&e1 * &e1)) - &(g2 / &ctx.int(4))).sqrt();
            let two_pi = &pi * &ctx.int(2);
            let a = &ctx.int(2) * &beta.sqrt();
            let three_e1 = &ctx.int(3) * &e1;
            let two_beta = &ctx.int(2) * &beta;
            let wp = &two_pi / &agm(ctx, &a, &(&two_beta + &three_e1).sqrt());
            let wm = &two_pi / &agm(ctx, &a, &(&two_beta - &three_e1).sqrt());
            (wp, wm, false)
        }
    };
    let covolume = &wp * &wm;
    Ok(PeriodLattice {
        omega_plus: Complex::from_real(wp),
        omega_minus: Complex::new(ctx.zero(), wm),
        covolume,
        disc_positive: positive,
    })
}

/// Quadrature values of `(Omega^+, Im Omega^-)` with error estimates, used as
/// an independent check on the AGM.
pub fn periods_by_quadrature(ctx: &Ctx, g2: &Real, g3: &Real) -> ((Real, Real), (Real, Real)) {
    let roots = weierstrass_roots(ctx, g2, g3);
    let e1 = match &roots {
        CubicRoots::Real([e1, _, _]) => e1.clone(),
        CubicRoots::Complex(e1, _) => e1.clone(),
    };
    let three_e1 = &ctx.int(3) * &e1;
    let c0 = &(&three_e1 * &e1) - &(g2 / &ctx.int(4));
    let two = ctx.int(2);
    let (p, dp) = integrate_half_line(ctx, |t| {
        let t2 = t * t;
        (&(&(&t2 * &t2) + &(&three_e1 * &t2)) + &c0).sqrt().recip()
    });
    let plus = (&two * &p, &two * &dp);
    let minus = match roots {
        CubicRoots::Real([e1, e2, e3]) => {
            let (m, dm) = integrate_interval(ctx, &e2, &e1, |x, da, db| {
                let prod = &(&(&ctx.int(4) * da) * db) * &(x - &e3);
                prod.sqrt().recip()
            });
            (&two * &m, &two * &dm)
        }
        CubicRoots::Complex(..) => {
            // X = e1 - s^2: dX / sqrt(-g) = ds / sqrt(s^4 - 3e1 s^2 + 3e1^2 - g2/4).
            let (m, dm) = integrate_half_line(ctx, |s| {
                let s2 = s * s;
                (&(&(&s2 * &s2) - &(&three_e1 * &s2)) + &c0).sqrt().recip()
            });
            (&two * &m, &two * &dm)
        }
    };
    (plus, minus)
}

/// `Omega_2^+` for trivial `beta`, `Omega_2^-` otherwise.
pub fn omega_beta(tau2: &PeriodLattice, beta: i32) -> Complex {
    if beta >= 0 {
        tau2.omega_plus.clone()
    } else {
        tau2.omega_minus.clone()
    }
}

/// Image of `z` under `C/Lambda -> E(C)`.
#[derive(Clone, Debug)]
pub enum WeierstrassImage {
    Infinity,
    Affine(Complex, Complex),
}

/// Lattice basis reduced so that `tau = w2/w1` lies in the standard
/// fundamental domain.
pub fn reduced_basis(ctx: &Ctx, w1: &Complex, w2: &Complex) -> (Complex, Complex) {
    let (mut a, mut b) = (w1.clone(), w2.clone());
    if (&b / &a).im.is_negative() {
        b = -&b;
    }
    for _ in 0..200 {
        let m = (&b / &a).re.round();
        b = &b - &a.scale(&m);
        if b.norm_sqr().lt(&(&a.norm_sqr() * &(&ctx.one() - &ctx.pow2(-40)))) {
            let t = a;
            a = b;
            b = -&t;
        } else {
            break;
        }
    }
    (a, b)
}

/// Returns `(wp(z), wp'(z))` on the lattice spanned by `(w1, w2)`, or `None`
/// within `2^(-prec/2)` of a lattice point.
pub fn weierstrass_p(ctx: &Ctx, z: &Complex, w1: &Complex, w2: &Complex) -> Option<(Complex, Complex)> {
    let (w1, w2) = reduced_basis(ctx, w1, w2);
    let tau = &w2 / &w1;
    let zz = &z.clone() / &w1;
    // zz = a + b tau with real a, b
    let b = &zz.im / &tau.im;
    let b_round = b.round();
    let a = &zz.re - &(&b * &tau.re);
    let a_round = a.round();
    let red = &(&zz - &Complex::from_real(a_round)) - &tau.scale(&b_round);
    if red.abs().lt(&ctx.pow2(-(ctx.prec() as i64) / 2)) {
        return None;
    }
    let u = ctx.e(&red);
    let q = ctx.e(&tau);
    let one = Complex::one(ctx);
    let two_pi_i = Complex::new(ctx.zero(), &ctx.pi() * &ctx.int(2));
    let k = &two_pi_i / &w1;
    let uinv = u.recip();
    let wp_term = |v: &Complex| -> Complex {
        let d = &one - v;
        v / &(&d * &d)
    };
    let dwp_term = |v: &Complex| -> Complex {
        let d = &one - v;
        &(v * &(&one + v)) / &(&(&d * &d) * &d)
    };
    let tiny = ctx.pow2(-(ctx.prec() as i64) - 8);
    let mut s = &Complex::from_real(&ctx.one() / &ctx.int(12)) + &wp_term(&u);
    let mut ds = dwp_term(&u);
    let mut qn = q.clone();
    for _ in 0..10_000 {
        let a = &qn * &u;
        let b = &qn * &uinv;
        let two_q = wp_term(&qn).scale(&ctx.int(2));
        s = &(&(&s + &wp_term(&a)) + &wp_term(&b)) - &two_q;
        ds = &(&ds + &dwp_term(&a)) - &dwp_term(&b);
        if (&qn.abs() * &(&uinv.abs() + &u.abs())).lt(&tiny) {
            break;
        }
        qn = &qn * &q;
    }
    let k2 = &k * &k;
    let k3 = &k2 * &k;
    Some((&k2 * &s, &k3 * &ds))
}

/// `Phi_1(z)` transported to the model of `E` at `place`.
pub fn weierstrass_point(ctx: &Ctx, z: &Complex, lattice: &PeriodLattice, model: &EmbeddedModel) -> WeierstrassImage {
    let (w1, w2) = lattice.basis(ctx);
    match weierstrass_p(ctx, z, &w1, &w2) {
        None => WeierstrassImage::Infinity,
        Some((wp, dwp)) => {
            let (x, y) = model.transport(ctx, &wp, &dwp);
            WeierstrassImage::Affine(x, y)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: &Real, b: &Real) -> f64 {
        (&(a - b) / b).abs().to_f64()
    }

    #[test]
    fn agm_matches_quadrature_rectangular() {
        let ctx = Ctx::new(128);
        let (g2, g3) = (ctx.int(4), ctx.int(0));
        let l = lattice_from_invariants(&ctx, &g2, &g3).unwrap();
        let ((p, _), (m, _)) = periods_by_quadrature(&ctx, &g2, &g3);
        assert!(rel(&l.omega_plus.re, &p) < 1e-30);
        assert!(rel(&l.omega_minus.im, &m) < 1e-30);
        // y^2 = 4x^3 - 4x is square: both periods agree.
        assert!(rel(&p, &m) < 1e-30);
    }

    #[test]
    fn agm_matches_quadrature_one_component() {
        let ctx = Ctx::new(128);
        let (g2, g3) = (ctx.int(3), ctx.int(-5));
        let l = lattice_from_invariants(&ctx, &g2, &g3).unwrap();
        assert!(!l.disc_positive);
        let ((p, _), (m, _)) = periods_by_quadrature(&ctx, &g2, &g3);
        assert!(rel(&l.omega_plus.re, &p) < 1e-30);
        assert!(rel(&l.omega_minus.im, &m) < 1e-30);
    }

    #[test]
    fn wp_satisfies_differential_equation() {
        let ctx = Ctx::new(192);
        for (g2, g3) in [(3i64, -5i64), (4, 0), (7, 2)] {
            let (g2, g3) = (ctx.int(g2), ctx.int(g3));
            let l = lattice_from_invariants(&ctx, &g2, &g3).unwrap();
            let (w1, w2) = l.basis(&ctx);
            let z = Complex::new(ctx.f64(0.3137), ctx.f64(0.2213));
            let (wp, dwp) = weierstrass_p(&ctx, &z, &w1, &w2).unwrap();
            let rhs = &(&(&(&wp * &wp) * &wp).scale(&ctx.int(4)) - &wp.scale(&g2)) - &Complex::from_real(g3.clone());
            let res = (&(&dwp * &dwp) - &rhs).abs().to_f64();
            assert!(res < 1e-45, "residual {res}");
            let shifted = &(&z + &w1.scale(&ctx.int(2))) - &w2.scale(&ctx.int(3));
            let (wp2, _) = weierstrass_p(&ctx, &shifted, &w1, &w2).unwrap();
            assert!((&wp2 - &wp).abs().to_f64() < 1e-45);
        }
    }

    #[test]
    fn half_period_is_two_torsion() {
        let ctx = Ctx::new(128);
        let (g2, g3) = (ctx.int(7), ctx.int(2));
        let l = lattice_from_invariants(&ctx, &g2, &g3).unwrap();
        let z = l.omega_plus.scale(&ctx.f64(0.5));
        let (w1, w2) = l.basis(&ctx);
        let (_, dwp) = weierstrass_p(&ctx, &z, &w1, &w2).unwrap();
        assert!(dwp.abs().to_f64() < 1e-30);
        assert!(weierstrass_p(&ctx, &Complex::zero(&ctx), &w1, &w2).is_none());
    }
}
