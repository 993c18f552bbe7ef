//! Optimal embeddings `K -> M_2(F)` into Eichler orders and the toric cycle
//! `{z1*} x (geodesic at tau2)` they cut out.

use alloc::vec::Vec;

use crate::mp::{Complex, Ctx, Real};
use crate::nfield::{ElementF, ElementK, FieldError, IdealF, QuadExtension, RealPlace, RealQuadraticField};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CycleError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("no optimal embedding of O_K into the Eichler order of level norm {0}")]
    NoOptimalEmbedding(u64),
    #[error("fixed-point discriminants contradict admissibility")]
    DegenerateFixedPoint,
}

/// 2x2 matrix over `F`.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat2 {
    pub a: ElementF,
    pub b: ElementF,
    pub c: ElementF,
    pub d: ElementF,
}

impl Mat2 {
    pub fn new(a: ElementF, b: ElementF, c: ElementF, d: ElementF) -> Mat2 {
        Mat2 { a, b, c, d }
    }

    pub fn scalar(x: &ElementF) -> Mat2 {
        let z = ElementF::zero(x.radicand());
        Mat2::new(x.clone(), z.clone(), z, x.clone())
    }

    pub fn identity(radicand: i64) -> Mat2 {
        Mat2::scalar(&ElementF::one(radicand))
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2::new(
            &(&self.a * &o.a) + &(&self.b * &o.c),
            &(&self.a * &o.b) + &(&self.b * &o.d),
            &(&self.c * &o.a) + &(&self.d * &o.c),
            &(&self.c * &o.b) + &(&self.d * &o.d),
        )
    }

    pub fn add(&self, o: &Mat2) -> Mat2 {
        Mat2::new(&self.a + &o.a, &self.b + &o.b, &self.c + &o.c, &self.d + &o.d)
    }

    pub fn scale(&self, s: &ElementF) -> Mat2 {
        Mat2::new(&self.a * s, &self.b * s, &self.c * s, &self.d * s)
    }

    pub fn det(&self) -> ElementF {
        &(&self.a * &self.d) - &(&self.b * &self.c)
    }

    pub fn trace(&self) -> ElementF {
        &self.a + &self.d
    }

    pub fn inv(&self) -> Option<Mat2> {
        let di = self.det().inv()?;
        Some(Mat2::new(&self.d * &di, &(-&self.b) * &di, &(-&self.c) * &di, &self.a * &di))
    }

    pub fn pow(&self, k: i64) -> Mat2 {
        let base = if k < 0 { self.inv().expect("invertible") } else { self.clone() };
        let mut acc = Mat2::identity(self.a.radicand());
        for _ in 0..k.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    pub fn is_integral(&self, field: &RealQuadraticField) -> bool {
        [&self.a, &self.b, &self.c, &self.d].iter().all(|e| field.is_integral(e))
    }

    /// Integral with lower-left entry in `level`.
    pub fn in_eichler(&self, field: &RealQuadraticField, level: &IdealF) -> bool {
        self.is_integral(field) && level.contains(field, &self.c)
    }

    pub fn embed(&self, place: RealPlace, ctx: &Ctx) -> [Real; 4] {
        [self.a.embed(place, ctx), self.b.embed(place, ctx), self.c.embed(place, ctx), self.d.embed(place, ctx)]
    }
}

/// Möbius action of a real matrix.
pub fn mobius(m: &[Real; 4], z: &Complex) -> Complex {
    let [a, b, c, d] = m;
    let num = &z.scale(a) + &Complex::from_real(b.clone());
    let den = &z.scale(c) + &Complex::from_real(d.clone());
    &num / &den
}

/// An optimal embedding `q: O_K -> R` into the Eichler order of level `N+`.
#[derive(Clone, Debug)]
pub struct EmbeddingQ {
    pub ext: QuadExtension,
    /// Image of `theta`.
    pub m_theta: Mat2,
    pub m_sqrt_delta: Mat2,
    pub level: IdealF,
}

impl EmbeddingQ {
    /// `q(a + b theta)`.
    pub fn image_basis(&self, a: &ElementF, b: &ElementF) -> Mat2 {
        Mat2::scalar(a).add(&self.m_theta.scale(b))
    }

    pub fn image(&self, e: &ElementK) -> Mat2 {
        let (a, b) = self.ext.basis_coords(e);
        self.image_basis(&a, &b)
    }
}

/// Representatives `x + y omega` of `O_F / I`, ordered by `(y, x)`.
fn residue_representatives(field: &RealQuadraticField, level: &IdealF) -> Vec<ElementF> {
    let h = level.hnf();
    let mut out = Vec::with_capacity((h.a * h.c) as usize);
    for y in 0..h.c {
        for x in 0..h.a {
            out.push(field.from_small_coords(x, y));
        }
    }
    out
}

/// `q(theta) = [[r, -(r^2 - t r + n)/g], [g, t - r]]` with `g` the generator
/// of `N+` and `r` the first root of `X^2 - tX + n` modulo `N+`.
pub fn build_embedding(ext: &QuadExtension, n_plus: &IdealF) -> Result<EmbeddingQ, CycleError> {
    let f = ext.base();
    let (t, n) = ext.theta_poly();
    let g = n_plus.gen().clone();
    let root = residue_representatives(f, n_plus)
        .into_iter()
        .find(|r| n_plus.contains(f, &(&(&(r * r) - &(&(t * r))) + n)))
        .ok_or(CycleError::NoOptimalEmbedding(n_plus.norm()))?;
    let off = (&(&(&root * &root) - &(t * &root)) + n).div(&g).expect("nonzero");
    let m_theta = Mat2::new(root.clone(), -&off, g, t - &root);
    let (x, lambda) = ext.theta_parts();
    let m_sqrt_delta = m_theta.scale(lambda).add(&Mat2::scalar(&-x));
    let q = EmbeddingQ { ext: ext.clone(), m_theta, m_sqrt_delta, level: n_plus.clone() };
    if !q.m_theta.in_eichler(f, n_plus) {
        return Err(CycleError::NoOptimalEmbedding(n_plus.norm()));
    }
    Ok(q)
}

/// `{z1*} x gamma` with `gamma` the geodesic at `tau2` joining `endpoints`.
#[derive(Clone, Debug)]
pub struct GeodesicCycle {
    pub z1_star: Complex,
    pub endpoints: (Real, Real),
    pub gamma_eps: Mat2,
    pub orientation: i32,
    /// Set after an odd number of conjugation flips.
    pub conjugated: bool,
}

fn fixed_points(m: &[Real; 4], ctx: &Ctx) -> Result<(Complex, Complex), CycleError> {
    let [a, b, c, d] = m;
    if c.is_zero() {
        return Err(CycleError::DegenerateFixedPoint);
    }
    let dm = d - a;
    let disc = &(&dm * &dm) + &(&ctx.int(4) * &(b * c));
    let s = ctx.csqrt(&Complex::from_real(disc));
    let am = Complex::from_real(a - d);
    let den = &c.clone() * &ctx.int(2);
    let inv = den.recip();
    Ok(((&am + &s).scale(&inv), (&am - &s).scale(&inv)))
}

pub fn cycle_data(q: &EmbeddingQ, ctx: &Ctx) -> Result<GeodesicCycle, CycleError> {
    let ext = &q.ext;
    if !ext.is_admissible() {
        return Err(FieldError::NotAdmissible("cycle needs one complex place").into());
    }
    let m1 = q.m_sqrt_delta.embed(RealPlace::Tau1, ctx);
    let (r1, r2) = fixed_points(&m1, ctx)?;
    if r1.im.is_zero() {
        return Err(CycleError::DegenerateFixedPoint);
    }
    let z1_star = if r1.im.is_negative() { r2 } else { r1 };
    let m2 = q.m_sqrt_delta.embed(RealPlace::Tau2, ctx);
    let (e1, e2) = fixed_points(&m2, ctx)?;
    let scale = &e1.abs() + &e2.abs();
    if !e1.im.abs().lt(&(&scale * &ctx.pow2(-(ctx.prec() as i64) / 2))) {
        return Err(CycleError::DegenerateFixedPoint);
    }
    let eta = ext.rel_fund_unit().ok_or(FieldError::NotAdmissible("relative unit missing"))?;
    Ok(GeodesicCycle { z1_star, endpoints: (e1.re, e2.re), gamma_eps: q.image(eta), orientation: 1, conjugated: false })
}

/// `beta(u)` for `u` in `pi_0(T(R)) = {+1, -1}`.
pub fn orientation_transport(u: i32, beta: i32) -> i32 {
    if u < 0 && beta < 0 {
        -1
    } else {
        1
    }
}

/// `z1*` moves to the conjugate sheet and the orientation picks up `(-1)^(r-1)`.
pub fn conjugation_flip(cycle: &GeodesicCycle) -> GeodesicCycle {
    let mut out = cycle.clone();
    out.orientation = -cycle.orientation;
    out.conjugated = !cycle.conjugated;
    out
}

impl GeodesicCycle {
    /// `gamma_eps^orientation`, the matrix carrying `w` along the cycle.
    pub fn oriented_gamma(&self) -> Mat2 {
        if self.orientation >= 0 {
            self.gamma_eps.clone()
        } else {
            self.gamma_eps.inv().expect("unit determinant")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nfield::{make_field, splitting_type, PrimeKind};

    fn ext() -> QuadExtension {
        let f = make_field(5).unwrap();
        QuadExtension::admissible(&f, &f.from_small_coords(1, -3)).unwrap()
    }

    #[test]
    fn maximal_order_embedding() {
        let k = ext();
        let f = k.base();
        let q = build_embedding(&k, &IdealF::unit(f)).unwrap();
        let sq = q.m_sqrt_delta.mul(&q.m_sqrt_delta);
        assert_eq!(sq, Mat2::scalar(k.delta()));
        assert!(q.m_sqrt_delta.trace().is_zero());
    }

    #[test]
    fn eichler_embedding_at_split_prime() {
        let k = ext();
        let f = k.base().clone();
        // first rational prime with a degree-one prime split in K
        let mut found = None;
        for p in 3u64..200 {
            let Ok(dec) = splitting_type(&f, p) else { continue };
            if dec.kind != PrimeKind::Split {
                continue;
            }
            let prime = dec.primes[0].clone();
            if k.place_splitting(&crate::nfield::Place::Finite(prime.clone())).unwrap() == crate::nfield::Splitting::Split {
                found = Some(prime);
                break;
            }
        }
        let prime = found.unwrap();
        let q = build_embedding(&k, &prime).unwrap();
        assert!(q.m_theta.in_eichler(&f, &prime));
        assert_eq!(q.m_sqrt_delta.mul(&q.m_sqrt_delta), Mat2::scalar(k.delta()));
        // optimality: x + y q(theta) in R forces x, y integral
        let den = prime.norm() as i64;
        for yn in 0..den {
            for ym in 0..2 {
                let y = f.from_small_coords(yn, ym).scale(&num_rational::BigRational::new(1.into(), den.into()));
                if f.is_integral(&y) {
                    continue;
                }
                let m = q.image_basis(&f.int(0), &y);
                let c_in = prime.contains(&f, &m.c) && f.is_integral(&m.c);
                assert!(!(c_in && m.is_integral(&f)));
            }
        }
    }

    #[test]
    fn cycle_fixed_points() {
        let ctx = Ctx::new(128);
        let k = ext();
        let q = build_embedding(&k, &IdealF::unit(k.base())).unwrap();
        let cyc = cycle_data(&q, &ctx).unwrap();
        assert!(!cyc.z1_star.im.is_negative());
        let m1 = q.m_sqrt_delta.embed(RealPlace::Tau1, &ctx);
        assert!((&mobius(&m1, &cyc.z1_star) - &cyc.z1_star).abs().to_f64() < 1e-30);
        let g2 = cyc.gamma_eps.embed(RealPlace::Tau2, &ctx);
        for e in [&cyc.endpoints.0, &cyc.endpoints.1] {
            let z = Complex::from_real(e.clone());
            assert!((&mobius(&g2, &z) - &z).abs().to_f64() < 1e-25);
        }
        let tr = cyc.gamma_eps.trace().approx(RealPlace::Tau2);
        let det = cyc.gamma_eps.det();
        assert!(det.is_one());
        assert!(tr * tr > 4.0);
        let g1 = cyc.gamma_eps.embed(RealPlace::Tau1, &ctx);
        assert!((&mobius(&g1, &cyc.z1_star) - &cyc.z1_star).abs().to_f64() < 1e-25);
        let flipped = conjugation_flip(&conjugation_flip(&cyc));
        assert_eq!(flipped.orientation, cyc.orientation);
        assert_eq!(conjugation_flip(&cyc).orientation, -1);
        assert_eq!(orientation_transport(-1, -1), -1);
        assert_eq!(orientation_transport(-1, 1), 1);
        assert_eq!(orientation_transport(1, -1), 1);
    }
}
