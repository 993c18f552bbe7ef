//! Fourier-series antiderivatives of the Hilbert modular form, the
//! semi-indefinite integrals along the toric cycle, and recognition of
//! `Phi_1(m J / Omega^beta)` as a point over `K`.

use alloc::vec::Vec;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::cycles::{mobius, GeodesicCycle};
use crate::ecurve::{EllipticCurveF, Model, Point};
use crate::hmf::{enumerate_indices, CoefficientTable, TableError};
use crate::lattice::{best_rational, integer_relation};
use crate::mp::{CompensatedSum, Complex, Ctx, Real};
use crate::nfield::{ElementF, ElementK, QuadExtension, RealPlace, RealQuadraticField};
use crate::periods::{weierstrass_point, EmbeddedModel, PeriodLattice, WeierstrassImage};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AjError {
    #[error(transparent)]
    Table(#[from] TableError),
    #[error("evaluation point is not in the upper half-plane")]
    NotInUpperHalfPlane,
    #[error("basepoint is fixed by gamma_eps")]
    FixedBasepoint,
    #[error("series tolerance {0} must lie in (0, 1e-4)")]
    BadTolerance(f64),
}

/// Values of `A(z1, z2)` at a list of points, sharing one index set.
#[derive(Clone, Debug)]
pub struct SeriesOutput {
    pub values: Vec<Complex>,
    pub terms: usize,
    /// Heuristic bound on the omitted terms, largest over the points.
    pub tail: f64,
    pub max_norm: u64,
}

struct Term {
    x: i64,
    y: i64,
    coef: Real,
    coef_abs: f64,
    emb: (f64, f64),
}

fn powers(base: &Complex, lo: i64, hi: i64) -> Vec<Complex> {
    let mut out = Vec::with_capacity((hi - lo + 1) as usize);
    let mut cur = base.powi(lo);
    for _ in lo..=hi {
        out.push(cur.clone());
        cur = &cur * base;
    }
    out
}

fn upper_min(zs: impl Iterator<Item = f64>) -> Result<f64, AjError> {
    let mut m = f64::INFINITY;
    for y in zs {
        if !(y > 0.0) {
            return Err(AjError::NotInUpperHalfPlane);
        }
        m = m.min(y);
    }
    Ok(m)
}

/// `A(z1, z2) = sum_nu a_{(nu) d} / ((2 pi i)^2 nu1 nu2) e(nu1 z1 + nu2 z2)`,
/// summed in `(N mu, mu)` order with compensation.
pub fn antiderivative(
    ctx: &Ctx,
    field: &RealQuadraticField,
    table: &CoefficientTable,
    points: &[(Complex, Complex)],
    tol: f64,
) -> Result<SeriesOutput, AjError> {
    if !(tol > 0.0 && tol < 1e-4) {
        return Err(AjError::BadTolerance(tol));
    }
    if points.is_empty() {
        return Ok(SeriesOutput { values: Vec::new(), terms: 0, tail: 0.0, max_norm: 0 });
    }
    let y1 = upper_min(points.iter().map(|p| p.0.im.to_f64()))?;
    let y2 = upper_min(points.iter().map(|p| p.1.im.to_f64()))?;
    let wctx = ctx.widened(32);
    let d = field.different_gen();
    let pi = wctx.pi();
    let kappa = &wctx.ratio(&d.norm()) / &(&(&pi * &pi) * &wctx.int(4));
    let mut terms = Vec::new();
    let mut max_norm = 0;
    for idx in enumerate_indices(field, y1, y2, tol) {
        let a = table.coefficient(&idx.ideal)?;
        max_norm = max_norm.max(idx.norm);
        if a == 0 {
            continue;
        }
        let coef = -&(&(&kappa * &wctx.int(a)) / &wctx.int(idx.norm as i64));
        let coef_abs = coef.abs().to_f64();
        terms.push(Term { x: idx.mu.0, y: idx.mu.1, coef, coef_abs, emb: idx.emb });
    }
    let (d1, d2) = (d.embed(RealPlace::Tau1, &wctx), d.embed(RealPlace::Tau2, &wctx));
    let omega = field.omega();
    let (o1, o2) = (omega.embed(RealPlace::Tau1, &wctx), omega.embed(RealPlace::Tau2, &wctx));
    let (o1d, o2d) = (&o1 / &d1, &o2 / &d2);
    let (i1, i2) = (d1.recip(), d2.recip());
    let (xlo, xhi) = terms.iter().fold((0i64, 0i64), |(lo, hi), t| (lo.min(t.x), hi.max(t.x)));
    let (ylo, yhi) = terms.iter().fold((0i64, 0i64), |(lo, hi), t| (lo.min(t.y), hi.max(t.y)));
    let cutoff = libm::log(1.0 / (10.0 * tol));
    let two_pi = 2.0 * core::f64::consts::PI;
    let mut values = Vec::with_capacity(points.len());
    let mut tail = 0.0f64;
    for (z1, z2) in points {
        let u = wctx.e(&(&z1.scale(&i1) + &z2.scale(&i2)));
        let v = wctx.e(&(&z1.scale(&o1d) + &z2.scale(&o2d)));
        let up = powers(&u, xlo, xhi);
        let vp = powers(&v, ylo, yhi);
        let mut acc = CompensatedSum::new(&wctx);
        let (im1, im2) = (z1.im.to_f64(), z2.im.to_f64());
        let mut shell = 0.0f64;
        for t in &terms {
            let term = &up[(t.x - xlo) as usize] * &vp[(t.y - ylo) as usize];
            acc.add(&term.scale(&t.coef));
            if two_pi * (t.emb.0 * y1 + t.emb.1 * y2) >= cutoff {
                shell += t.coef_abs * libm::exp(-two_pi * (t.emb.0 * im1 + t.emb.1 * im2));
            }
        }
        tail = tail.max(shell * 10.0 / 9.0);
        values.push(acc.value());
    }
    Ok(SeriesOutput { values, terms: terms.len(), tail, max_norm })
}

/// A double integral with its truncation data.
#[derive(Clone, Debug)]
pub struct Integral {
    pub value: Complex,
    pub tail: f64,
    pub terms: usize,
}

/// `A(w2, x2) - A(w2, x1) - A(w1, x2) + A(w1, x1)`.
pub fn four_corner(
    ctx: &Ctx,
    field: &RealQuadraticField,
    table: &CoefficientTable,
    w: (&Complex, &Complex),
    x: (&Complex, &Complex),
    tol: f64,
) -> Result<Integral, AjError> {
    let pts = [
        (w.1.clone(), x.1.clone()),
        (w.1.clone(), x.0.clone()),
        (w.0.clone(), x.1.clone()),
        (w.0.clone(), x.0.clone()),
    ];
    let s = antiderivative(ctx, field, table, &pts, tol)?;
    let v = &s.values;
    let value = &(&v[0] - &v[1]) - &(&v[2] - &v[3]);
    Ok(Integral { value, tail: 4.0 * s.tail, terms: s.terms })
}

/// `S^beta = S_hol + beta(-1) S_anti` for the path `x1 -> x2`.
#[derive(Clone, Debug)]
pub struct SemiIndefinite {
    pub hol: Complex,
    pub anti: Complex,
    pub value: Complex,
    pub tail: f64,
    pub terms: usize,
}

/// `-conj(x)`, the reflected point carrying the antiholomorphic block.
pub fn reflect(x: &Complex) -> Complex {
    Complex::new(-&x.re, x.im.clone())
}

/// `S_hol` and `S_anti` for consecutive pieces of the path through `xs`.
pub fn semi_indefinite_path(
    ctx: &Ctx,
    field: &RealQuadraticField,
    table: &CoefficientTable,
    z1: &Complex,
    xs: &[Complex],
    beta: i32,
    tol: f64,
) -> Result<Vec<SemiIndefinite>, AjError> {
    let mut pts = Vec::with_capacity(2 * xs.len());
    for x in xs {
        pts.push((z1.clone(), x.clone()));
        pts.push((z1.clone(), reflect(x)));
    }
    let s = antiderivative(ctx, field, table, &pts, tol)?;
    let b = ctx.int(beta.signum() as i64);
    let mut out = Vec::with_capacity(xs.len().saturating_sub(1));
    for k in 1..xs.len() {
        let hol = &s.values[2 * k] - &s.values[2 * k - 2];
        let anti = &s.values[2 * k + 1] - &s.values[2 * k - 1];
        let value = &hol + &anti.scale(&b);
        out.push(SemiIndefinite { hol, anti, value, tail: 4.0 * s.tail, terms: s.terms });
    }
    Ok(out)
}

pub fn semi_indefinite(
    ctx: &Ctx,
    field: &RealQuadraticField,
    table: &CoefficientTable,
    z1: &Complex,
    x1: &Complex,
    x2: &Complex,
    beta: i32,
    tol: f64,
) -> Result<SemiIndefinite, AjError> {
    let mut v = semi_indefinite_path(ctx, field, table, z1, &[x1.clone(), x2.clone()], beta, tol)?;
    Ok(v.remove(0))
}

/// `J = S^beta(z1*; w -> gamma w)` with `gamma = gamma_eps^orientation`.
pub fn darmon_j(
    ctx: &Ctx,
    field: &RealQuadraticField,
    table: &CoefficientTable,
    cycle: &GeodesicCycle,
    beta: i32,
    w: &Complex,
    tol: f64,
) -> Result<SemiIndefinite, AjError> {
    let g = cycle.oriented_gamma().embed(RealPlace::Tau2, ctx);
    let gw = mobius(&g, w);
    if (&gw - w).abs().lt(&(&w.abs() * &ctx.pow2(-(ctx.prec() as i64) / 2))) {
        return Err(AjError::FixedBasepoint);
    }
    semi_indefinite(ctx, field, table, &cycle.z1_star, w, &gw, beta, tol)
}

/// Default series tolerance for a working precision.
pub fn tolerance_for(ctx: &Ctx) -> f64 {
    libm::pow(2.0, -(ctx.prec() as f64) - 4.0).max(1e-300)
}

/// Real coordinates of `z` in the basis `(w1, w2)`.
pub fn lattice_coords(z: &Complex, w1: &Complex, w2: &Complex) -> (Real, Real) {
    let det = &(&w1.re * &w2.im) - &(&w2.re * &w1.im);
    let s = &(&(&z.re * &w2.im) - &(&w2.re * &z.im)) / &det;
    let t = &(&(&w1.re * &z.im) - &(&z.re * &w1.im)) / &det;
    (s, t)
}

/// Rational lattice spanned by the differences `d_i / Omega^beta` in the basis
/// of `Lambda_1`, with denominators at most `qmax`.
#[derive(Clone, Debug)]
pub struct InvarianceReport {
    pub coords: Vec<((i64, u64), (i64, u64))>,
    /// Largest `|d - nearest| / sqrt(covolume)`.
    pub residual: f64,
    pub rank: usize,
    pub denominator: u64,
}

impl InvarianceReport {
    pub fn passes(&self, threshold: f64) -> bool {
        self.residual < threshold
    }
}

pub fn invariance_lattice(ctx: &Ctx, diffs: &[Complex], lattice: &PeriodLattice, omega_beta: &Complex, qmax: u64) -> InvarianceReport {
    let (w1, w2) = lattice.basis(ctx);
    let root_covol = lattice.covolume.abs().sqrt();
    let mut coords = Vec::with_capacity(diffs.len());
    let mut residual = 0.0f64;
    let mut den = 1u64;
    for d in diffs {
        let z = d / omega_beta;
        let (s, t) = lattice_coords(&z, &w1, &w2);
        let (ps, qs) = best_rational(s.to_f64(), qmax);
        let (pt, qt) = best_rational(t.to_f64(), qmax);
        let rs = &ctx.int(ps) / &ctx.int(qs as i64);
        let rt = &ctx.int(pt) / &ctx.int(qt as i64);
        let approx = &w1.scale(&rs) + &w2.scale(&rt);
        let err = (&(&z - &approx).abs() / &root_covol).to_f64();
        residual = residual.max(err);
        den = num_integer::lcm(den, num_integer::lcm(qs, qt));
        coords.push(((ps, qs), (pt, qt)));
    }
    let rank = rational_rank(&coords);
    InvarianceReport { coords, residual, rank, denominator: den }
}

fn rational_rank(coords: &[((i64, u64), (i64, u64))]) -> usize {
    let q = |p: (i64, u64)| BigRational::new(p.0.into(), p.1.into());
    let vs: Vec<(BigRational, BigRational)> = coords.iter().map(|(a, b)| (q(*a), q(*b))).collect();
    let Some(first) = vs.iter().find(|v| !(v.0.is_zero() && v.1.is_zero())) else { return 0 };
    for v in &vs {
        if !(&first.0 * &v.1 - &first.1 * &v.0).is_zero() {
            return 2;
        }
    }
    1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConjectureStatus {
    Recognized,
    Unrecognized,
}

impl ConjectureStatus {
    pub fn label(self) -> &'static str {
        match self {
            ConjectureStatus::Recognized => "recognized",
            ConjectureStatus::Unrecognized => "unrecognized",
        }
    }
}

#[derive(Clone, Debug)]
pub struct RecognizedPoint {
    pub point: Point<ElementK>,
    pub height: BigInt,
    /// Both coordinates lie in `F`.
    pub over_base: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct RecognitionSearch {
    pub m_max: u32,
    pub height_max: u64,
}

#[derive(Clone, Debug)]
pub struct DarmonPointReport {
    pub j: Complex,
    pub j_normalized: Complex,
    pub lattice_residual: f64,
    pub multiplier_m: u32,
    /// Numerical image `Phi_1(m J / Omega^beta)` for the reported `m`.
    pub candidate: Option<(Complex, Complex)>,
    pub recognized: Option<RecognizedPoint>,
    pub status: ConjectureStatus,
}

fn recognize_base(ctx: &Ctx, field: &RealQuadraticField, v: &Real, scale: &Real, height_max: u64) -> Option<ElementF> {
    let thresh = &v.abs().max(&ctx.one()) * &ctx.pow2(-(ctx.prec() as i64) / 2);
    if v.abs().lt(&thresh) {
        return Some(field.int(0));
    }
    let w1 = field.omega().embed(RealPlace::Tau1, ctx);
    let rel = integer_relation(ctx, &[v.clone(), scale.clone(), &w1 * scale], height_max)?;
    if rel[0].is_zero() {
        return None;
    }
    let den = BigRational::from_integer(-rel[0].clone());
    let a = BigRational::from_integer(rel[1].clone()) / &den;
    let b = BigRational::from_integer(rel[2].clone()) / &den;
    let omega = field.omega();
    Some(&ElementF::new(field.radicand(), a, BigRational::zero()) + &omega.scale(&b))
}

/// `alpha + beta sqrt(delta)` close to `z` at `tau1`.
pub fn recognize_in_k(ctx: &Ctx, ext: &QuadExtension, z: &Complex, height_max: u64) -> Option<ElementK> {
    let f = ext.base();
    let s = ext.delta().embed(RealPlace::Tau1, ctx).abs().sqrt();
    let alpha = recognize_base(ctx, f, &z.re, &ctx.one(), height_max)?;
    let beta = recognize_base(ctx, f, &z.im, &s, height_max)?;
    let e = ElementK::new(alpha, beta, ext.delta());
    let back = e.embed_complex(ctx);
    let tol = &z.abs().max(&ctx.one()) * &ctx.pow2(-(ctx.prec() as i64) / 2);
    if (&back - z).abs().lt(&tol) {
        Some(e)
    } else {
        None
    }
}

fn k_height(e: &ElementK) -> BigInt {
    e.alpha().height().max(e.beta().height())
}

/// Scans `m = 1..=m_max`, reduces `m J / Omega^beta` modulo `Lambda_1` and
/// tries to recognize `Phi_1` of it as a point of `E(K)`.
pub fn recognize(
    ctx: &Ctx,
    j: &Complex,
    lattice: &PeriodLattice,
    omega_beta: &Complex,
    curve: &EllipticCurveF,
    ext: &QuadExtension,
    search: RecognitionSearch,
) -> DarmonPointReport {
    let model = EmbeddedModel::new(curve, RealPlace::Tau1, ctx);
    let (w1, w2) = lattice.basis(ctx);
    let jn = j / omega_beta;
    let like = ElementK::from_base(&ext.base().int(0), ext.delta());
    let kmodel: Model<ElementK> = Model::from_base(&like, curve.coefficients());
    let mut best: Option<(f64, u32, Option<(Complex, Complex)>)> = None;
    let zero_tol = libm::pow(2.0, -(ctx.prec() as f64) / 2.0);
    for m in 1..=search.m_max.max(1) {
        let z = jn.scale(&ctx.int(m as i64));
        let (s, t) = lattice_coords(&z, &w1, &w2);
        let (fs, ft) = (&s - &s.round(), &t - &t.round());
        let residual = 2.0 * fs.to_f64().abs().max(ft.to_f64().abs());
        let reduced = &w1.scale(&fs) + &w2.scale(&ft);
        let image = if residual < zero_tol { WeierstrassImage::Infinity } else { weierstrass_point(ctx, &reduced, lattice, &model) };
        let (point, cand) = match image {
            WeierstrassImage::Infinity => (Some(Point::Infinity), None),
            WeierstrassImage::Affine(x, y) => {
                let px = recognize_in_k(ctx, ext, &x, search.height_max);
                let py = recognize_in_k(ctx, ext, &y, search.height_max);
                let p = match (px, py) {
                    (Some(px), Some(py)) => Some(Point::Affine(px, py)),
                    _ => None,
                };
                (p, Some((x, y)))
            }
        };
        if let Some(p) = point.filter(|p| kmodel.contains(p)) {
            let (height, over_base) = match &p {
                Point::Infinity => (BigInt::from(1), true),
                Point::Affine(x, y) => (k_height(x).max(k_height(y)), x.beta().is_zero() && y.beta().is_zero()),
            };
            return DarmonPointReport {
                j: j.clone(),
                j_normalized: jn,
                lattice_residual: residual.min(1.0 - f64::EPSILON),
                multiplier_m: m,
                candidate: cand,
                recognized: Some(RecognizedPoint { point: p, height: height.abs(), over_base }),
                status: ConjectureStatus::Recognized,
            };
        }
        if best.as_ref().map_or(true, |b| residual < b.0) {
            best = Some((residual, m, cand));
        }
    }
    let (residual, m, cand) = best.expect("m_max >= 1");
    DarmonPointReport {
        j: j.clone(),
        j_normalized: jn,
        lattice_residual: residual.min(1.0 - f64::EPSILON),
        multiplier_m: m,
        candidate: cand,
        recognized: None,
        status: ConjectureStatus::Unrecognized,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nfield::{make_field, IdealF};

    fn unit_table() -> (RealQuadraticField, CoefficientTable) {
        let f = make_field(5).unwrap();
        let t = CoefficientTable::synthetic(&f, 400, alloc::vec![(IdealF::unit(&f), 1)]);
        (f, t)
    }

    #[test]
    fn single_term_closed_form() {
        let ctx = Ctx::new(128);
        let (f, t) = unit_table();
        let z1 = ctx.complex(0.1, 0.9);
        let z2 = ctx.complex(-0.2, 1.1);
        let out = antiderivative(&ctx, &f, &t, &[(z1.clone(), z2.clone())], 1e-30).unwrap();
        // every totally positive unit generates (1): nu = eps^(2k) / d
        let d = f.different_gen();
        let pi = ctx.pi();
        let mut expect = Complex::zero(&ctx);
        let u = f.positive_unit();
        for k in -6i64..=6 {
            let nu = u.pow(k).div(d).unwrap();
            let (n1, n2) = (nu.embed(RealPlace::Tau1, &ctx), nu.embed(RealPlace::Tau2, &ctx));
            let arg = &z1.scale(&n1) + &z2.scale(&n2);
            let c = -&(&(&pi * &pi) * &(&ctx.int(4) * &(&n1 * &n2))).recip();
            expect = &expect + &ctx.e(&arg).scale(&c);
        }
        assert!((&out.values[0] - &expect).abs().to_f64() < 1e-30);
    }

    #[test]
    fn degenerate_corner_vanishes() {
        let ctx = Ctx::new(128);
        let (f, t) = unit_table();
        let w = ctx.complex(0.0, 0.7);
        let x1 = ctx.complex(0.0, 0.8);
        let x2 = ctx.complex(0.3, 0.9);
        let r = four_corner(&ctx, &f, &t, (&w, &w), (&x1, &x2), 1e-30).unwrap();
        assert!(r.value.re.is_zero() && r.value.im.is_zero());
    }
}
