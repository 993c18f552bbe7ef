//! Scan over `K[t] = F(sqrt(-D0 t))`: admissibility, sign tagging, the
//! integration and recognition per row, and `[P_t]` by subtraction of `P0`.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::ajmap::{darmon_j, recognize, ConjectureStatus, DarmonPointReport, RecognitionSearch};
use crate::cycles::{build_embedding, cycle_data, GeodesicCycle};
use crate::ecurve::{EllipticCurveF, Model, Point, ReductionType};
use crate::hmf::{ideals_up_to, CoefficientTable};
use crate::mp::{Complex, Ctx};
use crate::nfield::{ElementF, ElementK, FieldError, Hnf, IdealF, Place, QuadExtension, RealPlace, RealQuadraticField, Splitting};
use crate::periods::{omega_beta, period_lattice};
use crate::signs::{conductor_split, heegner_check, multiplicity_factor, predicted_invariants, HeegnerFailure};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScanError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("D0 must satisfy tau1(D0) > 0 and tau2(D0) < 0")]
    D0Signature,
    #[error("L-value needs ideals up to norm {needed}, table stops at {bound}")]
    TableTooSmall { needed: u64, bound: u64 },
}

#[derive(Clone, Debug)]
pub struct ScanConfig {
    pub curve: EllipticCurveF,
    pub d0: ElementF,
    pub t_max: u64,
    pub beta: i32,
    pub precision: usize,
    pub tol: f64,
    pub search: RecognitionSearch,
    /// Largest `|m|` tried in `P_t = m P0`.
    pub dlog_bound: i64,
    pub lvalues: bool,
}

/// Admissible `t` values, sorted by norm and then HNF.
pub fn admissible_t(field: &RealQuadraticField, d0: &ElementF, conductor: &[IdealF], t_max: u64) -> Result<Vec<ElementF>, ScanError> {
    if d0.sign_at(RealPlace::Tau1) <= 0 || d0.sign_at(RealPlace::Tau2) >= 0 {
        return Err(ScanError::D0Signature);
    }
    let base = QuadExtension::new(field, &-d0)?;
    let mut bad: Vec<IdealF> = conductor.to_vec();
    bad.extend(base.rel_disc().factor(field).into_iter().map(|(p, _)| p));
    let mut ideals = ideals_up_to(field, t_max);
    ideals.sort_by_key(|m| (m.norm(), m.hnf()));
    let mut out = Vec::new();
    for m in ideals {
        if !m.factor(field).iter().all(|(_, e)| *e == 1) {
            continue;
        }
        if !bad.iter().all(|p| m.is_coprime(field, p)) {
            continue;
        }
        let t = field.canonical_generator(m.gen()).ok_or(FieldError::NotAdmissible("no totally positive generator"))?;
        if QuadExtension::admissible(field, &-&(d0 * &t)).is_ok() {
            out.push(t);
        }
    }
    Ok(out)
}

/// Outcome of the class number test for `K[t]`.
#[derive(Clone, Debug, PartialEq)]
pub enum ClassCertificate {
    /// Every prime of norm below the Minkowski bound is principal.
    Trivial { minkowski: f64 },
    /// No generator found for a prime over `F` of this norm.
    Incomplete { minkowski: f64, prime_norm: u64 },
}

impl ClassCertificate {
    pub fn is_trivial(&self) -> bool {
        matches!(self, ClassCertificate::Trivial { .. })
    }
}

/// Box of coordinates searched for generators `a + b theta`.
const CLASS_BOX: i64 = 4;

pub fn class_certificate(ext: &QuadExtension) -> ClassCertificate {
    let f = ext.base();
    let dk = (f.disc() * f.disc()) as f64 * ext.rel_disc().norm() as f64;
    let minkowski = 24.0 / 256.0 * (4.0 / core::f64::consts::PI) * libm::sqrt(dk);
    let bound = libm::floor(minkowski) as u64;
    let mut needed = Vec::new();
    for p in crate::hmf::prime_ideals_up_to(f, bound) {
        match ext.place_splitting(&Place::Finite(p.clone())) {
            Ok(Splitting::Inert) => {}
            _ => needed.push(p),
        }
    }
    if needed.is_empty() {
        return ClassCertificate::Trivial { minkowski };
    }
    let (t, n) = ext.theta_poly();
    let mut found: BTreeSet<Hnf> = BTreeSet::new();
    let elems: Vec<ElementF> = (-CLASS_BOX..=CLASS_BOX).flat_map(|x| (-CLASS_BOX..=CLASS_BOX).map(move |y| (x, y))).map(|(x, y)| f.from_small_coords(x, y)).collect();
    for a in &elems {
        for b in &elems {
            let nrm = &(&(a * a) + &(&(t * a) * b)) + &(&(n * b) * b);
            let abs = nrm.norm().abs();
            if abs.is_zero() || abs > num_rational::BigRational::from_integer(bound.into()) {
                continue;
            }
            if let Ok(id) = IdealF::principal(f, &nrm) {
                found.insert(id.hnf());
            }
        }
    }
    for p in needed {
        if !found.contains(&p.hnf()) {
            return ClassCertificate::Incomplete { minkowski, prime_norm: p.norm() };
        }
    }
    ClassCertificate::Trivial { minkowski }
}

/// Smoothed central value of the twist by `eta_K`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LValue {
    pub value: f64,
    pub error: f64,
    /// Root number of the twist.
    pub sign: i32,
    pub terms: u64,
}

/// `K_1(x)` from `int_0^inf exp(-x cosh u) cosh u du`.
fn bessel_k1(x: f64) -> f64 {
    let h = 0.02;
    let mut s = 0.5 * libm::exp(-x);
    let mut u = h;
    loop {
        let c = libm::cosh(u);
        let term = libm::exp(-x * c) * c;
        s += term;
        if term < 1e-300 || x * c > 745.0 {
            break;
        }
        u += h;
    }
    s * h
}

/// Cutoff weight `2 sqrt(y) K_1(2 sqrt(y))` of the gamma factor `Gamma(s)^2`.
pub fn afe_weight(y: f64) -> f64 {
    if y <= 0.0 {
        return 1.0;
    }
    let r = 2.0 * libm::sqrt(y);
    r * bessel_k1(r)
}

fn twist_character(ext: &QuadExtension, p: &IdealF) -> i64 {
    match ext.place_splitting(&Place::Finite(p.clone())) {
        Ok(Splitting::Split) => 1,
        Ok(Splitting::Inert) => -1,
        _ => 0,
    }
}

/// `eps(E^chi) = prod_{v | N} eps_v chi(v) * prod_{v | d_K} eta_v(-1)`.
pub fn twist_root_number(curve: &EllipticCurveF, ext: &QuadExtension) -> Result<i32, FieldError> {
    let mut s = 1i32;
    for c in curve.conductor() {
        let eps_v = match c.kind {
            ReductionType::SplitMult => -1,
            ReductionType::NonsplitMult => 1,
        };
        s *= eps_v * twist_character(ext, &c.prime) as i32;
    }
    for (p, _) in ext.rel_disc().factor(ext.base()) {
        s *= ext.eta_local(&Place::Finite(p))?;
    }
    Ok(s)
}

/// Norm of the conductor of the twist, assuming `d_K` prime to `N`.
pub fn twist_conductor_norm(curve: &EllipticCurveF, ext: &QuadExtension) -> u64 {
    let d = ext.rel_disc().norm();
    curve.conductor_ideal().norm() * d * d
}

/// Ideal norm where the weight `V(4 pi^2 N m / sqrt A)` drops below `1e-13`.
pub fn lvalue_terms(curve: &EllipticCurveF, ext: &QuadExtension) -> u64 {
    let root_a = libm::sqrt(twist_conductor_norm(curve, ext) as f64);
    let y = 17.0 * 17.0;
    libm::ceil(y * root_a / (4.0 * core::f64::consts::PI * core::f64::consts::PI)) as u64
}

/// `L(E^chi, 1) = (1 + eps) sum a_m chi(m) / N m V(4 pi^2 N m / sqrt A)`.
pub fn lvalue_twist(curve: &EllipticCurveF, ext: &QuadExtension, table: &CoefficientTable, terms: u64) -> Result<LValue, ScanError> {
    if terms > table.bound() {
        return Err(ScanError::TableTooSmall { needed: terms, bound: table.bound() });
    }
    let sign = twist_root_number(curve, ext)?;
    if sign < 0 {
        return Ok(LValue { value: 0.0, error: 0.0, sign, terms });
    }
    let f = ext.base();
    let root_a = libm::sqrt(twist_conductor_norm(curve, ext) as f64);
    let scale = 4.0 * core::f64::consts::PI * core::f64::consts::PI / root_a;
    let mut chars: alloc::collections::BTreeMap<Hnf, i64> = alloc::collections::BTreeMap::new();
    let mut sum = 0.0f64;
    let mut shell = 0.0f64;
    for (m, a) in table.iter() {
        let nm = m.norm();
        if nm > terms || a == 0 {
            continue;
        }
        let mut chi = 1i64;
        for (p, e) in m.factor(f) {
            let c = *chars.entry(p.hnf()).or_insert_with(|| twist_character(ext, &p));
            chi *= c.pow(e);
        }
        if chi == 0 {
            continue;
        }
        let term = (a * chi) as f64 / nm as f64 * afe_weight(scale * nm as f64);
        sum += term;
        if 2 * nm > terms {
            shell += term.abs();
        }
    }
    Ok(LValue { value: 2.0 * sum, error: 2.0 * shell + 1e-12, sign, terms })
}

/// Why a row stopped where it did.
#[derive(Clone, Debug, PartialEq)]
pub enum RowTag {
    HeegnerFailed(HeegnerFailure),
    /// `prod (1 + inv_v eps_v) = 0`; nothing is integrated.
    SignVanishing,
    Recognized,
    /// Recognized at the working precision but not at twice the precision.
    Unstable,
    Unrecognized,
    NumericFailure(String),
}

impl RowTag {
    pub fn label(&self) -> &'static str {
        match self {
            RowTag::HeegnerFailed(_) => "heegner-failed",
            RowTag::SignVanishing => "sign-vanishing",
            RowTag::Recognized => "recognized",
            RowTag::Unstable => "unstable",
            RowTag::Unrecognized => "unrecognized",
            RowTag::NumericFailure(_) => "numeric-failure",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ScanRow {
    pub t: ElementF,
    pub t_norm: u64,
    pub ext: QuadExtension,
    pub heegner: bool,
    pub multiplicity: u64,
    pub tag: RowTag,
    pub class_group: ClassCertificate,
    pub j: Option<Complex>,
    pub tail: Option<f64>,
    pub basepoint: Option<Complex>,
    pub report: Option<DarmonPointReport>,
    pub coefficient: Option<i64>,
    pub lvalue: Option<LValue>,
    pub lvalue_note: Option<String>,
}

/// Basepoint `w` with `Im w = Im(gamma w) = 1 / |c|` for `gamma = [[a, b], [c, d]]` at `tau2`.
pub fn balanced_basepoint(ctx: &Ctx, cycle: &GeodesicCycle) -> Complex {
    let g = cycle.oriented_gamma().embed(RealPlace::Tau2, ctx);
    if g[2].is_zero() {
        return ctx.complex(0.0, 1.0);
    }
    let re = -&(&g[3] / &g[2]);
    let im = g[2].abs().recip();
    Complex::new(re, im)
}

/// `m` with `p - m p0` torsion, searched over `|m| <= bound`.
pub fn discrete_log(model: &Model<ElementF>, p: &Point<ElementF>, p0: &Point<ElementF>, bound: i64) -> Option<i64> {
    let torsion = |q: &Point<ElementF>| model.torsion_order(q, 16).is_some();
    if torsion(p) {
        return Some(0);
    }
    let mut up = p.clone();
    let mut down = p.clone();
    for m in 1..=bound {
        up = model.sub(&up, p0);
        if torsion(&up) {
            return Some(m);
        }
        down = model.add(&down, p0);
        if torsion(&down) {
            return Some(-m);
        }
    }
    None
}

fn to_base(p: &Point<ElementK>) -> Option<Point<ElementF>> {
    match p {
        Point::Infinity => Some(Point::Infinity),
        Point::Affine(x, y) if x.beta().is_zero() && y.beta().is_zero() => Some(Point::Affine(x.alpha().clone(), y.alpha().clone())),
        Point::Affine(..) => None,
    }
}

/// `P + P^c` in `E(K)`, which lies in `E(F)`.
fn trace_to_base(curve: &EllipticCurveF, ext: &QuadExtension, p: &Point<ElementK>) -> Option<Point<ElementF>> {
    let like = ElementK::from_base(&ext.base().int(0), ext.delta());
    let model: Model<ElementK> = Model::from_base(&like, curve.coefficients());
    let conj = match p {
        Point::Infinity => Point::Infinity,
        Point::Affine(x, y) => Point::Affine(x.conj(), y.conj()),
    };
    to_base(&model.add(p, &conj))
}

struct Evaluation {
    j: Complex,
    tail: f64,
    w: Complex,
    report: DarmonPointReport,
}

fn evaluate(cfg: &ScanConfig, table: &CoefficientTable, ext: &QuadExtension, n_plus: &IdealF, precision: usize) -> Result<Evaluation, String> {
    let ctx = Ctx::new(precision);
    let field = cfg.curve.field();
    let q = build_embedding(ext, n_plus).map_err(|e| format!("{e}"))?;
    let cycle = cycle_data(&q, &ctx).map_err(|e| format!("{e}"))?;
    let w = balanced_basepoint(&ctx, &cycle);
    let s = darmon_j(&ctx, field, table, &cycle, cfg.beta, &w, cfg.tol).map_err(|e| format!("{e}"))?;
    let lat1 = period_lattice(&cfg.curve, RealPlace::Tau1, &ctx).map_err(|e| format!("{e}"))?;
    let lat2 = period_lattice(&cfg.curve, RealPlace::Tau2, &ctx).map_err(|e| format!("{e}"))?;
    let ob = omega_beta(&lat2, cfg.beta);
    let report = recognize(&ctx, &s.value, &lat1, &ob, &cfg.curve, ext, cfg.search);
    Ok(Evaluation { j: s.value, tail: s.tail, w, report })
}

/// One row of the scan, independent of every other row.
pub fn scan_row(cfg: &ScanConfig, table: &CoefficientTable, t: &ElementF) -> Result<ScanRow, ScanError> {
    let field = cfg.curve.field();
    let delta = -&(&cfg.d0 * t);
    let ext = QuadExtension::admissible(field, &delta)?;
    let t_norm = t.norm().abs().to_integer().to_u64().unwrap_or(u64::MAX);
    let profile = predicted_invariants(&cfg.curve, &ext, 2)?;
    let (plus, minus) = conductor_split(&cfg.curve, &profile);
    let conductor: Vec<IdealF> = cfg.curve.conductor().iter().map(|c| c.prime.clone()).collect();
    let multiplicity = multiplicity_factor(&profile, &conductor);
    let class_group = class_certificate(&ext);
    let (lvalue, lvalue_note) = if cfg.lvalues {
        match lvalue_twist(&cfg.curve, &ext, table, lvalue_terms(&cfg.curve, &ext)) {
            Ok(l) => (Some(l), None),
            Err(e) => (None, Some(format!("{e}"))),
        }
    } else {
        (None, None)
    };
    let mut row = ScanRow {
        t: t.clone(),
        t_norm,
        ext: ext.clone(),
        heegner: true,
        multiplicity,
        tag: RowTag::SignVanishing,
        class_group,
        j: None,
        tail: None,
        basepoint: None,
        report: None,
        coefficient: None,
        lvalue,
        lvalue_note,
    };
    if let Err(fail) = heegner_check(&ext, &plus, &minus)? {
        row.heegner = false;
        row.tag = RowTag::HeegnerFailed(fail);
        return Ok(row);
    }
    if multiplicity == 0 {
        row.coefficient = Some(0);
        return Ok(row);
    }
    let n_plus = plus.iter().fold(IdealF::unit(field), |acc, p| acc.mul(field, p));
    let eval = match evaluate(cfg, table, &ext, &n_plus, cfg.precision) {
        Ok(e) => e,
        Err(msg) => {
            row.tag = RowTag::NumericFailure(msg);
            return Ok(row);
        }
    };
    row.j = Some(eval.j.clone());
    row.tail = Some(eval.tail);
    row.basepoint = Some(eval.w.clone());
    row.tag = RowTag::Unrecognized;
    if eval.report.status == ConjectureStatus::Recognized {
        let again = evaluate(cfg, table, &ext, &n_plus, 2 * cfg.precision);
        let same = match (&again, &eval.report.recognized) {
            (Ok(a), Some(p)) => a.report.recognized.as_ref().map(|q| q.point == p.point).unwrap_or(false),
            _ => false,
        };
        row.tag = if same { RowTag::Recognized } else { RowTag::Unstable };
    }
    if row.tag == RowTag::Recognized && row.class_group.is_trivial() {
        if let (Some(p0), Some(rec)) = (cfg.curve.generator_hint(), &eval.report.recognized) {
            let traced = to_base(&rec.point).or_else(|| trace_to_base(&cfg.curve, &ext, &rec.point));
            let model: Model<ElementF> = Model::from_base(&field.int(0), cfg.curve.coefficients());
            row.coefficient = traced.and_then(|p| discrete_log(&model, &p, &p0, cfg.dlog_bound));
        }
    }
    row.report = Some(eval.report);
    Ok(row)
}

pub fn scan(cfg: &ScanConfig, table: &CoefficientTable) -> Result<Vec<ScanRow>, ScanError> {
    let conductor: Vec<IdealF> = cfg.curve.conductor().iter().map(|c| c.prime.clone()).collect();
    let ts = admissible_t(cfg.curve.field(), &cfg.d0, &conductor, cfg.t_max)?;
    ts.iter().map(|t| scan_row(cfg, table, t)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn afe_weight_limits() {
        assert!((afe_weight(1e-12) - 1.0).abs() < 1e-5);
        assert!(afe_weight(289.0) < 1e-13);
        // 2 K_1(2) from mpmath besselk
        assert!((afe_weight(1.0) - 0.279_731_763_633_045).abs() < 1e-12);
    }
}
