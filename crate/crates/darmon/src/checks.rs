//! The acceptance suite behind `selftest` and the `acceptance` test target.

use std::path::PathBuf;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use darmon_core::ajmap::{darmon_j, four_corner, invariance_lattice, semi_indefinite_path};
use darmon_core::cycles::{build_embedding, conjugation_flip, cycle_data};
use darmon_core::ecurve::EllipticCurveF;
use darmon_core::gkzscan::balanced_basepoint;
use darmon_core::hmf::{build_table, CoefficientTable};
use darmon_core::mp::{Complex, Ctx, Real};
use darmon_core::nfield::{IdealF, QuadExtension, RealPlace, RealQuadraticField};
use darmon_core::periods::{lattice_from_invariants, omega_beta, period_lattice, periods_by_quadrature, EmbeddedModel};
use darmon_core::signs::{atkin_lehner_transport, compose_transports, conductor_split, parity_check, predicted_invariants, ConductorSide, Transport};

use crate::config::RunConfig;
use crate::fixtures::{e11_config, e31_config, e37_config};
use crate::run::{run, tree_records, RunOptions, Subcommand};

pub const PERIOD_TOL: f64 = 1e-20;
pub const PERIOD_BITS: usize = 128;
pub const PERIOD_SECONDS: f64 = 5.0;
pub const TABLE_BOUND: u64 = 2000;
pub const HASSE_BOUND: u64 = 500;
pub const TABLE_SECONDS: f64 = 60.0;
pub const MIXED_TOL: f64 = 1e-10;
pub const MIXED_STEP: f64 = 1e-7;
pub const INVARIANCE_TOL: f64 = 1e-8;
pub const INVARIANCE_SERIES_TOL: f64 = 1e-12;
pub const INVARIANCE_TABLE: u64 = 20_000;
pub const INVARIANCE_BASEPOINTS: usize = 5;
pub const INVARIANCE_SECONDS: f64 = 600.0;
pub const SIGN_PAIRS: usize = 20;
pub const SIGN_ASSIGNMENTS: usize = 50;
pub const SIGN_SECONDS: f64 = 1.0;
pub const TREE_SECONDS: f64 = 30.0;
pub const SCAN_MIN_ROWS: usize = 10;
pub const SEED: u64 = 20_240_531;

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckSummary {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    pub fn line(&self) -> String {
        format!("{} [{}] {}: {} ({:.2}s)", if self.passed { "PASS" } else { "FAIL" }, self.id, self.name, self.detail, self.elapsed)
    }

    pub fn without_timing(&self) -> CheckSummary {
        CheckSummary { id: self.id, name: self.name, passed: self.passed, detail: self.detail.clone() }
    }
}

type Outcome = Result<(bool, String), String>;

fn timed(id: u32, name: &'static str, limit: f64, f: impl FnOnce() -> Outcome) -> CheckResult {
    let t0 = Instant::now();
    let out = f();
    let elapsed = t0.elapsed().as_secs_f64();
    let (ok, mut detail) = match out {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    if elapsed >= limit {
        detail.push_str(&format!("; over the {limit}s budget"));
    }
    CheckResult { id, name, passed: ok && elapsed < limit, detail, elapsed }
}

fn curves() -> Result<Vec<(&'static str, EllipticCurveF)>, String> {
    let mut out = Vec::new();
    for (name, cfg) in [("E31", e31_config()), ("E37", e37_config()), ("E11", e11_config())] {
        let f = cfg.build_field().map_err(|e| e.to_string())?;
        out.push((name, cfg.build_curve(&f).map_err(|e| format!("{name}: {e}"))?));
    }
    Ok(out)
}

fn rel(a: &Real, b: &Real) -> f64 {
    (&(a - b).abs() / &b.abs()).to_f64()
}

/// AGM periods against quadrature at both real places.
pub fn check_periods() -> CheckResult {
    timed(1, "periods: AGM vs quadrature", PERIOD_SECONDS, || {
        let ctx = Ctx::new(PERIOD_BITS);
        let mut worst = 0.0f64;
        let mut n = 0;
        for (name, e) in curves()? {
            for place in [RealPlace::Tau1, RealPlace::Tau2] {
                let m = EmbeddedModel::new(&e, place, &ctx);
                let agm = lattice_from_invariants(&ctx, &m.g2, &m.g3).map_err(|err| format!("{name}: {err}"))?;
                let ((p, _), (q, _)) = periods_by_quadrature(&ctx, &m.g2, &m.g3);
                worst = worst.max(rel(&agm.omega_plus.re, &p)).max(rel(&agm.omega_minus.im, &q));
                n += 1;
            }
        }
        Ok((worst < PERIOD_TOL, format!("{n} embedded curves, worst relative error {worst:.2e} (tol {PERIOD_TOL:e})")))
    })
}

/// Multiplicativity and recurrence up to the bound, Hasse below `HASSE_BOUND`.
pub fn check_table() -> CheckResult {
    timed(2, "coefficients: multiplicativity, recurrence, Hasse", TABLE_SECONDS, || {
        let mut parts = Vec::new();
        let mut ok = true;
        for (name, e) in curves()? {
            let t = build_table(&e, TABLE_BOUND).map_err(|err| format!("{name}: {err}"))?;
            let mult = t.check_multiplicativity(e.field());
            let rec = t.check_recurrence(e.field());
            let mut hasse = 0;
            let mut hasse_ok = true;
            for (p, ap, _) in t.primes() {
                if p.norm() <= HASSE_BOUND {
                    hasse += 1;
                    hasse_ok &= ((ap * ap) as u64) <= 4 * p.norm();
                }
            }
            ok &= mult.is_ok() && rec.is_ok() && hasse_ok;
            parts.push(format!("{name}: {mult:?} products, {rec:?} prime powers, {hasse} primes Hasse {hasse_ok}"));
        }
        Ok((ok, parts.join("; ")))
    })
}

/// `sum a_{(nu) d} e(nu1 z1 + nu2 z2)` over totally positive `nu` in
/// `(1/sqrt 5) O_F`, enumerated from scratch.
pub fn direct_series(ctx: &Ctx, field: &RealQuadraticField, table: &CoefficientTable, z1: &Complex, z2: &Complex, digits: f64) -> Result<Complex, String> {
    let cut = digits * std::f64::consts::LN_10 / (2.0 * std::f64::consts::PI);
    let (y1, y2) = (z1.im.to_f64(), z2.im.to_f64());
    let r5 = 5f64.sqrt();
    let phi = (1.0 + r5) / 2.0;
    // mu = x + y phi with tau1(mu) = nu1 sqrt5, -tau2(mu) = nu2 sqrt5.
    let (b1, b2) = (cut / y1 * r5, cut / y2 * r5);
    let sqrt5 = ctx.int(5).sqrt();
    let phi_mp = &(&ctx.one() + &sqrt5) / &ctx.int(2);
    let mut acc = Complex::zero(ctx);
    let ymax = ((b1 + b2) / r5).ceil() as i64 + 1;
    for y in 1..=ymax {
        let xlo = (-(y as f64) * phi).floor() as i64 - 1;
        let xhi = (b1 - y as f64 * phi).ceil() as i64 + 1;
        for x in xlo..=xhi {
            let t1 = x as f64 + y as f64 * phi;
            let t2 = x as f64 + y as f64 * (1.0 - phi);
            if !(t1 > 0.0 && t2 < 0.0) {
                continue;
            }
            let (n1, n2) = (t1 / r5, -t2 / r5);
            if n1 * y1 + n2 * y2 > cut {
                continue;
            }
            let mu = field.from_small_coords(x, y);
            let ideal = IdealF::principal(field, &mu).map_err(|e| e.to_string())?;
            if ideal.norm() > table.bound() {
                return Err(format!("index of norm {} beyond the table", ideal.norm()));
            }
            let a = table.get_ideal(&ideal).ok_or("missing coefficient")?;
            if a == 0 {
                continue;
            }
            let mu1 = &ctx.int(x) + &(&ctx.int(y) * &phi_mp);
            let mu2 = &ctx.int(x) + &(&ctx.int(y) * &(&ctx.one() - &phi_mp));
            let nu1 = &mu1 / &sqrt5;
            let nu2 = -&(&mu2 / &sqrt5);
            let arg = &z1.scale(&nu1) + &z2.scale(&nu2);
            acc = &acc + &ctx.e(&arg).scale(&ctx.int(a));
        }
    }
    Ok(acc)
}

/// Path additivity and `beta`-linearity of the semi-indefinite integral, and
/// the mixed partial of `four_corner` against the direct series.
pub fn check_integrator() -> CheckResult {
    timed(3, "integrator: additivity, beta-linearity, mixed partial", f64::INFINITY, || {
        let cfg = e31_config();
        let field = cfg.build_field().map_err(|e| e.to_string())?;
        let e = cfg.build_curve(&field).map_err(|e| e.to_string())?;
        let table = build_table(&e, 3000).map_err(|e| e.to_string())?;
        let ctx = Ctx::new(PERIOD_BITS);
        let tol = 1e-30;
        let z1 = ctx.complex(0.13, 0.9);
        let xs = [ctx.complex(-0.2, 0.8), ctx.complex(0.35, 1.1), ctx.complex(0.05, 0.95)];
        let round = (&ctx.pow2(-(PERIOD_BITS as i64) + 12)).to_f64();

        let fwd = semi_indefinite_path(&ctx, &field, &table, &z1, &xs, 1, tol).map_err(|e| e.to_string())?;
        let alt = semi_indefinite_path(&ctx, &field, &table, &z1, &[xs[0].clone(), xs[2].clone(), xs[1].clone()], 1, tol).map_err(|e| e.to_string())?;
        let joined = &fwd[0].value + &fwd[1].value;
        let scale = fwd[0].value.abs().max(&fwd[1].value.abs()).to_f64().max(1e-300);
        let add_err = (&joined - &alt[0].value).abs().to_f64() / scale;

        let minus = semi_indefinite_path(&ctx, &field, &table, &z1, &xs, -1, tol).map_err(|e| e.to_string())?;
        let same_parts = (&fwd[0].hol - &minus[0].hol).abs().is_zero() && (&fwd[0].anti - &minus[0].anti).abs().is_zero();
        let two = ctx.int(2);
        let lin_err = (&(&fwd[0].value + &minus[0].value) - &fwd[0].hol.scale(&two)).abs().to_f64() / scale
            + (&(&fwd[0].value - &minus[0].value) - &fwd[0].anti.scale(&two)).abs().to_f64() / scale;

        let c1 = ctx.complex(0.1, 0.8);
        let c2 = ctx.complex(-0.2, 0.7);
        let h = ctx.f64(MIXED_STEP);
        let half = ctx.f64(MIXED_STEP / 2.0);
        let hc = Complex::from_real(half);
        let box_ = four_corner(&ctx, &field, &table, (&(&c1 - &hc), &(&c1 + &hc)), (&(&c2 - &hc), &(&c2 + &hc)), tol).map_err(|e| e.to_string())?;
        let fd = box_.value.scale(&(&h * &h).recip());
        let direct = direct_series(&ctx, &field, &table, &c1, &c2, 36.0)?;
        let mixed_err = (&(&fd - &direct).abs() / &direct.abs()).to_f64();

        let ok = add_err < round && same_parts && lin_err < round && mixed_err < MIXED_TOL;
        Ok((
            ok,
            format!("additivity {add_err:.1e}, beta parts shared {same_parts}, linearity {lin_err:.1e} (rounding {round:.1e}); mixed partial {mixed_err:.2e} (tol {MIXED_TOL:e})"),
        ))
    })
}

/// Basepoint independence of `J` modulo `Lambda_1 Omega^beta`, and the sign
/// under orientation reversal, on the E31 configuration.
pub fn check_invariance() -> CheckResult {
    timed(4, "Abel-Jacobi: basepoint invariance and orientation", INVARIANCE_SECONDS, || {
        let cfg = e31_config();
        let field = cfg.build_field().map_err(|e| e.to_string())?;
        let e = cfg.build_curve(&field).map_err(|e| e.to_string())?;
        let ext = cfg.build_extension(&field).map_err(|e| e.to_string())?;
        let e = e.with_norm_bound(INVARIANCE_TABLE);
        let table = build_table(&e, INVARIANCE_TABLE).map_err(|e| e.to_string())?;
        let ctx = Ctx::new(cfg.precision_bits);
        let tol = INVARIANCE_SERIES_TOL;
        let profile = predicted_invariants(&e, &ext, 2).map_err(|e| e.to_string())?;
        let (plus, _) = conductor_split(&e, &profile);
        let n_plus = plus.iter().fold(IdealF::unit(&field), |acc, q| acc.mul(&field, q));
        let q = build_embedding(&ext, &n_plus).map_err(|e| e.to_string())?;
        let cycle = cycle_data(&q, &ctx).map_err(|e| e.to_string())?;
        let w0 = balanced_basepoint(&ctx, &cycle);
        let lat1 = period_lattice(&e, RealPlace::Tau1, &ctx).map_err(|e| e.to_string())?;
        let lat2 = period_lattice(&e, RealPlace::Tau2, &ctx).map_err(|e| e.to_string())?;
        let ob = omega_beta(&lat2, cfg.beta);
        let mut js = Vec::new();
        for k in 0..INVARIANCE_BASEPOINTS {
            let w = &w0 + &ctx.complex(0.02 * k as f64, 0.0);
            js.push(darmon_j(&ctx, &field, &table, &cycle, cfg.beta, &w, tol).map_err(|e| e.to_string())?.value);
        }
        let diffs: Vec<Complex> = js[1..].iter().map(|j| j - &js[0]).collect();
        let inv = invariance_lattice(&ctx, &diffs, &lat1, &ob, 64);
        let rev = darmon_j(&ctx, &field, &table, &conjugation_flip(&cycle), cfg.beta, &w0, tol).map_err(|e| e.to_string())?;
        let neg = invariance_lattice(&ctx, &[&rev.value + &js[0]], &lat1, &ob, 64);
        let ok = inv.passes(INVARIANCE_TOL) && inv.rank == 2 && neg.passes(INVARIANCE_TOL);
        Ok((
            ok,
            format!(
                "{} basepoints: difference residual {:.2e}, rank {}, denominator {}; reversal residual {:.2e} (tol {INVARIANCE_TOL:e} of the covolume)",
                INVARIANCE_BASEPOINTS, inv.residual, inv.rank, inv.denominator, neg.residual
            ),
        ))
    })
}

fn random_pair(rng: &mut ChaCha8Rng, curves: &[EllipticCurveF]) -> Option<(EllipticCurveF, QuadExtension)> {
    let mut e = curves[rng.gen_range(0..curves.len())].clone();
    for i in 0..e.conductor().len() {
        if rng.gen_bool(0.5) {
            e = e.with_flipped_type(i);
        }
    }
    let field = e.field().clone();
    let delta = field.from_small_coords(rng.gen_range(-6..=6), rng.gen_range(-6..=6));
    let ext = QuadExtension::admissible(&field, &delta).ok()?;
    let coprime = e.conductor().iter().all(|c| ext.rel_disc().is_coprime(&field, &c.prime));
    (coprime && sign_over_k(&e, &ext)? == -1).then_some((e, ext))
}

/// Root number of `E/K` from the local types alone: `-1` at the complex
/// place of `K`, `-1` at each conductor prime inert in `K`, `+1` elsewhere.
fn sign_over_k(e: &EllipticCurveF, ext: &QuadExtension) -> Option<i32> {
    let field = e.field();
    let mut sign = -1;
    for c in e.conductor() {
        let inert = !local_square(field, ext.delta(), &c.prime)?;
        if inert {
            sign = -sign;
        }
    }
    Some(sign)
}

/// Whether `delta` is a square modulo an odd prime `p` of `F` prime to it,
/// by Euler's criterion in `O_F / p`.
fn local_square(field: &RealQuadraticField, delta: &darmon_core::nfield::ElementF, p: &IdealF) -> Option<bool> {
    let ring = darmon_core::nfield::ResidueRing::new(field, p, 1).ok()?;
    let d = ring.reduce(field, delta)?;
    if ring.index(d) == ring.index(ring.zero()) {
        return None;
    }
    let q = ring.q();
    if q % 2 == 0 {
        return None;
    }
    Some(ring.index(ring.pow(d, (q - 1) / 2)) == ring.index(ring.one()))
}

/// Parity of `Ram(B)`, the global product identity, and the transport
/// composition for random conductor assignments.
pub fn check_signs() -> CheckResult {
    timed(5, "signs: Ram(B) parity, product identity, transports", SIGN_SECONDS, || {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        let base: Vec<EllipticCurveF> = curves()?.into_iter().map(|(_, e)| e).collect();
        let mut pairs = 0;
        let mut draws = 0;
        let mut bad_pairs = 0;
        while pairs < SIGN_PAIRS && draws < 10_000 {
            draws += 1;
            let Some((e, ext)) = random_pair(&mut rng, &base) else { continue };
            let profile = predicted_invariants(&e, &ext, 2).map_err(|err| err.to_string())?;
            if !parity_check(&profile).ok() {
                bad_pairs += 1;
            }
            pairs += 1;
        }
        let mut assignments = 0;
        let mut bad_transports = 0;
        while assignments < SIGN_ASSIGNMENTS {
            let n = rng.gen_range(1..=8);
            let mut sides = Vec::new();
            let mut eps = Vec::new();
            for _ in 0..n {
                sides.push(match rng.gen_range(0..3) {
                    0 => ConductorSide::Minus,
                    1 => ConductorSide::Plus,
                    _ => ConductorSide::Away,
                });
                eps.push(if rng.gen_bool(0.5) { 1 } else { -1 });
            }
            if sides.iter().filter(|s| **s == ConductorSide::Minus).count() % 2 == 1 {
                continue;
            }
            assignments += 1;
            let ts: Vec<Transport> = sides.iter().zip(&eps).map(|(s, e)| atkin_lehner_transport(*s, *e)).collect();
            // epsilon = (-1)^d prod over the conductor, d = 2.
            let global: i32 = sides.iter().zip(&eps).filter(|(s, _)| **s != ConductorSide::Away).map(|(_, e)| *e).product();
            if compose_transports(2, &ts) != -global {
                bad_transports += 1;
            }
        }
        let ok = pairs == SIGN_PAIRS && bad_pairs == 0 && bad_transports == 0;
        Ok((ok, format!("{pairs} pairs ({draws} draws), {bad_pairs} parity failures; {assignments} assignments, {bad_transports} transport failures")))
    })
}

/// Level-zero shapes and optimal-path orbit counts for `p` in `{2, 3, 5}`.
pub fn check_trees() -> CheckResult {
    timed(6, "trees: level-zero shapes and orbit counts", TREE_SECONDS, || {
        let cfg = e31_config();
        let field = cfg.build_field().map_err(|e| e.to_string())?;
        let records = tree_records(&field, &cfg.tree).map_err(|e| e.to_string())?;
        let mut ok = true;
        let mut parts = Vec::new();
        for r in &records {
            let want = match r.splitting.as_str() {
                "split" => "line",
                "inert" => "point",
                _ => "edge",
            };
            ok &= r.shape == want;
            if r.splitting == "split" {
                ok &= r.orbit_counts.iter().all(|(d, c)| *c == if *d == 0 { 1 } else { 2 });
                ok &= r.atkin_lehner_swaps.iter().all(|(_, s)| *s);
            }
            parts.push(format!("N={} {} {} {:?}", r.norm, r.splitting, r.shape, r.orbit_counts));
        }
        Ok((ok, parts.join("; ")))
    })
}

fn scratch_dir(tag: &str) -> PathBuf {
    let nanos = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_nanos()).unwrap_or(0);
    std::env::temp_dir().join(format!("darmon-{tag}-{}-{nanos}", std::process::id()))
}

/// Configuration of the scan check: E31, `D0 = phi`, `t_max = 50`.
pub fn scan_check_config() -> RunConfig {
    let mut cfg = e31_config();
    cfg.precision_bits = 64;
    cfg.series_tol_exp = -12;
    cfg.norm_bound = 6000;
    cfg.point.height_max = 10_000;
    cfg
}

/// Determinism, resumability, row count, and tagging of the scan.
pub fn check_scan() -> CheckResult {
    timed(7, "gkz-scan: deterministic, resumable, tagged", f64::INFINITY, || {
        let cfg = scan_check_config();
        let threads = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(8);
        let opts = |dir: PathBuf, budget| RunOptions { out: dir, threads, cache: None, budget };
        let dirs = [scratch_dir("full"), scratch_dir("again"), scratch_dir("resume")];
        let full = run(Subcommand::GkzScan, &cfg, &opts(dirs[0].clone(), None)).map_err(|e| e.to_string())?;
        let again = run(Subcommand::GkzScan, &cfg, &opts(dirs[1].clone(), None)).map_err(|e| e.to_string())?;
        let partial = run(Subcommand::GkzScan, &cfg, &opts(dirs[2].clone(), Some(4))).map_err(|e| e.to_string())?;
        let resumed = run(Subcommand::GkzScan, &cfg, &opts(dirs[2].clone(), None)).map_err(|e| e.to_string())?;
        for d in &dirs {
            let _ = std::fs::remove_dir_all(d);
        }
        let deterministic = full.table == again.table && full.report == again.report;
        let was_partial = partial.table != full.table;
        let resumable = resumed.table == full.table && resumed.report == full.report;
        let mut reader = csv::Reader::from_reader(full.table.as_bytes());
        let headers = reader.headers().map_err(|e| e.to_string())?.clone();
        let col = |name: &str| headers.iter().position(|h| h == name).ok_or(format!("missing column {name}"));
        let (mult, tag, jre, stats) = (col("multiplicity")?, col("tag")?, col("j_re")?, col("point")?);
        let mut rows = 0;
        let mut vanishing = 0;
        let mut recognized = 0;
        let mut tagged = true;
        for rec in reader.records() {
            let rec = rec.map_err(|e| e.to_string())?;
            rows += 1;
            if &rec[mult] == "0" {
                vanishing += 1;
                tagged &= &rec[tag] == "sign-vanishing" && rec[jre].is_empty();
            }
            if &rec[tag] == "recognized" {
                recognized += 1;
                tagged &= !rec[stats].is_empty();
            }
        }
        let ok = deterministic && was_partial && resumable && rows >= SCAN_MIN_ROWS && tagged;
        Ok((
            ok,
            format!("{rows} rows, {vanishing} sign-vanishing, {recognized} recognized after the doubled-precision check; deterministic {deterministic}, partial run incomplete {was_partial}, resume matches {resumable}"),
        ))
    })
}

pub fn run_all() -> Vec<CheckResult> {
    vec![check_periods(), check_table(), check_integrator(), check_invariance(), check_signs(), check_trees(), check_scan()]
}
