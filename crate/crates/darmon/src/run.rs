//! Subcommand orchestration and report files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use darmon_core::ajmap::{darmon_j, invariance_lattice, recognize, AjError};
use darmon_core::bttree::{find_local_embedding, BruhatTitsTree, TreeError};
use darmon_core::cycles::{build_embedding, conjugation_flip, cycle_data, CycleError};
use darmon_core::ecurve::EllipticCurveF;
use darmon_core::gkzscan::{admissible_t, balanced_basepoint, ScanConfig, ScanError};
use darmon_core::hmf::CoefficientTable;
use darmon_core::mp::{Complex, Ctx};
use darmon_core::nfield::{splitting_type, FieldError, IdealF, QuadExtension, RealPlace, RealQuadraticField, Splitting};
use darmon_core::periods::{omega_beta, period_lattice, PeriodError};
use darmon_core::signs::{conductor_split, heegner_check, multiplicity_factor, parity_check, predicted_invariants, HeegnerFailure};

use crate::cache::{load_or_build, CacheError};
use crate::checks::{run_all, CheckResult};
use crate::config::{ConfigError, RunConfig, TreeOptions};
use crate::report::{scan_csv, splitting_label, Header, InvarianceRecord, InvariantsRecord, PointRecord, ScanRecord, TreeRecord};
use crate::scan::{run_scan, DriverError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subcommand {
    Invariants,
    Point,
    TreeOrbits,
    GkzScan,
    Selftest,
}

impl Subcommand {
    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Invariants => "invariants",
            Subcommand::Point => "point",
            Subcommand::TreeOrbits => "tree-orbits",
            Subcommand::GkzScan => "gkz-scan",
            Subcommand::Selftest => "selftest",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error("admissibility: {0}")]
    Admissibility(String),
    #[error("numeric: {0}")]
    Numeric(String),
    #[error("output: {0}")]
    Output(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Output(_) => 2,
            RunError::Admissibility(_) => 3,
            RunError::Numeric(_) => 4,
        }
    }
}

fn admissibility(e: FieldError) -> RunError {
    RunError::Admissibility(e.to_string())
}

fn numeric(e: impl std::fmt::Display) -> RunError {
    RunError::Numeric(e.to_string())
}

impl From<CacheError> for RunError {
    fn from(e: CacheError) -> Self {
        match e {
            CacheError::Table(t) => numeric(t),
            other => RunError::Output(other.to_string()),
        }
    }
}

impl From<AjError> for RunError {
    fn from(e: AjError) -> Self {
        numeric(e)
    }
}

impl From<PeriodError> for RunError {
    fn from(e: PeriodError) -> Self {
        numeric(e)
    }
}

impl From<CycleError> for RunError {
    fn from(e: CycleError) -> Self {
        match e {
            CycleError::Field(f) => admissibility(f),
            other => RunError::Admissibility(other.to_string()),
        }
    }
}

impl From<TreeError> for RunError {
    fn from(e: TreeError) -> Self {
        numeric(e)
    }
}

impl From<ScanError> for RunError {
    fn from(e: ScanError) -> Self {
        match e {
            ScanError::Field(f) => admissibility(f),
            other => RunError::Admissibility(other.to_string()),
        }
    }
}

impl From<DriverError> for RunError {
    fn from(e: DriverError) -> Self {
        match e {
            DriverError::Scan(s) => s.into(),
            other => RunError::Output(other.to_string()),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub out: PathBuf,
    pub threads: usize,
    pub cache: Option<PathBuf>,
    /// Stop the scan after this many new rows.
    pub budget: Option<usize>,
}

/// Timestamped lines for `log.txt`; never part of `report.json`.
#[derive(Default)]
pub struct Log {
    start: Option<Instant>,
    text: String,
}

impl Log {
    fn new() -> Log {
        Log { start: Some(Instant::now()), text: String::new() }
    }

    pub fn line(&mut self, msg: impl AsRef<str>) {
        let t = self.start.map(|s| s.elapsed().as_secs_f64()).unwrap_or(0.0);
        let _ = writeln!(self.text, "[{t:9.3}s] {}", msg.as_ref());
    }

    pub fn text(&self) -> &str {
        &self.text
    }
}

#[derive(Serialize)]
struct Report<T: Serialize> {
    header: Header,
    body: T,
}

/// What a subcommand leaves on disk, plus its status.
pub struct Outcome {
    pub report: String,
    pub table: String,
    pub log: String,
    pub exit_code: i32,
}

fn write_outputs(dir: &Path, o: &Outcome) -> Result<(), RunError> {
    let io = |e: std::io::Error| RunError::Output(format!("{}: {e}", dir.display()));
    std::fs::create_dir_all(dir).map_err(io)?;
    std::fs::write(dir.join("report.json"), &o.report).map_err(io)?;
    std::fs::write(dir.join("table.csv"), &o.table).map_err(io)?;
    std::fs::write(dir.join("log.txt"), &o.log).map_err(io)?;
    Ok(())
}

fn render<T: Serialize>(sub: Subcommand, cfg: &RunConfig, body: T) -> String {
    let r = Report { header: Header::new(sub.name(), cfg), body };
    serde_json::to_string_pretty(&r).expect("report serializes")
}

struct Setup {
    field: RealQuadraticField,
    curve: EllipticCurveF,
}

fn setup(cfg: &RunConfig) -> Result<Setup, RunError> {
    let field = cfg.build_field()?;
    let curve = cfg.build_curve(&field)?;
    Ok(Setup { field, curve })
}

fn table(cfg: &RunConfig, curve: &EllipticCurveF, opts: &RunOptions, log: &mut Log) -> Result<CoefficientTable, RunError> {
    let (t, cached) = load_or_build(curve, cfg.norm_bound, opts.cache.as_deref())?;
    log.line(format!("coefficient table: {} ideals up to norm {} ({})", t.len(), t.bound(), if cached { "cache" } else { "built" }));
    Ok(t)
}

fn conductor(curve: &EllipticCurveF) -> Vec<IdealF> {
    curve.conductor().iter().map(|c| c.prime.clone()).collect()
}

fn heegner_text(f: &HeegnerFailure) -> String {
    match f {
        HeegnerFailure::PlusNotSplit(n) => format!("N+ prime of norm {n} is not split in K"),
        HeegnerFailure::MinusNotInert(n) => format!("N- prime of norm {n} is not inert in K"),
        HeegnerFailure::DiscriminantNotCoprime(n) => format!("conductor prime of norm {n} divides d(K/F)"),
    }
}

struct Pair {
    ext: QuadExtension,
    invariants: InvariantsRecord,
    plus: Vec<IdealF>,
    heegner: Result<(), HeegnerFailure>,
    multiplicity: u64,
}

fn pair(setup: &Setup, cfg: &RunConfig) -> Result<Pair, RunError> {
    let delta = cfg.delta(&setup.field)?;
    let ext = QuadExtension::admissible(&setup.field, &delta).map_err(admissibility)?;
    let profile = predicted_invariants(&setup.curve, &ext, 2).map_err(admissibility)?;
    let parity = parity_check(&profile);
    let (plus, minus) = conductor_split(&setup.curve, &profile);
    let heegner = heegner_check(&ext, &plus, &minus).map_err(admissibility)?;
    let multiplicity = multiplicity_factor(&profile, &conductor(&setup.curve));
    let invariants = InvariantsRecord::new(
        ext.delta().to_string(),
        ext.rel_disc().norm(),
        &profile,
        &parity,
        heegner.as_ref().err().map(heegner_text),
        multiplicity,
        (&plus, &minus),
    );
    Ok(Pair { ext, invariants, plus, heegner, multiplicity })
}

fn places_csv(r: &InvariantsRecord) -> String {
    let mut out = String::from("place,norm,splitting,eta,eps,eps_k,inv_b\n");
    for p in &r.places {
        let _ = writeln!(out, "\"{}\",{},{},{},{},{},{}", p.place, p.norm, p.splitting, p.eta, p.eps, p.eps_k, p.inv_b);
    }
    out
}

fn invariants(cfg: &RunConfig, log: &mut Log) -> Result<Outcome, RunError> {
    let s = setup(cfg)?;
    let p = pair(&s, cfg)?;
    log.line(format!("K = F(sqrt({})), ram set {:?}, multiplicity {}", p.invariants.delta, p.invariants.ram_set, p.multiplicity));
    Ok(Outcome { table: places_csv(&p.invariants), report: render(Subcommand::Invariants, cfg, &p.invariants), log: String::new(), exit_code: 0 })
}

#[derive(Serialize)]
struct PointBody {
    invariants: InvariantsRecord,
    series_tol: f64,
    points: Vec<PointRecord>,
    invariance: Option<InvarianceRecord>,
    orientation_reversal: Option<InvarianceRecord>,
}

fn point(cfg: &RunConfig, opts: &RunOptions, log: &mut Log) -> Result<Outcome, RunError> {
    let s = setup(cfg)?;
    let p = pair(&s, cfg)?;
    if let Err(f) = &p.heegner {
        return Err(RunError::Admissibility(format!("heegner_check: {}", heegner_text(f))));
    }
    let table = table(cfg, &s.curve, opts, log)?;
    let ctx = Ctx::new(cfg.precision_bits);
    let tol = cfg.series_tol();
    let n_plus = p.plus.iter().fold(IdealF::unit(&s.field), |acc, q| acc.mul(&s.field, q));
    let q = build_embedding(&p.ext, &n_plus)?;
    let cycle = cycle_data(&q, &ctx)?;
    let basepoints: Vec<Complex> = if cfg.point.basepoints.is_empty() {
        vec![balanced_basepoint(&ctx, &cycle)]
    } else {
        cfg.point.basepoints.iter().map(|b| ctx.complex(b[0], b[1])).collect()
    };
    let lat1 = period_lattice(&s.curve, RealPlace::Tau1, &ctx)?;
    let lat2 = period_lattice(&s.curve, RealPlace::Tau2, &ctx)?;
    let ob = omega_beta(&lat2, cfg.beta);
    let mut points = Vec::new();
    let mut js = Vec::new();
    for w in &basepoints {
        let j = darmon_j(&ctx, &s.field, &table, &cycle, cfg.beta, w, tol)?;
        if !j.tail.is_finite() {
            return Err(RunError::Numeric("series tail is not finite".into()));
        }
        let report = recognize(&ctx, &j.value, &lat1, &ob, &s.curve, &p.ext, cfg.search());
        log.line(format!("basepoint {:?}: {} terms, tail {:.3e}, status {}", w.to_f64(), j.terms, j.tail, report.status.label()));
        points.push(PointRecord::new(w, j.terms, j.tail, &report, cfg.precision_bits));
        js.push(j.value);
    }
    let invariance = (js.len() > 1).then(|| {
        let diffs: Vec<Complex> = js[1..].iter().map(|j| j - &js[0]).collect();
        InvarianceRecord::from(&invariance_lattice(&ctx, &diffs, &lat1, &ob, 64))
    });
    let flipped = conjugation_flip(&cycle);
    let rev = darmon_j(&ctx, &s.field, &table, &flipped, cfg.beta, &basepoints[0], tol)?;
    let orientation_reversal = Some(InvarianceRecord::from(&invariance_lattice(&ctx, &[&rev.value + &js[0]], &lat1, &ob, 64)));
    let table_csv = point_csv(&points);
    let body = PointBody { invariants: p.invariants, series_tol: tol, points, invariance, orientation_reversal };
    Ok(Outcome { report: render(Subcommand::Point, cfg, &body), table: table_csv, log: String::new(), exit_code: 0 })
}

fn point_csv(points: &[PointRecord]) -> String {
    let mut out = String::from("basepoint_re,basepoint_im,j_re,j_im,terms,tail,lattice_residual,multiplier_m,status,point\n");
    for p in points {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{:e},{:e},{},{},\"{}\"",
            p.basepoint.re.value,
            p.basepoint.im.value,
            p.j.re.value,
            p.j.im.value,
            p.terms,
            p.tail,
            p.lattice_residual,
            p.multiplier_m,
            p.status,
            p.point.clone().unwrap_or_default()
        );
    }
    out
}

/// Level-zero shapes for every splitting type, and split orbit counts, at
/// the first prime above each rational prime.
pub fn tree_records(field: &RealQuadraticField, opts: &TreeOptions) -> Result<Vec<TreeRecord>, RunError> {
    let mut out = Vec::new();
    for &p in &opts.primes {
        let prime = splitting_type(field, p).map_err(numeric)?.primes[0].clone();
        let tree = BruhatTitsTree::new(field, &prime, opts.depth)?;
        for kind in [Splitting::Split, Splitting::Inert, Splitting::Ramified] {
            let emb = find_local_embedding(field, &prime, kind)?;
            let shape = tree.level_zero_shape(&tree.levels(&emb));
            let (orbit_counts, atkin_lehner_swaps) = if kind == Splitting::Split {
                let mut counts = Vec::new();
                let mut swaps = Vec::new();
                for d in 0..=opts.max_delta {
                    counts.push((d, tree.orbit_count(&emb, d)?));
                    if d > 0 {
                        swaps.push((d, tree.atkin_lehner_swaps(&emb, d)?));
                    }
                }
                (counts, swaps)
            } else {
                (Vec::new(), Vec::new())
            };
            out.push(TreeRecord {
                prime: format!("({})", prime.gen()),
                norm: prime.norm(),
                splitting: splitting_label(kind).into(),
                depth: opts.depth,
                level_zero_vertices: shape.vertices,
                level_zero_edges: shape.edges,
                shape: shape.label(opts.depth).into(),
                orbit_counts,
                atkin_lehner_swaps,
            });
        }
    }
    Ok(out)
}

fn tree_orbits(cfg: &RunConfig, log: &mut Log) -> Result<Outcome, RunError> {
    let field = cfg.build_field()?;
    let records = tree_records(&field, &cfg.tree)?;
    log.line(format!("{} tree records at depth {}", records.len(), cfg.tree.depth));
    Ok(Outcome { table: crate::report::tree_csv(&records), report: render(Subcommand::TreeOrbits, cfg, &records), log: String::new(), exit_code: 0 })
}

pub fn scan_config(cfg: &RunConfig, curve: EllipticCurveF) -> Result<ScanConfig, RunError> {
    let opts = cfg.scan.as_ref().ok_or_else(|| ConfigError::Invalid("gkz-scan needs a scan block".into()))?;
    let d0 = opts.d0.to_element(curve.field())?;
    Ok(ScanConfig {
        curve,
        d0,
        t_max: opts.t_max,
        beta: cfg.beta,
        precision: cfg.precision_bits,
        tol: cfg.series_tol(),
        search: cfg.search(),
        dlog_bound: opts.dlog_bound,
        lvalues: opts.lvalues,
    })
}

#[derive(Serialize)]
struct ScanBody {
    rows: Vec<ScanRecord>,
    complete: bool,
}

fn gkz_scan(cfg: &RunConfig, opts: &RunOptions, log: &mut Log) -> Result<Outcome, RunError> {
    let s = setup(cfg)?;
    let table = table(cfg, &s.curve, opts, log)?;
    let conductor = conductor(&s.curve);
    let sc = scan_config(cfg, s.curve)?;
    let ts = admissible_t(&s.field, &sc.d0, &conductor, sc.t_max)?;
    log.line(format!("{} admissible t with N(t) <= {}", ts.len(), sc.t_max));
    std::fs::create_dir_all(&opts.out).map_err(|e| RunError::Output(e.to_string()))?;
    let progress = opts.out.join("rows.jsonl");
    let run = run_scan(&sc, &table, &ts, opts.threads, Some(&progress), &cfg.hash(), opts.budget)?;
    log.line(format!("rows: {} resumed, {} computed, complete {}", run.resumed, run.computed, run.complete()));
    let rows = run.rows();
    let csv = scan_csv(&rows).map_err(|e| RunError::Output(e.to_string()))?;
    let body = ScanBody { rows, complete: run.complete() };
    Ok(Outcome { report: render(Subcommand::GkzScan, cfg, &body), table: csv, log: String::new(), exit_code: 0 })
}

fn selftest(cfg: &RunConfig, log: &mut Log) -> Result<Outcome, RunError> {
    let results: Vec<CheckResult> = run_all();
    let mut table = String::from("id,name,passed,elapsed_s,detail\n");
    for r in &results {
        log.line(r.line());
        let _ = writeln!(table, "{},\"{}\",{},{:.3},\"{}\"", r.id, r.name, r.passed, r.elapsed, r.detail.replace('"', "'"));
    }
    let exit_code = if results.iter().all(|r| r.passed) { 0 } else { 4 };
    let body: Vec<_> = results.iter().map(|r| r.without_timing()).collect();
    Ok(Outcome { report: render(Subcommand::Selftest, cfg, &body), table, log: String::new(), exit_code })
}

/// Runs one subcommand and writes `report.json`, `table.csv` and `log.txt`.
pub fn run(sub: Subcommand, cfg: &RunConfig, opts: &RunOptions) -> Result<Outcome, RunError> {
    let mut log = Log::new();
    log.line(format!("darmon {} {}, config {}", env!("CARGO_PKG_VERSION"), sub.name(), cfg.hash()));
    let mut outcome = match sub {
        Subcommand::Invariants => invariants(cfg, &mut log),
        Subcommand::Point => point(cfg, opts, &mut log),
        Subcommand::TreeOrbits => tree_orbits(cfg, &mut log),
        Subcommand::GkzScan => gkz_scan(cfg, opts, &mut log),
        Subcommand::Selftest => selftest(cfg, &mut log),
    }?;
    log.line("done");
    outcome.log = log.text().to_string();
    write_outputs(&opts.out, &outcome)?;
    Ok(outcome)
}
