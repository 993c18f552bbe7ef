//! Serializable report records and the fixed `table.csv` schema.

use serde::{Deserialize, Serialize};

use darmon_core::ajmap::{DarmonPointReport, InvarianceReport};
use darmon_core::ecurve::Point;
use darmon_core::gkzscan::{ClassCertificate, RowTag, ScanRow};
use darmon_core::mp::{Complex, Real};
use darmon_core::nfield::{ElementK, Place, RealPlace, Splitting};
use darmon_core::signs::{ParityDiagnostic, SignProfile};

use crate::config::RunConfig;

pub const CSV_SCHEMA: &str = "v1";

/// A multiprecision number printed to the digits its precision carries.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tagged {
    pub value: String,
    pub bits: usize,
}

pub fn digits_for(bits: usize) -> usize {
    ((bits as f64) * core::f64::consts::LOG10_2).floor().max(6.0) as usize
}

impl Tagged {
    pub fn real(x: &Real, bits: usize) -> Tagged {
        Tagged { value: x.to_decimal(digits_for(bits)), bits }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggedComplex {
    pub re: Tagged,
    pub im: Tagged,
}

impl TaggedComplex {
    pub fn new(z: &Complex, bits: usize) -> TaggedComplex {
        TaggedComplex { re: Tagged::real(&z.re, bits), im: Tagged::real(&z.im, bits) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub tool: String,
    pub version: String,
    pub core_version: String,
    pub subcommand: String,
    pub config_hash: String,
    pub precision_bits: usize,
    pub norm_bound: u64,
    pub series_tol_exp: i32,
    pub config: RunConfig,
}

impl Header {
    pub fn new(subcommand: &str, cfg: &RunConfig) -> Header {
        Header {
            tool: "darmon".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            core_version: darmon_core::VERSION.into(),
            subcommand: subcommand.into(),
            config_hash: cfg.hash(),
            precision_bits: cfg.precision_bits,
            norm_bound: cfg.norm_bound,
            series_tol_exp: cfg.series_tol_exp,
            config: cfg.clone(),
        }
    }
}

pub fn place_label(p: &Place) -> String {
    match p {
        Place::Real(RealPlace::Tau1) => "tau1".into(),
        Place::Real(RealPlace::Tau2) => "tau2".into(),
        Place::Finite(q) => format!("({})", q.gen()),
    }
}

pub fn splitting_label(s: Splitting) -> &'static str {
    match s {
        Splitting::Split => "split",
        Splitting::Inert => "inert",
        Splitting::Ramified => "ramified",
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaceRow {
    pub place: String,
    pub norm: u64,
    pub splitting: String,
    pub eta: i32,
    pub eps: i32,
    pub eps_k: i32,
    pub inv_b: i32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantsRecord {
    pub delta: String,
    pub rel_disc_norm: u64,
    pub places: Vec<PlaceRow>,
    pub ram_set: Vec<String>,
    pub ram_even: bool,
    pub product: i32,
    pub eta_product: i32,
    pub global_eps: i32,
    pub n_plus: Vec<String>,
    pub n_minus: Vec<String>,
    pub heegner: Option<String>,
    pub multiplicity: u64,
}

impl InvariantsRecord {
    pub fn new(delta: String, rel_disc_norm: u64, profile: &SignProfile, parity: &ParityDiagnostic, heegner: Option<String>, multiplicity: u64, split: (&[darmon_core::nfield::IdealF], &[darmon_core::nfield::IdealF])) -> Self {
        let places = profile
            .records
            .iter()
            .map(|r| PlaceRow {
                place: place_label(&r.place),
                norm: match &r.place {
                    Place::Finite(q) => q.norm(),
                    Place::Real(_) => 0,
                },
                splitting: splitting_label(r.splitting).into(),
                eta: r.eta,
                eps: r.eps,
                eps_k: r.eps_k,
                inv_b: r.inv_b,
            })
            .collect();
        InvariantsRecord {
            delta,
            rel_disc_norm,
            places,
            ram_set: profile.ram_set.iter().map(place_label).collect(),
            ram_even: parity.ram_even,
            product: parity.product,
            eta_product: parity.eta_product,
            global_eps: profile.global_eps,
            n_plus: split.0.iter().map(|p| format!("({})", p.gen())).collect(),
            n_minus: split.1.iter().map(|p| format!("({})", p.gen())).collect(),
            heegner,
            multiplicity,
        }
    }
}

pub fn point_text(p: &Point<ElementK>) -> String {
    match p {
        Point::Infinity => "O".into(),
        Point::Affine(x, y) => format!("({x}, {y})"),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub basepoint: TaggedComplex,
    pub j: TaggedComplex,
    pub j_normalized: TaggedComplex,
    pub terms: usize,
    pub tail: f64,
    pub lattice_residual: f64,
    pub multiplier_m: u32,
    pub candidate: Option<(TaggedComplex, TaggedComplex)>,
    pub point: Option<String>,
    pub over_base: Option<bool>,
    pub status: String,
}

impl PointRecord {
    pub fn new(w: &Complex, terms: usize, tail: f64, r: &DarmonPointReport, bits: usize) -> PointRecord {
        PointRecord {
            basepoint: TaggedComplex::new(w, bits),
            j: TaggedComplex::new(&r.j, bits),
            j_normalized: TaggedComplex::new(&r.j_normalized, bits),
            terms,
            tail,
            lattice_residual: r.lattice_residual,
            multiplier_m: r.multiplier_m,
            candidate: r.candidate.as_ref().map(|(x, y)| (TaggedComplex::new(x, bits), TaggedComplex::new(y, bits))),
            point: r.recognized.as_ref().map(|p| point_text(&p.point)),
            over_base: r.recognized.as_ref().map(|p| p.over_base),
            status: r.status.label().into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvarianceRecord {
    /// Rational coordinates `p/q` of each difference in the basis of `Lambda_1`.
    pub coords: Vec<[String; 2]>,
    pub residual: f64,
    pub rank: usize,
    pub denominator: u64,
}

impl From<&InvarianceReport> for InvarianceRecord {
    fn from(r: &InvarianceReport) -> Self {
        let q = |(p, q): (i64, u64)| format!("{p}/{q}");
        InvarianceRecord { coords: r.coords.iter().map(|(a, b)| [q(*a), q(*b)]).collect(), residual: r.residual, rank: r.rank, denominator: r.denominator }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeRecord {
    pub prime: String,
    pub norm: u64,
    pub splitting: String,
    pub depth: u32,
    pub level_zero_vertices: usize,
    pub level_zero_edges: usize,
    pub shape: String,
    pub orbit_counts: Vec<(u32, usize)>,
    pub atkin_lehner_swaps: Vec<(u32, bool)>,
}

/// One scan row in the fixed schema of `table.csv`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub schema: String,
    pub t: String,
    pub t_norm: u64,
    pub delta: String,
    pub rel_disc_norm: u64,
    pub heegner: bool,
    pub multiplicity: u64,
    pub tag: String,
    pub class_group: String,
    pub prec_bits: usize,
    pub j_re: Option<String>,
    pub j_im: Option<String>,
    pub tail: Option<f64>,
    pub lattice_residual: Option<f64>,
    pub multiplier_m: Option<u32>,
    pub point: Option<String>,
    pub coefficient: Option<i64>,
    pub lvalue: Option<f64>,
    pub lvalue_error: Option<f64>,
    pub lvalue_sign: Option<i32>,
    pub note: Option<String>,
}

impl ScanRecord {
    pub fn new(row: &ScanRow, bits: usize) -> ScanRecord {
        let digits = digits_for(bits);
        let note = match &row.tag {
            RowTag::HeegnerFailed(f) => Some(format!("{f:?}")),
            RowTag::NumericFailure(m) => Some(m.clone()),
            _ => row.lvalue_note.clone(),
        };
        let class_group = match &row.class_group {
            ClassCertificate::Trivial { .. } => "trivial".to_string(),
            ClassCertificate::Incomplete { prime_norm, .. } => format!("class-group-incomplete:{prime_norm}"),
        };
        ScanRecord {
            schema: CSV_SCHEMA.into(),
            t: row.t.to_string(),
            t_norm: row.t_norm,
            delta: row.ext.delta().to_string(),
            rel_disc_norm: row.ext.rel_disc().norm(),
            heegner: row.heegner,
            multiplicity: row.multiplicity,
            tag: row.tag.label().into(),
            class_group,
            prec_bits: bits,
            j_re: row.j.as_ref().map(|j| j.re.to_decimal(digits)),
            j_im: row.j.as_ref().map(|j| j.im.to_decimal(digits)),
            tail: row.tail,
            lattice_residual: row.report.as_ref().map(|r| r.lattice_residual),
            multiplier_m: row.report.as_ref().map(|r| r.multiplier_m),
            point: row.report.as_ref().and_then(|r| r.recognized.as_ref()).map(|p| point_text(&p.point)),
            coefficient: row.coefficient,
            lvalue: row.lvalue.map(|l| l.value),
            lvalue_error: row.lvalue.map(|l| l.error),
            lvalue_sign: row.lvalue.map(|l| l.sign),
            note,
        }
    }
}

pub fn scan_csv(records: &[ScanRecord]) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

pub fn tree_csv(records: &[TreeRecord]) -> String {
    let mut out = String::from("prime,norm,splitting,depth,level_zero_vertices,level_zero_edges,shape,orbit_counts,atkin_lehner_swaps\n");
    for r in records {
        let orbits: Vec<String> = r.orbit_counts.iter().map(|(d, c)| format!("{d}:{c}")).collect();
        let swaps: Vec<String> = r.atkin_lehner_swaps.iter().map(|(d, s)| format!("{d}:{s}")).collect();
        out.push_str(&format!(
            "\"{}\",{},{},{},{},{},{},{},{}\n",
            r.prime,
            r.norm,
            r.splitting,
            r.depth,
            r.level_zero_vertices,
            r.level_zero_edges,
            r.shape,
            orbits.join(" "),
            swaps.join(" ")
        ));
    }
    out
}
