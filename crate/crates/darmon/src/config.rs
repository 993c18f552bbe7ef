//! JSON run configuration. Exact inputs are rationals `[num, den]`; field
//! elements are `{"a": [n, d], "b": [n, d]}` meaning `a + b sqrt(D)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use darmon_core::ajmap::RecognitionSearch;
use darmon_core::ecurve::{ConductorPrime, CurveError, EllipticCurveF, ReductionType};
use darmon_core::nfield::{make_field, ElementF, FieldError, IdealF, QuadExtension, RealQuadraticField};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed configuration: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid field: {0}")]
    Field(#[from] FieldError),
    #[error("invalid curve: {0}")]
    Curve(#[from] CurveError),
    #[error("{0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

/// `[numerator, denominator]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rational(pub i64, pub i64);

impl Rational {
    pub fn to_big(self) -> Result<BigRational, ConfigError> {
        if self.1 == 0 {
            return Err(invalid("rational with zero denominator"));
        }
        Ok(BigRational::new(BigInt::from(self.0), BigInt::from(self.1)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldElem {
    pub a: Rational,
    pub b: Rational,
}

impl FieldElem {
    pub fn int(a: i64, b: i64) -> FieldElem {
        FieldElem { a: Rational(a, 1), b: Rational(b, 1) }
    }

    pub fn half(a: i64, b: i64) -> FieldElem {
        FieldElem { a: Rational(a, 2), b: Rational(b, 2) }
    }

    pub fn to_element(self, field: &RealQuadraticField) -> Result<ElementF, ConfigError> {
        Ok(ElementF::new(field.radicand(), self.a.to_big()?, self.b.to_big()?))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReductionLabel {
    SplitMult,
    NonsplitMult,
}

impl From<ReductionLabel> for ReductionType {
    fn from(r: ReductionLabel) -> ReductionType {
        match r {
            ReductionLabel::SplitMult => ReductionType::SplitMult,
            ReductionLabel::NonsplitMult => ReductionType::NonsplitMult,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConductorEntry {
    /// Any generator of the prime ideal.
    pub generator: FieldElem,
    #[serde(rename = "type")]
    pub kind: ReductionLabel,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSpec {
    pub x: FieldElem,
    pub y: FieldElem,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    /// `[a1, a2, a3, a4, a6]`.
    pub a: [FieldElem; 5],
    pub conductor: Vec<ConductorEntry>,
    #[serde(default)]
    pub p0: Option<PointSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KSpec {
    Delta { delta: FieldElem },
    Twist { d0: FieldElem, t: FieldElem },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointOptions {
    #[serde(default = "default_m_max")]
    pub m_max: u32,
    #[serde(default = "default_height")]
    pub height_max: u64,
    /// Basepoints `[re, im]` at `tau2`; the balanced basepoint when empty.
    #[serde(default)]
    pub basepoints: Vec<[f64; 2]>,
}

fn default_m_max() -> u32 {
    12
}

fn default_height() -> u64 {
    100_000
}

impl Default for PointOptions {
    fn default() -> Self {
        PointOptions { m_max: default_m_max(), height_max: default_height(), basepoints: Vec::new() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeOptions {
    #[serde(default = "default_tree_primes")]
    pub primes: Vec<u64>,
    #[serde(default = "default_depth")]
    pub depth: u32,
    #[serde(default = "default_max_delta")]
    pub max_delta: u32,
}

fn default_tree_primes() -> Vec<u64> {
    vec![2, 3, 5]
}

fn default_depth() -> u32 {
    4
}

fn default_max_delta() -> u32 {
    2
}

impl Default for TreeOptions {
    fn default() -> Self {
        TreeOptions { primes: default_tree_primes(), depth: default_depth(), max_delta: default_max_delta() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanOptions {
    pub d0: FieldElem,
    #[serde(default = "default_t_max")]
    pub t_max: u64,
    #[serde(default = "default_dlog")]
    pub dlog_bound: i64,
    #[serde(default)]
    pub lvalues: bool,
}

fn default_t_max() -> u64 {
    50
}

fn default_dlog() -> i64 {
    200
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub field: i64,
    pub curve: CurveSpec,
    #[serde(default)]
    pub k: Option<KSpec>,
    #[serde(default = "default_beta")]
    pub beta: i32,
    #[serde(default = "default_precision")]
    pub precision_bits: usize,
    #[serde(default = "default_norm_bound")]
    pub norm_bound: u64,
    /// Series tolerance `10^series_tol_exp`.
    #[serde(default = "default_tol_exp")]
    pub series_tol_exp: i32,
    #[serde(default)]
    pub point: PointOptions,
    #[serde(default)]
    pub tree: TreeOptions,
    #[serde(default)]
    pub scan: Option<ScanOptions>,
}

fn default_beta() -> i32 {
    1
}

fn default_precision() -> usize {
    96
}

fn default_norm_bound() -> u64 {
    6000
}

fn default_tol_exp() -> i32 {
    -20
}

/// Command-line values that replace configuration fields.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub precision_bits: Option<usize>,
    pub norm_bound: Option<u64>,
    pub beta: Option<i32>,
    pub t_max: Option<u64>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<RunConfig, ConfigError> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<RunConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        RunConfig::from_json(&text)
    }

    pub fn apply(mut self, o: &Overrides) -> Result<RunConfig, ConfigError> {
        if let Some(p) = o.precision_bits {
            self.precision_bits = p;
        }
        if let Some(n) = o.norm_bound {
            self.norm_bound = n;
        }
        if let Some(b) = o.beta {
            self.beta = b;
        }
        if let Some(t) = o.t_max {
            match self.scan.as_mut() {
                Some(s) => s.t_max = t,
                None => return Err(invalid("--t-max needs a scan block")),
            }
        }
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.beta != 1 && self.beta != -1 {
            return Err(invalid(format!("beta must be +1 or -1, got {}", self.beta)));
        }
        if !(64..=4096).contains(&self.precision_bits) {
            return Err(invalid(format!("precision_bits {} outside [64, 4096]", self.precision_bits)));
        }
        if !(1..=200_000).contains(&self.norm_bound) {
            return Err(invalid(format!("norm_bound {} outside [1, 200000]", self.norm_bound)));
        }
        if !(-300..=-5).contains(&self.series_tol_exp) {
            return Err(invalid(format!("series_tol_exp {} outside [-300, -5]", self.series_tol_exp)));
        }
        if self.curve.conductor.is_empty() {
            return Err(invalid("conductor list is empty"));
        }
        if self.point.m_max == 0 {
            return Err(invalid("point.m_max must be positive"));
        }
        if self.tree.depth == 0 || self.tree.depth > 8 {
            return Err(invalid("tree.depth must lie in [1, 8]"));
        }
        for b in &self.point.basepoints {
            if !(b[1] > 0.0) || !b[0].is_finite() {
                return Err(invalid("basepoints must lie in the upper half-plane"));
            }
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON serialization.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        let digest = Sha256::digest(&canonical);
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn series_tol(&self) -> f64 {
        10f64.powi(self.series_tol_exp)
    }

    pub fn search(&self) -> RecognitionSearch {
        RecognitionSearch { m_max: self.point.m_max, height_max: self.point.height_max }
    }

    pub fn build_field(&self) -> Result<RealQuadraticField, ConfigError> {
        Ok(make_field(self.field)?)
    }

    pub fn build_curve(&self, field: &RealQuadraticField) -> Result<EllipticCurveF, ConfigError> {
        let mut a = Vec::with_capacity(5);
        for c in &self.curve.a {
            a.push(c.to_element(field)?);
        }
        let a: [ElementF; 5] = a.try_into().expect("five coefficients");
        let mut conductor = Vec::new();
        for entry in &self.curve.conductor {
            let g = entry.generator.to_element(field)?;
            let prime = IdealF::principal(field, &g)?;
            if !prime.is_prime(field) {
                return Err(invalid(format!("conductor generator of norm {} is not prime", prime.norm())));
            }
            conductor.push(ConductorPrime { prime, kind: entry.kind.into() });
        }
        let hint = match &self.curve.p0 {
            Some(p) => Some((p.x.to_element(field)?, p.y.to_element(field)?)),
            None => None,
        };
        let curve = EllipticCurveF::new(field, a, conductor, hint)?;
        Ok(curve.with_norm_bound(self.norm_bound.max(darmon_core::ecurve::NORM_BOUND)))
    }

    /// `delta` of `K`, from either form of the `k` block.
    pub fn delta(&self, field: &RealQuadraticField) -> Result<ElementF, ConfigError> {
        match &self.k {
            Some(KSpec::Delta { delta }) => delta.to_element(field),
            Some(KSpec::Twist { d0, t }) => Ok(-&(&d0.to_element(field)? * &t.to_element(field)?)),
            None => Err(invalid("this subcommand needs a k block")),
        }
    }

    pub fn build_extension(&self, field: &RealQuadraticField) -> Result<QuadExtension, ConfigError> {
        Ok(QuadExtension::new(field, &self.delta(field)?)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unknown_fields_and_bad_beta() {
        let base = r#"{"field": 5, "curve": {"a": [{"a":[1,1],"b":[0,1]},{"a":[-3,2],"b":[-1,2]},{"a":[1,2],"b":[1,2]},{"a":[0,1],"b":[0,1]},{"a":[0,1],"b":[0,1]}],
            "conductor": [{"generator": {"a":[6,1],"b":[1,1]}, "type": "nonsplit_mult"}]}"#;
        let ok = format!("{base}}}");
        let cfg = RunConfig::from_json(&ok).unwrap();
        assert_eq!(cfg.beta, 1);
        assert!(RunConfig::from_json(&format!("{base}, \"beta\": 3}}")).is_err());
        assert!(RunConfig::from_json(&format!("{base}, \"colour\": 3}}")).is_err());
        let f = cfg.build_field().unwrap();
        assert!(cfg.build_curve(&f).is_ok());
    }

    #[test]
    fn hash_tracks_content() {
        let mut cfg = crate::fixtures::e31_config();
        let h = cfg.hash();
        assert_eq!(h, cfg.hash());
        cfg.precision_bits += 1;
        assert_ne!(h, cfg.hash());
    }
}
