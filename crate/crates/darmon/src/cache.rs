//! Plain-text coefficient cache: one ideal per line as
//! `norm generator_a generator_b a_m`, the generator being `a + b sqrt(D)`
//! with `a`, `b` written as integers or `p/q`.

use std::fmt::Write as _;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;

use darmon_core::ecurve::EllipticCurveF;
use darmon_core::hmf::{build_table, CoefficientTable, TableError};
use darmon_core::nfield::{ElementF, IdealF};

#[derive(Debug, thiserror::Error)]
pub enum CacheError {
    #[error("cache io: {0}")]
    Io(#[from] std::io::Error),
    #[error("cache line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Table(#[from] TableError),
}

fn rational_text(r: &BigRational) -> String {
    if r.denom() == &BigInt::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn parse_rational(s: &str) -> Option<BigRational> {
    match s.split_once('/') {
        Some((n, d)) => {
            let d: BigInt = d.parse().ok()?;
            if d == BigInt::from(0) {
                return None;
            }
            Some(BigRational::new(n.parse().ok()?, d))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

pub fn render(table: &CoefficientTable) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# bound {}", table.bound());
    for (m, a) in table.iter() {
        let g = m.gen();
        let _ = writeln!(out, "{} {} {} {}", m.norm(), rational_text(g.a()), rational_text(g.b()), a);
    }
    out
}

pub fn parse(curve: &EllipticCurveF, text: &str) -> Result<CoefficientTable, CacheError> {
    let field = curve.field();
    let mut bound = None;
    let mut records = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let err = |reason: &str| CacheError::Parse { line: i + 1, reason: reason.to_string() };
        if let Some(rest) = line.strip_prefix('#') {
            if let Some(b) = rest.trim().strip_prefix("bound ") {
                bound = Some(b.trim().parse::<u64>().map_err(|_| err("bad bound"))?);
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 4 {
            return Err(err("expected four fields"));
        }
        let norm: u64 = parts[0].parse().map_err(|_| err("bad norm"))?;
        let a = parse_rational(parts[1]).ok_or_else(|| err("bad generator_a"))?;
        let b = parse_rational(parts[2]).ok_or_else(|| err("bad generator_b"))?;
        let am: i64 = parts[3].parse().map_err(|_| err("bad coefficient"))?;
        let g = ElementF::new(field.radicand(), a, b);
        let ideal = IdealF::principal(field, &g).map_err(|_| err("generator is not integral"))?;
        if ideal.norm() != norm {
            return Err(err("norm does not match the generator"));
        }
        records.push((ideal, am));
    }
    let bound = bound.ok_or(CacheError::Parse { line: 0, reason: "missing bound header".into() })?;
    Ok(CoefficientTable::from_records(curve, bound, records)?)
}

/// Reads the cache when it covers `bound`, otherwise builds the table and
/// rewrites the cache.
pub fn load_or_build(curve: &EllipticCurveF, bound: u64, path: Option<&Path>) -> Result<(CoefficientTable, bool), CacheError> {
    if let Some(p) = path {
        if p.exists() {
            let table = parse(curve, &std::fs::read_to_string(p)?)?;
            if table.bound() == bound {
                return Ok((table, true));
            }
        }
    }
    let table = build_table(curve, bound)?;
    if let Some(p) = path {
        std::fs::write(p, render(&table))?;
    }
    Ok((table, false))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_tamper_detection() {
        let cfg = crate::fixtures::e31_config();
        let f = cfg.build_field().unwrap();
        let e = cfg.build_curve(&f).unwrap();
        let table = build_table(&e, 200).unwrap();
        let text = render(&table);
        let back = parse(&e, &text).unwrap();
        assert_eq!(render(&back), text);
        let line = text.lines().nth(6).unwrap().to_string();
        let mut parts: Vec<String> = line.split(' ').map(String::from).collect();
        let a: i64 = parts[3].parse().unwrap();
        parts[3] = (a + 1).to_string();
        let tampered = text.replace(&line, &parts.join(" "));
        assert!(parse(&e, &tampered).is_err());
    }
}
