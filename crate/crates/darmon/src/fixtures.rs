//! Reference configurations over `Q(sqrt 5)`.

use crate::config::{ConductorEntry, CurveSpec, FieldElem, KSpec, PointOptions, ReductionLabel, RunConfig, ScanOptions, TreeOptions};

fn base(curve: CurveSpec, k: Option<KSpec>) -> RunConfig {
    RunConfig {
        field: 5,
        curve,
        k,
        beta: 1,
        precision_bits: 96,
        norm_bound: 6000,
        series_tol_exp: -20,
        point: PointOptions::default(),
        tree: TreeOptions::default(),
        scan: None,
    }
}

/// `y^2 + xy + phi y = x^3 - (1 + phi) x^2`, nonsplit at `(6 + sqrt 5)` of norm 31,
/// with `K = F(sqrt(-phi))`.
pub fn e31_config() -> RunConfig {
    let curve = CurveSpec {
        a: [FieldElem::int(1, 0), FieldElem::half(-3, -1), FieldElem::half(1, 1), FieldElem::int(0, 0), FieldElem::int(0, 0)],
        conductor: vec![ConductorEntry { generator: FieldElem::int(6, 1), kind: ReductionLabel::NonsplitMult }],
        p0: None,
    };
    let mut cfg = base(curve, Some(KSpec::Delta { delta: FieldElem::half(-1, -1) }));
    cfg.norm_bound = 20_000;
    cfg.series_tol_exp = -12;
    cfg.scan = Some(ScanOptions { d0: FieldElem::half(1, 1), t_max: 50, dlog_bound: 200, lvalues: true });
    cfg
}

/// `y^2 + y = x^3 - x` over `Q(sqrt 5)`: split at the inert prime `(37)`.
pub fn e37_config() -> RunConfig {
    let curve = CurveSpec {
        a: [FieldElem::int(0, 0), FieldElem::int(0, 0), FieldElem::int(1, 0), FieldElem::int(-1, 0), FieldElem::int(0, 0)],
        conductor: vec![ConductorEntry { generator: FieldElem::int(37, 0), kind: ReductionLabel::SplitMult }],
        p0: Some(crate::config::PointSpec { x: FieldElem::int(0, 0), y: FieldElem::int(0, 0) }),
    };
    base(curve, Some(KSpec::Delta { delta: FieldElem::half(-11, -5) }))
}

/// `y^2 + y = x^3 - x^2 - 10x - 20` over `Q(sqrt 5)`: split at both primes over 11.
pub fn e11_config() -> RunConfig {
    let curve = CurveSpec {
        a: [FieldElem::int(0, 0), FieldElem::int(-1, 0), FieldElem::int(1, 0), FieldElem::int(-10, 0), FieldElem::int(-20, 0)],
        conductor: vec![
            ConductorEntry { generator: FieldElem::int(4, 1), kind: ReductionLabel::SplitMult },
            ConductorEntry { generator: FieldElem::int(4, -1), kind: ReductionLabel::SplitMult },
        ],
        p0: None,
    };
    base(curve, None)
}
