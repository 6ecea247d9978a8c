use fewopt::condition::ConditionReport;
use fewopt::format::decimal;
use fewopt::harness::{GridReport, HardnessInstance, WideningReport};
use fewopt::supremum::{DecisionReport, MaxCoord, MaximizerDescription, Outcome, SupremumResult, UnboundedWitness};
use fewopt::transform::CanonicalSimplexForm;
use fewopt::univariate::RootReport;
use fewopt::{Error, Interval};
use fewopt::format::InstanceFile;
use rug::Float;
use serde_json::{json, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_PRECISION: i32 = 3;
pub const EXIT_UNSUPPORTED: i32 = 4;

/// Shortest decimal of an `f64`, as a string.
pub fn real(v: f64) -> String {
    if v.is_finite() {
        format!("{v:e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn floats(v: &[Float]) -> Vec<String> {
    v.iter().map(decimal).collect()
}

pub fn interval(i: &Interval) -> Value {
    json!({ "lo": decimal(i.lo()), "hi": decimal(i.hi()) })
}

fn witness(w: &UnboundedWitness) -> Value {
    json!({
        "direction": floats(w.direction.coords()),
        "base_point": floats(&w.base_point),
        "term_index": w.term_index,
    })
}

fn maximizer(m: &MaximizerDescription) -> Value {
    let coords: Vec<String> = m
        .coords
        .iter()
        .map(|c| match c {
            MaxCoord::Finite(x) => decimal(x),
            MaxCoord::Zero => "0".into(),
            MaxCoord::Infinity => "inf".into(),
        })
        .collect();
    json!({
        "coords": coords,
        "attained": m.attained(),
        "orbit_dim": m.orbit_dim,
        "log_point": floats(&m.log_point),
        "boundary_direction": floats(&m.boundary_direction),
    })
}

pub fn supremum(r: &SupremumResult) -> (Value, i32) {
    let mut out = json!({
        "case": r.case.to_string(),
        "precision_bits": r.precision_bits,
        "certified_relative_error": real(r.certified_relative_error),
    });
    let mut code = EXIT_OK;
    match &r.outcome {
        Outcome::Unbounded(w) => {
            out["outcome"] = json!("unbounded");
            out["witness"] = witness(w);
        }
        Outcome::Bounded { lambda_star, maximizer: m } => {
            out["outcome"] = json!("bounded");
            out["lambda_star"] = json!(decimal(lambda_star));
            out["maximizer"] = maximizer(m);
        }
        Outcome::ConstantAtBoundary { value, tie } => {
            out["outcome"] = json!("constant_at_boundary");
            out["lambda_star"] = json!(decimal(value));
            out["tie"] = json!(tie);
            if *tie {
                code = EXIT_PRECISION;
            }
        }
    }
    if let Some(e) = &r.enclosure {
        out["enclosure"] = interval(e);
    }
    if let Some(l) = &r.log_form {
        out["log_form"] = interval(l);
    }
    (out, code)
}

pub fn decision(d: &DecisionReport, lambda: &Float) -> (Value, i32) {
    let (sup, _) = supremum(&d.result);
    let name = match d.decision {
        fewopt::Decision::Yes => "yes",
        fewopt::Decision::No => "no",
        fewopt::Decision::EqualWithinPrecision => "equal_within_precision",
    };
    let code = if d.decision == fewopt::Decision::EqualWithinPrecision { EXIT_PRECISION } else { EXIT_OK };
    let out = json!({
        "decision": name,
        "lambda": decimal(lambda),
        "margin": decimal(&d.margin),
        "enclosure": d.enclosure.as_ref().map(interval),
        "precision_bits": d.bits,
        "supremum": sup,
    });
    (out, code)
}

pub fn roots(r: &RootReport, bound: &(Float, Float)) -> Value {
    let roots: Vec<Value> = r
        .roots
        .iter()
        .map(|x| {
            json!({
                "value": decimal(&x.value),
                "multiplicity": x.multiplicity,
                "certified_relative_error": real(x.certified_relative_error),
                "enclosure": interval(&x.enclosure),
            })
        })
        .collect();
    json!({
        "count": r.count,
        "roots": roots,
        "root_bound": { "lo": decimal(&bound.0), "hi": decimal(&bound.1) },
        "precision_bits": r.bits,
    })
}

pub fn condition(r: &ConditionReport) -> Value {
    let minors: Vec<Value> = r
        .minors
        .iter()
        .map(|m| json!({ "columns": m.columns, "abs_value": real(m.value), "vanishes": m.vanishes }))
        .collect();
    json!({
        "log_condition": real(r.log_condition),
        "sparse_size_bits": r.sparse_size_bits,
        "minors": minors,
    })
}

pub fn canonical(c: &CanonicalSimplexForm) -> Value {
    let m = c.transform.matrix();
    let rows: Vec<Vec<String>> = (0..m.rows()).map(|i| floats(m.row(i))).collect();
    let s = c.summary();
    json!({
        "c": s.c,
        "ell": s.ell,
        "permutation": s.permutation,
        "origin_index": c.origin_index,
        "transform_rows": rows,
        "scaling": floats(&c.scaling),
        "sup_is_unbounded": c.ell > 0,
    })
}

pub fn hardness(h: &HardnessInstance) -> Value {
    json!({
        "mode": h.mode,
        "m": h.m,
        "m_formula": h.m_formula.to_string(),
        "clamped": h.clamped,
        "delta": real(h.delta),
        "x_vars": h.x_vars,
        "variables": h.poly.nvars(),
        "terms": h.poly.num_terms(),
        "instance": serde_json::to_value(InstanceFile::from_sparse_poly(&h.poly)).expect("serializable"),
    })
}

pub fn grid(r: &GridReport, range: [f64; 2], points: usize, rounds: usize) -> Value {
    json!({
        "value": real(r.value),
        "argmax_log10": r.argmax.iter().map(|v| real(*v)).collect::<Vec<_>>(),
        "resolution": real(r.resolution),
        "range_log10": [real(range[0]), real(range[1])],
        "grid": points,
        "rounds": rounds,
    })
}

pub fn widening(w: &WideningReport) -> Value {
    json!({
        "values": w.values.iter().map(|v| real(*v)).collect::<Vec<_>>(),
        "value": real(w.value),
        "resolution": real(w.resolution),
        "grows": w.grows,
    })
}

fn kind(e: &Error) -> &'static str {
    match e {
        Error::ZeroCoefficient { .. } => "zero_coefficient",
        Error::DuplicateExponent { .. } => "duplicate_exponent",
        Error::DimensionMismatch { .. } => "dimension_mismatch",
        Error::InvalidInput(_) => "invalid_input",
        Error::NonpositiveCoordinate { .. } => "nonpositive_coordinate",
        Error::NonpositiveBase => "nonpositive_base",
        Error::SubsetBudgetExceeded { .. } => "subset_budget_exceeded",
        Error::SingularMatrix => "singular_matrix",
        Error::SingularMap => "singular_map",
        Error::NotInClass(_) => "not_in_class",
        Error::SignPreconditionViolated(_) => "sign_precondition_violated",
        Error::PrecisionExhausted { .. } => "precision_exhausted",
        Error::DegreeNotFour { .. } => "degree_not_four",
        Error::ExhaustedAttempts { .. } => "exhausted_attempts",
        Error::ParseError { .. } => "parse_error",
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::PrecisionExhausted { .. } => EXIT_PRECISION,
        Error::NotInClass(_) | Error::SubsetBudgetExceeded { .. } => EXIT_UNSUPPORTED,
        _ => EXIT_INVALID,
    }
}

pub fn error(e: &Error) -> Value {
    let mut v = json!({ "error": kind(e), "message": e.to_string() });
    if let Error::ParseError { position, .. } = e {
        v["position"] = json!(position);
    }
    v
}
