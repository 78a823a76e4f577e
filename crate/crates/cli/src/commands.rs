use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Map, Value};

use tsl_core::algebra::{rational_root, stratum_classify, stratum_sample_with_budget, StratumLabel};
use tsl_core::duality::{verify_duality, DualityConfig, DualityVerdict};
use tsl_core::field::{fmt_q, parse_rational, Field, Q};
use tsl_core::groups::{bfs_counts, growth_series, FreeProductSpec};
use tsl_core::hp;
use tsl_core::operators::operator_identity_suite;
use tsl_core::opposite::{detect_accumulation, ratio_sequence, report_form, write_ratios_csv, AccumulationReport, DetectionConfig};
use tsl_core::ratfn::RationalFunctionRep;
use tsl_core::sequence::{CoefficientStream, SeriesSpec};
use tsl_core::{Error, Result};

use crate::input;
use crate::{
    AnalyzeArgs, Cli, DualityArgs, Fixture, InputArgs, Mode, NumericArgs, OracleArgs, SectionsArgs, StratifyArgs, EXIT_BAD_INPUT,
    EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_PASS,
};

const PRECISION_RANGE: std::ops::RangeInclusive<usize> = 64..=1024;

/// The JSON document and exit code of one invocation.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub json: Value,
}

fn status(code: i32) -> &'static str {
    match code {
        EXIT_PASS => "pass",
        EXIT_FAIL => "fail",
        EXIT_INCONCLUSIVE => "inconclusive",
        _ => "error",
    }
}

pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidInput(_) => "invalid_input",
        Error::ZeroConstantTerm => "zero_constant_term",
        Error::ZeroDenominator => "zero_denominator",
        Error::ZeroModelParameter(_) => "zero_model_parameter",
        Error::ZeroCoefficient { .. } => "zero_coefficient",
        Error::NotTame { .. } => "not_tame",
        Error::HorizonExceedsData { .. } => "horizon_exceeds_data",
        Error::ZeroInitial { .. } => "zero_initial",
        Error::GcdMismatch(_) => "gcd_mismatch",
        Error::InexactDivision(_) => "inexact_division",
        Error::RootIsolation { .. } => "root_isolation",
        Error::UndecidableBoundary { .. } => "undecidable_boundary",
        Error::NonMeromorphic(_) => "non_meromorphic",
        Error::Inconclusive(_) => "inconclusive",
        Error::SampleBudgetExhausted { .. } => "sample_budget_exhausted",
        Error::GuardExceeded { .. } => "guard_exceeded",
        Error::OrderMismatch { .. } => "order_mismatch",
        Error::Io(_) => "io",
        Error::Parse(_) => "parse",
    }
}

pub fn error_code(e: &Error) -> i32 {
    match e {
        Error::Inconclusive(_) | Error::RootIsolation { .. } | Error::UndecidableBoundary { .. } | Error::SampleBudgetExhausted { .. } => {
            EXIT_INCONCLUSIVE
        }
        Error::GcdMismatch(_) | Error::InexactDivision(_) | Error::OrderMismatch { .. } | Error::ZeroInitial { .. } => EXIT_FAIL,
        _ => EXIT_BAD_INPUT,
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize to JSON")
}

struct Run {
    input: Option<SeriesSpec>,
    config: Value,
    report: Value,
    code: i32,
}

/// Executes one mode. Failures become an error envelope rather than a panic.
pub fn run(cli: &Cli) -> Outcome {
    let mode = cli.mode.name();
    let result = match &cli.mode {
        Mode::Analyze(a) => analyze(a),
        Mode::Duality(a) => duality(a),
        Mode::Stratify(a) => stratify(a),
        Mode::Sections(a) => sections(a),
        Mode::Oracle(a) => oracle(a),
    };
    let mut doc = Map::new();
    doc.insert("tool".into(), json!("tsl"));
    doc.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    doc.insert("mode".into(), json!(mode));
    let code = match result {
        Ok(r) => {
            doc.insert("status".into(), json!(status(r.code)));
            doc.insert("exit_code".into(), json!(r.code));
            if let Some(spec) = &r.input {
                doc.insert("input".into(), to_value(spec));
            }
            doc.insert("config".into(), r.config);
            doc.insert("report".into(), r.report);
            r.code
        }
        Err(e) => {
            let code = error_code(&e);
            doc.insert("status".into(), json!(status(code)));
            doc.insert("exit_code".into(), json!(code));
            doc.insert("error".into(), json!({ "kind": error_kind(&e), "message": e.to_string() }));
            code
        }
    };
    Outcome { code, json: Value::Object(doc) }
}

fn series_spec(i: &InputArgs) -> Result<SeriesSpec> {
    if let Some(g) = &i.group {
        input::parse_group(g)
    } else if let Some(r) = &i.rational {
        input::parse_rational_function(r)
    } else if let Some(p) = &i.coeffs {
        input::read_coeffs(p)
    } else if let Some(m) = &i.model {
        input::parse_model(m)
    } else if let Some(p) = &i.spec {
        input::read_spec(p)
    } else if let Some(Fixture::Sqrt) = i.fixture {
        Ok(SeriesSpec::SqrtFixture)
    } else {
        Err(Error::InvalidInput("no input given".into()))
    }
}

fn detection_config(n: &NumericArgs) -> Result<DetectionConfig> {
    if !PRECISION_RANGE.contains(&n.precision) {
        return Err(Error::InvalidInput(format!(
            "precision must be between {} and {} bits, got {}",
            PRECISION_RANGE.start(),
            PRECISION_RANGE.end(),
            n.precision
        )));
    }
    if !(n.tolerance.is_finite() && n.tolerance > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {}", n.tolerance)));
    }
    if n.h_max == 0 || n.horizon < 2 {
        return Err(Error::InvalidInput("h-max must be at least 1 and horizon at least 2".into()));
    }
    Ok(DetectionConfig { horizon: n.horizon, tolerance: n.tolerance, h_max: n.h_max, precision: n.precision, ..Default::default() })
}

fn emit_ratios(path: &Path, spec: &SeriesSpec, horizon: usize, h: usize, prec: usize) -> Result<()> {
    let stream = CoefficientStream::new(spec.clone())?;
    let horizon = stream.available().map_or(horizon, |a| horizon.min(a.saturating_sub(1)));
    let ratios = ratio_sequence(&stream, horizon, prec)?;
    let f = File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    write_ratios_csv(BufWriter::new(f), &ratios, h)
}

fn same_limits(a: &AccumulationReport, b: &AccumulationReport, tol: f64) -> bool {
    a.verdict == b.verdict
        && a.h_p == b.h_p
        && a.initials.iter().zip(&b.initials).all(|(x, y)| match (&x.exact, &y.exact) {
            (Some(p), Some(q)) => p == q,
            _ => hp::dist_f64(&x.value, &y.value) <= x.error + y.error + tol,
        })
}

fn analyze(a: &AnalyzeArgs) -> Result<Run> {
    let spec = series_spec(&a.input)?;
    let cfg = detection_config(&a.numeric)?;
    let stream = CoefficientStream::new(spec.clone())?;
    let report = detect_accumulation(&stream, &cfg)?;
    let strict = if a.numeric.strict {
        let doubled = DetectionConfig { precision: 2 * cfg.precision, ..cfg.clone() };
        let again = detect_accumulation(&CoefficientStream::new(spec.clone())?, &doubled)?;
        Some(same_limits(&report, &again, cfg.tolerance))
    } else {
        None
    };
    if let Some(path) = &a.emit_ratios {
        emit_ratios(path, &spec, cfg.horizon, report.h_p.unwrap_or(1), cfg.precision)?;
    }
    let forms: Vec<Value> = match report.h_p {
        Some(h) if report.exact_initials().is_some() => {
            (0..h).map(|e| report_form(&report, e).map(|f| json!({ "class": e, "form": f.display() }))).collect::<Result<_>>()?
        }
        _ => Vec::new(),
    };
    let code = match (report.is_finite_rational(), strict) {
        (true, Some(false)) | (false, _) => EXIT_INCONCLUSIVE,
        (true, _) => EXIT_PASS,
    };
    let mut body = to_value(&report);
    let obj = body.as_object_mut().expect("report is an object");
    obj.insert("opposite_forms".into(), Value::Array(forms));
    obj.insert("strict_recheck".into(), json!(strict));
    Ok(Run { input: Some(spec), config: to_value(&cfg), report: body, code })
}

fn duality(a: &DualityArgs) -> Result<Run> {
    let spec = series_spec(&a.input)?;
    let detection = detection_config(&a.numeric)?;
    if !(a.threshold.is_finite() && a.threshold > 0.0) {
        return Err(Error::InvalidInput(format!("threshold must be positive, got {}", a.threshold)));
    }
    let cfg = DualityConfig { detection, threshold: a.threshold, strict: a.numeric.strict };
    let report = verify_duality(&spec, &cfg)?;
    if let Some(path) = &a.emit_ratios {
        emit_ratios(path, &spec, cfg.detection.horizon, report.h_p.unwrap_or(1), cfg.detection.precision)?;
    }
    let code = match report.verdict {
        DualityVerdict::Pass => EXIT_PASS,
        DualityVerdict::Fail => EXIT_FAIL,
        DualityVerdict::Inconclusive => EXIT_INCONCLUSIVE,
    };
    Ok(Run { input: Some(spec), config: to_value(&cfg), report: to_value(&report), code })
}

fn stratify(a: &StratifyArgs) -> Result<Run> {
    if !(1..=8).contains(&a.h) {
        return Err(Error::InvalidInput(format!("h must be between 1 and 8, got {}", a.h)));
    }
    let r: Q = parse_rational(&a.radius)?;
    if r.real_sign() != Some(std::cmp::Ordering::Greater) {
        return Err(Error::InvalidInput("radius must be positive".into()));
    }
    let mut strata = Vec::new();
    let mut all_sampled = true;
    for label in StratumLabel::all(a.h) {
        let entry = match stratum_sample_with_budget(&label, &r, a.seed, a.budget) {
            Ok(sample) => {
                let verified = stratum_classify(&sample).ok().as_ref() == Some(&label);
                all_sampled &= verified;
                let initials: Vec<Value> =
                    sample.iter().map(|x| json!({ "exact": x.fmt_exact(), "value": x.to_real(128).to_decimal(30) })).collect();
                json!({ "label": label, "sample": { "initials": initials, "verified": verified }, "error": null })
            }
            Err(e) => {
                all_sampled = false;
                json!({ "label": label, "sample": null, "error": { "kind": error_kind(&e), "message": e.to_string() } })
            }
        };
        strata.push(entry);
    }
    let a_total = r.pow_f(a.h);
    let report = json!({
        "h": a.h,
        "radius": fmt_q(&r),
        "period_product": fmt_q(&a_total),
        "radius_is_rational_root": rational_root(&a_total, a.h).is_some(),
        "count": strata.len(),
        "strata": strata,
    });
    let config = json!({ "seed": a.seed, "budget": a.budget });
    Ok(Run { input: None, config, report, code: if all_sampled { EXIT_PASS } else { EXIT_INCONCLUSIVE } })
}

fn rational_input(spec: &SeriesSpec) -> Result<RationalFunctionRep> {
    spec.as_rational().ok_or_else(|| Error::InvalidInput("sections need a rational function or group input".into()))
}

fn display_rep(r: &RationalFunctionRep) -> String {
    format!("({}) / ({})", r.numerator.display("t"), r.denominator.display("t"))
}

fn sections(a: &SectionsArgs) -> Result<Run> {
    let spec = series_spec(&a.input)?;
    if a.modulus == 0 {
        return Err(Error::InvalidInput("modulus must be positive".into()));
    }
    let rep = rational_input(&spec)?.reduce();
    let suite = operator_identity_suite(&rep, a.modulus)?;
    let secs: Vec<Value> =
        suite.sections.iter().map(|s| json!({ "class": s.class, "display": display_rep(&s.result), "result": s.result })).collect();
    let report = json!({
        "function": display_rep(&rep),
        "modulus": a.modulus,
        "sections": secs,
        "checks": suite.checks,
        "all_hold": suite.all_hold,
    });
    let code = if suite.all_hold { EXIT_PASS } else { EXIT_FAIL };
    Ok(Run { input: Some(spec), config: json!({ "modulus": a.modulus }), report, code })
}

fn oracle(a: &OracleArgs) -> Result<Run> {
    let spec = input::parse_group(&a.group)?;
    let SeriesSpec::FreeProduct { orders } = &spec else { unreachable!("parse_group yields a free product") };
    let fp = FreeProductSpec::new(orders.clone())?;
    let counts = bfs_counts(&fp, a.length)?;
    let rep = growth_series(&fp);
    let series = rep.taylor(a.length + 1);
    let mismatch = series.iter().zip(&counts).position(|(s, c)| *s != Q::from_integer((*c).into()));
    let report = json!({
        "orders": orders,
        "length": a.length,
        "growth_series": display_rep(&rep),
        "series": series.iter().map(fmt_q).collect::<Vec<_>>(),
        "counts": counts,
        "agree": mismatch.is_none(),
        "first_mismatch": mismatch,
    });
    let code = if mismatch.is_none() { EXIT_PASS } else { EXIT_FAIL };
    Ok(Run { input: Some(spec), config: json!({ "length": a.length }), report, code })
}
