//! Comparison of the series side (`Δ^op`, values `A^[e](1/x)`) with the pole
//! side (`Δ^top`, values `P/T^[e]P` at top boundary poles).

use serde::Serialize;

use crate::algebra::{self, DenominatorPair};
use crate::error::{Error, Result};
use crate::field::{Field, Gauss};
use crate::hp::{self, Complex};
use crate::linalg;
use crate::operators::section_rational;
use crate::opposite::{detect_accumulation, AccumulationReport, DetectionConfig};
use crate::poles::{self, NumericPoly, PoleSet};
use crate::poly::Poly;
use crate::ratfn::RationalFunctionRep;
use crate::sequence::{CoefficientStream, SeriesSpec};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualityConfig {
    pub detection: DetectionConfig,
    /// Every residual must be below this for a pass.
    pub threshold: f64,
    /// Re-run at doubled precision and require both runs to pass.
    pub strict: bool,
}

impl Default for DualityConfig {
    fn default() -> Self {
        DualityConfig { detection: DetectionConfig::default(), threshold: 1e-20, strict: false }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Series,
    Pole,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DualityVerdict {
    Pass,
    Fail,
    Inconclusive,
}

/// Rows are classes `e`, columns the top boundary poles in argument order.
#[derive(Clone, Debug, Serialize)]
pub struct TransitionMatrix {
    pub side: Side,
    pub roots: Vec<Complex>,
    pub entries: Vec<Vec<Complex>>,
    pub numeric_rank: usize,
}

impl TransitionMatrix {
    fn new(side: Side, roots: Vec<Complex>, entries: Vec<Vec<Complex>>, prec: usize) -> Self {
        let numeric_rank = linalg::rank_complex(&entries, -(prec as f64) / 2.0);
        TransitionMatrix { side, roots, entries, numeric_rank }
    }

    pub fn max_distance(&self, o: &TransitionMatrix) -> f64 {
        self.entries.iter().zip(&o.entries).flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| hp::dist_f64(x, y))).fold(0.0, f64::max)
    }

    pub fn determinant(&self) -> Option<Complex> {
        (self.entries.len() == self.roots.len()).then(|| linalg::det_complex(&self.entries))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DualityReport {
    pub verdict: DualityVerdict,
    pub failures: Vec<String>,
    pub messages: Vec<String>,
    pub precision: usize,
    pub threshold: f64,
    pub h_p: Option<usize>,
    pub d_p: Option<usize>,
    pub d_m: Option<usize>,
    pub delta: Option<Poly<Gauss>>,
    pub delta_op: Option<Poly<Gauss>>,
    pub delta_op_display: Option<String>,
    pub delta_top: Option<NumericPoly>,
    pub delta_top_display: Option<String>,
    /// Largest coefficient distance between `t^{d_P}Δ^op(1/t)` and `Δ^top`.
    pub reversal_residual: Option<f64>,
    pub degrees_match: Option<bool>,
    pub top_divides_reversal: Option<bool>,
    pub reversal_divides_top: Option<bool>,
    pub series_matrix: Option<TransitionMatrix>,
    pub pole_matrix: Option<TransitionMatrix>,
    pub matrix_distance: Option<f64>,
    pub determinant: Option<Complex>,
    /// `h`-th roots of `A_P` that are not top poles, with the largest `|A^[e](1/x)|/h` there.
    pub excluded_roots: Vec<Complex>,
    pub excluded_max: Option<f64>,
    /// Largest deviation of `T^[f]P/T^[e]P(x)` from `x^{f-e}/(a₁^[e+1]···a₁^[f])`.
    pub ratio_cross_check: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strict_recheck: Option<bool>,
    pub accumulation: Option<AccumulationReport>,
}

/// `A^[e](1/x)` for every class and top pole.
pub fn series_side_matrix(nums: &[Poly<Gauss>], roots: &[Complex], prec: usize) -> TransitionMatrix {
    let entries = nums.iter().map(|a| roots.iter().map(|x| a.eval_complex(&x.inv())).collect()).collect();
    TransitionMatrix::new(Side::Series, roots.to_vec(), entries, prec)
}

/// Ratios of leading Laurent coefficients of `P` and `T^[e]P` at the top poles.
pub fn pole_side_matrix(rep: &RationalFunctionRep, h: usize, roots: &[Complex], d_m: usize, prec: usize) -> Result<TransitionMatrix> {
    let rep = rep.reduce();
    let lead: Vec<Complex> =
        roots.iter().map(|x| poles::leading_laurent(&rep.numerator, &rep.denominator, x, d_m)).collect::<Result<_>>()?;
    let mut entries = Vec::with_capacity(h);
    for e in 0..h {
        let s = section_rational(&rep, h, e).result;
        let row = roots
            .iter()
            .zip(&lead)
            .map(|(x, l)| Ok(l / &poles::leading_laurent(&s.numerator, &s.denominator, x, d_m)?))
            .collect::<Result<Vec<_>>>()?;
        entries.push(row);
    }
    Ok(TransitionMatrix::new(Side::Pole, roots.to_vec(), entries, prec))
}

fn reversal_residual(delta_op: &Poly<Gauss>, d_p: usize, top: &NumericPoly, prec: usize) -> f64 {
    let rev = delta_op.reverse(d_p).to_complex_coeffs(prec);
    let n = rev.len().max(top.coeffs.len());
    let zero = Complex::zero(prec);
    (0..n).map(|i| hp::dist_f64(rev.get(i).unwrap_or(&zero), top.coeffs.get(i).unwrap_or(&zero))).fold(0.0, f64::max)
}

fn pole_set(rep: &RationalFunctionRep, prec: usize) -> Result<PoleSet> {
    if rep.reduce().denominator.deg() == 0 {
        return Err(Error::InvalidInput("a polynomial has no boundary poles".into()));
    }
    poles::boundary_poles(rep, prec)
}

/// Runs both sides and compares them; partial reports when only one side is available.
pub fn verify_duality(spec: &SeriesSpec, cfg: &DualityConfig) -> Result<DualityReport> {
    let base = verify_once(spec, cfg)?;
    if !cfg.strict {
        return Ok(base);
    }
    let mut doubled = cfg.clone();
    doubled.detection.precision *= 2;
    let second = verify_once(spec, &doubled)?;
    let mut out = base;
    let ok = second.verdict == DualityVerdict::Pass;
    out.strict_recheck = Some(ok);
    if out.verdict == DualityVerdict::Pass && !ok {
        out.verdict = DualityVerdict::Fail;
        out.failures.push(format!("re-run at {} bits did not pass", doubled.detection.precision));
    }
    Ok(out)
}

/// Exact initials, their numerators and the denominator pair.
type SeriesSide = (Vec<Gauss>, Vec<Poly<Gauss>>, DenominatorPair<Gauss>);

// `!(x < tol)` so that a NaN residual counts as a failure
#[allow(clippy::neg_cmp_op_on_partial_ord)]
fn verify_once(spec: &SeriesSpec, cfg: &DualityConfig) -> Result<DualityReport> {
    if spec.is_non_meromorphic() {
        return Err(Error::NonMeromorphic("the boundary singularity is an algebraic branch point, so no pole side exists".into()));
    }
    let prec = cfg.detection.precision;
    let tol = cfg.threshold;
    let mut report = DualityReport {
        verdict: DualityVerdict::Inconclusive,
        failures: Vec::new(),
        messages: Vec::new(),
        precision: prec,
        threshold: tol,
        h_p: None,
        d_p: None,
        d_m: None,
        delta: None,
        delta_op: None,
        delta_op_display: None,
        delta_top: None,
        delta_top_display: None,
        reversal_residual: None,
        degrees_match: None,
        top_divides_reversal: None,
        reversal_divides_top: None,
        series_matrix: None,
        pole_matrix: None,
        matrix_distance: None,
        determinant: None,
        excluded_roots: Vec::new(),
        excluded_max: None,
        ratio_cross_check: None,
        strict_recheck: None,
        accumulation: None,
    };

    // pole side
    let rep = spec.as_rational();
    let mut top: Option<(PoleSet, NumericPoly)> = None;
    match &rep {
        Some(r) => {
            let ps = pole_set(r, prec)?;
            let polar = poles::polar_polynomials(r, &ps)?;
            report.d_m = Some(ps.d_m);
            report.delta_top_display = Some(polar.delta_top.display("t"));
            report.delta_top = Some(polar.delta_top.clone());
            top = Some((ps, polar.delta_top));
        }
        None => report.messages.push("input is not a rational function; pole side unavailable".into()),
    }

    // series side
    let stream = CoefficientStream::new(spec.clone())?;
    let acc = match detect_accumulation(&stream, &cfg.detection) {
        Ok(a) => Some(a),
        Err(e @ (Error::NotTame { .. } | Error::HorizonExceedsData { .. } | Error::ZeroCoefficient { .. })) => {
            report.messages.push(format!("accumulation analysis failed: {e}"));
            None
        }
        Err(e) => return Err(e),
    };
    let mut series: Option<SeriesSide> = None;
    if let Some(a) = &acc {
        report.h_p = a.h_p;
        if !a.is_finite_rational() {
            report.messages.push("no finite rational accumulation detected; series side unavailable".into());
        } else if let Some(ex) = a.exact_initials() {
            let nums = algebra::numerators(&ex)?;
            match algebra::denominator_pair(&ex, &nums) {
                Ok(pair) => {
                    report.d_p = Some(pair.d_p);
                    report.delta = Some(pair.delta.clone());
                    report.delta_op = Some(pair.delta_op.clone());
                    report.delta_op_display = Some(pair.delta_op.display("s"));
                    series = Some((ex, nums, pair));
                }
                Err(e) => report.failures.push(format!("numerator gcds are inconsistent: {e}")),
            }
        } else {
            report.messages.push("initials were not reconstructed exactly; series side unavailable".into());
        }
    }
    report.accumulation = acc;

    let (Some((ps, delta_top)), Some((initials, nums, pair))) = (top, series) else {
        if !report.failures.is_empty() {
            report.verdict = DualityVerdict::Fail;
        }
        return Ok(report);
    };

    let h = pair.h;
    let d_m = ps.d_m;
    let roots: Vec<Complex> = ps.top_poles().iter().map(|p| p.z.clone()).collect();
    let deg_top = roots.len();
    report.degrees_match = Some(deg_top == pair.d_p);
    if deg_top != pair.d_p {
        report.failures.push(format!("deg Δ^top = {deg_top} but deg Δ^op = {}", pair.d_p));
    }
    let rr = reversal_residual(&pair.delta_op, pair.d_p, &delta_top, prec);
    report.reversal_residual = Some(rr);
    if !(rr < tol) {
        report.failures.push(format!("reversal residual {rr:e}"));
    }
    if let Some(exact_top) = &delta_top.exact {
        let top_g: Poly<Gauss> = exact_top.map(Gauss::from_q);
        let rev = pair.delta_op.reverse(pair.d_p);
        report.top_divides_reversal = Some(top_g.divides(&rev));
        report.reversal_divides_top = Some(rev.divides(&top_g));
        if report.top_divides_reversal != Some(true) || report.reversal_divides_top != Some(true) {
            report.failures.push("Δ^top and the reversal of Δ^op do not divide each other".into());
        }
    }

    let sm = series_side_matrix(&nums, &roots, prec);
    match pole_side_matrix(rep.as_ref().expect("pole side present"), h, &roots, d_m, prec) {
        Ok(pm) => {
            let dist = sm.max_distance(&pm);
            report.matrix_distance = Some(dist);
            if !(dist < tol) {
                report.failures.push(format!("transition matrices differ by {dist:e}"));
            }
            if pm.numeric_rank != pair.d_p {
                report.failures.push(format!("pole matrix rank {} differs from d_P = {}", pm.numeric_rank, pair.d_p));
            }
            report.ratio_cross_check = Some(ratio_cross_check(&pm, &initials, prec));
            if !(report.ratio_cross_check.unwrap() < tol) {
                report.failures.push("section ratio cross-check failed".into());
            }
            report.pole_matrix = Some(pm);
        }
        Err(e) => report.failures.push(format!("a section's pole order differs from d_m: {e}")),
    }
    if sm.numeric_rank != pair.d_p {
        report.failures.push(format!("series matrix rank {} differs from d_P = {}", sm.numeric_rank, pair.d_p));
    }
    report.determinant = sm.determinant();
    report.series_matrix = Some(sm);

    match algebra::residue_matrix(&pair, &nums, prec) {
        Ok(rm) => {
            report.excluded_max = Some(rm.excluded_max);
            report.excluded_roots = rm.excluded;
            if !(rm.excluded_max < tol) {
                report.failures.push(format!("μ does not vanish at excluded roots ({:e})", rm.excluded_max));
            }
        }
        Err(e) => report.failures.push(format!("residue matrix: {e}")),
    }

    report.verdict = if report.failures.is_empty() { DualityVerdict::Pass } else { DualityVerdict::Fail };
    Ok(report)
}

/// `(P/T^[e]P)/(P/T^[f]P) = T^[f]P/T^[e]P` against `x^{f-e}/(a₁^[e+1]···a₁^[f])` for `e < f`.
fn ratio_cross_check(pm: &TransitionMatrix, initials: &[Gauss], prec: usize) -> f64 {
    let h = initials.len();
    let a: Vec<Complex> = initials.iter().map(|z| z.to_complex(prec)).collect();
    let mut worst = 0f64;
    for (j, x) in pm.roots.iter().enumerate() {
        for e in 0..h {
            let mut pred = Complex::one(prec);
            for f in e + 1..h {
                pred = &(&pred * x) / &a[f];
                let got = &pm.entries[e][j] / &pm.entries[f][j];
                worst = worst.max(hp::dist_f64(&got, &pred) / pred.abs_f64().max(1.0));
            }
        }
    }
    worst
}
