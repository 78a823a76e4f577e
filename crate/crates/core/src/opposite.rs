//! Opposite polynomials `Xₙ(P)`, detection of finite rational accumulation
//! of the ratio sequence `γ_{n-1}/γₙ`, the rational forms of the limits and
//! the shift `τ_Ω`.

use std::io::Write;

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::algebra;
use crate::error::{Error, Result};
use crate::field::{self, ExactGauss, Field, Gauss, Q};
use crate::hp::{self, Complex, Real};
use crate::poly::Poly;
use crate::sequence::{self, certify_tameness, CoefficientStream, Coeffs, RadiusBounds, TamenessCertificate};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DetectionConfig {
    pub horizon: usize,
    /// A class limit is accepted once its error estimate is below this.
    pub tolerance: f64,
    pub h_max: usize,
    pub precision: usize,
    /// Minimum number of successive differences examined per class.
    pub window: usize,
    /// Rational reconstruction is attempted below this error.
    pub reconstruct_below: f64,
    pub max_denominator: u64,
    pub certification_horizon: usize,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        DetectionConfig {
            horizon: sequence::DETECTION_HORIZON,
            tolerance: 1e-30,
            h_max: 24,
            precision: hp::DEFAULT_PRECISION,
            window: 16,
            reconstruct_below: 1e-20,
            max_denominator: 1_000_000,
            certification_horizon: sequence::CERTIFICATION_HORIZON,
        }
    }
}

/// `Xₙ(P) = Σ_{k≤n} (γ_{n-k}/γₙ) s^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct OppositePolynomial {
    pub degree: usize,
    pub coefficients: Coeffs,
}

pub fn opposite_polynomial(stream: &CoefficientStream, n: usize) -> Result<OppositePolynomial> {
    let c = stream.coefficients(n)?;
    if c.is_zero(n) {
        return Err(Error::ZeroCoefficient { index: n });
    }
    let coefficients = match &c {
        Coeffs::Rational(v) => Coeffs::Rational((0..=n).map(|k| &v[n - k] / &v[n]).collect()),
        Coeffs::Gaussian(v) => Coeffs::Gaussian((0..=n).map(|k| v[n - k].div_f(&v[n])).collect()),
    };
    Ok(OppositePolynomial { degree: n, coefficients })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    FiniteRational,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitMethod {
    /// The class sequence is exactly constant over the window.
    Stationary,
    /// Differences contract geometrically.
    Geometric,
    /// Polynomial extrapolation in `1/n`.
    Extrapolated,
}

/// A detected limit with its error estimate.
#[derive(Clone, Debug, Serialize)]
pub struct Limit {
    pub value: Complex,
    pub error: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<ExactGauss>,
    /// `exact` came from rational reconstruction of an approximation.
    pub reconstructed: bool,
    pub method: LimitMethod,
}

impl Limit {
    fn same_as(&self, o: &Limit, tol: f64) -> bool {
        match (&self.exact, &o.exact) {
            (Some(a), Some(b)) => a == b,
            _ => hp::dist_f64(&self.value, &o.value) <= self.error + o.error + tol,
        }
    }

    pub fn exact_value(&self) -> Option<&Gauss> {
        self.exact.as_ref().map(|e| &e.0)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PeriodAttempt {
    pub h: usize,
    pub class: usize,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Diagnostics {
    pub horizon: usize,
    pub n_p: usize,
    pub tolerance: f64,
    pub h_max: usize,
    /// The period at which every class converged, before merging equal limits.
    pub detected_at: Option<usize>,
    pub class_errors: Vec<f64>,
    pub rejected: Vec<PeriodAttempt>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suggested_horizon: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Omega1Value {
    pub value: Complex,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<ExactGauss>,
    pub classes: Vec<usize>,
}

/// Distinct initials and whether the class → initial map fails to be injective.
#[derive(Clone, Debug, Serialize)]
pub struct Omega1Summary {
    pub values: Vec<Omega1Value>,
    pub count: usize,
    pub h_p: usize,
    pub non_injective: bool,
}

/// Quantities tied to the detected limits and the radii.
#[derive(Clone, Debug, Default, Serialize)]
pub struct LimitChecks {
    /// `|A_P - γ_{H-h}/γ_H|` at the horizon `H`.
    pub product_residual: Option<f64>,
    /// `||A_P| - r_P^h|`.
    pub radius_residual: Option<f64>,
    /// `|A_P|^{-1/h}`, the radius of every opposite series.
    pub form_radius: Option<f64>,
    /// `1/sup{|a| : a ∈ Ω₁}`.
    pub inverse_sup_initial: Option<f64>,
    #[serde(rename = "R_P")]
    pub big_r_p: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AccumulationReport {
    pub verdict: Verdict,
    pub h_p: Option<usize>,
    pub initials: Vec<Limit>,
    pub a_p: Option<Limit>,
    /// Exact numerators `A^[e]` when every initial is exact.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub numerators: Option<Vec<Poly<Gauss>>>,
    pub omega1: Option<Omega1Summary>,
    pub tameness: TamenessCertificate,
    pub radius: Option<RadiusBounds>,
    pub checks: LimitChecks,
    pub diagnostics: Diagnostics,
}

impl AccumulationReport {
    pub fn is_finite_rational(&self) -> bool {
        self.verdict == Verdict::FiniteRational
    }

    pub fn exact_initials(&self) -> Option<Vec<Gauss>> {
        if self.initials.is_empty() {
            return None;
        }
        self.initials.iter().map(|l| l.exact_value().cloned()).collect()
    }

    /// Exact initials when all are rational.
    pub fn exact_real_initials(&self) -> Option<Vec<Q>> {
        self.exact_initials()?.into_iter().map(|z| z.as_q()).collect()
    }

    pub fn initial_values(&self) -> Vec<Complex> {
        self.initials.iter().map(|l| l.value.clone()).collect()
    }
}

/// Exact and high-precision ratios `γ_{n-1}/γₙ` for `n ≥ start`.
struct Ratios {
    start: usize,
    exact: Vec<Gauss>,
    approx: Vec<Complex>,
}

impl Ratios {
    fn build(c: &Coeffs, start: usize, end: usize, prec: usize) -> Self {
        let exact: Vec<Gauss> = (start..=end).map(|n| c.gauss(n - 1).div_f(&c.gauss(n))).collect();
        let approx = exact.iter().map(|z| z.to_complex(prec)).collect();
        Ratios { start, exact, approx }
    }

    /// Positions (into `exact`) of the indices `n ≡ e (mod h)`.
    fn class(&self, h: usize, e: usize) -> Vec<usize> {
        let first = (e + h - self.start % h) % h;
        (first..self.exact.len()).step_by(h).collect()
    }
}

#[allow(clippy::large_enum_variant)] // consumed immediately
enum ClassOutcome {
    Accept(Limit),
    /// Geometric contraction that has not reached the tolerance yet.
    Slow {
        error_log2: f64,
        rate_log2: f64,
    },
    Reject(String),
}

/// Value at `u = 0` of the interpolating polynomial through `(uᵢ, yᵢ)` (Neville).
fn neville_at_zero(us: &[Real], ys: &[Complex]) -> Complex {
    let mut p: Vec<Complex> = ys.to_vec();
    let k = us.len();
    for m in 1..k {
        for i in 0..k - m {
            let den = &us[i] - &us[i + m];
            let num = &p[i + 1].scale(&us[i]) - &p[i].scale(&us[i + m]);
            p[i] = num.scale(&(&Real::one(den.prec()) / &den));
        }
    }
    p.swap_remove(0)
}

/// Value at `u = 0` of the diagonal rational interpolant (Bulirsch–Stoer),
/// `None` when a denominator vanishes.
fn rational_at_zero(us: &[Real], ys: &[Complex]) -> Option<Complex> {
    let k = us.len();
    let prec = ys[0].prec();
    let one = Complex::one(prec);
    let mut prev: Vec<Complex> = vec![Complex::zero(prec); k + 1];
    let mut cur: Vec<Complex> = ys.to_vec();
    for m in 1..k {
        let mut next = Vec::with_capacity(k - m);
        for i in 0..k - m {
            let diff = &cur[i + 1] - &cur[i];
            let back = &cur[i + 1] - &prev[i + 1];
            if back.is_zero() {
                return None;
            }
            let ratio = Complex::from_real(&us[i] / &us[i + m]);
            let den = &(&ratio * &(&one - &(&diff / &back))) - &one;
            if den.is_zero() {
                return None;
            }
            next.push(&cur[i + 1] + &(&diff / &den));
        }
        prev = cur;
        cur = next;
    }
    cur.pop()
}

fn extrapolate(r: &Ratios, pos: &[usize], tol: f64, prec: usize) -> Option<Limit> {
    let tail = &pos[pos.len() / 2..];
    let last = tail.len() - 1;
    let us: Vec<Real> = tail.iter().map(|&i| &Real::one(prec) / &Real::from_i64((r.start + i) as i64, prec)).collect();
    let ys: Vec<Complex> = tail.iter().map(|&i| r.approx[i].with_prec(prec)).collect();
    let estimate = |k: usize, stride: usize, back: usize, rational: bool| -> Option<Complex> {
        let end = last.checked_sub(back)?;
        let first = end.checked_sub(stride * (k - 1))?;
        let idx: Vec<usize> = (first..=end).step_by(stride).collect();
        let u: Vec<Real> = idx.iter().map(|&i| us[i].clone()).collect();
        let y: Vec<Complex> = idx.iter().map(|&i| ys[i].clone()).collect();
        if rational {
            rational_at_zero(&u, &y)
        } else {
            Some(neville_at_zero(&u, &y))
        }
    };
    let mut best: Option<(Complex, f64)> = None;
    for rational in [false, true] {
        let mut k = 4;
        while k <= 24 && k + 2 < tail.len() {
            let stride = (last / (k + 1)).max(1);
            let est = (estimate(k, stride, 0, rational), estimate(k, stride, 1, rational), estimate(k - 2, stride, 0, rational));
            if let (Some(a), Some(b), Some(c)) = est {
                let err = hp::dist_f64(&a, &b).max(hp::dist_f64(&a, &c));
                if best.as_ref().is_none_or(|(_, e)| err < *e) {
                    best = Some((a, err));
                }
            }
            k += 2;
        }
    }
    let (value, error) = best?;
    (error < tol).then_some(Limit { value, error, exact: None, reconstructed: false, method: LimitMethod::Extrapolated })
}

fn class_limit(r: &Ratios, pos: &[usize], cfg: &DetectionConfig, wp: usize) -> ClassOutcome {
    let len = pos.len();
    if len < cfg.window + 1 {
        return ClassOutcome::Reject(format!("only {len} terms in the class, horizon too small"));
    }
    let w = cfg.window.max(len / 2);
    let pairs: Vec<(usize, usize)> = (len - w..len).map(|j| (pos[j - 1], pos[j])).collect();
    let zero: Vec<bool> = pairs.iter().map(|&(a, b)| r.exact[a] == r.exact[b]).collect();
    let last = *pos.last().expect("nonempty class");
    if zero.iter().all(|&z| z) {
        return ClassOutcome::Accept(Limit {
            value: r.approx[last].clone(),
            error: 0.0,
            exact: Some(ExactGauss(r.exact[last].clone())),
            reconstructed: false,
            method: LimitMethod::Stationary,
        });
    }
    if zero.iter().any(|&z| z) {
        return ClassOutcome::Reject("class ratios repeat exactly at some steps but not others".into());
    }
    // differences below the working precision are clamped to its floor
    let floor = r.approx[last].log2_abs().max(0.0) - (wp as f64 - 16.0);
    let logs: Vec<f64> = pairs.iter().map(|&(a, b)| (&r.approx[b] - &r.approx[a]).log2_abs().max(floor)).collect();
    let at_floor = |x: f64| x <= floor + 0.5;
    let q = w / 4;
    let quarter_max = |i: usize| {
        let hi = if i == 3 { w } else { (i + 1) * q };
        logs[i * q..hi].iter().copied().fold(f64::NEG_INFINITY, f64::max)
    };
    let m: Vec<f64> = (0..4).map(quarter_max).collect();
    let geometric = m.windows(2).all(|p| p[1] < p[0] || at_floor(p[1]));
    if geometric && at_floor(m[3]) {
        return ClassOutcome::Accept(Limit {
            value: r.approx[last].clone(),
            error: 2f64.powf(floor + 2.0),
            exact: None,
            reconstructed: false,
            method: LimitMethod::Geometric,
        });
    }
    let rate = (m[3] - m[0]) / (3 * q) as f64;
    if geometric && rate < -0.05 {
        let rho = 2f64.powf(rate);
        let error_log2 = m[3] + (rho / (1.0 - rho)).log2();
        let error = 2f64.powf(error_log2);
        if error < cfg.tolerance {
            return ClassOutcome::Accept(Limit {
                value: r.approx[last].clone(),
                error,
                exact: None,
                reconstructed: false,
                method: LimitMethod::Geometric,
            });
        }
        if let Some(l) = extrapolate(r, pos, cfg.tolerance, wp) {
            return ClassOutcome::Accept(l);
        }
        return ClassOutcome::Slow { error_log2, rate_log2: rate };
    }
    // algebraic convergence: smooth monotone differences, extrapolate in 1/n
    // A rational function of 1/n may change the sign of its differences late,
    // so a short decreasing tail that is already small also qualifies.
    let decreasing = |xs: &[f64]| xs.windows(2).all(|p| p[1] < p[0]);
    let small_tail = logs[w - 1] < r.approx[last].log2_abs() - 12.0 && decreasing(&logs[3 * w / 4..]);
    if (m[0] - m[3] >= 1.0 && decreasing(&logs[w / 2..])) || small_tail {
        if let Some(l) = extrapolate(r, pos, cfg.tolerance, wp) {
            return ClassOutcome::Accept(l);
        }
        return ClassOutcome::Reject("extrapolation in 1/n does not settle".into());
    }
    ClassOutcome::Reject("differences neither contract geometrically nor decrease monotonically".into())
}

/// Exact value of a limit estimate, if a simple rational lies within its error.
fn reconstruct_limit(l: &mut Limit, exact_last: Option<&Gauss>, cfg: &DetectionConfig) {
    if l.exact.is_some() || l.error >= cfg.reconstruct_below {
        return;
    }
    let floor = 2f64.powi(-(cfg.precision as i32 - 32).max(64));
    let radius = BigRational::from_float((2.0 * l.error).max(floor)).unwrap_or_else(Q::zero);
    let (re, im) = match exact_last {
        Some(z) => (z.re.clone(), z.im.clone()),
        None => (l.value.re.to_rational(), l.value.im.to_rational()),
    };
    let re = field::reconstruct(&re, &radius, cfg.max_denominator);
    let im = field::reconstruct(&im, &radius, cfg.max_denominator);
    if let (Some(re), Some(im)) = (re, im) {
        l.exact = Some(ExactGauss(Gauss::new(re, im)));
        l.reconstructed = true;
    }
}

fn minimal_tuple_period(limits: &[Limit], tol: f64) -> usize {
    let h = limits.len();
    (1..=h).find(|&d| h.is_multiple_of(d) && (0..h).all(|e| limits[e].same_as(&limits[(e + d) % h], tol))).unwrap_or(h)
}

/// Searches the least period whose classes all converge, then merges classes with equal limits.
pub fn detect_accumulation(stream: &CoefficientStream, cfg: &DetectionConfig) -> Result<AccumulationReport> {
    if cfg.tolerance <= 0.0 || cfg.h_max == 0 {
        return Err(Error::InvalidInput("tolerance must be positive and h_max at least 1".into()));
    }
    let mut horizon = cfg.horizon;
    if let Some(avail) = stream.available() {
        horizon = horizon.min(avail.saturating_sub(1));
    }
    let cert_h = cfg.certification_horizon.min(horizon);
    let tameness = certify_tameness(stream, cert_h)?;
    let c = stream.coefficients(horizon)?;
    let n_p = tameness.n_p;
    if let Some(z) = (n_p..=horizon).find(|&i| c.is_zero(i)) {
        return Err(Error::NotTame { reason: "zero coefficient beyond the certified range".into(), witness: z });
    }
    let wp = cfg.precision + 64;
    let ratios = Ratios::build(&c, n_p, horizon, wp);
    let radius = sequence::radius_bounds_prec(stream, horizon, cfg.precision).ok();

    let mut rejected = Vec::new();
    let mut suggested: Option<usize> = None;
    let mut found: Option<(usize, Vec<Limit>, Vec<Option<Gauss>>)> = None;
    for h in 1..=cfg.h_max {
        let mut limits = Vec::with_capacity(h);
        let mut lasts = Vec::with_capacity(h);
        let mut slow_steps: Option<usize> = Some(0);
        let mut failed = false;
        for e in 0..h {
            let pos = ratios.class(h, e);
            match class_limit(&ratios, &pos, cfg, wp) {
                ClassOutcome::Accept(l) => {
                    lasts.push(pos.last().map(|&i| ratios.exact[i].clone()).filter(|_| l.method == LimitMethod::Geometric));
                    limits.push(l);
                }
                ClassOutcome::Slow { error_log2, rate_log2 } => {
                    let need = ((cfg.tolerance.log2() - error_log2) / rate_log2).ceil().max(1.0) as usize;
                    slow_steps = slow_steps.map(|s| s.max(need));
                    if !failed {
                        rejected.push(PeriodAttempt {
                            h,
                            class: e,
                            reason: "converging geometrically but not yet within tolerance".into(),
                        });
                    }
                    failed = true;
                }
                ClassOutcome::Reject(reason) => {
                    slow_steps = None;
                    if !failed {
                        rejected.push(PeriodAttempt { h, class: e, reason });
                    }
                    failed = true;
                }
            }
        }
        if !failed {
            found = Some((h, limits, lasts));
            break;
        }
        if let Some(steps) = slow_steps {
            let s = (horizon + h * steps).next_multiple_of(64);
            suggested = Some(suggested.map_or(s, |x: usize| x.min(s)));
        }
    }

    let mut diagnostics = Diagnostics {
        horizon,
        n_p,
        tolerance: cfg.tolerance,
        h_max: cfg.h_max,
        detected_at: None,
        class_errors: Vec::new(),
        rejected,
        suggested_horizon: suggested,
    };
    let Some((h_found, mut limits, lasts)) = found else {
        return Ok(AccumulationReport {
            verdict: Verdict::Inconclusive,
            h_p: None,
            initials: Vec::new(),
            a_p: None,
            numerators: None,
            omega1: None,
            tameness,
            radius,
            checks: LimitChecks::default(),
            diagnostics,
        });
    };
    diagnostics.detected_at = Some(h_found);
    for (l, last) in limits.iter_mut().zip(&lasts) {
        reconstruct_limit(l, last.as_ref(), cfg);
    }
    let d = minimal_tuple_period(&limits, cfg.tolerance);
    let initials: Vec<Limit> = (0..d)
        .map(|e| {
            let members: Vec<&Limit> = (e..h_found).step_by(d).map(|i| &limits[i]).collect();
            let exact = members.iter().find_map(|l| l.exact.clone());
            let best = members.iter().min_by(|a, b| a.error.total_cmp(&b.error)).expect("nonempty");
            let mut out = (*best).clone();
            if out.exact.is_none() {
                out.reconstructed = members.iter().any(|l| l.exact.is_some() && l.reconstructed);
                out.exact = exact;
            }
            out
        })
        .collect();
    diagnostics.class_errors = initials.iter().map(|l| l.error).collect();

    let a_p = product_limit(&initials, wp);
    let numerators =
        initials.iter().map(|l| l.exact_value().cloned()).collect::<Option<Vec<Gauss>>>().map(|ex| algebra::numerators(&ex)).transpose()?;
    let omega1 = omega1_summary(&initials, cfg.tolerance);
    let checks = limit_checks(&c, horizon, d, &a_p, &initials, radius.as_ref(), wp);
    Ok(AccumulationReport {
        verdict: Verdict::FiniteRational,
        h_p: Some(d),
        initials,
        a_p: Some(a_p),
        numerators,
        omega1: Some(omega1),
        tameness,
        radius,
        checks,
        diagnostics,
    })
}

fn product_limit(initials: &[Limit], wp: usize) -> Limit {
    let value = initials.iter().fold(Complex::one(wp), |acc, l| &acc * &l.value);
    let exact: Option<Vec<Gauss>> = initials.iter().map(|l| l.exact_value().cloned()).collect();
    let method = initials.iter().map(|l| l.method).max().expect("nonempty");
    let reconstructed = initials.iter().any(|l| l.reconstructed);
    match exact {
        Some(ex) => {
            let a = algebra::period_product(&ex);
            Limit { value: a.to_complex(wp), error: 0.0, exact: Some(ExactGauss(a)), reconstructed, method }
        }
        None => {
            let rel: f64 = initials.iter().map(|l| l.error / l.value.abs_f64()).sum();
            Limit { error: value.abs_f64() * rel, value, exact: None, reconstructed: false, method }
        }
    }
}

fn limit_checks(
    c: &Coeffs,
    horizon: usize,
    h: usize,
    a_p: &Limit,
    initials: &[Limit],
    radius: Option<&RadiusBounds>,
    wp: usize,
) -> LimitChecks {
    let mut out = LimitChecks::default();
    if horizon >= h {
        let direct = &c.to_complex(horizon - h, wp) / &c.to_complex(horizon, wp);
        out.product_residual = Some(hp::dist_f64(&direct, &a_p.value));
    }
    let abs_a = a_p.value.abs();
    out.form_radius = Some(abs_a.nth_root(h).to_f64().recip());
    let sup = initials.iter().map(|l| l.value.abs_f64()).fold(0.0, f64::max);
    out.inverse_sup_initial = Some(sup.recip());
    if let Some(rb) = radius {
        let rh = rb.r_p.with_prec(wp).powi(h);
        out.radius_residual = Some((&abs_a - &rh).abs().to_f64());
        out.big_r_p = Some(rb.big_r_p.to_f64());
    }
    out
}

pub fn omega1_summary(initials: &[Limit], tol: f64) -> Omega1Summary {
    let mut values: Vec<Omega1Value> = Vec::new();
    let mut reps: Vec<&Limit> = Vec::new();
    for (e, l) in initials.iter().enumerate() {
        match reps.iter().position(|r| r.same_as(l, tol)) {
            Some(i) => values[i].classes.push(e),
            None => {
                reps.push(l);
                values.push(Omega1Value { value: l.value.clone(), exact: l.exact.clone(), classes: vec![e] });
            }
        }
    }
    let count = values.len();
    Omega1Summary { values, count, h_p: initials.len(), non_injective: count < initials.len() }
}

/// The class-`e` opposite series `A^[e](s)/(1 - A s^h)`.
#[derive(Clone, Debug, PartialEq)]
pub struct OppositeSeriesForm<F: Field> {
    pub class: usize,
    pub h: usize,
    pub initials: Vec<F>,
    pub numerator: Poly<F>,
    pub a_p: F,
}

pub fn opposite_rational_form<F: Field>(initials: &[F], e: usize) -> Result<OppositeSeriesForm<F>> {
    let h = initials.len();
    let nums = algebra::numerators(initials)?;
    let class = e % h.max(1);
    Ok(OppositeSeriesForm { class, h, initials: initials.to_vec(), numerator: nums[class].clone(), a_p: algebra::period_product(initials) })
}

/// The exact form of a finite-rational report.
pub fn report_form(report: &AccumulationReport, e: usize) -> Result<OppositeSeriesForm<Gauss>> {
    if !report.is_finite_rational() {
        return Err(Error::Inconclusive("no finite rational accumulation detected".into()));
    }
    let ex = report.exact_initials().ok_or_else(|| Error::Inconclusive("initials were not reconstructed exactly".into()))?;
    opposite_rational_form(&ex, e)
}

impl<F: Field> OppositeSeriesForm<F> {
    pub fn denominator(&self) -> Poly<F> {
        Poly::one_minus(self.a_p.clone(), self.h)
    }

    /// `a_k^[e] = A_P^{⌊k/h⌋} · A^[e]_{k mod h}`.
    pub fn coefficient(&self, k: usize) -> F {
        self.a_p.pow_f(k / self.h).mul_f(&self.numerator.coeff(k % self.h))
    }

    pub fn series(&self, n: usize) -> Vec<F> {
        self.numerator.series_div(&self.denominator(), n).expect("denominator is 1 at 0")
    }

    /// `τ_Ω(a) = (a - 1)/(ι(a) s)`, computed exactly and checked against the class `e - 1` form.
    pub fn tau_omega(&self) -> Result<OppositeSeriesForm<F>> {
        let iota = self.initials[self.class].clone();
        if iota.is_zero_f() {
            return Err(Error::ZeroInitial { class: self.class });
        }
        let shifted = &self.numerator - &self.denominator();
        if !shifted.constant_term().is_zero_f() {
            return Err(Error::InvalidInput("numerator constant term is not 1".into()));
        }
        let num = Poly::new(shifted.coeffs()[1..].to_vec()).scale(&iota.inv_f());
        let prev = opposite_rational_form(&self.initials, self.class + self.h - 1)?;
        if num != prev.numerator {
            return Err(Error::InvalidInput(format!(
                "τ_Ω of class {} gives {} instead of {}",
                self.class,
                num.display("s"),
                prev.numerator.display("s")
            )));
        }
        Ok(prev)
    }
}

/// `(n, γ_{n-1}/γₙ)` for `1 ≤ n ≤ horizon` with `γₙ ≠ 0`.
pub fn ratio_sequence(stream: &CoefficientStream, horizon: usize, prec: usize) -> Result<Vec<(usize, Complex)>> {
    let c = stream.coefficients(horizon)?;
    Ok((1..=horizon).filter(|&n| !c.is_zero(n)).map(|n| (n, c.gauss(n - 1).div_f(&c.gauss(n)).to_complex(prec))).collect())
}

/// CSV `n,class,ratio_re,ratio_im` with `class = n mod h`.
pub fn write_ratios_csv<W: Write>(writer: W, ratios: &[(usize, Complex)], h: usize) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["n", "class", "ratio_re", "ratio_im"])?;
    for (n, z) in ratios {
        w.write_record([n.to_string(), (n % h.max(1)).to_string(), z.re.to_decimal(30), z.im.to_decimal(30)])?;
    }
    w.flush()?;
    Ok(())
}

impl<F: Field> OppositeSeriesForm<F> {
    pub fn display(&self) -> String {
        format!("({}) / ({})", self.numerator.display("s"), self.denominator().display("s"))
    }
}

/// Whether two limit tuples agree up to a cyclic relabelling by `shift`.
pub fn rotated_match(a: &[Complex], b: &[Complex], shift: usize, tol: f64) -> bool {
    a.len() == b.len() && !a.is_empty() && (0..a.len()).all(|e| hp::dist_f64(&a[(e + shift) % a.len()], &b[e]) < tol)
}
