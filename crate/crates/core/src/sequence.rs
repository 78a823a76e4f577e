//! Coefficient sequences γₙ from several sources, tameness certificates and
//! radius bounds.

use std::io::{Read, Write};
use std::sync::Mutex;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use num_bigint::BigInt;

use crate::field::{fmt_gauss, fmt_q, lcm_denominators, serde_q, ExactGauss, Field, Gauss, Q};
use crate::groups::{growth_series, FreeProductSpec};
use crate::hp::{self, Complex, Real};
use crate::poles::{self, RadiusPower};
use crate::poly::Poly;
use crate::ratfn::RationalFunctionRep;
use crate::subsets::RationalSubset;

/// Default number of coefficients used for accumulation detection.
pub const DETECTION_HORIZON: usize = 512;
/// Default number of coefficients used for tameness certification.
pub const CERTIFICATION_HORIZON: usize = 128;

/// Index set `U ⊂ ℤ≥1` of an oscillating model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum IndexSet {
    Rational {
        subset: RationalSubset,
    },
    /// Perfect squares: infinite with infinite complement, not rational.
    Squares,
    /// A finite explicit set.
    Explicit {
        indices: Vec<usize>,
    },
}

impl IndexSet {
    pub fn contains(&self, n: usize) -> bool {
        match self {
            IndexSet::Rational { subset } => subset.contains(n),
            IndexSet::Squares => {
                let r = (n as f64).sqrt().round() as usize;
                (r.saturating_sub(1)..=r + 1).any(|k| k * k == n)
            }
            IndexSet::Explicit { indices } => indices.contains(&n),
        }
    }

    /// The same set as a rational subset, when it is one.
    pub fn as_rational(&self) -> Option<RationalSubset> {
        match self {
            IndexSet::Rational { subset } => Some(subset.clone()),
            IndexSet::Squares => None,
            IndexSet::Explicit { indices } => RationalSubset::new(1, [], indices.iter().copied(), []).ok(),
        }
    }

    /// Asymptotic density `#(U ∩ [1, n])/n`.
    pub fn density(&self) -> Q {
        match self.as_rational() {
            Some(u) => u.density(),
            None => Q::zero(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[allow(clippy::large_enum_variant)] // built once per run
pub enum SeriesSpec {
    ExplicitCoeffs {
        #[serde(with = "serde_q::vec")]
        coeffs: Vec<Q>,
    },
    RationalFunction {
        numerator: Poly<Q>,
        denominator: Poly<Q>,
    },
    FreeProduct {
        orders: Vec<u32>,
    },
    /// `γ₀ = 1`, `γₙ = γₙ₋₁·a` for `n ∈ U`, else `γₙ₋₁·b`.
    OscillatingModel {
        set: IndexSet,
        a: ExactGauss,
        b: ExactGauss,
    },
    /// `√((1+t)/(1-t))`, which is not meromorphic on its circle of convergence.
    SqrtFixture,
    /// The `order`-th derivative `d^m/dt^m`.
    Derivative {
        inner: Box<SeriesSpec>,
        order: usize,
    },
    Sum {
        left: Box<SeriesSpec>,
        right: Box<SeriesSpec>,
    },
    /// `P(c·t)`.
    Rescale {
        inner: Box<SeriesSpec>,
        #[serde(with = "serde_q")]
        c: Q,
    },
    /// `Σ_{n∈U} γₙ tⁿ`.
    Section {
        inner: Box<SeriesSpec>,
        subset: RationalSubset,
    },
}

impl SeriesSpec {
    pub fn rational(numerator: Poly<Q>, denominator: Poly<Q>) -> Self {
        SeriesSpec::RationalFunction { numerator, denominator }
    }

    pub fn from_rep(rep: &RationalFunctionRep) -> Self {
        SeriesSpec::rational(rep.numerator.clone(), rep.denominator.clone())
    }

    pub fn derivative(self, order: usize) -> Self {
        SeriesSpec::Derivative { inner: Box::new(self), order }
    }

    pub fn plus(self, other: SeriesSpec) -> Self {
        SeriesSpec::Sum { left: Box::new(self), right: Box::new(other) }
    }

    pub fn rescaled(self, c: Q) -> Self {
        SeriesSpec::Rescale { inner: Box::new(self), c }
    }

    /// Checks the structural invariants of every variant.
    pub fn validate(&self) -> Result<()> {
        match self {
            SeriesSpec::ExplicitCoeffs { coeffs } if coeffs.is_empty() => {
                Err(Error::InvalidInput("explicit coefficient list is empty".into()))
            }
            SeriesSpec::ExplicitCoeffs { .. } | SeriesSpec::SqrtFixture => Ok(()),
            SeriesSpec::RationalFunction { numerator, denominator } => {
                RationalFunctionRep::new(numerator.clone(), denominator.clone()).map(|_| ())
            }
            SeriesSpec::FreeProduct { orders } => FreeProductSpec::new(orders.clone()).map(|_| ()),
            SeriesSpec::OscillatingModel { a, b, .. } => {
                if a.0.is_zero() {
                    Err(Error::ZeroModelParameter("a"))
                } else if b.0.is_zero() {
                    Err(Error::ZeroModelParameter("b"))
                } else {
                    Ok(())
                }
            }
            SeriesSpec::Derivative { inner, order } => {
                if *order == 0 {
                    return Err(Error::InvalidInput("derivative order must be at least 1".into()));
                }
                inner.validate()
            }
            SeriesSpec::Sum { left, right } => {
                left.validate()?;
                right.validate()
            }
            SeriesSpec::Rescale { inner, c } => {
                if c.is_zero() {
                    return Err(Error::InvalidInput("rescale factor must be nonzero".into()));
                }
                inner.validate()
            }
            SeriesSpec::Section { inner, .. } => inner.validate(),
        }
    }

    /// Whether all coefficients are rational (as opposed to Gaussian rational).
    pub fn is_real(&self) -> bool {
        match self {
            SeriesSpec::OscillatingModel { a, b, .. } => a.0.im.is_zero() && b.0.im.is_zero(),
            SeriesSpec::Derivative { inner, .. } | SeriesSpec::Rescale { inner, .. } | SeriesSpec::Section { inner, .. } => inner.is_real(),
            SeriesSpec::Sum { left, right } => left.is_real() && right.is_real(),
            _ => true,
        }
    }

    /// Exact rational generating function, when the series is known to be rational.
    pub fn as_rational(&self) -> Option<RationalFunctionRep> {
        match self {
            SeriesSpec::RationalFunction { numerator, denominator } => {
                RationalFunctionRep::new(numerator.clone(), denominator.clone()).ok().map(|r| r.reduce())
            }
            SeriesSpec::FreeProduct { orders } => FreeProductSpec::new(orders.clone()).ok().map(|s| growth_series(&s)),
            SeriesSpec::OscillatingModel { set, a, b } => {
                if !(a.0.im.is_zero() && b.0.im.is_zero()) {
                    return None;
                }
                oscillating_rational(&set.as_rational()?, &a.0.re, &b.0.re)
            }
            SeriesSpec::Derivative { inner, order } => {
                let mut r = inner.as_rational()?;
                for _ in 0..*order {
                    r = r.derivative();
                }
                Some(r)
            }
            SeriesSpec::Sum { left, right } => Some(left.as_rational()?.add(&right.as_rational()?)),
            SeriesSpec::Rescale { inner, c } => Some(inner.as_rational()?.rescale(c)),
            SeriesSpec::Section { inner, subset } => Some(crate::operators::section_subset_rational(&inner.as_rational()?, subset)),
            SeriesSpec::ExplicitCoeffs { .. } | SeriesSpec::SqrtFixture => None,
        }
    }

    /// Whether the input is known to be non-meromorphic on its circle of convergence.
    pub fn is_non_meromorphic(&self) -> bool {
        match self {
            SeriesSpec::SqrtFixture => true,
            SeriesSpec::Derivative { inner, .. } | SeriesSpec::Rescale { inner, .. } | SeriesSpec::Section { inner, .. } => {
                inner.is_non_meromorphic()
            }
            SeriesSpec::Sum { left, right } => left.is_non_meromorphic() || right.is_non_meromorphic(),
            _ => false,
        }
    }
}

/// Generating function of an oscillating model over a rational index set:
/// beyond the exceptions, `γ_{n+h} = C·γ_n` with `C` the product over one period.
fn oscillating_rational(u: &RationalSubset, a: &Q, b: &Q) -> Option<RationalFunctionRep> {
    let h = u.period();
    let n0 = u.max_exception().map_or(0, |m| m) + 1;
    let factor = |n: usize| if u.contains(n) { a.clone() } else { b.clone() };
    let mut gam = vec![Q::one()];
    for n in 1..n0 + h {
        gam.push(&gam[n - 1] * factor(n));
    }
    let c = (n0 + 1..=n0 + h).fold(Q::one(), |acc, n| acc * factor(n));
    let head = Poly::new(gam[..n0].to_vec());
    let mut tail = vec![Q::zero(); n0 + h];
    tail[n0..n0 + h].clone_from_slice(&gam[n0..n0 + h]);
    let den = Poly::one_minus(c, h);
    let num = &(&head * &den) + &Poly::new(tail);
    RationalFunctionRep::new(num, den).ok().map(|r| r.reduce())
}

/// A finite run of exact coefficients.
#[derive(Clone, Debug, PartialEq)]
pub enum Coeffs {
    Rational(Vec<Q>),
    Gaussian(Vec<Gauss>),
}

impl Coeffs {
    pub fn len(&self) -> usize {
        match self {
            Coeffs::Rational(v) => v.len(),
            Coeffs::Gaussian(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn gauss(&self, i: usize) -> Gauss {
        match self {
            Coeffs::Rational(v) => Gauss::new(v[i].clone(), Q::zero()),
            Coeffs::Gaussian(v) => v[i].clone(),
        }
    }

    pub fn is_zero(&self, i: usize) -> bool {
        match self {
            Coeffs::Rational(v) => v[i].is_zero(),
            Coeffs::Gaussian(v) => v[i].is_zero(),
        }
    }

    /// `|γ_i|²`, exactly.
    pub fn norm_sqr(&self, i: usize) -> Q {
        match self {
            Coeffs::Rational(v) => &v[i] * &v[i],
            Coeffs::Gaussian(v) => v[i].norm_sqr(),
        }
    }

    pub fn to_complex(&self, i: usize, prec: usize) -> Complex {
        match self {
            Coeffs::Rational(v) => Complex::from_rational(&v[i], prec),
            Coeffs::Gaussian(v) => v[i].to_complex(prec),
        }
    }

    pub fn as_rational(&self) -> Option<&[Q]> {
        match self {
            Coeffs::Rational(v) => Some(v),
            Coeffs::Gaussian(_) => None,
        }
    }

    pub fn to_gaussian(&self) -> Vec<Gauss> {
        (0..self.len()).map(|i| self.gauss(i)).collect()
    }

    pub fn fmt_exact(&self, i: usize) -> String {
        match self {
            Coeffs::Rational(v) => fmt_q(&v[i]),
            Coeffs::Gaussian(v) => fmt_gauss(&v[i]),
        }
    }

    fn truncated(&self, n: usize) -> Coeffs {
        match self {
            Coeffs::Rational(v) => Coeffs::Rational(v[..n.min(v.len())].to_vec()),
            Coeffs::Gaussian(v) => Coeffs::Gaussian(v[..n.min(v.len())].to_vec()),
        }
    }

    fn extend_from(&mut self, full: Coeffs) {
        let start = self.len();
        match (self, full) {
            (Coeffs::Rational(a), Coeffs::Rational(b)) => a.extend(b.into_iter().skip(start)),
            (Coeffs::Gaussian(a), Coeffs::Gaussian(b)) => a.extend(b.into_iter().skip(start)),
            _ => unreachable!("a stream keeps its coefficient field"),
        }
    }

    fn map_index(&self, f: impl Fn(usize, &Gauss) -> Gauss, real: bool) -> Coeffs {
        let g: Vec<Gauss> = (0..self.len()).map(|i| f(i, &self.gauss(i))).collect();
        if real {
            Coeffs::Rational(g.into_iter().map(|z| z.re).collect())
        } else {
            Coeffs::Gaussian(g)
        }
    }
}

/// Lazily extended, deterministic coefficient sequence of a [`SeriesSpec`].
#[derive(Debug)]
pub struct CoefficientStream {
    spec: SeriesSpec,
    cache: Mutex<Coeffs>,
}

impl Clone for CoefficientStream {
    fn clone(&self) -> Self {
        CoefficientStream { spec: self.spec.clone(), cache: Mutex::new(self.cache.lock().expect("stream cache").clone()) }
    }
}

impl CoefficientStream {
    pub fn new(spec: SeriesSpec) -> Result<Self> {
        spec.validate()?;
        let empty = if spec.is_real() { Coeffs::Rational(Vec::new()) } else { Coeffs::Gaussian(Vec::new()) };
        Ok(CoefficientStream { spec, cache: Mutex::new(empty) })
    }

    pub fn spec(&self) -> &SeriesSpec {
        &self.spec
    }

    pub fn is_real(&self) -> bool {
        self.spec.is_real()
    }

    /// Number of coefficients available, for finite data.
    pub fn available(&self) -> Option<usize> {
        finite_len(&self.spec)
    }

    /// `γ_0..=γ_{n_max}`. Extending the cache never alters earlier values.
    pub fn coefficients(&self, n_max: usize) -> Result<Coeffs> {
        let need = n_max + 1;
        let mut cache = self.cache.lock().expect("stream cache");
        if cache.len() < need {
            let target = need.max(2 * cache.len());
            let target = finite_len(&self.spec).map_or(target, |l| target.min(l).max(need));
            let full = generate(&self.spec, target)?;
            cache.extend_from(full);
        }
        Ok(cache.truncated(need))
    }

    /// Rational coefficients, or an error for Gaussian streams.
    pub fn rational_coefficients(&self, n_max: usize) -> Result<Vec<Q>> {
        match self.coefficients(n_max)? {
            Coeffs::Rational(v) => Ok(v),
            Coeffs::Gaussian(_) => Err(Error::InvalidInput("stream has complex coefficients".into())),
        }
    }
}

fn finite_len(spec: &SeriesSpec) -> Option<usize> {
    match spec {
        SeriesSpec::ExplicitCoeffs { coeffs } => Some(coeffs.len()),
        SeriesSpec::Derivative { inner, order } => finite_len(inner).map(|l| l.saturating_sub(*order)),
        SeriesSpec::Rescale { inner, .. } | SeriesSpec::Section { inner, .. } => finite_len(inner),
        SeriesSpec::Sum { left, right } => match (finite_len(left), finite_len(right)) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        },
        _ => None,
    }
}

/// `coefficients` as a free function.
pub fn coefficients(spec: &SeriesSpec, n_max: usize) -> Result<Coeffs> {
    spec.validate()?;
    generate(spec, n_max + 1)
}

/// The first `n` coefficients.
fn generate(spec: &SeriesSpec, n: usize) -> Result<Coeffs> {
    let real = spec.is_real();
    Ok(match spec {
        SeriesSpec::ExplicitCoeffs { coeffs } => {
            if n > coeffs.len() {
                return Err(Error::HorizonExceedsData { requested: n, available: coeffs.len() });
            }
            Coeffs::Rational(coeffs[..n].to_vec())
        }
        SeriesSpec::RationalFunction { numerator, denominator } => Coeffs::Rational(unroll(numerator, denominator, n)?),
        SeriesSpec::FreeProduct { orders } => {
            let rep = growth_series(&FreeProductSpec::new(orders.clone())?);
            Coeffs::Rational(unroll(&rep.numerator, &rep.denominator, n)?)
        }
        SeriesSpec::OscillatingModel { set, a, b } => {
            let mut v: Vec<Gauss> = Vec::with_capacity(n);
            for i in 0..n {
                v.push(if i == 0 {
                    Gauss::one()
                } else if set.contains(i) {
                    &v[i - 1] * &a.0
                } else {
                    &v[i - 1] * &b.0
                });
            }
            if real {
                Coeffs::Rational(v.into_iter().map(|z| z.re).collect())
            } else {
                Coeffs::Gaussian(v)
            }
        }
        SeriesSpec::SqrtFixture => Coeffs::Rational(sqrt_fixture(n)),
        SeriesSpec::Derivative { inner, order } => {
            let base = generate(inner, n + order)?;
            base.truncated(n).map_index(
                |i, _| {
                    let falling = (i + 1..=i + order).fold(Q::one(), |acc, k| acc * Q::from_integer(k.into()));
                    base.gauss(i + order) * Gauss::new(falling, Q::zero())
                },
                real,
            )
        }
        SeriesSpec::Sum { left, right } => {
            let l = generate(left, n)?;
            let r = generate(right, n)?;
            l.map_index(|i, x| x + r.gauss(i), real)
        }
        SeriesSpec::Rescale { inner, c } => {
            let base = generate(inner, n)?;
            let mut pw = Q::one();
            let mut pows = Vec::with_capacity(n);
            for _ in 0..n {
                pows.push(pw.clone());
                pw *= c;
            }
            base.map_index(|i, x| x * Gauss::new(pows[i].clone(), Q::zero()), real)
        }
        SeriesSpec::Section { inner, subset } => {
            generate(inner, n)?.map_index(|i, x| if subset.contains(i) { x.clone() } else { Gauss::zero() }, real)
        }
    })
}

/// Linear-recurrence unrolling `d₀γₙ = Nₙ - Σ_{k≥1} d_k γ_{n-k}`.
/// Taylor coefficients of `num/den`. Works over the integers after clearing
/// denominators: `γ_i = g_i / d₀^{i+1}` with
/// `g_i = N_i d₀^i - Σ_k D_k g_{i-k} d₀^{k-1}`, so each term costs a single gcd.
pub(crate) fn unroll(num: &Poly<Q>, den: &Poly<Q>, n: usize) -> Result<Vec<Q>> {
    if den.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    if den.constant_term().is_zero() {
        return Err(Error::ZeroConstantTerm);
    }
    let l = lcm_denominators(num.coeffs().iter().chain(den.coeffs()));
    let scale = |p: &Poly<Q>| -> Vec<BigInt> { p.coeffs().iter().map(|c| (c * &l).to_integer()).collect() };
    let (nn, dd) = (scale(num), scale(den));
    let d0 = dd[0].clone();
    let span = dd.len().max(1);
    let pows: Vec<BigInt> = std::iter::successors(Some(BigInt::one()), |p| Some(p * &d0)).take(span).collect();
    let mut g: Vec<BigInt> = Vec::with_capacity(n);
    let mut out = Vec::with_capacity(n);
    let mut d0_pow = BigInt::one();
    for i in 0..n {
        let mut acc = nn.get(i).map_or_else(BigInt::zero, |c| c * &d0_pow);
        for k in 1..dd.len().min(i + 1) {
            if !dd[k].is_zero() {
                acc -= &dd[k] * &g[i - k] * &pows[k - 1];
            }
        }
        d0_pow *= &d0;
        out.push(Q::new(acc.clone(), d0_pow.clone()));
        g.push(acc);
    }
    Ok(out)
}

/// `γ_{2k} = γ_{2k+1} = C(2k, k)/4^k`.
fn sqrt_fixture(n: usize) -> Vec<Q> {
    let mut out = Vec::with_capacity(n);
    let mut c = Q::one();
    let mut k = 0usize;
    while out.len() < n {
        out.push(c.clone());
        if out.len() < n {
            out.push(c.clone());
        }
        c *= Q::new((2 * k + 1).into(), (2 * k + 2).into());
        k += 1;
    }
    out
}

/// Thresholds for the zero-coefficient rule.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroRule {
    /// Zeros are only counted beyond this index.
    pub after: usize,
    /// More than this many counted zeros means "infinitely many".
    pub max_zeros: usize,
}

impl Default for ZeroRule {
    fn default() -> Self {
        ZeroRule { after: 64, max_zeros: 4 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TamenessCertificate {
    pub u: f64,
    pub v: f64,
    /// `u²` and `v²`, exact.
    #[serde(with = "serde_q")]
    pub u_squared: Q,
    #[serde(with = "serde_q")]
    pub v_squared: Q,
    /// `u` and `v` themselves when the stream is rational.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u_exact: Option<crate::field::ExactQ>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v_exact: Option<crate::field::ExactQ>,
    pub n_p: usize,
    pub verified_up_to: usize,
}

pub fn certify_tameness(stream: &CoefficientStream, horizon: usize) -> Result<TamenessCertificate> {
    certify_tameness_with(stream, horizon, ZeroRule::default())
}

/// `u ≤ |γ_{n-1}/γ_n| ≤ v` for `N_P ≤ n ≤ horizon`, with `N_P` past the last zero.
pub fn certify_tameness_with(stream: &CoefficientStream, horizon: usize, rule: ZeroRule) -> Result<TamenessCertificate> {
    if horizon < 2 {
        return Err(Error::InvalidInput("tameness horizon must be at least 2".into()));
    }
    let c = stream.coefficients(horizon)?;
    let zeros: Vec<usize> = (0..=horizon).filter(|&i| c.is_zero(i)).collect();
    let late = zeros.iter().filter(|&&i| i > rule.after).count();
    if late > rule.max_zeros {
        return Err(Error::NotTame {
            reason: format!("{late} zero coefficients beyond index {}", rule.after),
            witness: *zeros.last().expect("nonempty"),
        });
    }
    let n_p = zeros.last().map_or(1, |&z| z + 2);
    if n_p + 1 > horizon {
        return Err(Error::NotTame { reason: "no nonzero run inside the horizon".into(), witness: horizon });
    }
    let norms: Vec<Q> = (0..=horizon).map(|i| c.norm_sqr(i)).collect();
    let ratios: Vec<Q> = (n_p..=horizon).map(|n| &norms[n - 1] / &norms[n]).collect();
    let u_sq = ratios.iter().min().expect("nonempty").clone();
    let v_sq = ratios.iter().max().expect("nonempty").clone();

    // ratios drifting monotonically by a large factor over the second half
    // of the window indicate γ_{n-1}/γ_n → 0 or ∞
    let half = &ratios[ratios.len() / 2..];
    if half.len() >= 8 {
        let inc = half.windows(2).all(|w| w[0] < w[1]);
        let dec = half.windows(2).all(|w| w[0] > w[1]);
        let first = half.first().expect("nonempty");
        let last = half.last().expect("nonempty");
        let drift = crate::field::log2_abs_q(&(last / first)).abs();
        if (inc || dec) && drift > 2.0 * 1.5f64.log2() {
            return Err(Error::NotTame { reason: "ratio moduli drift without bound".into(), witness: horizon });
        }
    }

    let exact_abs = |sq: &Q, pick_min: bool| -> Option<crate::field::ExactQ> {
        let v = c.as_rational()?;
        let vals = (n_p..=horizon).map(|n| (&v[n - 1] / &v[n]).abs());
        let x = if pick_min { vals.min() } else { vals.max() }?;
        debug_assert_eq!(&(&x * &x), sq);
        Some(crate::field::ExactQ(x))
    };
    Ok(TamenessCertificate {
        u: q_to_f64(&u_sq).sqrt(),
        v: q_to_f64(&v_sq).sqrt(),
        u_exact: exact_abs(&u_sq, true),
        v_exact: exact_abs(&v_sq, false),
        u_squared: u_sq,
        v_squared: v_sq,
        n_p,
        verified_up_to: horizon,
    })
}

fn q_to_f64(x: &Q) -> f64 {
    Real::from_rational(x, 64).to_f64()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RadiusMethod {
    /// Minimal pole modulus of an exact rational generating function.
    PoleModulus,
    /// `|a|^p |b|^(1-p)` for an oscillating model with density `p`.
    ModelDensity,
    /// Known closed form.
    ClosedForm,
    /// Windowed root-test estimates over the tail of the horizon.
    TailEstimate,
}

#[derive(Clone, Debug, Serialize)]
pub struct RadiusBounds {
    #[serde(rename = "r_P")]
    pub r_p: Real,
    pub r_p_error: Real,
    #[serde(rename = "R_P")]
    pub big_r_p: Real,
    pub big_r_p_error: Real,
    pub exact: bool,
    /// `r_P^k` as an exact rational, when known.
    pub r_power: Option<RadiusPower>,
    pub method: RadiusMethod,
}

impl RadiusBounds {
    fn exact(r: Real, power: Option<RadiusPower>, method: RadiusMethod) -> Self {
        let prec = r.prec();
        let err = &r * &Real::from_f64(hp::epsilon(prec), prec);
        RadiusBounds { r_p: r.clone(), r_p_error: err.clone(), big_r_p: r, big_r_p_error: err, exact: true, r_power: power, method }
    }
}

/// Estimates of `r_P = 1/limsup|γₙ|^{1/n}` and `R_P = 1/liminf|γₙ|^{1/n}`.
pub fn radius_bounds(stream: &CoefficientStream, horizon: usize) -> Result<RadiusBounds> {
    radius_bounds_prec(stream, horizon, hp::DEFAULT_PRECISION)
}

pub fn radius_bounds_prec(stream: &CoefficientStream, horizon: usize, prec: usize) -> Result<RadiusBounds> {
    if let Some(b) = radius_structural(stream.spec(), prec)? {
        return Ok(b);
    }
    tail_estimate(stream, horizon, prec)
}

fn radius_structural(spec: &SeriesSpec, prec: usize) -> Result<Option<RadiusBounds>> {
    if let Some(rep) = spec.as_rational() {
        if rep.denominator.deg() == 0 {
            return Err(Error::InvalidInput("polynomial series has infinite radius".into()));
        }
        let ps = poles::boundary_poles(&rep, prec)?;
        let mut b = RadiusBounds::exact(ps.r.with_prec(prec), ps.r_power.clone(), RadiusMethod::PoleModulus);
        b.exact = ps.r_power.is_some();
        b.r_p_error = ps.r_error.clone();
        b.big_r_p_error = ps.r_error;
        return Ok(Some(b));
    }
    Ok(match spec {
        SeriesSpec::SqrtFixture => {
            Some(RadiusBounds::exact(Real::one(prec), Some(RadiusPower { k: 1, value: Q::one() }), RadiusMethod::ClosedForm))
        }
        SeriesSpec::OscillatingModel { set, a, b } => {
            // with density p = j/h: r^{2h} = 1/(|a|^{2j} |b|^{2(h-j)})
            let p = set.density();
            let h: usize = p.denom().try_into().map_err(|_| Error::InvalidInput("density denominator too large".into()))?;
            let j: usize = p.numer().try_into().map_err(|_| Error::InvalidInput("density numerator too large".into()))?;
            let inv = a.0.norm_sqr().pow_f(j) * b.0.norm_sqr().pow_f(h - j);
            let value = inv.recip();
            let r = Real::from_rational(&value, prec + 32).nth_root(2 * h).with_prec(prec);
            Some(RadiusBounds::exact(r, Some(RadiusPower { k: 2 * h, value }), RadiusMethod::ModelDensity))
        }
        SeriesSpec::Derivative { inner, .. } => radius_structural(inner, prec)?,
        SeriesSpec::Rescale { inner, c } => radius_structural(inner, prec)?.map(|mut b| {
            let ac = Real::from_rational(&c.abs(), prec);
            b.r_p = &b.r_p / &ac;
            b.big_r_p = &b.big_r_p / &ac;
            b.r_p_error = &b.r_p_error / &ac;
            b.big_r_p_error = &b.big_r_p_error / &ac;
            b.r_power = b.r_power.map(|p| RadiusPower { value: &p.value / c.abs().pow_f(p.k), k: p.k });
            b
        }),
        _ => None,
    })
}

/// Windowed root test `(|γ_{n-w}|/|γ_n|)^{1/w}` over the second half of the horizon.
fn tail_estimate(stream: &CoefficientStream, horizon: usize, prec: usize) -> Result<RadiusBounds> {
    let horizon = stream.available().map_or(horizon, |l| horizon.min(l.saturating_sub(1)));
    if horizon < 16 {
        return Err(Error::HorizonExceedsData { requested: 16, available: horizon });
    }
    let c = stream.coefficients(horizon)?;
    let start = horizon / 2;
    if let Some(z) = (start / 2..=horizon).find(|&i| c.is_zero(i)) {
        return Err(Error::NotTame { reason: "zero coefficient in the tail".into(), witness: z });
    }
    let log_abs: Vec<f64> = (0..=horizon).map(|i| crate::field::log2_abs_q(&c.norm_sqr(i)) / 2.0).collect();
    let estimate = |w: usize| -> (f64, f64) {
        let vals: Vec<f64> = (start..=horizon).map(|n| 2f64.powf((log_abs[n - w] - log_abs[n]) / w as f64)).collect();
        (vals.iter().copied().fold(f64::INFINITY, f64::min), vals.iter().copied().fold(f64::NEG_INFINITY, f64::max))
    };
    let w = start / 2;
    let (lo, hi) = estimate(w);
    let (lo2, hi2) = estimate(w / 2);
    let err_lo = (lo - lo2).abs();
    let err_hi = (hi - hi2).abs();
    Ok(RadiusBounds {
        r_p: Real::from_f64(lo, prec),
        r_p_error: Real::from_f64(err_lo, prec),
        big_r_p: Real::from_f64(hi, prec),
        big_r_p_error: Real::from_f64(err_hi, prec),
        exact: false,
        r_power: None,
        method: RadiusMethod::TailEstimate,
    })
}

/// Reads `n,numerator,denominator` rows with `n = 0, 1, 2, ...`.
pub fn read_coeffs_csv<R: Read>(reader: R) -> Result<Vec<Q>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let want = ["n", "numerator", "denominator"];
    if headers.len() != 3 || headers.iter().zip(want).any(|(h, w)| h != w) {
        return Err(Error::Parse(format!(
            "expected header n,numerator,denominator, found {}",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut out = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let n: usize = rec[0].parse().map_err(|_| Error::Parse(format!("row {row}: bad index {:?}", &rec[0])))?;
        if n != out.len() {
            return Err(Error::Parse(format!("row {row}: expected n = {}, found {n}", out.len())));
        }
        let num: num_bigint::BigInt = rec[1].parse().map_err(|_| Error::Parse(format!("row {row}: bad numerator")))?;
        let den: num_bigint::BigInt = rec[2].parse().map_err(|_| Error::Parse(format!("row {row}: bad denominator")))?;
        if den.is_zero() {
            return Err(Error::Parse(format!("row {row}: zero denominator")));
        }
        out.push(Q::new(num, den));
    }
    if out.is_empty() {
        return Err(Error::Parse("coefficient file has no rows".into()));
    }
    Ok(out)
}

pub fn write_coeffs_csv<W: Write>(writer: W, coeffs: &[Q]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["n", "numerator", "denominator"])?;
    for (i, c) in coeffs.iter().enumerate() {
        w.write_record([i.to_string(), c.numer().to_string(), c.denom().to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{q, qi};
    use proptest::prelude::*;

    fn pq(c: &[i64]) -> Poly<Q> {
        Poly::new(c.iter().map(|&x| qi(x)).collect())
    }

    fn machi() -> SeriesSpec {
        SeriesSpec::FreeProduct { orders: vec![2, 3] }
    }

    fn osc(u: RationalSubset, a: i64, b: i64) -> SeriesSpec {
        SeriesSpec::OscillatingModel {
            set: IndexSet::Rational { subset: u },
            a: ExactGauss(Gauss::new(qi(a), qi(0))),
            b: ExactGauss(Gauss::new(qi(b), qi(0))),
        }
    }

    fn evens_from_2() -> RationalSubset {
        RationalSubset::new(2, [0], [], [0]).unwrap()
    }

    fn ints(c: &Coeffs) -> Vec<Q> {
        c.as_rational().unwrap().to_vec()
    }

    #[test]
    fn coefficient_examples() {
        assert_eq!(ints(&coefficients(&machi(), 7).unwrap()), [1, 4, 8, 14, 22, 34, 50, 74].map(qi).to_vec());
        let geo = SeriesSpec::rational(pq(&[1]), pq(&[1, -1]));
        assert_eq!(ints(&coefficients(&geo, 3).unwrap()), vec![qi(1); 4]);
        assert_eq!(ints(&coefficients(&osc(evens_from_2(), 2, 3), 4).unwrap()), [1, 3, 6, 18, 36].map(qi).to_vec());
    }

    #[test]
    fn sqrt_fixture_closed_form() {
        let c = ints(&coefficients(&SeriesSpec::SqrtFixture, 7).unwrap());
        assert_eq!(c, vec![qi(1), qi(1), q(1, 2), q(1, 2), q(3, 8), q(3, 8), q(5, 16), q(5, 16)]);
        // the square of the series is (1+t)/(1-t) = 1 + 2t + 2t² + ...
        let n = 40;
        let c = ints(&coefficients(&SeriesSpec::SqrtFixture, n).unwrap());
        for k in 0..=n {
            let s: Q = (0..=k).map(|i| &c[i] * &c[k - i]).sum();
            assert_eq!(s, if k == 0 { qi(1) } else { qi(2) }, "k={k}");
        }
    }

    #[test]
    fn validation_errors() {
        let bad = SeriesSpec::rational(pq(&[1]), pq(&[0, 1]));
        assert_eq!(CoefficientStream::new(bad).unwrap_err(), Error::ZeroConstantTerm);
        let zero_a = SeriesSpec::OscillatingModel {
            set: IndexSet::Squares,
            a: ExactGauss(Gauss::new(qi(0), qi(0))),
            b: ExactGauss(Gauss::new(qi(2), qi(0))),
        };
        assert_eq!(CoefficientStream::new(zero_a).unwrap_err(), Error::ZeroModelParameter("a"));
        assert!(CoefficientStream::new(SeriesSpec::FreeProduct { orders: vec![1] }).is_err());
        assert!(CoefficientStream::new(SeriesSpec::ExplicitCoeffs { coeffs: vec![] }).is_err());
        let short = CoefficientStream::new(SeriesSpec::ExplicitCoeffs { coeffs: vec![qi(1), qi(2)] }).unwrap();
        assert!(matches!(short.coefficients(5), Err(Error::HorizonExceedsData { .. })));
    }

    #[test]
    fn stream_cache_is_extend_only() {
        let s = CoefficientStream::new(machi()).unwrap();
        let a = s.coefficients(10).unwrap();
        let b = s.coefficients(40).unwrap();
        let c = s.coefficients(5).unwrap();
        assert_eq!(ints(&a)[..], ints(&b)[..11]);
        assert_eq!(ints(&c)[..], ints(&a)[..6]);
    }

    #[test]
    fn derivative_sum_rescale() {
        let geo = SeriesSpec::rational(pq(&[1]), pq(&[1, -1]));
        let d = coefficients(&geo.clone().derivative(2), 3).unwrap();
        assert_eq!(ints(&d), [2, 6, 12, 20].map(qi).to_vec());
        let s = coefficients(&geo.clone().plus(machi()), 3).unwrap();
        assert_eq!(ints(&s), [2, 5, 9, 15].map(qi).to_vec());
        let r = coefficients(&geo.rescaled(q(1, 2)), 3).unwrap();
        assert_eq!(ints(&r), vec![qi(1), q(1, 2), q(1, 4), q(1, 8)]);
    }

    #[test]
    fn complex_models_stay_exact() {
        let m = SeriesSpec::OscillatingModel {
            set: IndexSet::Rational { subset: RationalSubset::residue_class(2, 0) },
            a: ExactGauss(Gauss::new(qi(0), qi(1))),
            b: ExactGauss(Gauss::new(qi(2), qi(0))),
        };
        let c = coefficients(&m, 4).unwrap();
        assert!(matches!(c, Coeffs::Gaussian(_)));
        assert_eq!(c.gauss(4), Gauss::new(qi(-4), qi(0)));
        assert_eq!(c.gauss(3), Gauss::new(qi(0), qi(4)));
    }

    #[test]
    fn tameness_examples() {
        let s = CoefficientStream::new(machi()).unwrap();
        let cert = certify_tameness(&s, 100).unwrap();
        assert_eq!(cert.n_p, 1);
        // all ratios lie below their limits 5/7 and 7/10; the smallest is γ₀/γ₁
        assert_eq!(cert.u_exact.as_ref().unwrap().0, q(1, 4));
        assert!(cert.v < 5.0 / 7.0 && cert.v > 0.714);
        let geo = CoefficientStream::new(SeriesSpec::rational(pq(&[1]), pq(&[1, -1]))).unwrap();
        let g = certify_tameness(&geo, 50).unwrap();
        assert_eq!((g.u, g.v), (1.0, 1.0));
        let m = CoefficientStream::new(osc(RationalSubset::residue_class(2, 0), 2, 3)).unwrap();
        let mc = certify_tameness(&m, 60).unwrap();
        assert_eq!(mc.u_exact.unwrap().0, q(1, 3));
        assert_eq!(mc.v_exact.unwrap().0, q(1, 2));
    }

    #[test]
    fn tameness_rejections() {
        // even section of 1/(1-t): zeros forever
        let ev = CoefficientStream::new(SeriesSpec::rational(pq(&[1]), pq(&[1, 0, -1]))).unwrap();
        assert!(matches!(certify_tameness(&ev, 128), Err(Error::NotTame { .. })));
        // exp-like coefficients 1/n! have ratios n → ∞
        let mut c = vec![qi(1)];
        for n in 1..200 {
            let prev: Q = c[n - 1].clone();
            c.push(prev / qi(n as i64));
        }
        let e = CoefficientStream::new(SeriesSpec::ExplicitCoeffs { coeffs: c }).unwrap();
        assert!(matches!(certify_tameness(&e, 128), Err(Error::NotTame { .. })));
        // a few early zeros are fine
        let p = SeriesSpec::rational(pq(&[0, 0, 1]), pq(&[1, -2]));
        let cert = certify_tameness(&CoefficientStream::new(p).unwrap(), 64).unwrap();
        assert_eq!(cert.n_p, 3);
        assert_eq!(cert.u_exact.unwrap().0, q(1, 2));
    }

    #[test]
    fn radius_examples() {
        let s = CoefficientStream::new(machi()).unwrap();
        let b = radius_bounds(&s, 128).unwrap();
        assert!(b.exact);
        assert_eq!(b.r_power, Some(RadiusPower { k: 2, value: q(1, 2) }));
        assert!((b.r_p.to_f64() - 0.5f64.sqrt()).abs() < 1e-15);
        let geo = CoefficientStream::new(SeriesSpec::rational(pq(&[1]), pq(&[1, -1]))).unwrap();
        assert!((radius_bounds(&geo, 64).unwrap().r_p.to_f64() - 1.0).abs() < 1e-30);
        let m = CoefficientStream::new(osc(RationalSubset::residue_class(2, 0), 2, 3)).unwrap();
        let mb = radius_bounds(&m, 64).unwrap();
        assert!((1.0 / mb.r_p.to_f64() - 6f64.sqrt()).abs() < 1e-12);
        assert_eq!(mb.r_power, Some(RadiusPower { k: 2, value: q(1, 6) }));
        // complex parameters bypass the rational path
        let cm = SeriesSpec::OscillatingModel {
            set: IndexSet::Rational { subset: RationalSubset::residue_class(2, 0) },
            a: ExactGauss(Gauss::new(qi(0), qi(2))),
            b: ExactGauss(Gauss::new(qi(3), qi(0))),
        };
        let cb = radius_bounds(&CoefficientStream::new(cm).unwrap(), 64).unwrap();
        assert_eq!(cb.method, RadiusMethod::ModelDensity);
        assert_eq!(cb.r_power, Some(RadiusPower { k: 4, value: q(1, 36) }));
        let sqs = SeriesSpec::OscillatingModel {
            set: IndexSet::Squares,
            a: ExactGauss(Gauss::new(qi(2), qi(0))),
            b: ExactGauss(Gauss::new(qi(3), qi(0))),
        };
        let sb = radius_bounds(&CoefficientStream::new(sqs).unwrap(), 64).unwrap();
        assert_eq!(sb.r_power, Some(RadiusPower { k: 2, value: q(1, 9) }));
        let sq = CoefficientStream::new(SeriesSpec::SqrtFixture).unwrap();
        assert_eq!(radius_bounds(&sq, 64).unwrap().r_p.to_f64(), 1.0);
    }

    #[test]
    fn tail_estimate_brackets_true_radius() {
        let s = CoefficientStream::new(machi()).unwrap();
        let c = s.rational_coefficients(300).unwrap();
        let e = CoefficientStream::new(SeriesSpec::ExplicitCoeffs { coeffs: c }).unwrap();
        let b = radius_bounds(&e, 300).unwrap();
        assert!(!b.exact);
        let r = 0.5f64.sqrt();
        assert!((b.r_p.to_f64() - r).abs() < 0.02, "{}", b.r_p.to_f64());
        assert!((b.big_r_p.to_f64() - r).abs() < 0.02);
    }

    #[test]
    fn oscillating_model_is_rational_for_rational_sets() {
        let u = RationalSubset::new(4, [0, 1], [2], [4]).unwrap();
        let m = osc(u, 2, -3);
        let rep = m.as_rational().unwrap();
        let direct = ints(&coefficients(&m, 40).unwrap());
        assert_eq!(rep.taylor(41), direct);
    }

    #[test]
    fn csv_round_trip() {
        let c = vec![qi(1), q(-4, 3), qi(8)];
        let mut buf = Vec::new();
        write_coeffs_csv(&mut buf, &c).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "n,numerator,denominator\n0,1,1\n1,-4,3\n2,8,1\n");
        assert_eq!(read_coeffs_csv(&buf[..]).unwrap(), c);
        assert!(read_coeffs_csv("n,numerator,denominator\n1,1,1\n".as_bytes()).is_err());
        assert!(read_coeffs_csv("a,b,c\n0,1,1\n".as_bytes()).is_err());
        assert!(read_coeffs_csv("n,numerator,denominator\n0,1,0\n".as_bytes()).is_err());
    }

    #[test]
    fn spec_json_round_trip() {
        let s = machi().derivative(1).plus(SeriesSpec::rational(pq(&[1]), pq(&[1, -1])).rescaled(q(1, 3)));
        let j = serde_json::to_string(&s).unwrap();
        let back: SeriesSpec = serde_json::from_str(&j).unwrap();
        assert_eq!(back, s);
        let m: SeriesSpec = serde_json::from_str(
            r#"{"kind":"oscillating_model","set":{"type":"rational","subset":{"h":2,"residues":[0]}},"a":"2","b":{"re":"0","im":"1"}}"#,
        )
        .unwrap();
        assert!(!m.is_real());
        let sq: SeriesSpec = serde_json::from_str(r#"{"kind":"oscillating_model","set":{"type":"squares"},"a":2,"b":3}"#).unwrap();
        assert!(sq.as_rational().is_none());
    }

    /// Long division in increasing powers, the textbook oracle.
    fn long_division(num: &Poly<Q>, den: &Poly<Q>, n: usize) -> Vec<Q> {
        let mut rem: Vec<Q> = (0..n + den.deg() + 1).map(|i| num.coeff(i)).collect();
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let qk = &rem[k] / den.constant_term();
            for (j, d) in den.coeffs().iter().enumerate() {
                rem[k + j] -= &qk * d;
            }
            out.push(qk);
        }
        out
    }

    proptest! {
        #[test]
        fn recurrence_matches_long_division(
            num in prop::collection::vec(-5i64..6, 1..5),
            den in prop::collection::vec(-5i64..6, 1..6),
            d0 in 1i64..4,
        ) {
            let mut d = vec![d0];
            d.extend(den);
            let (n, d) = (pq(&num), pq(&d));
            let got = ints(&coefficients(&SeriesSpec::rational(n.clone(), d.clone()), 64).unwrap());
            prop_assert_eq!(got, long_division(&n, &d, 65));
        }

        #[test]
        fn repeated_calls_agree(n1 in 0usize..50, n2 in 0usize..50) {
            let s = CoefficientStream::new(osc(RationalSubset::residue_class(3, 1), 2, 5)).unwrap();
            let a = ints(&s.coefficients(n1).unwrap());
            let b = ints(&s.coefficients(n2).unwrap());
            let m = n1.min(n2) + 1;
            prop_assert_eq!(&a[..m], &b[..m]);
        }

        #[test]
        fn certificate_bounds_hold(a in 1i64..6, b in 1i64..6, h in 1usize..5) {
            let s = CoefficientStream::new(osc(RationalSubset::residue_class(h, 0), a, b)).unwrap();
            let cert = certify_tameness(&s, 64).unwrap();
            prop_assert!(cert.u <= cert.v);
            let c = ints(&s.coefficients(64).unwrap());
            for n in cert.n_p..=64 {
                let r = (&c[n - 1] / &c[n]).abs();
                prop_assert!(r >= cert.u_exact.clone().unwrap().0 && r <= cert.v_exact.clone().unwrap().0);
            }
        }
    }
}
