//! Exact scalar fields used by the polynomial and matrix code.
//!
//! Three fields are needed: the rationals, the Gaussian rationals (complex
//! oscillating models) and real cyclotomic fields (stratification labels
//! with irrational coefficients, see [`crate::numfield`]).

use std::fmt::Debug;

use num_bigint::BigInt;
use num_complex::Complex as NumComplex;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::hp;

pub type Q = BigRational;
pub type Gauss = NumComplex<BigRational>;

pub trait Field: Clone + PartialEq + Debug + Send + Sync + 'static {
    fn zero_f() -> Self;
    fn one_f() -> Self;
    fn is_zero_f(&self) -> bool;
    fn add_f(&self, o: &Self) -> Self;
    fn sub_f(&self, o: &Self) -> Self;
    fn mul_f(&self, o: &Self) -> Self;
    /// Panics on division by zero; callers check first.
    fn div_f(&self, o: &Self) -> Self;
    fn neg_f(&self) -> Self;
    fn from_q(q: &Q) -> Self;
    fn to_complex(&self, prec: usize) -> hp::Complex;

    fn is_one_f(&self) -> bool {
        self.sub_f(&Self::one_f()).is_zero_f()
    }

    fn inv_f(&self) -> Self {
        Self::one_f().div_f(self)
    }

    fn from_i64(n: i64) -> Self {
        Self::from_q(&Q::from_integer(n.into()))
    }

    fn pow_f(&self, mut e: usize) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one_f();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_f(&base);
            }
            base = base.mul_f(&base);
            e >>= 1;
        }
        acc
    }

    /// `Some(q)` when the element is rational.
    fn as_q(&self) -> Option<Q>;

    /// Sign of a real element, decided exactly where possible.
    fn real_sign(&self) -> Option<std::cmp::Ordering>;

    /// Exact textual form.
    fn fmt_exact(&self) -> String;
}

impl Field for Q {
    fn zero_f() -> Self {
        Zero::zero()
    }
    fn one_f() -> Self {
        One::one()
    }
    fn is_zero_f(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_f(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_f(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_f(&self, o: &Self) -> Self {
        self * o
    }
    fn div_f(&self, o: &Self) -> Self {
        self / o
    }
    fn neg_f(&self) -> Self {
        -self
    }
    fn from_q(q: &Q) -> Self {
        q.clone()
    }
    fn to_complex(&self, prec: usize) -> hp::Complex {
        hp::Complex::from_rational(self, prec)
    }
    fn as_q(&self) -> Option<Q> {
        Some(self.clone())
    }
    fn real_sign(&self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(&Q::zero()))
    }
    fn fmt_exact(&self) -> String {
        fmt_q(self)
    }
}

impl Field for Gauss {
    fn zero_f() -> Self {
        Gauss::new(Q::zero(), Q::zero())
    }
    fn one_f() -> Self {
        Gauss::new(Q::one(), Q::zero())
    }
    fn is_zero_f(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn add_f(&self, o: &Self) -> Self {
        Gauss::new(&self.re + &o.re, &self.im + &o.im)
    }
    fn sub_f(&self, o: &Self) -> Self {
        Gauss::new(&self.re - &o.re, &self.im - &o.im)
    }
    fn mul_f(&self, o: &Self) -> Self {
        Gauss::new(&self.re * &o.re - &self.im * &o.im, &self.re * &o.im + &self.im * &o.re)
    }
    fn div_f(&self, o: &Self) -> Self {
        if self.im.is_zero() && o.im.is_zero() {
            return Gauss::new(&self.re / &o.re, Q::zero());
        }
        let d = &o.re * &o.re + &o.im * &o.im;
        let re = (&self.re * &o.re + &self.im * &o.im) / &d;
        let im = (&self.im * &o.re - &self.re * &o.im) / &d;
        Gauss::new(re, im)
    }
    fn neg_f(&self) -> Self {
        Gauss::new(-&self.re, -&self.im)
    }
    fn from_q(q: &Q) -> Self {
        Gauss::new(q.clone(), Q::zero())
    }
    fn to_complex(&self, prec: usize) -> hp::Complex {
        hp::Complex::new(hp::Real::from_rational(&self.re, prec), hp::Real::from_rational(&self.im, prec))
    }
    fn as_q(&self) -> Option<Q> {
        self.im.is_zero().then(|| self.re.clone())
    }
    fn real_sign(&self) -> Option<std::cmp::Ordering> {
        self.as_q().map(|q| q.cmp(&Q::zero()))
    }
    fn fmt_exact(&self) -> String {
        fmt_gauss(self)
    }
}

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Parses `"p/q"`, integers and finite decimals (`"-0.25"`, `"1e-3"`) exactly.
pub fn parse_rational(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not an exact rational: {s:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Q::new(n, d));
    }
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int_part, frac_part) = mant.split_once('.').unwrap_or((mant, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let n: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().map_err(|_| bad())? };
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut v = if scale >= 0 {
        Q::from_integer(n * num_traits::pow(ten, scale as usize))
    } else {
        Q::new(n, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        v = -v;
    }
    Ok(v)
}

/// Renders `p/q`, or just `p` for integers.
pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn fmt_gauss(z: &Gauss) -> String {
    if z.im.is_zero() {
        fmt_q(&z.re)
    } else if z.re.is_zero() {
        format!("{}i", fmt_q(&z.im))
    } else if z.im.is_negative() {
        format!("{}-{}i", fmt_q(&z.re), fmt_q(&-&z.im))
    } else {
        format!("{}+{}i", fmt_q(&z.re), fmt_q(&z.im))
    }
}

/// Simplest rational (smallest denominator, then numerator) in the closed
/// interval `[lo, hi]`, by the continued-fraction descent.
pub fn simplest_between(lo: &Q, hi: &Q) -> Q {
    assert!(lo <= hi);
    if lo.is_negative() && hi.is_positive() || lo.is_zero() || hi.is_zero() {
        return Q::zero();
    }
    if hi.is_negative() {
        return -simplest_between(&-hi, &-lo);
    }
    let fl = lo.floor();
    if fl == *lo {
        return lo.clone();
    }
    if fl.clone() + Q::one() <= *hi {
        return fl + Q::one();
    }
    // same integer part: recurse on reciprocals of the fractional parts
    let a = &fl;
    let inner = simplest_between(&(hi - a).recip(), &(lo - a).recip());
    a + inner.recip()
}

/// Rational reconstruction of an approximation: the simplest rational within
/// `radius` of `x`, accepted only if its denominator is at most `max_den`.
pub fn reconstruct(x: &Q, radius: &Q, max_den: u64) -> Option<Q> {
    let cand = simplest_between(&(x - radius), &(x + radius));
    (cand.denom() <= &BigInt::from(max_den)).then_some(cand)
}

/// `log2 |x|` for a rational, approximately; `-inf` for zero.
pub fn log2_abs_q(x: &Q) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    log2_abs_int(x.numer()) - log2_abs_int(x.denom())
}

fn log2_abs_int(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 60 {
        return (n.magnitude().to_u64_digits().first().copied().unwrap_or(0) as f64).log2();
    }
    let shifted: BigInt = n.abs() >> (bits - 60) as usize;
    (shifted.magnitude().to_u64_digits()[0] as f64).log2() + (bits - 60) as f64
}

pub fn lcm_denominators<'a>(xs: impl IntoIterator<Item = &'a Q>) -> BigInt {
    xs.into_iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// JSON form of an exact rational: `{"num": "...", "den": "..."}`.
///
/// Deserialization also accepts a bare string (`"5/7"`, `"0.5"`) or an integer.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExactQ(pub Q);

#[derive(Serialize, Deserialize)]
struct NumDen {
    num: String,
    den: String,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum QInput {
    Pair(NumDen),
    Text(String),
    Int(i64),
}

impl Serialize for ExactQ {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        NumDen { num: self.0.numer().to_string(), den: self.0.denom().to_string() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExactQ {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let parsed = match QInput::deserialize(d)? {
            QInput::Pair(p) => parse_rational(&format!("{}/{}", p.num, p.den)),
            QInput::Text(t) => parse_rational(&t),
            QInput::Int(i) => Ok(qi(i)),
        };
        parsed.map(ExactQ).map_err(serde::de::Error::custom)
    }
}

/// Serde adapters for fields typed as [`Q`] and `Vec<Q>`.
pub mod serde_q {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        ExactQ(x.clone()).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        ExactQ::deserialize(d).map(|e| e.0)
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(xs: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
            s.collect_seq(xs.iter().map(|x| ExactQ(x.clone())))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Q>, D::Error> {
            Vec::<ExactQ>::deserialize(d).map(|v| v.into_iter().map(|e| e.0).collect())
        }
    }
}

/// JSON form of a Gaussian rational: a plain rational, or `{"re": .., "im": ..}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactGauss(pub Gauss);

#[derive(Serialize, Deserialize)]
struct ReIm {
    re: ExactQ,
    #[serde(default = "zero_q")]
    im: ExactQ,
}

fn zero_q() -> ExactQ {
    ExactQ(Q::zero())
}

#[derive(Deserialize)]
#[serde(untagged)]
enum GaussInput {
    Complex(ReIm),
    Real(ExactQ),
}

impl Serialize for ExactGauss {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.im.is_zero() {
            ExactQ(self.0.re.clone()).serialize(s)
        } else {
            ReIm { re: ExactQ(self.0.re.clone()), im: ExactQ(self.0.im.clone()) }.serialize(s)
        }
    }
}

impl<'de> Deserialize<'de> for ExactGauss {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(ExactGauss(match GaussInput::deserialize(d)? {
            GaussInput::Complex(c) => Gauss::new(c.re.0, c.im.0),
            GaussInput::Real(r) => Gauss::new(r.0, Q::zero()),
        }))
    }
}
