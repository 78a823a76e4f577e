//! High-precision real and complex floating point values.
//!
//! Thin wrappers over `astro_float::BigFloat` that carry their working
//! precision so they can be combined with ordinary operators. Binary
//! operations run at the larger precision of the two operands.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

const RM: RoundingMode = RoundingMode::ToEven;

/// Default working precision in bits.
pub const DEFAULT_PRECISION: usize = 256;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constants cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Relative unit roundoff at `prec` bits, as an `f64` (may underflow to 0 for huge precisions).
pub fn epsilon(prec: usize) -> f64 {
    2f64.powi(-(prec.min(1070) as i32))
}

fn to_u32_words(m: &[u64]) -> Vec<u32> {
    m.iter().flat_map(|w| [*w as u32, (*w >> 32) as u32]).collect()
}

#[derive(Clone)]
pub struct Real {
    v: BigFloat,
    prec: usize,
}

impl Real {
    pub fn zero(prec: usize) -> Self {
        Real { v: BigFloat::from_u64(0, prec), prec }
    }

    pub fn one(prec: usize) -> Self {
        Real { v: BigFloat::from_u64(1, prec), prec }
    }

    pub fn from_i64(x: i64, prec: usize) -> Self {
        Real { v: BigFloat::from_i64(x, prec), prec }
    }

    pub fn from_f64(x: f64, prec: usize) -> Self {
        Real { v: BigFloat::from_f64(x, prec), prec }
    }

    pub fn from_bigint(x: &BigInt, prec: usize) -> Self {
        if x.is_zero() {
            return Real::zero(prec);
        }
        let words = x.magnitude().to_u64_digits();
        let sign = if x.is_negative() { Sign::Neg } else { Sign::Pos };
        let exact = BigFloat::from_words(&words, sign, (64 * words.len()) as i32);
        let mut v = exact;
        if v.precision().unwrap_or(0) > prec {
            v.set_precision(prec, RM).expect("precision change");
        }
        Real { v, prec }
    }

    pub fn from_rational(q: &BigRational, prec: usize) -> Self {
        let n = Real::from_bigint(q.numer(), prec + 64);
        let d = Real::from_bigint(q.denom(), prec + 64);
        Real { v: n.v.div(&d.v, prec, RM), prec }
    }

    pub fn prec(&self) -> usize {
        self.prec
    }

    pub fn with_prec(&self, prec: usize) -> Self {
        let mut v = self.v.clone();
        v.set_precision(prec, RM).expect("precision change");
        Real { v, prec }
    }

    pub fn pi(prec: usize) -> Self {
        Real { v: with_consts(|cc| cc.pi(prec, RM)), prec }
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.v.is_negative() && !self.v.is_zero()
    }

    pub fn abs(&self) -> Self {
        Real { v: self.v.abs(), prec: self.prec }
    }

    pub fn sqrt(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Real { v: self.v.sqrt(self.prec, RM), prec: self.prec }
    }

    pub fn powi(&self, n: usize) -> Self {
        if n == 0 {
            return Real::one(self.prec);
        }
        Real { v: self.v.powi(n, self.prec, RM), prec: self.prec }
    }

    /// Positive real `n`-th root of a positive value.
    pub fn nth_root(&self, n: usize) -> Self {
        assert!(n >= 1);
        if n == 1 || self.is_zero() {
            return self.clone();
        }
        if n == 2 {
            return self.sqrt();
        }
        let p = self.prec + 32;
        let x = self.abs().with_prec(p);
        let l = x.log2_abs() / n as f64;
        let mut y = if l.abs() < 1000.0 {
            Real::from_f64(2f64.powf(l), p)
        } else {
            let e = BigFloat::from_u64(1, p).div(&BigFloat::from_u64(n as u64, p), p, RM);
            Real { v: with_consts(|cc| x.v.pow(&e, p, RM, cc)), prec: p }
        };
        // Newton doubles the correct bits from the ~50 of the f64 seed
        let nn = Real::from_i64(n as i64, p);
        let n1 = Real::from_i64(n as i64 - 1, p);
        let mut bits = 40usize;
        loop {
            y = &(&(&n1 * &y) + &(&x / &y.powi(n - 1))) / &nn;
            if bits >= p + 8 {
                break;
            }
            bits *= 2;
        }
        y.with_prec(self.prec)
    }

    pub fn cos(&self) -> Self {
        Real { v: with_consts(|cc| self.v.cos(self.prec, RM, cc)), prec: self.prec }
    }

    pub fn sin(&self) -> Self {
        Real { v: with_consts(|cc| self.v.sin(self.prec, RM, cc)), prec: self.prec }
    }

    pub fn atan(&self) -> Self {
        Real { v: with_consts(|cc| self.v.atan(self.prec, RM, cc)), prec: self.prec }
    }

    /// Four-quadrant arctangent of `y/x`.
    pub fn atan2(y: &Real, x: &Real) -> Real {
        let prec = y.prec.max(x.prec);
        if x.is_zero() {
            let half_pi = &Real::pi(prec) / &Real::from_i64(2, prec);
            return if y.is_negative() {
                -half_pi
            } else if y.is_zero() {
                Real::zero(prec)
            } else {
                half_pi
            };
        }
        let base = (y / x).atan();
        if !x.is_negative() {
            base
        } else if y.is_negative() {
            &base - &Real::pi(prec)
        } else {
            &base + &Real::pi(prec)
        }
    }

    /// Approximate `log2 |x|`; `-inf` for zero.
    pub fn log2_abs(&self) -> f64 {
        match self.v.as_raw_parts() {
            Some((m, _, _, e, _)) if !self.v.is_zero() => {
                let top = *m.last().unwrap_or(&0);
                if top == 0 {
                    return f64::NEG_INFINITY;
                }
                e as f64 + ((top as f64) / 2f64.powi(64)).log2()
            }
            _ => f64::NEG_INFINITY,
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.v.is_zero() {
            return 0.0;
        }
        let l = self.log2_abs();
        if l > 1023.0 {
            return if self.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY };
        }
        if l < -1074.0 {
            return 0.0;
        }
        let (m, _, s, e, _) = self.v.as_raw_parts().expect("finite value");
        let top = *m.last().unwrap_or(&0) as f64;
        let below = if m.len() >= 2 { m[m.len() - 2] as f64 / 2f64.powi(64) } else { 0.0 };
        let mag = (top + below) * 2f64.powi(e - 64);
        if s == Sign::Neg {
            -mag
        } else {
            mag
        }
    }

    /// Scientific notation with `digits` significant decimal digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let s = format!("{}", self.v);
        // astro-float prints "[-]d.ddd...e[+-]x"
        let (mant, exp) = match s.split_once('e') {
            Some((m, e)) => (m.to_string(), e.to_string()),
            None => (s.clone(), "+0".to_string()),
        };
        let neg = mant.starts_with('-');
        let body: String = mant.trim_start_matches('-').chars().filter(|c| *c != '.').collect();
        let kept: String = body.chars().take(digits.max(1)).collect();
        let (lead, rest) = kept.split_at(1);
        let rest = rest.trim_end_matches('0');
        let sign = if neg { "-" } else { "" };
        let exp_val: i64 = exp.trim_start_matches('+').parse().unwrap_or(0);
        if rest.is_empty() {
            format!("{sign}{lead}e{exp_val}")
        } else {
            format!("{sign}{lead}.{rest}e{exp_val}")
        }
    }

    /// Exact rational value of the binary float.
    pub fn to_rational(&self) -> BigRational {
        if self.v.is_zero() {
            return BigRational::zero();
        }
        let (m, _, s, e, _) = self.v.as_raw_parts().expect("finite value");
        let mut int = BigInt::from_biguint(num_bigint::Sign::Plus, num_bigint::BigUint::from_slice(&to_u32_words(m)));
        if s == Sign::Neg {
            int = -int;
        }
        let shift = e as i64 - 64 * m.len() as i64;
        if shift >= 0 {
            BigRational::from_integer(int << shift as usize)
        } else {
            BigRational::new(int, BigInt::from(1) << (-shift) as usize)
        }
    }

    pub fn cmp_to(&self, other: &Real) -> Ordering {
        match self.v.cmp(&other.v) {
            Some(c) if c < 0 => Ordering::Less,
            Some(c) if c > 0 => Ordering::Greater,
            _ => Ordering::Equal,
        }
    }

    pub fn max(&self, other: &Real) -> Real {
        if self.cmp_to(other) == Ordering::Less {
            other.clone()
        } else {
            self.clone()
        }
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(30))
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(40))
    }
}

macro_rules! real_binop {
    ($tr:ident, $m:ident, $call:ident) => {
        impl $tr<&Real> for &Real {
            type Output = Real;
            fn $m(self, o: &Real) -> Real {
                let p = self.prec.max(o.prec);
                Real { v: self.v.$call(&o.v, p, RM), prec: p }
            }
        }
        impl $tr<Real> for Real {
            type Output = Real;
            fn $m(self, o: Real) -> Real {
                (&self).$m(&o)
            }
        }
        impl $tr<&Real> for Real {
            type Output = Real;
            fn $m(self, o: &Real) -> Real {
                (&self).$m(o)
            }
        }
    };
}

real_binop!(Add, add, add);
real_binop!(Sub, sub, sub);
real_binop!(Mul, mul, mul);
real_binop!(Div, div, div);

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real { v: BigFloat::neg(&self.v), prec: self.prec }
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real { v: BigFloat::neg(&self.v), prec: self.prec }
    }
}

/// High-precision complex number in rectangular form.
#[derive(Clone)]
pub struct Complex {
    pub re: Real,
    pub im: Real,
}

impl Complex {
    pub fn new(re: Real, im: Real) -> Self {
        Complex { re, im }
    }

    pub fn zero(prec: usize) -> Self {
        Complex { re: Real::zero(prec), im: Real::zero(prec) }
    }

    pub fn one(prec: usize) -> Self {
        Complex { re: Real::one(prec), im: Real::zero(prec) }
    }

    pub fn from_real(re: Real) -> Self {
        let p = re.prec();
        Complex { re, im: Real::zero(p) }
    }

    pub fn from_rational(q: &BigRational, prec: usize) -> Self {
        Complex::from_real(Real::from_rational(q, prec))
    }

    pub fn from_f64(re: f64, im: f64, prec: usize) -> Self {
        Complex { re: Real::from_f64(re, prec), im: Real::from_f64(im, prec) }
    }

    pub fn prec(&self) -> usize {
        self.re.prec().max(self.im.prec())
    }

    pub fn with_prec(&self, prec: usize) -> Self {
        Complex { re: self.re.with_prec(prec), im: self.im.with_prec(prec) }
    }

    /// `exp(2πi k / n)`.
    pub fn root_of_unity(k: i64, n: usize, prec: usize) -> Self {
        let p = prec + 16;
        let k = k.rem_euclid(n as i64);
        let angle = &(&Real::pi(p) * &Real::from_i64(2 * k, p)) / &Real::from_i64(n as i64, p);
        Complex { re: angle.cos().with_prec(prec), im: angle.sin().with_prec(prec) }
    }

    pub fn from_polar(modulus: &Real, angle: &Real) -> Self {
        Complex { re: modulus * &angle.cos(), im: modulus * &angle.sin() }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Complex { re: self.re.clone(), im: -&self.im }
    }

    pub fn norm_sqr(&self) -> Real {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }

    pub fn abs(&self) -> Real {
        self.norm_sqr().sqrt()
    }

    pub fn arg(&self) -> Real {
        Real::atan2(&self.im, &self.re)
    }

    /// `log2 |z|`, cheap and approximate.
    pub fn log2_abs(&self) -> f64 {
        let a = self.re.log2_abs();
        let b = self.im.log2_abs();
        let m = a.max(b);
        if m == f64::NEG_INFINITY {
            return m;
        }
        m + 0.5 * (1.0 + 2f64.powf(2.0 * (a.min(b) - m))).log2()
    }

    pub fn abs_f64(&self) -> f64 {
        2f64.powf(self.log2_abs())
    }

    pub fn powi(&self, n: usize) -> Self {
        let mut result = Complex::one(self.prec());
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        result
    }

    pub fn inv(&self) -> Self {
        let d = self.norm_sqr();
        Complex { re: &self.re / &d, im: -(&self.im / &d) }
    }

    /// Principal `n`-th root.
    pub fn principal_root(&self, n: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        if self.im.is_zero() && !self.re.is_negative() {
            return Complex::from_real(self.re.nth_root(n));
        }
        let p = self.prec();
        let m = self.abs().nth_root(n);
        let a = &self.arg() / &Real::from_i64(n as i64, p);
        Complex::from_polar(&m, &a)
    }

    pub fn scale(&self, r: &Real) -> Self {
        Complex { re: &self.re * r, im: &self.im * r }
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn to_decimal(&self, digits: usize) -> String {
        if self.im.is_zero() {
            self.re.to_decimal(digits)
        } else {
            let sign = if self.im.is_negative() { "-" } else { "+" };
            format!("{} {} {}i", self.re.to_decimal(digits), sign, self.im.abs().to_decimal(digits))
        }
    }
}

impl fmt::Debug for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(25))
    }
}

impl fmt::Display for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(40))
    }
}

impl Add<&Complex> for &Complex {
    type Output = Complex;
    fn add(self, o: &Complex) -> Complex {
        Complex { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl Sub<&Complex> for &Complex {
    type Output = Complex;
    fn sub(self, o: &Complex) -> Complex {
        Complex { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl Mul<&Complex> for &Complex {
    type Output = Complex;
    fn mul(self, o: &Complex) -> Complex {
        Complex { re: &(&self.re * &o.re) - &(&self.im * &o.im), im: &(&self.re * &o.im) + &(&self.im * &o.re) }
    }
}

impl Div<&Complex> for &Complex {
    type Output = Complex;
    fn div(self, o: &Complex) -> Complex {
        if o.im.is_zero() {
            return Complex { re: &self.re / &o.re, im: &self.im / &o.re };
        }
        self * &o.inv()
    }
}

impl Neg for &Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        Complex { re: -&self.re, im: -&self.im }
    }
}

macro_rules! complex_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Complex> for Complex {
            type Output = Complex;
            fn $m(self, o: Complex) -> Complex {
                (&self).$m(&o)
            }
        }
        impl $tr<&Complex> for Complex {
            type Output = Complex;
            fn $m(self, o: &Complex) -> Complex {
                (&self).$m(o)
            }
        }
    };
}

complex_owned!(Add, add);
complex_owned!(Sub, sub);
complex_owned!(Mul, mul);
complex_owned!(Div, div);

impl Neg for Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        -&self
    }
}

/// Horner evaluation of ascending coefficients at `z`.
pub fn horner(coeffs: &[Complex], z: &Complex) -> Complex {
    let mut acc = Complex::zero(z.prec());
    for c in coeffs.iter().rev() {
        acc = &(&acc * z) + c;
    }
    acc
}

/// Distance `|a - b|` as `f64` (cheap upper-level diagnostics).
pub fn dist_f64(a: &Complex, b: &Complex) -> f64 {
    (a - b).abs_f64()
}

/// Decimal digits that a `prec`-bit value carries meaningfully.
pub fn significant_digits(prec: usize) -> usize {
    (prec as f64 * std::f64::consts::LOG10_2).floor().max(1.0) as usize
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_decimal(significant_digits(self.prec)))
    }
}

impl Serialize for Complex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Complex", 2)?;
        st.serialize_field("re", &self.re)?;
        st.serialize_field("im", &self.im)?;
        st.end()
    }
}
