//! Dense univariate polynomials over an exact field, ascending coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::{ExactGauss, ExactQ, Field, Gauss, Q};
use crate::hp;

#[derive(Clone, PartialEq, Debug)]
pub struct Poly<F: Field> {
    c: Vec<F>,
}

impl<F: Field> Poly<F> {
    pub fn new(mut c: Vec<F>) -> Self {
        while c.last().is_some_and(|x| x.is_zero_f()) {
            c.pop();
        }
        Poly { c }
    }

    pub fn zero() -> Self {
        Poly { c: Vec::new() }
    }

    pub fn one() -> Self {
        Poly { c: vec![F::one_f()] }
    }

    pub fn constant(x: F) -> Self {
        Poly::new(vec![x])
    }

    /// `x · t^k`
    pub fn monomial(k: usize, x: F) -> Self {
        let mut c = vec![F::zero_f(); k + 1];
        c[k] = x;
        Poly::new(c)
    }

    /// `1 - a·t^k`
    pub fn one_minus(a: F, k: usize) -> Self {
        &Poly::one() - &Poly::monomial(k, a)
    }

    pub fn from_q(c: &[Q]) -> Self {
        Poly::new(c.iter().map(F::from_q).collect())
    }

    pub fn coeffs(&self) -> &[F] {
        &self.c
    }

    pub fn into_coeffs(self) -> Vec<F> {
        self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0.
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn coeff(&self, i: usize) -> F {
        self.c.get(i).cloned().unwrap_or_else(F::zero_f)
    }

    pub fn lead(&self) -> F {
        self.c.last().cloned().unwrap_or_else(F::zero_f)
    }

    pub fn constant_term(&self) -> F {
        self.coeff(0)
    }

    pub fn scale(&self, x: &F) -> Self {
        Poly::new(self.c.iter().map(|a| a.mul_f(x)).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lead().inv_f())
    }

    /// Scales so the constant term is 1; `None` if the constant term is zero.
    pub fn normalize_constant(&self) -> Option<Self> {
        let c0 = self.constant_term();
        (!c0.is_zero_f()).then(|| self.scale(&c0.inv_f()))
    }

    /// Multiplies by `t^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = vec![F::zero_f(); k];
        c.extend(self.c.iter().cloned());
        Poly { c }
    }

    /// Keeps terms of degree `< n`.
    pub fn truncate(&self, n: usize) -> Self {
        Poly::new(self.c.iter().take(n).cloned().collect())
    }

    pub fn eval(&self, x: &F) -> F {
        self.c.iter().rev().fold(F::zero_f(), |acc, a| acc.mul_f(x).add_f(a))
    }

    pub fn eval_complex(&self, z: &hp::Complex) -> hp::Complex {
        let prec = z.prec();
        let cs: Vec<hp::Complex> = self.c.iter().map(|a| a.to_complex(prec)).collect();
        hp::horner(&cs, z)
    }

    pub fn to_complex_coeffs(&self, prec: usize) -> Vec<hp::Complex> {
        self.c.iter().map(|a| a.to_complex(prec)).collect()
    }

    pub fn derivative(&self) -> Self {
        Poly::new(self.c.iter().enumerate().skip(1).map(|(i, a)| a.mul_f(&F::from_i64(i as i64))).collect())
    }

    /// `t^d p(1/t)`; `d` must be at least the degree.
    pub fn reverse(&self, d: usize) -> Self {
        assert!(self.degree().is_none_or(|k| k <= d), "reversal degree below polynomial degree");
        let mut c = vec![F::zero_f(); d + 1];
        for (i, a) in self.c.iter().enumerate() {
            c[d - i] = a.clone();
        }
        Poly::new(c)
    }

    /// `p(x·t)`
    pub fn compose_scale(&self, x: &F) -> Self {
        let mut pw = F::one_f();
        let mut out = Vec::with_capacity(self.c.len());
        for a in &self.c {
            out.push(a.mul_f(&pw));
            pw = pw.mul_f(x);
        }
        Poly::new(out)
    }

    /// `p(t^h)`
    pub fn subst_power(&self, h: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = vec![F::zero_f(); (self.c.len() - 1) * h + 1];
        for (i, a) in self.c.iter().enumerate() {
            c[i * h] = a.clone();
        }
        Poly::new(c)
    }

    /// General composition `p(q(t))`.
    pub fn compose(&self, q: &Poly<F>) -> Self {
        self.c.iter().rev().fold(Poly::zero(), |acc, a| &(&acc * q) + &Poly::constant(a.clone()))
    }

    pub fn pow(&self, k: usize) -> Self {
        (0..k).fold(Poly::one(), |acc, _| &acc * self)
    }

    pub fn divrem(&self, d: &Poly<F>) -> Result<(Poly<F>, Poly<F>)> {
        let dd = d.degree().ok_or(Error::ZeroDenominator)?;
        let Some(nd) = self.degree() else {
            return Ok((Poly::zero(), Poly::zero()));
        };
        if nd < dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let inv_lead = d.lead().inv_f();
        let mut r = self.c.clone();
        let mut q = vec![F::zero_f(); nd - dd + 1];
        for k in (0..=nd - dd).rev() {
            let coef = r[k + dd].mul_f(&inv_lead);
            if coef.is_zero_f() {
                continue;
            }
            for (j, b) in d.c.iter().enumerate() {
                r[k + j] = r[k + j].sub_f(&coef.mul_f(b));
            }
            q[k] = coef;
        }
        r.truncate(dd);
        Ok((Poly::new(q), Poly::new(r)))
    }

    pub fn rem(&self, d: &Poly<F>) -> Result<Poly<F>> {
        Ok(self.divrem(d)?.1)
    }

    /// Exact quotient, failing if the division leaves a remainder.
    pub fn exact_div(&self, d: &Poly<F>) -> Result<Poly<F>> {
        let (q, r) = self.divrem(d)?;
        if !r.is_zero() {
            return Err(Error::InexactDivision(format!("remainder {}", r.display("t"))));
        }
        Ok(q)
    }

    pub fn divides(&self, other: &Poly<F>) -> bool {
        !self.is_zero() && other.rem(self).map(|r| r.is_zero()).unwrap_or(false)
    }

    /// Monic greatest common divisor (zero if both inputs are zero).
    pub fn gcd(&self, other: &Poly<F>) -> Poly<F> {
        let mut a = self.monic();
        let mut b = other.monic();
        while !b.is_zero() {
            let r = a.rem(&b).expect("nonzero divisor");
            a = b;
            b = r.monic();
        }
        a
    }

    /// Extended gcd: `(g, s, t)` with `s·self + t·other = g`, `g` monic.
    pub fn egcd(&self, other: &Poly<F>) -> (Poly<F>, Poly<F>, Poly<F>) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1).expect("nonzero divisor");
            r0 = std::mem::replace(&mut r1, r);
            let s = &s0 - &(&q * &s1);
            s0 = std::mem::replace(&mut s1, s);
            let t = &t0 - &(&q * &t1);
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = r0.lead().inv_f();
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    /// Yun's square-free decomposition: `(f_k, k)` with `self = c · Π f_k^k`,
    /// each `f_k` monic, square-free and pairwise coprime. Constant factors are dropped.
    pub fn squarefree(&self) -> Vec<(Poly<F>, usize)> {
        let mut out = Vec::new();
        if self.deg() == 0 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let a = f.gcd(&df);
        let mut b = f.exact_div(&a).expect("gcd divides");
        let mut c = df.exact_div(&a).expect("gcd divides derivative");
        let mut d = &c - &b.derivative();
        let mut k = 1;
        while b.deg() > 0 {
            let g = b.gcd(&d);
            if g.deg() > 0 {
                out.push((g.clone(), k));
            }
            b = b.exact_div(&g).expect("gcd divides");
            c = d.exact_div(&g).expect("gcd divides");
            d = &c - &b.derivative();
            k += 1;
        }
        out
    }

    /// First `n` Taylor coefficients of `self / den` (requires `den(0) != 0`).
    pub fn series_div(&self, den: &Poly<F>, n: usize) -> Result<Vec<F>> {
        let d0 = den.constant_term();
        if d0.is_zero_f() {
            return Err(Error::ZeroConstantTerm);
        }
        let inv = d0.inv_f();
        let mut out: Vec<F> = Vec::with_capacity(n);
        for k in 0..n {
            let mut acc = self.coeff(k);
            for j in 1..den.c.len().min(k + 1) {
                acc = acc.sub_f(&den.c[j].mul_f(&out[k - j]));
            }
            out.push(acc.mul_f(&inv));
        }
        Ok(out)
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Poly<G> {
        Poly::new(self.c.iter().map(f).collect())
    }

    /// Human-readable rendering in the variable `var`, ascending degree.
    pub fn display(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero_f() {
                continue;
            }
            let txt = a.fmt_exact();
            let neg = txt.starts_with('-') && !txt[1..].contains(['+', '-']);
            let body = if neg { txt[1..].to_string() } else { txt.clone() };
            let body = if body.contains(['+', '-']) { format!("({body})") } else { body };
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            let term = if i == 0 {
                body
            } else if body == "1" {
                mono
            } else {
                format!("{body}*{mono}")
            };
            if s.is_empty() {
                s = if neg { format!("-{term}") } else { term };
            } else {
                s.push_str(if neg { " - " } else { " + " });
                s.push_str(&term);
            }
        }
        s
    }
}

impl<F: Field> fmt::Display for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display("t"))
    }
}

impl<F: Field> Add for &Poly<F> {
    type Output = Poly<F>;
    fn add(self, o: &Poly<F>) -> Poly<F> {
        let n = self.c.len().max(o.c.len());
        Poly::new((0..n).map(|i| self.coeff(i).add_f(&o.coeff(i))).collect())
    }
}

impl<F: Field> Sub for &Poly<F> {
    type Output = Poly<F>;
    fn sub(self, o: &Poly<F>) -> Poly<F> {
        let n = self.c.len().max(o.c.len());
        Poly::new((0..n).map(|i| self.coeff(i).sub_f(&o.coeff(i))).collect())
    }
}

impl<F: Field> Mul for &Poly<F> {
    type Output = Poly<F>;
    fn mul(self, o: &Poly<F>) -> Poly<F> {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![F::zero_f(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero_f() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] = c[i + j].add_f(&a.mul_f(b));
            }
        }
        Poly::new(c)
    }
}

impl<F: Field> Neg for &Poly<F> {
    type Output = Poly<F>;
    fn neg(self) -> Poly<F> {
        Poly { c: self.c.iter().map(|a| a.neg_f()).collect() }
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl<F: Field> $tr for Poly<F> {
            type Output = Poly<F>;
            fn $m(self, o: Poly<F>) -> Poly<F> {
                (&self).$m(&o)
            }
        }
    };
}

owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl Serialize for Poly<Q> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.c.iter().map(|x| ExactQ(x.clone())))
    }
}

impl<'de> Deserialize<'de> for Poly<Q> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(Poly::new(Vec::<ExactQ>::deserialize(d)?.into_iter().map(|e| e.0).collect()))
    }
}

impl Serialize for Poly<Gauss> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.c.iter().map(|x| ExactGauss(x.clone())))
    }
}

/// Evaluates ascending complex coefficients at `z` together with all
/// derivatives up to order `k` (Taylor coefficients, i.e. `p^(j)(z)/j!`).
pub fn taylor_at(coeffs: &[hp::Complex], z: &hp::Complex, k: usize) -> Vec<hp::Complex> {
    let prec = z.prec();
    let mut work: Vec<hp::Complex> = coeffs.to_vec();
    let mut out = Vec::with_capacity(k + 1);
    for _ in 0..=k {
        if work.is_empty() {
            out.push(hp::Complex::zero(prec));
            continue;
        }
        // synthetic division by (t - z): remainder is the value, quotient carries on
        let n = work.len();
        let mut q = vec![hp::Complex::zero(prec); n.saturating_sub(1)];
        let mut acc = hp::Complex::zero(prec);
        for i in (0..n).rev() {
            acc = &(&acc * z) + &work[i];
            if i > 0 {
                q[i - 1] = acc.clone();
            }
        }
        out.push(acc);
        work = q;
    }
    out
}

/// Product `Π (t - x_i)` with high-precision complex roots.
pub fn from_roots(roots: &[hp::Complex], prec: usize) -> Vec<hp::Complex> {
    let mut c = vec![hp::Complex::one(prec)];
    for x in roots {
        let mut next = vec![hp::Complex::zero(prec); c.len() + 1];
        for (i, a) in c.iter().enumerate() {
            next[i + 1] = &next[i + 1] + a;
            next[i] = &next[i] - &(a * x);
        }
        c = next;
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{q, qi};
    use proptest::prelude::*;

    fn pq(c: &[i64]) -> Poly<Q> {
        Poly::new(c.iter().map(|&x| qi(x)).collect())
    }

    #[test]
    fn divrem_and_gcd() {
        // (1 - t^2) and (1 - t)(1 - 2t)
        let a = pq(&[1, 0, -1]);
        let b = &pq(&[1, -1]) * &pq(&[1, -2]);
        let g = a.gcd(&b);
        assert_eq!(g, pq(&[-1, 1]));
        let (qq, r) = a.divrem(&g).unwrap();
        assert!(r.is_zero());
        assert_eq!(qq, pq(&[-1, -1]));
    }

    #[test]
    fn squarefree_machi_style() {
        let f = &(&pq(&[1, -1]).pow(2) * &pq(&[1, 1])) * &pq(&[1, 0, 1]).pow(3);
        let sf = f.squarefree();
        let mut total = Poly::one();
        for (g, k) in &sf {
            total = &total * &g.pow(*k);
        }
        assert_eq!(total, f.monic());
        let mults: Vec<usize> = sf.iter().map(|(_, k)| *k).collect();
        assert_eq!(mults, vec![1, 2, 3]);
    }

    #[test]
    fn series_division_geometric() {
        let s = Poly::<Q>::one().series_div(&pq(&[1, -1]), 4).unwrap();
        assert_eq!(s, vec![qi(1); 4]);
        assert_eq!(Poly::<Q>::one().series_div(&pq(&[0, 1]), 3), Err(Error::ZeroConstantTerm));
    }

    #[test]
    fn reversal_and_display() {
        let p = Poly::new(vec![qi(1), qi(0), q(-1, 2)]);
        assert_eq!(p.reverse(2), Poly::new(vec![q(-1, 2), qi(0), qi(1)]));
        assert_eq!(p.display("s"), "1 - 1/2*s^2");
        assert_eq!(p.reverse(2).display("t"), "-1/2 + t^2");
    }

    #[test]
    fn taylor_shift_matches_derivatives() {
        let p = pq(&[1, 2, 3]);
        let z = hp::Complex::from_f64(2.0, 0.0, 128);
        let t = taylor_at(&p.to_complex_coeffs(128), &z, 3);
        let vals: Vec<f64> = t.iter().map(|c| c.re.to_f64()).collect();
        assert_eq!(vals, vec![17.0, 14.0, 3.0, 0.0]);
    }

    proptest! {
        #[test]
        fn division_identity(a in prop::collection::vec(-9i64..9, 1..8), b in prop::collection::vec(-9i64..9, 1..6)) {
            let a = pq(&a);
            let b = pq(&b);
            prop_assume!(!b.is_zero());
            let (qq, r) = a.divrem(&b).unwrap();
            prop_assert_eq!(&(&qq * &b) + &r, a);
            prop_assert!(r.degree().is_none_or(|d| d < b.deg()));
        }

        #[test]
        fn gcd_divides_both(a in prop::collection::vec(-5i64..5, 1..6), b in prop::collection::vec(-5i64..5, 1..6), c in prop::collection::vec(-5i64..5, 1..4)) {
            let c = pq(&c);
            prop_assume!(!c.is_zero());
            let x = &pq(&a) * &c;
            let y = &pq(&b) * &c;
            prop_assume!(!x.is_zero() && !y.is_zero());
            let g = x.gcd(&y);
            prop_assert!(g.divides(&x) && g.divides(&y));
            prop_assert!(c.divides(&g));
            let (g2, s, t) = x.egcd(&y);
            prop_assert_eq!(&g2, &g);
            prop_assert_eq!(&(&s * &x) + &(&t * &y), g);
        }
    }
}
