//! The real cyclotomic field K_h = ℚ(2cos(2π/h)).
//!
//! Real divisors of `1 - s^h` factor into `1 - s`, `1 + s` (h even) and the
//! quadratics `1 - 2cos(2πk/h)s + s²`, whose coefficients live in K_h. This
//! field is what makes stratum labels exact for h = 5, 7, 8, ...

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Zero};

use crate::field::{fmt_q, Field, Q};
use crate::hp;
use crate::poly::Poly;

pub struct NfCtx {
    pub h: usize,
    /// Minimal polynomial of θ = 2cos(2π/h) over ℚ.
    pub minpoly: Poly<Q>,
}

impl fmt::Debug for NfCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "K_{}", self.h)
    }
}

/// `Φ_n(z)`.
pub fn cyclotomic(n: usize) -> Poly<Q> {
    assert!(n >= 1);
    let mut p = Poly::<Q>::one_minus(Q::one(), n).scale(&-Q::one()); // z^n - 1
    for d in 1..n {
        if n.is_multiple_of(d) {
            p = p.exact_div(&cyclotomic(d)).expect("cyclotomic factor divides z^n - 1");
        }
    }
    p
}

/// Dickson polynomial `D_k(x)` with `D_k(z + 1/z) = z^k + z^-k`.
pub fn dickson(k: usize) -> Poly<Q> {
    let x = Poly::<Q>::monomial(1, Q::one());
    let mut a = Poly::constant(Q::from_integer(2.into()));
    let mut b = x.clone();
    if k == 0 {
        return a;
    }
    for _ in 1..k {
        let next = &(&x * &b) - &a;
        a = b;
        b = next;
    }
    b
}

fn build_minpoly(h: usize) -> Poly<Q> {
    match h {
        1 => Poly::new(vec![Q::from_integer((-2).into()), Q::one()]),
        2 => Poly::new(vec![Q::from_integer(2.into()), Q::one()]),
        _ => {
            let phi = cyclotomic(h);
            let m = phi.deg() / 2;
            let mut out = Poly::constant(phi.coeff(m));
            for j in 1..=m {
                out = &out + &dickson(j).scale(&phi.coeff(m + j));
            }
            out.monic()
        }
    }
}

/// Shared context for K_h.
pub fn context(h: usize) -> Arc<NfCtx> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<NfCtx>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("number field cache");
    guard.entry(h).or_insert_with(|| Arc::new(NfCtx { h, minpoly: build_minpoly(h) })).clone()
}

/// Element of K_h, stored as a polynomial in θ reduced modulo the minimal
/// polynomial. Rational constants may carry no context.
#[derive(Clone, Debug)]
pub struct NfElem {
    v: Poly<Q>,
    ctx: Option<Arc<NfCtx>>,
}

impl NfElem {
    pub fn new(v: Poly<Q>, ctx: &Arc<NfCtx>) -> Self {
        let v = v.rem(&ctx.minpoly).expect("nonzero minimal polynomial");
        NfElem { v, ctx: Some(ctx.clone()) }
    }

    pub fn rational(x: Q) -> Self {
        NfElem { v: Poly::constant(x), ctx: None }
    }

    /// θ = 2cos(2π/h).
    pub fn theta(ctx: &Arc<NfCtx>) -> Self {
        NfElem::new(Poly::monomial(1, Q::one()), ctx)
    }

    /// 2cos(2πk/h).
    pub fn two_cos(ctx: &Arc<NfCtx>, k: usize) -> Self {
        NfElem::new(dickson(k), ctx)
    }

    pub fn poly(&self) -> &Poly<Q> {
        &self.v
    }

    fn merged_ctx(&self, o: &NfElem) -> Option<Arc<NfCtx>> {
        match (&self.ctx, &o.ctx) {
            (Some(a), Some(b)) => {
                assert_eq!(a.h, b.h, "mixing elements of different number fields");
                Some(a.clone())
            }
            (Some(a), None) | (None, Some(a)) => Some(a.clone()),
            (None, None) => None,
        }
    }

    fn wrap(v: Poly<Q>, ctx: Option<Arc<NfCtx>>) -> Self {
        match ctx {
            Some(c) => NfElem::new(v, &c),
            None => NfElem { v, ctx: None },
        }
    }

    pub fn to_real(&self, prec: usize) -> hp::Real {
        let theta = match &self.ctx {
            Some(c) => {
                let p = prec + 32;
                let angle = &(&hp::Real::pi(p) * &hp::Real::from_i64(2, p)) / &hp::Real::from_i64(c.h as i64, p);
                &angle.cos() * &hp::Real::from_i64(2, p)
            }
            None => hp::Real::zero(prec),
        };
        self.v.eval_complex(&hp::Complex::from_real(theta)).re.with_prec(prec)
    }
}

impl PartialEq for NfElem {
    fn eq(&self, o: &Self) -> bool {
        self.v == o.v
    }
}

impl Field for NfElem {
    fn zero_f() -> Self {
        NfElem::rational(Q::zero())
    }
    fn one_f() -> Self {
        NfElem::rational(Q::one())
    }
    fn is_zero_f(&self) -> bool {
        self.v.is_zero()
    }
    fn add_f(&self, o: &Self) -> Self {
        NfElem { v: &self.v + &o.v, ctx: self.merged_ctx(o) }
    }
    fn sub_f(&self, o: &Self) -> Self {
        NfElem { v: &self.v - &o.v, ctx: self.merged_ctx(o) }
    }
    fn mul_f(&self, o: &Self) -> Self {
        NfElem::wrap(&self.v * &o.v, self.merged_ctx(o))
    }
    fn div_f(&self, o: &Self) -> Self {
        assert!(!o.v.is_zero(), "division by zero in number field");
        let ctx = self.merged_ctx(o);
        let inv = match (&ctx, o.v.deg()) {
            (_, 0) => Poly::constant(o.v.coeff(0).recip()),
            (Some(c), _) => {
                let (g, s, _) = o.v.egcd(&c.minpoly);
                debug_assert!(g.deg() == 0);
                s
            }
            (None, _) => unreachable!("non-constant element without a field context"),
        };
        NfElem::wrap(&self.v * &inv, ctx)
    }
    fn neg_f(&self) -> Self {
        NfElem { v: -&self.v, ctx: self.ctx.clone() }
    }
    fn from_q(q: &Q) -> Self {
        NfElem::rational(q.clone())
    }
    fn to_complex(&self, prec: usize) -> hp::Complex {
        hp::Complex::from_real(self.to_real(prec))
    }
    fn as_q(&self) -> Option<Q> {
        (self.v.deg() == 0).then(|| self.v.coeff(0))
    }
    fn real_sign(&self) -> Option<std::cmp::Ordering> {
        if let Some(q) = self.as_q() {
            return Some(q.cmp(&Q::zero()));
        }
        // a nonzero algebraic number is bounded away from zero; refine until visible
        let mut prec = 256;
        while prec <= 4096 {
            let x = self.to_real(prec);
            if x.log2_abs() > -(prec as f64) / 2.0 {
                return Some(if x.is_negative() { std::cmp::Ordering::Less } else { std::cmp::Ordering::Greater });
            }
            prec *= 2;
        }
        None
    }
    fn fmt_exact(&self) -> String {
        match self.as_q() {
            Some(q) => fmt_q(&q),
            None => {
                let h = self.ctx.as_ref().map_or(0, |c| c.h);
                format!("({})", self.v.display(&format!("c{h}")))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{q, qi};

    #[test]
    fn cyclotomic_small() {
        assert_eq!(cyclotomic(1), Poly::new(vec![qi(-1), qi(1)]));
        assert_eq!(cyclotomic(4), Poly::new(vec![qi(1), qi(0), qi(1)]));
        assert_eq!(cyclotomic(6), Poly::new(vec![qi(1), qi(-1), qi(1)]));
        assert_eq!(cyclotomic(5).deg(), 4);
        assert_eq!(cyclotomic(12).deg(), 4);
    }

    #[test]
    fn minimal_polynomials() {
        // 2cos(2π/5) = (√5 - 1)/2 satisfies x² + x - 1
        assert_eq!(context(5).minpoly, Poly::new(vec![qi(-1), qi(1), qi(1)]));
        // 2cos(π/4) = √2
        assert_eq!(context(8).minpoly, Poly::new(vec![qi(-2), qi(0), qi(1)]));
        assert_eq!(context(3).minpoly, Poly::new(vec![qi(1), qi(1)]));
        assert_eq!(context(7).minpoly.deg(), 3);
        for h in 1..13 {
            let c = context(h);
            let th = NfElem::theta(&c).to_real(256);
            let v = c.minpoly.eval_complex(&hp::Complex::from_real(th));
            assert!(v.abs_f64() < 1e-60, "h={h}");
        }
    }

    #[test]
    fn field_arithmetic_in_q_sqrt5() {
        let c = context(5);
        let t = NfElem::theta(&c);
        let x = t.add_f(&NfElem::rational(q(1, 3)));
        let y = NfElem::one_f().div_f(&x);
        assert!(x.mul_f(&y).is_one_f());
        // θ² = 1 - θ
        assert_eq!(t.mul_f(&t), NfElem::one_f().sub_f(&t));
        assert_eq!(t.real_sign(), Some(std::cmp::Ordering::Greater));
        assert_eq!(NfElem::two_cos(&c, 2).real_sign(), Some(std::cmp::Ordering::Less));
    }

    #[test]
    fn two_cos_values() {
        let c = context(8);
        let v = NfElem::two_cos(&c, 3).to_real(128).to_f64();
        assert!((v - 2.0 * (3.0 * std::f64::consts::PI / 4.0).cos()).abs() < 1e-14);
    }
}
