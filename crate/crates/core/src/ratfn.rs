//! Exact rational functions N(t)/D(t) over ℚ with D(0) ≠ 0.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, Q};
use crate::poly::Poly;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RationalFunctionRep {
    pub numerator: Poly<Q>,
    pub denominator: Poly<Q>,
    #[serde(default)]
    pub reduced: bool,
}

impl RationalFunctionRep {
    /// Builds `num/den`, rejecting a zero denominator or one vanishing at 0.
    pub fn new(numerator: Poly<Q>, denominator: Poly<Q>) -> Result<Self> {
        if denominator.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if denominator.constant_term().is_zero_f() {
            return Err(Error::ZeroConstantTerm);
        }
        Ok(RationalFunctionRep { numerator, denominator, reduced: false })
    }

    pub fn polynomial(p: Poly<Q>) -> Self {
        RationalFunctionRep { numerator: p, denominator: Poly::one(), reduced: true }
    }

    /// Cancels the gcd and scales so that the denominator has constant term 1.
    pub fn reduce(&self) -> Self {
        let g = self.numerator.gcd(&self.denominator);
        let (mut n, mut d) = if g.deg() > 0 {
            (self.numerator.exact_div(&g).expect("gcd divides numerator"), self.denominator.exact_div(&g).expect("gcd divides denominator"))
        } else {
            (self.numerator.clone(), self.denominator.clone())
        };
        let c = d.constant_term().inv_f();
        n = n.scale(&c);
        d = d.scale(&c);
        RationalFunctionRep { numerator: n, denominator: d, reduced: true }
    }

    /// Taylor coefficients γ_0..γ_{n-1}.
    pub fn taylor(&self, n: usize) -> Vec<Q> {
        crate::sequence::unroll(&self.numerator, &self.denominator, n).expect("denominator has nonzero constant term")
    }

    /// Exact equality as rational functions (cross-multiplication).
    pub fn same_function(&self, o: &RationalFunctionRep) -> bool {
        &self.numerator * &o.denominator == &o.numerator * &self.denominator
    }

    pub fn add(&self, o: &RationalFunctionRep) -> RationalFunctionRep {
        let num = &(&self.numerator * &o.denominator) + &(&o.numerator * &self.denominator);
        let den = &self.denominator * &o.denominator;
        RationalFunctionRep { numerator: num, denominator: den, reduced: false }.reduce()
    }

    pub fn sub(&self, o: &RationalFunctionRep) -> RationalFunctionRep {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> RationalFunctionRep {
        RationalFunctionRep { numerator: -&self.numerator, denominator: self.denominator.clone(), reduced: self.reduced }
    }

    /// `t · P(t)`
    pub fn times_t(&self) -> RationalFunctionRep {
        RationalFunctionRep { numerator: self.numerator.shift(1), denominator: self.denominator.clone(), reduced: false }.reduce()
    }

    pub fn derivative(&self) -> RationalFunctionRep {
        let n = &(&self.numerator.derivative() * &self.denominator) - &(&self.numerator * &self.denominator.derivative());
        let d = &self.denominator * &self.denominator;
        RationalFunctionRep { numerator: n, denominator: d, reduced: false }.reduce()
    }

    /// `P(c·t)`
    pub fn rescale(&self, c: &Q) -> RationalFunctionRep {
        RationalFunctionRep { numerator: self.numerator.compose_scale(c), denominator: self.denominator.compose_scale(c), reduced: false }
            .reduce()
    }
}

impl PartialEq for RationalFunctionRep {
    fn eq(&self, o: &Self) -> bool {
        self.same_function(o)
    }
}

impl fmt::Display for RationalFunctionRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.numerator.display("t"), self.denominator.display("t"))
    }
}
