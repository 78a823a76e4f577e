//! Hadamard sections `T_U P = Σ_{n∈U} γₙ tⁿ`, on streams by masking and on
//! rational functions exactly.
//!
//! If `D(t) = Π(1 - αᵢt)` then `Π_ζ D(ζt) = E(t^h)` with `E(u) = Π(1 - αᵢ^h u)`,
//! a polynomial in `t^h` over ℚ obtained from `charpoly(C^h)` for the
//! companion matrix `C`. Multiplying `P` by `E(t^h)` gives a polynomial, and
//! sectioning commutes with multiplication by a series in `t^h`.

use serde::Serialize;

use crate::error::Result;
use crate::field::{Field, Q};
use crate::hp;
use crate::linalg::Matrix;
use crate::poles;
use crate::poly::Poly;
use crate::ratfn::RationalFunctionRep;
use crate::sequence::{CoefficientStream, SeriesSpec};
use crate::subsets::RationalSubset;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SectionedRational {
    pub class: usize,
    pub modulus: usize,
    pub result: RationalFunctionRep,
}

/// `γₙ` for `n ∈ U`, else 0.
pub fn section_stream(stream: &CoefficientStream, u: &RationalSubset) -> Result<CoefficientStream> {
    CoefficientStream::new(SeriesSpec::Section { inner: Box::new(stream.spec().clone()), subset: u.clone() })
}

/// `E(t^h) = Π_ζ den(ζt)` over the `h`-th roots of unity, normalized to `E(0) = 1`.
pub fn class_denominator(den: &Poly<Q>, h: usize) -> Poly<Q> {
    let d = den.deg();
    if d == 0 || h == 1 {
        return den.normalize_constant().expect("denominator is nonzero at 0");
    }
    let r = den.reverse(d).monic();
    let mut c = Matrix::<Q>::zeros(d, d);
    for i in 0..d {
        if i + 1 < d {
            c.set(i + 1, i, Q::one_f());
        }
        c.set(i, d - 1, r.coeff(i).neg_f());
    }
    let cp = c.pow(h).charpoly();
    cp.reverse(d).subst_power(h)
}

/// `T^[e]P` for the residue class `e` modulo `h`, reduced.
pub fn section_rational(rep: &RationalFunctionRep, h: usize, e: usize) -> SectionedRational {
    assert!(h >= 1, "modulus must be positive");
    let e = e % h;
    let rep = if rep.reduced { rep.clone() } else { rep.reduce() };
    let big = class_denominator(&rep.denominator, h);
    let cof = big.exact_div(&rep.denominator).expect("D(t) divides the product of its rotations");
    let full = &rep.numerator * &cof;
    let masked = Poly::new(full.coeffs().iter().enumerate().map(|(i, a)| if i % h == e { a.clone() } else { Q::zero_f() }).collect());
    let result = RationalFunctionRep::new(masked, big).expect("E(0) = 1").reduce();
    SectionedRational { class: e, modulus: h, result }
}

/// `T_U P` for a rational subset, including its finite exceptions.
pub fn section_subset_rational(rep: &RationalFunctionRep, u: &RationalSubset) -> RationalFunctionRep {
    let h = u.period();
    let mut acc = RationalFunctionRep::polynomial(Poly::zero());
    for &e in u.residues() {
        acc = acc.add(&section_rational(rep, h, e).result);
    }
    if let Some(m) = u.max_exception() {
        let t = rep.taylor(m + 1);
        for &n in u.added() {
            acc = acc.add(&RationalFunctionRep::polynomial(Poly::monomial(n, t[n].clone())));
        }
        for &n in u.removed() {
            acc = acc.sub(&RationalFunctionRep::polynomial(Poly::monomial(n, t[n].clone())));
        }
    }
    acc.reduce()
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class: Option<usize>,
    pub holds: bool,
    /// Numerator of the difference when an identity fails.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub modulus: usize,
    pub sections: Vec<SectionedRational>,
    pub checks: Vec<IdentityCheck>,
    pub all_hold: bool,
}

fn compare(name: &str, class: Option<usize>, lhs: &RationalFunctionRep, rhs: &RationalFunctionRep) -> IdentityCheck {
    let diff = lhs.sub(rhs).reduce();
    let holds = diff.numerator.is_zero();
    IdentityCheck { name: name.into(), class, holds, residual: (!holds).then(|| diff.numerator.display("t")) }
}

/// Boundary radius and top order, `None` for a polynomial.
fn top_order(rep: &RationalFunctionRep, prec: usize) -> Result<Option<(hp::Real, hp::Real, usize)>> {
    if rep.reduce().denominator.deg() == 0 {
        return Ok(None);
    }
    let ps = poles::boundary_poles(rep, prec)?;
    Ok(Some((ps.r, ps.r_error, ps.d_m)))
}

/// `p(u)` with `p(t^h) = q(t)`, if `q` only has exponents divisible by `h`.
fn desubstitute(q: &Poly<Q>, h: usize) -> Option<Poly<Q>> {
    let c = q.coeffs();
    c.iter().enumerate().all(|(i, a)| i % h == 0 || a.is_zero_f()).then(|| Poly::new(c.iter().step_by(h).cloned().collect()))
}

/// Top order of a section, whose reduced denominator is a polynomial in `u = t^h`.
/// The radius is returned raised to the power `h`. Poles of `E(u)` are
/// nonzero, so `u = t^h` preserves multiplicities.
fn section_top_order(sec: &SectionedRational, prec: usize) -> Result<Option<(hp::Real, hp::Real, usize)>> {
    let den = desubstitute(&sec.result.denominator, sec.modulus).expect("section denominators are polynomials in t^h");
    top_order(&RationalFunctionRep::new(Poly::one(), den)?, prec)
}

/// Partition, shift and derivative identities for the sections of `rep`
/// modulo `h`, plus the check that sections do not shrink the radius or
/// raise the top pole order.
pub fn operator_identity_suite(rep: &RationalFunctionRep, h: usize) -> Result<IdentityReport> {
    let rep = rep.reduce();
    let secs: Vec<SectionedRational> = (0..h).map(|e| section_rational(&rep, h, e)).collect();
    let mut checks = Vec::new();

    let sum = secs.iter().fold(RationalFunctionRep::polynomial(Poly::zero()), |acc, s| acc.add(&s.result));
    checks.push(compare("partition_of_unity", None, &sum, &rep));

    let t_rep = rep.times_t();
    let d_rep = rep.derivative();
    for e in 0..h {
        let lhs = section_rational(&t_rep, h, e).result;
        let rhs = secs[(e + h - 1) % h].result.times_t();
        checks.push(compare("shift", Some(e), &lhs, &rhs));
        let lhs = section_rational(&d_rep, h, e).result;
        let rhs = secs[(e + 1) % h].result.derivative();
        checks.push(compare("derivative", Some(e), &lhs, &rhs));
    }

    let prec = hp::DEFAULT_PRECISION;
    let base = top_order(&rep, prec)?.map(|(r, re, d)| {
        let rh = r.powi(h);
        let err = &re * &hp::Real::from_f64(h as f64 * 2f64.max(r.to_f64() + 1.0).powi(h as i32), prec);
        (rh, err, d)
    });
    for s in &secs {
        let holds = match (&base, section_top_order(s, prec)?) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some((r, re, d)), Some((rs, rse, ds))) => {
                let slack = hp::Real::from_f64(2f64.powi(-(prec as i32) / 2), prec);
                let gap = &rs - r;
                let slack = &(&slack + re) + &rse;
                if gap.cmp_to(&slack).is_gt() {
                    true
                } else {
                    !(&gap + &slack).is_negative() && ds <= *d
                }
            }
        };
        checks.push(IdentityCheck {
            name: "boundary_order".into(),
            class: Some(s.class),
            holds,
            residual: (!holds).then(|| "section has a smaller radius or a higher top pole order".into()),
        });
    }
    let all_hold = checks.iter().all(|c| c.holds);
    Ok(IdentityReport { modulus: h, sections: secs, checks, all_hold })
}
