//! Exact algebra of the opposite numerators `A^[e](s)`: the coefficient
//! matrix `M_h`, its determinant `D_h`, the gcd `δ`, the opposite
//! denominator `Δ^op`, reduced numerators, residues and the stratification of
//! positive initial tuples.

use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::{Field, Q};
use crate::hp::{self, Complex};
use crate::linalg::{self, Matrix};
use crate::numfield::{self, NfElem};
use crate::poles::sort_key;
use crate::poly::Poly;

fn check_initials<F: Field>(initials: &[F]) -> Result<()> {
    if initials.is_empty() {
        return Err(Error::InvalidInput("at least one initial is required".into()));
    }
    match initials.iter().position(|a| a.is_zero_f()) {
        Some(class) => Err(Error::ZeroInitial { class }),
        None => Ok(()),
    }
}

/// `A = Π a₁^[e]`.
pub fn period_product<F: Field>(initials: &[F]) -> F {
    initials.iter().fold(F::one_f(), |acc, a| acc.mul_f(a))
}

/// `1 - A s^h`.
pub fn full_denominator<F: Field>(initials: &[F]) -> Poly<F> {
    Poly::one_minus(period_product(initials), initials.len())
}

/// `A^[e](s) = Σ_{j<h} (Π_{i=1..j} a₁^[e-i+1]) s^j` for every class `e`.
pub fn numerators<F: Field>(initials: &[F]) -> Result<Vec<Poly<F>>> {
    check_initials(initials)?;
    let h = initials.len();
    Ok((0..h)
        .map(|e| {
            let mut c = Vec::with_capacity(h);
            let mut acc = F::one_f();
            c.push(acc.clone());
            for j in 1..h {
                acc = acc.mul_f(&initials[(e + h + 1 - j) % h]);
                c.push(acc.clone());
            }
            Poly::new(c)
        })
        .collect())
}

/// The cyclic relation `a₁^[e+1] s A^[e] + (1 - A s^h) = A^[e+1]` for every `e`.
pub fn relation_holds<F: Field>(initials: &[F], nums: &[Poly<F>]) -> bool {
    let h = initials.len();
    let d = full_denominator(initials);
    (0..h).all(|e| {
        let f = (e + 1) % h;
        &nums[e].shift(1).scale(&initials[f]) + &d == nums[f]
    })
}

/// `M_h[e][f] = Π_{i=1..f} a₁^[e-i+1]`, the coefficients of `A^[e]` as rows.
pub fn coefficient_matrix<F: Field>(initials: &[F]) -> Result<Matrix<F>> {
    let h = initials.len();
    let nums = numerators(initials)?;
    Ok(Matrix::from_rows(nums.iter().map(|p| (0..h).map(|j| p.coeff(j)).collect()).collect()))
}

/// `D_h = det M_h`.
pub fn discriminant<F: Field>(initials: &[F]) -> Result<F> {
    Ok(coefficient_matrix(initials)?.det())
}

#[derive(Clone, Debug, PartialEq)]
pub struct DenominatorPair<F: Field> {
    pub h: usize,
    /// `A = Π a₁^[e]`.
    pub a: F,
    /// Common gcd of the numerators with `1 - A s^h`, constant term 1.
    pub delta: Poly<F>,
    /// `Δ^op = (1 - A s^h)/δ`, constant term 1.
    pub delta_op: Poly<F>,
    pub d_p: usize,
    /// `rank M_h`, which the theory equates with `d_p`.
    pub rank_m: usize,
}

impl<F: Field> DenominatorPair<F> {
    pub fn rank_matches(&self) -> bool {
        self.rank_m == self.d_p
    }
}

fn normalized_gcd<F: Field>(a: &Poly<F>, b: &Poly<F>) -> Poly<F> {
    a.gcd(b).normalize_constant().expect("divisor of a polynomial with constant term 1")
}

/// `δ`, `Δ^op`, checking that every class and every consecutive pair share the same gcd.
pub fn denominator_pair<F: Field>(initials: &[F], nums: &[Poly<F>]) -> Result<DenominatorPair<F>> {
    check_initials(initials)?;
    let h = initials.len();
    if nums.len() != h {
        return Err(Error::InvalidInput(format!("{} numerators for {h} initials", nums.len())));
    }
    let full = full_denominator(initials);
    let delta = normalized_gcd(&nums[0], &full);
    for e in 0..h {
        let g = normalized_gcd(&nums[e], &full);
        if g != delta {
            return Err(Error::GcdMismatch(format!("gcd(A^[{e}], 1 - A s^h) = {} differs from {}", g.display("s"), delta.display("s"))));
        }
        let f = (e + 1) % h;
        let gp = if h == 1 { g } else { normalized_gcd(&nums[e], &nums[f]) };
        if gp != delta {
            return Err(Error::GcdMismatch(format!("gcd(A^[{e}], A^[{f}]) = {} differs from {}", gp.display("s"), delta.display("s"))));
        }
    }
    let delta_op = full.exact_div(&delta)?;
    let d_p = delta_op.deg();
    let rank_m = coefficient_matrix(initials)?.rank();
    Ok(DenominatorPair { h, a: period_product(initials), delta, delta_op, d_p, rank_m })
}

/// `b^[e] = A^[e]/δ`.
pub fn reduced_numerators<F: Field>(pair: &DenominatorPair<F>, nums: &[Poly<F>]) -> Result<Vec<Poly<F>>> {
    nums.iter()
        .enumerate()
        .map(|(e, a)| {
            let (q, r) = a.divrem(&pair.delta)?;
            if r.is_zero() {
                Ok(q)
            } else {
                Err(Error::InexactDivision(format!("δ does not divide A^[{e}]: remainder {}", r.display("s"))))
            }
        })
        .collect()
}

/// Rank of the `h × d_P` coefficient matrix of the reduced numerators.
pub fn span_rank<F: Field>(pair: &DenominatorPair<F>, reduced: &[Poly<F>]) -> usize {
    Matrix::from_rows(reduced.iter().map(|b| (0..pair.d_p).map(|j| b.coeff(j)).collect()).collect()).rank()
}

/// `a₁^[e+1] s b^[e] ≡ b^[e+1] (mod Δ^op)`: multiplication by `s` on the quotient ring.
pub fn sigma_action_holds<F: Field>(pair: &DenominatorPair<F>, initials: &[F], reduced: &[Poly<F>]) -> bool {
    let h = pair.h;
    (0..h).all(|e| {
        let f = (e + 1) % h;
        let lhs = reduced[e].shift(1).scale(&initials[f]);
        (&lhs - &reduced[f]).rem(&pair.delta_op).map(|r| r.is_zero()).unwrap_or(false)
    })
}

/// `μ^[e]_x = A^[e](x⁻¹)/h` at the roots `x⁻¹` of `Δ^op` (rows `e`, columns `x`).
#[derive(Clone, Debug, Serialize)]
pub struct ResidueMatrix {
    /// Columns: the `x` with `x^h = A` and `Δ^op(x⁻¹) = 0`, ordered by argument.
    pub roots: Vec<Complex>,
    pub entries: Vec<Vec<Complex>>,
    /// The remaining `h`-th roots of `A`, where every `μ` should vanish.
    pub excluded: Vec<Complex>,
    pub excluded_max: f64,
    pub numeric_rank: usize,
    /// Largest deviation of `Σ_x μ_x x^k` from `a_k^[e]` for `k < 2h`.
    pub expansion_residual: f64,
}

/// The `h` roots of `x^h = A`, ordered by argument.
pub fn hth_roots(a: &Complex, h: usize) -> Vec<Complex> {
    let prec = a.prec();
    let base = a.principal_root(h);
    let mut xs: Vec<Complex> = (0..h).map(|k| &base * &Complex::root_of_unity(k as i64, h, prec)).collect();
    xs.sort_by(|x, y| sort_key(x).partial_cmp(&sort_key(y)).expect("finite arguments"));
    xs
}

pub fn residue_matrix<F: Field>(pair: &DenominatorPair<F>, nums: &[Poly<F>], prec: usize) -> Result<ResidueMatrix> {
    let h = pair.h;
    let wp = prec + 32;
    let a = pair.a.to_complex(wp);
    let mut scored: Vec<(Complex, f64)> = hth_roots(&a, h)
        .into_iter()
        .map(|x| {
            let v = pair.delta_op.eval_complex(&x.inv()).log2_abs();
            (x, v)
        })
        .collect();
    let mut order: Vec<usize> = (0..h).collect();
    order.sort_by(|&i, &j| scored[i].1.partial_cmp(&scored[j].1).expect("finite"));
    let zero_cut = -(prec as f64) / 2.0;
    let included: BTreeSet<usize> = order[..pair.d_p].iter().copied().collect();
    if let Some(&bad) = order[..pair.d_p].iter().find(|&&i| scored[i].1 > zero_cut) {
        return Err(Error::RootIsolation { cap_bits: prec, detail: format!("Δ^op does not vanish at root {}", scored[bad].0) });
    }
    if let Some(&bad) = order[pair.d_p..].iter().find(|&&i| scored[i].1 <= zero_cut) {
        return Err(Error::RootIsolation { cap_bits: prec, detail: format!("unexpected extra root {} of Δ^op", scored[bad].0) });
    }
    let inv_h = Complex::from_rational(&Q::new(1.into(), (h as i64).into()), wp);
    let mu = |e: usize, x: &Complex| &nums[e].eval_complex(&x.inv()) * &inv_h;

    let mut roots = Vec::new();
    let mut excluded = Vec::new();
    for (i, (x, _)) in scored.drain(..).enumerate() {
        if included.contains(&i) {
            roots.push(x);
        } else {
            excluded.push(x);
        }
    }
    let entries: Vec<Vec<Complex>> = (0..h).map(|e| roots.iter().map(|x| mu(e, x).with_prec(prec)).collect()).collect();
    let excluded_max = (0..h).flat_map(|e| excluded.iter().map(move |x| (e, x))).map(|(e, x)| mu(e, x).abs_f64()).fold(0.0, f64::max);

    // partial fractions over all h roots must reproduce a_k^[e] = A^⌊k/h⌋ A^[e]_{k mod h}
    let all: Vec<&Complex> = roots.iter().chain(excluded.iter()).collect();
    let mut expansion_residual = 0f64;
    for e in 0..h {
        let mus: Vec<Complex> = all.iter().map(|x| mu(e, x)).collect();
        let mut pows: Vec<Complex> = all.iter().map(|_| Complex::one(wp)).collect();
        let mut apow = Complex::one(wp);
        for k in 0..2 * h {
            if k > 0 && k % h == 0 {
                apow = &apow * &a;
            }
            let want = &apow * &nums[e].coeff(k % h).to_complex(wp);
            let got = mus.iter().zip(&pows).fold(Complex::zero(wp), |acc, (m, p)| &acc + &(m * p));
            expansion_residual = expansion_residual.max(hp::dist_f64(&got, &want));
            for (p, x) in pows.iter_mut().zip(&all) {
                *p = &*p * *x;
            }
        }
    }
    let numeric_rank = linalg::rank_complex(&entries, -(prec as f64) / 2.0);
    Ok(ResidueMatrix { roots, entries, excluded, excluded_max, numeric_rank, expansion_residual })
}

/// A real divisor of `1 - s^h` divisible by `1 - s`: the set of factors
/// `k ∈ 1..=h/2` besides `1 - s`, where factor `k` is `1 - 2cos(2πk/h)s + s²`
/// for `2k < h` and `1 + s` for `2k = h`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StratumLabel {
    pub h: usize,
    pub factors: BTreeSet<usize>,
}

impl StratumLabel {
    pub fn new(h: usize, factors: impl IntoIterator<Item = usize>) -> Result<Self> {
        if h == 0 {
            return Err(Error::InvalidInput("period must be positive".into()));
        }
        let factors: BTreeSet<usize> = factors.into_iter().collect();
        if let Some(k) = factors.iter().find(|&&k| k == 0 || 2 * k > h) {
            return Err(Error::InvalidInput(format!("factor index {k} out of range for h = {h}")));
        }
        Ok(StratumLabel { h, factors })
    }

    /// All labels for period `h`, by increasing degree.
    pub fn all(h: usize) -> Vec<StratumLabel> {
        let ks: Vec<usize> = (1..=h / 2).collect();
        let mut out: Vec<StratumLabel> = (0u32..1 << ks.len())
            .map(|mask| StratumLabel { h, factors: ks.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &k)| k).collect() })
            .collect();
        out.sort_by_key(|l| (l.degree(), l.factors.iter().copied().collect::<Vec<_>>()));
        out
    }

    pub fn full(h: usize) -> Self {
        StratumLabel { h, factors: (1..=h / 2).collect() }
    }

    fn factor_degree(&self, k: usize) -> usize {
        if 2 * k == self.h {
            1
        } else {
            2
        }
    }

    pub fn degree(&self) -> usize {
        1 + self.factors.iter().map(|&k| self.factor_degree(k)).sum::<usize>()
    }

    /// Factor `k` over `K_h`.
    fn factor(&self, k: usize) -> Poly<NfElem> {
        let one = NfElem::one_f();
        if 2 * k == self.h {
            Poly::new(vec![one.clone(), one])
        } else {
            let ctx = numfield::context(self.h);
            Poly::new(vec![one.clone(), NfElem::two_cos(&ctx, k).neg_f(), one])
        }
    }

    /// The label polynomial `Δ^op_normalized(s)` over `K_h`.
    pub fn polynomial(&self) -> Poly<NfElem> {
        let lin = Poly::new(vec![NfElem::one_f(), NfElem::one_f().neg_f()]);
        self.factors.iter().fold(lin, |acc, &k| &acc * &self.factor(k))
    }

    /// Roots `x` of the factor `k` (as roots `x⁻¹` of the label), i.e. `ζ^{±k}`.
    fn factor_roots(&self, k: usize, prec: usize) -> Vec<Complex> {
        let z = Complex::root_of_unity(k as i64, self.h, prec);
        if 2 * k == self.h {
            vec![z]
        } else {
            vec![z.clone(), z.conj()]
        }
    }
}

impl fmt::Display for StratumLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(1 - s)")?;
        for &k in &self.factors {
            if 2 * k == self.h {
                write!(f, "(1 + s)")?;
            } else if 4 * k == self.h {
                write!(f, "(1 + s^2)")?;
            } else if 3 * k == self.h {
                write!(f, "(1 + s + s^2)")?;
            } else if 6 * k == self.h {
                write!(f, "(1 - s + s^2)")?;
            } else {
                write!(f, "(1 - 2cos(2π·{k}/{})s + s^2)", self.h)?;
            }
        }
        Ok(())
    }
}

impl Serialize for StratumLabel {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("StratumLabel", 5)?;
        st.serialize_field("h", &self.h)?;
        st.serialize_field("factors", &self.factors)?;
        st.serialize_field("degree", &self.degree())?;
        st.serialize_field("label", &self.to_string())?;
        st.serialize_field("polynomial", &self.polynomial().display("s"))?;
        st.end()
    }
}

/// Initial tuples whose coefficients may be embedded in `K_h`.
pub trait IntoNf: Field {
    fn to_nf(&self) -> NfElem;
}

impl IntoNf for Q {
    fn to_nf(&self) -> NfElem {
        NfElem::rational(self.clone())
    }
}

impl IntoNf for NfElem {
    fn to_nf(&self) -> NfElem {
        self.clone()
    }
}

/// Exact rational `h`-th root of a positive rational, when it exists.
pub fn rational_root(a: &Q, h: usize) -> Option<Q> {
    use num_traits::Signed;
    if !a.is_positive() {
        return None;
    }
    let root = |n: &num_bigint::BigInt| {
        let r = n.nth_root(h as u32);
        (r.pow(h as u32) == *n).then_some(r)
    };
    Some(Q::new(root(a.numer())?, root(a.denom())?))
}

/// Stratum of a positive tuple: the label `L` with `Δ^op(s) = L(r s)`, `r = A^{1/h}`.
///
/// Factor membership is decided numerically with a wide margin; when `r` is
/// rational the identity `Δ^op(s) = L(rs)` is then confirmed exactly.
pub fn stratum_classify<F: IntoNf>(initials: &[F]) -> Result<StratumLabel> {
    check_initials(initials)?;
    if let Some(class) = initials.iter().position(|a| a.real_sign() != Some(std::cmp::Ordering::Greater)) {
        return Err(Error::InvalidInput(format!("initial a1^[{class}] is not positive")));
    }
    let h = initials.len();
    let nums = numerators(initials)?;
    let pair = denominator_pair(initials, &nums)?;
    let mut prec = 256;
    let factors = loop {
        let r = pair.a.to_complex(prec + 32).re.nth_root(h);
        let probe = StratumLabel { h, factors: BTreeSet::new() };
        let mut present = BTreeSet::new();
        let mut ambiguous = false;
        for k in 1..=h / 2 {
            let z = &probe.factor_roots(k, prec + 32)[0];
            // x = r·ζ^k; test Δ^op(x⁻¹)
            let x = &Complex::from_real(r.clone()) * z;
            let l = pair.delta_op.eval_complex(&x.inv()).log2_abs();
            if l < -(prec as f64) * 0.75 {
                present.insert(k);
            } else if l < -(prec as f64) * 0.25 {
                ambiguous = true;
            }
        }
        if !ambiguous {
            break present;
        }
        if prec >= crate::roots::PRECISION_CAP {
            return Err(Error::RootIsolation { cap_bits: prec, detail: "stratum membership undecided".into() });
        }
        prec *= 2;
    };
    let label = StratumLabel { h, factors };
    if label.degree() != pair.d_p {
        return Err(Error::GcdMismatch(format!("label {label} has degree {} but Δ^op has degree {}", label.degree(), pair.d_p)));
    }
    if let Some(r) = pair.a.to_nf().as_q().and_then(|a| rational_root(&a, h)) {
        let want = label.polynomial().compose_scale(&NfElem::rational(r));
        if pair.delta_op.map(|c| c.to_nf()) != want {
            return Err(Error::GcdMismatch(format!("Δ^op = {} is not {label} at the exact radius", pair.delta_op.display("s"))));
        }
    }
    Ok(label)
}

/// Positive initials in `K_h` whose stratum is `label`, with `A = r^h`.
///
/// Starting from `c(u) = L(u)/(1 - u)` plus small rational noise, the class-0
/// numerator is `c(u)(1 - u^h)/L(u)` at `u = rs`, and the initials are read
/// off its cumulative-product coefficients.
pub fn stratum_sample(label: &StratumLabel, r: &Q, seed: u64) -> Result<Vec<NfElem>> {
    stratum_sample_with_budget(label, r, seed, 64)
}

pub fn stratum_sample_with_budget(label: &StratumLabel, r: &Q, seed: u64, budget: usize) -> Result<Vec<NfElem>> {
    use num_traits::Signed;
    if !r.is_positive() {
        return Err(Error::InvalidInput("sampling radius must be positive".into()));
    }
    let h = label.h;
    let big_l = label.polynomial();
    let one = NfElem::one_f();
    let lin = Poly::new(vec![one.clone(), one.neg_f()]);
    let q = big_l.exact_div(&lin)?;
    let full = Poly::one_minus(one.clone(), h);
    let delta = full.exact_div(&big_l)?;
    let rr = NfElem::rational(r.clone());
    let a_total = rr.pow_f(h);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let free = label.degree() - 1;
    for _ in 0..budget {
        let noise: Poly<NfElem> = if free == 0 {
            Poly::zero()
        } else {
            let mut c = vec![NfElem::zero_f()];
            for _ in 0..free {
                let num: i64 = rng.gen_range(-9..=9);
                c.push(NfElem::rational(Q::new(num.into(), rng.gen_range(1..=9i64).into())));
            }
            Poly::new(c)
        };
        let dn = &delta * &noise;
        let bound = dn.coeffs().iter().map(|x| x.to_real(64).abs().to_f64()).fold(0.0f64, f64::max);
        let eps = if bound == 0.0 {
            Q::from_integer(0.into())
        } else {
            Q::new(1.into(), ((4.0 * bound).ceil() as i64 + rng.gen_range(0..4)).into())
        };
        let c = &q + &noise.scale(&NfElem::rational(eps));
        let a0 = (&delta * &c).compose_scale(&rr);
        let cs: Vec<NfElem> = (0..h).map(|j| a0.coeff(j)).collect();
        if cs.iter().any(|x| x.real_sign() != Some(std::cmp::Ordering::Greater)) {
            continue;
        }
        let mut initials = vec![NfElem::zero_f(); h];
        if h == 1 {
            initials[0] = a_total.clone();
        } else {
            initials[0] = cs[1].clone();
            for j in 1..h - 1 {
                initials[h - j] = cs[j + 1].div_f(&cs[j]);
            }
            initials[1] = a_total.div_f(&cs[h - 1]);
        }
        if stratum_classify(&initials).ok().as_ref() == Some(label) {
            return Ok(initials);
        }
    }
    Err(Error::SampleBudgetExhausted { budget, label: label.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{q, qi};
    use proptest::prelude::*;

    fn pq(c: &[Q]) -> Poly<Q> {
        Poly::new(c.to_vec())
    }

    fn machi() -> Vec<Q> {
        vec![q(5, 7), q(7, 10)]
    }

    fn h4() -> Vec<Q> {
        vec![q(3, 2), qi(2), q(1, 2), q(2, 3)]
    }

    #[test]
    fn numerator_examples() {
        let n = numerators(&machi()).unwrap();
        assert_eq!(n[0], pq(&[qi(1), q(5, 7)]));
        assert_eq!(n[1], pq(&[qi(1), q(7, 10)]));
        assert_eq!(numerators(&[q(3, 4)]).unwrap(), vec![Poly::one()]);
        let n4 = numerators(&h4()).unwrap();
        assert_eq!(n4[0], pq(&[qi(1), q(3, 2), qi(1), q(1, 2)]));
        assert!(relation_holds(&h4(), &n4));
        assert_eq!(numerators(&[qi(1), qi(0)]).unwrap_err(), Error::ZeroInitial { class: 1 });
    }

    #[test]
    fn discriminant_examples() {
        assert_eq!(discriminant(&machi()).unwrap(), q(-1, 70));
        assert_eq!(coefficient_matrix(&machi()).unwrap().rank(), 2);
        let eq = vec![q(2, 3), q(2, 3)];
        assert_eq!(discriminant(&eq).unwrap(), qi(0));
        assert_eq!(coefficient_matrix(&eq).unwrap().rank(), 1);
    }

    #[test]
    fn denominator_pair_examples() {
        let m = machi();
        let p = denominator_pair(&m, &numerators(&m).unwrap()).unwrap();
        assert_eq!(p.delta, Poly::one());
        assert_eq!(p.delta_op, pq(&[qi(1), qi(0), q(-1, 2)]));
        assert_eq!((p.d_p, p.rank_m), (2, 2));
        let one = vec![qi(1)];
        let p1 = denominator_pair(&one, &numerators(&one).unwrap()).unwrap();
        assert_eq!(p1.delta_op, pq(&[qi(1), qi(-1)]));
        let n4 = numerators(&h4()).unwrap();
        let p4 = denominator_pair(&h4(), &n4).unwrap();
        assert_eq!(p4.a, qi(1));
        assert_eq!(p4.delta, pq(&[qi(1), qi(1)]));
        assert_eq!(p4.delta_op, pq(&[qi(1), qi(-1), qi(1), qi(-1)]));
        assert_eq!((p4.d_p, p4.rank_m), (3, 3));
        let b = reduced_numerators(&p4, &n4).unwrap();
        assert!(b.iter().all(|x| x.deg() == 2));
        assert_eq!(span_rank(&p4, &b), 3);
        assert!(sigma_action_holds(&p4, &h4(), &b));
    }

    #[test]
    fn inconsistent_numerators_are_rejected() {
        let mut n4 = numerators(&h4()).unwrap();
        let good = n4[2].clone();
        n4[2] = &pq(&[qi(1), qi(1)]) * &pq(&[qi(1), qi(0), qi(1)]);
        assert!(matches!(denominator_pair(&h4(), &n4), Err(Error::GcdMismatch(_))));
        n4[2] = good;
        let p = denominator_pair(&machi(), &numerators(&machi()).unwrap()).unwrap();
        let weird = DenominatorPair { delta: pq(&[qi(1), qi(3)]), ..p };
        assert!(matches!(reduced_numerators(&weird, &n4), Err(Error::InexactDivision(_))));
    }

    #[test]
    fn machi_residue_matrix() {
        let m = machi();
        let nums = numerators(&m).unwrap();
        let p = denominator_pair(&m, &nums).unwrap();
        let rm = residue_matrix(&p, &nums, 256).unwrap();
        let prec = 256;
        let s2 = hp::Real::from_i64(2, prec).sqrt();
        let a = &(&s2 * &hp::Real::from_i64(5, prec)) / &hp::Real::from_i64(7, prec);
        let b = &hp::Real::from_i64(7, prec) / &(&s2 * &hp::Real::from_i64(5, prec));
        let one = hp::Real::one(prec);
        let want = [[&one + &a, &one - &a], [&one + &b, &one - &b]];
        let two = Complex::from_real(hp::Real::from_i64(2, prec));
        for e in 0..2 {
            for i in 0..2 {
                let got = &rm.entries[e][i] * &two;
                assert!(hp::dist_f64(&got, &Complex::from_real(want[e][i].clone())) < 1e-60);
            }
        }
        let scaled: Vec<Vec<Complex>> = rm.entries.iter().map(|r| r.iter().map(|z| z * &two).collect()).collect();
        let det = linalg::det_complex(&scaled);
        let target = &s2 / &hp::Real::from_i64(35, prec);
        assert!(hp::dist_f64(&det, &Complex::from_real(target)) < 1e-60);
        assert_eq!(rm.numeric_rank, 2);
        assert!(rm.expansion_residual < 1e-60);
        let one_pair = denominator_pair(&[qi(1)], &[Poly::one()]).unwrap();
        let r1 = residue_matrix(&one_pair, &[Poly::one()], 128).unwrap();
        assert!(hp::dist_f64(&r1.entries[0][0], &Complex::one(128)) < 1e-30);
    }

    #[test]
    fn excluded_roots_carry_zero_residue() {
        let n4 = numerators(&h4()).unwrap();
        let p4 = denominator_pair(&h4(), &n4).unwrap();
        let rm = residue_matrix(&p4, &n4, 256).unwrap();
        assert_eq!(rm.roots.len(), 3);
        assert_eq!(rm.excluded.len(), 1);
        assert!(rm.excluded_max < 1e-60);
        assert_eq!(rm.numeric_rank, 3);
        assert!(rm.expansion_residual < 1e-60);
    }

    #[test]
    fn label_enumeration() {
        let show = |h| StratumLabel::all(h).iter().map(|l| l.to_string()).collect::<Vec<_>>();
        assert_eq!(show(1), ["(1 - s)"]);
        assert_eq!(show(2), ["(1 - s)", "(1 - s)(1 + s)"]);
        assert_eq!(show(4), ["(1 - s)", "(1 - s)(1 + s)", "(1 - s)(1 + s^2)", "(1 - s)(1 + s^2)(1 + s)"]);
        let full = StratumLabel::full(4).polynomial();
        assert_eq!(full.map(|c| c.as_q().unwrap()), Poly::one_minus(qi(1), 4));
        for h in 1..=8 {
            let p = StratumLabel::full(h).polynomial();
            assert_eq!(p.map(|c| c.as_q().expect("rational")), Poly::one_minus(qi(1), h), "h={h}");
        }
    }

    #[test]
    fn classify_examples() {
        assert_eq!(stratum_classify(&machi()).unwrap(), StratumLabel::full(2));
        assert_eq!(stratum_classify(&[q(3, 5), q(3, 5), q(3, 5)]).unwrap(), StratumLabel::new(3, []).unwrap());
        assert_eq!(stratum_classify(&h4()).unwrap(), StratumLabel::new(4, [1]).unwrap());
        assert!(stratum_classify(&[qi(1), qi(-1)]).is_err());
    }

    #[test]
    fn sample_round_trips() {
        for h in 1..=6 {
            for label in StratumLabel::all(h) {
                let s = stratum_sample(&label, &q(2, 3), 7).unwrap();
                assert_eq!(stratum_classify(&s).unwrap(), label);
            }
        }
        let s = stratum_sample(&StratumLabel::new(1, []).unwrap(), &qi(1), 0).unwrap();
        assert_eq!(s, vec![NfElem::one_f()]);
    }

    fn tuple(max_h: usize) -> impl Strategy<Value = Vec<Q>> {
        prop::collection::vec((1i64..12, 1i64..12).prop_map(|(n, d)| q(n, d)), 1..=max_h)
    }

    proptest! {
        #[test]
        fn relation_and_rank(initials in tuple(6)) {
            let nums = numerators(&initials).unwrap();
            prop_assert!(relation_holds(&initials, &nums));
            let p = denominator_pair(&initials, &nums).unwrap();
            prop_assert!(p.rank_matches());
            prop_assert_eq!(&(&p.delta * &p.delta_op), &full_denominator(&initials));
            let b = reduced_numerators(&p, &nums).unwrap();
            prop_assert_eq!(span_rank(&p, &b), p.d_p);
            prop_assert!(sigma_action_holds(&p, &initials, &b));
        }

        #[test]
        fn shift_and_homogeneity(initials in tuple(5), l in (1i64..9, 1i64..9)) {
            let h = initials.len();
            let d = discriminant(&initials).unwrap();
            let mut shifted = initials.clone();
            shifted.rotate_left(1);
            let sign = if h % 2 == 1 { qi(1) } else { qi(-1) };
            prop_assert_eq!(discriminant(&shifted).unwrap(), &sign * &d);
            let lam = q(l.0, l.1);
            let scaled: Vec<Q> = initials.iter().map(|a| a * &lam).collect();
            prop_assert_eq!(discriminant(&scaled).unwrap(), d * lam.pow_f(h * (h - 1) / 2));
        }
    }
}
