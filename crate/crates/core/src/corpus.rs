//! Seeded rational functions with prescribed top boundary poles.
//!
//! Each entry is `B(t)/(1 - c·t^h)^d` plus noise poles of modulus at least
//! `1.5·r` and a polynomial, where `r = |c|^{-1/h}`. On the class `n ≡ e`
//! the coefficients grow like `m^{d-1} c^m B_e` with `n = e + hm` and
//! `B_e = Σ_j b_{e+hj} c^{-j}`, so the ratio limits are
//! `B_{e-1}/B_e` for `e ≥ 1` and `B_{h-1}/(c·B_0)` for `e = 0`.

use num_traits::Signed;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::field::{serde_q, Field, Q};
use crate::poly::Poly;
use crate::ratfn::RationalFunctionRep;

#[derive(Clone, Debug, Serialize)]
pub struct NoisePole {
    /// The pole sits at `1/alpha`.
    #[serde(with = "serde_q")]
    pub alpha: Q,
    pub order: usize,
    #[serde(with = "serde_q")]
    pub weight: Q,
}

#[derive(Clone, Debug, Serialize)]
pub struct CorpusEntry {
    pub seed: u64,
    pub h: usize,
    #[serde(with = "serde_q")]
    pub c: Q,
    /// Order of the top poles.
    pub d: usize,
    pub top_numerator: Poly<Q>,
    pub noise: Vec<NoisePole>,
    pub holomorphic: Poly<Q>,
    pub rep: RationalFunctionRep,
    /// Ratio limits per class modulo `h`, before reduction to the minimal period.
    #[serde(with = "serde_q::vec")]
    pub class_limits: Vec<Q>,
}

const SCALES: [(i64, i64); 8] = [(1, 1), (2, 1), (1, 2), (-1, 1), (3, 2), (-2, 1), (2, 3), (3, 1)];

fn qq(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

fn nonzero(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> i64 {
    loop {
        let x = rng.gen_range(lo..=hi);
        if x != 0 {
            return x;
        }
    }
}

/// `B_e` for each class.
fn class_constants(b: &Poly<Q>, h: usize, d: usize, c: &Q) -> Vec<Q> {
    let inv = c.inv_f();
    (0..h).map(|e| (0..d).fold(Q::zero_f(), |acc, j| acc.add_f(&b.coeff(e + h * j).mul_f(&inv.pow_f(j))))).collect()
}

/// `|alpha|^h·(3/2)^h ≤ |c|`, i.e. the noise pole is at least `1.5·r` away from 0.
fn far_enough(alpha: &Q, h: usize, c: &Q) -> bool {
    let lhs = alpha.abs().mul_f(&qq(3, 2)).pow_f(h);
    lhs <= c.abs()
}

/// A corpus entry from a seed.
pub fn corpus_entry(seed: u64) -> CorpusEntry {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = rng.gen_range(1..=6);
    let d = if rng.gen_bool(0.25) { 2 } else { 1 };
    let &(cn, cd) = SCALES.choose(&mut rng).expect("nonempty");
    let c = qq(cn, cd);
    let (b, consts) = loop {
        let coeffs: Vec<Q> = (0..h * d).map(|_| Q::from_i64(rng.gen_range(-4..=5))).collect();
        let b = Poly::new(coeffs);
        let consts = class_constants(&b, h, d, &c);
        if consts.iter().all(|x| !x.is_zero_f()) {
            break (b, consts);
        }
    };
    let class_limits: Vec<Q> =
        (0..h).map(|e| if e == 0 { consts[h - 1].div_f(&c.mul_f(&consts[0])) } else { consts[e - 1].div_f(&consts[e]) }).collect();

    let top_den = Poly::one_minus(c.clone(), h).pow(d);
    let mut rep = RationalFunctionRep::new(b.clone(), top_den).expect("constant term 1");
    let mut noise = Vec::new();
    for _ in 0..rng.gen_range(0..=2) {
        let alpha = loop {
            let a = qq(nonzero(&mut rng, -3, 3), rng.gen_range(2..=9));
            if far_enough(&a, h, &c) {
                break a;
            }
        };
        let order = rng.gen_range(1..=2);
        let weight = Q::from_i64(nonzero(&mut rng, -3, 3));
        let term = RationalFunctionRep::new(Poly::constant(weight.clone()), Poly::one_minus(alpha.clone(), 1).pow(order))
            .expect("constant term 1");
        rep = rep.add(&term);
        noise.push(NoisePole { alpha, order, weight });
    }
    let holomorphic = Poly::new((0..rng.gen_range(0..=3)).map(|_| Q::from_i64(rng.gen_range(-3..=3))).collect());
    rep = rep.add(&RationalFunctionRep::polynomial(holomorphic.clone())).reduce();
    CorpusEntry { seed, h, c, d, top_numerator: b, noise, holomorphic, rep, class_limits }
}

/// `count` entries with seeds `base, base + 1, ...`.
pub fn duality_corpus(count: usize, base: u64) -> Vec<CorpusEntry> {
    (0..count as u64).map(|i| corpus_entry(base + i)).collect()
}

impl CorpusEntry {
    /// Class limits reduced to their minimal period.
    pub fn expected_initials(&self) -> Vec<Q> {
        let h = self.h;
        let p =
            (1..=h).find(|&p| h.is_multiple_of(p) && (0..h).all(|e| self.class_limits[e] == self.class_limits[(e + p) % h])).unwrap_or(h);
        self.class_limits[..p].to_vec()
    }

    /// `1/c` is the product of the limits over one period of length `h`.
    pub fn expected_period_product(&self) -> Q {
        self.c.inv_f()
    }
}

/// A reduced rational function with denominator of degree `1..=max_deg`,
/// constant term 1 and small integer coefficients. Never a polynomial.
pub fn random_rational(seed: u64, max_deg: usize) -> RationalFunctionRep {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let dd = rng.gen_range(1..=max_deg.max(1));
        let mut den: Vec<Q> = vec![Q::one_f()];
        den.extend((1..dd).map(|_| Q::from_i64(rng.gen_range(-3..=3))));
        den.push(Q::from_i64(nonzero(&mut rng, -3, 3)));
        let num: Vec<Q> = (0..=rng.gen_range(0..=max_deg)).map(|_| Q::from_i64(rng.gen_range(-4..=4))).collect();
        let num = Poly::new(num);
        if num.is_zero() {
            continue;
        }
        let rep = RationalFunctionRep::new(num, Poly::new(den)).expect("constant term 1").reduce();
        if rep.denominator.deg() > 0 {
            return rep;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::qi;

    #[test]
    fn deterministic_and_consistent() {
        let a = corpus_entry(7);
        let b = corpus_entry(7);
        assert_eq!(a.rep, b.rep);
        for e in duality_corpus(40, 1000) {
            let prod = e.class_limits.iter().fold(qi(1), |acc, x| acc * x);
            assert_eq!(prod, e.expected_period_product());
            // constants from the Taylor coefficients themselves: γ_{n-1}/γ_n on a late exact index
            if e.d == 1 {
                let t = e.rep.taylor(241);
                let n = 240;
                let got = &t[n - 1] / &t[n];
                let want = &e.class_limits[n % e.h];
                let diff = crate::field::log2_abs_q(&(got - want));
                assert!(diff < -80.0, "seed {} {diff}", e.seed);
            }
        }
    }

    #[test]
    fn random_rationals_have_poles() {
        for seed in 0..50 {
            let r = random_rational(seed, 6);
            assert!((1..=6).contains(&r.denominator.deg()));
            assert_eq!(r.denominator.constant_term(), Q::one_f());
        }
    }
}
