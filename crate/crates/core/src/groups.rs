//! Growth series of free products of finite cyclic groups.
//!
//! Generator convention: each factor ℤ/pℤ contributes its standard generator
//! `a` and its inverse, both of length 1, so the exponent `k` has length
//! `min(k, p - k)`. Other conventions give different series.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, Q};
use crate::poly::Poly;
use crate::ratfn::RationalFunctionRep;

/// Largest word length accepted by [`bfs_counts`].
pub const BFS_GUARD: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct FreeProductSpec {
    orders: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct RawSpec {
    orders: Vec<u32>,
}

impl TryFrom<RawSpec> for FreeProductSpec {
    type Error = Error;
    fn try_from(r: RawSpec) -> Result<Self> {
        FreeProductSpec::new(r.orders)
    }
}

impl From<FreeProductSpec> for RawSpec {
    fn from(s: FreeProductSpec) -> Self {
        RawSpec { orders: s.orders }
    }
}

impl FreeProductSpec {
    pub fn new(orders: Vec<u32>) -> Result<Self> {
        if orders.is_empty() {
            return Err(Error::InvalidInput("free product needs at least one factor".into()));
        }
        if let Some(p) = orders.iter().find(|&&p| p < 2) {
            return Err(Error::InvalidInput(format!("cyclic factor order {p} must be at least 2")));
        }
        Ok(FreeProductSpec { orders })
    }

    pub fn orders(&self) -> &[u32] {
        &self.orders
    }

    /// Number of exponents of factor `i` with each syllable length.
    fn syllable_weights(&self, i: usize) -> Vec<u64> {
        let p = self.orders[i] as usize;
        let mut w = vec![0u64; p / 2 + 1];
        for k in 1..p {
            w[k.min(p - k)] += 1;
        }
        w
    }
}

/// Spherical growth series `1 + 2t + ... ` of ℤ/pℤ.
pub fn cyclic_spherical(p: u32) -> Poly<Q> {
    let p = p as usize;
    let mut c = vec![Q::zero_f(); p / 2 + 1];
    for k in 0..p {
        let l = k.min(p - k);
        c[l] = c[l].add_f(&Q::one_f());
    }
    Poly::new(c)
}

/// Cumulative growth series `P = σ/(1 - t)` where the spherical series obeys
/// `1/σ = Σ 1/σ_i - (n - 1)`.
pub fn growth_series(spec: &FreeProductSpec) -> RationalFunctionRep {
    let sig: Vec<Poly<Q>> = spec.orders.iter().map(|&p| cyclic_spherical(p)).collect();
    let prod = sig.iter().fold(Poly::one(), |acc, s| &acc * s);
    let mut den = Poly::zero();
    for i in 0..sig.len() {
        let others = sig.iter().enumerate().filter(|(j, _)| *j != i).fold(Poly::one(), |acc, (_, s)| &acc * s);
        den = &den + &others;
    }
    let n1 = Q::from_i64(sig.len() as i64 - 1);
    den = &den - &prod.scale(&n1);
    let den = &den * &Poly::one_minus(Q::one_f(), 1);
    RationalFunctionRep::new(prod, den).expect("σ_i(0) = 1 so the denominator is 1 at 0").reduce()
}

/// Cumulative counts `#Γ_0..#Γ_{n_max}` by dynamic programming over
/// (last factor, total length), counting alternating syllable sequences.
pub fn bfs_counts(spec: &FreeProductSpec, n_max: usize) -> Result<Vec<u64>> {
    if n_max > BFS_GUARD {
        return Err(Error::GuardExceeded { n_max, limit: BFS_GUARD });
    }
    let k = spec.orders.len();
    let weights: Vec<Vec<u64>> = (0..k).map(|i| spec.syllable_weights(i)).collect();
    // ending[i][l]: words of length exactly l whose last syllable lies in factor i
    let mut ending = vec![vec![0u64; n_max + 1]; k];
    let mut exact = vec![0u64; n_max + 1];
    exact[0] = 1;
    for l in 1..=n_max {
        for i in 0..k {
            let mut s = 0u64;
            for (len, &w) in weights[i].iter().enumerate().skip(1) {
                if len <= l {
                    s += w * (exact[l - len] - ending[i][l - len]);
                }
            }
            ending[i][l] = s;
        }
        exact[l] = (0..k).map(|i| ending[i][l]).sum();
    }
    let mut acc = 0;
    Ok(exact
        .into_iter()
        .map(|c| {
            acc += c;
            acc
        })
        .collect())
}

/// Reduced word in a free product: alternating syllables `(factor, exponent)`
/// with `1 ≤ exponent < p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct NormalFormWord {
    pub syllables: Vec<(usize, u32)>,
}

impl NormalFormWord {
    pub fn length(&self, spec: &FreeProductSpec) -> usize {
        self.syllables
            .iter()
            .map(|&(i, k)| {
                let p = spec.orders[i];
                k.min(p - k) as usize
            })
            .sum()
    }

    /// Right multiplication by `a_i^{±1}`.
    pub fn mul_generator(&self, spec: &FreeProductSpec, i: usize, inverse: bool) -> NormalFormWord {
        let p = spec.orders[i];
        let step = if inverse { p - 1 } else { 1 };
        let mut out = self.clone();
        match out.syllables.last_mut() {
            Some((j, k)) if *j == i => {
                *k = (*k + step) % p;
                if *k == 0 {
                    out.syllables.pop();
                }
            }
            _ => out.syllables.push((i, step)),
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::qi;
    use std::collections::HashSet;

    fn spec(o: &[u32]) -> FreeProductSpec {
        FreeProductSpec::new(o.to_vec()).unwrap()
    }

    /// Breadth-first search in the Cayley graph on normal forms.
    fn cayley_bfs(s: &FreeProductSpec, n_max: usize) -> Vec<u64> {
        let mut seen: HashSet<NormalFormWord> = HashSet::new();
        let mut frontier = vec![NormalFormWord::default()];
        seen.insert(NormalFormWord::default());
        let mut out = vec![1u64];
        for _ in 0..n_max {
            let mut next = Vec::new();
            for w in &frontier {
                for i in 0..s.orders().len() {
                    for inv in [false, true] {
                        let v = w.mul_generator(s, i, inv);
                        if seen.insert(v.clone()) {
                            next.push(v);
                        }
                    }
                }
            }
            out.push(out.last().unwrap() + next.len() as u64);
            frontier = next;
        }
        out
    }

    #[test]
    fn machi_growth_series() {
        let p = growth_series(&spec(&[2, 3]));
        let want_num = &Poly::from_q(&[qi(1), qi(1)]) * &Poly::from_q(&[qi(1), qi(2)]);
        let want_den = &Poly::from_q(&[qi(1), qi(0), qi(-2)]) * &Poly::from_q(&[qi(1), qi(-1)]);
        assert_eq!(p.numerator, want_num);
        assert_eq!(p.denominator, want_den);
        let t: Vec<Q> = p.taylor(8);
        assert_eq!(t, [1, 4, 8, 14, 22, 34, 50, 74].map(qi).to_vec());
    }

    #[test]
    fn small_products() {
        let d = growth_series(&spec(&[2, 2]));
        assert_eq!(d, RationalFunctionRep::new(Poly::from_q(&[qi(1), qi(1)]), Poly::from_q(&[qi(1), qi(-2), qi(1)])).unwrap());
        let z2 = growth_series(&spec(&[2]));
        assert_eq!(z2.taylor(4), vec![qi(1), qi(2), qi(2), qi(2)]);
        assert_eq!(bfs_counts(&spec(&[2, 2]), 4).unwrap(), vec![1, 3, 5, 7, 9]);
        assert_eq!(bfs_counts(&spec(&[3, 3]), 2).unwrap(), vec![1, 5, 13]);
        assert_eq!(bfs_counts(&spec(&[2, 3]), 7).unwrap(), vec![1, 4, 8, 14, 22, 34, 50, 74]);
    }

    #[test]
    fn guard_and_validation() {
        assert!(matches!(bfs_counts(&spec(&[2, 3]), 21), Err(Error::GuardExceeded { .. })));
        assert!(FreeProductSpec::new(vec![]).is_err());
        assert!(FreeProductSpec::new(vec![2, 1]).is_err());
        let s: FreeProductSpec = serde_json::from_str(r#"{"orders":[2,3]}"#).unwrap();
        assert_eq!(s.orders(), &[2, 3]);
        assert!(serde_json::from_str::<FreeProductSpec>(r#"{"orders":[0]}"#).is_err());
    }

    #[test]
    fn dp_matches_cayley_graph_search() {
        for o in [vec![2, 3], vec![3, 4], vec![2, 2, 5], vec![6], vec![4, 5, 6]] {
            let s = spec(&o);
            assert_eq!(bfs_counts(&s, 7).unwrap(), cayley_bfs(&s, 7), "{o:?}");
        }
    }

    #[test]
    fn series_matches_dp() {
        for o in [vec![2, 3], vec![3, 3], vec![2, 4, 6], vec![5, 6], vec![2, 2, 2]] {
            let s = spec(&o);
            let t = growth_series(&s).taylor(13);
            let b = bfs_counts(&s, 12).unwrap();
            assert_eq!(t, b.iter().map(|&x| qi(x as i64)).collect::<Vec<_>>(), "{o:?}");
        }
    }
}
