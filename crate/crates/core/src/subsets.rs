//! Rational subsets of ℤ≥0 (finite unions of residue classes, up to a
//! finite set of exceptions) and finite rational partitions.

use std::collections::BTreeSet;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, Q};
use crate::poly::Poly;
use crate::ratfn::RationalFunctionRep;

/// `U = (⋃_{e ∈ residues} U^[e] ∖ removed) ∪ added`, with `h` minimal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSubset", into = "RawSubset")]
pub struct RationalSubset {
    h: usize,
    residues: BTreeSet<usize>,
    added: BTreeSet<usize>,
    removed: BTreeSet<usize>,
}

#[derive(Serialize, Deserialize)]
struct RawSubset {
    h: usize,
    residues: Vec<usize>,
    #[serde(default)]
    added: Vec<usize>,
    #[serde(default)]
    removed: Vec<usize>,
}

impl TryFrom<RawSubset> for RationalSubset {
    type Error = Error;
    fn try_from(r: RawSubset) -> Result<Self> {
        RationalSubset::new(r.h, r.residues, r.added, r.removed)
    }
}

impl From<RationalSubset> for RawSubset {
    fn from(u: RationalSubset) -> Self {
        RawSubset {
            h: u.h,
            residues: u.residues.into_iter().collect(),
            added: u.added.into_iter().collect(),
            removed: u.removed.into_iter().collect(),
        }
    }
}

impl RationalSubset {
    /// Normalizes: residues reduced mod `h`, exceptions made non-redundant,
    /// and `h` replaced by the minimal period of the residue set.
    pub fn new(
        h: usize,
        residues: impl IntoIterator<Item = usize>,
        added: impl IntoIterator<Item = usize>,
        removed: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        if h == 0 {
            return Err(Error::InvalidInput("period must be positive".into()));
        }
        let residues: BTreeSet<usize> = residues.into_iter().map(|r| r % h).collect();
        let in_classes = |n: usize| residues.contains(&(n % h));
        let added: BTreeSet<usize> = added.into_iter().filter(|&n| !in_classes(n)).collect();
        let removed: BTreeSet<usize> = removed.into_iter().filter(|&n| in_classes(n)).collect();
        let added_removed_overlap = added.intersection(&removed).next().is_some();
        debug_assert!(!added_removed_overlap);
        let p = minimal_period(h, &residues);
        let residues = residues.into_iter().filter(|&r| r < p).collect();
        Ok(RationalSubset { h: p, residues, added, removed })
    }

    /// `U^[e] = {n : n ≡ e mod h}`.
    pub fn residue_class(h: usize, e: usize) -> Self {
        RationalSubset::new(h, [e % h.max(1)], [], []).expect("positive period")
    }

    /// ℤ≥0
    pub fn all() -> Self {
        RationalSubset::residue_class(1, 0)
    }

    pub fn empty() -> Self {
        RationalSubset::new(1, [], [], []).expect("positive period")
    }

    pub fn period(&self) -> usize {
        self.h
    }

    pub fn residues(&self) -> &BTreeSet<usize> {
        &self.residues
    }

    pub fn added(&self) -> &BTreeSet<usize> {
        &self.added
    }

    pub fn removed(&self) -> &BTreeSet<usize> {
        &self.removed
    }

    pub fn contains(&self, n: usize) -> bool {
        if self.added.contains(&n) {
            return true;
        }
        if self.removed.contains(&n) {
            return false;
        }
        self.residues.contains(&(n % self.h))
    }

    /// Largest exceptional index, if any.
    pub fn max_exception(&self) -> Option<usize> {
        self.added.iter().chain(self.removed.iter()).max().copied()
    }

    /// Asymptotic density `#residues / h`.
    pub fn density(&self) -> Q {
        Q::new(self.residues.len().into(), self.h.into())
    }

    /// `Σ_{n∈U} t^n = V(t)/(1 - t^h)` as an (unreduced) exact rational function.
    pub fn generating_function(&self) -> RationalFunctionRep {
        let one = Q::one_f();
        let den = Poly::one_minus(one.clone(), self.h);
        let mut v = Poly::new((0..self.h).map(|r| if self.residues.contains(&r) { one.clone() } else { Q::zero_f() }).collect());
        let mut corr = Poly::zero();
        for &a in &self.added {
            corr = &corr + &Poly::monomial(a, one.clone());
        }
        for &b in &self.removed {
            corr = &corr - &Poly::monomial(b, one.clone());
        }
        v = &v + &(&corr * &den);
        RationalFunctionRep { numerator: v, denominator: den, reduced: false }
    }

    pub fn complement(&self) -> Self {
        RationalSubset::new(
            self.h,
            (0..self.h).filter(|r| !self.residues.contains(r)),
            self.removed.iter().copied(),
            self.added.iter().copied(),
        )
        .expect("positive period")
    }

    /// `U ∩ U^[e]` with `U^[e]` taken modulo `k`.
    pub fn intersect_class(&self, k: usize, e: usize) -> Self {
        let l = self.h.lcm(&k.max(1));
        let keep = |n: &usize| n % k == e % k;
        RationalSubset::new(
            l,
            (0..l).filter(|r| self.residues.contains(&(r % self.h)) && keep(r)),
            self.added.iter().copied().filter(keep),
            self.removed.iter().copied().filter(keep),
        )
        .expect("positive period")
    }
}

fn minimal_period(h: usize, residues: &BTreeSet<usize>) -> usize {
    (1..=h)
        .filter(|d| h.is_multiple_of(*d))
        .find(|&d| (0..h).all(|r| residues.contains(&r) == residues.contains(&((r + d) % h))))
        .unwrap_or(h)
}

/// A finite rational partition of ℤ≥0 ∖ D.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RationalPartition {
    pub parts: Vec<RationalSubset>,
    #[serde(default)]
    pub exceptional: BTreeSet<usize>,
}

impl RationalPartition {
    /// Validates disjointness and covering outside the exceptional set.
    pub fn new(parts: Vec<RationalSubset>, exceptional: BTreeSet<usize>) -> Result<Self> {
        let p = RationalPartition { parts, exceptional };
        p.validate()?;
        Ok(p)
    }

    /// `{U^[e]}_{e ∈ ℤ/hℤ}` with `D = ∅`.
    pub fn standard(h: usize) -> Self {
        assert!(h >= 1, "period must be positive");
        RationalPartition { parts: (0..h).map(|e| RationalSubset::residue_class(h, e)).collect(), exceptional: BTreeSet::new() }
    }

    /// lcm of the minimal periods of the parts.
    pub fn period(&self) -> usize {
        self.parts.iter().fold(1, |acc, u| acc.lcm(&u.period()))
    }

    /// Beyond every exception the membership pattern is periodic, so a window
    /// of one full period past the last exception decides everything.
    pub fn validate(&self) -> Result<()> {
        if self.parts.is_empty() {
            return Err(Error::InvalidInput("partition has no parts".into()));
        }
        let last = self.parts.iter().filter_map(|u| u.max_exception()).chain(self.exceptional.iter().copied()).max().unwrap_or(0);
        for n in 0..=last + self.period() {
            if self.exceptional.contains(&n) {
                continue;
            }
            let hits = self.parts.iter().filter(|u| u.contains(n)).count();
            if hits != 1 {
                return Err(Error::InvalidInput(format!("index {n} lies in {hits} parts")));
            }
        }
        Ok(())
    }
}

/// `partition_period`
pub fn partition_period(p: &RationalPartition) -> usize {
    p.period()
}

/// `standard_partition`
pub fn standard_partition(h: usize) -> RationalPartition {
    RationalPartition::standard(h)
}
