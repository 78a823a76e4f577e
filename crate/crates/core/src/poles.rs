//! Poles of a rational P(t) on its circle of convergence.
//!
//! The denominator is split square-free over ℚ, so multiplicities are exact.
//! Boundary membership `|x| = r` is then decided by exact certificates where
//! possible and by interval separation otherwise:
//!
//! * if `x^M = c` for a rational `c` with `|c|^(1/M) = r`, every root of
//!   `gcd(f, t^M - c)` lies on the circle;
//! * if `r² = ρ` is rational, a root on the circle satisfies `conj(x) = ρ/x`,
//!   so it is a root of `gcd(f, t^n f(ρ/t))`, and the identity is certified
//!   by disk containment;
//! * a root whose disk is the mirror image of a boundary root's disk is its
//!   conjugate and lies on the circle too.
//!
//! Anything left ambiguous triggers a precision doubling, and at the cap the
//! ambiguous roots are reported.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{reconstruct, Field, Q};
use crate::hp::{self, Complex, Real};
use crate::poly::{from_roots, taylor_at, Poly};
use crate::ratfn::RationalFunctionRep;
use crate::roots::{isolate, IsolatedRoot, PRECISION_CAP};

/// `r^k = value` exactly.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RadiusPower {
    pub k: usize,
    #[serde(with = "crate::field::serde_q")]
    pub value: Q,
}

#[derive(Clone, Debug, Serialize)]
pub struct Pole {
    pub z: Complex,
    /// Certified error radius of `z`.
    pub radius: Real,
    pub multiplicity: usize,
    pub on_boundary: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PoleSet {
    /// Boundary poles first (by argument in `[0, 2π)`), then the rest by modulus.
    pub poles: Vec<Pole>,
    /// Minimal pole modulus.
    pub r: Real,
    pub r_error: Real,
    pub r_power: Option<RadiusPower>,
    /// Highest multiplicity among boundary poles.
    pub d_m: usize,
    pub precision: usize,
    /// For each multiplicity, the monic polynomial whose roots are exactly the
    /// boundary poles of that multiplicity, when it was identified over ℚ.
    #[serde(skip)]
    boundary_exact: BTreeMap<usize, Option<Poly<Q>>>,
}

impl PoleSet {
    pub fn boundary(&self) -> impl Iterator<Item = &Pole> {
        self.poles.iter().filter(|p| p.on_boundary)
    }

    /// Boundary poles of top order `d_m`, in argument order.
    pub fn top_poles(&self) -> Vec<&Pole> {
        self.boundary().filter(|p| p.multiplicity == self.d_m).collect()
    }

    /// `r²` when it is known to be rational.
    pub fn r_squared_exact(&self) -> Option<Q> {
        let p = self.r_power.as_ref()?;
        match p.k {
            1 => Some(&p.value * &p.value),
            2 => Some(p.value.clone()),
            _ => None,
        }
    }
}

/// A high-precision polynomial, together with its exact rational form when identified.
#[derive(Clone, Debug, Serialize)]
pub struct NumericPoly {
    pub exact: Option<Poly<Q>>,
    /// Ascending coefficients.
    pub coeffs: Vec<Complex>,
}

impl NumericPoly {
    fn from_exact(p: Poly<Q>, prec: usize) -> Self {
        NumericPoly { coeffs: p.to_complex_coeffs(prec), exact: Some(p) }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn display(&self, var: &str) -> String {
        match &self.exact {
            Some(p) => p.display(var),
            None => {
                let terms: Vec<String> = self.coeffs.iter().enumerate().map(|(i, c)| format!("({})*{var}^{i}", c.to_decimal(20))).collect();
                terms.join(" + ")
            }
        }
    }
}

/// Laurent coefficients `c_{x,1..d}` of P at a pole `x` of order `d`.
#[derive(Clone, Debug, Serialize)]
pub struct Laurent {
    pub pole: Complex,
    pub multiplicity: usize,
    /// `coefficients[j-1]` multiplies `(t - x)^{-j}`.
    pub coefficients: Vec<Complex>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PolarData {
    /// `Δ_P = Π (t - x_i)^{d_i}` over boundary poles.
    pub delta_p: NumericPoly,
    /// `Δ^top = Π (t - x_i)` over boundary poles of order `d_m`.
    pub delta_top: NumericPoly,
    pub laurent: Vec<Laurent>,
}

/// Cancels common factors and normalizes the denominator to `D(0) = 1`.
pub fn reduce(rep: &RationalFunctionRep) -> Result<RationalFunctionRep> {
    if rep.denominator.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    if rep.denominator.constant_term().is_zero_f() {
        return Err(Error::ZeroConstantTerm);
    }
    Ok(rep.reduce())
}

pub fn boundary_poles(rep: &RationalFunctionRep, prec: usize) -> Result<PoleSet> {
    boundary_poles_capped(rep, prec, PRECISION_CAP)
}

/// As [`boundary_poles`] with an explicit precision cap.
pub fn boundary_poles_capped(rep: &RationalFunctionRep, prec: usize, cap: usize) -> Result<PoleSet> {
    let rep = reduce(rep)?;
    if rep.denominator.deg() == 0 {
        return Err(Error::InvalidInput("a polynomial has no poles".into()));
    }
    let sqf = rep.denominator.squarefree();
    let mut bits = prec.max(64);
    loop {
        match attempt(&sqf, bits, cap)? {
            Ok(set) => return Ok(set),
            Err(ambiguous) if bits >= cap => return Err(Error::UndecidableBoundary { cap_bits: cap, ambiguous }),
            Err(_) => bits = (bits * 2).min(cap),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Status {
    OnCircle,
    OffCircle,
    /// Roots of `gcd(f, t^n f(ρ/t))`, decided one by one.
    Pairing,
    Unknown,
}

struct Piece {
    poly: Poly<Q>,
    mult: usize,
    status: Status,
}

#[derive(Clone)]
enum Radius {
    Exact { k: usize, value: Q },
    Numeric,
}

fn split(pieces: Vec<Piece>, idx: usize, g: &Poly<Q>, on_g: Status, on_cofactor: Status) -> Vec<Piece> {
    let mut out = Vec::with_capacity(pieces.len() + 1);
    for (i, p) in pieces.into_iter().enumerate() {
        if i != idx {
            out.push(p);
            continue;
        }
        let cof = p.poly.exact_div(g).expect("gcd divides its argument");
        out.push(Piece { poly: g.monic(), mult: p.mult, status: on_g });
        if cof.deg() > 0 {
            out.push(Piece { poly: cof.monic(), mult: p.mult, status: on_cofactor });
        }
    }
    out
}

/// `t^n f(ρ/t)`.
fn rho_reflect(f: &Poly<Q>, rho: &Q) -> Poly<Q> {
    let n = f.deg();
    let mut c = vec![Q::zero_f(); n + 1];
    let mut rp = Q::one_f();
    for k in 0..=n {
        c[n - k] = f.coeff(k).mul_f(&rp);
        rp = rp.mul_f(rho);
    }
    Poly::new(c)
}

/// Smallest `M` with `z^M` numerically equal to a small-height rational.
fn unity_scale(z: &Complex, max_m: usize, bits: usize) -> Option<(usize, Q)> {
    let tol_log2 = -(bits as f64) / 2.0;
    let max_den = 1u64 << (bits / 4).min(62);
    for m in 1..=max_m {
        let w = z.powi(m);
        let mag = w.log2_abs();
        if w.im.log2_abs() - mag.max(0.0) > tol_log2 {
            continue;
        }
        let rad = Q::new(1.into(), num_bigint::BigInt::from(1) << (bits / 2).saturating_sub(mag.max(0.0) as usize));
        if let Some(c) = reconstruct(&w.re.to_rational(), &rad, max_den) {
            if !c.is_zero_f() {
                return Some((m, c));
            }
        }
    }
    None
}

fn abs_q(x: &Q) -> Q {
    if x < &Q::zero_f() {
        -x.clone()
    } else {
        x.clone()
    }
}

fn radius_real(rad: &Radius, prec: usize) -> Option<Real> {
    match rad {
        Radius::Exact { k, value } => Some(Real::from_rational(value, prec).nth_root(*k)),
        Radius::Numeric => None,
    }
}

/// Image of a disk under `w ↦ ρ/w`, enclosed in a disk.
fn reflect_disk(d: &IsolatedRoot, rho: &Q) -> Option<IsolatedRoot> {
    let prec = d.z.prec();
    let m = d.z.abs();
    let gap = &m - &d.radius;
    if gap.is_negative() || gap.is_zero() {
        return None;
    }
    let rho_r = Real::from_rational(rho, prec);
    let z = &Complex::from_real(rho_r.clone()) / &d.z;
    let radius = &(&rho_r * &d.radius) / &(&m * &gap);
    let radius = &radius * &Real::from_f64(1.0 + 1e-9, prec);
    Some(IsolatedRoot { z, radius })
}

fn conj_disk(d: &IsolatedRoot) -> IsolatedRoot {
    IsolatedRoot { z: d.z.conj(), radius: d.radius.clone() }
}

fn overlapping(list: &[IsolatedRoot], d: &IsolatedRoot) -> Vec<usize> {
    list.iter().enumerate().filter(|(_, x)| x.overlaps(d)).map(|(i, _)| i).collect()
}

type Attempt = std::result::Result<PoleSet, Vec<String>>;

fn attempt(sqf: &[(Poly<Q>, usize)], bits: usize, cap: usize) -> Result<Attempt> {
    let total_deg: usize = sqf.iter().map(|(f, k)| f.deg() * k).sum();
    let max_m = (2 * total_deg).max(2);
    let mut pieces: Vec<Piece> = sqf.iter().map(|(f, k)| Piece { poly: f.monic(), mult: *k, status: Status::Unknown }).collect();
    let mut radius: Option<Radius> = None;
    let mut rho: Option<Q> = None;
    let mut rho_tentative = false;
    let mut rho_disabled = false;
    let mut tried_scale: Vec<(usize, usize)> = Vec::new();

    'outer: loop {
        let iso: Vec<Vec<IsolatedRoot>> = pieces.iter().map(|p| isolate(&p.poly, bits, cap)).collect::<Result<_>>()?;
        let (x0p, x0i) = min_root(&iso);
        let x0 = &iso[x0p][x0i];

        if radius.is_none() {
            if let Some((m, c)) = unity_scale(&x0.z, max_m, bits) {
                // split every undecided piece against t^M - c
                let circle = &Poly::monomial(m, Q::one_f()) - &Poly::constant(c.clone());
                let mut hit = false;
                let mut next = std::mem::take(&mut pieces);
                let mut i = 0;
                while i < next.len() {
                    let g = next[i].poly.gcd(&circle);
                    if g.deg() > 0 && next[i].status == Status::Unknown {
                        hit = true;
                        next = split(next, i, &g, Status::OnCircle, Status::Unknown);
                        i += 2;
                    } else {
                        i += 1;
                    }
                }
                pieces = next;
                if hit {
                    let value = abs_q(&c);
                    rho = match m {
                        1 => Some(&value * &value),
                        2 => Some(value.clone()),
                        _ => None,
                    };
                    radius = Some(Radius::Exact { k: m, value });
                    continue 'outer;
                }
            }
            if !rho_disabled {
                let m2 = x0.z.norm_sqr();
                let rad = Q::new(1.into(), num_bigint::BigInt::from(1) << (bits / 2));
                if let Some(r2) = reconstruct(&m2.to_rational(), &rad, 1u64 << (bits / 4).min(62)) {
                    let mut next = std::mem::take(&mut pieces);
                    let mut i = 0;
                    let mut hit = false;
                    while i < next.len() {
                        let g = next[i].poly.gcd(&rho_reflect(&next[i].poly, &r2));
                        if g.deg() > 0 {
                            hit = true;
                            next = split(next, i, &g, Status::Pairing, Status::OffCircle);
                            i += 2;
                        } else {
                            next[i].status = Status::OffCircle;
                            i += 1;
                        }
                    }
                    pieces = next;
                    if hit {
                        radius = Some(Radius::Exact { k: 2, value: r2.clone() });
                        rho = Some(r2);
                        rho_tentative = true;
                        continue 'outer;
                    }
                    // nothing paired: undo
                    pieces = sqf.iter().map(|(f, k)| Piece { poly: f.monic(), mult: *k, status: Status::Unknown }).collect();
                    rho_disabled = true;
                    continue 'outer;
                }
            }
            radius = Some(Radius::Numeric);
        }
        let rad = radius.clone().expect("radius decided above");
        let r_exact = radius_real(&rad, bits + 64);
        let r_hi = match &r_exact {
            Some(r) => r + &(&r.abs() * &Real::from_f64(hp::epsilon(bits), bits + 64)),
            None => x0.modulus_bounds().1,
        };

        // decide every root
        let mut decided: Vec<Vec<Option<bool>>> = iso.iter().map(|v| vec![None; v.len()]).collect();
        for (pi, p) in pieces.iter().enumerate() {
            for (ri, y) in iso[pi].iter().enumerate() {
                decided[pi][ri] = match p.status {
                    Status::OnCircle => Some(true),
                    Status::OffCircle => Some(false),
                    Status::Pairing => pairing_test(&iso[pi], ri, rho.as_ref().expect("pairing needs ρ")),
                    Status::Unknown => {
                        if r_exact.is_none() && pi == x0p && ri == x0i {
                            Some(true)
                        } else {
                            // a root certified inside the circle would contradict the
                            // choice of x0, so only separation from above decides
                            let (lo, _) = y.modulus_bounds();
                            (lo.cmp_to(&r_hi) == Ordering::Greater).then_some(false)
                        }
                    }
                };
            }
        }
        if rho_tentative {
            // ρ was guessed from x0: it must be certified on the circle, else retract
            if decided[x0p][x0i] != Some(true) {
                pieces = sqf.iter().map(|(f, k)| Piece { poly: f.monic(), mult: *k, status: Status::Unknown }).collect();
                radius = None;
                rho = None;
                rho_tentative = false;
                rho_disabled = true;
                tried_scale.clear();
                continue 'outer;
            }
            rho_tentative = false;
        }
        // undecided unknowns: try a scale certificate of their own, then ρ pairing
        if let Radius::Exact { k, value } = &rad {
            for (pi, p) in pieces.iter().enumerate() {
                if p.status != Status::Unknown {
                    continue;
                }
                for ri in 0..iso[pi].len() {
                    if decided[pi][ri].is_some() || tried_scale.contains(&(pi, ri)) {
                        continue;
                    }
                    tried_scale.push((pi, ri));
                    if let Some((m, c)) = unity_scale(&iso[pi][ri].z, max_m, bits) {
                        // same circle iff |c|^k = value^m
                        if abs_q(&c).pow_f(*k) == value.pow_f(m) {
                            let circle = &Poly::monomial(m, Q::one_f()) - &Poly::constant(c);
                            let g = p.poly.gcd(&circle);
                            if g.deg() > 0 {
                                pieces = split(pieces, pi, &g, Status::OnCircle, Status::Unknown);
                                tried_scale.clear();
                                continue 'outer;
                            }
                        }
                    }
                    if let Some(r2) = &rho {
                        let g = p.poly.gcd(&rho_reflect(&p.poly, r2));
                        if g.deg() > 0 {
                            pieces = split(pieces, pi, &g, Status::Pairing, Status::OffCircle);
                        } else {
                            pieces[pi].status = Status::OffCircle;
                        }
                        tried_scale.clear();
                        continue 'outer;
                    }
                }
            }
        }
        // conjugates of boundary roots
        let mut changed = true;
        while changed {
            changed = false;
            for pi in 0..pieces.len() {
                for ri in 0..iso[pi].len() {
                    if decided[pi][ri] != Some(true) {
                        continue;
                    }
                    let c = conj_disk(&iso[pi][ri]);
                    let hits = overlapping(&iso[pi], &c);
                    if hits.len() == 1 && decided[pi][hits[0]].is_none() {
                        decided[pi][hits[0]] = Some(true);
                        changed = true;
                    }
                }
            }
        }
        let mut ambiguous = Vec::new();
        for pi in 0..pieces.len() {
            for ri in 0..iso[pi].len() {
                if decided[pi][ri].is_none() {
                    ambiguous.push(iso[pi][ri].z.to_decimal(20));
                }
            }
        }
        if !ambiguous.is_empty() {
            return Ok(Err(ambiguous));
        }
        return Ok(Ok(assemble(&pieces, &iso, &decided, rad, r_exact, &x0.clone(), bits)));
    }
}

/// Whether `ρ/y = conj(y)` for the root in disk `i`, decided by disk containment.
fn pairing_test(list: &[IsolatedRoot], i: usize, rho: &Q) -> Option<bool> {
    let d = &list[i];
    let conj_hits = overlapping(list, &conj_disk(d));
    if conj_hits.len() != 1 {
        return None;
    }
    let j = conj_hits[0];
    let image = reflect_disk(d, rho)?;
    let hits = overlapping(list, &image);
    if hits == [j] {
        Some(true)
    } else if !hits.contains(&j) {
        Some(false)
    } else {
        None
    }
}

fn min_root(iso: &[Vec<IsolatedRoot>]) -> (usize, usize) {
    let mut best: Option<(usize, usize, Real)> = None;
    for (pi, v) in iso.iter().enumerate() {
        for (ri, r) in v.iter().enumerate() {
            let m = r.modulus();
            if best.as_ref().is_none_or(|(_, _, b)| m.cmp_to(b) == Ordering::Less) {
                best = Some((pi, ri, m));
            }
        }
    }
    let (pi, ri, _) = best.expect("denominator has roots");
    (pi, ri)
}

/// Argument in `[0, 2π)` with tiny imaginary parts snapped to zero.
pub fn sort_key(z: &Complex) -> f64 {
    let (re, im) = z.to_f64_pair();
    let im = if im.abs() <= 1e-30 * re.abs().max(1e-300) { 0.0 } else { im };
    let a = im.atan2(re);
    if a < 0.0 {
        a + 2.0 * std::f64::consts::PI
    } else {
        a
    }
}

fn assemble(
    pieces: &[Piece],
    iso: &[Vec<IsolatedRoot>],
    decided: &[Vec<Option<bool>>],
    rad: Radius,
    r_exact: Option<Real>,
    x0: &IsolatedRoot,
    bits: usize,
) -> PoleSet {
    let mut poles = Vec::new();
    let mut boundary_exact: BTreeMap<usize, Option<Poly<Q>>> = BTreeMap::new();
    for (pi, p) in pieces.iter().enumerate() {
        let flags: Vec<bool> = decided[pi].iter().map(|d| d.expect("all decided")).collect();
        let all = flags.iter().all(|&b| b);
        let none = flags.iter().all(|&b| !b);
        if !none {
            let entry = boundary_exact.entry(p.mult).or_insert_with(|| Some(Poly::one()));
            *entry = match (entry.take(), all) {
                (Some(acc), true) => Some(&acc * &p.poly),
                _ => None,
            };
        }
        for (ri, y) in iso[pi].iter().enumerate() {
            poles.push(Pole { z: y.z.clone(), radius: y.radius.clone(), multiplicity: p.mult, on_boundary: flags[ri] });
        }
    }
    poles.sort_by(|a, b| match (a.on_boundary, b.on_boundary) {
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        (true, true) => sort_key(&a.z).total_cmp(&sort_key(&b.z)),
        (false, false) => a.z.abs().cmp_to(&b.z.abs()),
    });
    let d_m = poles.iter().filter(|p| p.on_boundary).map(|p| p.multiplicity).max().unwrap_or(0);
    let (r, r_error, r_power) = match (rad, r_exact) {
        (Radius::Exact { k, value }, Some(r)) => {
            let e = &r * &Real::from_f64(hp::epsilon(bits), bits + 64);
            (r.with_prec(bits), e.with_prec(bits), Some(RadiusPower { k, value }))
        }
        _ => {
            let (lo, hi) = x0.modulus_bounds();
            (x0.modulus(), (&(&hi - &lo) / &Real::from_i64(2, bits)).with_prec(bits), None)
        }
    };
    PoleSet { poles, r, r_error, r_power, d_m, precision: bits, boundary_exact }
}

/// Attempts to identify a numerically known monic polynomial over ℚ: the
/// rationalized candidate must divide `target` exactly.
fn exactify(coeffs: &[Complex], target: &Poly<Q>, bits: usize) -> Option<Poly<Q>> {
    let rad = Q::new(1.into(), num_bigint::BigInt::from(1) << (bits / 3));
    let max_den = 1u64 << (bits / 4).min(62);
    let mut c = Vec::with_capacity(coeffs.len());
    for z in coeffs {
        if z.im.log2_abs() > -(bits as f64) / 3.0 {
            return None;
        }
        c.push(reconstruct(&z.re.to_rational(), &rad, max_den)?);
    }
    let cand = Poly::new(c);
    (cand.deg() + 1 == coeffs.len() && cand.divides(target)).then_some(cand)
}

pub fn polar_polynomials(rep: &RationalFunctionRep, poles: &PoleSet) -> Result<PolarData> {
    let rep = reduce(rep)?;
    let bits = poles.precision;
    let sqf = rep.denominator.squarefree();
    let factor_of = |k: usize| sqf.iter().find(|(_, m)| *m == k).map(|(f, _)| f.clone()).unwrap_or_else(Poly::one);

    let mut delta_p_exact = Some(Poly::<Q>::one());
    let mut delta_p_num = vec![Complex::one(bits)];
    let mut mults: Vec<usize> = poles.boundary().map(|p| p.multiplicity).collect();
    mults.sort_unstable();
    mults.dedup();
    let mut top = None;
    for &k in &mults {
        let roots: Vec<Complex> = poles.boundary().filter(|p| p.multiplicity == k).map(|p| p.z.clone()).collect();
        let num = from_roots(&roots, bits);
        let exact = poles.boundary_exact.get(&k).cloned().flatten().or_else(|| exactify(&num, &factor_of(k), bits));
        let part = match &exact {
            Some(p) => NumericPoly::from_exact(p.clone(), bits),
            None => NumericPoly { exact: None, coeffs: num },
        };
        if k == poles.d_m {
            top = Some(part.clone());
        }
        for _ in 0..k {
            delta_p_num = mul_complex(&delta_p_num, &part.coeffs);
        }
        delta_p_exact = match (delta_p_exact, &part.exact) {
            (Some(acc), Some(p)) => Some(&acc * &p.pow(k)),
            _ => None,
        };
    }
    let delta_p = match delta_p_exact {
        Some(p) => NumericPoly::from_exact(p, bits),
        None => NumericPoly { exact: None, coeffs: delta_p_num },
    };
    let delta_top = top.unwrap_or_else(|| NumericPoly::from_exact(Poly::one(), bits));
    let laurent = poles
        .boundary()
        .map(|p| {
            Ok(Laurent {
                pole: p.z.clone(),
                multiplicity: p.multiplicity,
                coefficients: laurent_coefficients(&rep.numerator, &rep.denominator, &p.z, p.multiplicity)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(PolarData { delta_p, delta_top, laurent })
}

fn mul_complex(a: &[Complex], b: &[Complex]) -> Vec<Complex> {
    let prec = a[0].prec();
    let mut out = vec![Complex::zero(prec); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    out
}

/// Principal-part coefficients of `N/D` at a pole `x` of order `d`:
/// `N/D = Σ_{j=1..d} c_j (t - x)^{-j} + holomorphic`.
pub fn laurent_coefficients(num: &Poly<Q>, den: &Poly<Q>, x: &Complex, d: usize) -> Result<Vec<Complex>> {
    let prec = x.prec();
    let beta = taylor_at(&den.to_complex_coeffs(prec), x, den.deg());
    let e: Vec<Complex> = beta[d.min(beta.len())..].to_vec();
    check_order(&beta, d, x)?;
    let alpha = taylor_at(&num.to_complex_coeffs(prec), x, d);
    // series quotient α/e up to order d-1
    let mut q: Vec<Complex> = Vec::with_capacity(d);
    for i in 0..d {
        let mut acc = alpha[i].clone();
        for j in 1..=i {
            if j < e.len() {
                acc = &acc - &(&e[j] * &q[i - j]);
            }
        }
        q.push(&acc / &e[0]);
    }
    Ok((1..=d).map(|j| q[d - j].clone()).collect())
}

/// Leading Laurent coefficient `N(x)·d!/D^{(d)}(x)` at a pole of order `d`.
pub fn leading_laurent(num: &Poly<Q>, den: &Poly<Q>, x: &Complex, d: usize) -> Result<Complex> {
    let prec = x.prec();
    let beta = taylor_at(&den.to_complex_coeffs(prec), x, d);
    check_order(&beta, d, x)?;
    Ok(&num.eval_complex(x) / &beta[d])
}

/// The Taylor coefficients `β_j` of the denominator at `x` must vanish for
/// `j < d` and not at `j = d`.
fn check_order(beta: &[Complex], d: usize, x: &Complex) -> Result<()> {
    let prec = x.prec();
    let scale: f64 = beta.iter().map(|b| b.log2_abs()).fold(f64::NEG_INFINITY, f64::max).max(0.0);
    let small = |b: &Complex| b.is_zero() || b.log2_abs() - scale < -(prec as f64) * 0.6;
    if d >= beta.len() || small(&beta[d]) {
        return Err(Error::OrderMismatch { pole: x.to_decimal(20), detail: format!("pole order below {d}") });
    }
    if let Some(j) = (0..d).find(|&j| !small(&beta[j])) {
        return Err(Error::OrderMismatch { pole: x.to_decimal(20), detail: format!("not a root of order {d} (β_{j} ≠ 0)") });
    }
    Ok(())
}

/// Minimal modulus of the poles of a rational function.
pub fn min_pole_modulus(rep: &RationalFunctionRep, prec: usize) -> Result<Real> {
    Ok(boundary_poles(rep, prec)?.r)
}
