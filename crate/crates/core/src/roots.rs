//! Complex root isolation for square-free polynomials.
//!
//! Roots are approximated by Aberth–Ehrlich iteration at a given precision and
//! then certified: around each approximation z_i the disk of radius
//! `n·|p(z_i)| / |lc·Π_{j≠i}(z_i − z_j)|` (inflated for rounding) contains a
//! root, and pairwise disjoint disks each contain exactly one. If the disks
//! overlap, the precision is doubled up to a cap.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::hp::{self, Complex, Real};
use crate::poly::Poly;

/// Default precision cap for refinement, in bits.
pub const PRECISION_CAP: usize = 1024;

#[derive(Clone, Debug)]
pub struct IsolatedRoot {
    pub z: Complex,
    /// Certified radius of a disk around `z` containing exactly this root.
    pub radius: Real,
}

impl IsolatedRoot {
    pub fn modulus(&self) -> Real {
        self.z.abs()
    }

    pub fn radius_f64(&self) -> f64 {
        self.radius.to_f64()
    }

    /// Whether the disks of `self` and `o` intersect.
    pub fn overlaps(&self, o: &IsolatedRoot) -> bool {
        let d = (&self.z - &o.z).abs();
        d.cmp_to(&(&self.radius + &o.radius)) != std::cmp::Ordering::Greater
    }

    /// Whether the disk of `self` contains the point `w` (closed disk).
    pub fn contains(&self, w: &Complex) -> bool {
        (&self.z - w).abs().cmp_to(&self.radius) != std::cmp::Ordering::Greater
    }

    /// Bounds `[lo, hi]` on the modulus of the enclosed root.
    pub fn modulus_bounds(&self) -> (Real, Real) {
        let m = self.modulus();
        let lo = &m - &self.radius;
        let lo = if lo.is_negative() { Real::zero(m.prec()) } else { lo };
        (lo, &m + &self.radius)
    }
}

/// Isolates all roots of a square-free polynomial, refining precision from
/// `prec` up to `cap` bits until all inclusion disks are disjoint.
pub fn isolate<F: Field>(p: &Poly<F>, prec: usize, cap: usize) -> Result<Vec<IsolatedRoot>> {
    let n = p.deg();
    if p.is_zero() || n == 0 {
        return Ok(Vec::new());
    }
    let mut bits = prec.max(64);
    let mut seed: Option<Vec<Complex>> = None;
    loop {
        let coeffs = p.to_complex_coeffs(bits + 32);
        let approx = aberth(&coeffs, bits, seed.take());
        let roots = certify(&coeffs, &approx, bits);
        let last_err = match roots {
            Some(r) if disjoint(&r) => return Ok(r),
            Some(_) => format!("inclusion disks overlap at {bits} bits"),
            None => format!("Aberth iteration did not converge at {bits} bits"),
        };
        if bits >= cap {
            return Err(Error::RootIsolation { cap_bits: cap, detail: last_err });
        }
        seed = Some(jitter(&approx, bits));
        bits = (bits * 2).min(cap);
    }
}

/// Perturbs reused approximations so that conjugate-symmetric pairs sitting
/// on an unresolved cluster do not stay locked in symmetric position.
fn jitter(z: &[Complex], bits: usize) -> Vec<Complex> {
    let rel = 2f64.powf(-(bits as f64) / 3.0);
    z.iter()
        .enumerate()
        .map(|(k, c)| {
            let ang = 0.7 * k as f64 + 0.3;
            let m = rel * c.abs_f64().max(1e-300);
            c + &Complex::from_f64(m * ang.cos(), m * ang.sin(), c.prec())
        })
        .collect()
}

fn disjoint(r: &[IsolatedRoot]) -> bool {
    for i in 0..r.len() {
        for j in i + 1..r.len() {
            if r[i].overlaps(&r[j]) {
                return false;
            }
        }
    }
    true
}

fn derivative(c: &[Complex]) -> Vec<Complex> {
    c.iter().enumerate().skip(1).map(|(i, a)| a.scale(&Real::from_i64(i as i64, a.prec()))).collect()
}

/// Aberth–Ehrlich iteration; returns approximations at `bits` precision.
fn aberth(coeffs: &[Complex], bits: usize, seed: Option<Vec<Complex>>) -> Vec<Complex> {
    let n = coeffs.len() - 1;
    let prec = bits + 32;
    let coeffs: Vec<Complex> = coeffs.iter().map(|c| c.with_prec(prec)).collect();
    if n == 1 {
        return vec![-(&coeffs[0] / &coeffs[1])];
    }
    let dcoeffs = derivative(&coeffs);
    let mut z: Vec<Complex> = match seed {
        Some(s) if s.len() == n => s.iter().map(|c| c.with_prec(prec)).collect(),
        _ => initial_guesses(&coeffs, prec),
    };
    let tol_log2 = -(bits as f64) + 8.0;
    let mut settled = 0;
    for _ in 0..(200 + 20 * n) {
        let mut max_rel = f64::NEG_INFINITY;
        for i in 0..n {
            let pv = hp::horner(&coeffs, &z[i]);
            if pv.is_zero() {
                continue;
            }
            let dv = hp::horner(&dcoeffs, &z[i]);
            let w = &pv / &dv;
            let mut s = Complex::zero(prec);
            for j in 0..n {
                if j != i {
                    s = &s + &(&z[i] - &z[j]).inv();
                }
            }
            let denom = &Complex::one(prec) - &(&w * &s);
            let corr = if denom.is_zero() { w } else { &w / &denom };
            let rel = corr.log2_abs() - z[i].log2_abs().max(0.0);
            max_rel = max_rel.max(rel);
            z[i] = &z[i] - &corr;
        }
        if max_rel < tol_log2 {
            settled += 1;
            if settled >= 2 {
                break;
            }
        }
    }
    z.into_iter().map(|c| c.with_prec(bits)).collect()
}

fn initial_guesses(coeffs: &[Complex], prec: usize) -> Vec<Complex> {
    let n = coeffs.len() - 1;
    let lc = coeffs[n].abs_f64();
    // Fujiwara-type bound on root moduli, and a lower bound from the reversal
    let upper = (0..n).map(|k| (coeffs[k].abs_f64() / lc).powf(1.0 / (n - k) as f64)).fold(0.0, f64::max) * 2.0;
    let c0 = coeffs[0].abs_f64();
    let lower = if c0 > 0.0 {
        let m = (1..=n).map(|k| (coeffs[k].abs_f64() / c0).powf(1.0 / k as f64)).fold(0.0, f64::max) * 2.0;
        1.0 / m
    } else {
        0.0
    };
    let r = if lower > 0.0 { (upper * lower).sqrt() } else { upper / 2.0 };
    let r = if r.is_finite() && r > 0.0 { r } else { 1.0 };
    (0..n)
        .map(|k| {
            let ang = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            // spread moduli a little so symmetric inputs do not stall
            let rr = r * (1.0 + 0.05 * (k as f64 / n as f64));
            Complex::from_f64(rr * ang.cos(), rr * ang.sin(), prec)
        })
        .collect()
}

/// Inclusion radii around each approximation, or `None` if any value is degenerate.
fn certify(coeffs: &[Complex], z: &[Complex], bits: usize) -> Option<Vec<IsolatedRoot>> {
    let n = z.len();
    let prec = bits + 64;
    let coeffs: Vec<Complex> = coeffs.iter().map(|c| c.with_prec(prec)).collect();
    let lc = coeffs[n].abs();
    let abs_coeffs: Vec<Real> = coeffs.iter().map(|c| c.abs()).collect();
    let eps = Real::from_f64(2f64.powi(-(prec as i32 - 8).min(1000)), prec);
    let nn = Real::from_i64(n as i64, prec);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let zi = z[i].with_prec(prec);
        let pv = hp::horner(&coeffs, &zi).abs();
        // rounding bound for Horner: (2n+2)·eps·Σ|c_k||z|^k
        let zabs = zi.abs();
        let mut bound = Real::zero(prec);
        for c in abs_coeffs.iter().rev() {
            bound = &(&bound * &zabs) + c;
        }
        let err = &(&bound * &eps) * &Real::from_i64(2 * n as i64 + 2, prec);
        let mut prod = lc.clone();
        for j in 0..n {
            if j != i {
                prod = &prod * &(&zi - &z[j].with_prec(prec)).abs();
            }
        }
        if prod.is_zero() {
            return None;
        }
        let radius = &(&nn * &(&pv + &err)) / &prod;
        // inflate to absorb the rounding of the radius computation itself
        let radius = &(&radius * &Real::from_f64(1.0 + 1e-6, prec)) + &(&eps * &zabs.max(&Real::one(prec)));
        out.push(IsolatedRoot { z: z[i].clone(), radius: radius.with_prec(bits) });
    }
    Some(out)
}
