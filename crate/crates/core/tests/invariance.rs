//! Accumulation data under derivatives, perturbation by a series of larger
//! radius and rescaling of the variable.

use tsl_core::corpus::duality_corpus;
use tsl_core::field::{q, qi, Field, Q};
use tsl_core::hp::Complex;
use tsl_core::opposite::{detect_accumulation, rotated_match, AccumulationReport, DetectionConfig};
use tsl_core::poly::Poly;
use tsl_core::sequence::{CoefficientStream, SeriesSpec};

const TOL: f64 = 1e-20;
const PREC: usize = 256;

fn machi() -> SeriesSpec {
    SeriesSpec::FreeProduct { orders: vec![2, 3] }
}

fn detect(spec: SeriesSpec) -> AccumulationReport {
    let s = CoefficientStream::new(spec).unwrap();
    detect_accumulation(&s, &DetectionConfig::default()).unwrap()
}

fn values(r: &AccumulationReport) -> Vec<Complex> {
    r.initials.iter().map(|l| l.exact.as_ref().map_or_else(|| l.value.clone(), |x| x.0.to_complex(PREC))).collect()
}

fn subjects() -> Vec<(String, SeriesSpec)> {
    let mut out = vec![("machi".to_string(), machi())];
    for e in duality_corpus(10, 1) {
        out.push((format!("seed {}", e.seed), SeriesSpec::from_rep(&e.rep)));
    }
    out
}

/// `1/(1 - t/4)` has radius 4, beyond every subject's radius.
fn far_series() -> SeriesSpec {
    SeriesSpec::rational(Poly::one(), Poly::new(vec![qi(1), q(-1, 4)]))
}

#[test]
fn derivatives_rotate_the_classes() {
    for (name, spec) in subjects() {
        let base = detect(spec.clone());
        let h = base.h_p.unwrap();
        for m in 1..=2 {
            let d = detect(spec.clone().derivative(m));
            assert_eq!(d.h_p, Some(h), "{name} m={m}");
            assert!(rotated_match(&values(&base), &values(&d), m % h, TOL), "{name} m={m}");
        }
    }
}

#[test]
fn larger_radius_perturbation_is_invisible() {
    for (name, spec) in subjects() {
        let base = detect(spec.clone());
        let p = detect(spec.plus(far_series()));
        assert_eq!(p.h_p, base.h_p, "{name}");
        assert!(rotated_match(&values(&base), &values(&p), 0, TOL), "{name}");
    }
}

#[test]
fn rescaling_divides_the_initials() {
    for c in [qi(2), q(1, 3), q(-3, 2)] {
        for (name, spec) in subjects() {
            let base = detect(spec.clone());
            let r = detect(spec.rescaled(c.clone()));
            assert_eq!(r.h_p, base.h_p, "{name} c={c}");
            let cc = c.to_complex(PREC);
            let want: Vec<Complex> = values(&base).iter().map(|v| v / &cc).collect();
            assert!(rotated_match(&want, &values(&r), 0, TOL), "{name} c={c}");
            let ex: Option<Vec<Q>> = base.exact_real_initials();
            if let (Some(a), Some(b)) = (ex, r.exact_real_initials()) {
                assert_eq!(b, a.iter().map(|x| x.div_f(&c)).collect::<Vec<_>>(), "{name} c={c}");
            }
        }
    }
}
