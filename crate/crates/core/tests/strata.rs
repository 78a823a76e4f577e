//! Stratification of positive initial tuples.

use tsl_core::algebra::{stratum_classify, stratum_sample, StratumLabel};
use tsl_core::field::{q, qi, Field};

#[test]
fn every_label_round_trips() {
    for h in 1..=6 {
        for label in StratumLabel::all(h) {
            for (r, seed) in [(qi(1), 1u64), (q(2, 3), 2), (q(5, 4), 3)] {
                let sample = stratum_sample(&label, &r, seed).unwrap();
                assert_eq!(sample.len(), h);
                assert!(sample.iter().all(|a| a.real_sign() == Some(std::cmp::Ordering::Greater)));
                assert_eq!(stratum_classify(&sample).unwrap(), label, "r {r} seed {seed}");
            }
        }
    }
}

#[test]
fn label_counts_and_degrees() {
    for h in 1..=8 {
        let all = StratumLabel::all(h);
        assert_eq!(all.len(), 1 << (h / 2));
        assert_eq!(all.last().unwrap().degree(), h);
        assert_eq!(all[0].degree(), 1);
    }
}
