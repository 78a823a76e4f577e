//! Rank and discriminant identities on seeded positive rational tuples.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tsl_core::algebra::{denominator_pair, discriminant, numerators, relation_holds};
use tsl_core::field::{qi, Field, Q};

fn tuple(rng: &mut ChaCha8Rng, max_h: usize) -> Vec<Q> {
    let h = rng.gen_range(1..=max_h);
    (0..h).map(|_| Q::new(rng.gen_range(1..=12i64).into(), rng.gen_range(1..=12i64).into())).collect()
}

#[test]
fn rank_equals_opposite_degree() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let a = tuple(&mut rng, 6);
        let nums = numerators(&a).unwrap();
        assert!(relation_holds(&a, &nums), "{a:?}");
        let pair = denominator_pair(&a, &nums).unwrap();
        assert_eq!(pair.rank_m, pair.d_p, "{a:?}");
    }
}

#[test]
fn discriminant_shift_sign_and_homogeneity() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..200 {
        let a = tuple(&mut rng, 5);
        let h = a.len();
        let d = discriminant(&a).unwrap();
        let mut rotated = a.clone();
        rotated.rotate_left(1);
        let sign = if h % 2 == 1 { qi(1) } else { qi(-1) };
        assert_eq!(discriminant(&rotated).unwrap(), &sign * &d);
        let lam = Q::new(rng.gen_range(1..=9i64).into(), rng.gen_range(1..=9i64).into());
        let scaled: Vec<Q> = a.iter().map(|x| x * &lam).collect();
        assert_eq!(discriminant(&scaled).unwrap(), &d * lam.pow_f(h * (h - 1) / 2));
    }
}
