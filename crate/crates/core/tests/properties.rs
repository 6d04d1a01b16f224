use hbm::brunn_minkowski::{mixed_volume, volume};
use hbm::geometry::{parse_body, sample_field};
use hbm::stability::{analyze, random_body, StabilityOptions};
use hbm::{BodySpec, SphereGrid, SupportField};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use std::sync::{Arc, OnceLock};

fn grid() -> &'static Arc<SphereGrid> {
    static G: OnceLock<Arc<SphereGrid>> = OnceLock::new();
    G.get_or_init(|| Arc::new(SphereGrid::circle(256).unwrap()))
}

fn body(seed: u64) -> BodySpec {
    random_body(&mut ChaCha20Rng::seed_from_u64(seed)).unwrap()
}

fn field(b: &BodySpec) -> SupportField {
    sample_field(b, grid()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn mixed_area_is_symmetric_and_bilinear(s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>(), t in 0.1f64..3.0) {
        let (k, l, m) = (field(&body(s1)), field(&body(s2)), field(&body(s3)));
        let kl = mixed_volume(&[&k, &l]).unwrap();
        let lk = mixed_volume(&[&l, &k]).unwrap();
        prop_assert!((kl - lk).abs() <= 1e-10 * kl);
        let sum = SupportField::combine(&[(1.0, &l), (t, &m)]).unwrap();
        let lhs = mixed_volume(&[&k, &sum]).unwrap();
        let rhs = kl + t * mixed_volume(&[&k, &m]).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs);
        // Minkowski's first inequality in the plane
        prop_assert!(kl * kl >= volume(&k) * volume(&l) * (1.0 - 1e-12));
    }

    #[test]
    fn body_strings_round_trip(s in any::<u64>()) {
        let b = body(s);
        let again = parse_body(&b.to_string(), 2).unwrap();
        let (x, y) = (field(&b), field(&again));
        prop_assert_eq!(x.h(), y.h());
    }

    #[test]
    fn planar_margins_nonnegative_at_p_zero(s1 in any::<u64>(), s2 in any::<u64>()) {
        let r = analyze(&body(s1), &body(s2), grid(), StabilityOptions::default()).unwrap();
        let m = &r.margins;
        for v in [m.minkowski2, m.minkowski2_variance, m.isoperimetric, m.isoperimetric_variance, m.bm, m.bm_variance] {
            prop_assert!(v >= -1e-8, "{:?}", m);
        }
    }
}

#[test]
fn scaling_is_homogeneous() {
    let k = field(&body(1));
    let l = field(&body(2));
    let v = mixed_volume(&[&k, &l]).unwrap();
    let v3 = mixed_volume(&[&k.scaled(3.0).unwrap(), &l]).unwrap();
    assert!((v3 - 3.0 * v).abs() <= 1e-12 * v3);
    assert!((volume(&k.scaled(2.0).unwrap()) - 4.0 * volume(&k)).abs() <= 1e-12 * volume(&k) * 4.0);
}
