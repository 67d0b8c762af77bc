use proptest::prelude::*;
use semfeat_core::invariance::*;
use semfeat_core::synth::{
    invariance_shape, scalene_triangle, transform_mask, Axis, MaskTransform,
};
use semfeat_core::*;

fn exact_transform() -> impl Strategy<Value = MaskTransform> {
    prop_oneof![
        (-16i64..=16, -16i64..=16).prop_map(|(dx, dy)| MaskTransform::Translate { dx, dy }),
        Just(MaskTransform::Reflect(Axis::Vertical)),
        Just(MaskTransform::Reflect(Axis::Horizontal)),
        (1u8..=3).prop_map(MaskTransform::Rotate90),
    ]
}

fn counts(mask: &SegmentationMask) -> Vec<u64> {
    accumulate_raw_moments(mask)
        .categories
        .iter()
        .map(|m| m.count())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn exact_transforms_preserve_hu_values(seed in any::<u64>(), t in exact_transform()) {
        let mask = invariance_shape(seed, 3);
        let check = &check_invariance(&mask, &[t]).unwrap()[0];
        prop_assert!(check.max_hu_delta <= EXACT_TOLERANCE, "{check}");
        prop_assert!(check.passed(), "{check}");
    }

    #[test]
    fn exact_transforms_conserve_pixel_counts(seed in any::<u64>(), t in exact_transform()) {
        let mask = invariance_shape(seed, 3);
        prop_assert_eq!(counts(&transform_mask(&mask, t).unwrap()), counts(&mask));
    }

    #[test]
    fn reflection_negates_h7(seed in any::<u64>(), vertical in any::<bool>()) {
        let mask = invariance_shape(seed, 3);
        let axis = if vertical { Axis::Vertical } else { Axis::Horizontal };
        let mirrored = transform_mask(&mask, MaskTransform::Reflect(axis)).unwrap();
        let (a, b) = (shmf(&mask), shmf(&mirrored));
        for n in 0..3 {
            for k in 0..6 {
                prop_assert!((a.rows[n][k] - b.rows[n][k]).abs() <= EXACT_TOLERANCE);
            }
            prop_assert_eq!(a.rows[n][6], -b.rows[n][6]);
        }
    }

    #[test]
    fn reflection_mirrors_mean_position(seed in any::<u64>()) {
        let mask = invariance_shape(seed, 3);
        let (w, h) = (mask.width() as f64, mask.height() as f64);
        let x = ssf(&transform_mask(&mask, MaskTransform::Reflect(Axis::Vertical)).unwrap());
        let y = ssf(&transform_mask(&mask, MaskTransform::Reflect(Axis::Horizontal)).unwrap());
        for (n, row) in ssf(&mask).rows.iter().enumerate() {
            if row[0] == 0.0 {
                continue;
            }
            let (rx, ry) = (x.rows[n], y.rows[n]);
            prop_assert!((rx[1] - ((w + 1.0) / w - row[1])).abs() <= 1e-9);
            prop_assert!((ry[2] - ((h + 1.0) / h - row[2])).abs() <= 1e-9);
            for c in [0, 3, 4] {
                prop_assert!((rx[c] - row[c]).abs() <= 1e-9 && (ry[c] - row[c]).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn pure_rotation_keeps_h7_sign(seed in any::<u64>(), k in 1u8..=3) {
        let mask = invariance_shape(seed, 3);
        let (a, b) = (shmf(&mask), shmf(&transform_mask(&mask, MaskTransform::Rotate90(k)).unwrap()));
        for n in 0..3 {
            prop_assert!(a.rows[n][6] == 0.0 || a.rows[n][6].signum() == b.rows[n][6].signum());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn replication_stays_within_scale_tolerance(seed in any::<u64>(), s in 4usize..=5) {
        let mask = invariance_shape(seed, 3);
        let check = &check_invariance(&mask, &[MaskTransform::Scale(s)]).unwrap()[0];
        prop_assert!(check.checked > 0);
        prop_assert!(check.max_hu_delta <= SCALE_TOLERANCE, "{check}");
    }

    #[test]
    fn arbitrary_rotation_stays_within_tolerance(seed in any::<u64>(), theta in -3.1f64..3.1) {
        let mask = scalene_triangle(seed);
        let area = accumulate_raw_moments(&mask).categories[0].count();
        prop_assume!(area >= ROTATION_MIN_AREA);
        let rotated = transform_mask(&mask, MaskTransform::Rotate(theta)).unwrap();
        let (a, b) = (shmf(&mask), shmf(&rotated));
        let orders = if area >= ROTATION_MIN_AREA_H4 { 4 } else { 3 };
        for k in 0..orders {
            prop_assert!((a.rows[0][k] - b.rows[0][k]).abs() <= ROTATION_TOLERANCE, "h'{} area {area}", k + 1);
        }
    }
}

#[test]
fn h7_sign_flips_on_every_eligible_shape() {
    let (mut eligible, mut flipped) = (0, 0);
    for seed in 0..200 {
        let mask = invariance_shape(seed, 3);
        let c = &check_invariance(&mask, &[MaskTransform::Reflect(Axis::Vertical)]).unwrap()[0];
        eligible += c.sign_eligible;
        flipped += c.sign_flipped;
    }
    assert!(
        eligible >= 100,
        "only {eligible} shapes carry a resolvable h7"
    );
    assert_eq!(flipped, eligible);
}

#[test]
fn two_by_two_block_values() {
    let mask = SegmentationMask::new(
        4,
        4,
        vec![0, 0, 0, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 0, 0, 0],
        1,
    )
    .unwrap();
    let m = derive_moments(&accumulate_raw_moments(&mask));
    let c = m.category(1);
    assert_eq!(
        (c.central.m20, c.central.m02, c.central.m11),
        (1.0, 1.0, 0.0)
    );
    assert_eq!((c.normalized.m20, c.normalized.m02), (0.0625, 0.0625));
    let hu = hu_invariants(&m, 1);
    assert_eq!((hu.raw[0], hu.raw[1]), (0.125, 0.0));
    assert!((hu.rescaled[0] - 0.125f64.ln().abs()).abs() < 1e-15);
}
