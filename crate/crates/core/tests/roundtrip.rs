use proptest::prelude::*;
use semfeat_core::io::features::{decode_features, encode_features};
use semfeat_core::io::pgm::{encode_p2, encode_p5};
use semfeat_core::io::{parse_pgm, ExtractionParams, FeatureRecord};
use semfeat_core::*;
use std::path::Path;

fn shape() -> impl Strategy<Value = FeatureShape> {
    (1usize..5, 1usize..4, 1usize..4, 0usize..4).prop_map(|(l, n, k, g)| FeatureShape {
        seg_categories: l,
        obj_categories: n,
        bins: k,
        global: g,
    })
}

fn bundle() -> impl Strategy<Value = FeatureBundle> {
    shape().prop_flat_map(|s| {
        let real = || any::<f64>().prop_filter("finite", |v| v.is_finite());
        (
            proptest::collection::vec(proptest::array::uniform7(real()), s.seg_categories),
            proptest::collection::vec(proptest::array::uniform5(real()), s.seg_categories),
            proptest::collection::vec(0u32..1000, s.sfv_len()),
            proptest::collection::vec(0u32..1000, s.sfm_len()),
            proptest::collection::vec(real(), s.global),
        )
            .prop_map(move |(shmf, ssf, sfv, sfm, g)| FeatureBundle {
                shape: s,
                shmf,
                ssf,
                sfv,
                sfm,
                global: (s.global > 0).then_some(g),
            })
    })
}

fn bits(v: &[f64]) -> Vec<u64> {
    v.iter().map(|x| x.to_bits()).collect()
}

proptest! {
    #[test]
    fn flatten_unflatten_is_lossless(b in bundle()) {
        let flat = b.flatten();
        prop_assert_eq!(flat.len(), b.shape.flat_len());
        let back = FeatureBundle::unflatten(b.shape, &flat).unwrap();
        prop_assert_eq!(bits(&back.flatten()), bits(&flat));
        prop_assert_eq!(back, b);
    }

    #[test]
    fn feature_files_round_trip_bit_exactly(b in bundle(), rho in 0.1f64..10.0) {
        let params = ExtractionParams { image_width: 64, image_height: 48, bins: b.shape.bins, rho, conf_threshold: 0.2 };
        let rec = FeatureRecord::from_bundle(&b, params, Some(RunConfig::default()));
        let bytes = encode_features(&rec);
        let back = decode_features(&bytes, Path::new("mem")).unwrap();
        prop_assert_eq!(bits(&back.to_bundle().unwrap().flatten()), bits(&b.flatten()));
        prop_assert_eq!(encode_features(&back), bytes);
    }

    #[test]
    fn pgm_encodings_agree(w in 1usize..20, h in 1usize..20, l in 1u16..300, seed in any::<u64>()) {
        let mask = synth::random_mask(w, h, l, seed).unwrap();
        let p5 = parse_pgm(&encode_p5(&mask), l, Path::new("p5")).unwrap();
        let p2 = parse_pgm(&encode_p2(&mask), l, Path::new("p2")).unwrap();
        prop_assert_eq!(&p5, &mask);
        prop_assert_eq!(&p2, &mask);
    }

    #[test]
    fn validation_is_idempotent(w in 1usize..16, h in 1usize..16, l in 1u16..8, seed in any::<u64>()) {
        let mask = synth::random_mask(w, h, l, seed).unwrap();
        let once = validate_mask(mask.clone(), l).unwrap();
        prop_assert_eq!(&once, &mask);
        prop_assert_eq!(validate_mask(once, l).unwrap(), mask);
    }
}

#[test]
fn p5_fixture_from_bytes() {
    let bytes = b"P5\n2 2\n37\n\x00\x01\x01\x02";
    let mask = parse_pgm(bytes, 2, Path::new("fixture")).unwrap();
    assert_eq!(mask.pixels(), &[0, 1, 1, 2]);
    let truncated = b"P5\n2 2\n37\n\x00\x01\x01";
    assert!(parse_pgm(truncated, 2, Path::new("fixture")).is_err());
}

#[test]
fn bundle_length_example() {
    let s = FeatureShape {
        seg_categories: 2,
        obj_categories: 3,
        bins: 3,
        global: 0,
    };
    assert_eq!(s.flat_len(), 54);
    let z = FeatureBundle::zeros(s);
    assert!(z.flatten().iter().all(|&v| v == 0.0));
}
