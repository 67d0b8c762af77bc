use semfeat_core::io::{load_detections, load_mask, read_labels, read_manifest, Split};
use semfeat_core::synth::*;
use semfeat_core::*;

fn small_config(seed: u64) -> DatasetConfig {
    let mut cfg = default_dataset_config(seed);
    cfg.train = 30;
    cfg.test = 12;
    cfg
}

#[test]
fn dataset_files_are_consistent_with_the_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(11);
    let entries = generate_dataset(&cfg, dir.path()).unwrap();
    let labels = read_labels(dir.path().join("labels.json")).unwrap();
    assert_eq!(labels, default_labels());
    assert_eq!(
        read_manifest(dir.path().join("manifest.tsv")).unwrap(),
        entries
    );
    for (k, e) in entries.iter().enumerate() {
        assert_eq!(e.class, k % 6);
        assert_eq!(e.split, if k < 30 { Split::Train } else { Split::Test });
        assert_eq!(e.seed, derive_seed(11, k as u64));
        let mask = load_mask(dir.path().join(&e.mask), labels.seg_categories()).unwrap();
        let dets = load_detections(
            dir.path().join(e.detections.as_ref().unwrap()),
            0.0,
            Some(&labels),
        )
        .unwrap();
        let scene = generate_scene(&cfg.templates[e.class], &cfg.scene, e.seed).unwrap();
        assert_eq!(mask, scene.mask);
        assert_eq!(dets.set, scene.detections);
        assert_eq!(e.occluded, scene.occluded);
    }
}

#[test]
fn classes_are_balanced() {
    let cfg = default_dataset_config(0);
    let classes = cfg.templates.len();
    let per_class = |lo: usize, hi: usize, c: usize| (lo..hi).filter(|k| k % classes == c).count();
    for c in 0..classes {
        assert_eq!(per_class(0, cfg.train, c), cfg.train / classes);
        assert!(per_class(cfg.train, cfg.train + cfg.test, c).abs_diff(cfg.test / classes) <= 1);
    }
}

#[test]
fn confidence_threshold_drops_low_scores() {
    let dir = tempfile::tempdir().unwrap();
    let entries = generate_dataset(&small_config(5), dir.path()).unwrap();
    let (mut kept, mut dropped, mut total) = (0, 0, 0);
    for e in &entries {
        let path = dir.path().join(e.detections.as_ref().unwrap());
        let all = load_detections(&path, 0.0, None).unwrap();
        let some = load_detections(&path, DEFAULT_CONFIDENCE_THRESHOLD, None).unwrap();
        assert_eq!(all.dropped, 0);
        assert_eq!(some.set.len() + some.dropped, all.set.len());
        assert!(some
            .set
            .detections()
            .iter()
            .all(|d| d.confidence >= DEFAULT_CONFIDENCE_THRESHOLD));
        kept += some.set.len();
        dropped += some.dropped;
        total += all.set.len();
    }
    assert!(kept > 0 && dropped > 0);
    assert_eq!(kept + dropped, total);
}

#[test]
fn scenes_are_pure_functions_of_their_seed() {
    let cfg = default_dataset_config(0);
    for (c, t) in cfg.templates.iter().enumerate() {
        let seed = derive_seed(42, c as u64);
        assert_eq!(
            generate_scene(t, &cfg.scene, seed).unwrap(),
            generate_scene(t, &cfg.scene, seed).unwrap()
        );
    }
}

#[test]
fn ambiguity_knob_controls_bed_lookalikes() {
    let scene = default_dataset_config(0).scene;
    let bed = default_labels().seg_index("bed").unwrap();
    let rate = |ambiguity: f64| {
        let t = &default_templates(ambiguity)[2];
        (0..200u64)
            .filter(|&s| {
                generate_scene(t, &scene, s)
                    .unwrap()
                    .mask
                    .pixels()
                    .contains(&bed)
            })
            .count()
    };
    assert_eq!(rate(0.0), 0);
    assert_eq!(rate(1.0), 200);
    assert!((60..140).contains(&rate(DEFAULT_AMBIGUITY)));
}
