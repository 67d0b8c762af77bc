use semfeat_core::extract::{extract, extract_all};
use semfeat_core::io::{
    load_detections, load_mask, read_features, write_features, ExtractionParams,
};
use semfeat_core::synth::{default_dataset_config, generate_dataset};
use semfeat_core::*;

fn bits(v: &[f64]) -> Vec<u64> {
    v.iter().map(|x| x.to_bits()).collect()
}

#[test]
fn array_entry_matches_file_pipeline_on_synthetic_set() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = default_dataset_config(3);
    cfg.train = 60;
    cfg.test = 24;
    let entries = generate_dataset(&cfg, dir.path()).unwrap();
    let labels = &cfg.labels;
    let params = SfmParams::default();
    let mut mismatches = 0;
    for e in &entries {
        let mask = load_mask(dir.path().join(&e.mask), labels.seg_categories()).unwrap();
        let dets = load_detections(
            dir.path().join(e.detections.as_ref().unwrap()),
            0.2,
            Some(labels),
        )
        .unwrap();

        let record = extract(&mask, Some(&dets.set), params).unwrap().to_record(
            labels.obj_categories() as usize,
            ExtractionParams {
                image_width: 96,
                image_height: 96,
                bins: 3,
                rho: 3.0,
                conf_threshold: 0.2,
            },
            None,
        );
        let path = dir.path().join("features").join(format!("{}.json", e.id));
        write_features(&path, &record).unwrap();
        let from_file = read_features(&path).unwrap().to_bundle().unwrap();

        let as_i32: Vec<i32> = mask.pixels().iter().map(|&p| p as i32).collect();
        let arrays = extract_all(
            &as_i32,
            mask.width(),
            mask.height(),
            labels.seg_categories(),
            dets.set.detections(),
            labels.obj_categories(),
            params.bins,
            params.rho,
        )
        .unwrap();
        let same = bits(&arrays.shmf) == bits(&from_file.shmf.concat())
            && bits(&arrays.ssf) == bits(&from_file.ssf.concat())
            && arrays.sfv == from_file.sfv
            && arrays.sfm == from_file.sfm;
        mismatches += usize::from(!same);
    }
    assert_eq!(mismatches, 0);
}

#[test]
fn pgm_fixture_as_array() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fixture.pgm");
    std::fs::write(&path, b"P5\n2 2\n37\n\x00\x01\x01\x02").unwrap();
    let mask = load_mask(&path, 37).unwrap();
    let arrays = extract_all(&[0u8, 1, 1, 2], 2, 2, 37, &[], 80, 3, 3.0).unwrap();
    assert_eq!(bits(&arrays.shmf), bits(&shmf(&mask).rows.concat()));
    assert_eq!(arrays.shmf.len(), 37 * 7);
    assert_eq!(arrays.ssf.len(), 37 * 5);
    assert!(arrays.sfv.iter().all(|&c| c == 0));
    assert_eq!(arrays.sfm.len(), 80 * 80 * 3);
    assert!(arrays.sfm.iter().all(|&c| c == 0));
}

#[test]
fn array_errors_carry_coordinates() {
    let err = extract_all(&[0i64, 0, 0, 0, 0, 9], 3, 2, 4, &[], 1, 3, 3.0).unwrap_err();
    assert!(
        matches!(
            err,
            Error::PixelOutOfRange {
                x: 2,
                y: 1,
                value: 9,
                max: 4
            }
        ),
        "{err}"
    );
    assert!(err.to_string().contains("(2, 1)"));
    let bad_det = [Detection {
        category: 7,
        bbox: BoundingBox::new(0.0, 0.0, 1.0, 1.0),
        confidence: 0.5,
    }];
    assert!(extract_all(&[0u16; 4], 2, 2, 1, &bad_det, 3, 3, 3.0).is_err());
    assert!(extract_all(&[0u16; 4], 2, 2, 1, &[], 3, 0, 3.0).is_err());
}
