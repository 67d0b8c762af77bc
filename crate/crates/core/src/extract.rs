//! Full extraction pipeline: one mask pass for SHMF and SSF, one detection
//! pass for SFV and SFM.

use crate::bundle::{FeatureBundle, FeatureShape};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::io::{ExtractionParams, FeatureRecord};
use crate::moments::ShmfMatrix;
use crate::objfeat::{sfm, sfv, Sfm, SfmParams, Sfv};
use crate::ssf::{segmentation_features, SsfMatrix};
use crate::types::{Detection, DetectionSet, SegmentationMask};

/// Features of one sample; the object blocks are absent without detections.
#[derive(Clone, Debug, PartialEq)]
pub struct Extraction {
    pub shmf: ShmfMatrix,
    pub ssf: SsfMatrix,
    pub sfv: Option<Sfv>,
    pub sfm: Option<Sfm>,
}

pub fn extract(
    mask: &SegmentationMask,
    detections: Option<&DetectionSet>,
    params: SfmParams,
) -> Result<Extraction> {
    params.validate()?;
    let (shmf, ssf) = segmentation_features(mask);
    let (sfv, sfm) = match detections {
        Some(d) => {
            if (d.image_width(), d.image_height()) != (mask.width(), mask.height()) {
                return Err(Error::Config(format!(
                    "detections describe a {}x{} image but the mask is {}x{}",
                    d.image_width(),
                    d.image_height(),
                    mask.width(),
                    mask.height()
                )));
            }
            (Some(sfv(d)), Some(sfm(d, params)?))
        }
        None => (None, None),
    };
    Ok(Extraction {
        shmf,
        ssf,
        sfv,
        sfm,
    })
}

impl Extraction {
    /// File record; `obj_categories` sizes the shape when detections are absent.
    pub fn to_record(
        &self,
        obj_categories: usize,
        params: ExtractionParams,
        config: Option<RunConfig>,
    ) -> FeatureRecord {
        FeatureRecord {
            shape: FeatureShape {
                seg_categories: self.shmf.categories(),
                obj_categories: self.sfv.as_ref().map_or(obj_categories, |v| v.counts.len()),
                bins: params.bins,
                global: 0,
            },
            params,
            config,
            shmf: Some(self.shmf.rows.clone()),
            ssf: Some(self.ssf.rows.clone()),
            sfv: self.sfv.as_ref().map(|v| v.counts.clone()),
            sfm: self.sfm.as_ref().map(|m| m.counts.clone()),
            global: None,
        }
    }

    /// Bundle with zero object blocks when detections were absent.
    pub fn to_bundle(&self, shape: FeatureShape, global: Option<&[f64]>) -> Result<FeatureBundle> {
        let sfv = self
            .sfv
            .clone()
            .unwrap_or_else(|| Sfv::zeros(shape.obj_categories));
        let sfm = self.sfm.clone().unwrap_or_else(|| {
            Sfm::zeros(
                shape.obj_categories,
                SfmParams {
                    bins: shape.bins,
                    rho: 1.0,
                },
                0.0,
            )
        });
        crate::bundle::build_bundle(shape, &self.shmf, &self.ssf, &sfv, &sfm, global)
    }
}

/// Flat feature arrays returned by [`extract_all`].
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureArrays {
    /// `L x 7`, row-major.
    pub shmf: Vec<f64>,
    /// `L x 5`, row-major.
    pub ssf: Vec<f64>,
    /// Length `N`.
    pub sfv: Vec<u32>,
    /// `N x N x K`, `(i, j, k)` lexicographic.
    pub sfm: Vec<u32>,
}

/// Array-in, array-out extraction for foreign callers.
///
/// `mask` is a row-major `height x width` grid of any integer type. Values
/// outside `0..=seg_categories` are reported with their `(x, y)` coordinate.
#[allow(clippy::too_many_arguments)]
pub fn extract_all<T: Copy + Into<i64>>(
    mask: &[T],
    width: usize,
    height: usize,
    seg_categories: u16,
    detections: &[Detection],
    obj_categories: u32,
    bins: usize,
    rho: f64,
) -> Result<FeatureArrays> {
    if mask.len() != width * height {
        return Err(Error::MaskShape {
            width,
            height,
            reason: format!("expected {} values, found {}", width * height, mask.len()),
        });
    }
    let mut pixels = Vec::with_capacity(mask.len());
    for (k, &v) in mask.iter().enumerate() {
        let v: i64 = v.into();
        if !(0..=seg_categories as i64).contains(&v) {
            return Err(Error::PixelOutOfRange {
                x: k % width,
                y: k / width,
                value: v,
                max: seg_categories as u32,
            });
        }
        pixels.push(v as u16);
    }
    let mask = SegmentationMask::new(width, height, pixels, seg_categories)?;
    let dets = DetectionSet::new(detections.to_vec(), width, height, obj_categories)?;
    let e = extract(&mask, Some(&dets), SfmParams::new(bins, rho)?)?;
    Ok(FeatureArrays {
        shmf: e.shmf.rows.iter().flatten().copied().collect(),
        ssf: e.ssf.rows.iter().flatten().copied().collect(),
        sfv: e.sfv.map(|v| v.counts).unwrap_or_default(),
        sfm: e.sfm.map(|m| m.counts).unwrap_or_default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::BoundingBox;

    #[test]
    fn mask_only_leaves_object_blocks_absent() {
        let mask = SegmentationMask::new(2, 2, vec![0, 1, 1, 2], 2).unwrap();
        let e = extract(&mask, None, SfmParams::default()).unwrap();
        assert!(e.sfv.is_none() && e.sfm.is_none());
        let params = ExtractionParams {
            image_width: 2,
            image_height: 2,
            bins: 3,
            rho: 3.0,
            conf_threshold: 0.2,
        };
        let rec = e.to_record(4, params, None);
        assert_eq!(rec.shape.obj_categories, 4);
        assert!(rec.sfm.is_none());
        assert!(rec.to_bundle().is_err());
        let b = e.to_bundle(rec.shape, None).unwrap();
        assert!(b.sfm.iter().all(|&c| c == 0));
    }

    #[test]
    fn frame_mismatch_rejected() {
        let mask = SegmentationMask::void(4, 4, 1).unwrap();
        let dets = DetectionSet::empty(5, 4, 3).unwrap();
        assert!(extract(&mask, Some(&dets), SfmParams::default()).is_err());
    }

    #[test]
    fn extract_all_matches_extract() {
        let raw: Vec<i32> = (0..48).map(|k| k * 7 % 5).collect();
        let dets = vec![
            Detection {
                category: 1,
                bbox: BoundingBox::new(0.0, 0.0, 2.0, 2.0),
                confidence: 0.9,
            },
            Detection {
                category: 2,
                bbox: BoundingBox::new(4.0, 3.0, 8.0, 6.0),
                confidence: 0.5,
            },
        ];
        let out = extract_all(&raw, 8, 6, 4, &dets, 3, 3, 3.0).unwrap();
        let mask = SegmentationMask::new(8, 6, raw.iter().map(|&v| v as u16).collect(), 4).unwrap();
        let set = DetectionSet::new(dets, 8, 6, 3).unwrap();
        let e = extract(&mask, Some(&set), SfmParams::default()).unwrap();
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&out.shmf), bits(&e.shmf.rows.concat()));
        assert_eq!(bits(&out.ssf), bits(&e.ssf.rows.concat()));
        assert_eq!(out.sfv, vec![1, 1, 0]);
        assert_eq!(out.sfm, e.sfm.unwrap().counts);
    }

    #[test]
    fn extract_all_reports_coordinates() {
        let raw: Vec<i64> = vec![0, 1, 2, -1];
        match extract_all(&raw, 2, 2, 2, &[], 1, 3, 3.0).unwrap_err() {
            Error::PixelOutOfRange { x, y, value, .. } => assert_eq!((x, y, value), (1, 1, -1)),
            other => panic!("unexpected {other:?}"),
        }
        let raw: Vec<u8> = vec![0, 3];
        assert!(matches!(
            extract_all(&raw, 2, 1, 2, &[], 1, 3, 3.0),
            Err(Error::PixelOutOfRange {
                x: 1,
                y: 0,
                value: 3,
                ..
            })
        ));
        assert!(extract_all(&raw, 3, 1, 2, &[], 1, 3, 3.0).is_err());
    }

    #[test]
    fn extract_all_empty_detections_give_zero_blocks() {
        let out = extract_all(&[1u16, 0, 2, 2], 2, 2, 2, &[], 4, 3, 3.0).unwrap();
        assert_eq!(out.sfv, vec![0; 4]);
        assert_eq!(out.sfm, vec![0; 48]);
    }
}
