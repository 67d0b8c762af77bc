//! Semantic features from segmentation masks and object detections.
//!
//! Per segmentation category, a single pass over the mask yields log-rescaled
//! Hu invariants (SHMF) and pixel share, mean position and spread (SSF).
//! Detection sets yield per-category occurrence counts (SFV) and pairwise
//! centre-distance bin counts (SFM). The [`classifier`] module fuses these
//! into a small feed-forward scene classifier, [`synth`] generates seeded
//! synthetic scenes, and [`io`] holds the file formats.

pub mod bundle;
pub mod classifier;
pub mod config;
pub mod error;
pub mod extract;
pub mod invariance;
pub mod io;
pub mod moments;
pub mod objfeat;
pub mod oracle;
pub mod ssf;
pub mod synth;
pub mod types;

pub use bundle::{build_bundle, FeatureBundle, FeatureGroups, FeatureShape};
pub use config::{RunConfig, DEFAULT_CONFIDENCE_THRESHOLD};
pub use error::{Error, Result};
pub use extract::{extract, extract_all, Extraction, FeatureArrays};
pub use moments::{
    accumulate_raw_moments, derive_moments, hu_invariants, shmf, HuVector, MomentSet, RawMomentSet,
    ShmfMatrix,
};
pub use objfeat::{sfm, sfv, Sfm, SfmParams, Sfv};
pub use ssf::{segmentation_features, ssf, ssf_row, SsfMatrix};
pub use types::{validate_mask, BoundingBox, Detection, DetectionSet, LabelMap, SegmentationMask};
