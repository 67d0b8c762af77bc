//! Segmentation-based semantic features: how much of the scene each
//! category covers, where it is centred, and how spread out it is.

use crate::moments::{accumulate_raw_moments, derive_moments, MomentSet, ShmfMatrix};
use crate::types::SegmentationMask;

/// Rows are `(P'_C, I'_mux, I'_muy, I'_sigmax, I'_sigmay)` per category.
#[derive(Clone, Debug, PartialEq)]
pub struct SsfMatrix {
    pub rows: Vec<[f64; 5]>,
}

impl SsfMatrix {
    pub fn zeros(categories: usize) -> Self {
        SsfMatrix {
            rows: vec![[0.0; 5]; categories],
        }
    }

    pub fn from_moments(moments: &MomentSet) -> Self {
        SsfMatrix {
            rows: (1..=moments.len())
                .map(|n| ssf_row(moments, n, moments.width, moments.height))
                .collect(),
        }
    }

    /// Row of category `n` (1-based).
    pub fn row(&self, n: usize) -> &[f64; 5] {
        &self.rows[n - 1]
    }

    pub fn categories(&self) -> usize {
        self.rows.len()
    }
}

/// SSF row of category `n` expressed through its moments: the pixel count is
/// `M00`, the mean position is the centroid and the variances are
/// `mu20 / M00` and `mu02 / M00`.
pub fn ssf_row(moments: &MomentSet, n: usize, width: usize, height: usize) -> [f64; 5] {
    let cat = moments.category(n);
    if cat.is_absent() {
        return [0.0; 5];
    }
    let (w, h) = (width as f64, height as f64);
    let count = cat.raw.count() as f64;
    let (mx, my) = cat.centroid;
    [
        count / (w * h),
        mx / w,
        my / h,
        (cat.central.m20 / count).max(0.0).sqrt() / w,
        (cat.central.m02 / count).max(0.0).sqrt() / h,
    ]
}

pub fn ssf(mask: &SegmentationMask) -> SsfMatrix {
    SsfMatrix::from_moments(&derive_moments(&accumulate_raw_moments(mask)))
}

/// SHMF and SSF from one shared accumulation pass.
pub fn segmentation_features(mask: &SegmentationMask) -> (ShmfMatrix, SsfMatrix) {
    let moments = derive_moments(&accumulate_raw_moments(mask));
    (
        ShmfMatrix::from_moments(&moments),
        SsfMatrix::from_moments(&moments),
    )
}
