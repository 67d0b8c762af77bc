//! Object-based features: per-category occurrence counts and the
//! inter-object distance-bin tensor.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::DetectionSet;

/// Occurrence count per object category; entry `i - 1` is category `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sfv {
    pub counts: Vec<u32>,
}

impl Sfv {
    pub fn zeros(categories: usize) -> Self {
        Sfv {
            counts: vec![0; categories],
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&c| c as u64).sum()
    }
}

pub fn sfv(detections: &DetectionSet) -> Sfv {
    let mut counts = vec![0u32; detections.categories() as usize];
    for d in detections.detections() {
        counts[d.category as usize - 1] += 1;
    }
    Sfv { counts }
}

/// Distance-bin parameters: `bins` is K, `rho` scales the normalized distance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SfmParams {
    pub bins: usize,
    pub rho: f64,
}

impl Default for SfmParams {
    fn default() -> Self {
        SfmParams { bins: 3, rho: 3.0 }
    }
}

impl SfmParams {
    pub fn new(bins: usize, rho: f64) -> Result<Self> {
        let p = SfmParams { bins, rho };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.bins == 0 {
            return Err(Error::Config(
                "distance bin count must be at least 1".into(),
            ));
        }
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return Err(Error::Config(format!(
                "distance scale factor must be positive, got {}",
                self.rho
            )));
        }
        Ok(())
    }

    /// 1-based bin of a centre distance: `ceil(rho * d / d_max)` clamped to
    /// `1..=K`.
    pub fn bin_of(&self, distance: f64, d_max: f64) -> usize {
        let k = (self.rho * distance / d_max).ceil();
        if k.is_nan() || k < 1.0 {
            1
        } else if k >= self.bins as f64 {
            self.bins
        } else {
            k as usize
        }
    }
}

/// Inter-object distance-bin tensor of shape N x N x K.
#[derive(Clone, Debug, PartialEq)]
pub struct Sfm {
    pub categories: usize,
    pub bins: usize,
    pub rho: f64,
    /// Image diagonal in pixels.
    pub d_max: f64,
    /// Counts in `(i, j, k)` lexicographic order.
    pub counts: Vec<u32>,
}

impl Sfm {
    pub fn zeros(categories: usize, params: SfmParams, d_max: f64) -> Self {
        Sfm {
            categories,
            bins: params.bins,
            rho: params.rho,
            d_max,
            counts: vec![0; categories * categories * params.bins],
        }
    }

    /// Flat index of 1-based `(i, j, k)`.
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        ((i - 1) * self.categories + (j - 1)) * self.bins + (k - 1)
    }

    /// Bin `b(i, j, k)`, all indices 1-based.
    pub fn get(&self, i: usize, j: usize, k: usize) -> u32 {
        self.counts[self.index(i, j, k)]
    }

    pub fn pair_total(&self, i: usize, j: usize) -> u64 {
        (1..=self.bins).map(|k| self.get(i, j, k) as u64).sum()
    }
}

/// Builds the distance-bin tensor by visiting every ordered pair of distinct
/// detections. Distances are between box centres, normalized by the image
/// diagonal.
pub fn sfm(detections: &DetectionSet, params: SfmParams) -> Result<Sfm> {
    params.validate()?;
    let (w, h) = (
        detections.image_width() as f64,
        detections.image_height() as f64,
    );
    let d_max = (w * w + h * h).sqrt();
    let mut out = Sfm::zeros(detections.categories() as usize, params, d_max);
    let centers: Vec<(usize, (f64, f64))> = detections
        .detections()
        .iter()
        .map(|d| (d.category as usize, d.bbox.center()))
        .collect();

    for (a, &(ci, pa)) in centers.iter().enumerate() {
        for &(cj, pb) in &centers[a + 1..] {
            let (dx, dy) = (pa.0 - pb.0, pa.1 - pb.1);
            let d = (dx * dx + dy * dy).sqrt();
            let k = params.bin_of(d, d_max);
            let ij = out.index(ci, cj, k);
            let ji = out.index(cj, ci, k);
            out.counts[ij] += 1;
            out.counts[ji] += 1;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{BoundingBox, Detection};

    fn det(category: u32, cx: f64, cy: f64) -> Detection {
        Detection {
            category,
            bbox: BoundingBox::new(cx - 1.0, cy - 1.0, cx + 1.0, cy + 1.0),
            confidence: 0.9,
        }
    }

    #[test]
    fn empty_set_gives_zero_features() {
        let set = DetectionSet::empty(40, 30, 5).unwrap();
        assert_eq!(sfv(&set), Sfv::zeros(5));
        let m = sfm(&set, SfmParams::default()).unwrap();
        assert_eq!(m.counts.len(), 5 * 5 * 3);
        assert!(m.counts.iter().all(|&c| c == 0));
    }

    #[test]
    fn occurrence_counts() {
        // chair = 1, tv = 2
        let set = DetectionSet::new(
            vec![
                det(1, 5.0, 5.0),
                det(1, 9.0, 5.0),
                det(1, 2.0, 2.0),
                det(2, 7.0, 7.0),
            ],
            20,
            20,
            80,
        )
        .unwrap();
        let v = sfv(&set);
        assert_eq!(v.counts.len(), 80);
        assert_eq!(v.counts[0], 3);
        assert_eq!(v.counts[1], 1);
        assert_eq!(v.total(), 4);
    }

    #[test]
    fn half_diagonal_pair_lands_in_middle_bin() {
        // 30x40 image: diagonal 50; centres 25 apart.
        let set = DetectionSet::new(vec![det(1, 5.0, 5.0), det(2, 20.0, 25.0)], 30, 40, 3).unwrap();
        let m = sfm(&set, SfmParams::new(3, 3.0).unwrap()).unwrap();
        assert_eq!(m.d_max, 50.0);
        assert_eq!(m.get(1, 2, 2), 1);
        assert_eq!(m.get(2, 1, 2), 1);
        assert_eq!(m.counts.iter().sum::<u32>(), 2);
    }

    #[test]
    fn coincident_same_category_pair() {
        let set = DetectionSet::new(vec![det(2, 8.0, 8.0), det(2, 8.0, 8.0)], 16, 16, 2).unwrap();
        let m = sfm(&set, SfmParams::default()).unwrap();
        assert_eq!(m.get(2, 2, 1), 2);
        assert_eq!(m.counts.iter().sum::<u32>(), 2);
    }

    #[test]
    fn bin_assignment_edges() {
        let p = SfmParams::new(3, 3.0).unwrap();
        assert_eq!(p.bin_of(0.0, 10.0), 1);
        assert_eq!(p.bin_of(10.0 / 3.0, 10.0), 1);
        assert_eq!(p.bin_of(3.4, 10.0), 2);
        assert_eq!(p.bin_of(10.0, 10.0), 3);
        assert_eq!(p.bin_of(50.0, 10.0), 3);
    }

    #[test]
    fn bad_parameters_rejected() {
        assert!(SfmParams::new(0, 3.0).is_err());
        assert!(SfmParams::new(3, 0.0).is_err());
        assert!(SfmParams::new(3, -1.0).is_err());
        let set = DetectionSet::empty(4, 4, 1).unwrap();
        assert!(sfm(
            &set,
            SfmParams {
                bins: 3,
                rho: f64::NAN
            }
        )
        .is_err());
    }
}
