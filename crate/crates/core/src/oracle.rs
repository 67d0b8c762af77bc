//! Literal, per-category reference computations.
//!
//! Every quantity here is evaluated directly from its defining double sum,
//! visiting the whole mask once per category (and again per centred sum).
//! These are slow on purpose: they check the single-pass extractor in tests
//! and serve as the throughput baseline in benchmarks.

use crate::moments::{
    hu_from_normalized, log_rescale, OrderMoments, ShmfMatrix, CENTRAL_ORDERS, RAW_ORDERS,
};
use crate::objfeat::{Sfm, SfmParams};
use crate::ssf::SsfMatrix;
use crate::types::{DetectionSet, SegmentationMask};

fn labelled_pixels(mask: &SegmentationMask, n: u16) -> impl Iterator<Item = (f64, f64)> + '_ {
    let w = mask.width();
    mask.pixels()
        .iter()
        .enumerate()
        .filter(move |&(_, &p)| p == n)
        .map(move |(k, _)| ((k % w + 1) as f64, (k / w + 1) as f64))
}

/// `M_pq` for category `n`, one full pass per category.
pub fn naive_raw_moments(mask: &SegmentationMask, n: u16) -> [f64; 10] {
    let mut out = [0.0; 10];
    for (j, i) in labelled_pixels(mask, n) {
        for (slot, &(p, q)) in out.iter_mut().zip(&RAW_ORDERS) {
            *slot += j.powi(p as i32) * i.powi(q as i32);
        }
    }
    out
}

/// Central moments of category `n` as the direct sum about its centroid.
pub fn literal_central_moments(mask: &SegmentationMask, n: u16) -> OrderMoments {
    let (mut count, mut sx, mut sy) = (0.0, 0.0, 0.0);
    for (j, i) in labelled_pixels(mask, n) {
        count += 1.0;
        sx += j;
        sy += i;
    }
    if count == 0.0 {
        return OrderMoments::default();
    }
    let (cx, cy) = (sx / count, sy / count);
    let mut mu = [0.0; 7];
    for (j, i) in labelled_pixels(mask, n) {
        for (slot, &(p, q)) in mu.iter_mut().zip(&CENTRAL_ORDERS) {
            *slot += (j - cx).powi(p as i32) * (i - cy).powi(q as i32);
        }
    }
    OrderMoments {
        m20: mu[0],
        m11: mu[1],
        m02: mu[2],
        m30: mu[3],
        m21: mu[4],
        m12: mu[5],
        m03: mu[6],
    }
}

/// SSF row of category `n` by the literal pixel-count, mean and deviation sums.
pub fn literal_ssf_row(mask: &SegmentationMask, n: u16) -> [f64; 5] {
    let (w, h) = (mask.width() as f64, mask.height() as f64);
    let mut count = 0.0;
    for y in 0..mask.height() {
        for x in 0..mask.width() {
            if mask.get(x, y) == n {
                count += 1.0;
            }
        }
    }
    if count == 0.0 {
        return [0.0; 5];
    }
    let (mut sj, mut si) = (0.0, 0.0);
    for y in 0..mask.height() {
        for x in 0..mask.width() {
            if mask.get(x, y) == n {
                sj += (x + 1) as f64;
                si += (y + 1) as f64;
            }
        }
    }
    let (mu_x, mu_y) = (sj / count, si / count);
    let (mut vx, mut vy) = (0.0, 0.0);
    for y in 0..mask.height() {
        for x in 0..mask.width() {
            if mask.get(x, y) == n {
                vx += ((x + 1) as f64 - mu_x).powi(2);
                vy += ((y + 1) as f64 - mu_y).powi(2);
            }
        }
    }
    [
        count / (h * w),
        mu_x / w,
        mu_y / h,
        (vx / count).sqrt() / w,
        (vy / count).sqrt() / h,
    ]
}

/// SHMF and SSF matrices built category by category from the literal sums.
pub fn naive_segmentation_features(mask: &SegmentationMask) -> (ShmfMatrix, SsfMatrix) {
    let l = mask.categories();
    let mut shmf = ShmfMatrix::zeros(l as usize);
    let mut ssf = SsfMatrix::zeros(l as usize);
    for n in 1..=l {
        let row = literal_ssf_row(mask, n);
        ssf.rows[n as usize - 1] = row;
        let count = row[0] * (mask.width() * mask.height()) as f64;
        if count == 0.0 {
            continue;
        }
        let mu = literal_central_moments(mask, n);
        let eta = |v: f64, order: f64| v / count.powf(order / 2.0 + 1.0);
        let normalized = OrderMoments {
            m20: eta(mu.m20, 2.0),
            m11: eta(mu.m11, 2.0),
            m02: eta(mu.m02, 2.0),
            m30: eta(mu.m30, 3.0),
            m21: eta(mu.m21, 3.0),
            m12: eta(mu.m12, 3.0),
            m03: eta(mu.m03, 3.0),
        };
        shmf.rows[n as usize - 1] = hu_from_normalized(&normalized).map(log_rescale);
    }
    (shmf, ssf)
}

/// Distance-bin tensor by enumerating every ordered pair `(a, b)`, `a != b`,
/// and recomputing the scaled distance ratio from scratch.
pub fn brute_force_sfm(detections: &DetectionSet, params: SfmParams) -> Vec<u32> {
    let n = detections.categories() as usize;
    let k_max = params.bins;
    let d_max =
        ((detections.image_width().pow(2) + detections.image_height().pow(2)) as f64).sqrt();
    let mut bins = vec![0u32; n * n * k_max];
    let dets = detections.detections();
    for (a, da) in dets.iter().enumerate() {
        for (b, db) in dets.iter().enumerate() {
            if a == b {
                continue;
            }
            let ca = (
                (da.bbox.x_min + da.bbox.x_max) * 0.5,
                (da.bbox.y_min + da.bbox.y_max) * 0.5,
            );
            let cb = (
                (db.bbox.x_min + db.bbox.x_max) * 0.5,
                (db.bbox.y_min + db.bbox.y_max) * 0.5,
            );
            let d = ((ca.0 - cb.0).powi(2) + (ca.1 - cb.1).powi(2)).sqrt();
            let ratio = params.rho * d / d_max;
            // first k with ratio <= k, else the last bin
            let k = (1..=k_max).find(|&k| ratio <= k as f64).unwrap_or(k_max);
            let (i, j) = (da.category as usize, db.category as usize);
            bins[((i - 1) * n + (j - 1)) * k_max + (k - 1)] += 1;
        }
    }
    bins
}

/// Convenience for comparing against [`Sfm::counts`].
pub fn sfm_matches_oracle(sfm: &Sfm, detections: &DetectionSet) -> bool {
    let params = SfmParams {
        bins: sfm.bins,
        rho: sfm.rho,
    };
    sfm.counts == brute_force_sfm(detections, params)
}
