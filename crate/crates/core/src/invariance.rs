//! Transform battery for checking SHMF invariance on a concrete mask.
//!
//! Exact transforms (translation, reflection, quarter turns) must leave every
//! rescaled Hu value unchanged to [`EXACT_TOLERANCE`], except that reflection
//! negates `h'7`. Pixel replication and arbitrary rotation are judged against
//! looser rasterization tolerances, and only on categories large enough for
//! those tolerances to be meaningful.

use std::fmt;

use crate::error::Result;
use crate::moments::{accumulate_raw_moments, derive_moments, hu_invariants, HuVector, HU_EPSILON};
use crate::ssf::SsfMatrix;
use crate::synth::{transform_mask, Axis, MaskTransform};
use crate::types::SegmentationMask;

pub const EXACT_TOLERANCE: f64 = 1e-9;
pub const SCALE_TOLERANCE: f64 = 0.05;
pub const ROTATION_TOLERANCE: f64 = 0.15;
/// Smallest category area checked under pixel replication.
pub const SCALE_MIN_AREA: u64 = 100;
/// Smallest category area checked under arbitrary rotation (`h1..h3`).
pub const ROTATION_MIN_AREA: u64 = 400;
/// Smallest category area for which `h4` is checked under arbitrary rotation.
pub const ROTATION_MIN_AREA_H4: u64 = 1000;
/// Under arbitrary rotation, orders with `|h_k|` below this on either side
/// are not compared: their logarithm is dominated by resampling noise.
pub const ROTATION_HU_FLOOR: f64 = 1e-3;
/// Reflection must flip the sign of `h7` whenever `|h7|` reaches this.
pub const SIGN_THRESHOLD: f64 = 1e-12;
pub const SCALE_FACTOR: usize = 4;
pub const ROTATION_ANGLE: f64 = std::f64::consts::FRAC_PI_6;
/// Pixel shares are exact ratios of integers under every checked transform.
const SHARE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckKind {
    Exact,
    Reflection,
    Scale,
    Rotation,
}

impl CheckKind {
    pub fn of(t: MaskTransform) -> Self {
        match t {
            MaskTransform::Translate { .. } | MaskTransform::Rotate90(_) => CheckKind::Exact,
            MaskTransform::Reflect(_) => CheckKind::Reflection,
            MaskTransform::Scale(_) => CheckKind::Scale,
            MaskTransform::Rotate(_) => CheckKind::Rotation,
        }
    }

    pub fn tolerance(self) -> f64 {
        match self {
            CheckKind::Exact | CheckKind::Reflection => EXACT_TOLERANCE,
            CheckKind::Scale => SCALE_TOLERANCE,
            CheckKind::Rotation => ROTATION_TOLERANCE,
        }
    }
}

/// Outcome of one transform against the original mask.
#[derive(Clone, Debug, PartialEq)]
pub struct TransformCheck {
    pub transform: MaskTransform,
    pub kind: CheckKind,
    /// Largest `|Δh'_k|` over checked categories and orders; for reflection
    /// `h'7` is compared by magnitude.
    pub max_hu_delta: f64,
    /// Largest change of any SSF entry, reported only.
    pub max_ssf_delta: f64,
    /// Largest change of a pixel share; checked except under rotation.
    pub max_share_delta: f64,
    /// Categories whose Hu values were compared.
    pub checked: usize,
    /// Reflection only: categories with `|h7| ≥ SIGN_THRESHOLD`, and how many
    /// of them flipped sign.
    pub sign_eligible: usize,
    pub sign_flipped: usize,
}

impl TransformCheck {
    pub fn passed(&self) -> bool {
        let share_ok = self.kind == CheckKind::Rotation || self.max_share_delta <= SHARE_TOLERANCE;
        self.max_hu_delta <= self.kind.tolerance()
            && share_ok
            && self.sign_flipped == self.sign_eligible
    }
}

impl fmt::Display for TransformCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<24} hu {:.3e} (tol {:e}, {} categories)  ssf {:.3e}  share {:.3e}",
            describe(self.transform),
            self.max_hu_delta,
            self.kind.tolerance(),
            self.checked,
            self.max_ssf_delta,
            self.max_share_delta
        )?;
        if self.kind == CheckKind::Reflection {
            write!(
                f,
                "  h7 sign flips {}/{}",
                self.sign_flipped, self.sign_eligible
            )?;
        }
        write!(f, "  {}", if self.passed() { "ok" } else { "VIOLATION" })
    }
}

pub fn describe(t: MaskTransform) -> String {
    match t {
        MaskTransform::Translate { dx, dy } => format!("translate({dx},{dy})"),
        MaskTransform::Rotate90(k) => format!("rotate90({k})"),
        MaskTransform::Rotate(theta) => format!("rotate({theta:.4})"),
        MaskTransform::Scale(s) => format!("scale({s})"),
        MaskTransform::Reflect(Axis::Vertical) => "reflect(vertical)".into(),
        MaskTransform::Reflect(Axis::Horizontal) => "reflect(horizontal)".into(),
    }
}

struct Snapshot {
    areas: Vec<u64>,
    hu: Vec<HuVector>,
    ssf: SsfMatrix,
}

fn snapshot(mask: &SegmentationMask) -> Snapshot {
    let raw = accumulate_raw_moments(mask);
    let areas = raw.categories.iter().map(|m| m.count()).collect();
    let moments = derive_moments(&raw);
    let hu = (1..=moments.len())
        .map(|n| hu_invariants(&moments, n))
        .collect();
    Snapshot {
        areas,
        hu,
        ssf: SsfMatrix::from_moments(&moments),
    }
}

/// Largest shift up to 3 pixels per axis that keeps all labelled pixels in frame.
pub fn safe_translation(mask: &SegmentationMask) -> MaskTransform {
    let (w, h) = (mask.width(), mask.height());
    let (mut x0, mut y0, mut x1, mut y1) = (w, h, 0, 0);
    for (y, row) in mask.rows().enumerate() {
        for (x, &c) in row.iter().enumerate() {
            if c != 0 {
                x0 = x0.min(x);
                y0 = y0.min(y);
                x1 = x1.max(x + 1);
                y1 = y1.max(y + 1);
            }
        }
    }
    if x1 == 0 {
        return MaskTransform::Translate { dx: 0, dy: 0 };
    }
    let pick = |lo: usize, hi: usize, n: usize| -> i64 {
        let (before, after) = (lo as i64, (n - hi) as i64);
        if after >= before {
            after.min(3)
        } else {
            -before.min(3)
        }
    };
    MaskTransform::Translate {
        dx: pick(x0, x1, w),
        dy: pick(y0, y1, h),
    }
}

/// Translation, both reflections, three quarter turns, 4x replication and a
/// 30-degree rotation.
pub fn standard_battery(mask: &SegmentationMask) -> Vec<MaskTransform> {
    vec![
        safe_translation(mask),
        MaskTransform::Reflect(Axis::Vertical),
        MaskTransform::Reflect(Axis::Horizontal),
        MaskTransform::Rotate90(1),
        MaskTransform::Rotate90(2),
        MaskTransform::Rotate90(3),
        MaskTransform::Scale(SCALE_FACTOR),
        MaskTransform::Rotate(ROTATION_ANGLE),
    ]
}

fn compare(before: &Snapshot, after: &Snapshot, transform: MaskTransform) -> TransformCheck {
    let kind = CheckKind::of(transform);
    let mut check = TransformCheck {
        transform,
        kind,
        max_hu_delta: 0.0,
        max_ssf_delta: 0.0,
        max_share_delta: 0.0,
        checked: 0,
        sign_eligible: 0,
        sign_flipped: 0,
    };
    for n in 0..before.areas.len() {
        let (a, b) = (&before.hu[n], &after.hu[n]);
        let area = before.areas[n].min(after.areas[n]);
        let orders = match kind {
            CheckKind::Exact | CheckKind::Reflection => 7,
            CheckKind::Scale if area >= SCALE_MIN_AREA => 7,
            CheckKind::Rotation if area >= ROTATION_MIN_AREA_H4 => 4,
            CheckKind::Rotation if area >= ROTATION_MIN_AREA => 3,
            _ => 0,
        };
        if orders > 0 {
            check.checked += 1;
        }
        for k in 0..orders {
            if kind == CheckKind::Scale
                && (a.raw[k].abs() < HU_EPSILON || b.raw[k].abs() < HU_EPSILON)
            {
                continue;
            }
            if kind == CheckKind::Rotation
                && (a.raw[k].abs() < ROTATION_HU_FLOOR || b.raw[k].abs() < ROTATION_HU_FLOOR)
            {
                continue;
            }
            let delta = if kind == CheckKind::Reflection && k == 6 {
                (a.rescaled[k].abs() - b.rescaled[k].abs()).abs()
            } else {
                (a.rescaled[k] - b.rescaled[k]).abs()
            };
            check.max_hu_delta = check.max_hu_delta.max(delta);
        }
        if kind == CheckKind::Reflection && a.raw[6].abs() >= SIGN_THRESHOLD {
            check.sign_eligible += 1;
            if a.raw[6].signum() == -b.raw[6].signum()
                && a.rescaled[6].signum() == -b.rescaled[6].signum()
            {
                check.sign_flipped += 1;
            }
        }
        let (ra, rb) = (before.ssf.rows[n], after.ssf.rows[n]);
        check.max_share_delta = check.max_share_delta.max((ra[0] - rb[0]).abs());
        for c in 0..5 {
            check.max_ssf_delta = check.max_ssf_delta.max((ra[c] - rb[c]).abs());
        }
    }
    check
}

/// Applies `transforms` to `mask` and compares each result with the original.
pub fn check_invariance(
    mask: &SegmentationMask,
    transforms: &[MaskTransform],
) -> Result<Vec<TransformCheck>> {
    let base = snapshot(mask);
    transforms
        .iter()
        .map(|&t| Ok(compare(&base, &snapshot(&transform_mask(mask, t)?), t)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rectangle() -> SegmentationMask {
        let (w, h) = (40, 40);
        let mut px = vec![0u16; w * h];
        for y in 12..26 {
            for x in 10..32 {
                px[y * w + x] = 1;
            }
        }
        SegmentationMask::new(w, h, px, 1).unwrap()
    }

    #[test]
    fn solid_rectangle_passes_battery() {
        let m = rectangle();
        for check in check_invariance(&m, &standard_battery(&m)).unwrap() {
            assert!(check.passed(), "{check}");
            if matches!(check.kind, CheckKind::Exact | CheckKind::Reflection) {
                assert!(check.max_hu_delta <= EXACT_TOLERANCE);
            }
        }
    }

    #[test]
    fn reflection_flips_h7() {
        let m = crate::synth::invariance_shape(0, 3);
        let checks = check_invariance(&m, &[MaskTransform::Reflect(Axis::Vertical)]).unwrap();
        assert!(checks[0].sign_eligible > 0);
        assert!(checks[0].passed(), "{}", checks[0]);
    }

    #[test]
    fn translation_stays_in_frame() {
        let m = rectangle();
        assert_eq!(
            safe_translation(&m),
            MaskTransform::Translate { dx: -3, dy: 3 }
        );
        let mut px = vec![0u16; 16];
        px[15] = 1;
        let corner = SegmentationMask::new(4, 4, px, 1).unwrap();
        assert_eq!(
            safe_translation(&corner),
            MaskTransform::Translate { dx: -3, dy: -3 }
        );
    }

    #[test]
    fn clipping_surfaces_as_error() {
        let mut px = vec![0u16; 100];
        px[0] = 1;
        let m = SegmentationMask::new(10, 10, px, 1).unwrap();
        assert!(check_invariance(&m, &[MaskTransform::Rotate(0.7)]).is_err());
    }
}
