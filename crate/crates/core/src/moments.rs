//! Per-category image moments and Hu invariants.
//!
//! Raw moments use 1-based pixel coordinates: column `j` in `1..=w` is the
//! x axis and row `i` in `1..=h` is the y axis, so `M_pq = sum j^p i^q`.
//! One pass over the mask fills the raw moments of every category; central
//! and normalized moments are then derived algebraically.

use crate::types::SegmentationMask;

/// Hu values with magnitude below this are treated as zero by the log rescale.
pub const HU_EPSILON: f64 = 1e-30;

/// Raw moment orders `(p, q)` in storage order.
pub const RAW_ORDERS: [(u32, u32); 10] = [
    (0, 0),
    (1, 0),
    (0, 1),
    (2, 0),
    (1, 1),
    (0, 2),
    (3, 0),
    (2, 1),
    (1, 2),
    (0, 3),
];

/// Central/normalized moment orders `(p, q)` in storage order.
pub const CENTRAL_ORDERS: [(u32, u32); 7] =
    [(2, 0), (1, 1), (0, 2), (3, 0), (2, 1), (1, 2), (0, 3)];

/// Exact integer raw moments of one category.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RawMoments {
    sums: [u128; 10],
}

impl RawMoments {
    pub fn from_sums(sums: [u128; 10]) -> Self {
        RawMoments { sums }
    }

    pub fn sums(&self) -> &[u128; 10] {
        &self.sums
    }

    /// Pixel count `M00`.
    pub fn count(&self) -> u64 {
        self.sums[0] as u64
    }

    pub fn is_absent(&self) -> bool {
        self.sums[0] == 0
    }

    /// `M_pq` as a float, for `p + q <= 3`.
    pub fn get(&self, p: u32, q: u32) -> f64 {
        let idx = RAW_ORDERS
            .iter()
            .position(|&o| o == (p, q))
            .unwrap_or_else(|| panic!("raw moment M{p}{q} is not tracked"));
        self.sums[idx] as f64
    }

    /// Centroid `(x, y)` = `(M10/M00, M01/M00)`, `None` when absent.
    pub fn centroid(&self) -> Option<(f64, f64)> {
        if self.is_absent() {
            return None;
        }
        let n = self.sums[0] as f64;
        Some((self.sums[1] as f64 / n, self.sums[2] as f64 / n))
    }
}

/// Raw moments for every category of one mask, before derivation.
#[derive(Clone, Debug, PartialEq)]
pub struct RawMomentSet {
    pub width: usize,
    pub height: usize,
    /// Entry `n - 1` holds category `n`.
    pub categories: Vec<RawMoments>,
}

/// Accumulates the ten raw moments of every category in a single pass.
///
/// Each labelled pixel adds its column powers into a per-row accumulator of
/// its own category; at the end of a row, the touched categories fold the row
/// sums into the totals with the row's powers. All arithmetic is integer, so
/// the result is exact.
pub fn accumulate_raw_moments(mask: &SegmentationMask) -> RawMomentSet {
    let categories = mask.categories() as usize;
    let mut totals = vec![[0u128; 10]; categories + 1];
    let mut row_sums = vec![[0u64; 4]; categories + 1];
    let mut touched: Vec<usize> = Vec::with_capacity(categories);
    let column_powers: Vec<[u64; 3]> = (1..=mask.width() as u64)
        .map(|j| [j, j * j, j * j * j])
        .collect();

    for (r, row) in mask.rows().enumerate() {
        for (&c, jp) in row.iter().zip(&column_powers) {
            if c == 0 {
                continue;
            }
            let acc = &mut row_sums[c as usize];
            if acc[0] == 0 {
                touched.push(c as usize);
            }
            acc[0] += 1;
            acc[1] += jp[0];
            acc[2] += jp[1];
            acc[3] += jp[2];
        }

        let i = r as u128 + 1;
        let (i2, i3) = (i * i, i * i * i);
        for &c in &touched {
            let [s0, s1, s2, s3] = row_sums[c].map(u128::from);
            let t = &mut totals[c];
            t[0] += s0;
            t[1] += s1;
            t[2] += s0 * i;
            t[3] += s2;
            t[4] += s1 * i;
            t[5] += s0 * i2;
            t[6] += s3;
            t[7] += s2 * i;
            t[8] += s1 * i2;
            t[9] += s0 * i3;
            row_sums[c] = [0; 4];
        }
        touched.clear();
    }

    RawMomentSet {
        width: mask.width(),
        height: mask.height(),
        categories: totals
            .into_iter()
            .skip(1)
            .map(RawMoments::from_sums)
            .collect(),
    }
}

/// Second- and third-order moments in [`CENTRAL_ORDERS`] layout.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct OrderMoments {
    pub m20: f64,
    pub m11: f64,
    pub m02: f64,
    pub m30: f64,
    pub m21: f64,
    pub m12: f64,
    pub m03: f64,
}

impl OrderMoments {
    pub fn to_array(&self) -> [f64; 7] {
        [
            self.m20, self.m11, self.m02, self.m30, self.m21, self.m12, self.m03,
        ]
    }

    pub fn get(&self, p: u32, q: u32) -> f64 {
        let idx = CENTRAL_ORDERS
            .iter()
            .position(|&o| o == (p, q))
            .unwrap_or_else(|| panic!("moment order ({p}, {q}) is not tracked"));
        self.to_array()[idx]
    }
}

/// Fully derived moments of one category.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CategoryMoments {
    pub raw: RawMoments,
    /// `(x, y)` centroid in 1-based pixel coordinates; `(0, 0)` when absent.
    pub centroid: (f64, f64),
    /// Central moments `mu_pq`.
    pub central: OrderMoments,
    /// Normalized central moments `eta_pq`.
    pub normalized: OrderMoments,
}

impl CategoryMoments {
    pub fn is_absent(&self) -> bool {
        self.raw.is_absent()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MomentSet {
    pub width: usize,
    pub height: usize,
    /// Entry `n - 1` holds category `n`.
    pub categories: Vec<CategoryMoments>,
}

impl MomentSet {
    /// Moments of category `n` (1-based).
    pub fn category(&self, n: usize) -> &CategoryMoments {
        &self.categories[n - 1]
    }

    pub fn len(&self) -> usize {
        self.categories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.categories.is_empty()
    }
}

/// Derives centroids, central and normalized central moments from raw sums.
pub fn derive_moments(raw: &RawMomentSet) -> MomentSet {
    MomentSet {
        width: raw.width,
        height: raw.height,
        categories: raw.categories.iter().map(derive_category).collect(),
    }
}

fn derive_category(raw: &RawMoments) -> CategoryMoments {
    let Some(centroid) = raw.centroid() else {
        return CategoryMoments {
            raw: *raw,
            ..Default::default()
        };
    };
    let central = exact_central(raw).unwrap_or_else(|| float_central(raw, centroid));
    let mu00 = raw.count() as f64;
    let norm = |mu: f64, order: i32| {
        // r = order / 2 + 1
        let r = order as f64 / 2.0 + 1.0;
        mu / mu00.powf(r)
    };
    let normalized = OrderMoments {
        m20: norm(central.m20, 2),
        m11: norm(central.m11, 2),
        m02: norm(central.m02, 2),
        m30: norm(central.m30, 3),
        m21: norm(central.m21, 3),
        m12: norm(central.m12, 3),
        m03: norm(central.m03, 3),
    };
    CategoryMoments {
        raw: *raw,
        centroid,
        central,
        normalized,
    }
}

/// Binomial expansion about the centroid, carried out on integers scaled by
/// `M00` (second order) or `M00^2` (third order) so the only rounding is the
/// final division. `None` on `i128` overflow.
fn exact_central(raw: &RawMoments) -> Option<OrderMoments> {
    let s: Vec<i128> = raw
        .sums
        .iter()
        .map(|&v| i128::try_from(v).ok())
        .collect::<Option<_>>()?;
    let (n, a, b) = (s[0], s[1], s[2]);
    let (m20, m11, m02, m30, m21, m12, m03) = (s[3], s[4], s[5], s[6], s[7], s[8], s[9]);

    let mul = |x: i128, y: i128| x.checked_mul(y);
    let second = |m: i128, x: i128, y: i128| mul(m, n)?.checked_sub(mul(x, y)?);
    // n^2 M - n (c1) + 2 t, where c1 and t are the order-specific cross terms
    let third = |m: i128, cross: i128, tail: i128| {
        mul(mul(m, n)?, n)?
            .checked_sub(mul(n, cross)?)?
            .checked_add(mul(2, tail)?)
    };

    let n2 = mul(n, n)?;
    let c30 = mul(3, mul(a, m20)?)?;
    let c03 = mul(3, mul(b, m02)?)?;
    let c21 = mul(b, m20)?.checked_add(mul(2, mul(a, m11)?)?)?;
    let c12 = mul(a, m02)?.checked_add(mul(2, mul(b, m11)?)?)?;

    let nf = n as f64;
    let n2f = n2 as f64;
    Some(OrderMoments {
        m20: second(m20, a, a)? as f64 / nf,
        m11: second(m11, a, b)? as f64 / nf,
        m02: second(m02, b, b)? as f64 / nf,
        m30: third(m30, c30, mul(mul(a, a)?, a)?)? as f64 / n2f,
        m21: third(m21, c21, mul(mul(a, a)?, b)?)? as f64 / n2f,
        m12: third(m12, c12, mul(mul(a, b)?, b)?)? as f64 / n2f,
        m03: third(m03, c03, mul(mul(b, b)?, b)?)? as f64 / n2f,
    })
}

fn float_central(raw: &RawMoments, (xc, yc): (f64, f64)) -> OrderMoments {
    let m = |p, q| raw.get(p, q);
    OrderMoments {
        m20: m(2, 0) - xc * m(1, 0),
        m11: m(1, 1) - xc * m(0, 1),
        m02: m(0, 2) - yc * m(0, 1),
        m30: m(3, 0) - 3.0 * xc * m(2, 0) + 2.0 * xc * xc * m(1, 0),
        m21: m(2, 1) - yc * m(2, 0) - 2.0 * xc * m(1, 1) + 2.0 * xc * xc * m(0, 1),
        m12: m(1, 2) - xc * m(0, 2) - 2.0 * yc * m(1, 1) + 2.0 * yc * yc * m(1, 0),
        m03: m(0, 3) - 3.0 * yc * m(0, 2) + 2.0 * yc * yc * m(0, 1),
    }
}

/// Seven Hu invariants and their log-rescaled form.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct HuVector {
    pub raw: [f64; 7],
    pub rescaled: [f64; 7],
}

impl HuVector {
    pub fn from_raw(raw: [f64; 7]) -> Self {
        HuVector {
            raw,
            rescaled: raw.map(log_rescale),
        }
    }
}

/// `-sign(h) * ln|h|`, with values below [`HU_EPSILON`] mapped to zero.
pub fn log_rescale(h: f64) -> f64 {
    if h.abs() < HU_EPSILON {
        0.0
    } else {
        -h.signum() * h.abs().ln()
    }
}

/// The seven Hu polynomials of the normalized central moments.
pub fn hu_from_normalized(eta: &OrderMoments) -> [f64; 7] {
    let OrderMoments {
        m20,
        m11,
        m02,
        m30,
        m21,
        m12,
        m03,
    } = *eta;
    let a = m30 - 3.0 * m12;
    let b = 3.0 * m21 - m03;
    let s = m30 + m12;
    let t = m21 + m03;
    let (s2, t2) = (s * s, t * t);
    [
        m20 + m02,
        (m20 - m02).powi(2) + 4.0 * m11 * m11,
        a * a + b * b,
        s2 + t2,
        a * s * (s2 - 3.0 * t2) + b * t * (3.0 * s2 - t2),
        (m20 - m02) * (s2 - t2) + 4.0 * m11 * s * t,
        b * s * (s2 - 3.0 * t2) - a * t * (3.0 * s2 - t2),
    ]
}

/// Hu vector of category `n` (1-based). Absent categories yield zeros.
pub fn hu_invariants(moments: &MomentSet, n: usize) -> HuVector {
    let cat = moments.category(n);
    if cat.is_absent() {
        return HuVector::default();
    }
    HuVector::from_raw(hu_from_normalized(&cat.normalized))
}

/// Segmentation-based Hu-moment features: one rescaled Hu row per category.
#[derive(Clone, Debug, PartialEq)]
pub struct ShmfMatrix {
    pub rows: Vec<[f64; 7]>,
}

impl ShmfMatrix {
    pub fn zeros(categories: usize) -> Self {
        ShmfMatrix {
            rows: vec![[0.0; 7]; categories],
        }
    }

    pub fn from_moments(moments: &MomentSet) -> Self {
        ShmfMatrix {
            rows: (1..=moments.len())
                .map(|n| hu_invariants(moments, n).rescaled)
                .collect(),
        }
    }

    /// Row of category `n` (1-based).
    pub fn row(&self, n: usize) -> &[f64; 7] {
        &self.rows[n - 1]
    }

    pub fn categories(&self) -> usize {
        self.rows.len()
    }
}

/// One accumulation pass, then the SHMF matrix.
pub fn shmf(mask: &SegmentationMask) -> ShmfMatrix {
    ShmfMatrix::from_moments(&derive_moments(&accumulate_raw_moments(mask)))
}
