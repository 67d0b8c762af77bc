use crate::error::{Error, Result};

/// Smallest stored standard deviation.
pub const STD_FLOOR: f64 = 1e-8;

/// Per-dimension standardization fitted on training inputs.
#[derive(Clone, Debug, PartialEq)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

/// Input that has been standardized exactly once. Only
/// [`Standardizer::apply`] constructs it.
#[derive(Clone, Debug, PartialEq)]
pub struct Standardized(Vec<f64>);

impl Standardized {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Standardizer {
    /// Fits mean and population standard deviation per dimension. Dimensions
    /// that are constant over the training rows keep unit scale, so unseen
    /// values at inference are only centred.
    pub fn fit(rows: &[Vec<f64>]) -> Result<Self> {
        let first = rows
            .first()
            .ok_or_else(|| Error::Training("cannot standardize an empty set".into()))?;
        let dim = first.len();
        let n = rows.len() as f64;
        let mut mean = vec![0.0; dim];
        for r in rows {
            for (m, v) in mean.iter_mut().zip(r) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; dim];
        for r in rows {
            for ((s, v), m) in var.iter_mut().zip(r).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let std = var
            .into_iter()
            .map(|s| {
                let sd = (s / n).sqrt();
                if sd < STD_FLOOR {
                    1.0
                } else {
                    sd
                }
            })
            .collect();
        Ok(Standardizer { mean, std })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn apply(&self, raw: &[f64]) -> Standardized {
        debug_assert_eq!(raw.len(), self.dim());
        Standardized(
            raw.iter()
                .zip(&self.mean)
                .zip(&self.std)
                .map(|((v, m), s)| (v - m) / s)
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_and_apply() {
        let rows = vec![vec![1.0, 5.0, 0.0], vec![3.0, 5.0, 0.0]];
        let s = Standardizer::fit(&rows).unwrap();
        assert_eq!(s.mean, vec![2.0, 5.0, 0.0]);
        assert_eq!(s.std, vec![1.0, 1.0, 1.0]);
        assert_eq!(s.apply(&[3.0, 7.0, 0.5]).as_slice(), &[1.0, 2.0, 0.5]);
        assert!(s.std.iter().all(|&v| v >= STD_FLOOR));
    }

    #[test]
    fn empty_rejected() {
        assert!(Standardizer::fit(&[]).is_err());
    }
}
