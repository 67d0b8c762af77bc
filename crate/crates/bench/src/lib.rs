//! Fixtures shared by the extraction benchmarks.

use semfeat_core::synth::random_mask;
use semfeat_core::SegmentationMask;

/// `count` random masks of `side x side` pixels over `categories` categories.
pub fn corpus(count: usize, side: usize, categories: u16, seed: u64) -> Vec<SegmentationMask> {
    (0..count as u64)
        .map(|k| {
            random_mask(side, side, categories, seed.wrapping_add(k))
                .expect("valid corpus parameters")
        })
        .collect()
}
