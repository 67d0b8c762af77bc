use std::fmt::Write as _;
use std::hint::black_box;
use std::time::{Duration, Instant};

use semfeat_core::io::{load_mask, read_manifest};
use semfeat_core::oracle::naive_segmentation_features;
use semfeat_core::synth::random_mask;
use semfeat_core::{segmentation_features, SegmentationMask};

use super::{base_dir, emit};
use crate::args::BenchArgs;
use crate::ToleranceFailure;

/// Single-pass extraction must be at least this much faster than the
/// per-category oracle once the vocabulary reaches [`MIN_CATEGORIES`].
pub const MIN_SPEEDUP: f64 = 3.0;
pub const MIN_CATEGORIES: u16 = 8;
const MIN_DURATION: Duration = Duration::from_millis(300);

/// Megapixels per second of `f` over the corpus, repeated for at least
/// [`MIN_DURATION`].
fn throughput<T>(masks: &[SegmentationMask], f: impl Fn(&SegmentationMask) -> T) -> f64 {
    let pixels: usize = masks.iter().map(|m| m.width() * m.height()).sum();
    let start = Instant::now();
    let mut rounds = 0usize;
    while rounds == 0 || start.elapsed() < MIN_DURATION {
        for m in masks {
            black_box(f(black_box(m)));
        }
        rounds += 1;
    }
    (pixels * rounds) as f64 / 1e6 / start.elapsed().as_secs_f64()
}

pub fn run(args: BenchArgs) -> anyhow::Result<()> {
    let masks: Vec<SegmentationMask> = match &args.manifest {
        Some(manifest) => {
            let vocab = args
                .vocab
                .resolve(Some(&base_dir(manifest).join("labels.json")))?;
            let base = base_dir(manifest);
            read_manifest(manifest)?
                .iter()
                .map(|e| load_mask(base.join(&e.mask), vocab.seg_categories))
                .collect::<Result<_, _>>()?
        }
        None => {
            let vocab = args.vocab.resolve(None)?;
            (0..args.count as u64)
                .map(|k| {
                    random_mask(
                        args.size,
                        args.size,
                        vocab.seg_categories,
                        args.seed.wrapping_add(k),
                    )
                })
                .collect::<Result<_, _>>()?
        }
    };
    anyhow::ensure!(!masks.is_empty(), "the benchmark corpus is empty");
    let categories = masks[0].categories();

    let single = throughput(&masks, segmentation_features);
    let naive = throughput(&masks, naive_segmentation_features);
    let ratio = single / naive;
    let mut report = String::new();
    writeln!(
        report,
        "corpus {} masks, {} categories",
        masks.len(),
        categories
    )?;
    writeln!(report, "single-pass   {single:>10.2} MP/s")?;
    writeln!(report, "per-category  {naive:>10.2} MP/s")?;
    writeln!(report, "speedup       {ratio:>10.2}x")?;
    if categories < MIN_CATEGORIES {
        writeln!(
            report,
            "speedup not asserted below {MIN_CATEGORIES} categories"
        )?;
    } else {
        writeln!(
            report,
            "speedup floor {MIN_SPEEDUP:.1}x {}",
            if ratio >= MIN_SPEEDUP {
                "met"
            } else {
                "MISSED"
            }
        )?;
    }
    emit(&report, args.out.as_deref())?;
    if categories >= MIN_CATEGORIES && ratio < MIN_SPEEDUP {
        return Err(
            ToleranceFailure(format!("speedup {ratio:.2}x is below {MIN_SPEEDUP}x")).into(),
        );
    }
    Ok(())
}
