use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use semfeat_core::io::read_labels;
use semfeat_core::{LabelMap, RunConfig, SfmParams, DEFAULT_CONFIDENCE_THRESHOLD};

#[derive(Parser)]
#[command(
    name = "semfeat",
    version,
    about = "Semantic features from segmentation masks and detections"
)]
pub struct Cli {
    /// Worker threads for batch commands; outputs do not depend on it.
    #[arg(long, global = true, env = "SEMFEAT_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Generate a seeded synthetic dataset.
    Synth(SynthArgs),
    /// Extract SHMF, SSF, SFV and SFM for one sample or a whole manifest.
    Extract(ExtractArgs),
    /// Run the transform battery on a mask and check Hu-moment tolerances.
    Invariance(InvarianceArgs),
    /// Compare single-pass and per-category extraction throughput.
    Bench(BenchArgs),
    /// Train the fusion classifier on the training split.
    Train(TrainArgs),
    /// Evaluate a trained model on the test split.
    Eval(EvalArgs),
}

/// Vocabulary sizes, from a label file or given directly.
#[derive(Args, Clone, Debug)]
pub struct VocabArgs {
    /// Label vocabulary document; sets both category counts.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Segmentation category count L [default: 37].
    #[arg(long)]
    pub seg_categories: Option<u16>,
    /// Object category count N [default: 80].
    #[arg(long)]
    pub obj_categories: Option<u32>,
}

pub struct Vocab {
    pub labels: Option<LabelMap>,
    pub seg_categories: u16,
    pub obj_categories: u32,
}

impl VocabArgs {
    /// Resolves the vocabulary; `fallback` is a label file used when nothing
    /// was given explicitly.
    pub fn resolve(&self, fallback: Option<&Path>) -> anyhow::Result<Vocab> {
        let explicit = self.seg_categories.is_some() || self.obj_categories.is_some();
        let path = self
            .labels
            .as_deref()
            .or(fallback.filter(|p| !explicit && p.exists()));
        let labels = path
            .map(|p| read_labels(p).with_context(|| format!("loading labels {}", p.display())))
            .transpose()?;
        let defaults = RunConfig::default();
        let vocab = match &labels {
            Some(l) => {
                for (flag, given, actual) in [
                    (
                        "--seg-categories",
                        self.seg_categories.map(u32::from),
                        l.seg_categories() as u32,
                    ),
                    ("--obj-categories", self.obj_categories, l.obj_categories()),
                ] {
                    if let Some(g) = given {
                        anyhow::ensure!(
                            g == actual,
                            "{flag} {g} disagrees with the label file ({actual})"
                        );
                    }
                }
                Vocab {
                    seg_categories: l.seg_categories(),
                    obj_categories: l.obj_categories(),
                    labels,
                }
            }
            None => Vocab {
                labels: None,
                seg_categories: self.seg_categories.unwrap_or(defaults.seg_categories),
                obj_categories: self.obj_categories.unwrap_or(defaults.obj_categories),
            },
        };
        anyhow::ensure!(
            vocab.seg_categories > 0,
            "the segmentation vocabulary is empty"
        );
        anyhow::ensure!(vocab.obj_categories > 0, "the object vocabulary is empty");
        Ok(vocab)
    }
}

#[derive(Args, Clone, Debug)]
pub struct ObjectArgs {
    /// Distance bins K.
    #[arg(long, default_value_t = SfmParams::default().bins)]
    pub bins: usize,
    /// Distance scale factor rho.
    #[arg(long, default_value_t = SfmParams::default().rho)]
    pub rho: f64,
    /// Detections below this confidence are dropped at load time.
    #[arg(long, default_value_t = DEFAULT_CONFIDENCE_THRESHOLD)]
    pub conf_threshold: f64,
}

#[derive(Args)]
pub struct SynthArgs {
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Training samples.
    #[arg(long, default_value_t = 600)]
    pub train: usize,
    /// Test samples.
    #[arg(long, default_value_t = 200)]
    pub test: usize,
    /// Rate at which the living-room sofa takes the bed's category.
    #[arg(long, default_value_t = semfeat_core::synth::DEFAULT_AMBIGUITY)]
    pub ambiguity: f64,
}

#[derive(Args)]
pub struct ExtractArgs {
    /// Mask file (PGM) for single-sample mode.
    #[arg(
        long,
        conflicts_with = "manifest",
        required_unless_present = "manifest"
    )]
    pub mask: Option<PathBuf>,
    /// Detection document for single-sample mode.
    #[arg(long, requires = "mask")]
    pub detections: Option<PathBuf>,
    /// Dataset manifest for batch mode; `labels.json` beside it is used when
    /// no vocabulary is given.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Feature file (single mode) or output directory (batch mode).
    #[arg(long)]
    pub out: PathBuf,
    /// Recorded in the feature files.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub vocab: VocabArgs,
    #[command(flatten)]
    pub object: ObjectArgs,
}

#[derive(Args)]
pub struct InvarianceArgs {
    /// Mask file (PGM).
    #[arg(long)]
    pub mask: PathBuf,
    /// Also write the report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub vocab: VocabArgs,
}

#[derive(Args)]
pub struct BenchArgs {
    /// Take masks from this manifest instead of generating them.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Generated masks.
    #[arg(long, default_value_t = 16)]
    pub count: usize,
    /// Side of generated masks in pixels.
    #[arg(long, default_value_t = 224)]
    pub size: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write the report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub vocab: VocabArgs,
}

/// Dataset inputs shared by training and evaluation.
#[derive(Args)]
pub struct DataArgs {
    /// Dataset manifest.
    #[arg(long)]
    pub manifest: PathBuf,
    /// Directory of feature files named `<id>.json`.
    #[arg(long)]
    pub features: PathBuf,
}

#[derive(Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Output model file.
    #[arg(long)]
    pub model: PathBuf,
    /// Feature groups: any of `sb`, `ob`, `global` joined by `+`, or `all`.
    #[arg(long, default_value = "sb+ob")]
    pub groups: String,
    /// Fit and freeze a probe on the global block before the main network.
    #[arg(long)]
    pub two_step: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// Hidden layer widths, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub hidden: Option<Vec<usize>>,
}

#[derive(Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Trained model file.
    #[arg(long)]
    pub model: PathBuf,
    /// Also write the report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
