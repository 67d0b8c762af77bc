use anyhow::Context;
use semfeat_core::synth::{default_dataset_config, default_templates, generate_dataset};

use crate::args::SynthArgs;

pub fn run(args: SynthArgs) -> anyhow::Result<()> {
    anyhow::ensure!(
        (0.0..=1.0).contains(&args.ambiguity),
        "--ambiguity must lie in [0, 1]"
    );
    let mut config = default_dataset_config(args.seed);
    config.templates = default_templates(args.ambiguity);
    config.train = args.train;
    config.test = args.test;
    let entries = generate_dataset(&config, &args.out)
        .with_context(|| format!("generating dataset in {}", args.out.display()))?;
    let occluded: usize = entries.iter().map(|e| e.occluded).sum();
    println!(
        "wrote {} samples ({} train, {} test, {} classes) to {}; {occluded} detections fully occluded",
        entries.len(),
        args.train,
        args.test,
        config.templates.len(),
        args.out.display()
    );
    Ok(())
}
