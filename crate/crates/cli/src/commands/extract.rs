use std::path::Path;

use anyhow::Context;
use log::info;
use rayon::prelude::*;
use semfeat_core::extract::extract;
use semfeat_core::io::{
    load_detections, load_mask, read_manifest, write_features, ExtractionParams, FeatureRecord,
};
use semfeat_core::{RunConfig, SfmParams};

use super::base_dir;
use crate::args::{ExtractArgs, Vocab};

struct Setup {
    vocab: Vocab,
    config: RunConfig,
}

fn extract_one(
    setup: &Setup,
    mask: &Path,
    detections: Option<&Path>,
) -> anyhow::Result<FeatureRecord> {
    let cfg = &setup.config;
    let mask = load_mask(mask, cfg.seg_categories)?;
    let loaded = detections
        .map(|p| load_detections(p, cfg.conf_threshold, setup.vocab.labels.as_ref()))
        .transpose()?;
    if let Some(l) = &loaded {
        anyhow::ensure!(
            l.set.categories() == cfg.obj_categories,
            "detections use {} object categories, configuration has {}",
            l.set.categories(),
            cfg.obj_categories
        );
        info!(
            "{} detections kept, {} dropped below threshold, {} clamped",
            l.set.len(),
            l.dropped,
            l.clamped
        );
    }
    let e = extract(&mask, loaded.as_ref().map(|l| &l.set), cfg.sfm_params())?;
    let params = ExtractionParams {
        image_width: mask.width(),
        image_height: mask.height(),
        bins: cfg.bins,
        rho: cfg.rho,
        conf_threshold: cfg.conf_threshold,
    };
    Ok(e.to_record(cfg.obj_categories as usize, params, Some(cfg.clone())))
}

pub fn run(args: ExtractArgs) -> anyhow::Result<()> {
    let fallback = args
        .manifest
        .as_deref()
        .map(|m| base_dir(m).join("labels.json"));
    let vocab = args.vocab.resolve(fallback.as_deref())?;
    SfmParams::new(args.object.bins, args.object.rho)?;
    anyhow::ensure!(
        (0.0..=1.0).contains(&args.object.conf_threshold),
        "--conf-threshold must lie in [0, 1]"
    );
    let config = RunConfig {
        seg_categories: vocab.seg_categories,
        obj_categories: vocab.obj_categories,
        bins: args.object.bins,
        rho: args.object.rho,
        conf_threshold: args.object.conf_threshold,
        seed: args.seed,
    };
    let setup = Setup { vocab, config };

    let Some(manifest) = &args.manifest else {
        let mask = args
            .mask
            .as_deref()
            .expect("clap requires --mask without --manifest");
        let record = extract_one(&setup, mask, args.detections.as_deref())
            .with_context(|| format!("extracting {}", mask.display()))?;
        write_features(&args.out, &record)?;
        println!("wrote {}", args.out.display());
        return Ok(());
    };

    let entries = read_manifest(manifest)?;
    let base = base_dir(manifest);
    entries.par_iter().try_for_each(|e| {
        let record = extract_one(
            &setup,
            &base.join(&e.mask),
            e.detections.as_ref().map(|d| base.join(d)).as_deref(),
        )
        .with_context(|| format!("sample {}", e.id))?;
        write_features(args.out.join(format!("{}.json", e.id)), &record)
            .with_context(|| format!("sample {}", e.id))
    })?;
    println!(
        "wrote {} feature files to {}",
        entries.len(),
        args.out.display()
    );
    Ok(())
}
