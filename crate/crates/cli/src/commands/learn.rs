use anyhow::Context;
use rayon::prelude::*;
use semfeat_core::classifier::{evaluate, train as fit, TrainConfig};
use semfeat_core::io::{
    read_features, read_manifest, read_model, write_model, FeatureRecord, ManifestEntry, Split,
};
use semfeat_core::{FeatureBundle, FeatureGroups};

use super::emit;
use crate::args::{DataArgs, EvalArgs, TrainArgs};

/// Bundle from a feature record; blocks outside `groups` may be absent and
/// are then zero-filled.
fn to_bundle(record: &FeatureRecord, groups: FeatureGroups) -> anyhow::Result<FeatureBundle> {
    let needed = |present: bool, wanted: bool, block: &str| {
        anyhow::ensure!(
            present || !wanted,
            "feature block {block} is absent but selected"
        );
        Ok(())
    };
    needed(
        record.shmf.is_some() && record.ssf.is_some(),
        groups.segmentation,
        "shmf/ssf",
    )?;
    needed(
        record.sfv.is_some() && record.sfm.is_some(),
        groups.object,
        "sfv/sfm",
    )?;
    let mut bundle = FeatureBundle::zeros(record.shape);
    if let (Some(shmf), Some(ssf)) = (&record.shmf, &record.ssf) {
        bundle.shmf = shmf.clone();
        bundle.ssf = ssf.clone();
    }
    if let (Some(sfv), Some(sfm)) = (&record.sfv, &record.sfm) {
        bundle.sfv = sfv.clone();
        bundle.sfm = sfm.clone();
    }
    bundle.global = record.global.clone();
    Ok(bundle)
}

struct Loaded {
    samples: Vec<(FeatureBundle, usize)>,
    records: Vec<FeatureRecord>,
    class_names: Vec<String>,
}

fn load_split(data: &DataArgs, split: Split, groups: FeatureGroups) -> anyhow::Result<Loaded> {
    let entries = read_manifest(&data.manifest)?;
    let mut class_names = Vec::new();
    for e in &entries {
        if class_names.len() <= e.class {
            class_names.resize(e.class + 1, String::new());
        }
        class_names[e.class] = e.class_name.clone();
    }
    let chosen: Vec<&ManifestEntry> = entries.iter().filter(|e| e.split == split).collect();
    anyhow::ensure!(
        !chosen.is_empty(),
        "the manifest has no {} samples",
        split.as_str()
    );
    let loaded = chosen
        .par_iter()
        .map(|e| {
            let record = read_features(data.features.join(format!("{}.json", e.id)))
                .with_context(|| format!("sample {}", e.id))?;
            let bundle = to_bundle(&record, groups).with_context(|| format!("sample {}", e.id))?;
            Ok(((bundle, e.class), record))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let (samples, records) = loaded.into_iter().unzip();
    Ok(Loaded {
        samples,
        records,
        class_names,
    })
}

pub fn train(args: TrainArgs) -> anyhow::Result<()> {
    let groups = FeatureGroups::parse(&args.groups)?;
    let mut config = TrainConfig {
        seed: args.seed,
        groups,
        two_step: args.two_step,
        ..TrainConfig::default()
    };
    if let Some(e) = args.epochs {
        config.epochs = e;
    }
    if let Some(r) = args.learning_rate {
        config.learning_rate = r;
    }
    if let Some(b) = args.batch_size {
        config.batch_size = b;
    }
    if let Some(h) = args.hidden {
        config.hidden = h;
    }
    let data = load_split(&args.data, Split::Train, groups)?;
    let mut model = fit(&data.samples, &config)?;
    model.provenance = data.records[0].config.clone();
    if data.records.iter().any(|r| r.config != model.provenance) {
        anyhow::bail!("feature files were extracted with differing configurations");
    }
    write_model(&args.model, &model)?;
    let report = evaluate(&model, &data.samples)?;
    println!(
        "trained on {} samples, groups {groups}; training accuracy {:.4}; wrote {}",
        data.samples.len(),
        report.accuracy,
        args.model.display()
    );
    Ok(())
}

/// Report layout: `groups <selection>`, `samples <n>`, then the evaluation table.
pub fn eval(args: EvalArgs) -> anyhow::Result<()> {
    let model = read_model(&args.model)?;
    let data = load_split(&args.data, Split::Test, model.config.groups)?;
    if let Some(p) = &model.provenance {
        if data.records.iter().any(|r| r.config.as_ref() != Some(p)) {
            log::warn!("test features were extracted with a different configuration from the training features");
        }
    }
    let report = evaluate(&model, &data.samples)?;
    let text = format!(
        "groups {}\nsamples {}\n{}",
        model.config.groups,
        data.samples.len(),
        report.render(&data.class_names)
    );
    emit(&text, args.out.as_deref())
}
