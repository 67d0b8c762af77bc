//! Model documents: shapes, training configuration, standardization
//! statistics and every weight, all reals as hex floats.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bundle::{FeatureGroups, FeatureShape};
use crate::classifier::{ClassifierModel, Dense, GlobalProbe, Mlp, Standardizer, TrainConfig};
use crate::error::{Error, Result};

use super::features::ConfigDoc;
use super::{hex_vec, hexfloat, parse_hex_vec, read_bytes, write_bytes};

pub const MODEL_SCHEMA: &str = "semfeat.model/1";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDoc {
    schema: String,
    shape: FeatureShape,
    classes: usize,
    train: TrainDoc,
    provenance: Option<ConfigDoc>,
    scaler: ScalerDoc,
    global_stage: Option<ProbeDoc>,
    layers: Vec<LayerDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrainDoc {
    hidden: Vec<usize>,
    learning_rate: String,
    epochs: usize,
    batch_size: usize,
    seed: u64,
    groups: FeatureGroups,
    two_step: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScalerDoc {
    mean: Vec<String>,
    std: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProbeDoc {
    scaler: ScalerDoc,
    layers: Vec<LayerDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LayerDoc {
    inputs: usize,
    outputs: usize,
    weights: Vec<String>,
    bias: Vec<String>,
}

fn scaler_doc(s: &Standardizer) -> ScalerDoc {
    ScalerDoc {
        mean: hex_vec(&s.mean),
        std: hex_vec(&s.std),
    }
}

fn layer_docs(net: &Mlp) -> Vec<LayerDoc> {
    net.layers
        .iter()
        .map(|l| LayerDoc {
            inputs: l.inputs,
            outputs: l.outputs,
            weights: hex_vec(&l.weights),
            bias: hex_vec(&l.bias),
        })
        .collect()
}

pub fn encode_model(model: &ClassifierModel) -> Vec<u8> {
    let c = &model.config;
    let doc = ModelDoc {
        schema: MODEL_SCHEMA.into(),
        shape: model.shape,
        classes: model.classes,
        train: TrainDoc {
            hidden: c.hidden.clone(),
            learning_rate: hexfloat::format(c.learning_rate),
            epochs: c.epochs,
            batch_size: c.batch_size,
            seed: c.seed,
            groups: c.groups,
            two_step: c.two_step,
        },
        provenance: model.provenance.as_ref().map(ConfigDoc::from_config),
        scaler: scaler_doc(&model.scaler),
        global_stage: model.global_stage.as_ref().map(|g| ProbeDoc {
            scaler: scaler_doc(&g.scaler),
            layers: layer_docs(&g.probe),
        }),
        layers: layer_docs(&model.network),
    };
    let mut out = serde_json::to_vec_pretty(&doc).expect("model document serializes");
    out.push(b'\n');
    out
}

pub fn write_model(path: impl AsRef<Path>, model: &ClassifierModel) -> Result<()> {
    write_bytes(path.as_ref(), &encode_model(model))
}

pub fn read_model(path: impl AsRef<Path>) -> Result<ClassifierModel> {
    let path = path.as_ref();
    decode_model(&read_bytes(path)?, path)
}

fn scaler_from(path: &Path, field: &str, doc: &ScalerDoc) -> Result<Standardizer> {
    let mean = parse_hex_vec(path, &format!("{field}.mean"), &doc.mean)?;
    let std = parse_hex_vec(path, &format!("{field}.std"), &doc.std)?;
    if mean.len() != std.len() {
        return Err(Error::format(
            path,
            format!("{field}: mean and std lengths differ"),
        ));
    }
    if let Some(i) = std.iter().position(|&s| !(s.is_finite() && s > 0.0)) {
        return Err(Error::format(
            path,
            format!("{field}.std[{i}] must be positive and finite"),
        ));
    }
    Ok(Standardizer { mean, std })
}

fn network_from(path: &Path, field: &str, docs: &[LayerDoc]) -> Result<Mlp> {
    let mut layers = Vec::with_capacity(docs.len());
    for (i, d) in docs.iter().enumerate() {
        let name = format!("{field}[{i}]");
        let weights = parse_hex_vec(path, &format!("{name}.weights"), &d.weights)?;
        let bias = parse_hex_vec(path, &format!("{name}.bias"), &d.bias)?;
        if weights.len() != d.inputs * d.outputs || bias.len() != d.outputs {
            return Err(Error::format(
                path,
                format!(
                    "{name}: parameter counts disagree with {}x{}",
                    d.outputs, d.inputs
                ),
            ));
        }
        if let Some(prev) = layers.last().map(|l: &Dense| l.outputs) {
            if prev != d.inputs {
                return Err(Error::format(
                    path,
                    format!("{name}.inputs {} does not follow {prev}", d.inputs),
                ));
            }
        }
        layers.push(Dense {
            inputs: d.inputs,
            outputs: d.outputs,
            weights,
            bias,
        });
    }
    if layers.is_empty() {
        return Err(Error::format(path, format!("{field}: no layers")));
    }
    Ok(Mlp { layers })
}

pub fn decode_model(bytes: &[u8], path: &Path) -> Result<ClassifierModel> {
    let doc: ModelDoc = serde_json::from_slice(bytes)
        .map_err(|e| Error::format(path, format!("invalid model document: {e}")))?;
    if doc.schema != MODEL_SCHEMA {
        return Err(Error::format(
            path,
            format!(
                "unsupported schema {:?}, expected {MODEL_SCHEMA}",
                doc.schema
            ),
        ));
    }
    let learning_rate = hexfloat::parse(&doc.train.learning_rate)
        .ok_or_else(|| Error::format(path, "train.learning_rate: malformed hex float"))?;
    let config = TrainConfig {
        hidden: doc.train.hidden,
        learning_rate,
        epochs: doc.train.epochs,
        batch_size: doc.train.batch_size,
        seed: doc.train.seed,
        groups: doc.train.groups,
        two_step: doc.train.two_step,
    };
    let scaler = scaler_from(path, "scaler", &doc.scaler)?;
    let global_stage = doc
        .global_stage
        .as_ref()
        .map(|g| -> Result<GlobalProbe> {
            Ok(GlobalProbe {
                scaler: scaler_from(path, "global_stage.scaler", &g.scaler)?,
                probe: network_from(path, "global_stage.layers", &g.layers)?,
            })
        })
        .transpose()?;
    let network = network_from(path, "layers", &doc.layers)?;
    let probe_width = global_stage.as_ref().map_or(0, |g| g.probe.output_dim());
    if network.input_dim() != scaler.dim() + probe_width {
        return Err(Error::format(
            path,
            "layers[0].inputs disagrees with the scaler dimension",
        ));
    }
    if network.output_dim() != doc.classes {
        return Err(Error::format(
            path,
            format!(
                "classes is {} but the output layer has {}",
                doc.classes,
                network.output_dim()
            ),
        ));
    }
    Ok(ClassifierModel {
        shape: doc.shape,
        classes: doc.classes,
        config,
        provenance: doc
            .provenance
            .as_ref()
            .map(|c| c.to_config(path))
            .transpose()?,
        scaler,
        global_stage,
        network,
    })
}
