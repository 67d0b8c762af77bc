//! Fusion classifier over flattened feature bundles.
//!
//! A small feed-forward network stands in for the per-family convolutional
//! heads: the selected feature groups are standardized, concatenated and fed
//! to `input -> H1 -> H2 -> classes` with ReLU activations, trained by plain
//! minibatch SGD on softmax cross-entropy.
//!
//! With `two_step` set and a global block present, training runs in two
//! stages: a linear probe is first fitted on the global block alone, then
//! frozen; its logits join the semantic features as extra inputs while the
//! network is trained.

mod network;
mod standardize;

pub use network::{flatten_layers, gradient_check, softmax, Dense, Mlp, GRADIENT_FLOOR};
pub use standardize::{Standardized, Standardizer, STD_FLOOR};

pub use crate::bundle::build_bundle;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bundle::{FeatureBundle, FeatureGroups, FeatureShape};
use crate::config::RunConfig;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub hidden: Vec<usize>,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub groups: FeatureGroups,
    pub two_step: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            hidden: vec![256, 64],
            learning_rate: 0.01,
            epochs: 60,
            batch_size: 32,
            seed: 0,
            groups: FeatureGroups::ALL,
            two_step: false,
        }
    }
}

/// Frozen projection of the global block, fitted in the first stage.
#[derive(Clone, Debug, PartialEq)]
pub struct GlobalProbe {
    pub scaler: Standardizer,
    pub probe: Mlp,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassifierModel {
    pub shape: FeatureShape,
    pub classes: usize,
    pub config: TrainConfig,
    /// Run parameters of the features the model was trained on.
    pub provenance: Option<RunConfig>,
    /// Statistics of the network's feature inputs (global block excluded
    /// when a probe is present).
    pub scaler: Standardizer,
    pub global_stage: Option<GlobalProbe>,
    pub network: Mlp,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    pub label: usize,
    pub probabilities: Vec<f64>,
}

/// Whether the global block goes through a frozen probe.
fn uses_probe(config: &TrainConfig, shape: &FeatureShape) -> bool {
    config.two_step && config.groups.global && shape.global > 0
}

fn direct_groups(config: &TrainConfig, shape: &FeatureShape) -> FeatureGroups {
    FeatureGroups {
        global: config.groups.global && !uses_probe(config, shape),
        ..config.groups
    }
}

impl ClassifierModel {
    /// Length of the bundle slice the model reads.
    pub fn input_dim(&self) -> usize {
        self.shape.selected_len(self.config.groups)
    }

    fn check_shape(&self, bundle: &FeatureBundle) -> Result<()> {
        if bundle.shape != self.shape {
            return Err(Error::ShapeMismatch {
                block: "bundle".into(),
                expected: self.shape.flat_len(),
                found: bundle.shape.flat_len(),
            });
        }
        Ok(())
    }

    /// Network input for one bundle: standardized features, then probe logits.
    pub fn network_input(&self, bundle: &FeatureBundle) -> Result<Vec<f64>> {
        self.check_shape(bundle)?;
        let direct = direct_groups(&self.config, &self.shape);
        let mut x = self
            .scaler
            .apply(&bundle.flatten_groups(direct))
            .into_inner();
        if let Some(stage) = &self.global_stage {
            let global = bundle.global.as_deref().unwrap_or_default();
            x.extend(stage.probe.logits(stage.scaler.apply(global).as_slice()));
        }
        Ok(x)
    }

    pub fn predict(&self, bundle: &FeatureBundle) -> Result<Prediction> {
        let probabilities = self.network.probabilities(&self.network_input(bundle)?);
        Ok(Prediction {
            label: argmax(&probabilities),
            probabilities,
        })
    }
}

pub fn predict(model: &ClassifierModel, bundle: &FeatureBundle) -> Result<Prediction> {
    model.predict(bundle)
}

/// Index of the largest value; ties go to the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Minibatch SGD over pre-built inputs. Deterministic given `rng`'s state.
fn fit_network(
    net: &mut Mlp,
    inputs: &[Vec<f64>],
    labels: &[usize],
    config: &TrainConfig,
    rng: &mut ChaCha8Rng,
) {
    let mut order: Vec<usize> = (0..inputs.len()).collect();
    let batch_size = config.batch_size.max(1);
    for _ in 0..config.epochs {
        order.shuffle(rng);
        for chunk in order.chunks(batch_size) {
            let batch: Vec<(&[f64], usize)> =
                chunk.iter().map(|&i| (&inputs[i][..], labels[i])).collect();
            let (_, grads) = net.loss_and_gradients(&batch);
            net.apply_gradients(&grads, config.learning_rate);
        }
    }
}

/// Trains a classifier on `(bundle, class)` pairs.
pub fn train(dataset: &[(FeatureBundle, usize)], config: &TrainConfig) -> Result<ClassifierModel> {
    let (first, _) = dataset
        .first()
        .ok_or_else(|| Error::Training("empty dataset".into()))?;
    let shape = first.shape;
    if let Some(i) = dataset.iter().position(|(b, _)| b.shape != shape) {
        return Err(Error::Training(format!(
            "sample {i} has a different feature shape from sample 0"
        )));
    }
    if dataset
        .iter()
        .any(|(b, _)| b.global.as_ref().map_or(0, Vec::len) != shape.global)
    {
        return Err(Error::Training(
            "global block length drifts across samples".into(),
        ));
    }
    let classes = dataset.iter().map(|&(_, c)| c).max().unwrap() + 1;
    let mut seen = vec![false; classes];
    dataset.iter().for_each(|&(_, c)| seen[c] = true);
    if seen.iter().filter(|&&s| s).count() < 2 {
        return Err(Error::Training(
            "training needs at least two classes".into(),
        ));
    }
    if shape.selected_len(config.groups) == 0 {
        return Err(Error::Training(format!(
            "feature groups {} select no inputs",
            config.groups
        )));
    }
    if config.learning_rate <= 0.0 || !config.learning_rate.is_finite() {
        return Err(Error::Training(format!(
            "learning rate {} must be positive",
            config.learning_rate
        )));
    }

    let labels: Vec<usize> = dataset.iter().map(|&(_, c)| c).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let global_stage = if uses_probe(config, &shape) {
        let raw: Vec<Vec<f64>> = dataset
            .iter()
            .map(|(b, _)| b.global.clone().unwrap())
            .collect();
        let scaler = Standardizer::fit(&raw)?;
        let inputs: Vec<Vec<f64>> = raw.iter().map(|g| scaler.apply(g).into_inner()).collect();
        let mut probe = Mlp::new(&[shape.global, classes], &mut rng);
        fit_network(&mut probe, &inputs, &labels, config, &mut rng);
        Some(GlobalProbe { scaler, probe })
    } else {
        None
    };

    let direct = direct_groups(config, &shape);
    let raw: Vec<Vec<f64>> = dataset
        .iter()
        .map(|(b, _)| b.flatten_groups(direct))
        .collect();
    let scaler = Standardizer::fit(&raw)?;
    let inputs: Vec<Vec<f64>> = raw
        .iter()
        .zip(dataset)
        .map(|(r, (b, _))| {
            let mut x = scaler.apply(r).into_inner();
            if let Some(stage) = &global_stage {
                x.extend(
                    stage
                        .probe
                        .logits(stage.scaler.apply(b.global.as_deref().unwrap()).as_slice()),
                );
            }
            x
        })
        .collect();

    let mut sizes = vec![inputs[0].len()];
    sizes.extend(config.hidden.iter().copied());
    sizes.push(classes);
    let mut network = Mlp::new(&sizes, &mut rng);
    fit_network(&mut network, &inputs, &labels, config, &mut rng);

    Ok(ClassifierModel {
        shape,
        classes,
        config: config.clone(),
        provenance: None,
        scaler,
        global_stage,
        network,
    })
}

/// Accuracy, confusion matrix (rows = true class) and per-class recall.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    pub accuracy: f64,
    pub confusion: Vec<Vec<u64>>,
    pub recall: Vec<f64>,
    pub total: u64,
}

impl EvalReport {
    /// Builds a report from `(true, predicted)` pairs.
    pub fn from_pairs(classes: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut confusion = vec![vec![0u64; classes]; classes];
        for (truth, pred) in pairs {
            confusion[truth][pred] += 1;
        }
        let total: u64 = confusion.iter().flatten().sum();
        let correct: u64 = (0..classes).map(|c| confusion[c][c]).sum();
        let recall = confusion
            .iter()
            .enumerate()
            .map(|(c, row)| {
                let n: u64 = row.iter().sum();
                if n == 0 {
                    0.0
                } else {
                    row[c] as f64 / n as f64
                }
            })
            .collect();
        let accuracy = if total == 0 {
            0.0
        } else {
            correct as f64 / total as f64
        };
        EvalReport {
            accuracy,
            confusion,
            recall,
            total,
        }
    }

    pub fn correct(&self) -> u64 {
        (0..self.confusion.len())
            .map(|c| self.confusion[c][c])
            .sum()
    }

    /// Text layout:
    ///
    /// ```text
    /// accuracy 0.9650 (193/200)
    /// confusion (rows: true class, columns: predicted class)
    ///     class      0    1 ...  recall
    ///         0     33    1 ...  0.9706
    /// ```
    pub fn render(&self, class_names: &[String]) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        writeln!(
            out,
            "accuracy {:.4} ({}/{})",
            self.accuracy,
            self.correct(),
            self.total
        )
        .unwrap();
        writeln!(
            out,
            "confusion (rows: true class, columns: predicted class)"
        )
        .unwrap();
        write!(out, "{:>6}", "class").unwrap();
        for c in 0..self.confusion.len() {
            write!(out, " {c:>5}").unwrap();
        }
        writeln!(out, "  recall  name").unwrap();
        for (c, row) in self.confusion.iter().enumerate() {
            write!(out, "{c:>6}").unwrap();
            for v in row {
                write!(out, " {v:>5}").unwrap();
            }
            let name = class_names.get(c).map_or("", String::as_str);
            writeln!(out, "  {:.4}  {name}", self.recall[c]).unwrap();
        }
        out
    }
}

pub fn evaluate(model: &ClassifierModel, dataset: &[(FeatureBundle, usize)]) -> Result<EvalReport> {
    if dataset.is_empty() {
        return Err(Error::Training("cannot evaluate an empty dataset".into()));
    }
    let mut pairs = Vec::with_capacity(dataset.len());
    for (bundle, truth) in dataset {
        if *truth >= model.classes {
            return Err(Error::Training(format!(
                "class {truth} unknown to a {}-class model",
                model.classes
            )));
        }
        pairs.push((*truth, model.predict(bundle)?.label));
    }
    Ok(EvalReport::from_pairs(model.classes, pairs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn shape() -> FeatureShape {
        FeatureShape {
            seg_categories: 1,
            obj_categories: 2,
            bins: 1,
            global: 0,
        }
    }

    /// Two well separated clusters in SSF space.
    fn separable(n: usize, seed: u64) -> Vec<(FeatureBundle, usize)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|i| {
                let class = i % 2;
                let mut b = FeatureBundle::zeros(shape());
                let centre = if class == 0 { -1.0 } else { 1.0 };
                for v in b.ssf[0].iter_mut() {
                    *v = centre + rng.random_range(-0.3..0.3);
                }
                b.shmf[0][0] = rng.random_range(-1.0..1.0);
                (b, class)
            })
            .collect()
    }

    fn small_config() -> TrainConfig {
        TrainConfig {
            hidden: vec![16, 8],
            epochs: 200,
            learning_rate: 0.05,
            batch_size: 8,
            ..Default::default()
        }
    }

    #[test]
    fn separable_classes_are_learned() {
        let data = separable(60, 3);
        let model = train(&data, &small_config()).unwrap();
        let report = evaluate(&model, &data).unwrap();
        assert!(report.accuracy >= 0.99, "{}", report.accuracy);
        let (b, c) = &data[5];
        assert_eq!(model.predict(b).unwrap().label, *c);
    }

    #[test]
    fn training_is_deterministic() {
        let data = separable(40, 5);
        let cfg = TrainConfig {
            epochs: 20,
            ..small_config()
        };
        let a = train(&data, &cfg).unwrap();
        let b = train(&data, &cfg).unwrap();
        let bits = |m: &ClassifierModel| {
            m.network
                .params()
                .iter()
                .map(|v| v.to_bits())
                .collect::<Vec<_>>()
        };
        assert_eq!(bits(&a), bits(&b));
    }

    #[test]
    fn probabilities_are_normalized() {
        let data = separable(20, 9);
        let model = train(
            &data,
            &TrainConfig {
                epochs: 3,
                ..small_config()
            },
        )
        .unwrap();
        for (b, _) in &data {
            let p = model.predict(b).unwrap().probabilities;
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-6);
            assert!(p.iter().all(|&v| v >= 0.0));
        }
    }

    #[test]
    fn training_errors() {
        assert!(train(&[], &small_config()).is_err());
        let one_class: Vec<_> = separable(10, 1).into_iter().map(|(b, _)| (b, 0)).collect();
        assert!(train(&one_class, &small_config()).is_err());
        let mut drift = separable(10, 1);
        drift[3].0 = FeatureBundle::zeros(FeatureShape {
            seg_categories: 2,
            ..shape()
        });
        assert!(train(&drift, &small_config()).is_err());
    }

    #[test]
    fn shape_mismatch_on_predict() {
        let model = train(
            &separable(20, 2),
            &TrainConfig {
                epochs: 1,
                ..small_config()
            },
        )
        .unwrap();
        let other = FeatureBundle::zeros(FeatureShape {
            obj_categories: 3,
            ..shape()
        });
        assert!(model.predict(&other).is_err());
    }

    #[test]
    fn argmax_prefers_lowest_index() {
        assert_eq!(argmax(&[0.25, 0.5, 0.5, 0.1]), 1);
        assert_eq!(argmax(&[1.0 / 3.0; 3]), 0);
    }

    #[test]
    fn report_structure() {
        let perfect = EvalReport::from_pairs(3, [(0, 0), (1, 1), (2, 2), (2, 2)]);
        assert_eq!(perfect.accuracy, 1.0);
        for (i, row) in perfect.confusion.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                assert!(i == j || v == 0);
            }
        }
        let constant = EvalReport::from_pairs(3, [(0, 1), (1, 1), (2, 1)]);
        let nonzero_cols: Vec<usize> = (0..3)
            .filter(|&j| constant.confusion.iter().any(|row| row[j] > 0))
            .collect();
        assert_eq!(nonzero_cols, vec![1]);
        assert!((constant.accuracy - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(constant.recall, vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn two_step_uses_frozen_probe() {
        let mut data = separable(40, 4);
        let shape = FeatureShape {
            global: 3,
            ..shape()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (b, c) in &mut data {
            b.shape = shape;
            let sign = if *c == 0 { -1.0 } else { 1.0 };
            b.global = Some((0..3).map(|_| sign + rng.random_range(-0.5..0.5)).collect());
        }
        let cfg = TrainConfig {
            two_step: true,
            epochs: 50,
            ..small_config()
        };
        let model = train(&data, &cfg).unwrap();
        let stage = model.global_stage.as_ref().expect("probe trained");
        assert_eq!(stage.probe.input_dim(), 3);
        // semantic inputs (7 + 5 + 2 + 4 = 18) plus two probe logits
        assert_eq!(model.network.input_dim(), 18 + 2);
        assert!(evaluate(&model, &data).unwrap().accuracy >= 0.99);

        let joint = train(
            &data,
            &TrainConfig {
                two_step: false,
                ..cfg
            },
        )
        .unwrap();
        assert!(joint.global_stage.is_none());
        assert_eq!(joint.network.input_dim(), 21);
    }
}
