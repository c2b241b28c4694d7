//! Mini-batch SGD over per-epoch datasets.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use super::{gradients_of, predict, Classifier, ModelError, ModelKind, Sample};
use crate::lang::Program;
use crate::mixup::{build_epoch_dataset, MixPolicy};
use crate::refactor::{refactor_or_identity, RefactoringMethod};
use crate::represent::{encode_label, Encoder, Features};
use crate::seed::{derive_seed, rng_from_seed, Rng};

/// Supplies the training samples for one epoch.
pub trait DatasetProvider {
    fn epoch_samples(&mut self, rng: &mut Rng) -> Result<Vec<Sample>, ModelError>;
}

/// Original programs with their class indices and the encoder to apply.
#[derive(Debug, Clone, Copy)]
pub struct TrainingSet<'a> {
    pub programs: &'a [Program],
    pub labels: &'a [usize],
    pub num_classes: usize,
    pub encoder: &'a Encoder,
}

impl TrainingSet<'_> {
    fn encode(&self, program: &Program, label: usize) -> Result<Sample, ModelError> {
        Ok(Sample {
            features: self.encoder.encode(program),
            label: encode_label(label, self.num_classes)?,
        })
    }
}

/// The same raw encodings every epoch.
#[derive(Debug, Clone)]
pub struct StandardProvider {
    samples: Vec<Sample>,
}

impl StandardProvider {
    pub fn new(samples: Vec<Sample>) -> StandardProvider {
        StandardProvider { samples }
    }

    pub fn from_set(set: TrainingSet<'_>) -> Result<StandardProvider, ModelError> {
        let samples = set
            .programs
            .iter()
            .zip(set.labels)
            .map(|(p, &y)| set.encode(p, y))
            .collect::<Result<_, _>>()?;
        Ok(StandardProvider { samples })
    }
}

impl DatasetProvider for StandardProvider {
    fn epoch_samples(&mut self, _rng: &mut Rng) -> Result<Vec<Sample>, ModelError> {
        Ok(self.samples.clone())
    }
}

/// Every program replaced by a fresh random refactoring each epoch.
#[derive(Debug, Clone)]
pub struct BasicProvider<'a> {
    pub set: TrainingSet<'a>,
    pub methods: Vec<RefactoringMethod>,
}

impl DatasetProvider for BasicProvider<'_> {
    fn epoch_samples(&mut self, rng: &mut Rng) -> Result<Vec<Sample>, ModelError> {
        self.set
            .programs
            .iter()
            .zip(self.set.labels)
            .map(|(p, &y)| {
                let (refactored, _) = refactor_or_identity(p, &self.methods, rng);
                self.set.encode(&refactored, y)
            })
            .collect()
    }
}

/// A freshly mixed dataset each epoch.
#[derive(Debug, Clone)]
pub struct MixCodeProvider<'a> {
    pub set: TrainingSet<'a>,
    pub policy: MixPolicy,
}

impl DatasetProvider for MixCodeProvider<'_> {
    fn epoch_samples(&mut self, rng: &mut Rng) -> Result<Vec<Sample>, ModelError> {
        let mixed = build_epoch_dataset(
            self.set.programs,
            self.set.labels,
            self.set.num_classes,
            &self.policy,
            self.set.encoder,
            rng,
        )?;
        Ok(mixed
            .into_iter()
            .map(|m| Sample {
                features: m.features,
                label: m.label,
            })
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrainStrategy {
    Standard,
    Basic { methods: Vec<RefactoringMethod> },
    MixCode(MixPolicy),
}

impl TrainStrategy {
    /// `standard`, `basic`, or `mixcode/<pairing>`.
    pub fn label(&self) -> String {
        match self {
            TrainStrategy::Standard => "standard".into(),
            TrainStrategy::Basic { .. } => "basic".into(),
            TrainStrategy::MixCode(p) => alloc::format!("mixcode/{}", p.strategy),
        }
    }

    pub fn provider<'a>(&self, set: TrainingSet<'a>) -> Result<Box<dyn DatasetProvider + 'a>, ModelError> {
        Ok(match self {
            TrainStrategy::Standard => Box::new(StandardProvider::from_set(set)?),
            TrainStrategy::Basic { methods } => Box::new(BasicProvider {
                set,
                methods: methods.clone(),
            }),
            TrainStrategy::MixCode(policy) => {
                policy.validate()?;
                Box::new(MixCodeProvider {
                    set,
                    policy: policy.clone(),
                })
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub seed: u64,
    pub strategy: TrainStrategy,
}

impl TrainConfig {
    /// 50 epochs, batch 32 and the kind's default learning rate.
    pub fn new(kind: ModelKind, seed: u64, strategy: TrainStrategy) -> TrainConfig {
        TrainConfig {
            epochs: 50,
            learning_rate: kind.default_learning_rate(),
            batch_size: 32,
            seed,
            strategy,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.epochs == 0 {
            return Err(ModelError::InvalidConfig("epochs must be at least 1"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(ModelError::InvalidConfig("learning rate must be positive"));
        }
        if self.batch_size == 0 {
            return Err(ModelError::InvalidConfig("batch size must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainTrace {
    /// Mean training loss per epoch, measured batch by batch before each update.
    pub loss: Vec<f64>,
    /// Accuracy on the held-out set after each epoch; `None` without one.
    pub heldout_accuracy: Vec<Option<f64>>,
}

/// Train with the provider's samples for `config.epochs` epochs.
///
/// The provider draws from the `"data"` stream of `config.seed` and batch
/// order from the `"batch"` stream, so two strategies given the same seed
/// visit batch positions in the same order.
pub fn fit(
    mut model: Classifier,
    provider: &mut dyn DatasetProvider,
    config: &TrainConfig,
    heldout: &[(Features, usize)],
) -> Result<(Classifier, TrainTrace), ModelError> {
    config.validate()?;
    let mut data_rng = rng_from_seed(derive_seed(config.seed, "data"));
    let mut batch_rng = rng_from_seed(derive_seed(config.seed, "batch"));
    let mut trace = TrainTrace::default();

    for epoch in 0..config.epochs {
        let samples = provider.epoch_samples(&mut data_rng)?;
        if samples.is_empty() {
            return Err(ModelError::EmptyDataset);
        }
        let mut order: Vec<usize> = (0..samples.len()).collect();
        order.shuffle(&mut batch_rng);

        let mut loss_sum = 0.0;
        for chunk in order.chunks(config.batch_size) {
            let batch: Vec<&Sample> = chunk.iter().map(|&i| &samples[i]).collect();
            let (loss, grads) = gradients_of(&model, &batch)?;
            loss_sum += loss * batch.len() as f64;
            for (p, g) in model.params.iter_mut().zip(&grads) {
                for (w, d) in p.data.iter_mut().zip(&g.data) {
                    *w -= config.learning_rate * d;
                }
            }
        }
        let loss = loss_sum / samples.len() as f64;
        if !loss.is_finite() || !model.is_finite() {
            return Err(ModelError::Diverged { epoch: epoch + 1 });
        }
        trace.loss.push(loss);
        trace.heldout_accuracy.push(if heldout.is_empty() {
            None
        } else {
            let mut correct = 0usize;
            for (x, y) in heldout {
                if predict(&model, x)? == *y {
                    correct += 1;
                }
            }
            Some(correct as f64 / heldout.len() as f64)
        });
    }
    Ok((model, trace))
}
