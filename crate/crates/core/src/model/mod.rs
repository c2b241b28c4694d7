//! Softmax classifiers trained with soft-target cross-entropy.
//!
//! * `bag-fnn`: `x → dense(H) → ReLU → dense(C) → softmax` on bag vectors.
//! * `seq-mean`: each sequence row selects (or, for mixed rows, blends)
//!   embedding rows; the rows are averaged over the sequence length, then
//!   `dense(H) → ReLU → dense(C) → softmax`.
//!
//! Weight matrices are stored input-major: entry `(k, j)` connects input
//! `k` to output `j`.

mod train;

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::Rng as _;

use crate::mixup::MixupError;
use crate::represent::{argmax, Features, LabelVector, RepresentError};
use crate::seed::{derive_seed, rng_from_seed};

pub use train::{
    fit, BasicProvider, DatasetProvider, MixCodeProvider, StandardProvider, TrainConfig, TrainStrategy, TrainTrace,
    TrainingSet,
};

pub const DEFAULT_HIDDEN: usize = 64;
pub const DEFAULT_EMBED: usize = 32;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("invalid dimensions: {0}")]
    InvalidDims(String),
    #[error("input does not match the model's kind or dimensions")]
    ShapeMismatch,
    #[error("training diverged at epoch {epoch}: loss or weights are no longer finite")]
    Diverged { epoch: usize },
    #[error("invalid training configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("training set is empty")]
    EmptyDataset,
    #[error(transparent)]
    Mixup(#[from] MixupError),
    #[error(transparent)]
    Represent(#[from] RepresentError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    BagFnn,
    SeqMean,
}

impl ModelKind {
    pub const ALL: [ModelKind; 2] = [ModelKind::BagFnn, ModelKind::SeqMean];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::BagFnn => "bag-fnn",
            ModelKind::SeqMean => "seq-mean",
        }
    }

    /// Default SGD step size.
    pub fn default_learning_rate(self) -> f64 {
        match self {
            ModelKind::BagFnn => 0.1,
            ModelKind::SeqMean => 0.05,
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown model kind `{0}` (expected bag-fnn or seq-mean)")]
pub struct ModelKindParseError(pub String);

impl FromStr for ModelKind {
    type Err = ModelKindParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| ModelKindParseError(s.into()))
    }
}

/// `input` is the bag dimension (bag-fnn) or vocabulary size (seq-mean);
/// `embed` is ignored by bag-fnn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dims {
    pub input: usize,
    pub hidden: usize,
    pub embed: usize,
}

impl Dims {
    pub fn new(input: usize) -> Dims {
        Dims {
            input,
            hidden: DEFAULT_HIDDEN,
            embed: DEFAULT_EMBED,
        }
    }
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Tensor {
    pub fn zeros(rows: usize, cols: usize) -> Tensor {
        Tensor {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classifier {
    pub kind: ModelKind,
    pub dims: Dims,
    pub num_classes: usize,
    pub seed: u64,
    /// bag-fnn: `[w1, b1, w2, b2]`; seq-mean: `[embedding, w1, b1, w2, b2]`.
    pub params: Vec<Tensor>,
}

/// One training example.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub features: Features,
    pub label: LabelVector,
}

fn shapes(kind: ModelKind, dims: Dims, num_classes: usize) -> Vec<(usize, usize)> {
    let Dims { input, hidden, embed } = dims;
    match kind {
        ModelKind::BagFnn => vec![(input, hidden), (1, hidden), (hidden, num_classes), (1, num_classes)],
        ModelKind::SeqMean => vec![
            (input, embed),
            (embed, hidden),
            (1, hidden),
            (hidden, num_classes),
            (1, num_classes),
        ],
    }
}

fn param_names(kind: ModelKind) -> &'static [&'static str] {
    kind.param_names()
}

impl ModelKind {
    /// Parameter tensor names in storage order.
    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            ModelKind::BagFnn => &["w1", "b1", "w2", "b2"],
            ModelKind::SeqMean => &["embedding", "w1", "b1", "w2", "b2"],
        }
    }
}

fn check_dims(kind: ModelKind, dims: Dims, num_classes: usize) -> Result<(), ModelError> {
    if num_classes == 0 {
        return Err(ModelError::InvalidDims("num_classes must be at least 1".into()));
    }
    if dims.input == 0 || dims.hidden == 0 {
        return Err(ModelError::InvalidDims(
            "input and hidden sizes must be positive".into(),
        ));
    }
    if kind == ModelKind::SeqMean && dims.embed == 0 {
        return Err(ModelError::InvalidDims("embedding size must be positive".into()));
    }
    Ok(())
}

/// Glorot-uniform weights, zero biases, drawn from `seed`'s `"init"` stream.
pub fn init(kind: ModelKind, dims: Dims, num_classes: usize, seed: u64) -> Result<Classifier, ModelError> {
    check_dims(kind, dims, num_classes)?;
    let mut rng = rng_from_seed(derive_seed(seed, "init"));
    let names = param_names(kind);
    let params = shapes(kind, dims, num_classes)
        .into_iter()
        .zip(names)
        .map(|((rows, cols), name)| {
            let mut t = Tensor::zeros(rows, cols);
            if !name.starts_with('b') {
                let s = libm::sqrt(6.0 / (rows + cols) as f64);
                for w in t.data.iter_mut() {
                    *w = rng.random_range(-s..s);
                }
            }
            t
        })
        .collect();
    Ok(Classifier {
        kind,
        dims,
        num_classes,
        seed,
        params,
    })
}

impl Classifier {
    /// Rebuild from stored tensors, checking every shape.
    pub fn from_parts(
        kind: ModelKind,
        dims: Dims,
        num_classes: usize,
        seed: u64,
        params: Vec<Tensor>,
    ) -> Result<Classifier, ModelError> {
        check_dims(kind, dims, num_classes)?;
        let expected = shapes(kind, dims, num_classes);
        let ok = params.len() == expected.len()
            && params
                .iter()
                .zip(&expected)
                .all(|(t, &(r, c))| t.rows == r && t.cols == c && t.data.len() == r * c);
        if !ok {
            return Err(ModelError::InvalidDims(
                "parameter tensors do not match the declared dims".into(),
            ));
        }
        Ok(Classifier {
            kind,
            dims,
            num_classes,
            seed,
            params,
        })
    }

    pub fn param_names(&self) -> &'static [&'static str] {
        param_names(self.kind)
    }

    pub fn parameter_count(&self) -> usize {
        self.params.iter().map(|t| t.data.len()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.params.iter().all(|t| t.data.iter().all(|w| w.is_finite()))
    }

    /// Index of the first dense layer in `params`.
    fn dense_start(&self) -> usize {
        match self.kind {
            ModelKind::BagFnn => 0,
            ModelKind::SeqMean => 1,
        }
    }
}

/// Intermediate values of one forward pass.
struct Pass {
    /// Sparse input to the first dense layer as `(index, value)`.
    input: Vec<(usize, f64)>,
    pre: Vec<f64>,
    hidden: Vec<f64>,
    logits: Vec<f64>,
}

fn dense_input(model: &Classifier, x: &Features) -> Result<Vec<(usize, f64)>, ModelError> {
    match (model.kind, x) {
        (ModelKind::BagFnn, Features::Bag(v)) if v.values.len() == model.dims.input => Ok(v
            .values
            .iter()
            .enumerate()
            .filter(|(_, w)| **w != 0.0)
            .map(|(k, w)| (k, *w))
            .collect()),
        (ModelKind::SeqMean, Features::Seq(m))
            if m.vocab == model.dims.input && m.len >= 1 && m.rows.len() == m.len =>
        {
            let emb = &model.params[0];
            let scale = 1.0 / m.len as f64;
            let mut e = vec![0.0; model.dims.embed];
            for row in &m.rows {
                for &(c, w) in row {
                    let c = c as usize;
                    if c >= m.vocab {
                        return Err(ModelError::ShapeMismatch);
                    }
                    for (acc, v) in e.iter_mut().zip(emb.row(c)) {
                        *acc += w * scale * v;
                    }
                }
            }
            Ok(e.into_iter().enumerate().collect())
        }
        _ => Err(ModelError::ShapeMismatch),
    }
}

fn run(model: &Classifier, x: &Features) -> Result<Pass, ModelError> {
    let input = dense_input(model, x)?;
    let d = model.dense_start();
    let (w1, b1, w2, b2) = (
        &model.params[d],
        &model.params[d + 1],
        &model.params[d + 2],
        &model.params[d + 3],
    );
    let mut pre = b1.data.clone();
    for &(k, v) in &input {
        for (a, w) in pre.iter_mut().zip(w1.row(k)) {
            *a += v * w;
        }
    }
    let hidden: Vec<f64> = pre.iter().map(|a| a.max(0.0)).collect();
    let mut logits = b2.data.clone();
    for (j, h) in hidden.iter().enumerate() {
        if *h != 0.0 {
            for (z, w) in logits.iter_mut().zip(w2.row(j)) {
                *z += h * w;
            }
        }
    }
    Ok(Pass {
        input,
        pre,
        hidden,
        logits,
    })
}

fn log_softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = logits.iter().map(|z| libm::exp(z - max)).sum();
    let lse = max + libm::log(sum);
    logits.iter().map(|z| z - lse).collect()
}

/// Soft-target cross-entropy of `softmax(logits)` and its gradient with
/// respect to the logits (`softmax(logits) − target`).
pub fn cross_entropy_with_logits(logits: &[f64], target: &[f64]) -> Result<(f64, Vec<f64>), ModelError> {
    if logits.len() != target.len() {
        return Err(ModelError::ShapeMismatch);
    }
    let logp = log_softmax(logits);
    let loss = -logp
        .iter()
        .zip(target)
        .filter(|(_, t)| **t != 0.0)
        .map(|(l, t)| t * l)
        .sum::<f64>();
    let grad = logp.iter().zip(target).map(|(l, t)| libm::exp(*l) - t).collect();
    Ok((loss, grad))
}

pub fn forward(model: &Classifier, x: &Features) -> Result<LabelVector, ModelError> {
    let pass = run(model, x)?;
    Ok(LabelVector {
        probs: log_softmax(&pass.logits).into_iter().map(libm::exp).collect(),
    })
}

/// Argmax of [`forward`], lowest index on ties.
pub fn predict(model: &Classifier, x: &Features) -> Result<usize, ModelError> {
    Ok(argmax(&forward(model, x)?.probs))
}

/// `−Σ targetᵢ · ln probsᵢ`, skipping zero-target terms.
pub fn loss(probs: &LabelVector, target: &LabelVector) -> Result<f64, ModelError> {
    if probs.probs.len() != target.probs.len() {
        return Err(ModelError::ShapeMismatch);
    }
    Ok(-probs
        .probs
        .iter()
        .zip(&target.probs)
        .filter(|(_, t)| **t != 0.0)
        .map(|(p, t)| t * libm::log(*p))
        .sum::<f64>())
}

/// Mean cross-entropy over `batch`.
pub fn batch_loss(model: &Classifier, batch: &[Sample]) -> Result<f64, ModelError> {
    let mut total = 0.0;
    for s in batch {
        total += cross_entropy_with_logits(&run(model, &s.features)?.logits, &s.label.probs)?.0;
    }
    Ok(total / batch.len() as f64)
}

/// Mean loss over `batch` and its gradient for every parameter tensor.
pub fn gradients(model: &Classifier, batch: &[Sample]) -> Result<(f64, Vec<Tensor>), ModelError> {
    let refs: Vec<&Sample> = batch.iter().collect();
    gradients_of(model, &refs)
}

pub(crate) fn gradients_of(model: &Classifier, batch: &[&Sample]) -> Result<(f64, Vec<Tensor>), ModelError> {
    let mut grads: Vec<Tensor> = model.params.iter().map(|t| Tensor::zeros(t.rows, t.cols)).collect();
    let scale = 1.0 / batch.len() as f64;
    let d = model.dense_start();
    let w1 = &model.params[d];
    let w2 = &model.params[d + 2];
    let mut total = 0.0;
    for s in batch {
        let pass = run(model, &s.features)?;
        let (l, dz) = cross_entropy_with_logits(&pass.logits, &s.label.probs)?;
        total += l;
        let dz: Vec<f64> = dz.into_iter().map(|g| g * scale).collect();

        for (j, h) in pass.hidden.iter().enumerate() {
            if *h != 0.0 {
                for (g, z) in grads[d + 2].row_mut(j).iter_mut().zip(&dz) {
                    *g += h * z;
                }
            }
        }
        for (g, z) in grads[d + 3].data.iter_mut().zip(&dz) {
            *g += z;
        }

        let da: Vec<f64> = (0..model.dims.hidden)
            .map(|j| {
                if pass.pre[j] > 0.0 {
                    w2.row(j).iter().zip(&dz).map(|(w, z)| w * z).sum()
                } else {
                    0.0
                }
            })
            .collect();
        for &(k, v) in &pass.input {
            for (g, a) in grads[d].row_mut(k).iter_mut().zip(&da) {
                *g += v * a;
            }
        }
        for (g, a) in grads[d + 1].data.iter_mut().zip(&da) {
            *g += a;
        }

        if let (ModelKind::SeqMean, Features::Seq(m)) = (model.kind, &s.features) {
            let de: Vec<f64> = (0..model.dims.embed)
                .map(|e| w1.row(e).iter().zip(&da).map(|(w, a)| w * a).sum())
                .collect();
            let inv_len = 1.0 / m.len as f64;
            for row in &m.rows {
                for &(c, w) in row {
                    for (g, x) in grads[0].row_mut(c as usize).iter_mut().zip(&de) {
                        *g += w * inv_len * x;
                    }
                }
            }
        }
    }
    Ok((total * scale, grads))
}
