//! JSON checkpoints: model weights plus the encoder they were trained with.

use std::path::Path;

use serde::{Deserialize, Serialize};

use mixcode_core::model::{Classifier, Dims, ModelKind, Tensor};
use mixcode_core::represent::{Encoder, EncoderKind, Vocabulary};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CheckpointError {
    #[error("checkpoint is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported checkpoint format version {0}")]
    Version(u32),
    #[error("invalid checkpoint: {0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Serialize, Deserialize)]
struct DimsDoc {
    input: usize,
    hidden: usize,
    embed: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct TensorDoc {
    name: String,
    /// Row-major nested arrays.
    values: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CheckpointDoc {
    format_version: u32,
    kind: String,
    dims: DimsDoc,
    num_classes: usize,
    seed: u64,
    /// Sequence length for seq-mean, absent for bag-fnn.
    seq_len: Option<usize>,
    vocab: Vec<String>,
    weights: Vec<TensorDoc>,
}

pub fn to_json(model: &Classifier, encoder: &Encoder) -> String {
    let weights = model
        .params
        .iter()
        .zip(model.param_names())
        .map(|(t, name)| TensorDoc {
            name: (*name).into(),
            values: (0..t.rows).map(|r| t.row(r).to_vec()).collect(),
        })
        .collect();
    let doc = CheckpointDoc {
        format_version: FORMAT_VERSION,
        kind: model.kind.name().into(),
        dims: DimsDoc {
            input: model.dims.input,
            hidden: model.dims.hidden,
            embed: model.dims.embed,
        },
        num_classes: model.num_classes,
        seed: model.seed,
        seq_len: match encoder.kind {
            EncoderKind::Bag => None,
            EncoderKind::Seq { len } => Some(len),
        },
        vocab: encoder.vocab.lexemes().to_vec(),
        weights,
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("checkpoint documents always serialize");
    text.push('\n');
    text
}

pub fn from_json(text: &str) -> Result<(Classifier, Encoder), CheckpointError> {
    let doc: CheckpointDoc = serde_json::from_str(text)?;
    if doc.format_version != FORMAT_VERSION {
        return Err(CheckpointError::Version(doc.format_version));
    }
    let kind: ModelKind = doc.kind.parse().map_err(|e| CheckpointError::Invalid(format!("{e}")))?;
    let dims = Dims {
        input: doc.dims.input,
        hidden: doc.dims.hidden,
        embed: doc.dims.embed,
    };
    let mut params = Vec::with_capacity(doc.weights.len());
    for (t, expected) in doc.weights.into_iter().zip(kind.param_names()) {
        if t.name != *expected {
            return Err(CheckpointError::Invalid(format!(
                "expected tensor `{expected}`, found `{}`",
                t.name
            )));
        }
        let rows = t.values.len();
        let cols = t.values.first().map_or(0, Vec::len);
        if t.values.iter().any(|r| r.len() != cols) {
            return Err(CheckpointError::Invalid(format!("ragged tensor `{}`", t.name)));
        }
        params.push(Tensor {
            rows,
            cols,
            data: t.values.into_iter().flatten().collect(),
        });
    }
    let model = Classifier::from_parts(kind, dims, doc.num_classes, doc.seed, params)
        .map_err(|e| CheckpointError::Invalid(e.to_string()))?;
    let vocab = Vocabulary::from_lexemes(doc.vocab).map_err(|e| CheckpointError::Invalid(e.to_string()))?;
    let encoder_kind = match (kind, doc.seq_len) {
        (ModelKind::BagFnn, None) => EncoderKind::Bag,
        (ModelKind::SeqMean, Some(len)) if len >= 1 => EncoderKind::Seq { len },
        _ => return Err(CheckpointError::Invalid("seq_len does not match the model kind".into())),
    };
    if vocab.size() != dims.input {
        return Err(CheckpointError::Invalid(
            "vocabulary size differs from the input dimension".into(),
        ));
    }
    Ok((
        model,
        Encoder {
            vocab,
            kind: encoder_kind,
        },
    ))
}

pub fn save_checkpoint(path: &Path, model: &Classifier, encoder: &Encoder) -> Result<(), CheckpointError> {
    std::fs::write(path, to_json(model, encoder))?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<(Classifier, Encoder), CheckpointError> {
    from_json(&std::fs::read_to_string(path)?)
}
