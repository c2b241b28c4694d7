//! Mixup of code representations and labels.
//!
//! `x_mix = λ·x_i + (1 − λ)·x_j` and `y_mix = λ·y_i + (1 − λ)·y_j` with
//! `λ ~ Beta(α, α)` drawn once per pair. [`build_epoch_dataset`] pairs a
//! shuffled copy of the training set with a positionally aligned partner
//! set whose make-up depends on the [`Strategy`].

mod beta;

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::lang::Program;
use crate::refactor::{refactor_or_identity, RefactoringMethod};
use crate::represent::{encode_label, Encoder, FeatureVector, Features, LabelVector, RepresentError, SeqMatrix};

pub use beta::{sample_gamma, sample_lambda};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MixupError {
    #[error("alpha must be a positive finite number, got {0}")]
    InvalidAlpha(f64),
    #[error("operands differ in kind or shape")]
    ShapeMismatch,
    #[error("need at least two samples to form pairs, got {0}")]
    TooFewSamples(usize),
    #[error("{programs} programs but {labels} labels")]
    LengthMismatch { programs: usize, labels: usize },
    #[error("strategy {0} needs at least one refactoring method")]
    NoMethods(Strategy),
    #[error(transparent)]
    Label(#[from] RepresentError),
}

/// Which sets the two mixing partners come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    OriOri,
    OriRef,
    RefRef,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::OriOri, Strategy::OriRef, Strategy::RefRef];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::OriOri => "ori-ori",
            Strategy::OriRef => "ori-ref",
            Strategy::RefRef => "ref-ref",
        }
    }

    pub fn uses_refactoring(self) -> bool {
        self != Strategy::OriOri
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown mixing strategy `{0}` (expected ori-ori, ori-ref or ref-ref)")]
pub struct StrategyParseError(pub alloc::string::String);

impl FromStr for Strategy {
    type Err = StrategyParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| StrategyParseError(s.into()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixPolicy {
    pub alpha: f64,
    pub strategy: Strategy,
    pub methods: Vec<RefactoringMethod>,
    /// Use this λ for every pair instead of sampling.
    pub fixed_lambda: Option<f64>,
}

impl MixPolicy {
    pub fn new(alpha: f64, strategy: Strategy, methods: Vec<RefactoringMethod>) -> Result<MixPolicy, MixupError> {
        let policy = MixPolicy {
            alpha,
            strategy,
            methods,
            fixed_lambda: None,
        };
        policy.validate()?;
        Ok(policy)
    }

    pub fn validate(&self) -> Result<(), MixupError> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(MixupError::InvalidAlpha(self.alpha));
        }
        if self.strategy.uses_refactoring() && self.methods.is_empty() {
            return Err(MixupError::NoMethods(self.strategy));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixedSample {
    pub features: Features,
    pub label: LabelVector,
    pub lambda_used: f64,
    /// Training-set indices of the λ-weighted and (1 − λ)-weighted partners.
    pub pair: (usize, usize),
}

fn lerp(a: f64, b: f64, lambda: f64) -> f64 {
    lambda * a + (1.0 - lambda) * b
}

fn mix_dense(a: &[f64], b: &[f64], lambda: f64) -> Result<Vec<f64>, MixupError> {
    if a.len() != b.len() {
        return Err(MixupError::ShapeMismatch);
    }
    Ok(a.iter().zip(b).map(|(x, y)| lerp(*x, *y, lambda)).collect())
}

fn mix_row(a: &[(u32, f64)], b: &[(u32, f64)], lambda: f64) -> Vec<(u32, f64)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let (col, x, y) = match (a.get(i), b.get(j)) {
            (Some(&(ca, wa)), Some(&(cb, wb))) if ca == cb => {
                i += 1;
                j += 1;
                (ca, wa, wb)
            }
            (Some(&(ca, wa)), Some(&(cb, _))) if ca < cb => {
                i += 1;
                (ca, wa, 0.0)
            }
            (Some(&(ca, wa)), None) => {
                i += 1;
                (ca, wa, 0.0)
            }
            (_, Some(&(cb, wb))) => {
                j += 1;
                (cb, 0.0, wb)
            }
            (None, None) => unreachable!(),
        };
        let w = lerp(x, y, lambda);
        if w != 0.0 {
            out.push((col, w));
        }
    }
    out
}

/// Elementwise `λ·a + (1 − λ)·b`.
pub fn mix_features(a: &Features, b: &Features, lambda: f64) -> Result<Features, MixupError> {
    match (a, b) {
        (Features::Bag(x), Features::Bag(y)) => Ok(Features::Bag(FeatureVector {
            values: mix_dense(&x.values, &y.values, lambda)?,
        })),
        (Features::Seq(x), Features::Seq(y)) => {
            if x.len != y.len || x.vocab != y.vocab {
                return Err(MixupError::ShapeMismatch);
            }
            Ok(Features::Seq(SeqMatrix {
                len: x.len,
                vocab: x.vocab,
                rows: x.rows.iter().zip(&y.rows).map(|(r, s)| mix_row(r, s, lambda)).collect(),
            }))
        }
        _ => Err(MixupError::ShapeMismatch),
    }
}

pub fn mix_labels(a: &LabelVector, b: &LabelVector, lambda: f64) -> Result<LabelVector, MixupError> {
    Ok(LabelVector {
        probs: mix_dense(&a.probs, &b.probs, lambda)?,
    })
}

/// One epoch of mixed training data, one sample per training program.
///
/// Random draws happen in a fixed order: one refactoring per program (not
/// for `OriOri`), the shuffle, then per pair a second refactoring (only
/// for `RefRef`) followed by λ.
pub fn build_epoch_dataset<R: Rng + ?Sized>(
    programs: &[Program],
    labels: &[usize],
    num_classes: usize,
    policy: &MixPolicy,
    encoder: &Encoder,
    rng: &mut R,
) -> Result<Vec<MixedSample>, MixupError> {
    if programs.len() != labels.len() {
        return Err(MixupError::LengthMismatch {
            programs: programs.len(),
            labels: labels.len(),
        });
    }
    if programs.len() < 2 {
        return Err(MixupError::TooFewSamples(programs.len()));
    }
    policy.validate()?;
    let n = programs.len();
    let one_hot = labels
        .iter()
        .map(|&c| encode_label(c, num_classes))
        .collect::<Result<Vec<_>, _>>()?;
    let originals: Vec<Features> = programs.iter().map(|p| encoder.encode(p)).collect();

    let partners: Vec<Features> = match policy.strategy {
        Strategy::OriOri => originals.clone(),
        Strategy::OriRef | Strategy::RefRef => programs
            .iter()
            .map(|p| encoder.encode(&refactor_or_identity(p, &policy.methods, rng).0))
            .collect(),
    };

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);

    let mut out = Vec::with_capacity(n);
    for (j, &i) in order.iter().enumerate() {
        let refactored;
        let first = match policy.strategy {
            Strategy::RefRef => {
                refactored = encoder.encode(&refactor_or_identity(&programs[i], &policy.methods, rng).0);
                &refactored
            }
            _ => &originals[i],
        };
        let lambda = match policy.fixed_lambda {
            Some(l) => l,
            None => sample_lambda(policy.alpha, rng)?,
        };
        out.push(MixedSample {
            features: mix_features(first, &partners[j], lambda)?,
            label: mix_labels(&one_hot[i], &one_hot[j], lambda)?,
            lambda_used: lambda,
            pair: (i, j),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
