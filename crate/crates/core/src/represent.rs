//! Numeric encodings of programs and labels.
//!
//! Two program encodings share one [`Vocabulary`]:
//!
//! * bag of tokens: relative frequencies of keyword, operator and
//!   punctuation tokens (indent and dedent count as punctuation;
//!   identifiers and literals are ignored), as a dense vector over the
//!   vocabulary;
//! * token sequence: the first `L` tokens as one-hot rows, padded with the
//!   pad token. Rows are stored sparsely because mixing two one-hot rows
//!   touches at most two columns.
//!
//! Newline tokens are dropped by both encodings.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::lang::{program_tokens, Program, Token, TokenKind};

pub const PAD: &str = "<pad>";
pub const UNK: &str = "<unk>";
pub const DEFAULT_SEQ_LEN: usize = 64;
pub const DEFAULT_MAX_VOCAB: usize = 512;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RepresentError {
    #[error("class index {index} out of range for {num_classes} classes")]
    IndexOutOfRange { index: usize, num_classes: usize },
    #[error("vocabulary must start with `{PAD}` and `{UNK}` and have no duplicates")]
    MalformedVocabulary,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    lexemes: Vec<String>,
    index: BTreeMap<String, usize>,
}

impl Vocabulary {
    /// Rebuild from an ordered lexeme list (index = position).
    pub fn from_lexemes(lexemes: Vec<String>) -> Result<Vocabulary, RepresentError> {
        if lexemes.len() < 2 || lexemes[0] != PAD || lexemes[1] != UNK {
            return Err(RepresentError::MalformedVocabulary);
        }
        let mut index = BTreeMap::new();
        for (i, l) in lexemes.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(RepresentError::MalformedVocabulary);
            }
        }
        Ok(Vocabulary { lexemes, index })
    }

    pub fn lexemes(&self) -> &[String] {
        &self.lexemes
    }

    pub fn size(&self) -> usize {
        self.lexemes.len()
    }

    pub fn pad_id(&self) -> usize {
        0
    }

    pub fn unk_id(&self) -> usize {
        1
    }

    pub fn get(&self, lexeme: &str) -> Option<usize> {
        self.index.get(lexeme).copied()
    }

    /// Id of `lexeme`, or the unk id.
    pub fn id(&self, lexeme: &str) -> usize {
        self.get(lexeme).unwrap_or(self.unk_id())
    }
}

/// Non-newline tokens of the program's canonical rendering.
pub fn encoding_tokens(program: &Program) -> Vec<Token> {
    program_tokens(program)
        .into_iter()
        .filter(|t| t.kind != TokenKind::Newline)
        .collect()
}

/// Tokens that contribute to the bag-of-tokens vector.
pub fn is_counted(token: &Token) -> bool {
    matches!(
        token.kind,
        TokenKind::Keyword | TokenKind::Operator | TokenKind::Punctuation | TokenKind::Indent | TokenKind::Dedent
    )
}

/// Keep the `max_size - 2` most frequent lexemes (ties broken
/// lexicographically) after the reserved pad and unk entries.
pub fn build_vocab(corpus: &[Program], max_size: usize) -> Vocabulary {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for p in corpus {
        for t in encoding_tokens(p) {
            *counts.entry(t.vocab_key().to_string()).or_default() += 1;
        }
    }
    counts.remove(PAD);
    counts.remove(UNK);
    let mut ranked: Vec<(String, usize)> = counts.into_iter().collect();
    // BTreeMap iteration is already lexicographic; a stable sort keeps it.
    ranked.sort_by_key(|r| core::cmp::Reverse(r.1));
    let keep = max_size.saturating_sub(2);
    let mut lexemes = vec![PAD.to_string(), UNK.to_string()];
    lexemes.extend(ranked.into_iter().take(keep).map(|(l, _)| l));
    Vocabulary::from_lexemes(lexemes).expect("reserved entries first, keys unique")
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
}

/// `len` rows over a vocabulary of `vocab` columns. Each row lists its
/// nonzero `(column, weight)` entries in ascending column order.
#[derive(Debug, Clone, PartialEq)]
pub struct SeqMatrix {
    pub len: usize,
    pub vocab: usize,
    pub rows: Vec<Vec<(u32, f64)>>,
}

impl SeqMatrix {
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.rows[row]
            .iter()
            .find(|(c, _)| *c as usize == col)
            .map_or(0.0, |(_, w)| *w)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        self.rows
            .iter()
            .map(|r| {
                let mut d = vec![0.0; self.vocab];
                for &(c, w) in r {
                    d[c as usize] = w;
                }
                d
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Features {
    Bag(FeatureVector),
    Seq(SeqMatrix),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabelVector {
    pub probs: Vec<f64>,
}

impl LabelVector {
    /// Index of the largest entry, lowest index on ties.
    pub fn argmax(&self) -> usize {
        argmax(&self.probs)
    }
}

pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

pub fn encode_bag(program: &Program, vocab: &Vocabulary) -> FeatureVector {
    let mut values = vec![0.0; vocab.size()];
    let mut total = 0usize;
    for t in encoding_tokens(program).iter().filter(|t| is_counted(t)) {
        values[vocab.id(t.vocab_key())] += 1.0;
        total += 1;
    }
    if total > 0 {
        let n = total as f64;
        for v in values.iter_mut() {
            *v /= n;
        }
    }
    FeatureVector { values }
}

pub fn encode_seq(program: &Program, vocab: &Vocabulary, len: usize) -> SeqMatrix {
    let tokens = encoding_tokens(program);
    let rows = (0..len)
        .map(|i| {
            let id = tokens.get(i).map_or(vocab.pad_id(), |t| vocab.id(t.vocab_key()));
            vec![(id as u32, 1.0)]
        })
        .collect();
    SeqMatrix {
        len,
        vocab: vocab.size(),
        rows,
    }
}

pub fn encode_label(class_index: usize, num_classes: usize) -> Result<LabelVector, RepresentError> {
    if class_index >= num_classes {
        return Err(RepresentError::IndexOutOfRange {
            index: class_index,
            num_classes,
        });
    }
    let mut probs = vec![0.0; num_classes];
    probs[class_index] = 1.0;
    Ok(LabelVector { probs })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EncoderKind {
    Bag,
    Seq { len: usize },
}

/// A vocabulary plus the encoding to apply with it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Encoder {
    pub vocab: Vocabulary,
    pub kind: EncoderKind,
}

impl Encoder {
    pub fn encode(&self, program: &Program) -> Features {
        match self.kind {
            EncoderKind::Bag => Features::Bag(encode_bag(program, &self.vocab)),
            EncoderKind::Seq { len } => Features::Seq(encode_seq(program, &self.vocab, len)),
        }
    }
}
