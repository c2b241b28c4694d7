//! Refactoring-based Mixup augmentation for source-code classifiers.
//!
//! The crate is `no_std` and only needs `alloc`. Everything here is a pure
//! function of its inputs plus an explicitly threaded RNG, so results are
//! reproducible bit-for-bit from a seed. File formats, the experiment
//! runner and the command line live in the `mixcode` companion crate.
//!
//! Layout:
//!
//! - [`lang`]: the MiniPy mini-language (lexer, parser, renderer, interpreter)
//! - [`refactor`]: the label-preserving refactoring catalogue
//! - [`represent`]: bag-of-token and sequence encoders, one-hot labels
//! - [`mixup`]: Beta sampling, convex mixing and per-epoch dataset construction
//! - [`model`]: from-scratch softmax classifiers and mini-batch SGD
//! - [`corpus`]: synthetic classification / bug-detection corpora
//! - [`eval`]: accuracy, robustness and the experiment grid

#![no_std]

extern crate alloc;

pub mod corpus;
pub mod eval;
pub mod lang;
pub mod mixup;
pub mod model;
pub mod refactor;
pub mod represent;
pub mod seed;

pub use seed::{derive_seed, rng_from_seed, Rng};
