//! Accuracy, robustness under refactoring, and multi-seed experiment grids.

#[cfg(test)]
mod tests;

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::corpus::Dataset;
use crate::lang::Program;
use crate::mixup::{MixPolicy, Strategy};
use crate::model::{
    fit, init, predict, Classifier, Dims, ModelError, ModelKind, TrainConfig, TrainStrategy, TrainTrace, TrainingSet,
};
use crate::refactor::{refactor_or_identity, RefactoringMethod};
use crate::represent::{build_vocab, Encoder, EncoderKind, Features, DEFAULT_MAX_VOCAB, DEFAULT_SEQ_LEN};
use crate::seed::{derive_seed, rng_from_seed, Rng};

/// Robustness variants per test program for problem classification.
pub const K_CLASSIFICATION: usize = 5;
/// Robustness variants per test program for bug detection.
pub const K_BUG_DETECTION: usize = 10;
/// Breakdown key for variants where no method applied.
pub const IDENTITY: &str = "identity";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("test set is empty")]
    EmptyTestSet,
    #[error("robustness multiplier K must be at least 1")]
    InvalidK,
    #[error("invalid experiment spec: {0}")]
    InvalidSpec(&'static str),
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn correct(model: &Classifier, x: &Features, y: usize) -> Result<bool, EvalError> {
    Ok(predict(model, x)? == y)
}

/// Fraction of `test` classified correctly.
pub fn accuracy(model: &Classifier, test: &Dataset, encoder: &Encoder) -> Result<f64, EvalError> {
    if test.is_empty() {
        return Err(EvalError::EmptyTestSet);
    }
    let mut hits = 0usize;
    for s in &test.samples {
        if correct(model, &encoder.encode(&s.program), s.label)? {
            hits += 1;
        }
    }
    Ok(hits as f64 / test.len() as f64)
}

/// Robustness with the number of variants and the per-method breakdown.
#[derive(Debug, Clone, PartialEq)]
pub struct RobustnessReport {
    pub robustness: f64,
    /// Size of the transformed test set, `K · |test|`.
    pub variants: usize,
    /// Method name (or [`IDENTITY`]) to `(correct, total)`.
    pub per_method: BTreeMap<String, (usize, usize)>,
}

impl RobustnessReport {
    pub fn per_method_fractions(&self) -> BTreeMap<String, f64> {
        self.per_method
            .iter()
            .map(|(k, (c, t))| (k.clone(), *c as f64 / *t as f64))
            .collect()
    }
}

/// The `K · |test|` transformed test set: each program refactored by one
/// random applicable method, or left unchanged when none applies.
pub fn robustness_variants(
    test: &Dataset,
    methods: &[RefactoringMethod],
    k: usize,
    rng: &mut Rng,
) -> Result<Vec<(Program, usize, Option<RefactoringMethod>)>, EvalError> {
    if k == 0 {
        return Err(EvalError::InvalidK);
    }
    if test.is_empty() {
        return Err(EvalError::EmptyTestSet);
    }
    let mut out = Vec::with_capacity(k * test.len());
    for s in &test.samples {
        for _ in 0..k {
            let (program, method) = refactor_or_identity(&s.program, methods, rng);
            out.push((program, s.label, method));
        }
    }
    Ok(out)
}

pub fn robustness_detail(
    model: &Classifier,
    test: &Dataset,
    methods: &[RefactoringMethod],
    k: usize,
    rng: &mut Rng,
    encoder: &Encoder,
) -> Result<RobustnessReport, EvalError> {
    let variants = robustness_variants(test, methods, k, rng)?;
    let mut hits = 0usize;
    let mut per_method: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for (program, label, method) in &variants {
        let ok = correct(model, &encoder.encode(program), *label)?;
        hits += usize::from(ok);
        let key = method.map_or(IDENTITY, |m| m.name());
        let entry = per_method.entry(key.to_string()).or_default();
        entry.0 += usize::from(ok);
        entry.1 += 1;
    }
    Ok(RobustnessReport {
        robustness: hits as f64 / variants.len() as f64,
        variants: variants.len(),
        per_method,
    })
}

/// Accuracy over `K` random refactorings of every test program.
pub fn robustness(
    model: &Classifier,
    test: &Dataset,
    methods: &[RefactoringMethod],
    k: usize,
    rng: &mut Rng,
    encoder: &Encoder,
) -> Result<f64, EvalError> {
    Ok(robustness_detail(model, test, methods, k, rng, encoder)?.robustness)
}

/// Mean and population standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
}

pub fn summarize(values: &[f64]) -> Summary {
    if values.is_empty() {
        return Summary::default();
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    Summary {
        mean,
        std: libm::sqrt(var),
    }
}

/// A fraction as a percentage rounded half-to-even to two decimals.
pub fn percent(fraction: f64) -> f64 {
    libm::rint(fraction * 10_000.0) / 100.0
}

/// `methods` ranked by accuracy (descending, ties by name) and split in
/// half; the good half takes the extra method of an odd count.
pub fn rank_methods(scores: &[(RefactoringMethod, f64)]) -> (Vec<RefactoringMethod>, Vec<RefactoringMethod>) {
    let mut ranked = scores.to_vec();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.name().cmp(b.0.name())));
    let cut = ranked.len().div_ceil(2);
    let good = ranked[..cut].iter().map(|s| s.0).collect();
    let poor = ranked[cut..].iter().map(|s| s.0).collect();
    (good, poor)
}

/// Methods used for augmentation in one cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MethodSubset {
    All,
    Single(RefactoringMethod),
    Named {
        name: String,
        methods: Vec<RefactoringMethod>,
    },
}

impl MethodSubset {
    pub fn name(&self) -> String {
        match self {
            MethodSubset::All => "all".into(),
            MethodSubset::Single(m) => m.name().into(),
            MethodSubset::Named { name, .. } => name.clone(),
        }
    }

    pub fn methods(&self) -> Vec<RefactoringMethod> {
        match self {
            MethodSubset::All => RefactoringMethod::ALL.to_vec(),
            MethodSubset::Single(m) => alloc::vec![*m],
            MethodSubset::Named { methods, .. } => methods.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyKind {
    Standard,
    Basic,
    MixCode,
}

impl StrategyKind {
    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::Standard => "standard",
            StrategyKind::Basic => "basic",
            StrategyKind::MixCode => "mixcode",
        }
    }
}

/// Training hyperparameters shared by every cell.
///
/// The default batch of 2 gives bag-fnn enough SGD steps in 50 epochs to
/// leave the initial plateau; with batch 32 the loss stays near `ln C`.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyper {
    pub epochs: usize,
    pub batch_size: usize,
    /// `None` uses the model kind's default.
    pub learning_rate: Option<f64>,
    pub hidden: usize,
    pub embed: usize,
    pub seq_len: usize,
    pub max_vocab: usize,
}

impl Default for Hyper {
    fn default() -> Hyper {
        Hyper {
            epochs: 50,
            batch_size: 2,
            learning_rate: None,
            hidden: crate::model::DEFAULT_HIDDEN,
            embed: crate::model::DEFAULT_EMBED,
            seq_len: DEFAULT_SEQ_LEN,
            max_vocab: DEFAULT_MAX_VOCAB,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub dataset: String,
    pub models: Vec<ModelKind>,
    pub strategies: Vec<StrategyKind>,
    /// α values for MixCode cells.
    pub alphas: Vec<f64>,
    /// Pairings for MixCode cells.
    pub pairings: Vec<Strategy>,
    /// Augmentation method subsets for Basic and MixCode cells.
    pub subsets: Vec<MethodSubset>,
    /// Methods used to build the robustness test sets.
    pub robustness_methods: Vec<RefactoringMethod>,
    pub k: usize,
    pub seeds: Vec<u64>,
    pub hyper: Hyper,
}

impl ExperimentSpec {
    /// Standard, Basic and MixCode (α = 0.1, Ori+Ref, all methods).
    pub fn rq1(dataset: &str, models: Vec<ModelKind>, seeds: Vec<u64>, k: usize) -> ExperimentSpec {
        ExperimentSpec {
            dataset: dataset.into(),
            models,
            strategies: alloc::vec![StrategyKind::Standard, StrategyKind::Basic, StrategyKind::MixCode],
            alphas: alloc::vec![0.1],
            pairings: alloc::vec![Strategy::OriRef],
            subsets: alloc::vec![MethodSubset::All],
            robustness_methods: RefactoringMethod::ALL.to_vec(),
            k,
            seeds,
            hyper: Hyper::default(),
        }
    }

    pub fn validate(&self) -> Result<(), EvalError> {
        if self.k == 0 {
            return Err(EvalError::InvalidK);
        }
        if self.seeds.is_empty() {
            return Err(EvalError::InvalidSpec("at least one seed is required"));
        }
        let mut seeds = self.seeds.clone();
        seeds.sort_unstable();
        seeds.dedup();
        if seeds.len() != self.seeds.len() {
            return Err(EvalError::InvalidSpec("seeds must be distinct"));
        }
        if self.models.is_empty() || self.strategies.is_empty() {
            return Err(EvalError::InvalidSpec("models and strategies must be non-empty"));
        }
        let needs_subsets = self.strategies.iter().any(|s| *s != StrategyKind::Standard);
        if needs_subsets && self.subsets.is_empty() {
            return Err(EvalError::InvalidSpec("augmenting strategies need a method subset"));
        }
        if self.strategies.contains(&StrategyKind::MixCode) && (self.alphas.is_empty() || self.pairings.is_empty()) {
            return Err(EvalError::InvalidSpec("mixcode needs an alpha and a pairing"));
        }
        if self.hyper.epochs == 0 || self.hyper.batch_size == 0 {
            return Err(EvalError::InvalidSpec("epochs and batch size must be positive"));
        }
        Ok(())
    }
}

/// One row of the experiment table.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub model: ModelKind,
    pub strategy: TrainStrategy,
    pub alpha: Option<f64>,
    pub subset: Option<String>,
}

impl Cell {
    pub fn strategy_label(&self) -> String {
        self.strategy.label()
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.model, self.strategy.label())?;
        if let Some(a) = self.alpha {
            write!(f, " alpha={a}")?;
        }
        if let Some(s) = &self.subset {
            write!(f, " methods={s}")?;
        }
        Ok(())
    }
}

/// Cells in table order: model, then strategy, then subset, pairing and α.
pub fn cells(spec: &ExperimentSpec) -> Vec<Cell> {
    let mut out = Vec::new();
    for &model in &spec.models {
        for &kind in &spec.strategies {
            match kind {
                StrategyKind::Standard => out.push(Cell {
                    model,
                    strategy: TrainStrategy::Standard,
                    alpha: None,
                    subset: None,
                }),
                StrategyKind::Basic => {
                    for subset in &spec.subsets {
                        out.push(Cell {
                            model,
                            strategy: TrainStrategy::Basic {
                                methods: subset.methods(),
                            },
                            alpha: None,
                            subset: Some(subset.name()),
                        });
                    }
                }
                StrategyKind::MixCode => {
                    for subset in &spec.subsets {
                        for &pairing in &spec.pairings {
                            for &alpha in &spec.alphas {
                                out.push(Cell {
                                    model,
                                    strategy: TrainStrategy::MixCode(MixPolicy {
                                        alpha,
                                        strategy: pairing,
                                        methods: subset.methods(),
                                        fixed_lambda: None,
                                    }),
                                    alpha: Some(alpha),
                                    subset: Some(subset.name()),
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Outcome of training and evaluating one cell on one seed.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub seed: u64,
    pub accuracy: f64,
    pub robustness: RobustnessReport,
    pub trace: TrainTrace,
}

/// Aggregate over the runs of one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub runs: usize,
    pub accuracy: Summary,
    pub robustness: Summary,
    /// Mean per-method robustness across runs.
    pub per_method: BTreeMap<String, f64>,
}

impl EvalReport {
    pub fn from_runs(runs: &[RunResult]) -> EvalReport {
        let acc: Vec<f64> = runs.iter().map(|r| r.accuracy).collect();
        let rob: Vec<f64> = runs.iter().map(|r| r.robustness.robustness).collect();
        let mut sums: BTreeMap<String, (f64, usize)> = BTreeMap::new();
        for r in runs {
            for (k, v) in r.robustness.per_method_fractions() {
                let e = sums.entry(k).or_default();
                e.0 += v;
                e.1 += 1;
            }
        }
        EvalReport {
            runs: runs.len(),
            accuracy: summarize(&acc),
            robustness: summarize(&rob),
            per_method: sums.into_iter().map(|(k, (s, n))| (k, s / n as f64)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub cell: Cell,
    /// Successful runs, in seed order.
    pub runs: Vec<RunResult>,
    /// The aggregate, or the error that stopped the cell.
    pub report: Result<EvalReport, String>,
}

impl CellResult {
    pub fn status(&self) -> String {
        match &self.report {
            Ok(_) => "ok".into(),
            Err(e) => alloc::format!("failed: {e}"),
        }
    }
}

/// Encoder for `kind` with a vocabulary built from the training programs.
pub fn encoder_for(kind: ModelKind, train: &Dataset, hyper: &Hyper) -> Encoder {
    let vocab = build_vocab(&train.programs(), hyper.max_vocab);
    let kind = match kind {
        ModelKind::BagFnn => EncoderKind::Bag,
        ModelKind::SeqMean => EncoderKind::Seq { len: hyper.seq_len },
    };
    Encoder { vocab, kind }
}

/// Train `cell` with `seed` and evaluate it.
pub fn run_once(
    cell: &Cell,
    seed: u64,
    train: &Dataset,
    test: &Dataset,
    spec: &ExperimentSpec,
) -> Result<(Classifier, RunResult), EvalError> {
    let encoder = encoder_for(cell.model, train, &spec.hyper);
    let dims = Dims {
        input: encoder.vocab.size(),
        hidden: spec.hyper.hidden,
        embed: spec.hyper.embed,
    };
    let model = init(cell.model, dims, train.num_classes, seed)?;
    let mut config = TrainConfig::new(cell.model, seed, cell.strategy.clone());
    config.epochs = spec.hyper.epochs;
    config.batch_size = spec.hyper.batch_size;
    if let Some(lr) = spec.hyper.learning_rate {
        config.learning_rate = lr;
    }
    let programs = train.programs();
    let labels = train.labels();
    let set = TrainingSet {
        programs: &programs,
        labels: &labels,
        num_classes: train.num_classes,
        encoder: &encoder,
    };
    let heldout: Vec<(Features, usize)> = test
        .samples
        .iter()
        .map(|s| (encoder.encode(&s.program), s.label))
        .collect();
    let mut provider = cell.strategy.provider(set)?;
    let (model, trace) = fit(model, provider.as_mut(), &config, &heldout)?;
    let acc = accuracy(&model, test, &encoder)?;
    let mut rng = rng_from_seed(derive_seed(seed, "robustness"));
    let rob = robustness_detail(&model, test, &spec.robustness_methods, spec.k, &mut rng, &encoder)?;
    Ok((
        model,
        RunResult {
            seed,
            accuracy: acc,
            robustness: rob,
            trace,
        },
    ))
}

/// All seeds of one cell; the first error marks the cell failed.
pub fn run_cell(cell: &Cell, train: &Dataset, test: &Dataset, spec: &ExperimentSpec) -> CellResult {
    let mut runs = Vec::with_capacity(spec.seeds.len());
    for &seed in &spec.seeds {
        match run_once(cell, seed, train, test, spec) {
            Ok((_, r)) => runs.push(r),
            Err(e) => {
                return CellResult {
                    cell: cell.clone(),
                    runs,
                    report: Err(alloc::format!("seed {seed}: {e}")),
                }
            }
        }
    }
    let report = Ok(EvalReport::from_runs(&runs));
    CellResult {
        cell: cell.clone(),
        runs,
        report,
    }
}

/// Every cell of `spec`, in table order.
pub fn run_experiment(spec: &ExperimentSpec, train: &Dataset, test: &Dataset) -> Result<Vec<CellResult>, EvalError> {
    spec.validate()?;
    if test.is_empty() {
        return Err(EvalError::EmptyTestSet);
    }
    Ok(cells(spec).iter().map(|c| run_cell(c, train, test, spec)).collect())
}

/// Single-method MixCode cells for the ablation ranking.
pub fn single_method_spec(base: &ExperimentSpec, methods: &[RefactoringMethod]) -> ExperimentSpec {
    ExperimentSpec {
        strategies: alloc::vec![StrategyKind::MixCode],
        subsets: methods.iter().map(|m| MethodSubset::Single(*m)).collect(),
        ..base.clone()
    }
}

/// Good and poor subsets from single-method MixCode accuracies of `model`.
/// Failed cells rank last.
pub fn good_poor_subsets(results: &[CellResult], model: ModelKind) -> (MethodSubset, MethodSubset) {
    let scores: Vec<(RefactoringMethod, f64)> = results
        .iter()
        .filter(|r| r.cell.model == model)
        .filter_map(|r| {
            let TrainStrategy::MixCode(p) = &r.cell.strategy else {
                return None;
            };
            let [m] = p.methods[..] else { return None };
            let acc = r.report.as_ref().map_or(f64::NEG_INFINITY, |e| e.accuracy.mean);
            Some((m, acc))
        })
        .collect();
    let (good, poor) = rank_methods(&scores);
    (
        MethodSubset::Named {
            name: "good".into(),
            methods: good,
        },
        MethodSubset::Named {
            name: "poor".into(),
            methods: poor,
        },
    )
}
