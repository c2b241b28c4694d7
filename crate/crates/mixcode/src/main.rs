use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context as _;
use clap::{Args, Parser, Subcommand};

use mixcode::checkpoint::{load_checkpoint, save_checkpoint};
use mixcode::config::{parse_kv, ConfigError, List, Resolver};
use mixcode::dataset_file::{load_dataset, save_dataset};
use mixcode::results::{per_method_csv, results_csv, traces_csv};
use mixcode::runner::{run_preset, GridOptions, Preset};
use mixcode_core::corpus::{generate_bug_detection, generate_classification, Dataset, Example, GeneratorSpec, Task};
use mixcode_core::eval::{accuracy, encoder_for, percent, robustness_detail, Hyper, K_BUG_DETECTION, K_CLASSIFICATION};
use mixcode_core::mixup::{build_epoch_dataset, MixPolicy, Strategy};
use mixcode_core::model::{fit, init, Dims, ModelKind, TrainConfig, TrainStrategy, TrainingSet};
use mixcode_core::refactor::{refactor_or_identity, RefactoringMethod};
use mixcode_core::represent::{build_vocab, Encoder, EncoderKind, Features};
use mixcode_core::{derive_seed, rng_from_seed};

const DEFAULT_OUT: &str = "mixcode-out";

#[derive(Parser)]
#[command(
    name = "mixcode",
    version,
    about = "Refactoring-based Mixup for MiniPy code classifiers"
)]
struct Cli {
    /// Output directory.
    #[arg(long, global = true, env = "MIXCODE_OUT")]
    out: Option<PathBuf>,
    /// key=value config file; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate train/test .mpyds files.
    Gen(GenArgs),
    /// Refactor a dataset, or write one epoch of mixed samples as CSV.
    Augment(AugmentArgs),
    /// Train a model and write a checkpoint with its loss trace.
    Train(TrainArgs),
    /// Accuracy and robustness of a checkpoint on a test set.
    Eval(EvalArgs),
    /// Run a preset experiment grid over several seeds.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct GenArgs {
    /// classification or bug-detection.
    #[arg(long)]
    task: Option<Task>,
    #[arg(long)]
    problems: Option<usize>,
    #[arg(long)]
    per_problem: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Bug detection: fraction of programs paired with a mutant.
    #[arg(long)]
    mutation_rate: Option<f64>,
}

#[derive(Args)]
struct AugmentArgs {
    /// Input .mpyds file.
    #[arg(long)]
    input: Option<PathBuf>,
    /// refactor or mixup.
    #[arg(long)]
    mode: Option<Mode>,
    /// Comma-separated refactoring methods (default: all).
    #[arg(long)]
    methods: Option<List<RefactoringMethod>>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Pairing: ori-ori, ori-ref or ref-ref.
    #[arg(long)]
    strategy: Option<Strategy>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_vocab: Option<usize>,
}

#[derive(Args)]
struct HyperArgs {
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    /// Learning rate (default depends on the model kind).
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    hidden: Option<usize>,
    #[arg(long)]
    embed: Option<usize>,
    #[arg(long)]
    seq_len: Option<usize>,
    #[arg(long)]
    max_vocab: Option<usize>,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    train: Option<PathBuf>,
    /// Optional held-out set traced after every epoch.
    #[arg(long)]
    test: Option<PathBuf>,
    /// bag-fnn or seq-mean.
    #[arg(long)]
    model: Option<ModelKind>,
    /// standard, basic or mixcode.
    #[arg(long)]
    strategy: Option<TrainMode>,
    /// MixCode pairing: ori-ori, ori-ref or ref-ref.
    #[arg(long)]
    pairing: Option<Strategy>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    methods: Option<List<RefactoringMethod>>,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    hyper: HyperArgs,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    #[arg(long)]
    test: Option<PathBuf>,
    /// Refactored variants per test program (default by task).
    #[arg(long)]
    k: Option<usize>,
    /// Robustness seed (default: the checkpoint's seed).
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    methods: Option<List<RefactoringMethod>>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// rq1, rq2-strategy, rq2-alpha or rq3.
    #[arg(long)]
    preset: Option<Preset>,
    /// Training .mpyds; without it a corpus is generated.
    #[arg(long)]
    train: Option<PathBuf>,
    #[arg(long)]
    test: Option<PathBuf>,
    /// Task of the generated corpus.
    #[arg(long)]
    task: Option<Task>,
    /// Seed of the generated corpus.
    #[arg(long)]
    data_seed: Option<u64>,
    #[arg(long)]
    models: Option<List<ModelKind>>,
    #[arg(long)]
    seeds: Option<List<u64>>,
    #[arg(long)]
    k: Option<usize>,
    /// α of MixCode cells outside the α sweep.
    #[arg(long)]
    alpha: Option<f64>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    jobs: Option<usize>,
    #[command(flatten)]
    hyper: HyperArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Refactor,
    Mixup,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Mode, String> {
        match s {
            "refactor" => Ok(Mode::Refactor),
            "mixup" => Ok(Mode::Mixup),
            _ => Err(format!("unknown mode `{s}` (expected refactor or mixup)")),
        }
    }
}

impl Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Refactor => "refactor",
            Mode::Mixup => "mixup",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TrainMode {
    Standard,
    Basic,
    MixCode,
}

impl std::str::FromStr for TrainMode {
    type Err = String;

    fn from_str(s: &str) -> Result<TrainMode, String> {
        match s {
            "standard" => Ok(TrainMode::Standard),
            "basic" => Ok(TrainMode::Basic),
            "mixcode" => Ok(TrainMode::MixCode),
            _ => Err(format!("unknown strategy `{s}` (expected standard, basic or mixcode)")),
        }
    }
}

impl Display for TrainMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TrainMode::Standard => "standard",
            TrainMode::Basic => "basic",
            TrainMode::MixCode => "mixcode",
        })
    }
}

/// Exit 2 for usage and validation errors, 1 for runtime failures.
enum Failure {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Failure {
        Failure::Usage(e.to_string())
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Failure {
        Failure::Runtime(e)
    }
}

fn usage(e: impl Display) -> Failure {
    Failure::Usage(e.to_string())
}

type CmdResult = Result<(), Failure>;

fn require<T>(value: Option<T>, key: &str) -> Result<T, Failure> {
    value.ok_or_else(|| usage(format!("missing required setting `{key}`")))
}

fn input_path(r: &mut Resolver, key: &str, flag: Option<PathBuf>) -> Result<Option<PathBuf>, Failure> {
    let path = r
        .get_opt(key, flag.map(|p| p.display().to_string()))?
        .map(PathBuf::from);
    if let Some(p) = &path {
        if !p.is_file() {
            return Err(usage(format!("input `{}` does not exist", p.display())));
        }
    }
    Ok(path)
}

fn read_data(path: &Path) -> Result<Dataset, Failure> {
    let d = load_dataset(path).with_context(|| format!("reading {}", path.display()))?;
    d.validate().map_err(|e| usage(format!("{}: {e}", path.display())))?;
    Ok(d)
}

fn write_file(out: &Path, name: &str, content: &str) -> anyhow::Result<PathBuf> {
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let path = out.join(name);
    std::fs::write(&path, content).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

fn finish(r: &Resolver, out: &Path, command: &str) -> CmdResult {
    let path = write_file(out, &format!("{command}.manifest"), &r.manifest())?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn methods_setting(r: &mut Resolver, flag: Option<List<RefactoringMethod>>) -> Result<Vec<RefactoringMethod>, Failure> {
    let methods = r.get("methods", flag, List(RefactoringMethod::ALL.to_vec()))?.0;
    if methods.is_empty() {
        return Err(usage("`methods` must name at least one method"));
    }
    Ok(methods)
}

fn hyper_settings(r: &mut Resolver, h: HyperArgs) -> Result<Hyper, Failure> {
    let d = Hyper::default();
    let hyper = Hyper {
        epochs: r.get("epochs", h.epochs, d.epochs)?,
        batch_size: r.get("batch-size", h.batch_size, d.batch_size)?,
        learning_rate: r.get_opt("lr", h.lr)?,
        hidden: r.get("hidden", h.hidden, d.hidden)?,
        embed: r.get("embed", h.embed, d.embed)?,
        seq_len: r.get("seq-len", h.seq_len, d.seq_len)?,
        max_vocab: r.get("max-vocab", h.max_vocab, d.max_vocab)?,
    };
    if hyper.epochs == 0 || hyper.batch_size == 0 || hyper.hidden == 0 || hyper.embed == 0 || hyper.seq_len == 0 {
        return Err(usage("epochs, batch-size, hidden, embed and seq-len must be positive"));
    }
    if hyper.learning_rate.is_some_and(|lr| !(lr > 0.0 && lr.is_finite())) {
        return Err(usage("lr must be positive"));
    }
    Ok(hyper)
}

fn default_k(task: Task) -> usize {
    match task {
        Task::Classification => K_CLASSIFICATION,
        Task::BugDetection => K_BUG_DETECTION,
    }
}

fn generate(task: Task, spec: &GeneratorSpec) -> Result<(Dataset, Dataset), Failure> {
    spec.validate().map_err(usage)?;
    let pair = match task {
        Task::Classification => generate_classification(spec),
        Task::BugDetection => generate_bug_detection(spec),
    };
    pair.map_err(|e| Failure::Runtime(e.into()))
}

fn cmd_gen(r: &mut Resolver, out: &Path, a: GenArgs) -> CmdResult {
    let task = r.get("task", a.task, Task::Classification)?;
    let d = match task {
        Task::Classification => GeneratorSpec::classification(7),
        Task::BugDetection => GeneratorSpec::bug_detection(7),
    };
    let spec = GeneratorSpec {
        num_problems: r.get("problems", a.problems, d.num_problems)?,
        programs_per_problem: r.get("per-problem", a.per_problem, d.programs_per_problem)?,
        seed: r.get("seed", a.seed, d.seed)?,
        mutation_rate: r.get("mutation-rate", a.mutation_rate, d.mutation_rate)?,
    };
    r.check_unused(&["command"])?;
    let (train, test) = generate(task, &spec)?;
    for (name, d) in [("train.mpyds", &train), ("test.mpyds", &test)] {
        let path = out.join(name);
        std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
        save_dataset(&path, d).with_context(|| format!("writing {}", path.display()))?;
        eprintln!("wrote {} ({} samples)", path.display(), d.len());
    }
    finish(r, out, "gen")
}

fn cmd_augment(r: &mut Resolver, out: &Path, a: AugmentArgs) -> CmdResult {
    let input = require(input_path(r, "input", a.input)?, "input")?;
    let mode = r.get("mode", a.mode, Mode::Refactor)?;
    let methods = methods_setting(r, a.methods)?;
    let seed = r.get("seed", a.seed, 0)?;
    let (alpha, strategy, max_vocab) = if mode == Mode::Mixup {
        (
            r.get("alpha", a.alpha, 0.1)?,
            r.get("strategy", a.strategy, Strategy::OriRef)?,
            r.get("max-vocab", a.max_vocab, Hyper::default().max_vocab)?,
        )
    } else {
        (0.0, Strategy::OriRef, 0)
    };
    r.check_unused(&["command"])?;
    let data = read_data(&input)?;
    let mut rng = rng_from_seed(derive_seed(seed, "augment"));
    match mode {
        Mode::Refactor => {
            let mut changed = 0usize;
            let samples = data
                .samples
                .iter()
                .map(|s| {
                    let (program, method) = refactor_or_identity(&s.program, &methods, &mut rng);
                    changed += usize::from(method.is_some());
                    Example { program, ..s.clone() }
                })
                .collect();
            let augmented = Dataset {
                samples,
                ..data.clone()
            };
            std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
            let path = out.join("augmented.mpyds");
            save_dataset(&path, &augmented).with_context(|| format!("writing {}", path.display()))?;
            eprintln!(
                "wrote {} ({changed} of {} programs refactored)",
                path.display(),
                data.len()
            );
        }
        Mode::Mixup => {
            let policy = MixPolicy::new(alpha, strategy, methods).map_err(usage)?;
            let programs = data.programs();
            let encoder = Encoder {
                vocab: build_vocab(&programs, max_vocab),
                kind: EncoderKind::Bag,
            };
            let mixed = build_epoch_dataset(&programs, &data.labels(), data.num_classes, &policy, &encoder, &mut rng)
                .map_err(usage)?;
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header = vec!["i".to_string(), "j".into(), "lambda".into()];
            header.extend((0..encoder.vocab.size()).map(|t| format!("x{t}")));
            header.extend((0..data.num_classes).map(|c| format!("y{c}")));
            w.write_record(&header).context("writing csv")?;
            for m in &mixed {
                let Features::Bag(f) = &m.features else {
                    unreachable!("bag encoder")
                };
                let mut row = vec![m.pair.0.to_string(), m.pair.1.to_string(), m.lambda_used.to_string()];
                row.extend(f.values.iter().map(f64::to_string));
                row.extend(m.label.probs.iter().map(f64::to_string));
                w.write_record(&row).context("writing csv")?;
            }
            let text = String::from_utf8(w.into_inner().context("writing csv")?).context("csv is UTF-8")?;
            let path = write_file(out, "mixup.csv", &text)?;
            eprintln!("wrote {} ({} mixed samples)", path.display(), mixed.len());
        }
    }
    finish(r, out, "augment")
}

fn train_strategy(r: &mut Resolver, a: &mut TrainArgs) -> Result<TrainStrategy, Failure> {
    let mode = r.get("strategy", a.strategy, TrainMode::Standard)?;
    Ok(match mode {
        TrainMode::Standard => TrainStrategy::Standard,
        TrainMode::Basic => TrainStrategy::Basic {
            methods: methods_setting(r, a.methods.take())?,
        },
        TrainMode::MixCode => {
            let pairing = r.get("pairing", a.pairing, Strategy::OriRef)?;
            let alpha = r.get("alpha", a.alpha, 0.1)?;
            let methods = methods_setting(r, a.methods.take())?;
            TrainStrategy::MixCode(MixPolicy::new(alpha, pairing, methods).map_err(usage)?)
        }
    })
}

fn cmd_train(r: &mut Resolver, out: &Path, mut a: TrainArgs) -> CmdResult {
    let train_path = require(input_path(r, "train", a.train.take())?, "train")?;
    let test_path = input_path(r, "test", a.test.take())?;
    let kind = r.get("model", a.model, ModelKind::BagFnn)?;
    let strategy = train_strategy(r, &mut a)?;
    let seed = r.get("seed", a.seed, 1)?;
    let hyper = hyper_settings(r, a.hyper)?;
    r.check_unused(&["command"])?;

    let train = read_data(&train_path)?;
    let test = test_path.as_deref().map(read_data).transpose()?;
    if train.len() < 2 {
        return Err(usage("training set needs at least two samples"));
    }
    let encoder = encoder_for(kind, &train, &hyper);
    let dims = Dims {
        input: encoder.vocab.size(),
        hidden: hyper.hidden,
        embed: hyper.embed,
    };
    let model = init(kind, dims, train.num_classes, seed).map_err(usage)?;
    let mut config = TrainConfig::new(kind, seed, strategy.clone());
    config.epochs = hyper.epochs;
    config.batch_size = hyper.batch_size;
    if let Some(lr) = hyper.learning_rate {
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
        .iter()
        .flat_map(|t| &t.samples)
        .map(|s| (encoder.encode(&s.program), s.label))
        .collect();
    let mut provider = strategy.provider(set).map_err(usage)?;
    let (model, trace) = fit(model, provider.as_mut(), &config, &heldout).context("training failed")?;

    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let ckpt = out.join("model.json");
    save_checkpoint(&ckpt, &model, &encoder).with_context(|| format!("writing {}", ckpt.display()))?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["epoch", "loss", "heldout_acc"])
        .context("writing csv")?;
    for (e, (loss, acc)) in trace.loss.iter().zip(&trace.heldout_accuracy).enumerate() {
        w.write_record([
            (e + 1).to_string(),
            loss.to_string(),
            acc.map_or(String::new(), |a| a.to_string()),
        ])
        .context("writing csv")?;
    }
    let text = String::from_utf8(w.into_inner().context("writing csv")?).context("csv is UTF-8")?;
    write_file(out, "trace.csv", &text)?;
    let last = trace.loss.last().copied().unwrap_or(f64::NAN);
    eprintln!("wrote {} (final loss {last:.4})", ckpt.display());
    finish(r, out, "train")
}

fn cmd_eval(r: &mut Resolver, out: &Path, a: EvalArgs) -> CmdResult {
    let ckpt = require(input_path(r, "checkpoint", a.checkpoint)?, "checkpoint")?;
    let test_path = require(input_path(r, "test", a.test)?, "test")?;
    let (model, encoder) = load_checkpoint(&ckpt).with_context(|| format!("reading {}", ckpt.display()))?;
    let test = read_data(&test_path)?;
    let k = r.get("k", a.k, default_k(test.task))?;
    let seed = r.get("seed", a.seed, model.seed)?;
    let methods = methods_setting(r, a.methods)?;
    r.check_unused(&["command"])?;
    if k == 0 {
        return Err(usage("k must be at least 1"));
    }
    if test.is_empty() {
        return Err(usage("test set is empty"));
    }
    if test.num_classes != model.num_classes {
        return Err(usage(format!(
            "test set has {} classes, model has {}",
            test.num_classes, model.num_classes
        )));
    }
    let acc = accuracy(&model, &test, &encoder).context("evaluation failed")?;
    let mut rng = rng_from_seed(derive_seed(seed, "robustness"));
    let rob = robustness_detail(&model, &test, &methods, k, &mut rng, &encoder).context("evaluation failed")?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["metric", "value"]).context("writing csv")?;
    w.write_record(["accuracy", &format!("{:.2}", percent(acc))])
        .context("writing csv")?;
    w.write_record(["robustness", &format!("{:.2}", percent(rob.robustness))])
        .context("writing csv")?;
    w.write_record(["variants", &rob.variants.to_string()])
        .context("writing csv")?;
    for (m, v) in rob.per_method_fractions() {
        w.write_record([format!("robustness:{m}"), format!("{:.2}", percent(v))])
            .context("writing csv")?;
    }
    let text = String::from_utf8(w.into_inner().context("writing csv")?).context("csv is UTF-8")?;
    print!("{text}");
    write_file(out, "eval.csv", &text)?;
    finish(r, out, "eval")
}

fn cmd_experiment(r: &mut Resolver, out: &Path, mut a: ExperimentArgs) -> CmdResult {
    let preset = r.get("preset", a.preset, Preset::Rq1)?;
    let train_path = input_path(r, "train", a.train.take())?;
    let test_path = input_path(r, "test", a.test.take())?;
    let (train, test, dataset) = match (train_path, test_path) {
        (Some(tr), Some(te)) => {
            let name = tr
                .parent()
                .and_then(Path::file_name)
                .or_else(|| tr.file_stem())
                .map_or("dataset".into(), |s| s.to_string_lossy().into_owned());
            (read_data(&tr)?, read_data(&te)?, name)
        }
        (None, None) => {
            let task = r.get("task", a.task, Task::Classification)?;
            let seed = r.get("data-seed", a.data_seed, 7)?;
            let spec = match task {
                Task::Classification => GeneratorSpec::classification(seed),
                Task::BugDetection => GeneratorSpec::bug_detection(seed),
            };
            let (train, test) = generate(task, &spec)?;
            (train, test, format!("synthetic-{task}-{seed}"))
        }
        _ => return Err(usage("give both `train` and `test`, or neither to generate a corpus")),
    };
    let options = GridOptions {
        dataset: dataset.clone(),
        models: r.get("models", a.models, List(ModelKind::ALL.to_vec()))?.0,
        seeds: r.get("seeds", a.seeds, List(vec![1, 2, 3, 4, 5]))?.0,
        k: r.get("k", a.k, default_k(test.task))?,
        alpha: r.get("alpha", a.alpha, 0.1)?,
        hyper: hyper_settings(r, a.hyper)?,
    };
    let jobs = r.get("jobs", a.jobs, 1)?;
    r.check_unused(&["command"])?;
    if jobs == 0 {
        return Err(usage("jobs must be at least 1"));
    }
    if train.num_classes != test.num_classes || train.task != test.task {
        return Err(usage("train and test sets disagree on task or class count"));
    }
    if !(options.alpha > 0.0 && options.alpha.is_finite()) {
        return Err(usage("alpha must be positive"));
    }
    let rows = run_preset(preset, &options, &train, &test, jobs).map_err(usage)?;
    write_file(out, "results.csv", &results_csv(&dataset, train.task, &rows))?;
    write_file(out, "traces.csv", &traces_csv(&rows))?;
    write_file(out, "per_method.csv", &per_method_csv(&rows))?;
    for row in &rows {
        match &row.report {
            Ok(e) => eprintln!(
                "{}: acc {:.2} ± {:.2}, rob {:.2} ± {:.2}",
                row.cell,
                percent(e.accuracy.mean),
                percent(e.accuracy.std),
                percent(e.robustness.mean),
                percent(e.robustness.std)
            ),
            Err(_) => eprintln!("{}: {}", row.cell, row.status()),
        }
    }
    eprintln!("wrote results.csv, traces.csv, per_method.csv to {}", out.display());
    finish(r, out, "experiment")
}

fn run(cli: Cli) -> CmdResult {
    let file = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            parse_kv(&text)?
        }
        None => Default::default(),
    };
    let name = match &cli.command {
        Command::Gen(_) => "gen",
        Command::Augment(_) => "augment",
        Command::Train(_) => "train",
        Command::Eval(_) => "eval",
        Command::Experiment(_) => "experiment",
    };
    if let Some(c) = file.get("command") {
        if c != name {
            return Err(usage(format!("config is for `{c}`, not `{name}`")));
        }
    }
    let mut r = Resolver::new(file);
    r.set("command", name);
    let out = cli.out.unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    match cli.command {
        Command::Gen(a) => cmd_gen(&mut r, &out, a),
        Command::Augment(a) => cmd_augment(&mut r, &out, a),
        Command::Train(a) => cmd_train(&mut r, &out, a),
        Command::Eval(a) => cmd_eval(&mut r, &out, a),
        Command::Experiment(a) => cmd_experiment(&mut r, &out, a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
