//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Run with `cargo test -p mixcode --test acceptance`. The process fails if
//! any criterion fails, except those listed in [`KNOWN_FAILURES`], which are
//! still reported as FAIL.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use mixcode::checkpoint::{from_json, load_checkpoint, save_checkpoint, to_json};
use mixcode::dataset_file::{load_dataset, read_dataset, save_dataset, write_dataset};
use mixcode::results::results_csv;
use mixcode::runner::{run_grid, ALPHA_GRID};
use mixcode_core::corpus::{generate_bug_detection, generate_classification, Dataset, GeneratorSpec, Task};
use mixcode_core::eval::{encoder_for, ExperimentSpec, Hyper, StrategyKind, K_CLASSIFICATION};
use mixcode_core::lang::{interpret, parse_source, render, tokenize, ExecResult, DEFAULT_STEP_LIMIT};
use mixcode_core::mixup::{mix_features, mix_labels, sample_lambda, MixPolicy, Strategy};
use mixcode_core::model::{
    batch_loss, fit, gradients, init, Classifier, DatasetProvider, Dims, ModelError, ModelKind, Sample, TrainConfig,
    TrainStrategy, TrainingSet,
};
use mixcode_core::refactor::{apply, refactor_or_identity, RefactoringMethod};
use mixcode_core::represent::{encode_label, Encoder, FeatureVector, Features, LabelVector, SeqMatrix};
use mixcode_core::{rng_from_seed, Rng};
use rand::seq::SliceRandom;
use rand::Rng as _;

/// Criteria that do not hold at this scale. Measured outcomes are in the README.
const KNOWN_FAILURES: &[u32] = &[6];

type Criterion = (u32, &'static str, fn() -> Verdict);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn seed7() -> (Dataset, Dataset) {
    generate_classification(&GeneratorSpec::classification(7)).expect("seed-7 corpus")
}

fn observable(r: &ExecResult) -> (Vec<String>, Option<String>, bool) {
    let (printed, returned, ok) = r.observable();
    (printed.to_vec(), returned.map(|v| format!("{v:?}")), ok)
}

fn semantic_preservation() -> Verdict {
    let start = Instant::now();
    let (train, test) = seed7();
    let samples: Vec<_> = train.samples.iter().chain(&test.samples).collect();
    let mut rng = rng_from_seed(1);
    let (mut checks, mut applied, mut failures) = (0usize, 0usize, Vec::new());
    for method in RefactoringMethod::ALL
        .into_iter()
        .filter(|m| *m != RefactoringMethod::ApiRenaming)
    {
        for (i, s) in samples.iter().enumerate() {
            let Ok(out) = apply(method, &s.program, &mut rng) else {
                continue;
            };
            applied += 1;
            for probe in &s.probes {
                checks += 1;
                let before = interpret(&s.program, probe, DEFAULT_STEP_LIMIT);
                let after = interpret(&out.program, probe, DEFAULT_STEP_LIMIT);
                if observable(&before) != observable(&after) || !observable(&before).2 {
                    failures.push(format!("{method} on program {i}"));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    verdict(
        failures.is_empty() && samples.len() == 480 && elapsed < Duration::from_secs(60),
        format!(
            "{} programs, {applied} refactorings, {checks} probe runs, {} mismatches, {:.1}s{}",
            samples.len(),
            failures.len(),
            elapsed.as_secs_f64(),
            failures.first().map_or(String::new(), |f| format!("; first: {f}"))
        ),
    )
}

fn bag_of(v: Vec<f64>) -> Features {
    Features::Bag(FeatureVector { values: v })
}

fn values(f: &Features) -> &[f64] {
    match f {
        Features::Bag(b) => &b.values,
        Features::Seq(_) => unreachable!("bag features only"),
    }
}

fn mixup_algebra() -> Verdict {
    let mut rng = rng_from_seed(2);
    let mut bad = 0usize;
    for _ in 0..10_000 {
        let n = rng.random_range(1..24);
        let classes = rng.random_range(2..8);
        let a: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
        let ya = encode_label(rng.random_range(0..classes), classes).unwrap();
        let yb = encode_label(rng.random_range(0..classes), classes).unwrap();
        let lambda: f64 = rng.random_range(0.0..=1.0);
        let ab = mix_features(&bag_of(a.clone()), &bag_of(b.clone()), lambda).unwrap();
        let ba = mix_features(&bag_of(b.clone()), &bag_of(a.clone()), 1.0 - lambda).unwrap();
        let yab = mix_labels(&ya, &yb, lambda).unwrap();
        let yba = mix_labels(&yb, &ya, 1.0 - lambda).unwrap();
        let mut ok = true;
        for k in 0..n {
            let x = values(&ab)[k];
            // lambda*a + (1-lambda)*b computed independently
            let expected = lambda * a[k] + (1.0 - lambda) * b[k];
            ok &= (x - values(&ba)[k]).abs() <= 1e-12 && (x - expected).abs() <= 1e-12;
            ok &= x >= a[k].min(b[k]) - 1e-15 && x <= a[k].max(b[k]) + 1e-15;
        }
        ok &= yab.probs.iter().zip(&yba.probs).all(|(p, q)| (p - q).abs() <= 1e-12);
        ok &= (yab.probs.iter().sum::<f64>() - 1.0).abs() <= 1e-12;
        let one = mix_features(&bag_of(a.clone()), &bag_of(b.clone()), 1.0).unwrap();
        let zero = mix_features(&bag_of(a.clone()), &bag_of(b.clone()), 0.0).unwrap();
        ok &= values(&one) == a.as_slice() && values(&zero) == b.as_slice();
        ok &= mix_labels(&ya, &yb, 1.0).unwrap() == ya && mix_labels(&ya, &yb, 0.0).unwrap() == yb;
        bad += usize::from(!ok);
    }
    verdict(bad == 0, format!("10000 triples, {bad} violations"))
}

fn beta_sampler() -> Verdict {
    let start = Instant::now();
    let mut lines = Vec::new();
    let mut pass = true;
    for alpha in [0.05, 0.1, 0.2, 0.5] {
        let mut rng = rng_from_seed(3);
        let draws: Vec<f64> = (0..100_000).map(|_| sample_lambda(alpha, &mut rng).unwrap()).collect();
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        let var = draws.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / draws.len() as f64;
        let oracle = 1.0 / (4.0 * (2.0 * alpha + 1.0));
        let ok = (mean - 0.5).abs() <= 0.01 && ((var - oracle) / oracle).abs() <= 0.05;
        pass &= ok;
        lines.push(format!("a={alpha}: mean {mean:.4}, var {var:.4} vs {oracle:.4}"));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(5);
    verdict(pass, format!("{}; {:.2}s", lines.join(", "), elapsed.as_secs_f64()))
}

fn random_features(kind: ModelKind, input: usize, rng: &mut Rng) -> Features {
    let weights: Vec<f64> = (0..input).map(|_| rng.random_range(0.0..1.0)).collect();
    let total: f64 = weights.iter().sum();
    match kind {
        ModelKind::BagFnn => bag_of(weights.iter().map(|w| w / total).collect()),
        ModelKind::SeqMean => {
            let len = rng.random_range(2..6);
            let rows = (0..len)
                .map(|_| {
                    let a = rng.random_range(0..input) as u32;
                    let b = (a + 1) % input as u32;
                    let l: f64 = rng.random_range(0.0..1.0);
                    vec![(a, l), (b, 1.0 - l)]
                })
                .collect();
            Features::Seq(SeqMatrix {
                len,
                vocab: input,
                rows,
            })
        }
    }
}

fn gradient_checks() -> Verdict {
    let mut rng = rng_from_seed(4);
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    let mut checked = 0usize;
    for kind in ModelKind::ALL {
        for instance in 0..10 {
            let dims = Dims {
                input: 6,
                hidden: 5,
                embed: 4,
            };
            let mut model = init(kind, dims, 3, instance).unwrap();
            for t in model.params.iter_mut() {
                for w in t.data.iter_mut() {
                    *w += rng.random_range(-0.5..0.5);
                }
            }
            let batch: Vec<Sample> = (0..3)
                .map(|_| {
                    let mut p: Vec<f64> = (0..3).map(|_| rng.random_range(0.0..1.0)).collect();
                    let s: f64 = p.iter().sum();
                    p.iter_mut().for_each(|x| *x /= s);
                    Sample {
                        features: random_features(kind, dims.input, &mut rng),
                        label: LabelVector { probs: p },
                    }
                })
                .collect();
            let (_, analytic) = gradients(&model, &batch).unwrap();
            for (t, g) in analytic.iter().enumerate() {
                for k in 0..g.data.len() {
                    let mut up = model.clone();
                    up.params[t].data[k] += h;
                    let mut down = model.clone();
                    down.params[t].data[k] -= h;
                    let numeric = (batch_loss(&up, &batch).unwrap() - batch_loss(&down, &batch).unwrap()) / (2.0 * h);
                    let err = (g.data[k] - numeric).abs() / g.data[k].abs().max(numeric.abs()).max(1e-8);
                    worst = worst.max(err);
                    checked += 1;
                }
            }
        }
    }
    verdict(
        worst <= 1e-4,
        format!("{checked} parameters over 20 models, worst relative error {worst:.2e}"),
    )
}

/// The original samples in an order drawn the way a MixCode epoch draws it.
struct ShuffledOriginals<'a> {
    programs: &'a [mixcode_core::lang::Program],
    labels: &'a [usize],
    num_classes: usize,
    encoder: &'a Encoder,
    pairing: Strategy,
    methods: Vec<RefactoringMethod>,
}

impl DatasetProvider for ShuffledOriginals<'_> {
    fn epoch_samples(&mut self, rng: &mut Rng) -> Result<Vec<Sample>, ModelError> {
        if self.pairing != Strategy::OriOri {
            for p in self.programs {
                refactor_or_identity(p, &self.methods, rng);
            }
        }
        let mut order: Vec<usize> = (0..self.programs.len()).collect();
        order.shuffle(rng);
        order
            .into_iter()
            .map(|i| {
                Ok(Sample {
                    features: self.encoder.encode(&self.programs[i]),
                    label: encode_label(self.labels[i], self.num_classes)?,
                })
            })
            .collect()
    }
}

fn collapse() -> Verdict {
    let (train, _) = generate_classification(&GeneratorSpec {
        num_problems: 4,
        programs_per_problem: 20,
        seed: 5,
        mutation_rate: 1.0,
    })
    .unwrap();
    let programs = train.programs();
    let labels = train.labels();
    let mut lines = Vec::new();
    let mut pass = true;
    for kind in ModelKind::ALL {
        for pairing in [Strategy::OriOri, Strategy::OriRef] {
            let hyper = Hyper::default();
            let encoder = encoder_for(kind, &train, &hyper);
            let model = init(kind, Dims::new(encoder.vocab.size()), train.num_classes, 9).unwrap();
            let policy = MixPolicy {
                fixed_lambda: Some(1.0),
                ..MixPolicy::new(0.1, pairing, RefactoringMethod::ALL.to_vec()).unwrap()
            };
            let strategy = TrainStrategy::MixCode(policy);
            let mut config = TrainConfig::new(kind, 9, strategy.clone());
            config.epochs = 10;
            config.batch_size = 8;
            let set = TrainingSet {
                programs: &programs,
                labels: &labels,
                num_classes: train.num_classes,
                encoder: &encoder,
            };
            let mut mixcode = strategy.provider(set).unwrap();
            let (mixed, _) = fit(model.clone(), mixcode.as_mut(), &config, &[]).unwrap();
            let mut reference = ShuffledOriginals {
                programs: &programs,
                labels: &labels,
                num_classes: train.num_classes,
                encoder: &encoder,
                pairing,
                methods: RefactoringMethod::ALL.to_vec(),
            };
            let (standard, _) = fit(model.clone(), &mut reference, &config, &[]).unwrap();
            let same = mixed == standard && bits(&mixed) == bits(&standard) && mixed != model;
            pass &= same;
            lines.push(format!(
                "{kind} {pairing}: {}",
                if same { "bit-exact" } else { "differs" }
            ));
        }
    }
    verdict(pass, lines.join(", "))
}

fn bits(m: &Classifier) -> Vec<u64> {
    m.params
        .iter()
        .flat_map(|t| t.data.iter().map(|w| w.to_bits()))
        .collect()
}

fn rq1_reproduction() -> Verdict {
    let start = Instant::now();
    let mut held = 0;
    let mut lines = Vec::new();
    for rep in 0..5u64 {
        let (train, test) = generate_classification(&GeneratorSpec::classification(100 + rep)).unwrap();
        let seeds: Vec<u64> = (1..=5).map(|s| rep * 10 + s).collect();
        let spec = ExperimentSpec::rq1("rq1", vec![ModelKind::BagFnn], seeds, K_CLASSIFICATION);
        let rows = run_grid(&spec, &train, &test, 1).unwrap();
        let stat = |i: usize| {
            let r = rows[i].report.as_ref().expect("rq1 cell ran");
            (r.accuracy.mean, r.robustness.mean)
        };
        let (std, basic, mix) = (stat(0), stat(1), stat(2));
        let ok = mix.1 >= basic.1 && mix.1 >= std.1 && mix.0 >= std.0;
        held += usize::from(ok);
        lines.push(format!(
            "rep {rep} {}: acc S {:.3} B {:.3} M {:.3}, rob S {:.3} B {:.3} M {:.3}",
            if ok { "holds" } else { "fails" },
            std.0,
            basic.0,
            mix.0,
            std.1,
            basic.1,
            mix.1
        ));
    }
    let elapsed = start.elapsed();
    verdict(
        held >= 4 && elapsed < Duration::from_secs(600),
        format!(
            "ordering holds on {held}/5 replications, {:.0}s\n    {}",
            elapsed.as_secs_f64(),
            lines.join("\n    ")
        ),
    )
}

fn rq2_grid() -> Verdict {
    let (train, test) = seed7();
    let mut spec = ExperimentSpec::rq1("seed7", ModelKind::ALL.to_vec(), vec![1, 2, 3], K_CLASSIFICATION);
    spec.strategies = vec![StrategyKind::MixCode];
    spec.pairings = Strategy::ALL.to_vec();
    spec.alphas = ALPHA_GRID.to_vec();
    let rows = run_grid(&spec, &train, &test, 1).unwrap();
    let csv = results_csv(&spec.dataset, Task::Classification, &rows);
    let complete = rows.len() == 2 * 3 * ALPHA_GRID.len() && csv.lines().count() == rows.len() + 1;
    let pairings_seen = Strategy::ALL.iter().all(|p| csv.contains(&format!("mixcode/{p}")));
    let failed_small: Vec<String> = rows
        .iter()
        .filter(|r| r.report.is_err() && r.cell.alpha.is_some_and(|a| a <= 0.2))
        .map(|r| r.cell.to_string())
        .collect();
    let chance = 1.0 / train.num_classes as f64;
    let degenerate: Vec<String> = rows
        .iter()
        .filter(|r| r.report.as_ref().map_or(true, |e| e.accuracy.mean <= chance + 0.05))
        .map(|r| format!("{} ({})", r.cell, r.status()))
        .collect();
    let best = rows
        .iter()
        .filter_map(|r| r.report.as_ref().ok().map(|e| (e.accuracy.mean, r.cell.to_string())))
        .fold((0.0, String::new()), |a, b| if b.0 > a.0 { b } else { a });
    verdict(
        complete && pairings_seen && failed_small.is_empty(),
        format!(
            "{} cells, {} failed at alpha <= 0.2, degenerate cells: {}; best {} at {:.3}",
            rows.len(),
            failed_small.len(),
            if degenerate.is_empty() {
                "none".into()
            } else {
                degenerate.join(", ")
            },
            best.1,
            best.0
        ),
    )
}

fn cli(out: &Path, args: &[&str]) -> Result<(), String> {
    let o = Command::new(env!("CARGO_BIN_EXE_mixcode"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .map_err(|e| e.to_string())?;
    if o.status.success() {
        Ok(())
    } else {
        Err(format!("{args:?}: {}", String::from_utf8_lossy(&o.stderr)))
    }
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file())
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&p).unwrap(),
            )
        })
        .collect();
    out.sort();
    out
}

fn determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let s = |p: &Path| p.display().to_string();
    let first = || -> Result<(), String> {
        cli(&a.join("data"), &["gen", "--seed", "7"])?;
        let (train, test) = (s(&a.join("data/train.mpyds")), s(&a.join("data/test.mpyds")));
        cli(
            &a.join("train"),
            &[
                "train",
                "--train",
                &train,
                "--test",
                &test,
                "--strategy",
                "mixcode",
                "--alpha",
                "0.1",
            ],
        )?;
        cli(
            &a.join("eval"),
            &["eval", "--checkpoint", &s(&a.join("train/model.json")), "--test", &test],
        )?;
        cli(
            &a.join("exp"),
            &[
                "experiment",
                "--preset",
                "rq1",
                "--seeds",
                "1,2",
                "--epochs",
                "10",
                "--jobs",
                "2",
            ],
        )?;
        for step in ["data/gen", "train/train", "eval/eval", "exp/experiment"] {
            let (dir, cmd) = step.split_once('/').unwrap();
            let manifest = s(&a.join(dir).join(format!("{cmd}.manifest")));
            cli(&b.join(dir), &[cmd, "--config", &manifest])?;
        }
        Ok(())
    };
    if let Err(e) = first() {
        return verdict(false, e);
    }
    let mut compared = 0;
    let mut differing = Vec::new();
    for sub in ["data", "train", "eval", "exp"] {
        let (fa, fb) = (files(&a.join(sub)), files(&b.join(sub)));
        if fa.len() != fb.len() {
            differing.push(format!("{sub}: file sets differ"));
        }
        for ((na, da), (nb, db)) in fa.iter().zip(&fb) {
            compared += 1;
            if na != nb || da != db {
                differing.push(format!("{sub}/{na}"));
            }
        }
    }
    verdict(
        differing.is_empty(),
        format!("{compared} files compared across two runs, differing: {differing:?}"),
    )
}

fn round_trips() -> Verdict {
    let (train, test) = seed7();
    let mut parse_failures = 0;
    for s in train.samples.iter().chain(&test.samples) {
        let text = render(&s.program);
        let back = tokenize(&text).ok().and_then(|t| mixcode_core::lang::parse(&t).ok());
        parse_failures += usize::from(back.as_ref() != Some(&s.program));
        parse_failures += usize::from(parse_source(&text).ok().as_ref() != Some(&s.program));
    }
    let dir = tempfile::tempdir().unwrap();
    let (bug_train, bug_test) = generate_bug_detection(&GeneratorSpec::bug_detection(7)).unwrap();
    let mut dataset_failures = 0;
    for (i, d) in [&train, &test, &bug_train, &bug_test].into_iter().enumerate() {
        let path = dir.path().join(format!("{i}.mpyds"));
        save_dataset(&path, d).unwrap();
        dataset_failures += usize::from(load_dataset(&path).ok().as_ref() != Some(d));
        dataset_failures += usize::from(read_dataset(&write_dataset(d)).ok().as_ref() != Some(d));
    }
    let mut checkpoint_failures = 0;
    for kind in ModelKind::ALL {
        let hyper = Hyper {
            epochs: 2,
            ..Hyper::default()
        };
        let encoder = encoder_for(kind, &train, &hyper);
        let model = init(kind, Dims::new(encoder.vocab.size()), train.num_classes, 3).unwrap();
        let programs = train.programs();
        let labels = train.labels();
        let set = TrainingSet {
            programs: &programs,
            labels: &labels,
            num_classes: train.num_classes,
            encoder: &encoder,
        };
        let mut config = TrainConfig::new(kind, 3, TrainStrategy::Standard);
        config.epochs = 2;
        let (model, _) = fit(
            model,
            TrainStrategy::Standard.provider(set).unwrap().as_mut(),
            &config,
            &[],
        )
        .unwrap();
        let path = dir.path().join(format!("{kind}.json"));
        save_checkpoint(&path, &model, &encoder).unwrap();
        let loaded = load_checkpoint(&path).unwrap();
        checkpoint_failures += usize::from(loaded != (model.clone(), encoder.clone()));
        checkpoint_failures += usize::from(bits(&loaded.0) != bits(&model));
        checkpoint_failures += usize::from(from_json(&to_json(&model, &encoder)).unwrap().0 != model);
    }
    let total = train.len() + test.len();
    verdict(
        parse_failures + dataset_failures + checkpoint_failures == 0,
        format!(
            "{total} programs: {parse_failures} parse failures; {} datasets: {dataset_failures} failures; 2 checkpoints: {checkpoint_failures} failures",
            4
        ),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        (1, "semantic preservation", semantic_preservation),
        (2, "mixup algebra", mixup_algebra),
        (3, "beta sampler moments", beta_sampler),
        (4, "gradient checks", gradient_checks),
        (5, "lambda=1 collapse", collapse),
        (6, "directional rq1 ordering", rq1_reproduction),
        (7, "rq2 strategy and alpha grid", rq2_grid),
        (8, "determinism from manifests", determinism),
        (9, "round trips", round_trips),
    ];
    let filter: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut unexpected = Vec::new();
    for (id, name, check) in criteria {
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let v = std::panic::catch_unwind(check).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            verdict(false, format!("panicked: {msg}"))
        });
        let status = if v.pass { "PASS" } else { "FAIL" };
        let note = if !v.pass && KNOWN_FAILURES.contains(&id) {
            " (known)"
        } else {
            ""
        };
        println!(
            "criterion {id} {name}: {status}{note} [{:.1}s] {}",
            start.elapsed().as_secs_f64(),
            v.detail
        );
        if !v.pass && !KNOWN_FAILURES.contains(&id) {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        println!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
