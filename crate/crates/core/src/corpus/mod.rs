//! Synthetic corpora for problem classification and bug detection.
//!
//! Each problem is a template that writes MiniPy programs in several
//! surface forms (loop or closed form, `for` or `while`, operator or
//! `api.*` call) with identifiers drawn from the synonym pools. Every
//! generated program is run on the template's probes and must print the
//! template's reference outputs.

mod mutate;
mod templates;


use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::lang::{interpret, parse_source, Outcome, Program, DEFAULT_STEP_LIMIT};
use crate::seed::{derive_seed, rng_from_seed, Rng};

pub use mutate::{mutate, mutation_sites, MutationKind};
use templates::{Template, TEMPLATES};

/// Attempts allowed to find a behaviour-changing mutation.
pub const MUTATION_RETRIES: usize = 20;
/// Number of problem templates available.
pub const MAX_PROBLEMS: usize = TEMPLATES.len();

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Task {
    Classification,
    BugDetection,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Classification => "classification",
            Task::BugDetection => "bug-detection",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> Result<Task, String> {
        match s {
            "classification" => Ok(Task::Classification),
            "bug-detection" => Ok(Task::BugDetection),
            _ => Err(alloc::format!("unknown task `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Split {
    Train,
    Test,
}

impl Split {
    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Split, String> {
        match s {
            "train" => Ok(Split::Train),
            "test" => Ok(Split::Test),
            _ => Err(alloc::format!("unknown split `{s}`")),
        }
    }
}

/// One labelled program and the inputs its behaviour is checked on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Example {
    pub program: Program,
    pub label: usize,
    /// Each probe is the sequence of integers returned by `input()`.
    pub probes: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub task: Task,
    pub num_classes: usize,
    pub split: Option<Split>,
    pub samples: Vec<Example>,
}

impl Dataset {
    pub fn programs(&self) -> Vec<Program> {
        self.samples.iter().map(|s| s.program.clone()).collect()
    }

    pub fn labels(&self) -> Vec<usize> {
        self.samples.iter().map(|s| s.label).collect()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Number of samples per class.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = alloc::vec![0; self.num_classes];
        for s in &self.samples {
            if let Some(c) = counts.get_mut(s.label) {
                *c += 1;
            }
        }
        counts
    }

    /// Check the type invariants: labels in range and probes present.
    pub fn validate(&self) -> Result<(), CorpusError> {
        for (i, s) in self.samples.iter().enumerate() {
            if s.label >= self.num_classes {
                return Err(CorpusError::InvalidSample {
                    index: i,
                    reason: "class index out of range",
                });
            }
            if s.probes.is_empty() {
                return Err(CorpusError::InvalidSample {
                    index: i,
                    reason: "no probe inputs",
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub num_problems: usize,
    pub programs_per_problem: usize,
    pub seed: u64,
    /// Bug detection: fraction of correct programs paired with a mutant.
    pub mutation_rate: f64,
}

impl GeneratorSpec {
    /// 8 problems with 60 programs each.
    pub fn classification(seed: u64) -> GeneratorSpec {
        GeneratorSpec {
            num_problems: 8,
            programs_per_problem: 60,
            seed,
            mutation_rate: 1.0,
        }
    }

    /// 400 correct/buggy pairs over 8 problems.
    pub fn bug_detection(seed: u64) -> GeneratorSpec {
        GeneratorSpec {
            num_problems: 8,
            programs_per_problem: 50,
            seed,
            mutation_rate: 1.0,
        }
    }

    pub fn validate(&self) -> Result<(), CorpusError> {
        if self.num_problems < 2 || self.num_problems > MAX_PROBLEMS {
            return Err(CorpusError::InvalidSpec("num_problems must be between 2 and 10"));
        }
        if self.programs_per_problem < 2 {
            return Err(CorpusError::InvalidSpec("programs_per_problem must be at least 2"));
        }
        if !(self.mutation_rate > 0.0 && self.mutation_rate <= 1.0) {
            return Err(CorpusError::InvalidSpec("mutation_rate must be in (0, 1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CorpusError {
    #[error("invalid generator spec: {0}")]
    InvalidSpec(&'static str),
    #[error("generation failed for problem `{problem}`: {reason}")]
    GenerationFailed { problem: &'static str, reason: String },
    #[error("sample {index}: {reason}")]
    InvalidSample { index: usize, reason: &'static str },
}

/// Name of the problem behind class `index`.
pub fn problem_name(index: usize) -> Option<&'static str> {
    TEMPLATES.get(index).map(|t| t.name())
}

/// Printed lines of `program` on each probe, or `None` if any run fails.
pub fn probe_outputs(program: &Program, probes: &[Vec<i64>]) -> Option<Vec<Vec<String>>> {
    probes
        .iter()
        .map(|probe| {
            let r = interpret(program, probe, DEFAULT_STEP_LIMIT);
            (r.outcome == Outcome::Ok).then_some(r.printed)
        })
        .collect()
}

fn instantiate(template: Template, rng: &mut Rng) -> Result<Program, CorpusError> {
    let source = template.source(rng);
    let program = parse_source(&source).map_err(|e| CorpusError::GenerationFailed {
        problem: template.name(),
        reason: alloc::format!("{e} in\n{source}"),
    })?;
    let probes = template.probes();
    let expected: Vec<Vec<String>> = probes.iter().map(|p| template.expected(p)).collect();
    if probe_outputs(&program, &probes).as_ref() != Some(&expected) {
        return Err(CorpusError::GenerationFailed {
            problem: template.name(),
            reason: alloc::format!("probe check failed for\n{source}"),
        });
    }
    Ok(program)
}

/// Number of the `n` members of one class that go to the training split.
fn train_share(n: usize) -> usize {
    (n * 4 / 5).clamp(1, n - 1)
}

/// Problem-classification corpus with an 80/20 split stratified by class.
pub fn generate_classification(spec: &GeneratorSpec) -> Result<(Dataset, Dataset), CorpusError> {
    spec.validate()?;
    let mut rng = rng_from_seed(derive_seed(spec.seed, "corpus/classification"));
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (class, template) in TEMPLATES.iter().take(spec.num_problems).enumerate() {
        let mut members = Vec::with_capacity(spec.programs_per_problem);
        for _ in 0..spec.programs_per_problem {
            members.push(Example {
                program: instantiate(*template, &mut rng)?,
                label: class,
                probes: template.probes(),
            });
        }
        let cut = train_share(members.len());
        test.extend(members.drain(cut..));
        train.extend(members);
    }
    train.shuffle(&mut rng);
    test.shuffle(&mut rng);
    Ok(split_pair(Task::Classification, spec.num_problems, train, test))
}

fn split_pair(task: Task, num_classes: usize, train: Vec<Example>, test: Vec<Example>) -> (Dataset, Dataset) {
    (
        Dataset {
            task,
            num_classes,
            split: Some(Split::Train),
            samples: train,
        },
        Dataset {
            task,
            num_classes,
            split: Some(Split::Test),
            samples: test,
        },
    )
}

/// A single mutation of `program` that changes at least one probe output and
/// still runs cleanly on every probe.
pub fn find_mutant(program: &Program, probes: &[Vec<i64>], rng: &mut Rng) -> Option<Program> {
    let reference = probe_outputs(program, probes)?;
    let kinds: Vec<MutationKind> = MutationKind::ALL
        .into_iter()
        .filter(|k| mutation_sites(program, *k) > 0)
        .collect();
    if kinds.is_empty() {
        return None;
    }
    for _ in 0..MUTATION_RETRIES {
        let kind = kinds[rng.random_range(0..kinds.len())];
        let Some(candidate) = mutate(program, kind, rng) else {
            continue;
        };
        if let Some(outputs) = probe_outputs(&candidate, probes) {
            if outputs != reference {
                return Some(candidate);
            }
        }
    }
    None
}

/// Bug-detection corpus: correct programs (label 0) each paired with a
/// single-mutation buggy variant (label 1). Pairs stay in the same split.
/// A program with no behaviour-changing mutation is replaced by a fresh
/// instance of its problem.
pub fn generate_bug_detection(spec: &GeneratorSpec) -> Result<(Dataset, Dataset), CorpusError> {
    spec.validate()?;
    let mut rng = rng_from_seed(derive_seed(spec.seed, "corpus/bug-detection"));
    let pairs_per_problem = (libm::round(spec.programs_per_problem as f64 * spec.mutation_rate) as usize).max(2);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for template in TEMPLATES.iter().take(spec.num_problems) {
        let probes = template.probes();
        let mut pairs = Vec::with_capacity(pairs_per_problem);
        for _ in 0..pairs_per_problem {
            let mut found = None;
            for _ in 0..MUTATION_RETRIES {
                let program = instantiate(*template, &mut rng)?;
                if let Some(mutant) = find_mutant(&program, &probes, &mut rng) {
                    found = Some((program, mutant));
                    break;
                }
            }
            let (program, mutant) = found.ok_or_else(|| CorpusError::GenerationFailed {
                problem: template.name(),
                reason: alloc::format!("no behaviour-changing mutation after {MUTATION_RETRIES} retries"),
            })?;
            pairs.push([
                Example {
                    program,
                    label: 0,
                    probes: probes.clone(),
                },
                Example {
                    program: mutant,
                    label: 1,
                    probes: probes.clone(),
                },
            ]);
        }
        let cut = train_share(pairs.len());
        test.extend(pairs.drain(cut..).flatten());
        train.extend(pairs.into_iter().flatten());
    }
    train.shuffle(&mut rng);
    test.shuffle(&mut rng);
    Ok(split_pair(Task::BugDetection, 2, train, test))
}
