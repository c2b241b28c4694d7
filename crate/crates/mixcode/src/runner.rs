//! Parallel experiment grids and the named presets.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use mixcode_core::corpus::Dataset;
use mixcode_core::eval::{
    cells, good_poor_subsets, run_once, single_method_spec, CellResult, EvalError, EvalReport, ExperimentSpec, Hyper,
    MethodSubset, StrategyKind,
};
use mixcode_core::mixup::Strategy;
use mixcode_core::model::ModelKind;
use mixcode_core::refactor::RefactoringMethod;

/// α values of the sensitivity sweep.
pub const ALPHA_GRID: [f64; 6] = [0.05, 0.1, 0.2, 0.3, 0.4, 0.5];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Standard, Basic and MixCode side by side.
    Rq1,
    /// MixCode with each of the three pairings.
    Rq2Strategy,
    /// MixCode Ori+Ref over [`ALPHA_GRID`].
    Rq2Alpha,
    /// Single-method MixCode runs, then the good, poor and full method sets.
    Rq3,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::Rq1, Preset::Rq2Strategy, Preset::Rq2Alpha, Preset::Rq3];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Rq1 => "rq1",
            Preset::Rq2Strategy => "rq2-strategy",
            Preset::Rq2Alpha => "rq2-alpha",
            Preset::Rq3 => "rq3",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Preset, String> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown preset `{s}` (expected rq1, rq2-strategy, rq2-alpha or rq3)"))
    }
}

/// Settings shared by every preset.
#[derive(Debug, Clone, PartialEq)]
pub struct GridOptions {
    pub dataset: String,
    pub models: Vec<ModelKind>,
    pub seeds: Vec<u64>,
    pub k: usize,
    /// α of MixCode cells outside the α sweep.
    pub alpha: f64,
    pub hyper: Hyper,
}

fn base_spec(o: &GridOptions) -> ExperimentSpec {
    let mut spec = ExperimentSpec::rq1(&o.dataset, o.models.clone(), o.seeds.clone(), o.k);
    spec.alphas = vec![o.alpha];
    spec.hyper = o.hyper.clone();
    spec
}

/// The single-stage spec of `preset`; `None` for the two-stage rq3.
pub fn preset_spec(preset: Preset, o: &GridOptions) -> Option<ExperimentSpec> {
    let base = base_spec(o);
    Some(match preset {
        Preset::Rq1 => base,
        Preset::Rq2Strategy => ExperimentSpec {
            strategies: vec![StrategyKind::MixCode],
            pairings: Strategy::ALL.to_vec(),
            ..base
        },
        Preset::Rq2Alpha => ExperimentSpec {
            strategies: vec![StrategyKind::MixCode],
            alphas: ALPHA_GRID.to_vec(),
            ..base
        },
        Preset::Rq3 => return None,
    })
}

/// Every cell of `spec` with (cell, seed) runs spread over `jobs` threads.
/// Rows and values do not depend on `jobs`.
pub fn run_grid(
    spec: &ExperimentSpec,
    train: &Dataset,
    test: &Dataset,
    jobs: usize,
) -> Result<Vec<CellResult>, EvalError> {
    spec.validate()?;
    if test.is_empty() {
        return Err(EvalError::EmptyTestSet);
    }
    let grid = cells(spec);
    let work: Vec<(usize, u64)> = (0..grid.len())
        .flat_map(|c| spec.seeds.iter().map(move |&s| (c, s)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("thread pool");
    let outcomes: Vec<Result<_, EvalError>> = pool.install(|| {
        work.par_iter()
            .map(|&(c, seed)| run_once(&grid[c], seed, train, test, spec).map(|(_, r)| r))
            .collect()
    });
    let mut outcomes = outcomes.into_iter();
    let mut rows = Vec::with_capacity(grid.len());
    for cell in grid {
        let mut runs = Vec::new();
        let mut failure = None;
        for &seed in &spec.seeds {
            match outcomes.next().expect("one outcome per job") {
                Ok(r) if failure.is_none() => runs.push(r),
                Ok(_) => {}
                Err(e) => {
                    failure.get_or_insert(format!("seed {seed}: {e}"));
                }
            }
        }
        let report = match failure {
            None => Ok(EvalReport::from_runs(&runs)),
            Some(e) => Err(e),
        };
        rows.push(CellResult { cell, runs, report });
    }
    Ok(rows)
}

/// Rows of `preset` in table order.
pub fn run_preset(
    preset: Preset,
    o: &GridOptions,
    train: &Dataset,
    test: &Dataset,
    jobs: usize,
) -> Result<Vec<CellResult>, EvalError> {
    if let Some(spec) = preset_spec(preset, o) {
        return run_grid(&spec, train, test, jobs);
    }
    let base = ExperimentSpec {
        strategies: vec![StrategyKind::MixCode],
        ..base_spec(o)
    };
    let mut rows = run_grid(&single_method_spec(&base, &RefactoringMethod::ALL), train, test, jobs)?;
    for &model in &o.models {
        let (good, poor) = good_poor_subsets(&rows, model);
        let spec = ExperimentSpec {
            models: vec![model],
            subsets: vec![good, poor, MethodSubset::All],
            ..base.clone()
        };
        rows.extend(run_grid(&spec, train, test, jobs)?);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use mixcode_core::corpus::{generate_classification, GeneratorSpec};
    use mixcode_core::eval::run_experiment;

    fn options() -> GridOptions {
        GridOptions {
            dataset: "tiny".into(),
            models: vec![ModelKind::BagFnn],
            seeds: vec![1, 2],
            k: 2,
            alpha: 0.1,
            hyper: Hyper {
                epochs: 2,
                ..Hyper::default()
            },
        }
    }

    fn data() -> (Dataset, Dataset) {
        generate_classification(&GeneratorSpec {
            num_problems: 3,
            programs_per_problem: 6,
            seed: 4,
            mutation_rate: 1.0,
        })
        .unwrap()
    }

    #[test]
    fn preset_names_round_trip() {
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
        assert!("rq4".parse::<Preset>().is_err());
    }

    #[test]
    fn preset_shapes() {
        let o = options();
        assert_eq!(cells(&preset_spec(Preset::Rq1, &o).unwrap()).len(), 3);
        assert_eq!(cells(&preset_spec(Preset::Rq2Strategy, &o).unwrap()).len(), 3);
        let alpha = cells(&preset_spec(Preset::Rq2Alpha, &o).unwrap());
        assert_eq!(alpha.iter().map(|c| c.alpha.unwrap()).collect::<Vec<_>>(), ALPHA_GRID);
        assert!(preset_spec(Preset::Rq3, &o).is_none());
    }

    #[test]
    fn parallel_grid_matches_sequential() {
        let (train, test) = data();
        let spec = preset_spec(Preset::Rq1, &options()).unwrap();
        let sequential = run_experiment(&spec, &train, &test).unwrap();
        assert_eq!(run_grid(&spec, &train, &test, 1).unwrap(), sequential);
        assert_eq!(run_grid(&spec, &train, &test, 3).unwrap(), sequential);
    }

    #[test]
    fn rq3_adds_good_poor_all() {
        let (train, test) = data();
        let o = GridOptions {
            seeds: vec![1],
            ..options()
        };
        let rows = run_preset(Preset::Rq3, &o, &train, &test, 2).unwrap();
        assert_eq!(rows.len(), 17 + 3);
        let tail: Vec<_> = rows[17..].iter().map(|r| r.cell.subset.clone().unwrap()).collect();
        assert_eq!(tail, ["good", "poor", "all"]);
    }
}
