use super::*;
use crate::corpus::{generate_classification, Example, GeneratorSpec, Split, Task};
use crate::lang::parse_source;
use crate::model::Tensor;
use alloc::vec;

fn small_corpus() -> (Dataset, Dataset) {
    let spec = GeneratorSpec {
        num_problems: 3,
        programs_per_problem: 10,
        seed: 11,
        mutation_rate: 1.0,
    };
    generate_classification(&spec).unwrap()
}

/// bag-fnn whose output is the constant bias `b2`.
fn constant_model(input: usize, favoured: usize, classes: usize) -> Classifier {
    let dims = Dims {
        input,
        hidden: 2,
        embed: 1,
    };
    let mut b2 = Tensor::zeros(1, classes);
    b2.data[favoured] = 5.0;
    Classifier::from_parts(
        ModelKind::BagFnn,
        dims,
        classes,
        0,
        vec![
            Tensor::zeros(input, 2),
            Tensor::zeros(1, 2),
            Tensor::zeros(2, classes),
            b2,
        ],
    )
    .unwrap()
}

fn balanced_two_class() -> Dataset {
    let a = parse_source("def f(n):\n    return n\nprint(f(1))\n").unwrap();
    let b = parse_source("x = 1\nwhile x < 3:\n    x += 1\nprint(x)\n").unwrap();
    let samples = [(a.clone(), 0), (b.clone(), 1), (a, 0), (b, 1)]
        .into_iter()
        .map(|(program, label)| Example {
            program,
            label,
            probes: vec![vec![]],
        })
        .collect();
    Dataset {
        task: Task::Classification,
        num_classes: 2,
        split: Some(Split::Test),
        samples,
    }
}

fn tiny_spec() -> ExperimentSpec {
    let mut spec = ExperimentSpec::rq1("tiny", vec![ModelKind::BagFnn], vec![1, 2], 2);
    spec.hyper.epochs = 3;
    spec.hyper.hidden = 8;
    spec
}

#[test]
fn constant_predictor_scores_half_on_balanced_set() {
    let test = balanced_two_class();
    let encoder = encoder_for(ModelKind::BagFnn, &test, &Hyper::default());
    let model = constant_model(encoder.vocab.size(), 0, 2);
    assert_eq!(accuracy(&model, &test, &encoder).unwrap(), 0.5);
    let mut rng = rng_from_seed(3);
    let rob = robustness(&model, &test, &RefactoringMethod::ALL, 5, &mut rng, &encoder).unwrap();
    assert_eq!(rob, 0.5);
}

#[test]
fn empty_test_set_rejected() {
    let mut test = balanced_two_class();
    let encoder = encoder_for(ModelKind::BagFnn, &test, &Hyper::default());
    let model = constant_model(encoder.vocab.size(), 0, 2);
    test.samples.clear();
    assert_eq!(accuracy(&model, &test, &encoder), Err(EvalError::EmptyTestSet));
    let mut rng = rng_from_seed(0);
    assert_eq!(
        robustness(&model, &test, &RefactoringMethod::ALL, 1, &mut rng, &encoder),
        Err(EvalError::EmptyTestSet)
    );
    let test = balanced_two_class();
    assert_eq!(
        robustness(&model, &test, &RefactoringMethod::ALL, 0, &mut rng, &encoder),
        Err(EvalError::InvalidK)
    );
}

#[test]
fn identity_only_robustness_equals_accuracy() {
    let (train, test) = small_corpus();
    let spec = tiny_spec();
    let (model, _) = run_once(&cells(&spec)[0], 1, &train, &test, &spec).unwrap();
    let encoder = encoder_for(ModelKind::BagFnn, &train, &spec.hyper);
    let acc = accuracy(&model, &test, &encoder).unwrap();
    let mut rng = rng_from_seed(9);
    let detail = robustness_detail(&model, &test, &[], 3, &mut rng, &encoder).unwrap();
    assert_eq!(detail.robustness, acc);
    assert_eq!(detail.per_method.keys().collect::<Vec<_>>(), [IDENTITY]);
}

#[test]
fn transformed_set_is_k_times_test() {
    let (_, test) = generate_classification(&GeneratorSpec::classification(7)).unwrap();
    assert_eq!(test.len(), 96);
    let v = robustness_variants(&test, &RefactoringMethod::ALL, 5, &mut rng_from_seed(1)).unwrap();
    assert_eq!(v.len(), 480);
    assert!(v.iter().all(|(_, _, m)| m.is_some()));
}

#[test]
fn summaries_use_population_std() {
    let s = summarize(&[0.5, 0.7]);
    assert!((s.mean - 0.6).abs() < 1e-15 && (s.std - 0.1).abs() < 1e-15);
    assert_eq!(summarize(&[0.42]).std, 0.0);
    assert_eq!(percent(0.8), 80.0);
    assert_eq!(percent(0.123456), 12.35);
    // exact ties go to the even neighbour
    assert_eq!(libm::rint(1234.5), 1234.0);
    assert_eq!(libm::rint(1235.5), 1236.0);
}

#[test]
fn ranking_examples() {
    use RefactoringMethod::*;
    let (good, poor) = rank_methods(&[
        (PlusZero, 0.7),
        (Duplication, 0.9),
        (IfEnhancement, 0.6),
        (PrintAdding, 0.8),
    ]);
    assert_eq!(good, [Duplication, PrintAdding]);
    assert_eq!(poor, [PlusZero, IfEnhancement]);

    let equal: Vec<_> = [PrintAdding, ApiRenaming, PlusZero, Duplication]
        .map(|m| (m, 0.5))
        .to_vec();
    let (good, poor) = rank_methods(&equal);
    assert_eq!(good, [ApiRenaming, Duplication]);
    assert_eq!(poor, [PlusZero, PrintAdding]);

    let all: Vec<_> = RefactoringMethod::ALL
        .iter()
        .enumerate()
        .map(|(i, m)| (*m, i as f64))
        .collect();
    let (good, poor) = rank_methods(&all);
    assert_eq!((good.len(), poor.len()), (9, 8));
    assert_eq!(good[0], *RefactoringMethod::ALL.last().unwrap());
}

#[test]
fn grid_shapes() {
    let spec = ExperimentSpec::rq1("d", vec![ModelKind::BagFnn], vec![1, 2, 3, 4, 5], 5);
    let labels: Vec<String> = cells(&spec).iter().map(|c| c.strategy_label()).collect();
    assert_eq!(labels, ["standard", "basic", "mixcode/ori-ref"]);

    let mut alpha = spec.clone();
    alpha.strategies = vec![StrategyKind::MixCode];
    alpha.alphas = vec![0.05, 0.1, 0.2, 0.3, 0.4, 0.5];
    let c = cells(&alpha);
    assert_eq!(c.len(), 6);
    assert_eq!(c.iter().map(|c| c.alpha.unwrap()).collect::<Vec<_>>(), alpha.alphas);

    let both = ExperimentSpec::rq1("d", ModelKind::ALL.to_vec(), vec![1], 5);
    assert_eq!(cells(&both).len(), 6);
}

#[test]
fn invalid_specs_rejected() {
    let mut spec = tiny_spec();
    spec.seeds = vec![1, 1];
    assert!(spec.validate().is_err());
    spec.seeds = vec![];
    assert!(spec.validate().is_err());
    let mut spec = tiny_spec();
    spec.k = 0;
    assert_eq!(spec.validate(), Err(EvalError::InvalidK));
}

#[test]
fn experiment_rows_and_failed_cells() {
    let (train, test) = small_corpus();
    let mut spec = tiny_spec();
    spec.alphas = vec![0.1, -1.0];
    let rows = run_experiment(&spec, &train, &test).unwrap();
    assert_eq!(rows.len(), 4);
    for r in &rows[..3] {
        let report = r.report.as_ref().unwrap();
        assert_eq!(report.runs, 2);
        assert!(report.accuracy.std >= 0.0);
        assert!((0.0..=1.0).contains(&report.robustness.mean));
        assert_eq!(r.runs[0].trace.loss.len(), 3);
    }
    assert!(rows[3].status().starts_with("failed"));

    let again = run_experiment(&spec, &train, &test).unwrap();
    assert_eq!(rows, again);

    spec.seeds = vec![4];
    spec.alphas = vec![0.1];
    let single = run_experiment(&spec, &train, &test).unwrap();
    assert!(single.iter().all(|r| r.report.as_ref().unwrap().accuracy.std == 0.0));
}

#[test]
fn ablation_subsets_from_single_method_runs() {
    let (train, test) = small_corpus();
    let mut base = tiny_spec();
    base.seeds = vec![1];
    base.hyper.epochs = 1;
    let methods = [
        RefactoringMethod::PlusZero,
        RefactoringMethod::PrintAdding,
        RefactoringMethod::Duplication,
    ];
    let single = single_method_spec(&base, &methods);
    let rows = run_experiment(&single, &train, &test).unwrap();
    assert_eq!(rows.len(), 3);
    let (good, poor) = good_poor_subsets(&rows, ModelKind::BagFnn);
    assert_eq!(good.methods().len(), 2);
    assert_eq!(poor.methods().len(), 1);
    assert_eq!((good.name(), poor.name()), ("good".into(), "poor".into()));
}
