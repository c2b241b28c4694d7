use super::*;
use crate::lang::parse_source;
use crate::represent::{build_vocab, encode_label, EncoderKind};
use crate::seed::rng_from_seed;
use alloc::vec;
use proptest::prelude::{any, prop, prop_assert, proptest};

fn bag(values: &[f64]) -> Features {
    Features::Bag(FeatureVector {
        values: values.to_vec(),
    })
}

fn bag_values(f: &Features) -> &[f64] {
    match f {
        Features::Bag(v) => &v.values,
        Features::Seq(_) => panic!("expected bag"),
    }
}

fn moments(alpha: f64, n: usize, seed: u64) -> (f64, f64) {
    let mut rng = rng_from_seed(seed);
    let draws: Vec<f64> = (0..n).map(|_| sample_lambda(alpha, &mut rng).unwrap()).collect();
    let mean = draws.iter().sum::<f64>() / n as f64;
    let var = draws.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
    (mean, var)
}

#[test]
fn beta_moments_match_closed_form() {
    for alpha in [0.2, 0.5, 2.0, 5.0] {
        let (mean, var) = moments(alpha, 50_000, 17);
        let expected = 1.0 / (4.0 * (2.0 * alpha + 1.0));
        assert!((mean - 0.5).abs() < 0.01, "alpha {alpha}: mean {mean}");
        assert!((var - expected).abs() / expected < 0.05, "alpha {alpha}: var {var}");
    }
}

#[test]
fn nonpositive_alpha_rejected() {
    let mut rng = rng_from_seed(0);
    assert_eq!(sample_lambda(0.0, &mut rng), Err(MixupError::InvalidAlpha(0.0)));
    assert!(sample_lambda(-1.0, &mut rng).is_err());
    assert!(sample_lambda(f64::NAN, &mut rng).is_err());
}

#[test]
fn gamma_mean_is_shape() {
    let mut rng = rng_from_seed(4);
    let n = 40_000;
    let mean = (0..n).map(|_| sample_gamma(3.0, &mut rng)).sum::<f64>() / n as f64;
    assert!((mean - 3.0).abs() < 0.05, "{mean}");
}

#[test]
fn mixing_examples() {
    let m = mix_features(&bag(&[0.2, 0.8]), &bag(&[0.6, 0.4]), 0.5).unwrap();
    let v = bag_values(&m);
    assert!((v[0] - 0.4).abs() < 1e-15 && (v[1] - 0.6).abs() < 1e-15);
    let a = bag(&[0.3, 0.7]);
    assert_eq!(mix_features(&a, &bag(&[1.0, 0.0]), 1.0).unwrap(), a);
    let m = mix_features(&bag(&[1.0, 0.0]), &bag(&[0.0, 1.0]), 0.2).unwrap();
    assert_eq!(bag_values(&m), [0.2, 0.8]);
    assert_eq!(
        mix_features(&bag(&[1.0]), &bag(&[1.0, 0.0]), 0.5),
        Err(MixupError::ShapeMismatch)
    );
}

#[test]
fn label_mixing_examples() {
    let e0 = encode_label(0, 3).unwrap();
    let e1 = encode_label(1, 3).unwrap();
    assert_eq!(mix_labels(&e0, &e1, 0.2).unwrap().probs, [0.2, 0.8, 0.0]);
    assert_eq!(mix_labels(&e0, &e0, 0.37).unwrap(), e0);
    assert_eq!(mix_labels(&e0, &e1, 0.0).unwrap(), e1);
}

#[test]
fn one_hot_rows_mix_to_two_entries() {
    let a = SeqMatrix {
        len: 2,
        vocab: 3,
        rows: vec![vec![(0, 1.0)], vec![(2, 1.0)]],
    };
    let b = SeqMatrix {
        len: 2,
        vocab: 3,
        rows: vec![vec![(1, 1.0)], vec![(2, 1.0)]],
    };
    let m = mix_features(&Features::Seq(a), &Features::Seq(b), 0.2).unwrap();
    let Features::Seq(m) = m else { panic!() };
    assert_eq!(m.rows[0], [(0, 0.2), (1, 0.8)]);
    assert_eq!(m.rows[1], [(2, 1.0)]);
}

fn tiny_corpus() -> (Vec<Program>, Vec<usize>, Encoder) {
    let sources = [
        "def f(n):\n    total = 0\n    for i in range(n):\n        total += i\n    return total\nprint(f(3))\n",
        "def g(a, b):\n    return api.max(a, b)\nprint(g(1, 2))\n",
        "def h(n):\n    if True:\n        return n % 2\n    return 0\nprint(h(5))\n",
        "x = 4\nprint(x * 2)\n",
    ];
    let programs: Vec<Program> = sources.iter().map(|s| parse_source(s).unwrap()).collect();
    let labels = vec![0, 1, 2, 0];
    let vocab = build_vocab(&programs, 64);
    (
        programs,
        labels,
        Encoder {
            vocab,
            kind: EncoderKind::Bag,
        },
    )
}

#[test]
fn forced_unit_lambda_returns_shuffled_originals() {
    let (programs, labels, encoder) = tiny_corpus();
    let mut policy = MixPolicy::new(0.1, Strategy::OriRef, RefactoringMethod::ALL.to_vec()).unwrap();
    policy.fixed_lambda = Some(1.0);
    let out = build_epoch_dataset(
        &programs[..2],
        &labels[..2],
        3,
        &policy,
        &encoder,
        &mut rng_from_seed(2),
    )
    .unwrap();
    assert_eq!(out.len(), 2);
    for s in &out {
        assert_eq!(s.features, encoder.encode(&programs[s.pair.0]));
        assert_eq!(s.label, encode_label(labels[s.pair.0], 3).unwrap());
    }
}

#[test]
fn epoch_build_is_deterministic() {
    let (programs, labels, encoder) = tiny_corpus();
    let policy = MixPolicy::new(0.1, Strategy::OriRef, RefactoringMethod::ALL.to_vec()).unwrap();
    let a = build_epoch_dataset(&programs, &labels, 3, &policy, &encoder, &mut rng_from_seed(8)).unwrap();
    let b = build_epoch_dataset(&programs, &labels, 3, &policy, &encoder, &mut rng_from_seed(8)).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.len(), 4);
}

#[test]
fn every_strategy_yields_distributions() {
    let (programs, labels, encoder) = tiny_corpus();
    for strategy in Strategy::ALL {
        let policy = MixPolicy::new(0.4, strategy, RefactoringMethod::ALL.to_vec()).unwrap();
        let mut rng = rng_from_seed(21);
        for _ in 0..5 {
            let out = build_epoch_dataset(&programs, &labels, 3, &policy, &encoder, &mut rng).unwrap();
            assert_eq!(out.len(), programs.len());
            for s in &out {
                assert!((s.label.probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                assert!((0.0..=1.0).contains(&s.lambda_used));
                let sum: f64 = bag_values(&s.features).iter().sum();
                assert!((sum - 1.0).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn successive_epochs_differ() {
    let (programs, labels, encoder) = tiny_corpus();
    let programs: Vec<Program> = programs.iter().cycle().take(16).cloned().collect();
    let labels: Vec<usize> = labels.iter().cycle().take(16).copied().collect();
    let policy = MixPolicy::new(0.1, Strategy::OriRef, RefactoringMethod::ALL.to_vec()).unwrap();
    let mut rng = rng_from_seed(30);
    let a = build_epoch_dataset(&programs, &labels, 3, &policy, &encoder, &mut rng).unwrap();
    let b = build_epoch_dataset(&programs, &labels, 3, &policy, &encoder, &mut rng).unwrap();
    assert_ne!(a, b);
}

#[test]
fn degenerate_inputs_rejected() {
    let (programs, labels, encoder) = tiny_corpus();
    let policy = MixPolicy::new(0.1, Strategy::OriOri, vec![]).unwrap();
    let mut rng = rng_from_seed(0);
    assert_eq!(
        build_epoch_dataset(&programs[..1], &labels[..1], 3, &policy, &encoder, &mut rng),
        Err(MixupError::TooFewSamples(1))
    );
    assert!(build_epoch_dataset(&programs, &labels[..2], 3, &policy, &encoder, &mut rng).is_err());
    assert_eq!(
        MixPolicy::new(0.1, Strategy::RefRef, vec![]),
        Err(MixupError::NoMethods(Strategy::RefRef))
    );
    assert!(MixPolicy::new(0.0, Strategy::OriOri, vec![]).is_err());
}

#[test]
fn strategy_names_round_trip() {
    for s in Strategy::ALL {
        assert_eq!(s.name().parse::<Strategy>(), Ok(s));
    }
    assert!("ori+ref".parse::<Strategy>().is_err());
}

proptest! {
    #[test]
    fn mixing_is_symmetric_and_convex(
        pairs in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 1..16),
        lambda in 0.0f64..=1.0,
    ) {
        let a: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let b: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let ab = mix_features(&bag(&a), &bag(&b), lambda).unwrap();
        let ba = mix_features(&bag(&b), &bag(&a), 1.0 - lambda).unwrap();
        for (k, (x, y)) in bag_values(&ab).iter().zip(bag_values(&ba)).enumerate() {
            prop_assert!((x - y).abs() <= 1e-12);
            let (lo, hi) = (a[k].min(b[k]), a[k].max(b[k]));
            prop_assert!(*x >= lo - 1e-15 && *x <= hi + 1e-15);
        }
    }

    #[test]
    fn mixed_labels_sum_to_one(c1 in 0usize..5, c2 in 0usize..5, lambda in 0.0f64..=1.0) {
        let m = mix_labels(&encode_label(c1, 5).unwrap(), &encode_label(c2, 5).unwrap(), lambda).unwrap();
        prop_assert!((m.probs.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn lambda_in_unit_interval(alpha in 0.01f64..4.0, seed in any::<u64>()) {
        let l = sample_lambda(alpha, &mut rng_from_seed(seed)).unwrap();
        prop_assert!((0.0..=1.0).contains(&l));
    }
}
