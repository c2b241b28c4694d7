use super::*;
use crate::lang::{interpret, parse_source, program_tokens, render, TokenKind};
use crate::seed::rng_from_seed;
use alloc::string::String;
use alloc::vec::Vec;

const SAMPLE: &str = "\
def sum_to(n):
    total = 0
    for i in range(n):
        total += i
    if True:
        total = total + 0
    return total
def max_of(first, second):
    largest = api.max(first, second)
    return largest
number = input()
print(sum_to(number))
print(max_of(number, 3))
";

fn program(src: &str) -> Program {
    parse_source(src).unwrap()
}

fn observe(p: &Program, inputs: &[i64]) -> (Vec<String>, Option<crate::lang::Value>, bool) {
    let r = interpret(p, inputs, 1_000_000);
    let (printed, returned, ok) = r.observable();
    (printed.to_vec(), returned.cloned(), ok)
}

#[test]
fn plus_zero_applies_to_numeric_assignment() {
    let p = program("a = 1\n");
    assert!(applicable(RefactoringMethod::PlusZero, &p));
    let out = apply(RefactoringMethod::PlusZero, &p, &mut rng_from_seed(0)).unwrap();
    assert_eq!(render(&out.program), "a = 1 + 0\n");
}

#[test]
fn plus_zero_skips_string_assignment() {
    assert!(!applicable(RefactoringMethod::PlusZero, &program("a = \"x\"\n")));
}

#[test]
fn arguments_adding_needs_a_function() {
    let p = program("a = 1\n");
    assert!(!applicable(RefactoringMethod::ArgumentsAdding, &p));
    assert_eq!(
        apply(RefactoringMethod::ArgumentsAdding, &p, &mut rng_from_seed(0)),
        Err(RefactorError::NotApplicable(RefactoringMethod::ArgumentsAdding))
    );
}

#[test]
fn arguments_adding_appends_defaulted_parameter() {
    let p = program("def func(a, b):\n    return a + b\nprint(func(1, 2))\n");
    let out = apply(RefactoringMethod::ArgumentsAdding, &p, &mut rng_from_seed(3)).unwrap();
    let text = render(&out.program);
    assert!(text.starts_with("def func(a, b, c=0):\n"), "{text}");
    assert!(text.contains("print(func(1, 2))"));
    assert_eq!(observe(&p, &[]), observe(&out.program, &[]));
}

#[test]
fn for_loop_enhancement_adds_zero_start() {
    let p = program("for i in range(10):\n    print(i)\n");
    let out = apply(RefactoringMethod::ForLoopEnhancement, &p, &mut rng_from_seed(0)).unwrap();
    assert_eq!(render(&out.program), "for i in range(0, 10):\n    print(i)\n");
}

#[test]
fn duplication_repeats_assignment() {
    let p = program("a = 1\n");
    let out = apply(RefactoringMethod::Duplication, &p, &mut rng_from_seed(0)).unwrap();
    assert_eq!(render(&out.program), "a = 1\na = 1\n");
}

#[test]
fn duplication_skips_self_reference_and_calls() {
    let p = program("a = 1\na = a + 1\nb = input()\n");
    assert_eq!(
        sites::count(RefactoringMethod::Duplication, &p, &SynonymTable::shipped()),
        1
    );
}

#[test]
fn return_optimal_wraps_expression() {
    let p = program("def f(a):\n    return a\n");
    let out = apply(RefactoringMethod::ReturnOptimal, &p, &mut rng_from_seed(0)).unwrap();
    assert_eq!(render(&out.program), "def f(a):\n    return 0 if (1 == 0) else a\n");
}

#[test]
fn if_enhancement_requires_literal_true() {
    assert!(!applicable(
        RefactoringMethod::IfEnhancement,
        &program("if 1 == 1:\n    pass\n")
    ));
    let p = program("if True:\n    pass\n");
    let out = apply(RefactoringMethod::IfEnhancement, &p, &mut rng_from_seed(0)).unwrap();
    assert_eq!(render(&out.program), "if (0 == 0):\n    pass\n");
}

#[test]
fn field_enhancement_inserts_none_check() {
    let p = program("def f(a):\n    return a\n");
    let out = apply(RefactoringMethod::FieldEnhancement, &p, &mut rng_from_seed(0)).unwrap();
    assert_eq!(
        render(&out.program),
        "def f(a):\n    if a == None:\n        print(\"please check your input.\")\n    return a\n"
    );
}

#[test]
fn print_adding_lands_after_return() {
    let p = program("def f(a):\n    return a\nprint(f(2))\n");
    let out = apply(RefactoringMethod::PrintAdding, &p, &mut rng_from_seed(0)).unwrap();
    assert_eq!(
        render(&out.program),
        "def f(a):\n    return a\n    print(1)\nprint(f(2))\n"
    );
}

#[test]
fn dead_names_avoid_capture() {
    let p = program("__dead0 = 5\nprint(__dead0)\n");
    let out = apply(RefactoringMethod::LocalVariableAdding, &p, &mut rng_from_seed(1)).unwrap();
    assert!(render(&out.program).contains("__dead1 = 1"));
    assert_eq!(observe(&p, &[]), observe(&out.program, &[]));
}

#[test]
fn method_rename_updates_call_sites() {
    let p = program(SAMPLE);
    let out = apply(RefactoringMethod::MethodNameRenaming, &p, &mut rng_from_seed(5)).unwrap();
    let text = render(&out.program);
    let renamed = ["sum_to", "max_of"].iter().filter(|n| !text.contains(*n)).count();
    assert_eq!(renamed, 1, "{text}");
    assert_eq!(observe(&p, &[4]), observe(&out.program, &[4]));
}

#[test]
fn local_rename_does_not_touch_parameters() {
    let p = program("def f(n):\n    n = n + 1\n    return n\n");
    assert!(!applicable(RefactoringMethod::LocalVariableRenaming, &p));
    assert!(applicable(RefactoringMethod::ArgumentRenaming, &p));
}

#[test]
fn api_renaming_changes_only_api_names() {
    let p = program(SAMPLE);
    let out = apply(RefactoringMethod::ApiRenaming, &p, &mut rng_from_seed(0)).unwrap();
    let before = program_tokens(&p);
    let after = program_tokens(&out.program);
    assert_eq!(before.len(), after.len());
    let diffs: Vec<usize> = (0..before.len()).filter(|&i| before[i] != after[i]).collect();
    assert_eq!(diffs.len(), 1);
    let i = diffs[0];
    assert_eq!(after[i].kind, TokenKind::Identifier);
    assert_eq!(before[i - 2].lexeme, "api");
    assert_eq!(after[i].lexeme, "larger");
}

#[test]
fn random_refactor_edge_sets() {
    let p = program(SAMPLE);
    let mut rng = rng_from_seed(9);
    assert_eq!(
        random_refactor(&p, &[], &mut rng),
        Err(RefactorError::NoApplicableMethod)
    );
    let out = random_refactor(&p, &[RefactoringMethod::PrintAdding], &mut rng).unwrap();
    assert_eq!(out.method, RefactoringMethod::PrintAdding);
    let (same, method) = refactor_or_identity(&program("a = \"s\"\n"), &[RefactoringMethod::PlusZero], &mut rng);
    assert_eq!(method, None);
    assert_eq!(render(&same), "a = \"s\"\n");
}

#[test]
fn random_refactor_is_reproducible() {
    let p = program(SAMPLE);
    let a = random_refactor(&p, &RefactoringMethod::ALL, &mut rng_from_seed(11)).unwrap();
    let b = random_refactor(&p, &RefactoringMethod::ALL, &mut rng_from_seed(11)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn every_method_preserves_sample_semantics() {
    let p = program(SAMPLE);
    for method in RefactoringMethod::ALL {
        if !method.preserves_semantics() || !applicable(method, &p) {
            continue;
        }
        for seed in 0..20 {
            let out = apply(method, &p, &mut rng_from_seed(seed)).unwrap();
            let reparsed = parse_source(&render(&out.program)).unwrap();
            assert_eq!(reparsed, out.program, "{method}");
            for input in [-3, 0, 1, 7] {
                assert_eq!(
                    observe(&p, &[input]),
                    observe(&out.program, &[input]),
                    "{method} seed {seed}"
                );
            }
        }
    }
}

#[test]
fn method_names_round_trip() {
    for m in RefactoringMethod::ALL {
        assert_eq!(m.name().parse::<RefactoringMethod>(), Ok(m));
    }
    assert_eq!(
        "dead-switch-adding".parse::<RefactoringMethod>(),
        Err(MethodParseError::Unsupported)
    );
    assert!(matches!(
        "nope".parse::<RefactoringMethod>(),
        Err(MethodParseError::Unknown(_))
    ));
}
