use probgames::laws::{run_law_suite, run_law_suite_with, Composer, GenConfig, LAWS};

fn cfg(seed: u64, cases: usize) -> GenConfig {
    GenConfig {
        seed,
        cases,
        ..GenConfig::default()
    }
}

#[test]
fn seed_seven_is_clean() {
    let report = run_law_suite(&cfg(7, 100));
    assert_eq!(report.laws.len(), LAWS.len());
    for law in &report.laws {
        assert!(law.failures.is_empty(), "{}: {:?}", law.law, law.failures.first());
        assert_eq!(law.cases, 100);
        assert!(law.comparisons >= 100, "{} ran only {} comparisons", law.law, law.comparisons);
    }
    assert!(report.seq_skip_ratio() < 0.2);
    assert!(report.non_unit_witness.holds());
}

#[test]
fn reports_are_reproducible() {
    assert_eq!(run_law_suite(&cfg(42, 8)), run_law_suite(&cfg(42, 8)));
    assert_ne!(run_law_suite(&cfg(42, 8)), run_law_suite(&cfg(43, 8)));
}

#[test]
fn broken_tensor_fails_associativity() {
    let report = run_law_suite_with(&cfg(7, 30), Composer::Faulty);
    let assoc = report.law("par-assoc").unwrap();
    assert!(!assoc.failures.is_empty());
    // laws that never build a parallel game are unaffected
    assert!(report.law("monad").unwrap().failures.is_empty());
    assert!(report.law("seq-assoc").unwrap().failures.is_empty());
}
