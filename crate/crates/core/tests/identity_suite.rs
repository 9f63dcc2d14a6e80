use bubblecasimir::oracles::{run_all, DEFAULT_SEED};

#[test]
fn full_suite_passes_at_nominal_thresholds() {
    let reports = run_all(1.0, DEFAULT_SEED).unwrap();
    for r in &reports {
        println!("{r}");
    }
    assert!(reports.len() >= 10);
    assert!(reports.iter().all(|r| r.passed));
}

#[test]
fn tightened_thresholds_fail() {
    let reports = run_all(1e-30, DEFAULT_SEED).unwrap();
    assert!(reports.iter().any(|r| !r.passed));
    assert!(reports.iter().find(|r| r.name == "bessel/wronskian").is_some_and(|r| !r.passed));
}
