use asian_core::selftest::*;
use asian_core::yor_mc::McSettings;

#[test]
fn selftest_passes_with_verdicts() {
    let mc = McSettings {
        paths: 100_000,
        steps: 500,
        ..McSettings::default()
    };
    let r = run(11, &mc).unwrap();
    for s in &r.suites {
        assert!(s.passed(), "{s:?}");
    }
    let count = |name: &str| r.suites.iter().find(|s| s.name == name).unwrap().cases;
    assert!(count("hermite_recurrence") >= 100);
    assert_eq!(count("hermite_asymptotic_bound"), 50);
    assert_eq!(count("weber_quadrature"), 12);
    assert_eq!(count("transform_pairs"), 10);
    assert_eq!(count("e_b_dual_path"), 125);
    assert_eq!(r.verdicts.len(), 2);
    assert_eq!(r.verdicts[0].chosen, "minus");
    assert_eq!(r.verdicts[1].chosen, "reconciled");
    assert!(r.passed(), "{:?}", r.verdicts);
}

#[test]
fn failing_case_is_counted() {
    let s = transform_suite();
    assert_eq!(s.failed, 0);
    let r = SelftestReport {
        suites: vec![SuiteReport {
            failed: 1,
            ..s
        }],
        verdicts: vec![],
    };
    assert!(!r.passed());
}
