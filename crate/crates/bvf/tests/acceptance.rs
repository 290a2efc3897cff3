//! Acceptance gate: every criterion prints its pass/fail line and must
//! pass. The same checks back the `bvf verify-all` command.

const SEED: u64 = 20260810;

fn assert_criterion(r: bvf::verify::CriterionResult) {
    println!("{}", r.line());
    assert!(r.passed, "{}", r.line());
}

#[test]
fn c01_weighted_plancherel() {
    assert_criterion(bvf::verify::criterion_1().unwrap());
}

#[test]
fn c02_mixed_identity() {
    assert_criterion(bvf::verify::criterion_2().unwrap());
}

#[test]
fn c03_tail_law() {
    assert_criterion(bvf::verify::criterion_3().unwrap());
}

#[test]
fn c04_gaussian_estimator() {
    assert_criterion(bvf::verify::criterion_4().unwrap());
}

#[test]
fn c05_heat_asymptotics() {
    assert_criterion(bvf::verify::criterion_5().unwrap());
}

#[test]
fn c06_estimator_cross_agreement() {
    assert_criterion(bvf::verify::criterion_6(SEED).unwrap());
}

#[test]
fn c07_set_derivative_dichotomy() {
    assert_criterion(bvf::verify::criterion_7().unwrap());
}

#[test]
fn c08_discrepancy_engine() {
    assert_criterion(bvf::verify::criterion_8(SEED).unwrap());
}

#[test]
fn c09_appendix_inequalities() {
    assert_criterion(bvf::verify::criterion_9(SEED).unwrap());
}

#[test]
fn c10_determinism() {
    assert_criterion(bvf::verify::criterion_10(SEED).unwrap());
}

#[test]
fn trivial_suite_passes() {
    for r in bvf::verify::run_trivial().unwrap() {
        assert_criterion(r);
    }
}
