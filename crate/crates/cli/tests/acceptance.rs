//! Acceptance suite. Each criterion prints one PASS/FAIL line to stderr
//! (bypassing the test harness capture) and fails the test on FAIL.

use std::io::Write;

use dqms::linalg::Config;
use dqms_cli::verify::run_criterion;

fn check(id: usize) {
    let outcome = run_criterion(id, &Config::default());
    let _ = writeln!(std::io::stderr(), "{}", outcome.line());
    assert!(outcome.passed, "{}", outcome.line());
}

#[test]
fn criterion_01_extremal_classical_indices() {
    check(1);
}

#[test]
fn criterion_02_algebra_chain_example() {
    check(2);
}

#[test]
fn criterion_03_counterexample_fidelity() {
    check(3);
}

#[test]
fn criterion_04_stabilization_bound() {
    check(4);
}

#[test]
fn criterion_05_covariant_equivalences() {
    check(5);
}

#[test]
fn criterion_06_peripheral_recovery() {
    check(6);
}

#[test]
fn criterion_07_ergodic_cyclic_codes() {
    check(7);
}

#[test]
fn criterion_08_fixed_space_lemma() {
    check(8);
}

#[test]
fn criterion_09_mixing_cross_validation() {
    check(9);
}

#[test]
fn criterion_10_unital_scrambling_bound() {
    check(10);
}

#[test]
fn criterion_11_capacity_tradeoff() {
    check(11);
}

#[test]
fn criterion_12_main_theorem_equivalences() {
    check(12);
}
