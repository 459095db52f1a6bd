//! Acceptance gate: one test per headline verification, at full strength.
//!
//! Each test prints a single PASS/FAIL line (visible with `--nocapture`) and
//! asserts the check, including its time budget. Run with
//! `cargo test --test acceptance`.

use betaq_core::suite;

fn gate(r: suite::CheckResult) {
    println!("{}", r.summary_line());
    assert!(r.pass, "{}", r.detail);
}

#[test]
fn criterion_01_ramanujan_identity_to_q500() {
    gate(suite::check_ramanujan());
}

#[test]
fn criterion_02_hou_sun_identity_to_q500() {
    gate(suite::check_hou_sun());
}

#[test]
fn criterion_03_k3_identity_to_q300() {
    gate(suite::check_k3());
}

#[test]
fn criterion_04_k1_exact_collapse_to_q400() {
    gate(suite::check_k1_collapse());
}

#[test]
fn criterion_05_cusp_decomposition_k2_to_k6() {
    gate(suite::check_cusp_decomposition(6));
}

#[test]
fn criterion_06_twisted_eisenstein_split_k_le_6() {
    gate(suite::check_twisted_crosscheck(6));
}

#[test]
fn criterion_07_lattice_sums_match_closed_forms() {
    gate(suite::check_lattice_closed_forms());
}

#[test]
fn criterion_08_eta_tower_lemma_and_radical_values() {
    gate(suite::check_eta_lemma());
}

#[test]
fn criterion_09_cm_closed_vs_direct_evaluation() {
    gate(suite::check_cm_closed_vs_direct(3));
}

#[test]
fn criterion_10_radial_limit_with_exact_constant() {
    gate(suite::check_radial_limit(3));
}

#[test]
fn criterion_11_tuple_counts_and_main_term() {
    gate(suite::check_tuple_counts(3));
}

#[test]
fn criterion_12_property_suites() {
    gate(suite::check_property_suites(6));
}
