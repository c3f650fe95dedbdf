//! The full acceptance suite, one test per criterion. Each prints its
//! pass/fail line and asserts it. Run with --nocapture to see the lines
//! as they complete; release mode recommended for the heavier criteria.

use ffs_cli::acceptance::{run_one, Profile};

fn check(id: u32) {
    let r = run_one(id, Profile::Full).expect("criterion id in range");
    println!("{}", r.line());
    assert!(r.pass, "criterion {} failed: {}", r.id, r.summary);
}

#[test]
fn criterion_01_sphere_formula() {
    check(1);
}

#[test]
fn criterion_02_spectrum_cross_validation() {
    check(2);
}

#[test]
fn criterion_03_ramanujan_bound() {
    check(3);
}

#[test]
fn criterion_04_mixing_inequalities() {
    check(4);
}

#[test]
fn criterion_05_star_copy_oracle() {
    check(5);
}

#[test]
fn criterion_06_star_concentration() {
    check(6);
}

#[test]
fn criterion_07_congruence_lemma() {
    check(7);
}

#[test]
fn criterion_08_scheme_construction() {
    check(8);
}

#[test]
fn criterion_09_main_theorem_census() {
    check(9);
}

#[test]
fn criterion_10_pipeline_consistency() {
    check(10);
}
