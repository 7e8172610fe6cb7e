use std::io::Write;
use std::sync::OnceLock;

use fp::subgroup::Budget;
use fp_verify::Verifier;

const SEED: u64 = 2024;

fn verifier() -> &'static Verifier {
    static V: OnceLock<Verifier> = OnceLock::new();
    V.get_or_init(|| Verifier::new(SEED, Budget::default()))
}

fn criterion(id: usize) {
    let o = verifier().run(id);
    // written straight to stderr so the summary line survives output capture
    let _ = writeln!(std::io::stderr().lock(), "{}", o.line());
    for d in &o.details {
        println!("    {d}");
    }
    assert!(o.pass, "{}", o.line());
}

#[test]
fn criterion_01_group_kernel() {
    criterion(1);
}

#[test]
fn criterion_02_grid_word_closed_form() {
    criterion(2);
}

#[test]
fn criterion_03_wall_count_fixtures() {
    criterion(3);
}

#[test]
fn criterion_04_separation() {
    criterion(4);
}

#[test]
fn criterion_05_fixture_paths() {
    criterion(5);
}

#[test]
fn criterion_06_membership_fixtures() {
    criterion(6);
}

#[test]
fn criterion_07_parity_path_independence() {
    criterion(7);
}

#[test]
fn criterion_08_crossing_suite() {
    criterion(8);
}

#[test]
fn criterion_09_dimension_scaling() {
    criterion(9);
}

#[test]
fn criterion_10_properness_scan() {
    criterion(10);
}
