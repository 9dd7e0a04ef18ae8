//! Acceptance suite: one test per verification criterion, each printing a
//! single pass/fail line (`cargo test --test acceptance -- --nocapture` to
//! see them all).

use std::time::Instant;

use lattice_sketch::verify::{self, Report};

fn finish(criterion: &str, report: &Report, started: Option<(Instant, f64)>) {
    let status = if report.passed() { "PASS" } else { "FAIL" };
    let timing = match started {
        Some((t, limit)) => {
            let secs = t.elapsed().as_secs_f64();
            format!(" [{secs:.1}s / {limit:.0}s limit]")
        }
        None => String::new(),
    };
    println!("{criterion}: {status}{timing}");
    if !report.passed() {
        for case in report.failures() {
            println!("    counterexample: {} — {}", case.label, case.detail);
        }
    }
    assert!(
        report.passed(),
        "{criterion} failed: {:?}",
        report.failures().collect::<Vec<_>>()
    );
    if let Some((t, limit)) = started {
        let secs = t.elapsed().as_secs_f64();
        assert!(secs < limit, "{criterion} exceeded time limit: {secs:.1}s");
    }
}

#[test]
fn criterion_01_mergeability_path_independence() {
    let t = Instant::now();
    let report = verify::merge_suite(1000, 8, 200, 0xACCE01).unwrap();
    finish(
        "criterion 1 (mergeability/path-independence, 1000 trials)",
        &report,
        Some((t, 30.0)),
    );
}

#[test]
fn criterion_02_kernel_equality() {
    let report = verify::kernel_equality_suite(4, 3).unwrap();
    finish(
        "criterion 2 (kernel-equality, exhaustive over Z_3^n, n <= 4)",
        &report,
        None,
    );
}

#[test]
fn criterion_03_normal_forms() {
    let report = verify::normal_forms_suite(1000, 6, 10, 0xACCE03).unwrap();
    finish(
        "criterion 3 (normal forms, 1000 random matrices)",
        &report,
        None,
    );
}

#[test]
fn criterion_04_min_l1_two_competitive() {
    let report = verify::l1min_suite(1000, 5, 0xACCE04).unwrap();
    finish(
        "criterion 4 (min-l1 decoding is 2-competitive, 1000 sets)",
        &report,
        None,
    );
}

#[test]
fn criterion_05_zero_optimal_on_symmetric_sets() {
    let report = verify::zero_symmetric_suite(4, 3, 100, 0xACCE05).unwrap();
    finish(
        "criterion 5 (zero estimate optimal on symmetric boxed kernels)",
        &report,
        None,
    );
}

#[test]
fn criterion_06_saturated_decode_within_4x() {
    let report = verify::fourfold_suite(3, 3).unwrap();
    finish(
        "criterion 6 (saturated decode within 4x worst boxed error, exact)",
        &report,
        None,
    );
}

#[test]
fn criterion_07_coset_count_bounds() {
    let report = verify::coset_count_suite(4, 2).unwrap();
    finish(
        "criterion 7 (coset counts >= (2m+1)^(n-r); saturated within 1 bit)",
        &report,
        None,
    );
}

#[test]
fn criterion_08_extension_brackets_boxed_error() {
    let report = verify::extension_suite(4, 10, 100_000, 0xACCE08).unwrap();
    finish(
        "criterion 8 (extension supremum brackets boxed worst case)",
        &report,
        None,
    );
}

#[test]
fn criterion_09_rank_bound_window() {
    let report = verify::rank_bound_suite().unwrap();
    finish(
        "criterion 9 (free-rank bound arithmetic and window violation)",
        &report,
        None,
    );
}

#[test]
fn criterion_10_automaton_pipeline() {
    let t = Instant::now();
    let report = verify::pipeline_suite(4, 6, 2).unwrap();
    finish(
        "criterion 10 (reversibilize/quotient/output-restriction pipeline)",
        &report,
        Some((t, 60.0)),
    );
}

#[test]
fn criterion_11_space_scaling() {
    let report = verify::space_scaling_suite(&[1, 2, 4, 8]).unwrap();
    finish(
        "criterion 11 (coset bits track (n-r) log2(2m+1) within 1 bit)",
        &report,
        None,
    );
}
