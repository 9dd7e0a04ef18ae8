//! Driving the brute-force verification suites from the library API.
//!
//! ```bash
//! cargo run --example verification
//! ```

use lattice_sketch::verify;

fn main() {
    // each suite returns a per-case report; parameters control scale
    let suites = vec![
        verify::normal_forms_suite(200, 5, 10, 1).unwrap(),
        verify::kernel_equality_suite(3, 2).unwrap(),
        verify::merge_suite(200, 5, 80, 1).unwrap(),
        verify::l1min_suite(300, 4, 1).unwrap(),
        verify::coset_count_suite(3, 2).unwrap(),
        verify::rank_bound_suite().unwrap(),
        verify::space_scaling_suite(&[1, 2, 4]).unwrap(),
    ];
    for report in &suites {
        println!("{}", report.summary());
        for case in report.failures() {
            println!("  counterexample: {} — {}", case.label, case.detail);
        }
    }
    assert!(suites.iter().all(|r| r.passed()));
    println!("\nall suites green; see `lattice-sketch verify all` for the full battery");
}
