//! Worst-case error oracles: the boxed-kernel maximum, the statistical
//! supremum over the real extension, and the free-rank bound with its
//! validity window.
//!
//! ```bash
//! cargo run --example worst_case_error
//! ```

use lattice_sketch::decode::{
    rank_bound_check, worst_case_err_extension, worst_case_err_zero, WindowStatus,
};
use lattice_sketch::intlinalg::IntMatrix;
use lattice_sketch::lattice::{EnumBudget, Submodule};
use num_bigint::BigInt;

fn main() {
    let budget = EnumBudget::default();

    for (label, m) in [
        (
            "repetition span{(1,1,1,1)}",
            Submodule::make(4, &IntMatrix::from_i64(&[&[1, 1, 1, 1]])).unwrap(),
        ),
        (
            "skewed line span{(1,3)}",
            Submodule::make(2, &IntMatrix::from_i64(&[&[1, 3]])).unwrap(),
        ),
        ("zero kernel in Z^3", Submodule::zero(3)),
    ] {
        let wcz = worst_case_err_zero(&m, 10, &budget).unwrap();
        let ext = worst_case_err_extension(&m.ortho_split(), 20_000, 42);
        println!("{label}:");
        println!("  worst boxed error (radius 10): {wcz}");
        println!("  extension supremum estimate:   {:.6}", ext.to_f64());
        assert!(ext.to_f64() >= wcz.to_f64() - 1e-9);
    }

    // free-rank bound: a kernel decoding everything to error eps needs
    // n - rank >= 1/(72 eps^2), valid for 1/sqrt(6n) < eps <= 1/8
    let zero16 = Submodule::zero(16);
    let report = rank_bound_check(&zero16, &zero16.ortho_split(), 0.125, None);
    println!("\nzero kernel, n=16, eps=1/8:");
    println!(
        "  free rank {} >= bound {:.3}? {:?}",
        report.free_rank, report.bound, report.pass
    );

    // outside the window the check refuses to conclude anything
    let rep100 =
        Submodule::from_generator_rows(100, vec![vec![BigInt::from(1); 100]]).unwrap();
    let eps = worst_case_err_extension(&rep100.ortho_split(), 2_000, 42).to_f64();
    let report = rank_bound_check(&rep100, &rep100.ortho_split(), eps, None);
    println!("\nrepetition kernel, n=100, measured eps = {eps:.4}:");
    match report.window {
        WindowStatus::BelowLower { lower } => {
            println!("  window violated: eps <= {lower:.4}; no assertion made")
        }
        other => println!("  unexpected window status {other:?}"),
    }
}
