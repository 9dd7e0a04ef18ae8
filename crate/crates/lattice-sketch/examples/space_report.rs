//! Space accounting: exact coset counts over growing boxes versus the
//! rank-based floor `(n - r) * log2(2m + 1)`.
//!
//! ```bash
//! cargo run --example space_report
//! ```

use lattice_sketch::battery::{generate, parse_kind};
use lattice_sketch::lattice::EnumBudget;
use lattice_sketch::sketch::KernelSpec;

fn main() {
    let budget = EnumBudget::from_env();
    let n = 2;
    println!("n = {n}; bits needed for the coset count vs the rank floor\n");
    println!(
        "{:<20} {:>3} {:>6} {:>12} {:>12}",
        "kernel", "m", "cosets", "coset bits", "floor bits"
    );
    for name in ["zero", "repetition", "axis(1)", "diagonal-mod(2,3)", "full"] {
        let module = generate(&parse_kind(name).unwrap(), n).unwrap();
        let spec = KernelSpec::compile(&module).unwrap();
        for m in [1u32, 2, 4, 8] {
            let rep = spec.space_report(m, &budget).unwrap();
            println!(
                "{:<20} {:>3} {:>6} {:>12.4} {:>12.4}",
                name, m, rep.coset_count, rep.coset_count_bits, rep.lower_bound_bits
            );
            assert!(rep.coset_count_bits >= rep.lower_bound_bits - 1e-12);
        }
        println!();
    }
    println!("free kernels stay within one bit of the floor; the count for a");
    println!("fixed kernel grows like log2(2m+1) per untracked dimension.");
}
