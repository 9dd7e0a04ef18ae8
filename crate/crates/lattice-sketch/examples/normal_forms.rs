//! Exact Hermite and Smith normal forms on small integer matrices.
//!
//! ```bash
//! cargo run --example normal_forms
//! ```

use lattice_sketch::intlinalg::{hnf, snf, solve_integral, IntMatrix};

fn main() {
    let a = IntMatrix::from_i64(&[&[2, 4], &[6, 8]]);
    println!("A = {a:?}");

    let (h, u) = hnf(&a);
    println!("row HNF (U * A = H):");
    println!("H = {h:?}");
    println!("U = {u:?}  (|det U| = {})", u.det());
    assert_eq!(u.mul(&a), h);

    // the HNF basis spans the same integer lattice as the input rows
    for r in 0..a.rows() {
        let coeffs = solve_integral(&h, a.row(r)).unwrap().unwrap();
        println!("row {r} of A = {coeffs:?} * rows of H");
    }

    let s = snf(&a);
    println!("\nSmith form (U * A * V = D):");
    println!("D = {:?}", s.d);
    println!("invariant factors: {:?}", s.invariant_factors);
    assert_eq!(s.u.mul(&a).mul(&s.v), s.d);

    // divisibility chain: gcd of all entries first, |det| as the product
    let b = IntMatrix::from_i64(&[&[2, 0], &[0, 3]]);
    let s = snf(&b);
    println!("\ndiag(2,3) has invariant factors {:?}", s.invariant_factors);
    println!("(Z^2 / span{{2e1, 3e2}} is cyclic of order 6: one residue mod 6 suffices)");
}
