//! Min-`l1` coset decoding: deterministic tie-breaking, the 2x guarantee on
//! explicit sets, and the 4x guarantee after saturation.
//!
//! ```bash
//! cargo run --example min_l1_decoding
//! ```

use lattice_sketch::decode::{
    err_int, err_set, min_l1_in_coset, min_l1_of_set, rational_vec, worst_case_err_zero,
    DecodeBudget,
};
use lattice_sketch::intlinalg::{vec_from_i64, IntMatrix};
use lattice_sketch::lattice::{box_iter, EnumBudget, Submodule};
use lattice_sketch::sketch::KernelSpec;

fn main() {
    let budget = DecodeBudget::default();

    // ties are broken toward the lexicographically smallest vector
    let line = Submodule::make(2, &IntMatrix::from_i64(&[&[1, 1]])).unwrap();
    let got = min_l1_in_coset(&line, &vec_from_i64(&[3, 1]), &budget).unwrap();
    println!(
        "min-l1 over (3,1) + span{{(1,1)}} = ({}, {})  (ties: (2,0), (1,-1), (0,-2))",
        got[0], got[1]
    );

    // the min-l1 point of any finite set is within twice the error of ANY
    // estimator for that set
    let set: Vec<Vec<i64>> = vec![vec![4, 1], vec![3, 2], vec![5, 0], vec![4, 2]];
    let set: Vec<_> = set.iter().map(|v| vec_from_i64(v)).collect();
    let g = min_l1_of_set(&set).unwrap();
    let lhs = err_set(&rational_vec(&g), &set).unwrap();
    let h = rational_vec(&vec_from_i64(&[4, 1]));
    let rhs = err_set(&h, &set).unwrap();
    println!("\nmin-l1 of a 4-point set: err {lhs} vs err {rhs} for a hand-picked estimate");
    assert!(lhs.le_scaled(2, &rhs));

    // decoding over the saturated kernel: exact 4x bound against the worst
    // boxed-kernel error
    let m = Submodule::make(2, &IntMatrix::from_i64(&[&[2, 2]])).unwrap();
    let sat = m.saturate();
    let spec = KernelSpec::compile(&sat).unwrap();
    let radius = 3u32;
    let eps = worst_case_err_zero(&sat, 4 * radius, &EnumBudget::default()).unwrap();
    println!("\nkernel span{{(2,2)}}, saturation span{{(1,1)}}, eps-hat = {eps}");
    let mut worst_seen = String::new();
    for x in box_iter(2, radius) {
        if x == [0, 0] {
            continue;
        }
        let xv = vec_from_i64(&x);
        let state = spec.residue(&xv).unwrap();
        let est = lattice_sketch::decode::estimate(&spec, &state, &budget).unwrap();
        let e = err_int(&est, &xv).unwrap();
        assert!(e.le_scaled(4, &eps), "x={x:?}");
        worst_seen = format!("{e}");
    }
    println!("every x in the radius-{radius} box decodes within 4 * eps-hat (last err: {worst_seen})");
}
