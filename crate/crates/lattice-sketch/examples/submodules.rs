//! Submodules of `Z^n` as values: canonicalization, membership, saturation,
//! quotient shape, and the orthogonal split of the ambient space.
//!
//! ```bash
//! cargo run --example submodules
//! ```

use lattice_sketch::intlinalg::{vec_from_i64, IntMatrix};
use lattice_sketch::lattice::Submodule;

fn main() {
    // any generating set canonicalizes to the same HNF basis
    let m = Submodule::make(2, &IntMatrix::from_i64(&[&[6, 8], &[2, 4]])).unwrap();
    println!("span{{(6,8),(2,4)}} canonicalizes to {:?}", m.basis());
    println!("fingerprint: {}...", &m.fingerprint()[..16]);

    let line = Submodule::make(2, &IntMatrix::from_i64(&[&[1, 1]])).unwrap();
    for x in [[2, 2], [1, 2], [-3, -3]] {
        println!(
            "({}, {}) in span{{(1,1)}}? {}",
            x[0],
            x[1],
            line.member(&vec_from_i64(&x)).unwrap()
        );
    }

    // saturation removes torsion from the quotient
    let scaled = Submodule::make(2, &IntMatrix::from_i64(&[&[2, 2]])).unwrap();
    let sat = scaled.saturate();
    println!(
        "\nspan{{(2,2)}} saturates to {:?} (same rank, torsion-free quotient)",
        sat.basis()
    );
    println!(
        "quotient of span{{(2,2)}}: free rank {}, torsion {:?}",
        scaled.quotient_shape().free_rank,
        scaled.quotient_shape().torsion
    );
    println!(
        "quotient of its saturation: free rank {}, torsion {:?}",
        sat.quotient_shape().free_rank,
        sat.quotient_shape().torsion
    );

    // orthogonal split: v2 spans the real span of the kernel, v1 the rest
    let split = line.ortho_split();
    println!("\nsplit of span{{(1,1)}}:");
    println!("v2 (kernel directions) = {:?}", split.v2);
    println!("v1 (complement)        = {:?}", split.v1);
    split.check_invariants(&line).unwrap();
    println!("split invariants hold within {:.0e}", split.tolerance);
}
