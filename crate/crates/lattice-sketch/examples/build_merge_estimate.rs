//! The sketch lifecycle end to end: compile a kernel, process stream shards,
//! merge states, decode, and round-trip every file format involved.
//!
//! ```bash
//! cargo run --example build_merge_estimate
//! ```

use lattice_sketch::decode::{estimate, DecodeBudget};
use lattice_sketch::lattice::submodule_from_json;
use lattice_sketch::sketch::{parse_stream_text, state_from_json, state_to_json, KernelSpec};

fn main() {
    // the kernel file is the sketch's "program": Z^3 / span{(2,0,0),(0,3,0)}
    // keeps one residue mod 6 and one exact coordinate
    let kernel_json = r#"{"n": 3, "basis": [[2, 0, 0], [0, 3, 0]]}"#;
    let module = submodule_from_json(kernel_json).unwrap();
    let spec = KernelSpec::compile(&module).unwrap();
    println!(
        "kernel rank {} -> torsion moduli {:?}, {} free coordinate(s)",
        module.rank(),
        spec.torsion_moduli(),
        spec.free_count()
    );

    // two shards of one logical stream, in the text format
    let shard_a = "# shard A\n1,1\n2,1\n3,1\n1,1\n";
    let shard_b = "2,-1\n3,1\n1,-1\n";
    let recs_a = parse_stream_text(shard_a).unwrap();
    let recs_b = parse_stream_text(shard_b).unwrap();

    let state_a = spec.process_stream(&spec.init(), recs_a.iter().copied()).unwrap();
    let state_b = spec.process_stream(&spec.init(), recs_b.iter().copied()).unwrap();

    // merging shard states equals processing the concatenated stream
    let merged = spec.merge(&state_a, &state_b).unwrap();
    let whole = spec
        .process_stream(&state_a, recs_b.iter().copied())
        .unwrap();
    assert_eq!(merged, whole);
    println!("merge(shard A, shard B) == state(shard A ++ shard B)");

    // state files preserve arbitrary-precision coordinates bit-exactly
    let file = state_to_json(&merged).unwrap();
    println!("\nstate file:\n{file}");
    let back = state_from_json(&file, &spec).unwrap();
    assert_eq!(back, merged);

    // decoding returns the smallest-l1 member of the tracked coset;
    // the true frequency vector here is (1, 0, 2)
    let est = estimate(&spec, &merged, &DecodeBudget::default()).unwrap();
    let printable: Vec<String> = est.iter().map(|v| v.to_string()).collect();
    println!("decoded estimate: ({})", printable.join(", "));
    println!("(the third coordinate is outside the kernel, so it is exact)");
}
