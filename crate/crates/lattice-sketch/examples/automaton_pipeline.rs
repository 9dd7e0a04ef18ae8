//! From an arbitrary finite stream automaton to a mergeable sketch: terminal
//! classes of the zero-frequency graph, reversibilization, the quotient
//! kernel, and the output-restriction check.
//!
//! ```bash
//! cargo run --example automaton_pipeline
//! ```

use lattice_sketch::automaton::{
    is_output_restriction, is_path_independent, quotient_automaton, quotient_path_independent,
    reversibilize, zero_freq_classes, ExplicitAutomaton,
};
use lattice_sketch::lattice::EnumBudget;

fn main() {
    let budget = EnumBudget::from_env();
    let radius = 4u32;

    // a counter over {0..3} that saturates at both ends: not path reversible
    let clamped = ExplicitAutomaton::clamped_counter(3);
    println!(
        "clamped counter: path reversible? {}",
        clamped.is_path_reversible()
    );

    // zero-frequency structure at a small radius: saturation donates one-way
    // edges, leaving a strict class order
    let classes = zero_freq_classes(&clamped, 1, &budget).unwrap();
    println!("\nzero-frequency classes at radius 1:");
    for (members, terminal) in classes.classes.iter().zip(&classes.terminal) {
        let ids: Vec<&str> = members.iter().map(|&c| clamped.id(c)).collect();
        println!(
            "  {{{}}} {}",
            ids.join(", "),
            if *terminal { "(terminal)" } else { "" }
        );
    }

    // collapsing to terminal-class representatives restores reversibility
    let rev = reversibilize(&clamped, radius, &budget).unwrap();
    println!(
        "\nreversibilized at radius {radius}: {} config(s), path reversible? {}",
        rev.automaton.num_configs(),
        rev.automaton.is_path_reversible()
    );
    for c in 0..clamped.num_configs() {
        println!(
            "  alpha({}) = {} via zero-frequency stream {:?}",
            clamped.id(c),
            clamped.id(rev.alpha[c]),
            rev.witnesses[c]
        );
    }

    // the quotient by the boxed kernel is a path-independent sketch
    let (spec, outputs) = quotient_path_independent(&rev.automaton, radius, &budget).unwrap();
    let quotient = quotient_automaton(&spec, &outputs, radius, &budget).unwrap();
    println!(
        "\nquotient kernel rank {} over Z^{}; path independent? {}",
        spec.module().rank(),
        spec.ambient_dim(),
        is_path_independent(&quotient, radius, &budget).unwrap()
    );

    // every short stream through the quotient has a frequency-matched stream
    // through the original automaton with the same output
    let len = 6;
    let rev6 = reversibilize(&clamped, len as u32, &budget).unwrap();
    let (spec6, outputs6) =
        quotient_path_independent(&rev6.automaton, len as u32, &budget).unwrap();
    let q6 = quotient_automaton(&spec6, &outputs6, len as u32, &budget).unwrap();
    let check = is_output_restriction(&q6, &clamped, len, 2, &budget).unwrap();
    println!("output restriction over streams of length <= {len}? {}", check.ok);

    // a well-behaved contrast: the mod-3 counter quotients onto itself
    let mod3 = ExplicitAutomaton::mod_counter(3);
    let (spec3, _) = quotient_path_independent(&mod3, radius, &budget).unwrap();
    println!(
        "\nmod-3 counter kernel: {:?} (torsion {:?})",
        spec3.module().basis(),
        spec3.torsion_moduli()
    );
}
