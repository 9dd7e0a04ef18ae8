//! Deterministic, arbitrarily mergeable frequency sketches over integer
//! lattice quotients.
//!
//! A sketch here is the image of a stream's frequency vector in the quotient
//! `Z^n / M` for a chosen kernel submodule `M`: torsion coordinates are
//! tracked modulo the invariant factors of the quotient, free coordinates as
//! exact integers. States of sub-streams merge by coset addition, the result
//! depends only on the multiset of records, and decoding returns the
//! smallest-`l1` member of the tracked coset.
//!
//! The crate splits into:
//!
//! - [`intlinalg`] — exact Hermite/Smith normal forms, integral kernels and
//!   solvability over arbitrary-precision integers;
//! - [`lattice`] — submodules of `Z^n` as canonical values: membership,
//!   saturation, quotient shape, orthogonal splits, box enumeration;
//! - [`sketch`] — compiled kernels, sketch states, updates, merges, and the
//!   stream/state file formats;
//! - [`decode`] — the relative-error functional, min-`l1` coset decoding, and
//!   worst-case error oracles;
//! - [`automaton`] — an explicit finite stream-automaton laboratory:
//!   reversibility, path independence, kernels by exploration,
//!   reversibilization and quotients;
//! - [`battery`] — named, reproducible kernel generators;
//! - [`verify`] — brute-force suites checking the structural claims at desk
//!   scale;
//! - [`cli`] — the `lattice-sketch` binary: `sketch build/merge/estimate`,
//!   `verify`, `experiment`.
//!
//! Each major capability has a runnable example under `examples/`:
//!
//! ```bash
//! cargo run --example build_merge_estimate
//! cargo run --example normal_forms
//! cargo run --example submodules
//! cargo run --example min_l1_decoding
//! cargo run --example worst_case_error
//! cargo run --example space_report
//! cargo run --example automaton_pipeline
//! cargo run --example verification
//! ```

// index loops read naturally in dense matrix code
#![allow(clippy::needless_range_loop)]

pub mod automaton;
pub mod battery;
pub mod cli;
pub mod decode;
pub mod error;
pub mod intlinalg;
pub mod lattice;
pub mod sketch;
pub mod verify;

pub use error::{Error, Result};
pub use intlinalg::{hnf, integral_kernel, snf, solve_integral, IntMatrix, SmithDecomposition};
pub use lattice::{coset_count, points_in_box, EnumBudget, OrthoSplit, QuotientShape, Submodule};
pub use sketch::{KernelSpec, SketchState, StreamRecord};
