//! The path-independent, arbitrarily mergeable sketch: state is the image of
//! the stream's frequency vector in `Z^n / M`, updated per record and merged
//! by coset addition.
//!
//! Compiling a kernel turns a submodule into a residue map. From the Smith
//! decomposition `U * B * V = D` of the basis, the unimodular transform
//! `T = V^t` carries `x` to coordinates in which membership in `M` is exactly
//! "divisible by `d_i` on the torsion coordinates, zero on the free ones", so
//! the sketch keeps `T*x mod d_i` per torsion coordinate and exact integers on
//! the free coordinates.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::intlinalg::{self, hnf, snf, IntMatrix};
use crate::lattice::{box_iter, box_point_count, hex_string, EnumBudget, QuotientShape, Submodule};

/// One stream record: increment (`+1`) or decrement (`-1`) of item `index`.
/// Indices are 1-based; record order carries no information beyond sequence
/// position.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StreamRecord {
    pub index: usize,
    pub delta: i8,
}

impl StreamRecord {
    pub fn new(index: usize, delta: i64) -> Result<Self> {
        if delta != 1 && delta != -1 {
            return Err(Error::Malformed(format!(
                "delta must be +1 or -1, got {delta}"
            )));
        }
        if index == 0 {
            return Err(Error::Malformed("item indices are 1-based".into()));
        }
        Ok(StreamRecord {
            index,
            delta: delta as i8,
        })
    }
}

/// Role of one output coordinate of the residue transform.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoordKind {
    /// Invariant factor 1: the coordinate carries no information and is
    /// dropped from the state.
    Dropped,
    /// Tracked modulo the invariant factor `q > 1`.
    Torsion(BigInt),
    /// Tracked as an exact unbounded integer.
    Free,
}

/// A compiled kernel: the submodule plus everything needed to run its residue
/// map, invert it, and gate merges.
#[derive(Clone, Debug)]
pub struct KernelSpec {
    module: Submodule,
    shape: QuotientShape,
    /// Unimodular `n x n` transform; the residue map reads `T * x`.
    transform: IntMatrix,
    inverse_transform: IntMatrix,
    /// Per-row role of `transform`'s output coordinates.
    coords: Vec<CoordKind>,
    fingerprint: String,
}

/// Mergeable summary: torsion residues in `[0, q_i)` plus exact free
/// coordinates, tagged with the fingerprint of the kernel that produced it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SketchState {
    pub kernel_fingerprint: String,
    pub torsion_residues: Vec<BigInt>,
    pub free_coords: Vec<BigInt>,
}

/// Point cap for the compile-time kernel-equality self-scan. Radius 2 is used
/// whenever the box fits; larger dimensions degrade to radius 1 and then to a
/// targeted probe set so compilation stays cheap.
const SELF_TEST_POINT_CAP: u128 = 20_000;

impl KernelSpec {
    /// Derives the residue map for a submodule and self-checks the
    /// kernel-equality property (`rho(x) = 0` iff `x` is a member) over a
    /// small box before returning.
    pub fn compile(module: &Submodule) -> Result<KernelSpec> {
        let n = module.ambient_dim();
        let dec = snf(module.basis());
        let transform = dec.v.transpose();
        // V is unimodular, so the HNF of its rows is the identity and the
        // recorded row operations form its inverse.
        let (h, v_inv) = hnf(&dec.v);
        if h != IntMatrix::identity(n) {
            return Err(Error::SelfTestFailed(
                "SNF right factor is not unimodular".into(),
            ));
        }
        let inverse_transform = v_inv.transpose();
        let mut coords = Vec::with_capacity(n);
        for i in 0..n {
            if i < dec.invariant_factors.len() {
                let d = &dec.invariant_factors[i];
                debug_assert!(!d.is_zero(), "basis rows are independent");
                if d.is_one() {
                    coords.push(CoordKind::Dropped);
                } else {
                    coords.push(CoordKind::Torsion(d.clone()));
                }
            } else {
                coords.push(CoordKind::Free);
            }
        }
        let shape = module.quotient_shape();
        let fingerprint = kernel_fingerprint(module, &coords);
        let spec = KernelSpec {
            module: module.clone(),
            shape,
            transform,
            inverse_transform,
            coords,
            fingerprint,
        };
        spec.self_test()?;
        Ok(spec)
    }

    fn self_test(&self) -> Result<()> {
        let n = self.module.ambient_dim();
        let mut probes: Vec<Vec<i64>> = Vec::new();
        if box_point_count(n, 2).is_some_and(|c| c <= SELF_TEST_POINT_CAP) {
            probes.extend(box_iter(n, 2));
        } else if box_point_count(n, 1).is_some_and(|c| c <= SELF_TEST_POINT_CAP) {
            probes.extend(box_iter(n, 1));
        } else {
            probes.push(vec![0; n]);
            for i in 0..n {
                for s in [1i64, -1] {
                    let mut e = vec![0; n];
                    e[i] = s;
                    probes.push(e.clone());
                    for j in i + 1..n {
                        for t in [1i64, -1] {
                            let mut f = e.clone();
                            f[j] = t;
                            probes.push(f);
                        }
                    }
                }
            }
        }
        let init = self.init();
        for p in &probes {
            let x = intlinalg::vec_from_i64(p);
            let claims_member = self.residue(&x)? == init;
            let is_member = self.module.member(&x)?;
            if claims_member != is_member {
                return Err(Error::SelfTestFailed(format!(
                    "kernel equality violated at {p:?}: residue-zero {claims_member}, member {is_member}"
                )));
            }
        }
        // Basis rows must always map to the zero state.
        for r in 0..self.module.basis().rows() {
            if self.residue(self.module.basis().row(r))? != init {
                return Err(Error::SelfTestFailed(format!(
                    "basis row {r} does not map to the initial state"
                )));
            }
        }
        Ok(())
    }

    pub fn module(&self) -> &Submodule {
        &self.module
    }

    pub fn shape(&self) -> &QuotientShape {
        &self.shape
    }

    pub fn ambient_dim(&self) -> usize {
        self.module.ambient_dim()
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn transform(&self) -> &IntMatrix {
        &self.transform
    }

    pub(crate) fn inverse_transform(&self) -> &IntMatrix {
        &self.inverse_transform
    }

    pub(crate) fn coords(&self) -> &[CoordKind] {
        &self.coords
    }

    /// Torsion moduli in chain order (factors equal to 1 excluded).
    pub fn torsion_moduli(&self) -> Vec<BigInt> {
        self.coords
            .iter()
            .filter_map(|c| match c {
                CoordKind::Torsion(q) => Some(q.clone()),
                _ => None,
            })
            .collect()
    }

    pub fn free_count(&self) -> usize {
        self.coords
            .iter()
            .filter(|c| matches!(c, CoordKind::Free))
            .count()
    }

    /// The additive homomorphism `rho`: state of a frequency vector.
    pub fn residue(&self, x: &[BigInt]) -> Result<SketchState> {
        if x.len() != self.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim(),
                got: x.len(),
            });
        }
        let w = self.transform.mul_vec(x);
        let mut torsion = Vec::new();
        let mut free = Vec::new();
        for (wi, kind) in w.into_iter().zip(&self.coords) {
            match kind {
                CoordKind::Dropped => {}
                CoordKind::Torsion(q) => torsion.push(wi.mod_floor(q)),
                CoordKind::Free => free.push(wi),
            }
        }
        Ok(SketchState {
            kernel_fingerprint: self.fingerprint.clone(),
            torsion_residues: torsion,
            free_coords: free,
        })
    }

    pub fn residue_i64(&self, x: &[i64]) -> SketchState {
        self.residue(&intlinalg::vec_from_i64(x))
            .expect("length checked by caller")
    }

    /// State of the empty stream: all residues and free coordinates zero.
    pub fn init(&self) -> SketchState {
        SketchState {
            kernel_fingerprint: self.fingerprint.clone(),
            torsion_residues: vec![BigInt::zero(); self.shape.torsion.len()],
            free_coords: vec![BigInt::zero(); self.shape.free_rank],
        }
    }

    /// Applies one record: adds `delta` times the record's column of the
    /// transform, modulo `q_i` on torsion coordinates.
    pub fn update(&self, state: &SketchState, rec: StreamRecord) -> Result<SketchState> {
        self.update_batch(state, rec.index, &BigInt::from(rec.delta))
    }

    /// Batch form: applies `count` copies of `(index, +1)` (or `-count`
    /// deletions when negative) in one step.
    pub fn update_batch(
        &self,
        state: &SketchState,
        index: usize,
        count: &BigInt,
    ) -> Result<SketchState> {
        let n = self.ambient_dim();
        if index == 0 || index > n {
            return Err(Error::IndexOutOfRange { index, n });
        }
        self.check_state(state)?;
        let col = index - 1;
        let mut out = state.clone();
        let mut it_t = 0;
        let mut it_f = 0;
        for (i, kind) in self.coords.iter().enumerate() {
            let step = self.transform.at(i, col);
            match kind {
                CoordKind::Dropped => {}
                CoordKind::Torsion(q) => {
                    let v = &out.torsion_residues[it_t] + count * step;
                    out.torsion_residues[it_t] = v.mod_floor(q);
                    it_t += 1;
                }
                CoordKind::Free => {
                    out.free_coords[it_f] += count * step;
                    it_f += 1;
                }
            }
        }
        Ok(out)
    }

    /// Folds a record sequence into the state. The result depends only on the
    /// multiset sum of the records.
    pub fn process_stream<I>(&self, state: &SketchState, records: I) -> Result<SketchState>
    where
        I: IntoIterator<Item = StreamRecord>,
    {
        let mut s = state.clone();
        for rec in records {
            s = self.update(&s, rec)?;
        }
        Ok(s)
    }

    /// Coset addition: coordinate-wise sum, modulo `q_i` on torsion
    /// coordinates. Refused unless both states carry this kernel's
    /// fingerprint.
    pub fn merge(&self, a: &SketchState, b: &SketchState) -> Result<SketchState> {
        self.check_state(a)?;
        self.check_state(b)?;
        let mut torsion = Vec::with_capacity(a.torsion_residues.len());
        let moduli = self.torsion_moduli();
        for ((x, y), q) in a
            .torsion_residues
            .iter()
            .zip(&b.torsion_residues)
            .zip(&moduli)
        {
            torsion.push((x + y).mod_floor(q));
        }
        let free = a
            .free_coords
            .iter()
            .zip(&b.free_coords)
            .map(|(x, y)| x + y)
            .collect();
        Ok(SketchState {
            kernel_fingerprint: self.fingerprint.clone(),
            torsion_residues: torsion,
            free_coords: free,
        })
    }

    /// Structural validity of a state against this kernel.
    pub fn check_state(&self, state: &SketchState) -> Result<()> {
        if state.kernel_fingerprint != self.fingerprint {
            return Err(Error::FingerprintMismatch {
                expected: self.fingerprint.clone(),
                got: state.kernel_fingerprint.clone(),
            });
        }
        let moduli = self.torsion_moduli();
        if state.torsion_residues.len() != moduli.len() {
            return Err(Error::InconsistentState(format!(
                "expected {} torsion residues, got {}",
                moduli.len(),
                state.torsion_residues.len()
            )));
        }
        if state.free_coords.len() != self.shape.free_rank {
            return Err(Error::InconsistentState(format!(
                "expected {} free coordinates, got {}",
                self.shape.free_rank,
                state.free_coords.len()
            )));
        }
        for (r, q) in state.torsion_residues.iter().zip(&moduli) {
            if r.is_negative() || r >= q {
                return Err(Error::InconsistentState(format!(
                    "torsion residue {r} outside [0, {q})"
                )));
            }
        }
        Ok(())
    }

    /// Bits needed for the exact coset count over `Z_m^n`, next to the
    /// rank-based floor `(n - r) * log2(2m + 1)`. The first is never smaller.
    pub fn space_report(&self, radius: u32, budget: &EnumBudget) -> Result<SpaceReport> {
        let count = crate::lattice::coset_count(&self.module, radius, budget)?;
        let n = self.ambient_dim();
        let r = self.module.rank();
        let side = 2.0 * radius as f64 + 1.0;
        Ok(SpaceReport {
            coset_count: count,
            coset_count_bits: (count as f64).log2(),
            lower_bound_bits: (n - r) as f64 * side.log2(),
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SpaceReport {
    pub coset_count: u64,
    pub coset_count_bits: f64,
    pub lower_bound_bits: f64,
}

fn kernel_fingerprint(module: &Submodule, coords: &[CoordKind]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(format!(
        "kernel;n={};basis={};",
        module.ambient_dim(),
        module.fingerprint()
    ));
    for c in coords {
        match c {
            CoordKind::Dropped => hasher.update("1,"),
            CoordKind::Torsion(q) => hasher.update(format!("{q},")),
            CoordKind::Free => hasher.update("free,"),
        }
    }
    hex_string(&hasher.finalize())
}

// --- state file format -------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct StateFile {
    version: u32,
    kernel_fingerprint: String,
    torsion_residues: Vec<i64>,
    free_coords: Vec<String>,
}

pub const STATE_FILE_VERSION: u32 = 1;

/// Serializes a state. Free coordinates are written as decimal strings so
/// arbitrary-precision values survive bit-exactly.
pub fn state_to_json(state: &SketchState) -> Result<String> {
    let torsion = state
        .torsion_residues
        .iter()
        .map(|v| {
            v.to_i64()
                .ok_or_else(|| Error::Malformed(format!("torsion residue {v} exceeds file range")))
        })
        .collect::<Result<Vec<i64>>>()?;
    let file = StateFile {
        version: STATE_FILE_VERSION,
        kernel_fingerprint: state.kernel_fingerprint.clone(),
        torsion_residues: torsion,
        free_coords: state.free_coords.iter().map(|v| v.to_string()).collect(),
    };
    serde_json::to_string_pretty(&file).map_err(|e| Error::Malformed(e.to_string()))
}

/// Parses and validates a state document against a compiled kernel. A
/// tampered fingerprint or out-of-range residue is rejected.
pub fn state_from_json(text: &str, spec: &KernelSpec) -> Result<SketchState> {
    let file: StateFile =
        serde_json::from_str(text).map_err(|e| Error::Malformed(format!("state file: {e}")))?;
    if file.version != STATE_FILE_VERSION {
        return Err(Error::Malformed(format!(
            "unsupported state file version {}",
            file.version
        )));
    }
    let free = file
        .free_coords
        .iter()
        .map(|s| {
            s.parse::<BigInt>()
                .map_err(|_| Error::Malformed(format!("free coordinate {s:?} is not an integer")))
        })
        .collect::<Result<Vec<BigInt>>>()?;
    let state = SketchState {
        kernel_fingerprint: file.kernel_fingerprint,
        torsion_residues: file.torsion_residues.into_iter().map(BigInt::from).collect(),
        free_coords: free,
    };
    spec.check_state(&state)?;
    Ok(state)
}

pub fn read_state_file(path: &std::path::Path, spec: &KernelSpec) -> Result<SketchState> {
    let text = std::fs::read_to_string(path)?;
    state_from_json(&text, spec)
}

pub fn write_state_file(path: &std::path::Path, state: &SketchState) -> Result<()> {
    std::fs::write(path, state_to_json(state)? + "\n")?;
    Ok(())
}

// --- stream file format ------------------------------------------------------

/// Parses the stream text format: one `i,delta` record per line with 1-based
/// `i` and delta in `{1, -1}`; lines beginning with `#` are ignored.
pub fn parse_stream_text(text: &str) -> Result<Vec<StreamRecord>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split(',');
        let (Some(idx), Some(delta), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::Malformed(format!(
                "line {}: expected \"i,delta\"",
                lineno + 1
            )));
        };
        let index: usize = idx
            .trim()
            .parse()
            .map_err(|_| Error::Malformed(format!("line {}: bad index {idx:?}", lineno + 1)))?;
        let delta: i64 = delta
            .trim()
            .parse()
            .map_err(|_| Error::Malformed(format!("line {}: bad delta {delta:?}", lineno + 1)))?;
        out.push(
            StreamRecord::new(index, delta)
                .map_err(|e| Error::Malformed(format!("line {}: {e}", lineno + 1)))?,
        );
    }
    Ok(out)
}

pub fn stream_to_text(records: &[StreamRecord]) -> String {
    let mut s = String::new();
    for r in records {
        s.push_str(&format!("{},{}\n", r.index, r.delta));
    }
    s
}

pub fn read_stream_file(path: &std::path::Path) -> Result<Vec<StreamRecord>> {
    let text = std::fs::read_to_string(path)?;
    parse_stream_text(&text)
}

/// Straight stream realizing a frequency vector: `|f_i|` records of sign
/// `sign(f_i)` per coordinate, in coordinate order.
pub fn stream_for_freq(freq: &[i64]) -> Vec<StreamRecord> {
    let mut out = Vec::new();
    for (i, &f) in freq.iter().enumerate() {
        let delta = if f >= 0 { 1 } else { -1 };
        for _ in 0..f.unsigned_abs() {
            out.push(StreamRecord {
                index: i + 1,
                delta,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intlinalg::vec_from_i64;
    use proptest::prelude::*;

    fn span(n: usize, rows: &[&[i64]]) -> Submodule {
        Submodule::make(n, &IntMatrix::from_i64(rows)).unwrap()
    }

    #[test]
    fn compile_degenerate_kernels() {
        let spec = KernelSpec::compile(&Submodule::zero(2)).unwrap();
        assert_eq!(spec.free_count(), 2);
        assert!(spec.torsion_moduli().is_empty());
        // identity map up to a unimodular change of coordinates: exact freq kept
        let s = spec.residue_i64(&[3, -4]);
        assert_ne!(s, spec.init());

        let spec = KernelSpec::compile(&Submodule::full(3)).unwrap();
        assert_eq!(spec.free_count(), 0);
        assert!(spec.torsion_moduli().is_empty());
        assert_eq!(spec.residue_i64(&[5, -7, 2]), spec.init());
    }

    #[test]
    fn compile_torsion_kernel() {
        let spec = KernelSpec::compile(&span(2, &[&[2, 0], &[0, 3]])).unwrap();
        assert_eq!(spec.torsion_moduli(), vec_from_i64(&[6]));
        assert_eq!(spec.free_count(), 0);
        // kernel equality over a radius-3 box
        for p in box_iter(2, 3) {
            let member = spec.module().member_i64(&p).unwrap();
            assert_eq!(spec.residue_i64(&p) == spec.init(), member, "at {p:?}");
        }
    }

    #[test]
    fn update_cancellation_and_mod_cycle() {
        let spec = KernelSpec::compile(&Submodule::zero(2)).unwrap();
        let s = spec.init();
        let up = spec.update(&s, StreamRecord::new(1, 1).unwrap()).unwrap();
        let back = spec.update(&up, StreamRecord::new(1, -1).unwrap()).unwrap();
        assert_eq!(back, spec.init());

        let spec = KernelSpec::compile(&span(1, &[&[3]])).unwrap();
        let mut s = spec.init();
        for _ in 0..3 {
            s = spec.update(&s, StreamRecord::new(1, 1).unwrap()).unwrap();
        }
        assert_eq!(s, spec.init());
    }

    #[test]
    fn exact_kernel_accumulates() {
        let spec = KernelSpec::compile(&Submodule::zero(3)).unwrap();
        let recs = stream_for_freq(&[2, -1, 0]);
        let s = spec.process_stream(&spec.init(), recs).unwrap();
        assert_eq!(s, spec.residue_i64(&[2, -1, 0]));
    }

    #[test]
    fn merge_requires_matching_fingerprints() {
        let spec_a = KernelSpec::compile(&span(1, &[&[3]])).unwrap();
        let spec_b = KernelSpec::compile(&span(1, &[&[2]])).unwrap();
        let a = spec_a.init();
        let b = spec_b.init();
        assert!(matches!(
            spec_a.merge(&a, &b),
            Err(Error::FingerprintMismatch { .. })
        ));
        assert_eq!(spec_a.merge(&a, &a).unwrap(), spec_a.init());
    }

    #[test]
    fn merge_is_identity_on_init() {
        let spec = KernelSpec::compile(&span(2, &[&[2, 0], &[0, 3]])).unwrap();
        let s = spec.residue_i64(&[1, 1]);
        assert_eq!(spec.merge(&s, &spec.init()).unwrap(), s);
    }

    #[test]
    fn merge_is_commutative_and_associative() {
        let spec = KernelSpec::compile(&span(3, &[&[2, 0, 0], &[0, 3, 3]])).unwrap();
        let a = spec.residue_i64(&[1, -2, 5]);
        let b = spec.residue_i64(&[0, 7, -1]);
        let c = spec.residue_i64(&[-4, 1, 1]);
        assert_eq!(
            spec.merge(&a, &b).unwrap(),
            spec.merge(&b, &a).unwrap()
        );
        assert_eq!(
            spec.merge(&spec.merge(&a, &b).unwrap(), &c).unwrap(),
            spec.merge(&a, &spec.merge(&b, &c).unwrap()).unwrap()
        );
    }

    #[test]
    fn update_rejects_out_of_range_index() {
        let spec = KernelSpec::compile(&Submodule::zero(2)).unwrap();
        let s = spec.init();
        assert!(matches!(
            spec.update(&s, StreamRecord { index: 3, delta: 1 }),
            Err(Error::IndexOutOfRange { index: 3, n: 2 })
        ));
        assert!(StreamRecord::new(0, 1).is_err());
    }

    #[test]
    fn state_file_roundtrip_and_tampering() {
        let spec = KernelSpec::compile(&span(2, &[&[2, 0], &[0, 3]])).unwrap();
        let s = spec.residue_i64(&[1, -1]);
        let json = state_to_json(&s).unwrap();
        assert_eq!(state_from_json(&json, &spec).unwrap(), s);

        let tampered = json.replace(&s.kernel_fingerprint[..8], "deadbeef");
        assert!(matches!(
            state_from_json(&tampered, &spec),
            Err(Error::FingerprintMismatch { .. })
        ));
        assert!(state_from_json("{", &spec).is_err());
    }

    #[test]
    fn stream_text_roundtrip() {
        let text = "# comment\n1,1\n2,-1\n\n1,-1\n";
        let recs = parse_stream_text(text).unwrap();
        assert_eq!(recs.len(), 3);
        assert_eq!(recs[1], StreamRecord::new(2, -1).unwrap());
        let back = stream_to_text(&recs);
        assert_eq!(parse_stream_text(&back).unwrap(), recs);
        assert!(parse_stream_text("1,2\n").is_err());
        assert!(parse_stream_text("0,1\n").is_err());
        assert!(parse_stream_text("1;1\n").is_err());
    }

    #[test]
    fn space_report_examples() {
        let budget = EnumBudget::default();
        let spec = KernelSpec::compile(&Submodule::zero(2)).unwrap();
        let rep = spec.space_report(1, &budget).unwrap();
        assert_eq!(rep.coset_count, 9);
        assert!((rep.coset_count_bits - rep.lower_bound_bits).abs() < 1e-12);

        let spec = KernelSpec::compile(&span(2, &[&[1, 1]])).unwrap();
        let rep = spec.space_report(1, &budget).unwrap();
        assert_eq!(rep.coset_count, 5);
        assert!(rep.coset_count_bits >= rep.lower_bound_bits);

        let spec = KernelSpec::compile(&Submodule::full(2)).unwrap();
        let rep = spec.space_report(1, &budget).unwrap();
        assert_eq!(rep.coset_count, 1);
        assert_eq!(rep.coset_count_bits, 0.0);
        assert_eq!(rep.lower_bound_bits, 0.0);
    }

    #[test]
    fn distinct_cosets_have_distinct_states() {
        // bucketing the box by state must refine exactly to member-equivalence
        let m = span(2, &[&[2, 2]]);
        let spec = KernelSpec::compile(&m).unwrap();
        let pts: Vec<Vec<i64>> = box_iter(2, 2).collect();
        for x in &pts {
            for y in &pts {
                let diff: Vec<BigInt> = x.iter().zip(y).map(|(a, b)| BigInt::from(a - b)).collect();
                let same_coset = m.member(&diff).unwrap();
                let same_state = spec.residue_i64(x) == spec.residue_i64(y);
                assert_eq!(same_coset, same_state, "x={x:?} y={y:?}");
            }
        }
    }

    fn arb_records(n: usize, len: usize) -> impl Strategy<Value = Vec<StreamRecord>> {
        proptest::collection::vec((1..=n, prop_oneof![Just(1i64), Just(-1i64)]), 0..=len)
            .prop_map(|v| {
                v.into_iter()
                    .map(|(i, d)| StreamRecord::new(i, d).unwrap())
                    .collect()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn merge_equals_concatenation(
            recs in arb_records(3, 60),
            split in 0usize..=60,
            seed_rows in proptest::collection::vec(-3i64..=3, 0..=6),
        ) {
            let rows: Vec<Vec<BigInt>> = seed_rows
                .chunks(3)
                .filter(|c| c.len() == 3)
                .map(|c| c.iter().map(|&v| BigInt::from(v)).collect())
                .collect();
            let m = Submodule::from_generator_rows(3, rows).unwrap();
            let spec = KernelSpec::compile(&m).unwrap();
            let cut = split.min(recs.len());
            let s1 = spec.process_stream(&spec.init(), recs[..cut].iter().copied()).unwrap();
            let s2 = spec.process_stream(&spec.init(), recs[cut..].iter().copied()).unwrap();
            let whole = spec.process_stream(&spec.init(), recs.iter().copied()).unwrap();
            prop_assert_eq!(spec.merge(&s1, &s2).unwrap(), whole);
        }

        #[test]
        fn state_depends_only_on_frequency(
            recs in arb_records(3, 40),
            perm_seed in 0u64..1000,
        ) {
            let m = span(3, &[&[2, 0, 0], &[0, 3, 3]]);
            let spec = KernelSpec::compile(&m).unwrap();
            let direct = spec.process_stream(&spec.init(), recs.iter().copied()).unwrap();
            // deterministic shuffle
            let mut shuffled = recs.clone();
            let mut state = perm_seed.wrapping_add(0x9e3779b97f4a7c15);
            for i in (1..shuffled.len()).rev() {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                let j = (state % (i as u64 + 1)) as usize;
                shuffled.swap(i, j);
            }
            let permuted = spec.process_stream(&spec.init(), shuffled.into_iter()).unwrap();
            prop_assert_eq!(direct, permuted);
        }

        #[test]
        fn stream_then_inverse_returns_to_init(recs in arb_records(2, 30)) {
            let m = span(2, &[&[4, 2]]);
            let spec = KernelSpec::compile(&m).unwrap();
            let mut whole = recs.clone();
            whole.extend(recs.iter().rev().map(|r| StreamRecord {
                index: r.index,
                delta: -r.delta,
            }));
            let s = spec.process_stream(&spec.init(), whole.into_iter()).unwrap();
            prop_assert_eq!(s, spec.init());
        }

        #[test]
        fn state_json_roundtrips(freq in proptest::collection::vec(-20i64..=20, 3)) {
            let m = span(3, &[&[2, 1, 0]]);
            let spec = KernelSpec::compile(&m).unwrap();
            let s = spec.residue_i64(&freq);
            let back = state_from_json(&state_to_json(&s).unwrap(), &spec).unwrap();
            prop_assert_eq!(back, s);
        }
    }
}
