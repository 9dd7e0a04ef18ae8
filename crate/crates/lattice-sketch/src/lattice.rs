//! Submodules of `Z^n` as first-class values: canonicalization, membership,
//! saturation, quotient decomposition, real extension, and box enumeration.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::intlinalg::{self, hnf, integral_kernel, snf, IntMatrix};

/// Environment variable overriding the default enumeration budget.
pub const BUDGET_ENV_VAR: &str = "LATTICE_SKETCH_BUDGET";

/// Default maximum number of points an enumeration may visit.
pub const DEFAULT_ENUM_BUDGET: u64 = 10_000_000;

/// Cap on the number of points a box/coset enumeration may visit.
/// Exceeding it is an explicit refusal, never a silent truncation.
#[derive(Clone, Copy, Debug)]
pub struct EnumBudget {
    max_points: u64,
}

impl EnumBudget {
    pub fn new(max_points: u64) -> Self {
        EnumBudget { max_points }
    }

    /// Default budget, overridable through `LATTICE_SKETCH_BUDGET`.
    pub fn from_env() -> Self {
        match std::env::var(BUDGET_ENV_VAR) {
            Ok(v) => match v.trim().parse::<u64>() {
                Ok(n) if n > 0 => EnumBudget::new(n),
                _ => EnumBudget::new(DEFAULT_ENUM_BUDGET),
            },
            Err(_) => EnumBudget::new(DEFAULT_ENUM_BUDGET),
        }
    }

    pub fn max_points(&self) -> u64 {
        self.max_points
    }

    pub fn check(&self, required: Option<u128>) -> Result<()> {
        match required {
            Some(r) if r <= self.max_points as u128 => Ok(()),
            Some(r) => Err(Error::BudgetExceeded {
                required: r,
                budget: self.max_points,
            }),
            None => Err(Error::BudgetExceeded {
                required: u128::MAX,
                budget: self.max_points,
            }),
        }
    }
}

impl Default for EnumBudget {
    fn default() -> Self {
        EnumBudget::new(DEFAULT_ENUM_BUDGET)
    }
}

/// `(2m+1)^n`, or `None` on overflow.
pub fn box_point_count(n: usize, radius: u32) -> Option<u128> {
    let side = 2u128.checked_mul(radius as u128)?.checked_add(1)?;
    let mut acc: u128 = 1;
    for _ in 0..n {
        acc = acc.checked_mul(side)?;
    }
    Some(acc)
}

/// Lexicographic iterator over `{-m, ..., m}^n`.
pub fn box_iter(n: usize, radius: u32) -> BoxIter {
    BoxIter {
        n,
        radius: radius as i64,
        current: None,
        done: false,
    }
}

pub struct BoxIter {
    n: usize,
    radius: i64,
    current: Option<Vec<i64>>,
    done: bool,
}

impl Iterator for BoxIter {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        if self.done {
            return None;
        }
        match &mut self.current {
            None => {
                let first = vec![-self.radius; self.n];
                self.current = Some(first.clone());
                Some(first)
            }
            Some(v) => {
                // odometer increment, last coordinate fastest
                let mut i = self.n;
                loop {
                    if i == 0 {
                        self.done = true;
                        return None;
                    }
                    i -= 1;
                    if v[i] < self.radius {
                        v[i] += 1;
                        for c in v.iter_mut().skip(i + 1) {
                            *c = -self.radius;
                        }
                        return Some(v.clone());
                    }
                }
            }
        }
    }
}

/// A rank-`r` submodule of `Z^n` held in canonical HNF basis form, so that
/// equality of submodules is equality of fields.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Submodule {
    n: usize,
    basis: IntMatrix,
    fingerprint: String,
}

impl Submodule {
    /// Canonicalizes arbitrary generator rows into a basis. Rank may be lower
    /// than the generator count.
    pub fn make(n: usize, generators: &IntMatrix) -> Result<Self> {
        if generators.cols() != n && generators.rows() > 0 {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: generators.cols(),
            });
        }
        let padded = if generators.rows() == 0 {
            IntMatrix::zero(0, n)
        } else {
            generators.clone()
        };
        let (h, _) = hnf(&padded);
        let kept: Vec<Vec<BigInt>> = (0..h.rows())
            .filter(|&r| !h.is_zero_row(r))
            .map(|r| h.row_vec(r))
            .collect();
        let basis = IntMatrix::from_rows(n, kept)?;
        Ok(Submodule::from_canonical(n, basis))
    }

    pub fn from_generator_rows(n: usize, rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let m = IntMatrix::from_rows(n, rows)?;
        Submodule::make(n, &m)
    }

    fn from_canonical(n: usize, basis: IntMatrix) -> Self {
        let fingerprint = fingerprint_of(n, &basis);
        Submodule {
            n,
            basis,
            fingerprint,
        }
    }

    /// The zero submodule `{0}`.
    pub fn zero(n: usize) -> Self {
        Submodule::from_canonical(n, IntMatrix::zero(0, n))
    }

    /// All of `Z^n`.
    pub fn full(n: usize) -> Self {
        Submodule::from_canonical(n, IntMatrix::identity(n))
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    /// Is `x` an integral combination of the basis rows?
    pub fn member(&self, x: &[BigInt]) -> Result<bool> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        // basis is already in HNF, so plain forward substitution suffices
        Ok(intlinalg::solve_in_hnf(&self.basis, x).is_some())
    }

    pub fn member_i64(&self, x: &[i64]) -> Result<bool> {
        self.member(&intlinalg::vec_from_i64(x))
    }

    /// Smallest submodule containing this one whose quotient is torsion-free:
    /// `{x : a*x in M for some nonzero integer a}`. Equals the intersection of
    /// the real span of the basis with `Z^n`, computed here as a double
    /// integral kernel.
    pub fn saturate(&self) -> Submodule {
        let orth = integral_kernel(&self.basis);
        let sat_basis = integral_kernel(&orth);
        debug_assert_eq!(sat_basis.rows(), self.rank());
        Submodule::from_canonical(self.n, sat_basis)
    }

    /// Invariant factors of `Z^n / M` from the Smith normal form of the basis.
    pub fn quotient_shape(&self) -> QuotientShape {
        let s = snf(&self.basis);
        let torsion: Vec<BigInt> = s
            .invariant_factors
            .iter()
            .filter(|f| !f.is_one())
            .cloned()
            .collect();
        debug_assert!(torsion.iter().all(|f| !f.is_zero()));
        QuotientShape {
            free_rank: self.n - self.rank(),
            torsion,
        }
    }

    /// Orthonormal bases for the real span of the basis (`v2`) and its
    /// orthogonal complement (`v1`).
    pub fn ortho_split(&self) -> OrthoSplit {
        let n = self.n;
        let tolerance = ORTHO_TOLERANCE;
        let mut v2: Vec<Vec<f64>> = Vec::with_capacity(self.rank());
        for r in 0..self.basis.rows() {
            let v: Vec<f64> = self
                .basis
                .row(r)
                .iter()
                .map(|x| x.to_f64().expect("desk-scale entry"))
                .collect();
            let w = orthonormal_residual(&v, &v2);
            let w = w.expect("basis rows are independent over the rationals");
            v2.push(w);
        }
        let mut v1: Vec<Vec<f64>> = Vec::with_capacity(n - self.rank());
        for i in 0..n {
            if v1.len() == n - self.rank() {
                break;
            }
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            let mut against = v2.clone();
            against.extend(v1.iter().cloned());
            if let Some(w) = orthonormal_residual(&e, &against) {
                v1.push(w);
            }
        }
        assert_eq!(v1.len(), n - self.rank(), "complement has rank n - r");
        OrthoSplit { v1, v2, tolerance }
    }
}

/// Fixed floating-point tolerance for orthogonal splits. Desk-scale ambient
/// dimensions keep the Gram-Schmidt conditioning benign.
pub const ORTHO_TOLERANCE: f64 = 1e-9;

/// Projects `v` off the span of `against` (two passes) and normalizes.
/// Returns `None` when the residual is numerically dependent.
fn orthonormal_residual(v: &[f64], against: &[Vec<f64>]) -> Option<Vec<f64>> {
    let mut w = v.to_vec();
    for _ in 0..2 {
        for b in against {
            let d = dot(&w, b);
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi -= d * bi;
            }
        }
    }
    let norm = dot(&w, &w).sqrt();
    let scale = dot(v, v).sqrt().max(1.0);
    if norm <= 1e-7 * scale {
        return None;
    }
    for wi in w.iter_mut() {
        *wi /= norm;
    }
    Some(w)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Shape of the quotient `Z^n / M`: free rank plus the nontrivial invariant
/// factors (a divisibility chain; factors equal to 1 are dropped).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientShape {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

/// Orthonormal column bases `v1` (spanning the complement of the real span of
/// `M`) and `v2` (spanning the real span itself).
#[derive(Clone, Debug)]
pub struct OrthoSplit {
    pub v1: Vec<Vec<f64>>,
    pub v2: Vec<Vec<f64>>,
    pub tolerance: f64,
}

impl OrthoSplit {
    pub fn ambient_dim(&self) -> usize {
        self.v1
            .first()
            .or_else(|| self.v2.first())
            .map_or(0, |c| c.len())
    }

    /// `P * x` where `P` projects onto the span of `cols`.
    pub fn project(cols: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        for c in cols {
            let d = dot(c, x);
            for (o, ci) in out.iter_mut().zip(c) {
                *o += d * ci;
            }
        }
        out
    }

    /// Verifies orthonormality, mutual orthogonality, completeness of the
    /// projectors, and containment of the basis rows in `span(v2)`.
    pub fn check_invariants(&self, module: &Submodule) -> std::result::Result<(), String> {
        let tol = self.tolerance;
        let all: Vec<(&str, &Vec<Vec<f64>>)> = vec![("v1", &self.v1), ("v2", &self.v2)];
        for (name, cols) in &all {
            for (i, a) in cols.iter().enumerate() {
                for (j, b) in cols.iter().enumerate() {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    let d = dot(a, b);
                    if (d - expect).abs() > tol {
                        return Err(format!("{name} not orthonormal at ({i},{j}): {d}"));
                    }
                }
            }
        }
        for a in &self.v1 {
            for b in &self.v2 {
                if dot(a, b).abs() > tol {
                    return Err("v1 and v2 are not mutually orthogonal".into());
                }
            }
        }
        let n = module.ambient_dim();
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            let p1 = OrthoSplit::project(&self.v1, &e);
            let p2 = OrthoSplit::project(&self.v2, &e);
            for j in 0..n {
                let expect = if i == j { 1.0 } else { 0.0 };
                if (p1[j] + p2[j] - expect).abs() > tol {
                    return Err(format!("projectors do not sum to identity at ({i},{j})"));
                }
            }
        }
        for r in 0..module.basis().rows() {
            let row: Vec<f64> = module
                .basis()
                .row(r)
                .iter()
                .map(|x| x.to_f64().unwrap())
                .collect();
            let proj = OrthoSplit::project(&self.v2, &row);
            let scale = dot(&row, &row).sqrt().max(1.0);
            for (a, b) in row.iter().zip(&proj) {
                if (a - b).abs() > tol * scale {
                    return Err(format!("basis row {r} is not inside span(v2)"));
                }
            }
        }
        Ok(())
    }
}

/// Exact number of distinct cosets `{x + M : x in Z_m^n}`, by bucketing the
/// box under the kernel's residue map.
pub fn coset_count(module: &Submodule, radius: u32, budget: &EnumBudget) -> Result<u64> {
    let n = module.ambient_dim();
    budget.check(box_point_count(n, radius))?;
    let spec = crate::sketch::KernelSpec::compile(module)?;
    let mut seen = HashSet::new();
    for p in box_iter(n, radius) {
        seen.insert(spec.residue_i64(&p));
    }
    Ok(seen.len() as u64)
}

/// Exactly `M ∩ Z_m^n`, in lexicographic order. Membership is decided by
/// forward substitution against the canonical basis, independent of the
/// residue-map machinery.
pub fn points_in_box(
    module: &Submodule,
    radius: u32,
    budget: &EnumBudget,
) -> Result<Vec<Vec<BigInt>>> {
    let n = module.ambient_dim();
    budget.check(box_point_count(n, radius))?;
    let mut out = Vec::new();
    for p in box_iter(n, radius) {
        if module.member_i64(&p)? {
            out.push(intlinalg::vec_from_i64(&p));
        }
    }
    Ok(out)
}

fn fingerprint_of(n: usize, basis: &IntMatrix) -> String {
    let mut hasher = Sha256::new();
    hasher.update(format!("submodule;n={n};r={};", basis.rows()));
    for r in 0..basis.rows() {
        let row: Vec<String> = basis.row(r).iter().map(|v| v.to_string()).collect();
        hasher.update(row.join(","));
        hasher.update(";");
    }
    hex_string(&hasher.finalize())
}

pub(crate) fn hex_string(bytes: &[u8]) -> String {
    use std::fmt::Write as _;
    let mut s = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        let _ = write!(s, "{b:02x}");
    }
    s
}

// --- kernel file format ------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct KernelFile {
    n: usize,
    basis: Vec<Vec<i64>>,
}

/// Parses the kernel file schema `{"n": int, "basis": [[int, ...], ...]}`.
/// Basis rows need not be canonical; the submodule is canonicalized on load.
pub fn submodule_from_json(text: &str) -> Result<Submodule> {
    let file: KernelFile =
        serde_json::from_str(text).map_err(|e| Error::Malformed(format!("kernel file: {e}")))?;
    let rows: Vec<Vec<BigInt>> = file
        .basis
        .iter()
        .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
        .collect();
    Submodule::from_generator_rows(file.n, rows)
}

/// Serializes a submodule back out in canonical HNF.
pub fn submodule_to_json(module: &Submodule) -> Result<String> {
    let mut basis = Vec::with_capacity(module.rank());
    for r in 0..module.basis().rows() {
        let mut row = Vec::with_capacity(module.ambient_dim());
        for v in module.basis().row(r) {
            let small = v.to_i64().ok_or_else(|| {
                Error::Malformed(format!("basis entry {v} exceeds the kernel file range"))
            })?;
            row.push(small);
        }
        basis.push(row);
    }
    let file = KernelFile {
        n: module.ambient_dim(),
        basis,
    };
    serde_json::to_string_pretty(&file).map_err(|e| Error::Malformed(e.to_string()))
}

pub fn read_kernel_file(path: &std::path::Path) -> Result<Submodule> {
    let text = std::fs::read_to_string(path)?;
    submodule_from_json(&text)
}

pub fn write_kernel_file(path: &std::path::Path, module: &Submodule) -> Result<()> {
    std::fs::write(path, submodule_to_json(module)? + "\n")?;
    Ok(())
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
    fn make_canonicalizes() {
        let m = span(2, &[&[2, 4], &[6, 8]]);
        assert_eq!(m.basis(), &IntMatrix::from_i64(&[&[2, 0], &[0, 4]]));
        assert_eq!(m.rank(), 2);
        let dependent = span(2, &[&[1, 1], &[2, 2]]);
        assert_eq!(dependent.basis(), &IntMatrix::from_i64(&[&[1, 1]]));
        assert_eq!(dependent.rank(), 1);
        assert_eq!(Submodule::zero(3).rank(), 0);
    }

    #[test]
    fn membership() {
        let m = span(2, &[&[1, 1]]);
        assert!(m.member(&vec_from_i64(&[0, 0])).unwrap());
        assert!(m.member(&vec_from_i64(&[2, 2])).unwrap());
        assert!(!m.member(&vec_from_i64(&[1, 2])).unwrap());
        assert!(m.member(&vec_from_i64(&[1])).is_err());
        assert!(!Submodule::zero(2).member(&vec_from_i64(&[0, 1])).unwrap());
        assert!(Submodule::zero(2).member(&vec_from_i64(&[0, 0])).unwrap());
    }

    #[test]
    fn saturation_examples() {
        let m = span(2, &[&[2, 2]]);
        assert_eq!(m.saturate(), span(2, &[&[1, 1]]));
        let m = span(2, &[&[2, 0], &[0, 3]]);
        assert_eq!(m.saturate(), Submodule::full(2));
        let m = span(2, &[&[1, 1]]);
        assert_eq!(m.saturate(), m);
        assert_eq!(Submodule::zero(3).saturate(), Submodule::zero(3));
    }

    #[test]
    fn quotient_shapes() {
        let shape = span(2, &[&[2, 0], &[0, 3]]).quotient_shape();
        assert_eq!(shape.free_rank, 0);
        assert_eq!(shape.torsion, vec_from_i64(&[6]));
        let shape = Submodule::zero(3).quotient_shape();
        assert_eq!(shape.free_rank, 3);
        assert!(shape.torsion.is_empty());
        let shape = span(2, &[&[1, 1]]).quotient_shape();
        assert_eq!(shape.free_rank, 1);
        assert!(shape.torsion.is_empty());
    }

    #[test]
    fn ortho_split_line() {
        let m = span(2, &[&[1, 1]]);
        let split = m.ortho_split();
        split.check_invariants(&m).unwrap();
        let s = 1.0 / 2f64.sqrt();
        let v2 = &split.v2[0];
        assert!((v2[0].abs() - s).abs() < 1e-12 && (v2[1].abs() - s).abs() < 1e-12);
        let v1 = &split.v1[0];
        assert!((v1[0] + v1[1]).abs() < 1e-12);
    }

    #[test]
    fn ortho_split_degenerate_cases() {
        let zero = Submodule::zero(3);
        let split = zero.ortho_split();
        assert_eq!(split.v2.len(), 0);
        assert_eq!(split.v1.len(), 3);
        split.check_invariants(&zero).unwrap();
        let full = Submodule::full(3);
        let split = full.ortho_split();
        assert_eq!(split.v2.len(), 3);
        assert_eq!(split.v1.len(), 0);
        split.check_invariants(&full).unwrap();
    }

    #[test]
    fn box_enumeration() {
        let pts: Vec<Vec<i64>> = box_iter(2, 1).collect();
        assert_eq!(pts.len(), 9);
        assert_eq!(pts[0], vec![-1, -1]);
        assert_eq!(pts[8], vec![1, 1]);
        assert_eq!(box_point_count(2, 1), Some(9));
    }

    #[test]
    fn points_in_box_examples() {
        let budget = EnumBudget::default();
        let zero = Submodule::zero(1);
        assert_eq!(
            points_in_box(&zero, 1, &budget).unwrap(),
            vec![vec_from_i64(&[0])]
        );
        let m = span(2, &[&[1, 1]]);
        let pts = points_in_box(&m, 1, &budget).unwrap();
        assert_eq!(
            pts,
            vec![
                vec_from_i64(&[-1, -1]),
                vec_from_i64(&[0, 0]),
                vec_from_i64(&[1, 1])
            ]
        );
        let m = span(2, &[&[2, 2]]);
        assert_eq!(
            points_in_box(&m, 1, &budget).unwrap(),
            vec![vec_from_i64(&[0, 0])]
        );
    }

    #[test]
    fn coset_count_examples() {
        let budget = EnumBudget::default();
        assert_eq!(coset_count(&Submodule::zero(1), 1, &budget).unwrap(), 3);
        let m = span(2, &[&[1, 1]]);
        assert_eq!(coset_count(&m, 1, &budget).unwrap(), 5);
        assert_eq!(coset_count(&Submodule::full(2), 1, &budget).unwrap(), 1);
    }

    #[test]
    fn budget_refusal_is_explicit() {
        let tiny = EnumBudget::new(4);
        let m = span(2, &[&[1, 1]]);
        match coset_count(&m, 1, &tiny) {
            Err(Error::BudgetExceeded { required, budget }) => {
                assert_eq!(required, 9);
                assert_eq!(budget, 4);
            }
            other => panic!("expected budget refusal, got {other:?}"),
        }
    }

    #[test]
    fn kernel_file_roundtrip() {
        let m = span(2, &[&[6, 8], &[2, 4]]);
        let json = submodule_to_json(&m).unwrap();
        let back = submodule_from_json(&json).unwrap();
        assert_eq!(m, back);
        // non-canonical input canonicalizes on load
        let loaded = submodule_from_json(r#"{"n":2,"basis":[[2,4],[6,8]]}"#).unwrap();
        assert_eq!(loaded.basis(), &IntMatrix::from_i64(&[&[2, 0], &[0, 4]]));
        assert!(submodule_from_json("{\"n\": 2}").is_err());
    }

    fn arb_submodule(max_n: usize, max_abs: i64) -> impl Strategy<Value = Submodule> {
        (1..=max_n).prop_flat_map(move |n| {
            (0..=n).prop_flat_map(move |r| {
                proptest::collection::vec(-max_abs..=max_abs, r * n).prop_map(move |data| {
                    let rows: Vec<Vec<BigInt>> = data
                        .chunks(n.max(1))
                        .map(|ch| ch.iter().map(|&v| BigInt::from(v)).collect())
                        .collect();
                    Submodule::from_generator_rows(n, rows).unwrap()
                })
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn saturate_is_idempotent_and_contains(m in arb_submodule(4, 4)) {
            let sat = m.saturate();
            prop_assert_eq!(sat.saturate(), sat.clone());
            prop_assert_eq!(sat.rank(), m.rank());
            for r in 0..m.basis().rows() {
                prop_assert!(sat.member(m.basis().row(r)).unwrap());
            }
            prop_assert!(sat.quotient_shape().torsion.is_empty());
        }

        #[test]
        fn basis_scaling_into_unsaturated(m in arb_submodule(4, 4)) {
            // every saturated basis row has a nonzero multiple inside M:
            // the largest invariant factor of Z^n/M clears all torsion
            let sat = m.saturate();
            let q = m.quotient_shape().torsion.last().cloned()
                .unwrap_or_else(BigInt::one);
            prop_assert!(!q.is_zero());
            for r in 0..sat.basis().rows() {
                let scaled: Vec<BigInt> =
                    sat.basis().row(r).iter().map(|v| v * &q).collect();
                prop_assert!(m.member(&scaled).unwrap());
            }
            // same real span: projectors onto v2 agree
            let (s1, s2) = (m.ortho_split(), sat.ortho_split());
            let n = m.ambient_dim();
            for i in 0..n {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                let p1 = OrthoSplit::project(&s1.v2, &e);
                let p2 = OrthoSplit::project(&s2.v2, &e);
                for (a, b) in p1.iter().zip(&p2) {
                    prop_assert!((a - b).abs() < 1e-9);
                }
            }
        }

        #[test]
        fn member_is_closed_under_group_ops(m in arb_submodule(4, 4)) {
            let budget = EnumBudget::default();
            let pts = points_in_box(&m, 2, &budget).unwrap();
            for x in pts.iter().take(8) {
                let neg: Vec<BigInt> = x.iter().map(|v| -v).collect();
                prop_assert!(m.member(&neg).unwrap());
                for y in pts.iter().take(8) {
                    let sum: Vec<BigInt> =
                        x.iter().zip(y).map(|(a, b)| a + b).collect();
                    prop_assert!(m.member(&sum).unwrap());
                }
            }
        }

        #[test]
        fn coset_count_obeys_rank_bound(m in arb_submodule(3, 3)) {
            let budget = EnumBudget::default();
            let radius = 2u32;
            let count = coset_count(&m, radius, &budget).unwrap() as u128;
            let side = (2 * radius as u128) + 1;
            let lower = side.pow((m.ambient_dim() - m.rank()) as u32);
            prop_assert!(count >= lower);
            // count * (largest coset bucket) >= box size, by pigeonhole
            let spec = crate::sketch::KernelSpec::compile(&m).unwrap();
            let mut buckets: std::collections::HashMap<crate::sketch::SketchState, u128> =
                std::collections::HashMap::new();
            for p in box_iter(m.ambient_dim(), radius) {
                *buckets.entry(spec.residue_i64(&p)).or_insert(0) += 1;
            }
            let max_bucket = buckets.values().copied().max().unwrap_or(0);
            let boxsize = box_point_count(m.ambient_dim(), radius).unwrap();
            prop_assert!(count * max_bucket >= boxsize);
        }

        #[test]
        fn ortho_split_invariants(m in arb_submodule(4, 5)) {
            let split = m.ortho_split();
            prop_assert!(split.check_invariants(&m).is_ok());
        }

        // dual route: the residue-map bucket count must agree with grouping
        // box points by pairwise membership of differences
        #[test]
        fn coset_count_matches_membership_classes(m in arb_submodule(3, 3)) {
            let budget = EnumBudget::default();
            let radius = 1u32;
            let fast = coset_count(&m, radius, &budget).unwrap();
            let pts: Vec<Vec<i64>> = box_iter(m.ambient_dim(), radius).collect();
            let mut reps: Vec<Vec<i64>> = Vec::new();
            'outer: for p in &pts {
                for r in &reps {
                    let diff: Vec<BigInt> =
                        p.iter().zip(r).map(|(a, b)| BigInt::from(a - b)).collect();
                    if m.member(&diff).unwrap() {
                        continue 'outer;
                    }
                }
                reps.push(p.clone());
            }
            prop_assert_eq!(fast, reps.len() as u64);
        }
    }
}
