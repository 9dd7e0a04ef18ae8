//! Exact integer matrix algebra: Hermite and Smith normal forms, integral
//! kernels, and integral solvability.
//!
//! All entries are arbitrary-precision integers. Normal-form computations can
//! blow up intermediate entries far past any fixed-width type even for small
//! inputs, and every identity downstream (kernel membership, quotient shapes,
//! coset arithmetic) depends on these results being exact.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Dense row-major matrix over `Z`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zero(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from row vectors. All rows must have length `cols`;
    /// `cols` must be given explicitly so that a zero-row matrix keeps its
    /// ambient width.
    pub fn from_rows(cols: usize, rows: Vec<Vec<BigInt>>) -> Result<Self> {
        for r in &rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    got: r.len(),
                });
            }
        }
        let nrows = rows.len();
        let data = rows.into_iter().flatten().collect();
        Ok(IntMatrix {
            rows: nrows,
            cols,
            data,
        })
    }

    /// Test/fixture helper; panics on ragged input.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let converted = rows
            .iter()
            .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
            .collect();
        IntMatrix::from_rows(cols, converted).expect("ragged rows")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vec(&self, r: usize) -> Vec<BigInt> {
        self.row(r).to_vec()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|r| self.row_vec(r)).collect()
    }

    pub fn is_zero_row(&self, r: usize) -> bool {
        self.row(r).iter().all(|v| v.is_zero())
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zero(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.at(r, c).clone();
            }
        }
        t
    }

    pub fn mul(&self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape");
        let mut out = IntMatrix::zero(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let t = a * rhs.at(k, j);
                    out.data[i * rhs.cols + j] += t;
                }
            }
        }
        out
    }

    /// `A * x` for a column vector `x`.
    pub fn mul_vec(&self, x: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, x.len(), "matrix-vector shape");
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `x * A` for a row vector `x`.
    pub fn vec_mul(x: &[BigInt], a: &IntMatrix) -> Vec<BigInt> {
        assert_eq!(x.len(), a.rows, "vector-matrix shape");
        let mut out = vec![BigInt::zero(); a.cols];
        for (r, coeff) in x.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            for c in 0..a.cols {
                out[c] += coeff * a.at(r, c);
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let v = std::mem::take(&mut self.data[r * self.cols + c]);
            self.data[r * self.cols + c] = -v;
        }
    }

    /// `row[dst] += k * row[src]`
    fn add_scaled_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for c in 0..self.cols {
            let t = k * self.at(src, c);
            self.data[dst * self.cols + c] += t;
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    /// `col[dst] += k * col[src]`
    fn add_scaled_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for r in 0..self.rows {
            let t = k * self.at(r, src);
            self.data[r * self.cols + dst] += t;
        }
    }

    /// Determinant by fraction-free (Bareiss) elimination. Square only.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a.at(k, k).is_zero() {
                match (k + 1..n).find(|&i| !a.at(i, k).is_zero()) {
                    Some(i) => {
                        a.swap_rows(k, i);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = a.at(i, j) * a.at(k, k) - a.at(i, k) * a.at(k, j);
                    let (q, r) = num.div_rem(&prev);
                    debug_assert!(r.is_zero(), "Bareiss division must be exact");
                    a.set(i, j, q);
                }
                a.set(i, k, BigInt::zero());
            }
            prev = a.at(k, k).clone();
        }
        sign * a.at(n - 1, n - 1).clone()
    }

    pub fn is_unimodular(&self) -> bool {
        self.rows == self.cols && self.det().abs().is_one()
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|v| v.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Smith decomposition `U * A * V = D` with unimodular `U`, `V` and diagonal
/// `D` whose nonzero entries form a divisibility chain (zeros trail).
#[derive(Clone, Debug)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    /// Diagonal of `d`: `min(rows, cols)` nonnegative integers,
    /// `d_i | d_{i+1}` over the nonzero prefix.
    pub invariant_factors: Vec<BigInt>,
}

/// Row-style Hermite normal form.
///
/// Returns `(H, U)` with `U * A = H`, `U` unimodular. Pivots are positive,
/// entries above each pivot are reduced into `[0, pivot)`, zero rows trail.
/// The integer row span of `H` equals that of `A`, and the form is canonical:
/// two matrices span the same submodule iff their HNFs are equal after
/// dropping zero rows.
pub fn hnf(a: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let mut h = a.clone();
    let mut u = IntMatrix::identity(a.rows());
    let rows = a.rows();
    let mut pivot_row = 0;
    for col in 0..a.cols() {
        if pivot_row == rows {
            break;
        }
        // Euclidean elimination below the pivot position.
        loop {
            let best = (pivot_row..rows)
                .filter(|&r| !h.at(r, col).is_zero())
                .min_by_key(|&r| h.at(r, col).abs());
            let Some(best) = best else { break };
            h.swap_rows(pivot_row, best);
            u.swap_rows(pivot_row, best);
            let mut any_left = false;
            for r in pivot_row + 1..rows {
                if h.at(r, col).is_zero() {
                    continue;
                }
                let q = -(h.at(r, col) / h.at(pivot_row, col));
                h.add_scaled_row(r, pivot_row, &q);
                u.add_scaled_row(r, pivot_row, &q);
                if !h.at(r, col).is_zero() {
                    any_left = true;
                }
            }
            if !any_left {
                break;
            }
        }
        if h.at(pivot_row, col).is_zero() {
            continue;
        }
        if h.at(pivot_row, col).is_negative() {
            h.negate_row(pivot_row);
            u.negate_row(pivot_row);
        }
        // Reduce entries above the pivot into [0, pivot).
        for r in 0..pivot_row {
            let q = -h.at(r, col).div_floor(h.at(pivot_row, col));
            h.add_scaled_row(r, pivot_row, &q);
            u.add_scaled_row(r, pivot_row, &q);
        }
        pivot_row += 1;
    }
    (h, u)
}

/// Smith normal form by elementary row/column operations with gcd pivoting.
pub fn snf(a: &IntMatrix) -> SmithDecomposition {
    let rows = a.rows();
    let cols = a.cols();
    let mut d = a.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    let k = rows.min(cols);

    for t in 0..k {
        // Move a smallest-magnitude nonzero entry of the trailing block to (t, t).
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if d.at(i, j).is_zero() {
                    continue;
                }
                let better = match pivot {
                    None => true,
                    Some((pi, pj)) => d.at(i, j).abs() < d.at(pi, pj).abs(),
                };
                if better {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);

        'clear: loop {
            // Clear the pivot column below t.
            let mut col_dirty = true;
            while col_dirty {
                col_dirty = false;
                for i in t + 1..rows {
                    if d.at(i, t).is_zero() {
                        continue;
                    }
                    let q = -(d.at(i, t) / d.at(t, t));
                    d.add_scaled_row(i, t, &q);
                    u.add_scaled_row(i, t, &q);
                    if !d.at(i, t).is_zero() {
                        // Remainder is strictly smaller; promote it to pivot.
                        d.swap_rows(t, i);
                        u.swap_rows(t, i);
                        col_dirty = true;
                    }
                }
            }
            // Clear the pivot row right of t (may dirty the column again).
            let mut row_dirty = true;
            while row_dirty {
                row_dirty = false;
                for j in t + 1..cols {
                    if d.at(t, j).is_zero() {
                        continue;
                    }
                    let q = -(d.at(t, j) / d.at(t, t));
                    d.add_scaled_col(j, t, &q);
                    v.add_scaled_col(j, t, &q);
                    if !d.at(t, j).is_zero() {
                        d.swap_cols(t, j);
                        v.swap_cols(t, j);
                        row_dirty = true;
                    }
                }
            }
            if (t + 1..rows).any(|i| !d.at(i, t).is_zero()) {
                continue 'clear;
            }
            // Pivot must divide every entry of the trailing block for the
            // divisibility chain; if not, fold the offending row in and redo.
            let p = d.at(t, t).clone();
            let offender = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !d.at(i, j).mod_floor(&p).is_zero());
            match offender {
                Some((i, _)) => {
                    let one = BigInt::one();
                    d.add_scaled_row(t, i, &one);
                    u.add_scaled_row(t, i, &one);
                    continue 'clear;
                }
                None => break 'clear,
            }
        }
        if d.at(t, t).is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }

    let invariant_factors = (0..k).map(|i| d.at(i, i).clone()).collect();
    SmithDecomposition {
        u,
        d,
        v,
        invariant_factors,
    }
}

/// Basis of the right kernel `{x in Z^cols : A * x = 0}`, one vector per row,
/// in canonical HNF. The matrix has zero rows when the kernel is trivial.
pub fn integral_kernel(a: &IntMatrix) -> IntMatrix {
    // Zero rows of hnf(A^T) correspond to rows of U spanning the left kernel
    // of A^T, which is the right kernel of A.
    let (h, u) = hnf(&a.transpose());
    let mut ker_rows = Vec::new();
    for r in 0..h.rows() {
        if h.is_zero_row(r) {
            ker_rows.push(u.row_vec(r));
        }
    }
    let raw = IntMatrix::from_rows(a.cols(), ker_rows).expect("kernel rows have width cols");
    let (canon, _) = hnf(&raw);
    let kept: Vec<Vec<BigInt>> = (0..canon.rows())
        .filter(|&r| !canon.is_zero_row(r))
        .map(|r| canon.row_vec(r))
        .collect();
    IntMatrix::from_rows(a.cols(), kept).expect("kernel rows have width cols")
}

/// Solves `c * A = b` over the integers.
///
/// Returns `Ok(Some(c))` when an integral solution exists, `Ok(None)` when
/// none does, and an error when `b` has the wrong length.
pub fn solve_integral(a: &IntMatrix, b: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
    if b.len() != a.cols() {
        return Err(Error::DimensionMismatch {
            expected: a.cols(),
            got: b.len(),
        });
    }
    let (h, u) = hnf(a);
    Ok(solve_in_hnf(&h, b).map(|y| IntMatrix::vec_mul(&y, &u)))
}

/// Forward substitution `y * H = b` for a matrix already in row HNF.
/// Used directly for membership tests against canonical bases.
pub(crate) fn solve_in_hnf(h: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    let mut rem = b.to_vec();
    let mut y = vec![BigInt::zero(); h.rows()];
    for r in 0..h.rows() {
        let Some(pivot_col) = (0..h.cols()).find(|&c| !h.at(r, c).is_zero()) else {
            break; // zero rows trail
        };
        let (q, m) = rem[pivot_col].div_rem(h.at(r, pivot_col));
        if !m.is_zero() {
            return None;
        }
        if !q.is_zero() {
            for c in pivot_col..h.cols() {
                let t = &q * h.at(r, c);
                rem[c] -= t;
            }
        }
        y[r] = q;
    }
    if rem.iter().all(|v| v.is_zero()) {
        Some(y)
    } else {
        None
    }
}

/// Convenience conversion for literals and test fixtures.
pub fn vec_from_i64(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mat(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_i64(rows)
    }

    #[test]
    fn hnf_identity_is_fixed() {
        let a = IntMatrix::identity(2);
        let (h, u) = hnf(&a);
        assert_eq!(h, IntMatrix::identity(2));
        assert_eq!(u, IntMatrix::identity(2));
    }

    #[test]
    fn hnf_small_example() {
        let a = mat(&[&[2, 4], &[6, 8]]);
        let (h, u) = hnf(&a);
        assert_eq!(h, mat(&[&[2, 0], &[0, 4]]));
        assert_eq!(u.mul(&a), h);
        assert!(u.is_unimodular());
    }

    #[test]
    fn hnf_keeps_trailing_zero_row() {
        let a = mat(&[&[0, 0]]);
        let (h, _) = hnf(&a);
        assert_eq!(h, mat(&[&[0, 0]]));
    }

    #[test]
    fn hnf_span_equality_both_ways() {
        let a = mat(&[&[2, 4], &[6, 8]]);
        let (h, _) = hnf(&a);
        for r in 0..a.rows() {
            assert!(solve_integral(&h, a.row(r)).unwrap().is_some());
            assert!(solve_integral(&a, h.row(r)).unwrap().is_some());
        }
    }

    #[test]
    fn snf_identity() {
        let s = snf(&IntMatrix::identity(3));
        assert_eq!(s.d, IntMatrix::identity(3));
        assert_eq!(s.invariant_factors, vec_from_i64(&[1, 1, 1]));
    }

    #[test]
    fn snf_small_examples() {
        let s = snf(&mat(&[&[2, 4], &[6, 8]]));
        assert_eq!(s.invariant_factors, vec_from_i64(&[2, 4]));
        let s = snf(&mat(&[&[2, 0], &[0, 3]]));
        assert_eq!(s.invariant_factors, vec_from_i64(&[1, 6]));
    }

    #[test]
    fn snf_reconstructs() {
        let a = mat(&[&[2, 4], &[6, 8]]);
        let s = snf(&a);
        assert_eq!(s.u.mul(&a).mul(&s.v), s.d);
        assert!(s.u.is_unimodular());
        assert!(s.v.is_unimodular());
    }

    #[test]
    fn kernel_of_sum_functional() {
        let k = integral_kernel(&mat(&[&[1, 1]]));
        assert_eq!(k, mat(&[&[1, -1]]));
        // A*x = 0 for every kernel row, and the row generates all solutions.
        let a = mat(&[&[1, 1]]);
        assert!(a.mul_vec(k.row(0)).iter().all(|v| v.is_zero()));
        assert!(solve_integral(&k, &vec_from_i64(&[2, -2]))
            .unwrap()
            .is_some());
    }

    #[test]
    fn kernel_trivial_and_full() {
        assert_eq!(integral_kernel(&IntMatrix::identity(2)).rows(), 0);
        let k = integral_kernel(&mat(&[&[0, 0]]));
        assert_eq!(k, IntMatrix::identity(2));
    }

    #[test]
    fn solve_examples() {
        let a = mat(&[&[1, 1]]);
        assert_eq!(
            solve_integral(&a, &vec_from_i64(&[2, 2])).unwrap(),
            Some(vec_from_i64(&[2]))
        );
        assert_eq!(solve_integral(&a, &vec_from_i64(&[1, 2])).unwrap(), None);
        assert_eq!(
            solve_integral(&a, &vec_from_i64(&[0, 0])).unwrap(),
            Some(vec_from_i64(&[0]))
        );
        assert!(solve_integral(&a, &vec_from_i64(&[1])).is_err());
    }

    #[test]
    fn det_bareiss() {
        assert_eq!(mat(&[&[2, 4], &[6, 8]]).det(), BigInt::from(-8));
        assert_eq!(mat(&[&[1, 2], &[2, 4]]).det(), BigInt::zero());
        assert_eq!(IntMatrix::identity(4).det(), BigInt::one());
    }

    fn arb_matrix(max_dim: usize, max_abs: i64) -> impl Strategy<Value = IntMatrix> {
        (1..=max_dim, 1..=max_dim).prop_flat_map(move |(r, c)| {
            proptest::collection::vec(-max_abs..=max_abs, r * c).prop_map(move |data| {
                IntMatrix {
                    rows: r,
                    cols: c,
                    data: data.into_iter().map(BigInt::from).collect(),
                }
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn snf_contract_holds(a in arb_matrix(5, 10)) {
            let s = snf(&a);
            prop_assert_eq!(s.u.mul(&a).mul(&s.v), s.d.clone());
            prop_assert!(s.u.is_unimodular());
            prop_assert!(s.v.is_unimodular());
            let nonzero: Vec<&BigInt> =
                s.invariant_factors.iter().filter(|f| !f.is_zero()).collect();
            for w in nonzero.windows(2) {
                prop_assert!(w[1].mod_floor(w[0]).is_zero());
            }
            // zeros trail
            let mut seen_zero = false;
            for f in &s.invariant_factors {
                if f.is_zero() { seen_zero = true; }
                else { prop_assert!(!seen_zero); }
            }
        }

        #[test]
        fn hnf_is_idempotent_and_unimodular(a in arb_matrix(5, 10)) {
            let (h, u) = hnf(&a);
            prop_assert!(u.is_unimodular());
            prop_assert_eq!(u.mul(&a), h.clone());
            let (h2, _) = hnf(&h);
            prop_assert_eq!(h2, h);
        }

        #[test]
        fn hnf_preserves_row_span(a in arb_matrix(4, 8)) {
            let (h, _) = hnf(&a);
            for r in 0..a.rows() {
                prop_assert!(solve_integral(&h, a.row(r)).unwrap().is_some());
                prop_assert!(solve_integral(&a, h.row(r)).unwrap().is_some());
            }
        }

        #[test]
        fn invariant_factor_product_is_abs_det(a in arb_matrix(4, 6)) {
            prop_assume!(a.rows() == a.cols());
            let det = a.det();
            prop_assume!(!det.is_zero());
            let s = snf(&a);
            let prod: BigInt = s.invariant_factors.iter().product();
            prop_assert_eq!(prod, det.abs());
        }

        #[test]
        fn kernel_rows_annihilate(a in arb_matrix(4, 8)) {
            let k = integral_kernel(&a);
            for r in 0..k.rows() {
                prop_assert!(a.mul_vec(k.row(r)).iter().all(|v| v.is_zero()));
            }
            // rank-nullity over Q
            let (h, _) = hnf(&a);
            let rank = (0..h.rows()).filter(|&r| !h.is_zero_row(r)).count();
            prop_assert_eq!(k.rows(), a.cols() - rank);
        }

        #[test]
        fn solve_roundtrip(a in arb_matrix(4, 6), coeffs in proptest::collection::vec(-5i64..=5, 4)) {
            let c: Vec<BigInt> = coeffs.iter().take(a.rows()).map(|&v| BigInt::from(v)).collect();
            prop_assume!(c.len() == a.rows());
            let b = IntMatrix::vec_mul(&c, &a);
            let sol = solve_integral(&a, &b).unwrap();
            prop_assert!(sol.is_some());
            let sol = sol.unwrap();
            prop_assert_eq!(IntMatrix::vec_mul(&sol, &a), b);
        }
    }
}
