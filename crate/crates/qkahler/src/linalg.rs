//! Dense exact linear algebra over the scalar field.
//!
//! Everything here runs fraction-free in spirit but fraction-full in
//! practice: entries are canonical reduced rational functions, pivots are
//! chosen by a sparsity heuristic (fewest nonzero terms) to tame
//! intermediate growth, and every result is exact.  Sizes in this crate stay
//! modest (the largest routine computations are rank sweeps on a few hundred
//! rows), so classical Gaussian elimination (Gauss 1809) is the right tool;
//! no floating point appears anywhere.

use crate::scalar::Scalar;

/// A dense row-major matrix of exact scalars.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    /// The zero matrix of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    /// The identity matrix.
    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for k in 0..n {
            m.set(k, k, Scalar::one());
        }
        m
    }

    /// Builds from rows; all rows must share one length.
    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row);
        }
        Matrix { rows: r, cols: c, data }
    }

    /// Row count.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Column count.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Entry reference.
    pub fn at(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.cols + c]
    }

    /// Sets an entry.
    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        self.data[r * self.cols + c] = v;
    }

    /// One row as a slice.
    pub fn row(&self, r: usize) -> &[Scalar] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// True iff every entry is zero.
    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    /// Matrix sum.
    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    /// Matrix difference.
    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    /// Scales by a scalar.
    pub fn scale(&self, c: &Scalar) -> Matrix {
        let data = self.data.iter().map(|a| a * c).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.at(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    let acc = out.at(r, c) + &(a * b);
                    out.set(r, c, acc);
                }
            }
        }
        out
    }

    /// Applies the matrix to a coordinate vector.
    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.cols, v.len(), "shape mismatch in apply");
        (0..self.rows)
            .map(|r| {
                let mut acc = Scalar::zero();
                for c in 0..self.cols {
                    let a = self.at(r, c);
                    if !a.is_zero() && !v[c].is_zero() {
                        acc = &acc + &(a * &v[c]);
                    }
                }
                acc
            })
            .collect()
    }

    /// Transpose.
    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.at(r, c).clone());
            }
        }
        out
    }

    /// Conjugate transpose (entry-wise `i -> -i`, then transpose).
    pub fn conj_transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.at(r, c).conjugate());
            }
        }
        out
    }

    /// Entry-wise map.
    pub fn map(&self, f: impl Fn(&Scalar) -> Scalar) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Vertical stack `[self; other]`.
    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols, "column mismatch in vstack");
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Matrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    /// Rank by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut acc = RankAccumulator::new(self.cols);
        for r in 0..self.rows {
            acc.offer(self.row(r).to_vec());
        }
        acc.rank()
    }

    /// Basis of the right kernel `{x : self * x = 0}` in reduced echelon
    /// convention (each basis vector has a distinguished free coordinate 1).
    pub fn kernel_basis(&self) -> Vec<Vec<Scalar>> {
        let (reduced, pivots) = self.rref();
        let pivot_cols: Vec<usize> = pivots.clone();
        let is_pivot = |c: usize| pivot_cols.contains(&c);
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if is_pivot(free) {
                continue;
            }
            let mut v = vec![Scalar::zero(); self.cols];
            v[free] = Scalar::one();
            for (row, &pc) in pivot_cols.iter().enumerate() {
                // x_pc = -reduced[row][free] for the unit free coordinate.
                v[pc] = -reduced.at(row, free);
            }
            basis.push(v);
        }
        basis
    }

    /// Reduced row echelon form; returns the nonzero rows and the pivot
    /// column of each.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots: Vec<usize> = Vec::new();
        let mut row = 0usize;
        for col in 0..m.cols {
            // Pick the sparsest nonzero pivot candidate in this column.
            let mut best: Option<(usize, usize)> = None;
            for r in row..m.rows {
                let v = m.at(r, col);
                if v.is_zero() {
                    continue;
                }
                let w = complexity(v);
                if best.map(|(bw, _)| w < bw).unwrap_or(true) {
                    best = Some((w, r));
                }
            }
            let Some((_, pr)) = best else { continue };
            m.swap_rows(row, pr);
            let inv = m.at(row, col).inv().expect("nonzero pivot");
            for c in col..m.cols {
                let v = m.at(row, c) * &inv;
                m.set(row, c, v);
            }
            for r in 0..m.rows {
                if r == row || m.at(r, col).is_zero() {
                    continue;
                }
                let f = m.at(r, col).clone();
                for c in col..m.cols {
                    let v = m.at(r, c) - &(&f * m.at(row, c));
                    m.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
            if row == m.rows {
                break;
            }
        }
        // Trim to the nonzero rows.
        let kept: Vec<Vec<Scalar>> = (0..pivots.len()).map(|r| m.row(r).to_vec()).collect();
        (Matrix::from_rows(kept), pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Determinant by elimination with sparsity-guided pivoting.
    pub fn det(&self) -> Scalar {
        assert_eq!(self.rows, self.cols, "determinant of nonsquare matrix");
        let mut m = self.clone();
        let n = m.rows;
        let mut acc = Scalar::one();
        let mut sign_flip = false;
        for col in 0..n {
            let mut best: Option<(usize, usize)> = None;
            for r in col..n {
                let v = m.at(r, col);
                if v.is_zero() {
                    continue;
                }
                let w = complexity(v);
                if best.map(|(bw, _)| w < bw).unwrap_or(true) {
                    best = Some((w, r));
                }
            }
            let Some((_, pr)) = best else {
                return Scalar::zero();
            };
            if pr != col {
                m.swap_rows(col, pr);
                sign_flip = !sign_flip;
            }
            let pivot = m.at(col, col).clone();
            acc = &acc * &pivot;
            let inv = pivot.inv().expect("nonzero pivot");
            for r in col + 1..n {
                if m.at(r, col).is_zero() {
                    continue;
                }
                let f = m.at(r, col) * &inv;
                for c in col..n {
                    let v = m.at(r, c) - &(&f * m.at(col, c));
                    m.set(r, c, v);
                }
            }
        }
        if sign_flip {
            -&acc
        } else {
            acc
        }
    }

    /// Inverse; `None` when singular.
    pub fn inverse(&self) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols, "inverse of nonsquare matrix");
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.at(r, c).clone());
            }
            aug.set(r, n + r, Scalar::one());
        }
        let (reduced, pivots) = aug.rref();
        if pivots.len() < n || pivots.iter().take(n).enumerate().any(|(k, &p)| p != k) {
            return None;
        }
        let mut out = Matrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                out.set(r, c, reduced.at(r, n + c).clone());
            }
        }
        Some(out)
    }

    /// Solves `self * x = b`; `None` when inconsistent or underdetermined.
    pub fn solve(&self, b: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(self.rows, b.len(), "shape mismatch in solve");
        let mut aug = Matrix::zeros(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.at(r, c).clone());
            }
            aug.set(r, self.cols, b[r].clone());
        }
        let (reduced, pivots) = aug.rref();
        // Inconsistent iff a pivot lands in the augmented column.
        if pivots.contains(&self.cols) {
            return None;
        }
        if pivots.len() < self.cols {
            return None;
        }
        let mut x = vec![Scalar::zero(); self.cols];
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = reduced.at(row, self.cols).clone();
        }
        Some(x)
    }

    /// The commutator `self*other - other*self`.
    pub fn commutator(&self, other: &Matrix) -> Matrix {
        self.mul(other).sub(&other.mul(self))
    }

    /// Kronecker product: `(A kron B)[(a,b),(c,d)] = A[a,c] * B[b,d]` with
    /// row index `a * B.rows + b`, matching the tensor basis order
    /// `x_a (x) y_b  ->  a * dim(Y) + b`.
    pub fn kronecker(&self, other: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.rows * other.rows, self.cols * other.cols);
        for a in 0..self.rows {
            for c in 0..self.cols {
                let v = self.at(a, c);
                if v.is_zero() {
                    continue;
                }
                for b in 0..other.rows {
                    for d in 0..other.cols {
                        let w = other.at(b, d);
                        if w.is_zero() {
                            continue;
                        }
                        out.set(a * other.rows + b, c * other.cols + d, v * w);
                    }
                }
            }
        }
        out
    }

    /// One column as an owned vector.
    pub fn column(&self, c: usize) -> Vec<Scalar> {
        (0..self.rows).map(|r| self.at(r, c).clone()).collect()
    }

    /// Builds from columns; all columns must share one length.
    pub fn from_columns(cols: &[Vec<Scalar>]) -> Matrix {
        let c = cols.len();
        let r = cols.first().map(|x| x.len()).unwrap_or(0);
        let mut m = Matrix::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), r, "ragged columns");
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }
}

/// Basis of the joint kernel of a family of operators on one space.
///
/// An empty family constrains nothing: the result is the standard basis of
/// the whole space, whose dimension must then be supplied.
pub fn joint_kernel(ops: &[Matrix], dim: usize) -> Vec<Vec<Scalar>> {
    let Some(first) = ops.first() else {
        return (0..dim)
            .map(|j| {
                let mut v = vec![Scalar::zero(); dim];
                v[j] = Scalar::one();
                v
            })
            .collect();
    };
    let mut stacked = first.clone();
    for op in &ops[1..] {
        stacked = stacked.vstack(op);
    }
    assert_eq!(stacked.cols(), dim, "operator width disagrees with dim");
    stacked.kernel_basis()
}

/// Pivot preference: fewer nonzero terms first.
fn complexity(s: &Scalar) -> usize {
    s.num().term_count() + s.den().term_count()
}

/// Incremental rank tracker: rows offered one at a time, reduced against the
/// accepted pivot rows.
pub struct RankAccumulator {
    cols: usize,
    /// Accepted rows, each normalized to a unit leading pivot; parallel
    /// vector of pivot columns.
    rows: Vec<Vec<Scalar>>,
    pivots: Vec<usize>,
}

impl RankAccumulator {
    /// Creates an empty accumulator for rows of width `cols`.
    pub fn new(cols: usize) -> Self {
        RankAccumulator { cols, rows: Vec::new(), pivots: Vec::new() }
    }

    /// Offers a row; returns true iff it enlarged the span.
    pub fn offer(&mut self, mut row: Vec<Scalar>) -> bool {
        assert_eq!(row.len(), self.cols, "row width mismatch");
        for (r, &p) in self.rows.iter().zip(self.pivots.iter()) {
            if row[p].is_zero() {
                continue;
            }
            let f = row[p].clone();
            for c in 0..self.cols {
                if !r[c].is_zero() {
                    row[c] = &row[c] - &(&f * &r[c]);
                }
            }
        }
        let Some(pivot) = row.iter().position(|v| !v.is_zero()) else {
            return false;
        };
        let inv = row[pivot].inv().expect("nonzero pivot");
        for v in row.iter_mut() {
            if !v.is_zero() {
                *v = &*v * &inv;
            }
        }
        self.rows.push(row);
        self.pivots.push(pivot);
        true
    }

    /// Current rank.
    pub fn rank(&self) -> usize {
        self.rows.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{balanced_quantum_integer, Scalar};

    fn q() -> Scalar {
        Scalar::q()
    }

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    // ==== Elimination primitives ====

    #[test]
    fn det_of_q_matrix() {
        // det [[q, 1], [1, q^-1]] = 1 - 1 = 0; det [[q, 1], [0, q]] = q^2.
        let m = Matrix::from_rows(vec![
            vec![q(), s(1)],
            vec![s(1), Scalar::q_pow(-1)],
        ]);
        assert!(m.det().is_zero());
        let t = Matrix::from_rows(vec![vec![q(), s(1)], vec![s(0), q()]]);
        assert_eq!(t.det(), Scalar::q_pow(2));
    }

    #[test]
    fn det_vandermonde_exact() {
        // Vandermonde on (1, q, q^2): det = (q-1)(q^2-1)(q^2-q).
        let rows = [Scalar::one(), q(), Scalar::q_pow(2)];
        let m = Matrix::from_rows(
            rows.iter()
                .map(|x| vec![Scalar::one(), x.clone(), x * x])
                .collect(),
        );
        let expect = &(&(&q() - &s(1)) * &(&Scalar::q_pow(2) - &s(1)))
            * &(&Scalar::q_pow(2) - &q());
        assert_eq!(m.det(), expect);
    }

    #[test]
    fn inverse_round_trip() {
        let m = Matrix::from_rows(vec![
            vec![q(), s(1), s(0)],
            vec![s(0), balanced_quantum_integer(2), Scalar::i()],
            vec![s(1), s(0), Scalar::q_pow(-2)],
        ]);
        let inv = m.inverse().expect("invertible");
        assert_eq!(m.mul(&inv), Matrix::identity(3));
        assert_eq!(inv.mul(&m), Matrix::identity(3));
    }

    #[test]
    fn singular_matrix_has_no_inverse() {
        let m = Matrix::from_rows(vec![vec![q(), q()], vec![s(1), s(1)]]);
        assert!(m.inverse().is_none());
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn kernel_matches_rank() {
        // Rank 1 in 3 columns leaves a 2-dimensional kernel, and kernel
        // vectors really annihilate the matrix.
        let m = Matrix::from_rows(vec![
            vec![s(1), q(), Scalar::q_pow(2)],
            vec![q(), Scalar::q_pow(2), Scalar::q_pow(3)],
        ]);
        let k = m.kernel_basis();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(m.apply(v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn solve_round_trip() {
        let m = Matrix::from_rows(vec![
            vec![q(), s(1)],
            vec![s(0), Scalar::q_pow(-1)],
        ]);
        let x = vec![balanced_quantum_integer(3), Scalar::i()];
        let b = m.apply(&x);
        assert_eq!(m.solve(&b), Some(x));
    }

    #[test]
    fn conj_transpose_is_involutive_antihomomorphism() {
        let a = Matrix::from_rows(vec![
            vec![Scalar::i(), q()],
            vec![s(2), &q() + &Scalar::i()],
        ]);
        let b = Matrix::from_rows(vec![vec![s(1), s(0)], vec![Scalar::i(), q()]]);
        assert_eq!(a.conj_transpose().conj_transpose(), a);
        assert_eq!(a.mul(&b).conj_transpose(), b.conj_transpose().mul(&a.conj_transpose()));
    }

    #[test]
    fn rank_accumulator_counts_new_directions() {
        let mut acc = RankAccumulator::new(3);
        assert!(acc.offer(vec![s(1), q(), s(0)]));
        // A scalar multiple adds nothing.
        assert!(!acc.offer(vec![q(), Scalar::q_pow(2), s(0)]));
        assert!(acc.offer(vec![s(0), s(0), Scalar::i()]));
        assert_eq!(acc.rank(), 2);
    }

    #[test]
    fn kronecker_mixed_product_rule() {
        // (A kron B)(C kron D) = AC kron BD.
        let a = Matrix::from_rows(vec![vec![q(), s(1)], vec![s(0), s(2)]]);
        let b = Matrix::from_rows(vec![vec![s(1), Scalar::i()], vec![q(), s(0)]]);
        let c = Matrix::from_rows(vec![vec![s(1), s(0)], vec![s(3), q()]]);
        let d = Matrix::from_rows(vec![vec![s(0), s(1)], vec![s(1), s(1)]]);
        let lhs = a.kronecker(&b).mul(&c.kronecker(&d));
        let rhs = a.mul(&c).kronecker(&b.mul(&d));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn joint_kernel_intersects() {
        // ker(e1-row) = span{e2,e3} meets ker(e2-row) = span{e1,e3} in e3.
        let p1 = Matrix::from_rows(vec![vec![s(1), s(0), s(0)]]);
        let p2 = Matrix::from_rows(vec![vec![s(0), q(), s(0)]]);
        let k = joint_kernel(&[p1, p2], 3);
        assert_eq!(k.len(), 1);
        assert_eq!(k[0], vec![s(0), s(0), s(1)]);
        // Empty family constrains nothing.
        assert_eq!(joint_kernel(&[], 2).len(), 2);
    }
}
