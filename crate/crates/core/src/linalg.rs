//! Dense exact linear algebra: matrices, reduced echelon forms, kernels,
//! images and echelonized subspaces.
//!
//! A [`Matrix`] with `rows × cols` entries represents a linear map from a
//! `cols`-dimensional space to a `rows`-dimensional one acting on column
//! vectors. Echelon forms always choose the leftmost available pivot column
//! and, among candidate rows, the topmost one, so every basis produced here
//! is reproducible.

use crate::field::Field;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix<F: Field> {
    rows: usize,
    cols: usize,
    data: Vec<Vec<F::Elem>>,
}

impl<F: Field> Matrix<F> {
    pub fn zero(field: &F, rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![vec![field.zero(); cols]; rows],
        }
    }

    pub fn identity(field: &F, n: usize) -> Self {
        let mut m = Self::zero(field, n, n);
        for i in 0..n {
            m.data[i][i] = field.one();
        }
        m
    }

    /// Builds a matrix from rows; all rows must have length `cols`.
    pub fn from_rows(cols: usize, data: Vec<Vec<F::Elem>>) -> Self {
        assert!(data.iter().all(|r| r.len() == cols), "ragged matrix rows");
        Matrix {
            rows: data.len(),
            cols,
            data,
        }
    }

    /// Builds the matrix whose columns are the given vectors (each of length `rows`).
    pub fn from_columns(field: &F, rows: usize, columns: &[Vec<F::Elem>]) -> Self {
        let mut m = Self::zero(field, rows, columns.len());
        for (c, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for (r, x) in col.iter().enumerate() {
                m.data[r][c] = x.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &F::Elem {
        &self.data[r][c]
    }

    pub fn set(&mut self, r: usize, c: usize, x: F::Elem) {
        self.data[r][c] = x;
    }

    pub fn row(&self, r: usize) -> &[F::Elem] {
        &self.data[r]
    }

    pub fn row_vectors(&self) -> &[Vec<F::Elem>] {
        &self.data
    }

    pub fn column(&self, c: usize) -> Vec<F::Elem> {
        self.data.iter().map(|r| r[c].clone()).collect()
    }

    pub fn transpose(&self, field: &F) -> Self {
        let mut t = Self::zero(field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c][r] = self.data[r][c].clone();
            }
        }
        t
    }

    pub fn is_zero(&self, field: &F) -> bool {
        self.data.iter().all(|r| r.iter().all(|x| field.is_zero(x)))
    }

    /// `self * v` for a column vector `v`.
    pub fn apply(&self, field: &F, v: &[F::Elem]) -> Vec<F::Elem> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        let mut out = vec![field.zero(); self.rows];
        for (c, x) in v.iter().enumerate() {
            if field.is_zero(x) {
                continue;
            }
            for r in 0..self.rows {
                let a = &self.data[r][c];
                if !field.is_zero(a) {
                    out[r] = field.add(&out[r], &field.mul(a, x));
                }
            }
        }
        out
    }

    /// Matrix product `self * other` (composition: apply `other` first).
    pub fn mul(&self, field: &F, other: &Matrix<F>) -> Matrix<F> {
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        let mut out = Self::zero(field, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[r][k];
                if field.is_zero(a) {
                    continue;
                }
                let (dst, src) = (&mut out.data[r], &other.data[k]);
                field.axpy(dst, a, src);
            }
        }
        out
    }

    pub fn add_assign(&mut self, field: &F, other: &Matrix<F>) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            field.axpy(a, &field.one(), b);
        }
    }

    pub fn scaled(&self, field: &F, c: &F::Elem) -> Matrix<F> {
        let mut m = self.clone();
        for r in m.data.iter_mut() {
            field.scale(r, c);
        }
        m
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &Matrix<F>) -> Matrix<F> {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Matrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    /// Reduces in place to reduced row echelon form and returns the pivot columns.
    pub fn row_reduce(&mut self, field: &F) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut pivot_row = 0;
        for c in 0..self.cols {
            if pivot_row == self.rows {
                break;
            }
            let Some(r) = (pivot_row..self.rows).find(|&r| !field.is_zero(&self.data[r][c])) else {
                continue;
            };
            self.data.swap(pivot_row, r);
            let inv = field.inv(&self.data[pivot_row][c]);
            field.scale(&mut self.data[pivot_row][c..], &inv);
            let pivot = std::mem::take(&mut self.data[pivot_row]);
            for (i, row) in self.data.iter_mut().enumerate() {
                if i == pivot_row || field.is_zero(&row[c]) {
                    continue;
                }
                let factor = field.neg(&row[c]);
                field.axpy(&mut row[c..], &factor, &pivot[c..]);
            }
            self.data[pivot_row] = pivot;
            pivots.push(c);
            pivot_row += 1;
        }
        pivots
    }

    pub fn rank(&self, field: &F) -> usize {
        if field.characteristic() == 2 {
            return rank_gf2(self.rows, self.cols, |r, c| !field.is_zero(&self.data[r][c]));
        }
        // Fewer rows than columns is cheaper to reduce transposed.
        if self.rows <= self.cols {
            self.clone().row_reduce(field).len()
        } else {
            self.transpose(field).row_reduce(field).len()
        }
    }
}

/// Rank over F_2 by forward elimination on bit-packed rows.
fn rank_gf2(rows: usize, cols: usize, bit: impl Fn(usize, usize) -> bool) -> usize {
    let words = cols.div_ceil(64);
    let mut packed: Vec<Vec<u64>> = (0..rows)
        .map(|r| {
            let mut w = vec![0u64; words];
            for c in 0..cols {
                if bit(r, c) {
                    w[c / 64] |= 1 << (c % 64);
                }
            }
            w
        })
        .collect();
    let mut rank = 0;
    for c in 0..cols {
        let (word, mask) = (c / 64, 1u64 << (c % 64));
        let Some(r) = (rank..rows).find(|&r| packed[r][word] & mask != 0) else {
            continue;
        };
        packed.swap(rank, r);
        let (head, tail) = packed.split_at_mut(rank + 1);
        let pivot = &head[rank];
        for row in tail.iter_mut() {
            if row[word] & mask != 0 {
                for (a, b) in row[word..].iter_mut().zip(&pivot[word..]) {
                    *a ^= b;
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Result of [`rank_kernel_image`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankKernelImage<E> {
    pub rank: usize,
    /// Basis of the kernel (vectors in the source), one per non-pivot column.
    pub kernel: Vec<Vec<E>>,
    /// Echelonized basis of the column space (vectors in the target).
    pub image: Vec<Vec<E>>,
}

/// Rank, kernel basis and image basis of a matrix, all deterministic.
pub fn rank_kernel_image<F: Field>(field: &F, m: &Matrix<F>) -> RankKernelImage<F::Elem> {
    let kernel = kernel(field, m);
    let mut t = m.transpose(field);
    let pivots = t.row_reduce(field);
    let image = t.data[..pivots.len()].to_vec();
    RankKernelImage {
        rank: pivots.len(),
        kernel,
        image,
    }
}

/// Kernel basis: for each non-pivot column `f` of the reduced form, the vector
/// with a one at `f` solving the system.
pub fn kernel<F: Field>(field: &F, m: &Matrix<F>) -> Vec<Vec<F::Elem>> {
    let mut r = m.clone();
    let pivots = r.row_reduce(field);
    let mut is_pivot = vec![None; m.cols];
    for (i, &c) in pivots.iter().enumerate() {
        is_pivot[c] = Some(i);
    }
    let mut basis = Vec::new();
    for f in 0..m.cols {
        if is_pivot[f].is_some() {
            continue;
        }
        let mut v = vec![field.zero(); m.cols];
        v[f] = field.one();
        for (i, &c) in pivots.iter().enumerate() {
            v[c] = field.neg(&r.data[i][f]);
        }
        basis.push(v);
    }
    basis
}

/// A subspace of `F^n` held as the rows of a reduced row echelon matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace<F: Field> {
    ambient: usize,
    rows: Vec<Vec<F::Elem>>,
    pivots: Vec<usize>,
}

impl<F: Field> Subspace<F> {
    pub fn new(ambient: usize) -> Self {
        Subspace {
            ambient,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn spanned_by(field: &F, ambient: usize, vectors: &[Vec<F::Elem>]) -> Self {
        let mut s = Self::new(ambient);
        for v in vectors {
            s.add_vector(field, v);
        }
        s
    }

    pub fn entire(field: &F, ambient: usize) -> Self {
        let id = Matrix::identity(field, ambient);
        Subspace {
            ambient,
            rows: id.data,
            pivots: (0..ambient).collect(),
        }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[Vec<F::Elem>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Reduces `v` in place against the basis; afterwards `v` has zeros in
    /// all pivot columns.
    pub fn reduce(&self, field: &F, v: &mut [F::Elem]) {
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            if !field.is_zero(&v[c]) {
                let factor = field.neg(&v[c]);
                field.axpy(&mut v[c..], &factor, &row[c..]);
            }
        }
    }

    pub fn contains(&self, field: &F, v: &[F::Elem]) -> bool {
        let mut w = v.to_vec();
        self.reduce(field, &mut w);
        w.iter().all(|x| field.is_zero(x))
    }

    /// Adds `v` to the span. Returns true when the dimension grew.
    pub fn add_vector(&mut self, field: &F, v: &[F::Elem]) -> bool {
        assert_eq!(v.len(), self.ambient, "vector length mismatch");
        let mut w = v.to_vec();
        self.reduce(field, &mut w);
        let Some(c) = w.iter().position(|x| !field.is_zero(x)) else {
            return false;
        };
        let inv = field.inv(&w[c]);
        field.scale(&mut w[c..], &inv);
        for row in self.rows.iter_mut() {
            if !field.is_zero(&row[c]) {
                let factor = field.neg(&row[c]);
                field.axpy(&mut row[c..], &factor, &w[c..]);
            }
        }
        let at = self.pivots.partition_point(|&p| p < c);
        self.pivots.insert(at, c);
        self.rows.insert(at, w);
        true
    }

    /// Coordinates of the complement basis: the non-pivot columns, in order.
    pub fn complement_columns(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.ambient - self.dim());
        let mut it = self.pivots.iter().peekable();
        for c in 0..self.ambient {
            if it.peek() == Some(&&c) {
                it.next();
            } else {
                out.push(c);
            }
        }
        out
    }

    /// Projects `v` to the quotient `F^n / self`, expressed in the
    /// complement-column coordinates.
    pub fn quotient_coordinates(&self, field: &F, v: &[F::Elem]) -> Vec<F::Elem> {
        let mut w = v.to_vec();
        self.reduce(field, &mut w);
        self.complement_columns().into_iter().map(|c| w[c].clone()).collect()
    }

    /// Intersection with another subspace of the same ambient space.
    pub fn intersect(&self, field: &F, other: &Subspace<F>) -> Subspace<F> {
        assert_eq!(self.ambient, other.ambient);
        // Solve a·A = b·B; kernel of the stacked map [A; -B]^T.
        let n = self.dim() + other.dim();
        if self.dim() == 0 || other.dim() == 0 {
            return Subspace::new(self.ambient);
        }
        let mut cols = Vec::with_capacity(n);
        cols.extend(self.rows.iter().cloned());
        for r in &other.rows {
            cols.push(r.iter().map(|x| field.neg(x)).collect());
        }
        let m = Matrix::from_columns(field, self.ambient, &cols);
        let ker = kernel(field, &m);
        let mut out = Subspace::new(self.ambient);
        for k in ker {
            let mut v = vec![field.zero(); self.ambient];
            for (i, row) in self.rows.iter().enumerate() {
                field.axpy(&mut v, &k[i], row);
            }
            out.add_vector(field, &v);
        }
        out
    }
}

/// Dimension of the image of `sub` under `m` modulo `modulo`: the rank of the
/// induced map `sub → target / modulo`.
pub fn induced_rank<F: Field>(field: &F, m: &Matrix<F>, sub: &[Vec<F::Elem>], modulo: &Subspace<F>) -> usize {
    let mut span = modulo.clone();
    let before = span.dim();
    for v in sub {
        span.add_vector(field, &m.apply(field, v));
    }
    span.dim() - before
}
