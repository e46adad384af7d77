//! Exact linear algebra on sparse matrices.
//!
//! Elimination always pivots on the lowest column index, breaking ties by the
//! lowest row index, so kernels, solutions and complements are reproducible.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub type SparseRow = BTreeMap<usize, Scalar>;

/// A sparse matrix; only nonzero entries are stored.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), Scalar>,
}

impl Matrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, entries: BTreeMap::new() }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Scalar>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Matrix::zero(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged matrix rows");
            for (c, v) in row.iter().enumerate() {
                m.set(r, c, v.clone());
            }
        }
        m
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let rows: Vec<Vec<Scalar>> = rows.iter().map(|r| r.iter().map(|&x| Scalar::from_i64(x)).collect()).collect();
        Matrix::from_rows(&rows)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        assert!(r < self.rows && c < self.cols, "entry ({r},{c}) out of bounds");
        if v.is_zero() {
            self.entries.remove(&(r, c));
        } else {
            self.entries.insert((r, c), v);
        }
    }

    pub fn add_to(&mut self, r: usize, c: usize, v: &Scalar) {
        let cur = self.get(r, c);
        self.set(r, c, cur + v);
    }

    pub fn get(&self, r: usize, c: usize) -> Scalar {
        self.entries.get(&(r, c)).cloned().unwrap_or_default()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &Scalar)> {
        self.entries.iter()
    }

    pub fn mul_vec(&self, x: &[Scalar]) -> Result<Vec<Scalar>> {
        if x.len() != self.cols {
            return Err(Error::Dimension(format!("{}x{} matrix times vector of length {}", self.rows, self.cols, x.len())));
        }
        let mut out = vec![Scalar::zero(); self.rows];
        for (&(r, c), v) in &self.entries {
            if !x[c].is_zero() {
                out[r] += &(v * &x[c]);
            }
        }
        Ok(out)
    }

    /// `y · A` for a row vector `y`.
    pub fn left_mul(&self, y: &[Scalar]) -> Result<Vec<Scalar>> {
        if y.len() != self.rows {
            return Err(Error::Dimension(format!("row vector of length {} times {}x{} matrix", y.len(), self.rows, self.cols)));
        }
        let mut out = vec![Scalar::zero(); self.cols];
        for (&(r, c), v) in &self.entries {
            if !y[r].is_zero() {
                out[c] += &(&y[r] * v);
            }
        }
        Ok(out)
    }

    fn sparse_rows(&self) -> Vec<SparseRow> {
        let mut rows = vec![SparseRow::new(); self.rows];
        for (&(r, c), v) in &self.entries {
            rows[r].insert(c, v.clone());
        }
        rows
    }

    pub fn rank(&self) -> usize {
        let mut rows = self.sparse_rows();
        reduce_rows(&mut rows, self.cols).len()
    }
}

/// Row-reduces in place over the first `pivot_cols` columns and returns the
/// pivot columns; afterwards row `i` holds the pivot for `pivots[i]`.
fn reduce_rows(rows: &mut Vec<SparseRow>, pivot_cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..pivot_cols {
        if next >= rows.len() {
            break;
        }
        let Some(found) = (next..rows.len()).find(|&r| rows[r].contains_key(&col)) else {
            continue;
        };
        rows.swap(next, found);
        let inv = rows[next][&col].inv().expect("pivot is nonzero");
        for v in rows[next].values_mut() {
            *v = &*v * &inv;
        }
        let pivot_row = rows[next].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == next {
                continue;
            }
            if let Some(factor) = row.get(&col).cloned() {
                axpy(row, &-factor, &pivot_row);
            }
        }
        pivots.push(col);
        next += 1;
    }
    pivots
}

/// `row += factor * other`, dropping cancelled entries.
pub(crate) fn axpy(row: &mut SparseRow, factor: &Scalar, other: &SparseRow) {
    for (c, v) in other {
        let delta = factor * v;
        match row.get_mut(c) {
            Some(cur) => {
                *cur += &delta;
                if cur.is_zero() {
                    row.remove(c);
                }
            }
            None => {
                if !delta.is_zero() {
                    row.insert(*c, delta);
                }
            }
        }
    }
}

/// Outcome of [`solve_linear`].
#[derive(Debug, Clone, PartialEq)]
pub enum Solution {
    /// The pivot-canonical solution (free variables set to zero).
    Solved(Vec<Scalar>),
    /// A row vector `y` with `y·A = 0` and `y·b ≠ 0`.
    Inconsistent(Vec<Scalar>),
}

pub fn solve_linear(a: &Matrix, b: &[Scalar]) -> Result<Solution> {
    if b.len() != a.rows {
        return Err(Error::Dimension(format!("{}x{} system with right-hand side of length {}", a.rows, a.cols, b.len())));
    }
    // [A | b | I], the identity block records the row combinations.
    let n = a.cols;
    let mut rows = a.sparse_rows();
    for (r, row) in rows.iter_mut().enumerate() {
        if !b[r].is_zero() {
            row.insert(n, b[r].clone());
        }
        row.insert(n + 1 + r, Scalar::one());
    }
    let pivots = reduce_rows(&mut rows, n);
    for row in &rows[pivots.len()..] {
        if let Some(rhs) = row.get(&n) {
            debug_assert!(!rhs.is_zero());
            let mut y = vec![Scalar::zero(); a.rows];
            for (c, v) in row.range(n + 1..) {
                y[c - n - 1] = v.clone();
            }
            return Ok(Solution::Inconsistent(y));
        }
    }
    let mut x = vec![Scalar::zero(); n];
    for (i, &p) in pivots.iter().enumerate() {
        if let Some(v) = rows[i].get(&n) {
            x[p] = v.clone();
        }
    }
    Ok(Solution::Solved(x))
}

/// A basis of `ker A`: one vector per free column, with that column set to 1.
pub fn kernel_basis(a: &Matrix) -> Vec<Vec<Scalar>> {
    let mut rows = a.sparse_rows();
    let pivots = reduce_rows(&mut rows, a.cols);
    let pivot_set: BTreeMap<usize, usize> = pivots.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    (0..a.cols)
        .filter(|c| !pivot_set.contains_key(c))
        .map(|free| {
            let mut v = vec![Scalar::zero(); a.cols];
            v[free] = Scalar::one();
            for (&p, &i) in &pivot_set {
                if let Some(coef) = rows[i].get(&free) {
                    v[p] = -coef;
                }
            }
            v
        })
        .collect()
}

/// Decomposition of a vector against a subspace `W`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuotientCoords {
    /// Ambient indices of the standard vectors spanning the fixed complement.
    pub complement_basis: Vec<usize>,
    /// Coordinates of the complement part, indexed like `complement_basis`.
    pub coords: Vec<Scalar>,
    /// The complement part as an ambient vector.
    pub complement_part: Vec<Scalar>,
    /// The component lying in `W`.
    pub subspace_part: Vec<Scalar>,
}

/// Splits `v` as (complement part) + (part in `span W`), where the complement
/// is spanned by the standard vectors on the non-pivot columns of `W`'s echelon form.
pub fn quotient_coords(subspace: &[Vec<Scalar>], ambient_dim: usize, v: &[Scalar]) -> Result<QuotientCoords> {
    if v.len() != ambient_dim {
        return Err(Error::Dimension(format!("vector of length {} in ambient dimension {ambient_dim}", v.len())));
    }
    let echelon = Echelon::from_vectors(ambient_dim, subspace)?;
    let complement_part = echelon.reduce(v);
    let subspace_part: Vec<Scalar> = v.iter().zip(&complement_part).map(|(a, b)| a - b).collect();
    let complement_basis: Vec<usize> = (0..ambient_dim).filter(|c| !echelon.is_pivot(*c)).collect();
    let coords = complement_basis.iter().map(|&c| complement_part[c].clone()).collect();
    Ok(QuotientCoords { complement_basis, coords, complement_part, subspace_part })
}

/// A reduced row echelon basis of a subspace, grown one vector at a time.
#[derive(Debug, Clone, Default)]
pub struct Echelon {
    dim: usize,
    rows: Vec<SparseRow>,
    pivots: BTreeMap<usize, usize>,
}

impl Echelon {
    pub fn new(dim: usize) -> Self {
        Echelon { dim, rows: Vec::new(), pivots: BTreeMap::new() }
    }

    pub fn from_vectors(dim: usize, vectors: &[Vec<Scalar>]) -> Result<Self> {
        let mut e = Echelon::new(dim);
        for v in vectors {
            if v.len() != dim {
                return Err(Error::Dimension(format!("vector of length {} in dimension {dim}", v.len())));
            }
            e.insert(v);
        }
        Ok(e)
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.pivots.contains_key(&col)
    }

    fn reduce_sparse(&self, mut row: SparseRow) -> SparseRow {
        for (&p, &i) in &self.pivots {
            if let Some(f) = row.get(&p).cloned() {
                axpy(&mut row, &-f, &self.rows[i]);
            }
        }
        row
    }

    /// The remainder of `v` after eliminating every pivot column.
    pub fn reduce(&self, v: &[Scalar]) -> Vec<Scalar> {
        let row = self.reduce_sparse(to_sparse(v));
        to_dense(&row, self.dim)
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        self.reduce_sparse(to_sparse(v)).is_empty()
    }

    /// Adds `v` to the span; returns false when it was already contained.
    pub fn insert(&mut self, v: &[Scalar]) -> bool {
        let row = self.reduce_sparse(to_sparse(v));
        let Some((&p, lead)) = row.iter().next() else {
            return false;
        };
        let inv = lead.inv().expect("nonzero lead");
        let row: SparseRow = row.iter().map(|(c, x)| (*c, x * &inv)).collect();
        for other in &mut self.rows {
            if let Some(f) = other.get(&p).cloned() {
                axpy(other, &-f, &row);
            }
        }
        self.pivots.insert(p, self.rows.len());
        self.rows.push(row);
        true
    }
}

pub(crate) fn to_sparse(v: &[Scalar]) -> SparseRow {
    v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i, x.clone())).collect()
}

pub(crate) fn to_dense(row: &SparseRow, dim: usize) -> Vec<Scalar> {
    let mut out = vec![Scalar::zero(); dim];
    for (c, v) in row {
        out[*c] = v.clone();
    }
    out
}

pub fn is_zero_vec(v: &[Scalar]) -> bool {
    v.iter().all(Scalar::is_zero)
}
