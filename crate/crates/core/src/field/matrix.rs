//! Small dense matrices over GF(q) and Gaussian elimination.
//!
//! Pivoting takes the first nonzero entry in each column, scanning columns
//! left to right, so every routine here is deterministic.

use super::{Field, FieldElement};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldMatrix {
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl FieldMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for k in 0..n {
            m.set(k, k, 1);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<FieldElement>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows<R: AsRef<[FieldElement]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.as_ref().len() != cols {
                return Err(Error::Shape("ragged rows".into()));
            }
            data.extend_from_slice(r.as_ref());
        }
        Ok(Self { rows: rows.len(), cols, data })
    }

    /// Builds a matrix from column vectors.
    pub fn from_columns<C: AsRef<[FieldElement]>>(cols: &[C]) -> Result<Self> {
        let rows = cols.first().map_or(0, |c| c.as_ref().len());
        let mut m = Self::zeros(rows, cols.len());
        for (c, col) in cols.iter().enumerate() {
            if col.as_ref().len() != rows {
                return Err(Error::Shape("ragged columns".into()));
            }
            for (r, &v) in col.as_ref().iter().enumerate() {
                m.set(r, c, v);
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[FieldElement] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> FieldElement {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: FieldElement) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[FieldElement] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [FieldElement] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<FieldElement> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut out = Self::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (k, &c) in cols.iter().enumerate() {
                out.set(r, k, self.get(r, c));
            }
        }
        out
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &r in rows {
            data.extend_from_slice(self.row(r));
        }
        Self { rows: rows.len(), cols: self.cols, data }
    }

    /// Appends the rows of `other` below `self`.
    pub fn stack(&mut self, other: &FieldMatrix) -> Result<()> {
        if self.rows == 0 && self.cols == 0 {
            *self = other.clone();
            return Ok(());
        }
        if other.cols != self.cols {
            return Err(Error::Shape(format!("stacking {} onto {} columns", other.cols, self.cols)));
        }
        self.data.extend_from_slice(&other.data);
        self.rows += other.rows;
        Ok(())
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }

    /// `self · x`.
    pub fn mul_vec(&self, field: &Field, x: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if x.len() != self.cols {
            return Err(Error::Shape(format!("vector of length {} for {} columns", x.len(), self.cols)));
        }
        Ok((0..self.rows).map(|r| field.sum(self.row(r).iter().zip(x).map(|(&a, &b)| field.mul(a, b)))).collect())
    }

    /// `u · self` for a row vector `u`.
    pub fn vec_mul(&self, field: &Field, u: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if u.len() != self.rows {
            return Err(Error::Shape(format!("vector of length {} for {} rows", u.len(), self.rows)));
        }
        let mut out = vec![0; self.cols];
        for (r, &c) in u.iter().enumerate() {
            field.axpy(&mut out, c, self.row(r));
        }
        Ok(out)
    }

    pub fn rank(&self, field: &Field) -> usize {
        let mut work = self.clone();
        work.reduce(field, None).len()
    }

    /// Basis of `{x : self · x = 0}` as the rows of the returned matrix.
    pub fn null_space(&self, field: &Field) -> FieldMatrix {
        let mut work = self.clone();
        let pivots = work.reduce(field, None);
        let mut is_pivot = vec![false; self.cols];
        for &(_, c) in &pivots {
            is_pivot[c] = true;
        }
        let free: Vec<usize> = (0..self.cols).filter(|&c| !is_pivot[c]).collect();
        let mut out = FieldMatrix::zeros(free.len(), self.cols);
        for (k, &fc) in free.iter().enumerate() {
            out.set(k, fc, 1);
            for &(r, pc) in &pivots {
                out.set(k, pc, field.neg(work.get(r, fc)));
            }
        }
        out
    }

    /// In-place reduction to reduced row echelon form. Row operations are
    /// mirrored onto `track` when given. Returns `(row, column)` of each pivot.
    fn reduce(&mut self, field: &Field, mut track: Option<&mut FieldMatrix>) -> Vec<(usize, usize)> {
        let mut pivots = Vec::new();
        let mut next = 0;
        for c in 0..self.cols {
            if next == self.rows {
                break;
            }
            let Some(p) = (next..self.rows).find(|&r| self.get(r, c) != 0) else {
                continue;
            };
            if p != next {
                self.swap_rows(p, next);
                if let Some(t) = track.as_deref_mut() {
                    t.swap_rows(p, next);
                }
            }
            let inv = field.inv(self.get(next, c)).expect("pivot is nonzero");
            self.scale_row(field, next, inv);
            if let Some(t) = track.as_deref_mut() {
                t.scale_row(field, next, inv);
            }
            for r in 0..self.rows {
                let f = self.get(r, c);
                if r != next && f != 0 {
                    let f = field.neg(f);
                    self.add_row_multiple(field, r, next, f);
                    if let Some(t) = track.as_deref_mut() {
                        t.add_row_multiple(field, r, next, f);
                    }
                }
            }
            pivots.push((next, c));
            next += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn scale_row(&mut self, field: &Field, r: usize, s: FieldElement) {
        for v in self.row_mut(r) {
            *v = field.mul(*v, s);
        }
    }

    /// row[dst] += f * row[src]
    fn add_row_multiple(&mut self, field: &Field, dst: usize, src: usize, f: FieldElement) {
        let cols = self.cols;
        let (lo, hi) = self.data.split_at_mut(dst.max(src) * cols);
        let (d, s) = if dst < src {
            (&mut lo[dst * cols..(dst + 1) * cols], &hi[..cols])
        } else {
            (&mut hi[..cols], &lo[src * cols..(src + 1) * cols])
        };
        field.axpy(d, f, s);
    }
}

/// A factored linear system `A x = b`, reusable across right-hand sides.
#[derive(Clone, Debug)]
pub struct LinearSolver {
    field: Field,
    rows: usize,
    cols: usize,
    /// `transform · A` is the reduced row echelon form of `A`.
    transform: FieldMatrix,
    pivots: Vec<(usize, usize)>,
}

impl LinearSolver {
    pub fn new(field: &Field, a: &FieldMatrix) -> Self {
        let mut work = a.clone();
        let mut transform = FieldMatrix::identity(a.rows);
        let pivots = work.reduce(field, Some(&mut transform));
        Self { field: field.clone(), rows: a.rows, cols: a.cols, transform, pivots }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_unique(&self) -> bool {
        self.rank() == self.cols
    }

    /// The unique solution of `A x = b`. Inconsistency is reported before
    /// rank deficiency.
    pub fn solve(&self, b: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if b.len() != self.rows {
            return Err(Error::Shape(format!("rhs of length {} for {} rows", b.len(), self.rows)));
        }
        let y = self.transform.mul_vec(&self.field, b)?;
        if y[self.rank()..].iter().any(|&v| v != 0) {
            return Err(Error::InconsistentSystem);
        }
        if !self.is_unique() {
            return Err(Error::UnderdeterminedSystem);
        }
        let mut x = vec![0; self.cols];
        for &(r, c) in &self.pivots {
            x[c] = y[r];
        }
        Ok(x)
    }
}

/// Solves `A x = b` for a unique `x`.
pub fn solve(field: &Field, a: &FieldMatrix, b: &[FieldElement]) -> Result<Vec<FieldElement>> {
    LinearSolver::new(field, a).solve(b)
}

/// The `r × len(points)` matrix with entry `(t, l) = points[l]^t`.
pub fn vandermonde_parity(field: &Field, points: &[FieldElement], r: usize) -> Result<FieldMatrix> {
    if r == 0 {
        return Err(Error::Shape("vandermonde with zero rows".into()));
    }
    let mut seen = std::collections::HashSet::new();
    for &p in points {
        field.check(p)?;
        if p == 0 || !seen.insert(p) {
            return Err(Error::BadEvaluationPoints);
        }
    }
    let mut m = FieldMatrix::zeros(r, points.len());
    for (l, &p) in points.iter().enumerate() {
        let mut v = 1;
        for t in 0..r {
            m.set(t, l, v);
            v = field.mul(v, p);
        }
    }
    Ok(m)
}

impl Field {
    /// Determinant of the 3×3 matrix with the given columns.
    pub fn det3(&self, a: [FieldElement; 3], b: [FieldElement; 3], c: [FieldElement; 3]) -> FieldElement {
        let m = |x, y| self.mul(x, y);
        let minor = |i: usize, j: usize| self.sub(m(b[i], c[j]), m(b[j], c[i]));
        let t0 = m(a[0], minor(1, 2));
        let t1 = m(a[1], minor(0, 2));
        let t2 = m(a[2], minor(0, 1));
        self.add(self.sub(t0, t1), t2)
    }
}
