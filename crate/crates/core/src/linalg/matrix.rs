use std::fmt;

use serde::{Deserialize, Serialize};

use super::LinalgError;
use crate::field::PrimeField;

/// Dense row-major matrix over F_p.
///
/// Maps act on column vectors: a `rows x cols` matrix sends `F_p^cols` to
/// `F_p^rows`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl Matrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        Self {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        Self::scalar(field, n, 1)
    }

    pub fn scalar(field: PrimeField, n: usize, s: u32) -> Self {
        let mut m = Self::zeros(field, n, n);
        let s = s % field.p();
        for i in 0..n {
            m.data[i * n + i] = s;
        }
        m
    }

    pub fn diagonal(field: PrimeField, diag: &[u32]) -> Result<Self, LinalgError> {
        let n = diag.len();
        let mut m = Self::zeros(field, n, n);
        for (i, &v) in diag.iter().enumerate() {
            m.set(i, i, v)?;
        }
        Ok(m)
    }

    /// Builds a matrix from explicit rows. `cols` fixes the width when `rows`
    /// is empty.
    pub fn from_rows(field: PrimeField, cols: usize, rows: Vec<Vec<u32>>) -> Result<Self, LinalgError> {
        let n_rows = rows.len();
        let mut data = Vec::with_capacity(n_rows * cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(LinalgError::RaggedRow {
                    row: i,
                    expected: cols,
                    found: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if v >= field.p() {
                    return Err(LinalgError::EntryOutOfRange {
                        row: i,
                        col: j,
                        value: v,
                        p: field.p(),
                    });
                }
            }
            data.extend(row);
        }
        Ok(Self {
            field,
            rows: n_rows,
            cols,
            data,
        })
    }

    pub(crate) fn from_raw(field: PrimeField, rows: usize, cols: usize, data: Vec<u32>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        debug_assert!(data.iter().all(|&v| v < field.p()));
        Self {
            field,
            rows,
            cols,
            data,
        }
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u32) -> Result<(), LinalgError> {
        if r >= self.rows || c >= self.cols {
            return Err(LinalgError::IndexOutOfRange {
                row: r,
                col: c,
                rows: self.rows,
                cols: self.cols,
            });
        }
        if v >= self.field.p() {
            return Err(LinalgError::EntryOutOfRange {
                row: r,
                col: c,
                value: v,
                p: self.field.p(),
            });
        }
        self.data[r * self.cols + c] = v;
        Ok(())
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    fn check_field(&self, other: &Self) -> Result<(), LinalgError> {
        if self.field != other.field {
            return Err(LinalgError::FieldMismatch {
                left: self.field.p(),
                right: other.field.p(),
            });
        }
        Ok(())
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &Self) -> Result<Self, LinalgError> {
        self.check_field(rhs)?;
        if self.cols != rhs.rows {
            return Err(LinalgError::DimensionMismatch {
                op: "mul",
                left: self.cols,
                right: rhs.rows,
            });
        }
        let f = self.field;
        let p = f.p() as u64;
        let mut out = vec![0u32; self.rows * rhs.cols];
        for i in 0..self.rows {
            let lhs_row = self.row(i);
            let out_row = &mut out[i * rhs.cols..(i + 1) * rhs.cols];
            let mut acc = vec![0u64; rhs.cols];
            for (k, &a) in lhs_row.iter().enumerate() {
                if a == 0 {
                    continue;
                }
                for (slot, &b) in acc.iter_mut().zip(rhs.row(k)) {
                    *slot += a as u64 * b as u64;
                }
            }
            for (o, a) in out_row.iter_mut().zip(acc) {
                *o = (a % p) as u32;
            }
        }
        Ok(Self::from_raw(f, self.rows, rhs.cols, out))
    }

    pub fn add(&self, rhs: &Self) -> Result<Self, LinalgError> {
        self.check_field(rhs)?;
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(LinalgError::DimensionMismatch {
                op: "add",
                left: self.rows * self.cols,
                right: rhs.rows * rhs.cols,
            });
        }
        let f = self.field;
        let data = self.data.iter().zip(&rhs.data).map(|(&a, &b)| f.add(a, b)).collect();
        Ok(Self::from_raw(f, self.rows, self.cols, data))
    }

    /// Applies the map to a column vector.
    pub fn apply(&self, v: &[u32]) -> Result<Vec<u32>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch {
                op: "apply",
                left: self.cols,
                right: v.len(),
            });
        }
        let p = self.field.p() as u64;
        Ok((0..self.rows)
            .map(|r| {
                let s: u64 = self.row(r).iter().zip(v).map(|(&a, &b)| a as u64 * b as u64).sum();
                (s % p) as u32
            })
            .collect())
    }

    /// Reduced row-echelon form with zero rows dropped.
    pub fn rref(&self) -> Self {
        self.row_reduce().0
    }

    /// Reduced row-echelon form (zero rows dropped) together with pivot columns.
    pub fn row_reduce(&self) -> (Self, Vec<usize>) {
        let f = self.field;
        let cols = self.cols;
        let mut data = self.data.clone();
        let mut pivots = Vec::new();
        let mut pivot_row = 0;
        for c in 0..cols {
            if pivot_row == self.rows {
                break;
            }
            let Some(found) = (pivot_row..self.rows).find(|&r| data[r * cols + c] != 0) else {
                continue;
            };
            if found != pivot_row {
                for k in 0..cols {
                    data.swap(found * cols + k, pivot_row * cols + k);
                }
            }
            let inv = f.inv(data[pivot_row * cols + c]);
            for k in c..cols {
                let idx = pivot_row * cols + k;
                data[idx] = f.mul(data[idx], inv);
            }
            for r in 0..self.rows {
                if r == pivot_row {
                    continue;
                }
                let factor = data[r * cols + c];
                if factor == 0 {
                    continue;
                }
                for k in c..cols {
                    let sub = f.mul(factor, data[pivot_row * cols + k]);
                    let idx = r * cols + k;
                    data[idx] = f.sub(data[idx], sub);
                }
            }
            pivots.push(c);
            pivot_row += 1;
        }
        data.truncate(pivot_row * cols);
        (Self::from_raw(f, pivot_row, cols, data), pivots)
    }

    pub fn rank(&self) -> usize {
        self.row_reduce().1.len()
    }

    /// Basis (as rows) of the null space `{x : self * x = 0}`.
    pub fn null_space(&self) -> Self {
        let f = self.field;
        let (red, pivots) = self.row_reduce();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = Vec::with_capacity(free.len() * self.cols);
        for &fc in &free {
            let mut v = vec![0u32; self.cols];
            v[fc] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(red.get(r, fc));
            }
            out.extend(v);
        }
        Self::from_raw(f, free.len(), self.cols, out)
    }

    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let f = self.field;
        let mut aug = Self::zeros(f, n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.data[r * 2 * n + c] = self.get(r, c);
            }
            aug.data[r * 2 * n + n + r] = 1;
        }
        let (red, pivots) = aug.row_reduce();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Self::zeros(f, n, n);
        for r in 0..n {
            for c in 0..n {
                inv.data[r * n + c] = red.get(r, n + c);
            }
        }
        Some(inv)
    }

    /// Stacks `self` on top of `below`.
    pub fn vstack(&self, below: &Self) -> Result<Self, LinalgError> {
        self.check_field(below)?;
        if self.cols != below.cols {
            return Err(LinalgError::DimensionMismatch {
                op: "vstack",
                left: self.cols,
                right: below.cols,
            });
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&below.data);
        Ok(Self::from_raw(self.field, self.rows + below.rows, self.cols, data))
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix[F_{}; {}x{}]", self.field.p(), self.rows, self.cols)?;
        f.debug_list().entries((0..self.rows).map(|r| self.row(r))).finish()
    }
}

/// JSON form `{"p": .., "ambient": cols, "rows": [[..], ..]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub p: u32,
    pub ambient: usize,
    pub rows: Vec<Vec<u32>>,
}

impl From<&Matrix> for MatrixJson {
    fn from(m: &Matrix) -> Self {
        Self {
            p: m.field.p(),
            ambient: m.cols,
            rows: m.to_rows(),
        }
    }
}

impl TryFrom<MatrixJson> for Matrix {
    type Error = LinalgError;

    fn try_from(j: MatrixJson) -> Result<Self, Self::Error> {
        let field = PrimeField::new(j.p)?;
        Matrix::from_rows(field, j.ambient, j.rows)
    }
}

impl Serialize for Matrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MatrixJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = MatrixJson::deserialize(d)?;
        Matrix::try_from(j).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn m(p: u32, rows: Vec<Vec<u32>>) -> Matrix {
        let cols = rows[0].len();
        Matrix::from_rows(f(p), cols, rows).unwrap()
    }

    #[test]
    fn rref_identity_is_fixed() {
        let id = Matrix::identity(f(2), 2);
        assert_eq!(id.rref(), id);
    }

    #[test]
    fn rref_drops_duplicate_rows() {
        let a = m(2, vec![vec![1, 1], vec![1, 1]]);
        assert_eq!(a.rref(), m(2, vec![vec![1, 1]]));
        assert_eq!(a.rank(), 1);
    }

    #[test]
    fn rref_is_idempotent() {
        let a = m(5, vec![vec![2, 4, 1], vec![3, 1, 0], vec![0, 3, 3]]);
        let once = a.rref();
        assert_eq!(once.rref(), once);
    }

    #[test]
    fn null_space_annihilates() {
        let a = m(3, vec![vec![1, 2, 0, 1], vec![2, 1, 1, 0]]);
        let ns = a.null_space();
        assert_eq!(ns.rows() + a.rank(), 4);
        for r in 0..ns.rows() {
            assert!(a.apply(ns.row(r)).unwrap().iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let a = m(7, vec![vec![1, 2, 3], vec![0, 1, 4], vec![5, 6, 0]]);
        let inv = a.inverse().expect("invertible");
        assert_eq!(a.mul(&inv).unwrap(), Matrix::identity(f(7), 3));
        assert!(m(2, vec![vec![1, 1], vec![1, 1]]).inverse().is_none());
    }

    #[test]
    fn mul_rejects_mismatch() {
        let a = Matrix::zeros(f(3), 2, 3);
        assert!(matches!(a.mul(&a), Err(LinalgError::DimensionMismatch { .. })));
        let b = Matrix::zeros(f(5), 3, 3);
        assert!(matches!(a.mul(&b), Err(LinalgError::FieldMismatch { .. })));
    }

    #[test]
    fn from_rows_validates_entries() {
        assert!(matches!(
            Matrix::from_rows(f(3), 2, vec![vec![0, 3]]),
            Err(LinalgError::EntryOutOfRange { .. })
        ));
        assert!(matches!(
            Matrix::from_rows(f(3), 2, vec![vec![0]]),
            Err(LinalgError::RaggedRow { .. })
        ));
    }
}
