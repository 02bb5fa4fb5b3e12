//! Dense matrices over a finite field with an exact RREF engine.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{Elem, Field, GfError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatError {
    #[error("operands live over different fields")]
    FieldMismatch,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error(transparent)]
    Gf(#[from] GfError),
}

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    entries: Vec<Elem>,
}

/// Result of row reduction: the reduced matrix, its rank and pivot columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub matrix: Matrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

/// Wire form of a matrix; entries are element codes in row-major order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<u32>,
}

impl Matrix {
    pub fn new(
        field: &Field,
        rows: usize,
        cols: usize,
        entries: Vec<Elem>,
    ) -> Result<Matrix, MatError> {
        if entries.len() != rows * cols {
            return Err(MatError::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        if let Some(bad) = entries.iter().find(|e| e.code() >= field.q()) {
            return Err(GfError::OutOfRange {
                code: bad.code() as u64,
                q: field.q(),
            }
            .into());
        }
        Ok(Matrix {
            field: field.clone(),
            rows,
            cols,
            entries,
        })
    }

    pub fn from_codes(
        field: &Field,
        rows: usize,
        cols: usize,
        codes: &[u32],
    ) -> Result<Matrix, MatError> {
        let entries = codes
            .iter()
            .map(|&c| field.elem(c as u64))
            .collect::<Result<Vec<_>, _>>()?;
        Matrix::new(field, rows, cols, entries)
    }

    /// Builds a matrix from equal-length rows; `cols` fixes the width when `rows` is empty.
    pub fn from_rows(field: &Field, cols: usize, rows: &[Vec<Elem>]) -> Result<Matrix, MatError> {
        if let Some(r) = rows.iter().find(|r| r.len() != cols) {
            return Err(MatError::Dimension(format!(
                "row of length {} in a {cols}-column matrix",
                r.len()
            )));
        }
        Matrix::new(field, rows.len(), cols, rows.concat())
    }

    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Matrix {
        Matrix {
            field: field.clone(),
            rows,
            cols,
            entries: vec![Elem::ZERO; rows * cols],
        }
    }

    pub fn identity(field: &Field, n: usize) -> Matrix {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.entries[i * n + i] = Elem::ONE;
        }
        m
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Elem] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Elem {
        self.entries[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Elem) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Elem] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Elem>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn column(&self, c: usize) -> Vec<Elem> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(&self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn mul(&self, rhs: &Matrix) -> Result<Matrix, MatError> {
        self.same_field(rhs)?;
        if self.cols != rhs.rows {
            return Err(MatError::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let f = &self.field;
        let mut out = Matrix::zeros(f, self.rows, rhs.cols);
        for r in 0..self.rows {
            for c in 0..rhs.cols {
                let mut acc = Elem::ZERO;
                for t in 0..self.cols {
                    acc = f.add(acc, f.mul(self.get(r, t), rhs.get(t, c)));
                }
                out.set(r, c, acc);
            }
        }
        Ok(out)
    }

    /// `M v` for a column vector `v`.
    pub fn mul_vec(&self, v: &[Elem]) -> Result<Vec<Elem>, MatError> {
        if v.len() != self.cols {
            return Err(MatError::Dimension(format!(
                "vector of length {} for {} columns",
                v.len(),
                self.cols
            )));
        }
        let f = &self.field;
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(Elem::ZERO, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
            })
            .collect())
    }

    /// Vertical concatenation.
    pub fn vstack(&self, other: &Matrix) -> Result<Matrix, MatError> {
        self.same_field(other)?;
        if self.cols != other.cols {
            return Err(MatError::Dimension(format!(
                "stacking {} and {} columns",
                self.cols, other.cols
            )));
        }
        let mut entries = Vec::with_capacity(self.entries.len() + other.entries.len());
        entries.extend_from_slice(&self.entries);
        entries.extend_from_slice(&other.entries);
        Ok(Matrix {
            field: self.field.clone(),
            rows: self.rows + other.rows,
            cols: self.cols,
            entries,
        })
    }

    pub fn rref(&self) -> Rref {
        let mut matrix = self.clone();
        let pivots = rref_in_place(&self.field, &mut matrix.entries, self.rows, self.cols);
        Rref {
            rank: pivots.len(),
            matrix,
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        let mut scratch = self.entries.clone();
        rref_in_place(&self.field, &mut scratch, self.rows, self.cols).len()
    }

    /// Rows spanning the right null space, returned in canonical RREF form.
    pub fn kernel_basis(&self) -> Matrix {
        let Rref {
            matrix: r, pivots, ..
        } = self.rref();
        let f = &self.field;
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut rows = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![Elem::ZERO; self.cols];
            v[free] = Elem::ONE;
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = f.neg(r.get(i, free));
            }
            rows.push(v);
        }
        let k = Matrix::from_rows(f, self.cols, &rows).expect("kernel rows have full width");
        let reduced = k.rref();
        reduced.matrix.take_rows(reduced.rank)
    }

    /// The first `n` rows.
    pub fn take_rows(&self, n: usize) -> Matrix {
        let n = n.min(self.rows);
        Matrix {
            field: self.field.clone(),
            rows: n,
            cols: self.cols,
            entries: self.entries[..n * self.cols].to_vec(),
        }
    }

    pub fn to_json(&self) -> MatrixJson {
        MatrixJson {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e.code()).collect(),
        }
    }

    pub fn from_json(field: &Field, json: &MatrixJson) -> Result<Matrix, MatError> {
        Matrix::from_codes(field, json.rows, json.cols, &json.entries)
    }

    fn same_field(&self, other: &Matrix) -> Result<(), MatError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(MatError::FieldMismatch)
        }
    }
}

impl std::fmt::Debug for Matrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Matrix[{}x{} over GF({})]",
            self.rows,
            self.cols,
            self.field.q()
        )?;
        let mut list = f.debug_list();
        for r in 0..self.rows {
            list.entry(&self.row(r).iter().map(|e| e.code()).collect::<Vec<_>>());
        }
        list.finish()
    }
}

/// Rank of the vertical concatenation of `a` and `b`.
pub fn rank_of_stack(a: &Matrix, b: &Matrix) -> Result<usize, MatError> {
    Ok(a.vstack(b)?.rank())
}

/// Gauss-Jordan elimination on a row-major buffer. Returns the pivot columns.
pub(crate) fn rref_in_place(f: &Field, m: &mut [Elem], rows: usize, cols: usize) -> Vec<usize> {
    let mut pivots = Vec::with_capacity(rows.min(cols));
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(src) = (r..rows).find(|&i| !m[i * cols + c].is_zero()) else {
            continue;
        };
        if src != r {
            for j in 0..cols {
                m.swap(src * cols + j, r * cols + j);
            }
        }
        let inv = f.inv(m[r * cols + c]).expect("pivot is nonzero");
        for j in c..cols {
            m[r * cols + j] = f.mul(m[r * cols + j], inv);
        }
        for i in 0..rows {
            if i == r {
                continue;
            }
            let factor = m[i * cols + c];
            if factor.is_zero() {
                continue;
            }
            let nf = f.neg(factor);
            for j in c..cols {
                let t = f.mul(nf, m[r * cols + j]);
                m[i * cols + j] = f.add(m[i * cols + j], t);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5() -> Field {
        Field::new(5, 1).unwrap()
    }

    fn vandermonde(f: &Field, nodes: &[i64], powers: usize) -> Matrix {
        let rows: Vec<Vec<Elem>> = nodes
            .iter()
            .map(|&t| {
                (0..powers)
                    .map(|e| f.pow(f.from_int(t), e as u64))
                    .collect()
            })
            .collect();
        Matrix::from_rows(f, powers, &rows).unwrap()
    }

    #[test]
    fn identity_and_zero_are_fixed_points() {
        let f = f5();
        let id = Matrix::identity(&f, 3).rref();
        assert_eq!(id.matrix, Matrix::identity(&f, 3));
        assert_eq!((id.rank, id.pivots), (3, vec![0, 1, 2]));
        let z = Matrix::zeros(&f, 2, 4).rref();
        assert_eq!(z.matrix, Matrix::zeros(&f, 2, 4));
        assert_eq!(z.rank, 0);
        assert!(z.pivots.is_empty());
    }

    #[test]
    fn vandermonde_on_distinct_nodes_is_invertible() {
        let f = f5();
        let v = vandermonde(&f, &[1, 2, 3], 3);
        assert_eq!(v.rank(), 3);
        let a = vandermonde(&f, &[1, 2], 3);
        let b = vandermonde(&f, &[3], 3);
        assert_eq!(rank_of_stack(&a, &b).unwrap(), 3);
        assert_eq!(rank_of_stack(&a, &a).unwrap(), 2);
    }

    #[test]
    fn kernel_of_all_ones_row() {
        let f = f5();
        let m = Matrix::from_codes(&f, 1, 2, &[1, 1]).unwrap();
        let k = m.kernel_basis();
        assert_eq!(k.to_json().entries, vec![1, 4]);
        assert!(Matrix::identity(&f, 3).kernel_basis().rows() == 0);
    }

    #[test]
    fn disjoint_lines_stack_to_rank_two() {
        let f = Field::new(2, 1).unwrap();
        let a = Matrix::from_codes(&f, 1, 3, &[1, 0, 0]).unwrap();
        let b = Matrix::from_codes(&f, 1, 3, &[0, 1, 1]).unwrap();
        assert_eq!(rank_of_stack(&a, &b).unwrap(), 2);
    }

    #[test]
    fn mismatched_operands_are_rejected() {
        let a = Matrix::zeros(&f5(), 1, 3);
        let b = Matrix::zeros(&Field::new(7, 1).unwrap(), 1, 3);
        assert_eq!(rank_of_stack(&a, &b), Err(MatError::FieldMismatch));
        let c = Matrix::zeros(&f5(), 1, 4);
        assert!(matches!(rank_of_stack(&a, &c), Err(MatError::Dimension(_))));
        assert!(Matrix::from_codes(&f5(), 1, 2, &[1, 5]).is_err());
        assert!(Matrix::from_codes(&f5(), 2, 2, &[1, 2]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let f = f5();
        let m = vandermonde(&f, &[0, 1, 4], 2);
        let json = serde_json::to_string(&m.to_json()).unwrap();
        assert_eq!(json, r#"{"rows":3,"cols":2,"entries":[1,0,1,1,1,4]}"#);
        let back = Matrix::from_json(&f, &serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back, m);
    }
}
