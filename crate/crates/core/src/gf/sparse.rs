use super::{Echelon, FVec, Field, FieldElem};
use crate::error::{shape, Result};

/// Sparse matrix in compressed row form. Entries within a row are sorted by
/// column and never zero.
#[derive(Clone)]
pub struct SpMat {
    field: Field,
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    vals: Vec<FieldElem>,
}

impl std::fmt::Debug for SpMat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "SpMat({}x{} over {:?}, {} nnz)",
            self.rows,
            self.cols,
            self.field,
            self.nnz()
        )
    }
}

impl PartialEq for SpMat {
    fn eq(&self, o: &Self) -> bool {
        self.field == o.field
            && self.rows == o.rows
            && self.cols == o.cols
            && self.row_ptr == o.row_ptr
            && self.col_idx == o.col_idx
            && self.vals == o.vals
    }
}

impl SpMat {
    /// Builds from (row, col, value) triples; duplicates are summed and zeros dropped.
    pub fn from_triplets(
        field: &Field,
        rows: usize,
        cols: usize,
        mut triplets: Vec<(usize, usize, FieldElem)>,
    ) -> Self {
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; rows + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut vals: Vec<FieldElem> = Vec::with_capacity(triplets.len());
        let mut row_of = Vec::with_capacity(triplets.len());
        let mut i = 0;
        while i < triplets.len() {
            let (r, c, mut v) = triplets[i];
            assert!(r < rows && c < cols, "triplet ({r},{c}) outside {rows}x{cols}");
            i += 1;
            while i < triplets.len() && triplets[i].0 == r && triplets[i].1 == c {
                v.0 ^= triplets[i].2 .0;
                i += 1;
            }
            if !v.is_zero() {
                col_idx.push(c as u32);
                vals.push(v);
                row_of.push(r);
            }
        }
        for &r in &row_of {
            row_ptr[r + 1] += 1;
        }
        for r in 0..rows {
            row_ptr[r + 1] += row_ptr[r];
        }
        SpMat {
            field: field.clone(),
            rows,
            cols,
            row_ptr,
            col_idx,
            vals,
        }
    }

    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Self {
        SpMat::from_triplets(field, rows, cols, Vec::new())
    }

    pub fn identity(field: &Field, n: usize) -> Self {
        SpMat::from_triplets(field, n, n, (0..n).map(|i| (i, i, FieldElem::ONE)).collect())
    }

    pub fn from_dense(field: &Field, rows: &[FVec], cols: usize) -> Self {
        let mut t = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "dense row length");
            for (j, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    t.push((i, j, *v));
                }
            }
        }
        SpMat::from_triplets(field, rows.len(), cols, t)
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

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn is_zero(&self) -> bool {
        self.vals.is_empty()
    }

    /// Entries of row i as (column, value).
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, FieldElem)> + '_ {
        let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
        self.col_idx[a..b]
            .iter()
            .zip(&self.vals[a..b])
            .map(|(&c, &v)| (c as usize, v))
    }

    fn row_pairs(&self, i: usize) -> Vec<(u32, FieldElem)> {
        let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
        self.col_idx[a..b]
            .iter()
            .copied()
            .zip(self.vals[a..b].iter().copied())
            .collect()
    }

    /// All entries in sorted (row, col) order.
    pub fn triplets(&self) -> Vec<(usize, usize, FieldElem)> {
        (0..self.rows)
            .flat_map(|i| self.row(i).map(move |(c, v)| (i, c, v)))
            .collect()
    }

    pub fn get(&self, i: usize, j: usize) -> FieldElem {
        let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
        match self.col_idx[a..b].binary_search(&(j as u32)) {
            Ok(k) => self.vals[a + k],
            Err(_) => FieldElem::ZERO,
        }
    }

    pub fn to_dense(&self) -> Vec<FVec> {
        let mut out = vec![vec![FieldElem::ZERO; self.cols]; self.rows];
        for (i, j, v) in self.triplets() {
            out[i][j] = v;
        }
        out
    }

    pub fn transpose(&self) -> SpMat {
        let t = self
            .triplets()
            .into_iter()
            .map(|(i, j, v)| (j, i, v))
            .collect();
        SpMat::from_triplets(&self.field, self.cols, self.rows, t)
    }

    pub fn mul_vec(&self, v: &[FieldElem]) -> Result<FVec> {
        if v.len() != self.cols {
            return Err(shape("matrix-vector product", self.cols, v.len()));
        }
        Ok((0..self.rows)
            .map(|i| {
                let mut acc = 0u16;
                for (c, x) in self.row(i) {
                    acc ^= self.field.mul(x, v[c]).0;
                }
                FieldElem(acc)
            })
            .collect())
    }

    /// self * other.
    pub fn matmul(&self, other: &SpMat) -> Result<SpMat> {
        if self.cols != other.rows {
            return Err(shape("matrix product", self.cols, other.rows));
        }
        let mut t = Vec::new();
        let mut acc = vec![FieldElem::ZERO; other.cols];
        let mut touched = Vec::new();
        for i in 0..self.rows {
            for (k, a) in self.row(i) {
                for (j, b) in other.row(k) {
                    if acc[j].is_zero() {
                        touched.push(j);
                    }
                    acc[j].0 ^= self.field.mul(a, b).0;
                }
            }
            for &j in &touched {
                if !acc[j].is_zero() {
                    t.push((i, j, acc[j]));
                }
                acc[j] = FieldElem::ZERO;
            }
            touched.clear();
        }
        Ok(SpMat::from_triplets(&self.field, self.rows, other.cols, t))
    }

    /// Row echelon form of the rows, eliminated left to right in row order.
    pub fn row_echelon(&self) -> Echelon {
        let mut e = Echelon::new(self.field.clone(), self.cols);
        for i in 0..self.rows {
            if e.rank() == self.cols {
                break;
            }
            let row = self.row_pairs(i);
            if !row.is_empty() {
                e.insert_sparse(&row);
            }
        }
        e
    }

    pub fn rank(&self) -> usize {
        if self.rows <= self.cols {
            self.row_echelon().rank()
        } else {
            self.transpose().row_echelon().rank()
        }
    }

    /// Basis of {v : M v = 0} in reduced echelon form.
    pub fn kernel_basis(&self) -> Vec<FVec> {
        self.row_echelon().into_rref().kernel_basis()
    }

    /// Basis of the column space in reduced echelon form.
    pub fn image_basis(&self) -> Vec<FVec> {
        self.transpose().row_echelon().into_rref().basis()
    }

    /// Basis of the row space in reduced echelon form.
    pub fn row_space_basis(&self) -> Vec<FVec> {
        self.row_echelon().into_rref().basis()
    }

    /// One solution of M x = b, or None when the system is inconsistent.
    pub fn solve(&self, b: &[FieldElem]) -> Result<Option<FVec>> {
        if b.len() != self.rows {
            return Err(shape("solve right-hand side", self.rows, b.len()));
        }
        let n = self.cols;
        let mut e = Echelon::new(self.field.clone(), n + 1);
        for i in 0..self.rows {
            let mut row = self.row_pairs(i);
            if !b[i].is_zero() {
                row.push((n as u32, b[i]));
            }
            if !row.is_empty() {
                e.insert_sparse(&row);
            }
        }
        let rref = e.into_rref();
        if rref.pivots().contains(&n) {
            return Ok(None);
        }
        let mut x = vec![FieldElem::ZERO; n];
        for (k, &lead) in rref.pivots().iter().enumerate() {
            x[lead] = rref.entry(k, n);
        }
        Ok(Some(x))
    }
}
