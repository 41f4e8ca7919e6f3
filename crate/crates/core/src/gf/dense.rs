use super::{FVec, Field, FieldElem};

/// Textbook Gaussian elimination on element lists, one field multiplication
/// per entry update. Slow, but shares no code with the packed engine, so the
/// two serve as independent routes for cross-checking.
pub struct DenseOracle {
    field: Field,
}

impl DenseOracle {
    pub fn new(field: &Field) -> Self {
        DenseOracle {
            field: field.clone(),
        }
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self, rows: &[FVec], ncols: usize) -> (Vec<FVec>, Vec<usize>) {
        let f = &self.field;
        let mut m: Vec<FVec> = rows.to_vec();
        let mut pivots = Vec::new();
        let mut top = 0;
        for col in 0..ncols {
            let Some(p) = (top..m.len()).find(|&i| !m[i][col].is_zero()) else {
                continue;
            };
            m.swap(top, p);
            let inv = f.inv(m[top][col]).expect("nonzero pivot");
            for x in m[top].iter_mut() {
                *x = f.mul(*x, inv);
            }
            for i in 0..m.len() {
                if i != top && !m[i][col].is_zero() {
                    let c = m[i][col];
                    for j in 0..ncols {
                        let d = f.mul(c, m[top][j]);
                        m[i][j] = f.add(m[i][j], d);
                    }
                }
            }
            pivots.push(col);
            top += 1;
        }
        m.truncate(top);
        (m, pivots)
    }

    pub fn rank(&self, rows: &[FVec], ncols: usize) -> usize {
        self.rref(rows, ncols).1.len()
    }

    /// Null space basis: one vector per free column.
    pub fn kernel(&self, rows: &[FVec], ncols: usize) -> Vec<FVec> {
        let (r, pivots) = self.rref(rows, ncols);
        let mut out = Vec::new();
        for f in 0..ncols {
            if pivots.contains(&f) {
                continue;
            }
            let mut v = vec![FieldElem::ZERO; ncols];
            v[f] = FieldElem::ONE;
            for (k, &p) in pivots.iter().enumerate() {
                v[p] = r[k][f];
            }
            out.push(v);
        }
        out
    }
}
