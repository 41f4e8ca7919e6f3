//! Classical linear codes used as local codes.

use serde::{Deserialize, Serialize};

use crate::error::{shape, Error, Result};
use crate::gf::{span_basis, Echelon, FVec, Field, FieldElem, FieldSpec};

/// A linear code stored by the reduced row echelon form of its generator,
/// so two codes are equal exactly when they are the same subspace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinCode {
    field: Field,
    length: usize,
    generator: Vec<FVec>,
}

/// File form of a code: field, length and generator rows as integers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeFile {
    pub spec: FieldSpec,
    #[serde(rename = "Δ")]
    pub delta: usize,
    pub generator: Vec<Vec<u16>>,
}

impl LinCode {
    /// Code generated by `rows`; rows must be independent.
    pub fn new(field: &Field, length: usize, rows: Vec<FVec>) -> Result<Self> {
        for r in &rows {
            if r.len() != length {
                return Err(shape("generator row", length, r.len()));
            }
        }
        let generator = span_basis(field, length, &rows);
        if generator.len() != rows.len() {
            return Err(Error::Code(format!(
                "{} generator rows have rank {}",
                rows.len(),
                generator.len()
            )));
        }
        Ok(LinCode {
            field: field.clone(),
            length,
            generator,
        })
    }

    /// Code spanned by `rows`, which may be dependent.
    pub fn span(field: &Field, length: usize, rows: &[FVec]) -> Result<Self> {
        for r in rows {
            if r.len() != length {
                return Err(shape("spanning row", length, r.len()));
            }
        }
        Ok(LinCode {
            field: field.clone(),
            length,
            generator: span_basis(field, length, rows),
        })
    }

    pub fn repetition(field: &Field, length: usize) -> Self {
        LinCode::span(field, length, &[vec![FieldElem::ONE; length]]).unwrap()
    }

    pub fn full(field: &Field, length: usize) -> Self {
        let rows: Vec<FVec> = (0..length)
            .map(|i| {
                let mut v = vec![FieldElem::ZERO; length];
                v[i] = FieldElem::ONE;
                v
            })
            .collect();
        LinCode::span(field, length, &rows).unwrap()
    }

    pub fn zero(field: &Field, length: usize) -> Self {
        LinCode {
            field: field.clone(),
            length,
            generator: Vec::new(),
        }
    }

    /// The sum-zero code.
    pub fn parity(field: &Field, length: usize) -> Self {
        LinCode::repetition(field, length).dual()
    }

    /// Evaluations of x^0..x^{k-1} at every field element in encoding order.
    pub fn reed_solomon(field: &Field, k: usize) -> Result<Self> {
        let q = field.q();
        if k == 0 || k > q {
            return Err(Error::Code(format!("Reed-Solomon dimension {k} outside 1..={q}")));
        }
        let rows: Vec<FVec> = (0..k)
            .map(|d| field.elements().map(|x| field.pow(x, d as u64)).collect())
            .collect();
        LinCode::new(field, q, rows)
    }

    /// Built-in codes by name: "rep", "full", "zero", "parity", "rs:k",
    /// "dual:<name>".
    pub fn named(field: &Field, name: &str, length: usize) -> Result<Self> {
        if let Some(inner) = name.strip_prefix("dual:") {
            return Ok(LinCode::named(field, inner, length)?.dual());
        }
        if let Some(k) = name.strip_prefix("rs:") {
            let k: usize = k
                .parse()
                .map_err(|_| Error::Code(format!("bad Reed-Solomon dimension in {name:?}")))?;
            if length != field.q() {
                return Err(Error::Code(format!(
                    "Reed-Solomon code needs length q = {}, cell has {length}",
                    field.q()
                )));
            }
            return LinCode::reed_solomon(field, k);
        }
        match name {
            "rep" => Ok(LinCode::repetition(field, length)),
            "full" => Ok(LinCode::full(field, length)),
            "zero" => Ok(LinCode::zero(field, length)),
            "parity" => Ok(LinCode::parity(field, length)),
            _ => Err(Error::Code(format!("unknown code name {name:?}"))),
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn dim(&self) -> usize {
        self.generator.len()
    }

    /// Generator rows in reduced row echelon form.
    pub fn generator(&self) -> &[FVec] {
        &self.generator
    }

    pub fn contains(&self, v: &[FieldElem]) -> bool {
        if v.len() != self.length {
            return false;
        }
        let mut e = Echelon::new(self.field.clone(), self.length);
        for g in &self.generator {
            e.insert_dense(g);
        }
        e.contains(v)
    }

    /// Orthogonal complement under the standard bilinear form.
    pub fn dual(&self) -> Self {
        let m = crate::gf::SpMat::from_dense(&self.field, &self.generator, self.length);
        let rows = if self.generator.is_empty() {
            LinCode::full(&self.field, self.length).generator
        } else {
            m.kernel_basis()
        };
        LinCode {
            field: self.field.clone(),
            length: self.length,
            generator: rows,
        }
    }

    /// Span of entrywise products of generator rows, one from each code.
    pub fn schur_span(codes: &[&LinCode]) -> Result<Self> {
        let Some(first) = codes.first() else {
            return Err(Error::Code("schur span of no codes".into()));
        };
        let (field, n) = (&first.field, first.length);
        for c in codes {
            if c.length != n {
                return Err(shape("schur span operand", n, c.length));
            }
        }
        let mut acc: Vec<FVec> = first.generator.clone();
        for c in &codes[1..] {
            let mut next = Vec::with_capacity(acc.len() * c.dim());
            for a in &acc {
                for b in &c.generator {
                    next.push(field.entrywise_product(a, b)?);
                }
            }
            acc = span_basis(field, n, &next);
        }
        LinCode::span(field, n, &acc)
    }

    /// Tensor product; coordinates are lexicographic with the first code
    /// most significant.
    pub fn tensor(codes: &[&LinCode]) -> Result<Self> {
        let Some(first) = codes.first() else {
            return Err(Error::Code("tensor of no codes".into()));
        };
        let field = &first.field;
        let mut rows: Vec<FVec> = first.generator.clone();
        let mut len = first.length;
        for c in &codes[1..] {
            let mut next = Vec::with_capacity(rows.len() * c.dim());
            for a in &rows {
                for b in &c.generator {
                    let mut v = Vec::with_capacity(len * c.length);
                    for &x in a {
                        for &y in b {
                            v.push(field.mul(x, y));
                        }
                    }
                    next.push(v);
                }
            }
            rows = next;
            len *= c.length;
        }
        LinCode::new(field, len, rows)
    }

    /// True iff every product of basis codewords (one per code) sums to zero.
    pub fn product_condition(codes: &[&LinCode]) -> Result<bool> {
        let s = LinCode::schur_span(codes)?;
        Ok(s.generator.iter().all(|row| {
            row.iter()
                .fold(FieldElem::ZERO, |acc, &x| s.field.add(acc, x))
                .is_zero()
        }))
    }

    pub fn to_file(&self) -> CodeFile {
        CodeFile {
            spec: self.field.spec(),
            delta: self.length,
            generator: self
                .generator
                .iter()
                .map(|r| r.iter().map(|x| x.0).collect())
                .collect(),
        }
    }

    pub fn from_file(file: &CodeFile) -> Result<Self> {
        let field = Field::new(file.spec)?;
        let rows = file
            .generator
            .iter()
            .map(|r| r.iter().map(|&x| field.elem(x as u64)).collect::<Result<FVec>>())
            .collect::<Result<Vec<_>>>()?;
        LinCode::new(&field, file.delta, rows)
    }
}
