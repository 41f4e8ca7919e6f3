//! Bit-sliced row elimination.
//!
//! A row of length n over F_{2^r} is stored as r bit planes of ceil(n/64)
//! words each; plane i holds bit i of every entry. Adding c * src to dst
//! XORs source plane i into every destination plane j where bit j of
//! c * x^i is set, so one row operation costs at most r^2 word sweeps.

use super::{FVec, Field, FieldElem};

#[derive(Clone)]
struct Layout {
    field: Field,
    r: usize,
    words: usize,
}

impl Layout {
    fn new(field: Field, ncols: usize) -> Self {
        Layout {
            r: field.r() as usize,
            words: ncols.div_ceil(64).max(1),
            field,
        }
    }

    fn zero(&self) -> Vec<u64> {
        vec![0; self.r * self.words]
    }

    #[inline]
    fn get(&self, row: &[u64], col: usize) -> FieldElem {
        let (w, b) = (col / 64, col % 64);
        let mut v = 0u16;
        for i in 0..self.r {
            v |= (((row[i * self.words + w] >> b) & 1) as u16) << i;
        }
        FieldElem(v)
    }

    #[inline]
    fn set(&self, row: &mut [u64], col: usize, val: FieldElem) {
        let (w, b) = (col / 64, col % 64);
        for i in 0..self.r {
            let word = &mut row[i * self.words + w];
            *word &= !(1u64 << b);
            *word |= (((val.0 >> i) & 1) as u64) << b;
        }
    }

    /// First column >= `from` holding a nonzero entry.
    fn next_nonzero(&self, row: &[u64], from: usize) -> Option<usize> {
        let mut w = from / 64;
        if w >= self.words {
            return None;
        }
        let mut mask = !0u64 << (from % 64);
        while w < self.words {
            let mut acc = 0u64;
            for i in 0..self.r {
                acc |= row[i * self.words + w];
            }
            acc &= mask;
            if acc != 0 {
                return Some(w * 64 + acc.trailing_zeros() as usize);
            }
            mask = !0;
            w += 1;
        }
        None
    }

    /// dst += c * src, touching only words >= from_word.
    #[inline]
    fn axpy(&self, dst: &mut [u64], c: FieldElem, src: &[u64], from_word: usize) {
        let words = self.words;
        if self.r == 1 {
            if c.0 & 1 == 1 {
                for (d, s) in dst[from_word..].iter_mut().zip(&src[from_word..]) {
                    *d ^= *s;
                }
            }
            return;
        }
        for i in 0..self.r {
            let mut m = self.field.mulx(c, i as u32);
            let s = &src[i * words + from_word..(i + 1) * words];
            while m != 0 {
                let j = m.trailing_zeros() as usize;
                m &= m - 1;
                let d = &mut dst[j * words + from_word..(j + 1) * words];
                for (dw, sw) in d.iter_mut().zip(s) {
                    *dw ^= *sw;
                }
            }
        }
    }

    fn scale(&self, row: &mut [u64], c: FieldElem) {
        if c == FieldElem::ONE {
            return;
        }
        let src = row.to_vec();
        row.iter_mut().for_each(|w| *w = 0);
        self.axpy(row, c, &src, 0);
    }

    fn pack(&self, v: &[FieldElem]) -> Vec<u64> {
        let mut row = self.zero();
        for (col, x) in v.iter().enumerate() {
            if !x.is_zero() {
                self.set(&mut row, col, *x);
            }
        }
        row
    }

    fn unpack(&self, row: &[u64], ncols: usize) -> FVec {
        (0..ncols).map(|c| self.get(row, c)).collect()
    }
}

/// Incrementally built row echelon form. Pivot rows are normalized to a
/// leading 1; `into_rref` back-substitutes to the unique reduced form.
#[derive(Clone)]
pub struct Echelon {
    layout: Layout,
    ncols: usize,
    rows: Vec<Vec<u64>>,
    leads: Vec<usize>,
    pivot_of: Vec<u32>,
}

const NONE: u32 = u32::MAX;

impl Echelon {
    pub fn new(field: Field, ncols: usize) -> Self {
        Echelon {
            layout: Layout::new(field, ncols),
            ncols,
            rows: Vec::new(),
            leads: Vec::new(),
            pivot_of: vec![NONE; ncols],
        }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn field(&self) -> &Field {
        &self.layout.field
    }

    fn insert_packed(&mut self, mut row: Vec<u64>) -> bool {
        let l = &self.layout;
        let mut from = 0;
        loop {
            let Some(lead) = l.next_nonzero(&row, from) else {
                return false;
            };
            let p = self.pivot_of[lead];
            if p == NONE {
                let c = l.get(&row, lead);
                let inv = l.field.inv(c).expect("nonzero lead");
                l.scale(&mut row, inv);
                self.pivot_of[lead] = self.rows.len() as u32;
                self.rows.push(row);
                self.leads.push(lead);
                return true;
            }
            let c = l.get(&row, lead);
            l.axpy(&mut row, c, &self.rows[p as usize], lead / 64);
            from = lead + 1;
        }
    }

    /// Adds a dense vector; returns true if it was independent.
    pub fn insert_dense(&mut self, v: &[FieldElem]) -> bool {
        assert_eq!(v.len(), self.ncols, "echelon row length");
        let row = self.layout.pack(v);
        self.insert_packed(row)
    }

    /// Adds a sparse vector given as (column, value) pairs.
    pub fn insert_sparse(&mut self, entries: &[(u32, FieldElem)]) -> bool {
        let l = &self.layout;
        let mut row = l.zero();
        for &(c, v) in entries {
            let cur = l.get(&row, c as usize);
            l.set(&mut row, c as usize, FieldElem(cur.0 ^ v.0));
        }
        self.insert_packed(row)
    }

    fn reduce_full(&self, row: &mut [u64]) {
        let l = &self.layout;
        let mut from = 0;
        while let Some(col) = l.next_nonzero(row, from) {
            let p = self.pivot_of[col];
            if p != NONE {
                let c = l.get(row, col);
                l.axpy(row, c, &self.rows[p as usize], col / 64);
            }
            from = col + 1;
        }
    }

    /// Membership of `v` in the current row span.
    pub fn contains(&self, v: &[FieldElem]) -> bool {
        assert_eq!(v.len(), self.ncols, "echelon row length");
        let mut row = self.layout.pack(v);
        self.reduce_full(&mut row);
        self.layout.next_nonzero(&row, 0).is_none()
    }

    /// Remainder of `v` after reduction against all pivots.
    pub fn reduce(&self, v: &[FieldElem]) -> FVec {
        let mut row = self.layout.pack(v);
        self.reduce_full(&mut row);
        self.layout.unpack(&row, self.ncols)
    }

    /// Back-substitutes to reduced row echelon form, rows sorted by pivot column.
    pub fn into_rref(self) -> Rref {
        let Echelon {
            layout,
            ncols,
            rows,
            leads,
            ..
        } = self;
        let mut order: Vec<usize> = (0..rows.len()).collect();
        order.sort_by_key(|&i| leads[i]);
        let mut rows: Vec<Vec<u64>> = {
            let mut slots: Vec<Option<Vec<u64>>> = rows.into_iter().map(Some).collect();
            order.iter().map(|&i| slots[i].take().unwrap()).collect()
        };
        let leads: Vec<usize> = order.iter().map(|&i| leads[i]).collect();
        for j in (0..rows.len()).rev() {
            let lj = leads[j];
            let (head, tail) = rows.split_at_mut(j);
            let pivot = &tail[0];
            for row in head.iter_mut() {
                let c = layout.get(row, lj);
                if !c.is_zero() {
                    layout.axpy(row, c, pivot, lj / 64);
                }
            }
        }
        Rref {
            layout,
            ncols,
            rows,
            leads,
        }
    }
}

/// A matrix in reduced row echelon form.
pub struct Rref {
    layout: Layout,
    ncols: usize,
    rows: Vec<Vec<u64>>,
    leads: Vec<usize>,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.leads
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn entry(&self, row: usize, col: usize) -> FieldElem {
        self.layout.get(&self.rows[row], col)
    }

    /// The nonzero rows as dense vectors.
    pub fn basis(&self) -> Vec<FVec> {
        self.rows
            .iter()
            .map(|r| self.layout.unpack(r, self.ncols))
            .collect()
    }

    /// Basis of the null space {v : R v = 0}, one vector per free column,
    /// returned in reduced echelon form.
    pub fn kernel_basis(&self) -> Vec<FVec> {
        let mut is_pivot = vec![false; self.ncols];
        for &l in &self.leads {
            is_pivot[l] = true;
        }
        let free: Vec<usize> = (0..self.ncols).filter(|&c| !is_pivot[c]).collect();
        let mut out: Vec<FVec> = free
            .iter()
            .map(|&f| {
                let mut v = vec![FieldElem::ZERO; self.ncols];
                v[f] = FieldElem::ONE;
                v
            })
            .collect();
        for (k, row) in self.rows.iter().enumerate() {
            let lead = self.leads[k];
            for (idx, &f) in free.iter().enumerate() {
                // char 2: -x = x
                let x = self.layout.get(row, f);
                if !x.is_zero() {
                    out[idx][lead] = x;
                }
            }
        }
        super::span_basis(&self.layout.field, self.ncols, &out)
    }
}
