//! Sheaves on cell complexes, stored extensionally: the sections over a
//! cell σ are a subspace F_σ of functions on the top cells above σ, and
//! restriction to π ⪰ σ is restriction of functions.

use std::sync::Arc;

use serde::Serialize;

use crate::complex::{CellComplex, CellId};
use crate::error::{shape, Error, Result};
use crate::gf::{span_basis, Echelon, FVec, Field, FieldElem, SpMat};
use crate::localcode::LinCode;

/// A subspace of F_q^len held by its reduced row echelon basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectionSpace {
    len: usize,
    basis: Vec<FVec>,
    pivots: Vec<usize>,
}

impl SectionSpace {
    pub fn from_spanning(field: &Field, len: usize, vectors: &[FVec]) -> Self {
        let basis = span_basis(field, len, vectors);
        let pivots = basis
            .iter()
            .map(|b| b.iter().position(|x| !x.is_zero()).unwrap())
            .collect();
        SectionSpace { len, basis, pivots }
    }

    pub fn full(field: &Field, len: usize) -> Self {
        SectionSpace::from_spanning(field, len, LinCode::full(field, len).generator())
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[FVec] {
        &self.basis
    }

    /// Coordinates of `v` in the basis, or None if `v` is not in the space.
    pub fn coords(&self, field: &Field, v: &[FieldElem]) -> Option<FVec> {
        if v.len() != self.len {
            return None;
        }
        let c: FVec = self.pivots.iter().map(|&p| v[p]).collect();
        let back = field.combine(&c, &self.basis, self.len);
        (back == v).then_some(c)
    }

    pub fn contains(&self, field: &Field, v: &[FieldElem]) -> bool {
        self.coords(field, v).is_some()
    }

    pub fn vector(&self, field: &Field, coeffs: &[FieldElem]) -> FVec {
        field.combine(coeffs, &self.basis, self.len)
    }
}

/// One local code per (t-1)-cell, of length |X_{≥σ}(t)| in coordinate order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalCodeAssignment {
    codes: Vec<LinCode>,
}

impl LocalCodeAssignment {
    pub fn new(cx: &CellComplex, codes: Vec<LinCode>) -> Result<Self> {
        let t = cx.t();
        if t == 0 {
            return Err(Error::Validation("local codes need t >= 1".into()));
        }
        if codes.len() != cx.count(t - 1) {
            return Err(Error::Lookup(format!(
                "{} local codes for {} cells of dimension {}",
                codes.len(),
                cx.count(t - 1),
                t - 1
            )));
        }
        for (i, c) in codes.iter().enumerate() {
            let n = cx.top_coords(CellId::new(t - 1, i)).len();
            if c.length() != n {
                return Err(shape(&format!("local code at cell ({},{i})", t - 1), n, c.length()));
            }
        }
        Ok(LocalCodeAssignment { codes })
    }

    /// Assigns `make(len)` to every (t-1)-cell.
    pub fn uniform(cx: &CellComplex, make: impl Fn(usize) -> Result<LinCode>) -> Result<Self> {
        let t = cx.t();
        if t == 0 {
            return Err(Error::Validation("local codes need t >= 1".into()));
        }
        let codes = (0..cx.count(t - 1))
            .map(|i| make(cx.top_coords(CellId::new(t - 1, i)).len()))
            .collect::<Result<Vec<_>>>()?;
        LocalCodeAssignment::new(cx, codes)
    }

    /// The built-in code `name` on every (t-1)-cell.
    pub fn named(cx: &CellComplex, field: &Field, name: &str) -> Result<Self> {
        LocalCodeAssignment::uniform(cx, |n| LinCode::named(field, name, n))
    }

    /// Cubical complexes: a (t-1)-cell missing direction j gets `codes[j]`.
    pub fn per_direction(cx: &CellComplex, codes: &[LinCode]) -> Result<Self> {
        let t = cx.t();
        if !cx.is_cubical() {
            return Err(Error::Validation("per-direction codes need a cubical complex".into()));
        }
        if codes.len() != t {
            return Err(shape("per-direction code list", t, codes.len()));
        }
        let out = cx
            .cells(t - 1)
            .iter()
            .map(|k| match k {
                crate::complex::CellKey::Cube { dirs, .. } => {
                    let j = (0..t).find(|d| !dirs.contains(&(*d as u8))).unwrap();
                    codes[j].clone()
                }
                _ => unreachable!(),
            })
            .collect();
        LocalCodeAssignment::new(cx, out)
    }

    pub fn codes(&self) -> &[LinCode] {
        &self.codes
    }

    pub fn code(&self, index: usize) -> &LinCode {
        &self.codes[index]
    }

    pub fn dual(&self) -> Self {
        LocalCodeAssignment {
            codes: self.codes.iter().map(|c| c.dual()).collect(),
        }
    }
}

/// A failing cell in an axiom or exactness check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CellFailure {
    pub cell: CellId,
    pub check: String,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub cells_checked: usize,
    pub failures: Vec<CellFailure>,
}

impl AxiomReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AcyclicityReport {
    pub cells_checked: usize,
    pub failures: Vec<CellFailure>,
}

impl AcyclicityReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// The local cochain spaces P_k = ⊕_{ρ∈X_{≥σ}(k)} F_ρ for dim σ ≤ k ≤ t and
/// the restriction-sum maps between them.
pub struct LocalComplex {
    pub low: usize,
    pub dims: Vec<usize>,
    /// maps[m]: P_{low+m} -> P_{low+m+1}
    pub maps: Vec<SpMat>,
}

impl LocalComplex {
    pub fn dim(&self, k: usize) -> usize {
        self.dims[k - self.low]
    }

    /// The map P_k -> P_{k+1}.
    pub fn map(&self, k: usize) -> &SpMat {
        &self.maps[k - self.low]
    }
}

/// Sections over every cell of a complex.
#[derive(Clone, Debug)]
pub struct Sheaf {
    complex: Arc<CellComplex>,
    field: Field,
    spaces: Vec<Vec<SectionSpace>>,
    local_codes: Option<LocalCodeAssignment>,
}

impl Sheaf {
    /// F_σ = {c : c restricted to X_{≥τ'}(t) lies in C_τ' for every
    /// (t-1)-cell τ' above σ}; F_τ = F_q on top cells.
    pub fn from_local_codes(
        complex: &Arc<CellComplex>,
        field: &Field,
        codes: LocalCodeAssignment,
    ) -> Result<Self> {
        let cx = &**complex;
        let t = cx.t();
        if codes.codes.len() != cx.count(t - 1) {
            return Err(Error::Lookup(format!(
                "assignment covers {} of {} cells of dimension {}",
                codes.codes.len(),
                cx.count(t - 1),
                t - 1
            )));
        }
        for c in &codes.codes {
            if c.field() != field {
                return Err(Error::Code("local code over a different field".into()));
            }
        }
        let checks: Vec<Vec<FVec>> = codes
            .codes
            .iter()
            .map(|c| c.dual().generator().to_vec())
            .collect();
        let mut spaces: Vec<Vec<SectionSpace>> = vec![Vec::new(); t + 1];
        spaces[t] = (0..cx.count(t))
            .map(|_| SectionSpace::full(field, 1))
            .collect();
        spaces[t - 1] = (0..cx.count(t - 1))
            .map(|i| SectionSpace::from_spanning(field, codes.codes[i].length(), codes.codes[i].generator()))
            .collect();
        for d in (0..t.saturating_sub(1)).rev() {
            spaces[d] = (0..cx.count(d))
                .map(|i| {
                    let id = CellId::new(d, i);
                    let len = cx.top_coords(id).len();
                    let mut e = Echelon::new(field.clone(), len);
                    for &s in &cx.up_set(id, t - 1)? {
                        let sid = CellId::new(t - 1, s as usize);
                        let pos: Vec<usize> = cx
                            .top_coords(sid)
                            .iter()
                            .map(|&tau| cx.top_position(id, tau).expect("top cell above"))
                            .collect();
                        for h in &checks[s as usize] {
                            let row: Vec<(u32, FieldElem)> = h
                                .iter()
                                .zip(&pos)
                                .filter(|(x, _)| !x.is_zero())
                                .map(|(x, &p)| (p as u32, *x))
                                .collect();
                            if e.rank() < len {
                                e.insert_sparse(&row);
                            }
                        }
                    }
                    Ok(SectionSpace::from_spanning(field, len, &e.into_rref().kernel_basis()))
                })
                .collect::<Result<Vec<_>>>()?;
        }
        Ok(Sheaf {
            complex: complex.clone(),
            field: field.clone(),
            spaces,
            local_codes: Some(codes),
        })
    }

    /// Constant sheaf: repetition codes everywhere.
    pub fn constant(complex: &Arc<CellComplex>, field: &Field) -> Result<Self> {
        let codes = LocalCodeAssignment::named(complex, field, "rep")?;
        Sheaf::from_local_codes(complex, field, codes)
    }

    /// Tensor-code sheaf on a cubical complex: over a cell of type S the
    /// sections are the image of ⊗_{i∉S} h_i^T, with coordinates indexed by
    /// the labels in the missing directions.
    pub fn cubical_tensor(complex: &Arc<CellComplex>, codes: &[LinCode]) -> Result<Self> {
        let cx = &**complex;
        let Some(spec) = cx.cubical_spec() else {
            return Err(Error::Validation("tensor sheaf needs a cubical complex".into()));
        };
        let t = cx.t();
        if codes.len() != t {
            return Err(shape("tensor sheaf code list", t, codes.len()));
        }
        let field = codes[0].field().clone();
        for c in codes {
            if c.length() != spec.delta() {
                return Err(shape("tensor sheaf code length", spec.delta(), c.length()));
            }
        }
        let mut spaces: Vec<Vec<SectionSpace>> = vec![Vec::new(); t + 1];
        for (d, sp) in spaces.iter_mut().enumerate() {
            *sp = cx
                .cells(d)
                .iter()
                .map(|k| {
                    let crate::complex::CellKey::Cube { dirs, .. } = k else {
                        unreachable!()
                    };
                    let missing: Vec<&LinCode> = (0..t)
                        .filter(|j| !dirs.contains(&(*j as u8)))
                        .map(|j| &codes[j])
                        .collect();
                    if missing.is_empty() {
                        return Ok(SectionSpace::full(&field, 1));
                    }
                    let tc = LinCode::tensor(&missing)?;
                    Ok(SectionSpace::from_spanning(&field, tc.length(), tc.generator()))
                })
                .collect::<Result<Vec<_>>>()?;
        }
        let local = LocalCodeAssignment::per_direction(cx, codes)?;
        Ok(Sheaf {
            complex: complex.clone(),
            field,
            spaces,
            local_codes: Some(local),
        })
    }

    /// Arbitrary per-cell spaces (a presheaf until verified). Each entry of
    /// `spaces[d][i]` is a spanning set of functions on the top cells above.
    pub fn from_spaces(
        complex: &Arc<CellComplex>,
        field: &Field,
        spaces: Vec<Vec<Vec<FVec>>>,
    ) -> Result<Self> {
        let cx = &**complex;
        if spaces.len() != cx.t() + 1 {
            return Err(shape("per-dimension space list", cx.t() + 1, spaces.len()));
        }
        let mut out = Vec::with_capacity(spaces.len());
        for (d, per) in spaces.into_iter().enumerate() {
            if per.len() != cx.count(d) {
                return Err(shape(&format!("spaces in dimension {d}"), cx.count(d), per.len()));
            }
            let mut row = Vec::with_capacity(per.len());
            for (i, vecs) in per.into_iter().enumerate() {
                let len = cx.top_coords(CellId::new(d, i)).len();
                for v in &vecs {
                    if v.len() != len {
                        return Err(shape(&format!("section over ({d},{i})"), len, v.len()));
                    }
                }
                row.push(SectionSpace::from_spanning(field, len, &vecs));
            }
            out.push(row);
        }
        Ok(Sheaf {
            complex: complex.clone(),
            field: field.clone(),
            spaces: out,
            local_codes: None,
        })
    }

    /// Same sheaf with the space over one cell replaced.
    pub fn with_space(&self, cell: CellId, vectors: &[FVec]) -> Result<Self> {
        let len = self.complex.top_coords(cell).len();
        for v in vectors {
            if v.len() != len {
                return Err(shape("replacement section", len, v.len()));
            }
        }
        let mut s = self.clone();
        s.spaces[cell.dim][cell.index] = SectionSpace::from_spanning(&self.field, len, vectors);
        s.local_codes = None;
        Ok(s)
    }

    pub fn complex(&self) -> &Arc<CellComplex> {
        &self.complex
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn t(&self) -> usize {
        self.complex.t()
    }

    pub fn space(&self, cell: CellId) -> &SectionSpace {
        &self.spaces[cell.dim][cell.index]
    }

    pub fn dim(&self, cell: CellId) -> usize {
        self.space(cell).dim()
    }

    pub fn local_codes(&self) -> Option<&LocalCodeAssignment> {
        self.local_codes.as_ref()
    }

    /// Restriction of a function on X_{≥σ}(t) to X_{≥π}(t).
    pub fn restrict_function(&self, sigma: CellId, pi: CellId, f: &[FieldElem]) -> FVec {
        let cx = &*self.complex;
        cx.top_coords(pi)
            .iter()
            .map(|&tau| f[cx.top_position(sigma, tau).expect("comparable cells")])
            .collect()
    }

    fn comparable(&self, sigma: CellId, pi: CellId) -> Result<()> {
        let cx = &*self.complex;
        if pi.dim < sigma.dim
            || (pi.dim == sigma.dim && pi != sigma)
            || !cx.up_set(sigma, pi.dim)?.contains(&(pi.index as u32))
        {
            return Err(Error::Range(format!("{sigma:?} is not below {pi:?}")));
        }
        Ok(())
    }

    /// Matrix of res_{σ,π} in the stored bases: entry [k][l] is coordinate k
    /// of the restriction of basis section l.
    pub fn restriction(&self, sigma: CellId, pi: CellId) -> Result<Vec<FVec>> {
        self.comparable(sigma, pi)?;
        let (ds, dp) = (self.dim(sigma), self.dim(pi));
        let mut m = vec![vec![FieldElem::ZERO; ds]; dp];
        for (l, b) in self.space(sigma).basis().iter().enumerate() {
            let r = self.restrict_function(sigma, pi, b);
            let c = self.space(pi).coords(&self.field, &r).ok_or_else(|| {
                Error::Integrity(format!(
                    "restriction of basis section {l} of {sigma:?} leaves F over {pi:?}"
                ))
            })?;
            for k in 0..dp {
                m[k][l] = c[k];
            }
        }
        Ok(m)
    }

    /// Every basis section restricts into the space over each coface.
    pub fn check_representation(&self) -> Result<()> {
        let cx = &*self.complex;
        for d in 0..self.t() {
            for i in 0..cx.count(d) {
                let s = CellId::new(d, i);
                for &p in cx.cofaces(s) {
                    self.restriction(s, CellId::new(d + 1, p as usize))?;
                }
            }
        }
        Ok(())
    }

    /// Triplets of the block res_{σ,π} placed at (row_off, col_off).
    pub(crate) fn restriction_triplets(
        &self,
        sigma: CellId,
        pi: CellId,
        row_off: usize,
        col_off: usize,
        out: &mut Vec<(usize, usize, FieldElem)>,
    ) -> Result<()> {
        for (l, b) in self.space(sigma).basis().iter().enumerate() {
            let r = self.restrict_function(sigma, pi, b);
            let c = self.space(pi).coords(&self.field, &r).ok_or_else(|| {
                Error::Integrity(format!(
                    "restriction of basis section {l} of {sigma:?} leaves F over {pi:?}"
                ))
            })?;
            for (k, x) in c.into_iter().enumerate() {
                if !x.is_zero() {
                    out.push((row_off + k, col_off + l, x));
                }
            }
        }
        Ok(())
    }

    /// The local cochain complex above σ.
    pub fn local_complex(&self, sigma: CellId) -> Result<LocalComplex> {
        let cx = &*self.complex;
        let t = self.t();
        let mut levels: Vec<Vec<u32>> = Vec::new();
        for k in sigma.dim..=t {
            let mut u = cx.up_set(sigma, k)?;
            u.sort_unstable();
            levels.push(u);
        }
        let mut offsets: Vec<Vec<usize>> = Vec::new();
        let mut dims = Vec::new();
        for (m, lvl) in levels.iter().enumerate() {
            let k = sigma.dim + m;
            let mut off = Vec::with_capacity(lvl.len());
            let mut acc = 0;
            for &c in lvl {
                off.push(acc);
                acc += self.dim(CellId::new(k, c as usize));
            }
            offsets.push(off);
            dims.push(acc);
        }
        let mut maps = Vec::new();
        for m in 0..levels.len() - 1 {
            let k = sigma.dim + m;
            let mut trip = Vec::new();
            for (hi_pos, &hi) in levels[m + 1].iter().enumerate() {
                let hid = CellId::new(k + 1, hi as usize);
                for &lo in cx.faces(hid) {
                    if let Ok(lo_pos) = levels[m].binary_search(&lo) {
                        self.restriction_triplets(
                            CellId::new(k, lo as usize),
                            hid,
                            offsets[m + 1][hi_pos],
                            offsets[m][lo_pos],
                            &mut trip,
                        )?;
                    }
                }
            }
            maps.push(SpMat::from_triplets(&self.field, dims[m + 1], dims[m], trip));
        }
        Ok(LocalComplex {
            low: sigma.dim,
            dims,
            maps,
        })
    }

    /// Identity (injectivity into the next level) for cells of dimension
    /// ≤ t-1 and gluability (exactness at the next level) for dimension ≤ t-2.
    pub fn verify_axioms(&self) -> Result<AxiomReport> {
        let cx = &*self.complex;
        let t = self.t();
        let mut rep = AxiomReport::default();
        for d in 0..t {
            for i in 0..cx.count(d) {
                let sigma = CellId::new(d, i);
                rep.cells_checked += 1;
                let lc = self.local_complex(sigma)?;
                let r0 = lc.map(d).rank();
                if r0 != self.dim(sigma) {
                    rep.failures.push(CellFailure {
                        cell: sigma,
                        check: "identity".into(),
                        detail: format!("rank {r0} < dim F = {}", self.dim(sigma)),
                    });
                    continue;
                }
                if d + 2 <= t {
                    let r1 = lc.map(d + 1).rank();
                    let ker = lc.dim(d + 1) - r1;
                    if ker != r0 {
                        rep.failures.push(CellFailure {
                            cell: sigma,
                            check: "gluability".into(),
                            detail: format!(
                                "{ker}-dimensional space of compatible families, {r0} glued sections"
                            ),
                        });
                    }
                }
            }
        }
        Ok(rep)
    }

    /// Exactness of P_{i+1} -> ... -> P_t at every interior term, for every
    /// i-cell σ.
    pub fn is_locally_acyclic(&self) -> Result<AcyclicityReport> {
        let cx = &*self.complex;
        let t = self.t();
        let mut rep = AcyclicityReport::default();
        for d in 0..t {
            for i in 0..cx.count(d) {
                let sigma = CellId::new(d, i);
                rep.cells_checked += 1;
                if d + 3 > t {
                    continue;
                }
                let lc = self.local_complex(sigma)?;
                for k in d + 2..t {
                    let into = lc.map(k - 1).rank();
                    let ker = lc.dim(k) - lc.map(k).rank();
                    if ker != into {
                        rep.failures.push(CellFailure {
                            cell: sigma,
                            check: format!("exactness at level {k}"),
                            detail: format!("kernel dim {ker}, image dim {into}"),
                        });
                        break;
                    }
                }
            }
        }
        Ok(rep)
    }

    /// Rebuild from the dual local codes.
    pub fn dual(&self) -> Result<Sheaf> {
        let codes = self.local_codes.as_ref().ok_or_else(|| {
            Error::Validation("dual sheaf needs a sheaf built from local codes".into())
        })?;
        Sheaf::from_local_codes(&self.complex, &self.field, codes.dual())
    }

    /// Rebuild from the entrywise-product spans of the local codes.
    pub fn product(sheaves: &[&Sheaf]) -> Result<Sheaf> {
        let Some(first) = sheaves.first() else {
            return Err(Error::Validation("product of no sheaves".into()));
        };
        for s in sheaves {
            if !Arc::ptr_eq(&s.complex, &first.complex) {
                return Err(Error::Validation("product of sheaves on different complexes".into()));
            }
        }
        let assignments = sheaves
            .iter()
            .map(|s| {
                s.local_codes
                    .as_ref()
                    .ok_or_else(|| Error::Validation("product needs local codes".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        let n = assignments[0].codes.len();
        let codes = (0..n)
            .map(|i| {
                let cs: Vec<&LinCode> = assignments.iter().map(|a| &a.codes[i]).collect();
                LinCode::schur_span(&cs)
            })
            .collect::<Result<Vec<_>>>()?;
        let la = LocalCodeAssignment::new(&first.complex, codes)?;
        Sheaf::from_local_codes(&first.complex, &first.field, la)
    }

    /// True iff every cell carries the same subspace in both sheaves.
    pub fn same_sections(&self, other: &Sheaf) -> bool {
        self.spaces == other.spaces
    }

    /// Cells where the two sheaves differ.
    pub fn differing_cells(&self, other: &Sheaf) -> Vec<CellId> {
        let mut out = Vec::new();
        for (d, (a, b)) in self.spaces.iter().zip(&other.spaces).enumerate() {
            for (i, (x, y)) in a.iter().zip(b).enumerate() {
                if x != y {
                    out.push(CellId::new(d, i));
                }
            }
        }
        out
    }

    /// JSON form: field, cell counts and per-cell basis matrices.
    pub fn to_json(&self) -> serde_json::Value {
        let bases: Vec<Vec<Vec<Vec<u16>>>> = self
            .spaces
            .iter()
            .map(|per| {
                per.iter()
                    .map(|s| s.basis().iter().map(|r| r.iter().map(|x| x.0).collect()).collect())
                    .collect()
            })
            .collect();
        serde_json::json!({
            "field": self.field.spec(),
            "complex": { "t": self.t(), "counts": self.complex.counts() },
            "bases": bases,
        })
    }

    /// Functions on top cells for each cell of a degree-`deg` cochain.
    pub fn sections(&self, deg: usize, offsets: &[usize], coeffs: &[FieldElem]) -> Vec<FVec> {
        (0..self.complex.count(deg))
            .map(|i| {
                let sp = self.space(CellId::new(deg, i));
                sp.vector(&self.field, &coeffs[offsets[i]..offsets[i] + sp.dim()])
            })
            .collect()
    }
}
