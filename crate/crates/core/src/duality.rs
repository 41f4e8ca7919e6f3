//! Poincaré duality checks: H_t(F) against H^0(F⊥) and the explicit global
//! sections of F⊥, the degree-by-degree pairing H_{t-i}(F) ≅ H^i(F⊥) for
//! locally acyclic sheaves, and the five exactness statements behind it as
//! rank conditions.

use serde::Serialize;

use crate::chain::ChainComplex;
use crate::complex::CellId;
use crate::error::{Error, Result};
use crate::gf::{FVec, FieldElem, SpMat};
use crate::localcode::LinCode;
use crate::sheaf::{CellFailure, LocalCodeAssignment, LocalComplex, Sheaf};

/// Local codes of a sheaf: the given assignment, or else the section spaces
/// over the (t-1)-cells. Top-cell spaces must be one-dimensional.
pub fn local_codes_of(sheaf: &Sheaf) -> Result<LocalCodeAssignment> {
    let cx = sheaf.complex();
    let t = sheaf.t();
    if t == 0 {
        return Err(Error::Validation("duality needs t >= 1".into()));
    }
    for i in 0..cx.count(t) {
        if sheaf.dim(CellId::new(t, i)) != 1 {
            return Err(Error::Validation(format!("top cell {i} does not carry F_q")));
        }
    }
    if let Some(codes) = sheaf.local_codes() {
        return Ok(codes.clone());
    }
    let codes = (0..cx.count(t - 1))
        .map(|i| {
            let sp = sheaf.space(CellId::new(t - 1, i));
            LinCode::span(sheaf.field(), sp.len(), sp.basis())
        })
        .collect::<Result<Vec<_>>>()?;
    LocalCodeAssignment::new(cx, codes)
}

/// F⊥, rebuilt from the dual local codes.
pub fn dual_sheaf(sheaf: &Sheaf) -> Result<Sheaf> {
    Sheaf::from_local_codes(sheaf.complex(), sheaf.field(), local_codes_of(sheaf)?.dual())
}

/// Dimensions behind H_t(F) ≅ H^0(F⊥) ≅ S, with S the functions on top cells
/// whose restriction to every (t-1)-cell σ lies in C_σ⊥.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct H0HtReport {
    pub dim_ht: usize,
    pub dim_h0_dual: usize,
    pub dim_global_sections: usize,
    /// S maps injectively into ker ∂_t.
    pub witness_homology: bool,
    /// S maps injectively into ker δ^0 of F⊥.
    pub witness_dual: bool,
}

impl H0HtReport {
    pub fn ok(&self) -> bool {
        self.dim_ht == self.dim_h0_dual
            && self.dim_ht == self.dim_global_sections
            && self.witness_homology
            && self.witness_dual
    }
}

fn nullity(m: &SpMat) -> usize {
    m.cols() - m.rank()
}

/// Basis of S computed directly from the local codes.
pub fn global_sections(sheaf: &Sheaf) -> Result<Vec<FVec>> {
    let cx = sheaf.complex();
    let t = sheaf.t();
    let codes = local_codes_of(sheaf)?;
    let mut trip = Vec::new();
    let mut row = 0;
    for s in 0..cx.count(t - 1) {
        let tops = cx.top_coords(CellId::new(t - 1, s));
        for g in codes.code(s).generator() {
            for (p, &tau) in tops.iter().enumerate() {
                if !g[p].is_zero() {
                    trip.push((row, tau as usize, g[p]));
                }
            }
            row += 1;
        }
    }
    Ok(SpMat::from_triplets(sheaf.field(), row, cx.count(t), trip).kernel_basis())
}

/// Checks H_t(F) ≅ H^0(F⊥) three ways, with explicit maps from S.
pub fn verify_h0_ht(sheaf: &Sheaf) -> Result<H0HtReport> {
    let cx = sheaf.complex();
    let t = sheaf.t();
    let f = sheaf.field();
    let cc = ChainComplex::from_sheaf(sheaf)?;
    let dual = dual_sheaf(sheaf)?;
    let dc = ChainComplex::from_sheaf(&dual)?;
    let dim_ht = cc.homology_dim(t);
    let dim_h0_dual = dc.betti(0);
    let s = global_sections(sheaf)?;

    // S → C_t(F): the top spaces are F_q with basis [c], so the coordinate
    // of a(τ) is a(τ)/c
    let to_chain: Vec<FVec> = s
        .iter()
        .map(|a| {
            (0..cx.count(t))
                .map(|tau| {
                    let c = sheaf.space(CellId::new(t, tau)).basis()[0][0];
                    f.div(a[tau], c).expect("nonzero basis vector")
                })
                .collect()
        })
        .collect();
    let boundary = cc.boundary(t);
    let witness_homology = to_chain
        .iter()
        .all(|v| boundary.mul_vec(v).map(|w| w.iter().all(|x| x.is_zero())).unwrap_or(false))
        && SpMat::from_dense(f, &to_chain, cc.dim(t)).rank() == s.len();

    // S → C^0(F⊥): restrict to the tops above each vertex
    let off = dc.offsets(0).to_vec();
    let mut to_dual = Vec::with_capacity(s.len());
    let mut coords_ok = true;
    for a in &s {
        let mut v = vec![FieldElem::ZERO; dc.dim(0)];
        for i in 0..cx.count(0) {
            let id = CellId::new(0, i);
            let local: FVec = cx.top_coords(id).iter().map(|&tau| a[tau as usize]).collect();
            match dual.space(id).coords(f, &local) {
                Some(c) => v[off[i]..off[i] + c.len()].copy_from_slice(&c),
                None => coords_ok = false,
            }
        }
        to_dual.push(v);
    }
    let witness_dual = coords_ok
        && to_dual
            .iter()
            .all(|v| dc.delta(0).mul_vec(v).map(|w| w.iter().all(|x| x.is_zero())).unwrap_or(false))
        && SpMat::from_dense(f, &to_dual, dc.dim(0)).rank() == s.len();

    Ok(H0HtReport {
        dim_ht,
        dim_h0_dual,
        dim_global_sections: s.len(),
        witness_homology,
        witness_dual,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreePair {
    pub i: usize,
    /// dim H_{t-i}(F)
    pub homology: usize,
    /// dim H^i(F⊥)
    pub dual_cohomology: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DualityReport {
    pub pairs: Vec<DegreePair>,
    pub acyclic: bool,
    pub mismatches: Vec<usize>,
    /// "pass", "fail", or "not applicable" when the sheaf is not locally
    /// acyclic.
    pub status: String,
}

impl DualityReport {
    pub fn ok(&self) -> bool {
        self.status == "pass"
    }
}

/// dim H_{t-i}(F) against dim H^i(F⊥) for 0 ≤ i ≤ t-1.
pub fn verify_poincare(sheaf: &Sheaf) -> Result<DualityReport> {
    let t = sheaf.t();
    let acyclic = sheaf.is_locally_acyclic()?.ok();
    let cc = ChainComplex::from_sheaf(sheaf)?;
    let dc = ChainComplex::from_sheaf(&dual_sheaf(sheaf)?)?;
    let mut pairs = Vec::new();
    let mut mismatches = Vec::new();
    for i in 0..t {
        let p = DegreePair {
            i,
            homology: cc.homology_dim(t - i),
            dual_cohomology: dc.betti(i),
        };
        if p.homology != p.dual_cohomology {
            mismatches.push(i);
        }
        pairs.push(p);
    }
    let status = match (acyclic, mismatches.is_empty()) {
        (false, _) => "not applicable",
        (true, true) => "pass",
        (true, false) => "fail",
    };
    Ok(DualityReport {
        pairs,
        acyclic,
        mismatches,
        status: status.into(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StatementResult {
    pub statement: usize,
    pub checks: usize,
    pub failures: Vec<CellFailure>,
}

impl StatementResult {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExactnessReport {
    pub acyclic: bool,
    pub statements: Vec<StatementResult>,
    /// Exactness of 0 → F_σ → C^{i+1}(σ) → ... → C^t(σ) → F⊥_σ → 0 at every
    /// position; required only when the sheaf is locally acyclic.
    pub long_exact: StatementResult,
}

impl ExactnessReport {
    pub fn ok(&self) -> bool {
        self.statements.iter().all(|s| s.ok()) && (!self.acyclic || self.long_exact.ok())
    }
}

fn fail(cell: CellId, check: &str, detail: String) -> CellFailure {
    CellFailure {
        cell,
        check: check.into(),
        detail,
    }
}

/// e_σ: F⊥_σ → C^t(σ, F) in the sorted top-cell order of the local complex,
/// as a matrix with one column per basis vector of F⊥_σ.
fn embed_dual(sheaf: &Sheaf, dual: &Sheaf, sigma: CellId) -> Result<SpMat> {
    let cx = sheaf.complex();
    let t = sheaf.t();
    let f = sheaf.field();
    let mut tops = cx.up_set(sigma, t)?;
    tops.sort_unstable();
    let basis = dual.space(sigma).basis();
    let mut trip = Vec::new();
    for (p, &tau) in tops.iter().enumerate() {
        let pos = cx.top_position(sigma, tau).expect("top cell above");
        let c = sheaf.space(CellId::new(t, tau as usize)).basis()[0][0];
        for (l, b) in basis.iter().enumerate() {
            if !b[pos].is_zero() {
                trip.push((p, l, f.div(b[pos], c)?));
            }
        }
    }
    Ok(SpMat::from_triplets(f, tops.len(), basis.len(), trip))
}

/// The copy map g: C^i(X, F) → ⊕_{v ∈ X(0)} C^i(v, F) and the difference
/// map δ to ⊕_{ρ ∈ X(1)} C^i(ρ, F).
fn statement_two_maps(sheaf: &Sheaf, cc: &ChainComplex, i: usize) -> Result<(SpMat, SpMat)> {
    let cx = sheaf.complex();
    let f = sheaf.field();
    let off = cc.offsets(i);
    // block positions of (cell of dim 0 or 1, i-cell above it)
    let blocks = |d: usize| -> Result<(Vec<Vec<(u32, usize)>>, usize)> {
        let mut acc = 0;
        let mut out = Vec::with_capacity(cx.count(d));
        for c in 0..cx.count(d) {
            let mut up = cx.up_set(CellId::new(d, c), i)?;
            up.sort_unstable();
            let mut row = Vec::with_capacity(up.len());
            for tau in up {
                row.push((tau, acc));
                acc += sheaf.dim(CellId::new(i, tau as usize));
            }
            out.push(row);
        }
        Ok((out, acc))
    };
    let (vb, vdim) = blocks(0)?;
    let mut gt = Vec::new();
    for row in &vb {
        for &(tau, at) in row {
            for l in 0..sheaf.dim(CellId::new(i, tau as usize)) {
                gt.push((at + l, off[tau as usize] + l, FieldElem::ONE));
            }
        }
    }
    let g = SpMat::from_triplets(f, vdim, cc.dim(i), gt);
    let (eb, edim) = blocks(1)?;
    let mut dt = Vec::new();
    for (e, row) in eb.iter().enumerate() {
        for &v in cx.faces(CellId::new(1, e)) {
            let vrow = &vb[v as usize];
            for &(tau, at) in row {
                let k = vrow.binary_search_by_key(&tau, |&(x, _)| x).expect("edge up-set inside vertex up-set");
                let from = vrow[k].1;
                for l in 0..sheaf.dim(CellId::new(i, tau as usize)) {
                    dt.push((at + l, from + l, FieldElem::ONE));
                }
            }
        }
    }
    let delta = SpMat::from_triplets(f, edim, vdim, dt);
    Ok((g, delta))
}

/// Checks the five exactness statements and, per cell, the long exact
/// sequence.
pub fn verify_exactness(sheaf: &Sheaf) -> Result<ExactnessReport> {
    let cx = sheaf.complex();
    let t = sheaf.t();
    let dual = dual_sheaf(sheaf)?;
    let cc = ChainComplex::from_sheaf(sheaf)?;
    let acyclic = sheaf.is_locally_acyclic()?.ok();
    let mut st: Vec<StatementResult> = (1..=5)
        .map(|k| StatementResult {
            statement: k,
            checks: 0,
            failures: Vec::new(),
        })
        .collect();

    // 1: C_0(X, F) and ⊕_v C^0(v, F) = ⊕_v F_v are the same blocks
    let blocks: usize = (0..cx.count(0)).map(|v| sheaf.dim(CellId::new(0, v))).sum();
    st[0].checks += 1;
    if blocks != cc.dim(0) {
        st[0].failures.push(fail(
            CellId::new(0, 0),
            "statement 1",
            format!("{blocks} vertex coordinates, C_0 has dimension {}", cc.dim(0)),
        ));
    }

    // 2: 0 → C_i → ⊕_v C^i(v) → ⊕_ρ C^i(ρ) exact for 1 ≤ i ≤ t
    for i in 1..=t {
        st[1].checks += 1;
        let (g, d) = statement_two_maps(sheaf, &cc, i)?;
        let rank_g = g.rank();
        let composite_zero = d.matmul(&g)?.is_zero();
        let ker_d = nullity(&d);
        if rank_g != cc.dim(i) || !composite_zero || ker_d != rank_g {
            st[1].failures.push(fail(
                CellId::new(i, 0),
                "statement 2",
                format!(
                    "degree {i}: rank g = {rank_g} of {}, δg = 0: {composite_zero}, dim ker δ = {ker_d}",
                    cc.dim(i)
                ),
            ));
        }
    }

    let mut les = StatementResult {
        statement: 0,
        checks: 0,
        failures: Vec::new(),
    };
    for d in 0..t {
        for c in 0..cx.count(d) {
            let sigma = CellId::new(d, c);
            let lc: LocalComplex = sheaf.local_complex(sigma)?;
            let fdim = sheaf.dim(sigma);
            // 3: F_σ → C^{d+1}(σ) injective, so its transpose is onto
            st[2].checks += 1;
            let r0 = lc.map(d).rank();
            if r0 != fdim {
                st[2].failures.push(fail(sigma, "statement 3", format!("rank {r0} < dim F = {fdim}")));
            }
            // 5: 0 → F⊥_σ → C^t(σ) → C^{t-1}(σ) exact
            st[4].checks += 1;
            let e = embed_dual(sheaf, &dual, sigma)?;
            let ddim = dual.dim(sigma);
            let boundary = lc.map(t - 1).transpose();
            let rank_e = e.rank();
            let composite_zero = boundary.matmul(&e)?.is_zero();
            let ker_b = nullity(&boundary);
            if rank_e != ddim || !composite_zero || ker_b != ddim {
                st[4].failures.push(fail(
                    sigma,
                    "statement 5",
                    format!("rank e = {rank_e} of {ddim}, ∂e = 0: {composite_zero}, dim ker ∂ = {ker_b}"),
                ));
            }
            // the long exact sequence, position by position
            les.checks += 1;
            let mut ranks: Vec<usize> = (d..t).map(|k| lc.map(k).rank()).collect();
            // P_t → F⊥_σ pairs against the embedded dual basis
            let pairing = e.transpose();
            ranks.push(pairing.rank());
            let dims: Vec<usize> = (d..=t).map(|k| lc.dim(k)).chain(std::iter::once(ddim)).collect();
            // dims[m] is the m-th term after 0; ranks[m] is the rank of the map out of it
            let mut bad = None;
            if ranks[0] != dims[0] {
                bad = Some("injectivity at F_σ".to_string());
            }
            for m in 1..dims.len() - 1 {
                if bad.is_none() && dims[m] - ranks[m] != ranks[m - 1] {
                    bad = Some(format!(
                        "at C^{}(σ): kernel {}, image {}",
                        d + m,
                        dims[m] - ranks[m],
                        ranks[m - 1]
                    ));
                }
            }
            if bad.is_none() && ranks[dims.len() - 2] != ddim {
                bad = Some("onto F⊥_σ".to_string());
            }
            if let Some(detail) = bad {
                les.failures.push(fail(sigma, "long exact sequence", detail));
            }
        }
    }

    // 4: C^t(X, F⊥) and ⊕_τ C^t(τ, F) are both the functions on X(t)
    for tau in 0..cx.count(t) {
        let id = CellId::new(t, tau);
        st[3].checks += 1;
        if dual.dim(id) != 1 || sheaf.dim(id) != 1 {
            st[3].failures.push(fail(
                id,
                "statement 4",
                format!("dim F⊥ = {}, dim F = {}", dual.dim(id), sheaf.dim(id)),
            ));
        }
    }

    Ok(ExactnessReport {
        acyclic,
        statements: st,
        long_exact: les,
    })
}
