//! Cochain complexes of sheaves, cohomology, and CSS codes at a level.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::complex::CellId;
use crate::error::{Error, Result};
use crate::gf::{add_assign, quotient_reps, weight, Echelon, FVec, Field, FieldElem, SpMat};
use crate::sheaf::Sheaf;

/// Based cochain spaces C^0..C^t and coboundaries δ^0..δ^{t-1}.
#[derive(Clone, Debug)]
pub struct ChainComplex {
    field: Field,
    dims: Vec<usize>,
    delta: Vec<SpMat>,
    // offsets[i][c] = first coordinate of cell c in C^i (with a final total)
    offsets: Vec<Vec<usize>>,
}

/// Cocycle or cycle side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    Cohomology,
    Homology,
}

/// Z, B and representatives of Z/B in one degree.
#[derive(Clone, Debug)]
pub struct Cohomology {
    pub degree: usize,
    pub side: Side,
    pub dim: usize,
    pub z_basis: Vec<FVec>,
    pub b_basis: Vec<FVec>,
    pub reps: Vec<FVec>,
}

impl ChainComplex {
    /// C^i = ⊕_{σ∈X(i)} F_σ, δ^i α(τ) = Σ_{σ⋖τ} res_{σ,τ} α(σ).
    pub fn from_sheaf(sheaf: &Sheaf) -> Result<Self> {
        let cx = sheaf.complex();
        let t = cx.t();
        let mut offsets = Vec::with_capacity(t + 1);
        let mut dims = Vec::with_capacity(t + 1);
        for d in 0..=t {
            let mut off = Vec::with_capacity(cx.count(d) + 1);
            let mut acc = 0;
            for i in 0..cx.count(d) {
                off.push(acc);
                acc += sheaf.dim(CellId::new(d, i));
            }
            off.push(acc);
            offsets.push(off);
            dims.push(acc);
        }
        let mut delta = Vec::with_capacity(t);
        for d in 0..t {
            let mut trip = Vec::new();
            for tau in 0..cx.count(d + 1) {
                let tid = CellId::new(d + 1, tau);
                for &s in cx.faces(tid) {
                    sheaf.restriction_triplets(
                        CellId::new(d, s as usize),
                        tid,
                        offsets[d + 1][tau],
                        offsets[d][s as usize],
                        &mut trip,
                    )?;
                }
            }
            delta.push(SpMat::from_triplets(sheaf.field(), dims[d + 1], dims[d], trip));
        }
        let c = ChainComplex {
            field: sheaf.field().clone(),
            dims,
            delta,
            offsets,
        };
        c.check_dd_zero()?;
        Ok(c)
    }

    /// A complex from explicit coboundary matrices.
    pub fn from_coboundaries(field: &Field, dims: Vec<usize>, delta: Vec<SpMat>) -> Result<Self> {
        if delta.len() + 1 != dims.len() {
            return Err(Error::Validation("need one coboundary per consecutive degree pair".into()));
        }
        for (i, d) in delta.iter().enumerate() {
            if d.cols() != dims[i] || d.rows() != dims[i + 1] {
                return Err(Error::Validation(format!("δ^{i} has the wrong shape")));
            }
        }
        let offsets = dims.iter().map(|&n| (0..=n).collect()).collect();
        let c = ChainComplex {
            field: field.clone(),
            dims,
            delta,
            offsets,
        };
        c.check_dd_zero()?;
        Ok(c)
    }

    /// δ^{i+1} δ^i = 0 for every i.
    pub fn check_dd_zero(&self) -> Result<()> {
        for i in 0..self.delta.len().saturating_sub(1) {
            let p = self.delta[i + 1].matmul(&self.delta[i])?;
            if !p.is_zero() {
                return Err(Error::Integrity(format!(
                    "δ^{} δ^{i} has {} nonzero entries",
                    i + 1,
                    p.nnz()
                )));
            }
        }
        Ok(())
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn t(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, i: usize) -> usize {
        self.dims[i]
    }

    /// δ^i : C^i -> C^{i+1}.
    pub fn delta(&self, i: usize) -> &SpMat {
        &self.delta[i]
    }

    /// ∂_i = (δ^{i-1})^T : C_i -> C_{i-1}.
    pub fn boundary(&self, i: usize) -> SpMat {
        self.delta[i - 1].transpose()
    }

    /// Coordinate offsets of the cells of degree i (plus a final total).
    pub fn offsets(&self, i: usize) -> &[usize] {
        &self.offsets[i]
    }

    /// (cell index, local basis index) of coordinate j in C^i.
    pub fn basis_label(&self, i: usize, j: usize) -> (usize, usize) {
        let off = &self.offsets[i];
        let c = off.partition_point(|&o| o <= j) - 1;
        (c, j - off[c])
    }

    fn standard_basis(n: usize) -> Vec<FVec> {
        (0..n)
            .map(|k| {
                let mut v = vec![FieldElem::ZERO; n];
                v[k] = FieldElem::ONE;
                v
            })
            .collect()
    }

    /// Z^i, B^i (cohomology) or Z_i, B_i (homology) with representatives.
    pub fn cohomology(&self, i: usize, side: Side) -> Result<Cohomology> {
        let t = self.t();
        if i > t {
            return Err(Error::Range(format!("degree {i} in a complex of length {t}")));
        }
        let n = self.dims[i];
        let (z_basis, b_basis) = match side {
            Side::Cohomology => {
                let z = if i < t {
                    self.delta[i].kernel_basis()
                } else {
                    Self::standard_basis(n)
                };
                let b = if i > 0 {
                    self.delta[i - 1].image_basis()
                } else {
                    Vec::new()
                };
                (z, b)
            }
            Side::Homology => {
                let z = if i > 0 {
                    self.delta[i - 1].transpose().kernel_basis()
                } else {
                    Self::standard_basis(n)
                };
                let b = if i < t {
                    self.delta[i].row_space_basis()
                } else {
                    Vec::new()
                };
                (z, b)
            }
        };
        let reps = quotient_reps(&self.field, n, &z_basis, &b_basis)?;
        Ok(Cohomology {
            degree: i,
            side,
            dim: reps.len(),
            z_basis,
            b_basis,
            reps,
        })
    }

    /// dim H^i from ranks alone.
    pub fn betti(&self, i: usize) -> usize {
        let t = self.t();
        let rank_out = if i < t { self.delta[i].rank() } else { 0 };
        let rank_in = if i > 0 { self.delta[i - 1].rank() } else { 0 };
        self.dims[i] - rank_out - rank_in
    }

    /// dim H_i from the ranks of the boundary maps ∂_i and ∂_{i+1}.
    pub fn homology_dim(&self, i: usize) -> usize {
        let t = self.t();
        let rank_out = if i > 0 { self.boundary(i).rank() } else { 0 };
        let rank_in = if i < t { self.boundary(i + 1).rank() } else { 0 };
        self.dims[i] - rank_out - rank_in
    }
}

/// A CSS code read off a cochain complex at level ℓ.
#[derive(Clone, Debug)]
pub struct CssCode {
    pub level: usize,
    pub n: usize,
    pub k: usize,
    /// X checks (δ^{ℓ-1})^T, m_x × n.
    pub hx: SpMat,
    /// Z checks δ^ℓ, m_z × n.
    pub hz: SpMat,
}

impl CssCode {
    pub fn from_complex(cx: &ChainComplex, level: usize) -> Result<Self> {
        let t = cx.t();
        if level == 0 || level >= t {
            return Err(Error::Range(format!("level {level} outside 1..={}", t.saturating_sub(1))));
        }
        let hx = cx.delta(level - 1).transpose();
        let hz = cx.delta(level).clone();
        let n = cx.dim(level);
        let k = n - hx.rank() - hz.rank();
        Ok(CssCode {
            level,
            n,
            k,
            hx,
            hz,
        })
    }

    pub fn field(&self) -> &Field {
        self.hx.field()
    }

    /// Hx Hz^T = 0.
    pub fn commutes(&self) -> bool {
        self.hx
            .matmul(&self.hz.transpose())
            .map(|m| m.is_zero())
            .unwrap_or(false)
    }

    pub fn metadata(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.n,
            "m_x": self.hx.rows(),
            "m_z": self.hz.rows(),
            "k": self.k,
            "level": self.level,
            "field": self.field().spec(),
        })
    }
}

/// Alist-style text: header "cols rows", max column/row weights, the weight
/// lists, then per column its 1-based row indices and per row its 1-based
/// column indices. Over F_q with q > 2 every index is followed by its value.
pub fn to_alist(m: &SpMat) -> String {
    let binary = m.field().q() == 2;
    let t = m.transpose();
    let col_w: Vec<usize> = (0..m.cols()).map(|j| t.row(j).count()).collect();
    let row_w: Vec<usize> = (0..m.rows()).map(|i| m.row(i).count()).collect();
    let mut s = String::new();
    s += &format!("{} {}\n", m.cols(), m.rows());
    s += &format!(
        "{} {}\n",
        col_w.iter().max().copied().unwrap_or(0),
        row_w.iter().max().copied().unwrap_or(0)
    );
    let join = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    s += &join(&col_w);
    s += "\n";
    s += &join(&row_w);
    s += "\n";
    let fmt_row = |it: Vec<(usize, FieldElem)>| {
        it.into_iter()
            .map(|(i, v)| {
                if binary {
                    format!("{}", i + 1)
                } else {
                    format!("{} {}", i + 1, v.0)
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    };
    for j in 0..m.cols() {
        s += &fmt_row(t.row(j).collect());
        s += "\n";
    }
    for i in 0..m.rows() {
        s += &fmt_row(m.row(i).collect());
        s += "\n";
    }
    s
}

/// Budget for distance computation.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DistanceBudget {
    /// Exhaustive enumeration when q^{dim Z} is at most this.
    pub cap: u64,
    pub trials: usize,
    pub seed: u64,
}

impl Default for DistanceBudget {
    fn default() -> Self {
        DistanceBudget {
            cap: 1 << 22,
            trials: 200,
            seed: 0,
        }
    }
}

/// Minimum weight of a nontrivial coset on one side.
#[derive(Clone, Debug, Serialize)]
pub struct SideDistance {
    /// "X": cocycles modulo coboundaries at level ℓ; "Z": cycles modulo boundaries.
    pub side: String,
    pub exact: bool,
    pub weight: Option<usize>,
    pub witness: Vec<(usize, u16)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DistanceReport {
    pub d_exact: Option<usize>,
    pub d_upper: Option<usize>,
    pub attained_by: Option<String>,
    pub sides: Vec<SideDistance>,
    pub weight_convention: String,
    pub seed: u64,
    pub trials: usize,
}

fn sparse_witness(v: &[FieldElem]) -> Vec<(usize, u16)> {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (i, x.0))
        .collect()
}

fn exhaustive_min(field: &Field, n: usize, b: &[FVec], reps: &[FVec]) -> Option<(usize, FVec)> {
    let q = field.q();
    let basis: Vec<&FVec> = b.iter().chain(reps).collect();
    let nb = b.len();
    let mut digits = vec![0usize; basis.len()];
    let mut v = vec![FieldElem::ZERO; n];
    let mut nonzero_reps = 0usize;
    let mut best: Option<(usize, FVec)> = None;
    'outer: loop {
        // advance the counter, updating v incrementally
        let mut pos = 0;
        loop {
            if pos == basis.len() {
                break 'outer;
            }
            let old = digits[pos];
            let new = (old + 1) % q;
            let delta = FieldElem((old ^ new) as u16);
            field.axpy(&mut v, delta, basis[pos]);
            if pos >= nb {
                if old == 0 {
                    nonzero_reps += 1;
                }
                if new == 0 {
                    nonzero_reps -= 1;
                }
            }
            digits[pos] = new;
            if new != 0 {
                break;
            }
            pos += 1;
        }
        if nonzero_reps > 0 {
            let w = weight(&v);
            if best.as_ref().is_none_or(|(bw, _)| w < *bw) {
                best = Some((w, v.clone()));
            }
        }
    }
    best
}

fn random_min(
    field: &Field,
    n: usize,
    moves: &[FVec],
    b: &[FVec],
    reps: &[FVec],
    trials: usize,
    rng: &mut ChaCha8Rng,
) -> Option<(usize, FVec)> {
    if reps.is_empty() {
        return None;
    }
    let mut best: Option<(usize, FVec)> = None;
    for _ in 0..trials {
        let mut v = vec![FieldElem::ZERO; n];
        let mut coeffs: FVec = field.random_vec(reps.len(), rng);
        if coeffs.iter().all(|c| c.is_zero()) {
            let k = rand::Rng::gen_range(rng, 0..reps.len());
            coeffs[k] = field.random_nonzero(rng);
        }
        for (c, r) in coeffs.iter().zip(reps) {
            field.axpy(&mut v, *c, r);
        }
        for g in b {
            field.axpy(&mut v, field.random(rng), g);
        }
        let mut w = weight(&v);
        loop {
            let mut improved = false;
            for g in moves {
                for c in field.elements().skip(1) {
                    let mut u = v.clone();
                    field.axpy(&mut u, c, g);
                    let wu = weight(&u);
                    if wu < w {
                        v = u;
                        w = wu;
                        improved = true;
                    }
                }
            }
            if !improved {
                break;
            }
        }
        if best.as_ref().is_none_or(|(bw, _)| w < *bw) {
            best = Some((w, v));
        }
    }
    best
}

fn side_distance(
    label: &str,
    field: &Field,
    checks: &SpMat,
    gens: &SpMat,
    budget: &DistanceBudget,
    rng: &mut ChaCha8Rng,
) -> Result<SideDistance> {
    let n = checks.cols();
    let z = checks.kernel_basis();
    let b = gens.row_space_basis();
    let reps = quotient_reps(field, n, &z, &b)?;
    if reps.is_empty() {
        return Ok(SideDistance {
            side: label.into(),
            exact: true,
            weight: None,
            witness: Vec::new(),
        });
    }
    let log_q = field.r() as f64;
    let exhaustive = (z.len() as f64) * log_q <= (budget.cap as f64).log2();
    let found = if exhaustive {
        exhaustive_min(field, n, &b, &reps)
    } else {
        let moves: Vec<FVec> = (0..gens.rows())
            .map(|i| {
                let mut v = vec![FieldElem::ZERO; n];
                for (c, x) in gens.row(i) {
                    v[c] = x;
                }
                v
            })
            .collect();
        random_min(field, n, &moves, &b, &reps, budget.trials, rng)
    };
    let (w, v) = found.expect("nontrivial cosets exist");
    // the witness must be a nontrivial coset element
    let in_z = checks.mul_vec(&v)?.iter().all(|x| x.is_zero());
    let mut be = Echelon::new(field.clone(), n);
    for g in &b {
        be.insert_dense(g);
    }
    if !in_z || be.contains(&v) {
        return Err(Error::Integrity(format!("{label} distance witness is trivial")));
    }
    Ok(SideDistance {
        side: label.into(),
        exact: exhaustive,
        weight: Some(w),
        witness: sparse_witness(&v),
    })
}

/// Distance of a CSS code: min over both sides of the lightest nontrivial
/// coset element; weight counts nonzero field entries.
pub fn distance_bounds(code: &CssCode, budget: &DistanceBudget) -> Result<DistanceReport> {
    let field = code.field().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let x = side_distance("X", &field, &code.hz, &code.hx, budget, &mut rng)?;
    let zs = side_distance("Z", &field, &code.hx, &code.hz, budget, &mut rng)?;
    let sides = vec![x, zs];
    let best = sides
        .iter()
        .filter_map(|s| s.weight.map(|w| (w, s)))
        .min_by_key(|(w, _)| *w);
    let (d_exact, d_upper, attained_by) = match best {
        None => (None, None, None),
        Some((w, s)) => {
            let all_exact = sides.iter().all(|s| s.exact);
            (all_exact.then_some(w), Some(w), Some(s.side.clone()))
        }
    };
    Ok(DistanceReport {
        d_exact,
        d_upper,
        attained_by,
        sides,
        weight_convention: "nonzero field entries".into(),
        seed: budget.seed,
        trials: budget.trials,
    })
}

/// Adds `src` into `dst` (used by callers assembling cochains).
pub fn accumulate(dst: &mut FVec, src: &[FieldElem]) {
    add_assign(dst, src);
}
