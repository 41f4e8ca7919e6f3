//! Cup products of sheaf cochains on simplicial complexes, and the
//! multilinear intersection forms on cubical and simplicial complexes.
//!
//! Vertices of a simplicial complex are ordered by their ids. A cochain of
//! degree i assigns each i-cell σ a section α(σ) ∈ F_σ, i.e. a function on
//! the t-cells above σ, so α_{≤τ}(σ) is simply α(σ) evaluated at τ.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::chain::ChainComplex;
use crate::complex::{CellComplex, CellId, CellKey};
use crate::error::{Error, Result};
use crate::gf::{is_zero_vec, span_basis, Echelon, FVec, Field, FieldElem};
use crate::sheaf::Sheaf;

/// Coefficients of a degree-`degree` cochain in the stored section bases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cochain {
    pub degree: usize,
    pub coeffs: FVec,
}

/// Coordinate offsets of the cells of degree `deg` in C^deg (plus a total).
pub fn offsets(sheaf: &Sheaf, deg: usize) -> Vec<usize> {
    let cx = sheaf.complex();
    let mut out = Vec::with_capacity(cx.count(deg) + 1);
    let mut acc = 0;
    for i in 0..cx.count(deg) {
        out.push(acc);
        acc += sheaf.dim(CellId::new(deg, i));
    }
    out.push(acc);
    out
}

impl Cochain {
    pub fn zero(sheaf: &Sheaf, degree: usize) -> Self {
        let n = *offsets(sheaf, degree).last().unwrap();
        Cochain {
            degree,
            coeffs: vec![FieldElem::ZERO; n],
        }
    }

    pub fn random<R: Rng + ?Sized>(sheaf: &Sheaf, degree: usize, rng: &mut R) -> Self {
        let n = *offsets(sheaf, degree).last().unwrap();
        Cochain {
            degree,
            coeffs: sheaf.field().random_vec(n, rng),
        }
    }

    /// The degree-0 cochain that is the constant function 1 everywhere.
    pub fn unit(sheaf: &Sheaf) -> Result<Self> {
        let cx = sheaf.complex();
        let funcs: Vec<FVec> = (0..cx.count(0))
            .map(|i| vec![FieldElem::ONE; cx.top_coords(CellId::new(0, i)).len()])
            .collect();
        Cochain::from_functions(sheaf, 0, &funcs)
    }

    /// Per-cell sections as functions on the top cells above each cell.
    pub fn functions(&self, sheaf: &Sheaf) -> Vec<FVec> {
        sheaf.sections(self.degree, &offsets(sheaf, self.degree), &self.coeffs)
    }

    /// Cochain from per-cell functions; each must lie in F_σ.
    pub fn from_functions(sheaf: &Sheaf, degree: usize, funcs: &[FVec]) -> Result<Self> {
        let cx = sheaf.complex();
        if funcs.len() != cx.count(degree) {
            return Err(Error::Shape {
                context: format!("functions in degree {degree}"),
                expected: cx.count(degree),
                found: funcs.len(),
            });
        }
        let mut coeffs = Vec::new();
        for (i, f) in funcs.iter().enumerate() {
            let c = sheaf
                .space(CellId::new(degree, i))
                .coords(sheaf.field(), f)
                .ok_or_else(|| {
                    Error::Integrity(format!("value at cell ({degree},{i}) is not a section"))
                })?;
            coeffs.extend(c);
        }
        Ok(Cochain { degree, coeffs })
    }

    pub fn add(&self, other: &Cochain) -> Cochain {
        Cochain {
            degree: self.degree,
            coeffs: crate::gf::add_vec(&self.coeffs, &other.coeffs),
        }
    }

    pub fn is_zero(&self) -> bool {
        is_zero_vec(&self.coeffs)
    }

    pub fn coboundary(&self, cc: &ChainComplex) -> Result<Cochain> {
        Ok(Cochain {
            degree: self.degree + 1,
            coeffs: cc.delta(self.degree).mul_vec(&self.coeffs)?,
        })
    }
}

fn require_simplicial(cx: &CellComplex) -> Result<()> {
    if !cx.is_simplicial() {
        return Err(Error::Validation("cup products need a simplicial complex".into()));
    }
    Ok(())
}

/// Values of a ∪ b on each (i+j)-simplex σ = [v_0..v_{i+j}], as functions on
/// the top cells τ above σ: a([v_0..v_i]) at τ times b([v_i..v_{i+j}]) at τ.
pub fn cup_functions(s1: &Sheaf, a: &Cochain, s2: &Sheaf, b: &Cochain) -> Result<Vec<FVec>> {
    let cx = s1.complex();
    require_simplicial(cx)?;
    if !std::sync::Arc::ptr_eq(cx, s2.complex()) {
        return Err(Error::Validation("cup of cochains on different complexes".into()));
    }
    let (i, j) = (a.degree, b.degree);
    if i + j > cx.t() {
        return Err(Error::Range(format!("degree {i} + {j} exceeds t = {}", cx.t())));
    }
    let f = s1.field();
    let fa = a.functions(s1);
    let fb = b.functions(s2);
    let mut out = Vec::with_capacity(cx.count(i + j));
    for s in 0..cx.count(i + j) {
        let sigma = CellId::new(i + j, s);
        let verts = cx.simplex_vertices(sigma).unwrap();
        let front = cx.simplex_index(&verts[..=i]).unwrap();
        let back = cx.simplex_index(&verts[i..]).unwrap();
        let (fid, bid) = (CellId::new(i, front), CellId::new(j, back));
        let vals = cx
            .top_coords(sigma)
            .iter()
            .map(|&tau| {
                let x = fa[front][cx.top_position(fid, tau).unwrap()];
                let y = fb[back][cx.top_position(bid, tau).unwrap()];
                f.mul(x, y)
            })
            .collect();
        out.push(vals);
    }
    Ok(out)
}

/// Cells whose cup value lies outside the local span F_{1,σ} ⊙ F_{2,σ}.
pub fn local_product_failures(s1: &Sheaf, s2: &Sheaf, degree: usize, funcs: &[FVec]) -> Result<Vec<CellId>> {
    let cx = s1.complex();
    let f = s1.field();
    let mut bad = Vec::new();
    for (i, v) in funcs.iter().enumerate() {
        let sigma = CellId::new(degree, i);
        let n = cx.top_coords(sigma).len();
        let mut prods = Vec::new();
        for x in s1.space(sigma).basis() {
            for y in s2.space(sigma).basis() {
                prods.push(f.entrywise_product(x, y)?);
            }
        }
        let mut e = Echelon::new(f.clone(), n);
        for p in span_basis(f, n, &prods) {
            e.insert_dense(&p);
        }
        if !e.contains(v) {
            bad.push(sigma);
        }
    }
    Ok(bad)
}

/// Two sheaves, their product sheaf and the three cochain complexes.
pub struct CupSetup {
    pub s1: Sheaf,
    pub s2: Sheaf,
    pub prod: Sheaf,
    pub c1: ChainComplex,
    pub c2: ChainComplex,
    pub cp: ChainComplex,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CupFailure {
    pub trial: usize,
    pub cell: Option<CellId>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CupReport {
    pub check: String,
    pub degrees: (usize, usize),
    pub trials: usize,
    pub seed: u64,
    pub failures: Vec<CupFailure>,
}

impl CupReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

impl CupSetup {
    pub fn new(s1: &Sheaf, s2: &Sheaf) -> Result<Self> {
        require_simplicial(s1.complex())?;
        let prod = Sheaf::product(&[s1, s2])?;
        Ok(CupSetup {
            c1: ChainComplex::from_sheaf(s1)?,
            c2: ChainComplex::from_sheaf(s2)?,
            cp: ChainComplex::from_sheaf(&prod)?,
            s1: s1.clone(),
            s2: s2.clone(),
            prod,
        })
    }

    pub fn field(&self) -> &Field {
        self.s1.field()
    }

    /// a ∪ b as a cochain of the product sheaf.
    pub fn cup(&self, a: &Cochain, b: &Cochain) -> Result<Cochain> {
        let funcs = cup_functions(&self.s1, a, &self.s2, b)?;
        Cochain::from_functions(&self.prod, a.degree + b.degree, &funcs)
    }

    /// First cell where δ(a∪b) and δa∪b + a∪δb differ.
    pub fn leibniz(&self, a: &Cochain, b: &Cochain) -> Result<Option<CellId>> {
        let lhs = self.cup(a, b)?.coboundary(&self.cp)?;
        let da = a.coboundary(&self.c1)?;
        let db = b.coboundary(&self.c2)?;
        let rhs = self.cup(&da, b)?.add(&self.cup(a, &db)?);
        if lhs == rhs {
            return Ok(None);
        }
        let off = offsets(&self.prod, lhs.degree);
        let k = lhs
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .position(|(x, y)| x != y)
            .unwrap();
        let cell = off.partition_point(|&o| o <= k) - 1;
        Ok(Some(CellId::new(lhs.degree, cell)))
    }

    /// Leibniz identity plus local product membership on seeded random pairs.
    pub fn leibniz_check(&self, i: usize, j: usize, trials: usize, seed: u64) -> Result<CupReport> {
        let t = self.s1.t();
        if i + j + 1 > t {
            return Err(Error::Range(format!("degrees {i} + {j} + 1 exceed t = {t}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut failures = Vec::new();
        for trial in 0..trials {
            let a = Cochain::random(&self.s1, i, &mut rng);
            let b = Cochain::random(&self.s2, j, &mut rng);
            if let Some(cell) = self.leibniz(&a, &b)? {
                failures.push(CupFailure {
                    trial,
                    cell: Some(cell),
                    detail: "δ(a∪b) differs from δa∪b + a∪δb".into(),
                });
            }
            let funcs = cup_functions(&self.s1, &a, &self.s2, &b)?;
            for cell in local_product_failures(&self.s1, &self.s2, i + j, &funcs)? {
                failures.push(CupFailure {
                    trial,
                    cell: Some(cell),
                    detail: "cup value outside the local product span".into(),
                });
            }
        }
        Ok(CupReport {
            check: "leibniz".into(),
            degrees: (i, j),
            trials,
            seed,
            failures,
        })
    }

    /// For random cocycles a of degree i and b = δc with c of degree j-1:
    /// a∪b = δ(a∪c), and a∪b is found in im δ by solving.
    pub fn cocycle_coboundary_check(&self, i: usize, j: usize, trials: usize, seed: u64) -> Result<CupReport> {
        if j == 0 || i + j > self.s1.t() {
            return Err(Error::Range(format!("degrees ({i}, {j}) unsuitable")));
        }
        let f = self.field().clone();
        let z = if i < self.s1.t() {
            self.c1.delta(i).kernel_basis()
        } else {
            Vec::new()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut failures = Vec::new();
        let solver = self.cp.delta(i + j - 1);
        for trial in 0..trials {
            let coeffs: FVec = f.random_vec(z.len(), &mut rng);
            let a = Cochain {
                degree: i,
                coeffs: f.combine(&coeffs, &z, self.c1.dim(i)),
            };
            let c = Cochain::random(&self.s2, j - 1, &mut rng);
            let b = c.coboundary(&self.c2)?;
            let ab = self.cup(&a, &b)?;
            let want = self.cup(&a, &c)?.coboundary(&self.cp)?;
            if ab != want {
                failures.push(CupFailure {
                    trial,
                    cell: None,
                    detail: "a∪δc differs from δ(a∪c)".into(),
                });
            }
            match solver.solve(&ab.coeffs)? {
                Some(x) if solver.mul_vec(&x)? == ab.coeffs => {}
                _ => failures.push(CupFailure {
                    trial,
                    cell: None,
                    detail: "a∪δc is not a coboundary".into(),
                }),
            }
        }
        Ok(CupReport {
            check: "cocycle-coboundary".into(),
            degrees: (i, j),
            trials,
            seed,
            failures,
        })
    }
}

/// A multilinear form Σ_terms Π_k α_k(cell_k) evaluated at a top cell.
/// Each factor is (cell index in degree `degrees[k]`, position of the top
/// cell among the cell's top coordinates).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MultilinearStencil {
    pub degrees: Vec<usize>,
    pub terms: Vec<Vec<(u32, u32)>>,
}

impl MultilinearStencil {
    pub fn arity(&self) -> usize {
        self.degrees.len()
    }

    /// Evaluates on cochains of the given sheaves.
    pub fn evaluate(&self, sheaves: &[&Sheaf], args: &[&Cochain]) -> Result<FieldElem> {
        if sheaves.len() != self.arity() || args.len() != self.arity() {
            return Err(Error::Shape {
                context: "multilinear form arguments".into(),
                expected: self.arity(),
                found: args.len(),
            });
        }
        for (k, a) in args.iter().enumerate() {
            if a.degree != self.degrees[k] {
                return Err(Error::Range(format!(
                    "argument {k} has degree {}, form expects {}",
                    a.degree, self.degrees[k]
                )));
            }
        }
        let funcs: Vec<Vec<FVec>> = args
            .iter()
            .zip(sheaves)
            .map(|(a, s)| a.functions(s))
            .collect();
        Ok(self.evaluate_functions(sheaves[0].field(), &funcs))
    }

    /// Evaluates on per-cell functions directly.
    pub fn evaluate_functions(&self, field: &Field, funcs: &[Vec<FVec>]) -> FieldElem {
        let mut acc = FieldElem::ZERO;
        for term in &self.terms {
            let mut p = FieldElem::ONE;
            for (k, &(c, pos)) in term.iter().enumerate() {
                p = field.mul(p, funcs[k][c as usize][pos as usize]);
                if p.is_zero() {
                    break;
                }
            }
            acc = field.add(acc, p);
        }
        acc
    }
}

/// Σ_τ (((α_1 ∪ α_2) ∪ α_3) ∪ ...)(τ) with deg α_k = degrees[k] summing to t.
pub fn simplicial_stencil(cx: &CellComplex, degrees: &[usize]) -> Result<MultilinearStencil> {
    require_simplicial(cx)?;
    let t = cx.t();
    if degrees.iter().sum::<usize>() != t {
        return Err(Error::Range(format!("degrees {degrees:?} do not sum to t = {t}")));
    }
    let mut terms = Vec::with_capacity(cx.count(t));
    for tau in 0..cx.count(t) {
        let verts = cx.simplex_vertices(CellId::new(t, tau)).unwrap();
        let mut start = 0;
        let mut term = Vec::with_capacity(degrees.len());
        for &l in degrees {
            let c = cx.simplex_index(&verts[start..=start + l]).unwrap();
            let pos = cx.top_position(CellId::new(l, c), tau as u32).unwrap();
            term.push((c as u32, pos as u32));
            start += l;
        }
        terms.push(term);
    }
    Ok(MultilinearStencil {
        degrees: degrees.to_vec(),
        terms,
    })
}

fn cube_cells(cx: &CellComplex, t: usize) -> Result<Vec<(u32, u32, Vec<usize>)>> {
    if !cx.is_cubical() || cx.t() != t {
        return Err(Error::Validation(format!("form needs a {t}-dimensional cubical complex")));
    }
    Ok(cx
        .cells(t)
        .iter()
        .enumerate()
        .map(|(i, k)| {
            let CellKey::Cube { base, labels, .. } = k else { unreachable!() };
            (i as u32, *base, labels.iter().map(|&a| a as usize).collect())
        })
        .collect())
}

/// Factor for the edge in direction `dir` with base `base`, label `label`
/// and bits for the two other directions (in increasing direction order),
/// evaluated at top cell `top`.
fn edge_factor(cx: &CellComplex, dir: u8, base: u32, label: usize, bits: Vec<u8>, top: u32) -> Result<(u32, u32)> {
    let key = CellKey::Cube {
        dirs: vec![dir],
        base,
        labels: vec![label as u16],
        bits,
    };
    let id = cx.lookup(&key)?;
    let pos = cx
        .top_position(id, top)
        .ok_or_else(|| Error::Integrity(format!("{key:?} is not a face of top cell {top}")))?;
    Ok((id.index as u32, pos as u32))
}

/// The 2D intersection form on a square complex:
/// α_1(a_v g; a_u, 1) α_2(g; 0, a_v) + α_1(a_u g; 1, a_v) α_2(g; a_u, 0),
/// summed over squares (g; a_u, a_v).
pub fn cubical_bilinear_stencil(cx: &CellComplex) -> Result<MultilinearStencil> {
    let mut terms = Vec::new();
    for (sq, g, a) in cube_cells(cx, 2)? {
        let (au, av) = (a[0], a[1]);
        let avg = cx.act(1, av, g);
        let aug = cx.act(0, au, g);
        terms.push(vec![
            edge_factor(cx, 0, avg, au, vec![1], sq)?,
            edge_factor(cx, 1, g, av, vec![0], sq)?,
        ]);
        terms.push(vec![
            edge_factor(cx, 1, aug, av, vec![1], sq)?,
            edge_factor(cx, 0, g, au, vec![0], sq)?,
        ]);
    }
    Ok(MultilinearStencil {
        degrees: vec![1, 1],
        terms,
    })
}

/// The 3D intersection form: six products per cube (g; a_u, a_v, a_w), one
/// for each monotone edge path from the far corner to the base corner,
/// with α_1 on the first edge, α_2 on the second and α_3 on the last.
pub fn cubical_trilinear_stencil(cx: &CellComplex) -> Result<MultilinearStencil> {
    let mut terms = Vec::new();
    for (cu, g, a) in cube_cells(cx, 3)? {
        let (au, av, aw) = (a[0], a[1], a[2]);
        let act = |j: usize, l: usize, v: u32| cx.act(j, l, v);
        let (aug, avg, awg) = (act(0, au, g), act(1, av, g), act(2, aw, g));
        let avawg = act(1, av, awg);
        let auawg = act(0, au, awg);
        let auavg = act(0, au, avg);
        let e = |dir: u8, base: u32, label: usize, bits: [u8; 2]| edge_factor(cx, dir, base, label, bits.to_vec(), cu);
        // u-edges carry bits (v, w), v-edges (u, w), w-edges (u, v)
        terms.push(vec![e(0, avawg, au, [1, 1])?, e(1, awg, av, [0, 1])?, e(2, g, aw, [0, 0])?]);
        terms.push(vec![e(0, avawg, au, [1, 1])?, e(2, avg, aw, [0, 1])?, e(1, g, av, [0, 0])?]);
        terms.push(vec![e(1, auawg, av, [1, 1])?, e(2, aug, aw, [1, 0])?, e(0, g, au, [0, 0])?]);
        terms.push(vec![e(1, auawg, av, [1, 1])?, e(0, awg, au, [0, 1])?, e(2, g, aw, [0, 0])?]);
        terms.push(vec![e(2, auavg, aw, [1, 1])?, e(0, avg, au, [1, 0])?, e(1, g, av, [0, 0])?]);
        terms.push(vec![e(2, auavg, aw, [1, 1])?, e(1, aug, av, [1, 0])?, e(0, g, au, [0, 0])?]);
    }
    Ok(MultilinearStencil {
        degrees: vec![1, 1, 1],
        terms,
    })
}
