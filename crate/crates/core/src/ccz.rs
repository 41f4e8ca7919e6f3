//! CCZ codes: trilinear forms over physical qudits, certification that they
//! are constant on cohomology classes, gate counts, the logical tensor T and
//! lower bounds on its subrank.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::chain::{ChainComplex, Side};
use crate::cup::MultilinearStencil;
use crate::error::{Error, Result};
use crate::gf::{add_vec, quotient_reps, FVec, Field, FieldElem, SpMat};
use crate::sheaf::Sheaf;

/// f(x, y, z) = Σ_e a_e x_{j1} y_{j2} z_{j3} with entries sorted by index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrilinearForm {
    field: Field,
    dims: [usize; 3],
    entries: Vec<([u32; 3], FieldElem)>,
}

impl TrilinearForm {
    /// Sums duplicate indices and drops zeros.
    pub fn from_entries(field: &Field, dims: [usize; 3], entries: Vec<([u32; 3], FieldElem)>) -> Result<Self> {
        let mut acc: BTreeMap<[u32; 3], FieldElem> = BTreeMap::new();
        for (j, a) in entries {
            for k in 0..3 {
                if j[k] as usize >= dims[k] {
                    return Err(Error::Range(format!("index {} on leg {k} of size {}", j[k], dims[k])));
                }
            }
            let e = acc.entry(j).or_insert(FieldElem::ZERO);
            *e = field.add(*e, a);
        }
        Ok(TrilinearForm {
            field: field.clone(),
            dims,
            entries: acc.into_iter().filter(|(_, a)| !a.is_zero()).collect(),
        })
    }

    /// Σ_i x_i y_i z_i.
    pub fn diagonal(field: &Field, n: usize) -> Self {
        TrilinearForm {
            field: field.clone(),
            dims: [n; 3],
            entries: (0..n as u32).map(|i| ([i, i, i], FieldElem::ONE)).collect(),
        }
    }

    /// Expands a three-argument stencil in the section bases of the sheaves.
    /// Only triples sharing a top cell are ever produced.
    pub fn from_stencil(stencil: &MultilinearStencil, sheaves: [&Sheaf; 3]) -> Result<Self> {
        if stencil.arity() != 3 {
            return Err(Error::Range(format!("stencil of arity {}", stencil.arity())));
        }
        let field = sheaves[0].field();
        let offs: Vec<Vec<usize>> = (0..3)
            .map(|k| crate::cup::offsets(sheaves[k], stencil.degrees[k]))
            .collect();
        let dims = [*offs[0].last().unwrap(), *offs[1].last().unwrap(), *offs[2].last().unwrap()];
        let cx = sheaves[0].complex();
        let mut raw = Vec::new();
        for term in &stencil.terms {
            // basis values of each factor at its top cell
            let legs: Vec<Vec<(u32, FieldElem)>> = (0..3)
                .map(|k| {
                    let (c, pos) = term[k];
                    let sp = sheaves[k].space(crate::complex::CellId::new(stencil.degrees[k], c as usize));
                    sp.basis()
                        .iter()
                        .enumerate()
                        .map(|(l, b)| ((offs[k][c as usize] + l) as u32, b[pos as usize]))
                        .filter(|(_, v)| !v.is_zero())
                        .collect()
                })
                .collect();
            for &(j1, v1) in &legs[0] {
                for &(j2, v2) in &legs[1] {
                    let p = field.mul(v1, v2);
                    for &(j3, v3) in &legs[2] {
                        raw.push(([j1, j2, j3], field.mul(p, v3)));
                    }
                }
            }
        }
        let _ = cx;
        TrilinearForm::from_entries(field, dims, raw)
    }

    /// Evaluates `eval` on every triple of standard basis vectors, after
    /// spot-checking trilinearity on seeded random inputs.
    pub fn materialize(
        field: &Field,
        dims: [usize; 3],
        eval: impl Fn(&[FieldElem], &[FieldElem], &[FieldElem]) -> FieldElem,
        seed: u64,
    ) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for trial in 0..8 {
            let mut v: Vec<FVec> = (0..3).map(|k| field.random_vec(dims[k], &mut rng)).collect();
            let base = eval(&v[0], &v[1], &v[2]);
            for leg in 0..3 {
                let w = field.random_vec(dims[leg], &mut rng);
                let c = field.random(&mut rng);
                let saved = v[leg].clone();
                let mut mixed = saved.clone();
                field.axpy(&mut mixed, c, &w);
                v[leg] = w;
                let fw = eval(&v[0], &v[1], &v[2]);
                v[leg] = mixed;
                let fm = eval(&v[0], &v[1], &v[2]);
                v[leg] = saved;
                if fm != field.add(base, field.mul(c, fw)) {
                    return Err(Error::Validation(format!(
                        "form is not linear in argument {leg} (spot check {trial})"
                    )));
                }
            }
        }
        let unit = |n: usize, i: usize| {
            let mut e = vec![FieldElem::ZERO; n];
            e[i] = FieldElem::ONE;
            e
        };
        let mut entries = Vec::new();
        for a in 0..dims[0] {
            let x = unit(dims[0], a);
            for b in 0..dims[1] {
                let y = unit(dims[1], b);
                for c in 0..dims[2] {
                    let v = eval(&x, &y, &unit(dims[2], c));
                    if !v.is_zero() {
                        entries.push(([a as u32, b as u32, c as u32], v));
                    }
                }
            }
        }
        TrilinearForm::from_entries(field, dims, entries)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn entries(&self) -> &[([u32; 3], FieldElem)] {
        &self.entries
    }

    pub fn evaluate(&self, x: &[FieldElem], y: &[FieldElem], z: &[FieldElem]) -> FieldElem {
        let f = &self.field;
        self.entries.iter().fold(FieldElem::ZERO, |acc, &([a, b, c], v)| {
            let (xa, yb, zc) = (x[a as usize], y[b as usize], z[c as usize]);
            if xa.is_zero() || yb.is_zero() || zc.is_zero() {
                return acc;
            }
            f.add(acc, f.mul(f.mul(v, xa), f.mul(yb, zc)))
        })
    }

    /// Number of physical CCZ gates.
    pub fn n_ccz(&self) -> usize {
        self.entries.len()
    }

    /// Largest number of gates touching one qudit, per leg.
    pub fn leg_weights(&self) -> [usize; 3] {
        let mut out = [0; 3];
        for (k, o) in out.iter_mut().enumerate() {
            let mut count = vec![0usize; self.dims[k]];
            for (j, _) in &self.entries {
                count[j[k] as usize] += 1;
            }
            *o = count.into_iter().max().unwrap_or(0);
        }
        out
    }

    pub fn w_ccz(&self) -> usize {
        self.leg_weights().into_iter().max().unwrap()
    }

    /// One line "CCZ j1 j2 j3 a" per gate, a as its integer encoding.
    pub fn gate_list(&self) -> String {
        self.entries
            .iter()
            .map(|([a, b, c], v)| format!("CCZ {a} {b} {c} {}\n", v.0))
            .collect()
    }
}

/// Cocycles, coboundaries and class representatives of one code.
#[derive(Clone, Debug)]
pub struct CodeSpaces {
    pub n: usize,
    pub z_basis: Vec<FVec>,
    pub b_basis: Vec<FVec>,
    pub reps: Vec<FVec>,
    /// δ^{ℓ-1}, when known; coboundaries are then sampled as δc.
    pub coboundary: Option<SpMat>,
}

impl CodeSpaces {
    /// Z^ℓ, B^ℓ and representatives of H^ℓ.
    pub fn from_chain(cc: &ChainComplex, level: usize) -> Result<Self> {
        let h = cc.cohomology(level, Side::Cohomology)?;
        Ok(CodeSpaces {
            n: cc.dim(level),
            z_basis: h.z_basis,
            b_basis: h.b_basis,
            reps: h.reps,
            coboundary: (level > 0).then(|| cc.delta(level - 1).clone()),
        })
    }

    pub fn new(field: &Field, n: usize, z_basis: Vec<FVec>, b_basis: Vec<FVec>) -> Result<Self> {
        let reps = quotient_reps(field, n, &z_basis, &b_basis)?;
        Ok(CodeSpaces {
            n,
            z_basis,
            b_basis,
            reps,
            coboundary: None,
        })
    }

    pub fn k(&self) -> usize {
        self.reps.len()
    }

    /// Uniform on Z: Z is the direct sum of span(reps) and B.
    pub fn random_cocycle<R: Rng + ?Sized>(&self, field: &Field, rng: &mut R) -> FVec {
        let c = field.random_vec(self.reps.len(), rng);
        add_vec(&field.combine(&c, &self.reps, self.n), &self.random_coboundary(field, rng))
    }

    /// Uniform on B.
    pub fn random_coboundary<R: Rng + ?Sized>(&self, field: &Field, rng: &mut R) -> FVec {
        match &self.coboundary {
            Some(d) => {
                let c = field.random_vec(d.cols(), rng);
                d.mul_vec(&c).expect("coboundary map shape")
            }
            None => {
                let c = field.random_vec(self.b_basis.len(), rng);
                field.combine(&c, &self.b_basis, self.n)
            }
        }
    }
}

fn sparse(v: &[FieldElem]) -> Vec<(usize, u16)> {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (i, x.0))
        .collect()
}

/// A trial where shifting by coboundaries changed the value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertFailure {
    pub trial: usize,
    pub zeta: Vec<Vec<(usize, u16)>>,
    pub beta: Vec<Vec<(usize, u16)>>,
    pub unshifted: u16,
    pub shifted: u16,
}

/// Result of an invariance certification.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certification {
    pub mode: String,
    pub trials: usize,
    pub seed: u64,
    pub passed: usize,
    pub failed: usize,
    /// At most a handful of witnesses are kept.
    pub failures: Vec<CertFailure>,
}

impl Certification {
    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

const MAX_WITNESSES: usize = 5;

/// Checks f(ζ_1+β_1, ..., ζ_m+β_m) = f(ζ_1, ..., ζ_m) on seeded random
/// cocycles ζ_i and coboundaries β_i.
pub fn certify(
    field: &Field,
    eval: impl Fn(&[&[FieldElem]]) -> FieldElem,
    spaces: &[&CodeSpaces],
    trials: usize,
    seed: u64,
) -> Certification {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Certification {
        mode: "randomized".into(),
        trials,
        seed,
        passed: 0,
        failed: 0,
        failures: Vec::new(),
    };
    for trial in 0..trials {
        let zeta: Vec<FVec> = spaces.iter().map(|s| s.random_cocycle(field, &mut rng)).collect();
        let beta: Vec<FVec> = spaces.iter().map(|s| s.random_coboundary(field, &mut rng)).collect();
        let shifted: Vec<FVec> = zeta.iter().zip(&beta).map(|(z, b)| add_vec(z, b)).collect();
        let a = eval(&zeta.iter().map(|v| v.as_slice()).collect::<Vec<_>>());
        let b = eval(&shifted.iter().map(|v| v.as_slice()).collect::<Vec<_>>());
        if a == b {
            out.passed += 1;
        } else {
            out.failed += 1;
            if out.failures.len() < MAX_WITNESSES {
                out.failures.push(CertFailure {
                    trial,
                    zeta: zeta.iter().map(|v| sparse(v)).collect(),
                    beta: beta.iter().map(|v| sparse(v)).collect(),
                    unshifted: a.0,
                    shifted: b.0,
                });
            }
        }
    }
    out
}

/// Exact invariance check: by multilinearity f is constant on cosets iff it
/// vanishes whenever one argument is a coboundary basis vector and the
/// others are cocycle basis vectors.
pub fn certify_exhaustive(
    field: &Field,
    eval: impl Fn(&[&[FieldElem]]) -> FieldElem,
    spaces: &[&CodeSpaces],
) -> Certification {
    let m = spaces.len();
    let mut out = Certification {
        mode: "exhaustive".into(),
        trials: 0,
        seed: 0,
        passed: 0,
        failed: 0,
        failures: Vec::new(),
    };
    let zero = |s: &CodeSpaces| vec![FieldElem::ZERO; s.n];
    for leg in 0..m {
        let lists: Vec<&[FVec]> = (0..m)
            .map(|k| if k == leg { &spaces[k].b_basis[..] } else { &spaces[k].z_basis[..] })
            .collect();
        if lists.iter().any(|l| l.is_empty()) {
            continue;
        }
        let mut idx = vec![0usize; m];
        loop {
            let args: Vec<&[FieldElem]> = (0..m).map(|k| lists[k][idx[k]].as_slice()).collect();
            let v = eval(&args);
            out.trials += 1;
            if v.is_zero() {
                out.passed += 1;
            } else {
                out.failed += 1;
                if out.failures.len() < MAX_WITNESSES {
                    out.failures.push(CertFailure {
                        trial: out.trials - 1,
                        zeta: (0..m)
                            .map(|k| if k == leg { sparse(&zero(spaces[k])) } else { sparse(args[k]) })
                            .collect(),
                        beta: (0..m)
                            .map(|k| if k == leg { sparse(args[k]) } else { sparse(&zero(spaces[k])) })
                            .collect(),
                        unshifted: 0,
                        shifted: v.0,
                    });
                }
            }
            let mut p = 0;
            loop {
                if p == m {
                    break;
                }
                idx[p] += 1;
                if idx[p] < lists[p].len() {
                    break;
                }
                idx[p] = 0;
                p += 1;
            }
            if p == m {
                break;
            }
        }
    }
    let _ = field;
    out
}

/// Three codes with a trilinear form on their qudits.
#[derive(Clone, Debug)]
pub struct CczCode {
    pub spaces: [CodeSpaces; 3],
    pub form: TrilinearForm,
    pub certification: Option<Certification>,
}

impl CczCode {
    pub fn new(spaces: [CodeSpaces; 3], form: TrilinearForm) -> Result<Self> {
        for k in 0..3 {
            if spaces[k].n != form.dims()[k] {
                return Err(Error::Shape {
                    context: format!("qudits of code {k}"),
                    expected: form.dims()[k],
                    found: spaces[k].n,
                });
            }
        }
        Ok(CczCode {
            spaces,
            form,
            certification: None,
        })
    }

    pub fn certify(&mut self, trials: usize, seed: u64) -> &Certification {
        let form = &self.form;
        let c = certify(
            form.field(),
            |a| form.evaluate(a[0], a[1], a[2]),
            &[&self.spaces[0], &self.spaces[1], &self.spaces[2]],
            trials,
            seed,
        );
        self.certification = Some(c);
        self.certification.as_ref().unwrap()
    }

    pub fn certified(&self) -> bool {
        self.certification.as_ref().is_some_and(|c| c.ok())
    }

    pub fn build_t(&self) -> TTensor {
        build_t(&self.form, [&self.spaces[0].reps, &self.spaces[1].reps, &self.spaces[2].reps], self.certified())
    }

    /// Rebuilds T with every representative shifted by a random coboundary
    /// and reports whether all entries agree.
    pub fn representative_shift_check(&self, seed: u64) -> bool {
        let f = self.form.field();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shifted: Vec<Vec<FVec>> = self
            .spaces
            .iter()
            .map(|s| {
                s.reps
                    .iter()
                    .map(|r| add_vec(r, &s.random_coboundary(f, &mut rng)))
                    .collect()
            })
            .collect();
        let a = self.build_t();
        let b = build_t(&self.form, [&shifted[0], &shifted[1], &shifted[2]], self.certified());
        a.entries == b.entries
    }
}

/// The form restricted to class representatives.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TTensor {
    pub dims: [usize; 3],
    /// entries[(a * k2 + b) * k3 + c]
    pub entries: Vec<FieldElem>,
    pub certified: bool,
}

impl TTensor {
    pub fn new(dims: [usize; 3], entries: Vec<FieldElem>) -> Self {
        assert_eq!(entries.len(), dims[0] * dims[1] * dims[2]);
        TTensor {
            dims,
            entries,
            certified: false,
        }
    }

    pub fn get(&self, a: usize, b: usize, c: usize) -> FieldElem {
        self.entries[(a * self.dims[1] + b) * self.dims[2] + c]
    }

    /// Σ T[a][b][c] x_a y_b z_c.
    pub fn evaluate(&self, field: &Field, x: &[FieldElem], y: &[FieldElem], z: &[FieldElem]) -> FieldElem {
        let mut acc = FieldElem::ZERO;
        for (a, &xa) in x.iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            for (b, &yb) in y.iter().enumerate() {
                if yb.is_zero() {
                    continue;
                }
                let xy = field.mul(xa, yb);
                for (c, &zc) in z.iter().enumerate() {
                    let t = self.get(a, b, c);
                    if !t.is_zero() && !zc.is_zero() {
                        acc = field.add(acc, field.mul(xy, field.mul(t, zc)));
                    }
                }
            }
        }
        acc
    }

    /// Unit diagonal tensor of size k.
    pub fn unit(k: usize) -> Self {
        let mut e = vec![FieldElem::ZERO; k * k * k];
        for i in 0..k {
            e[(i * k + i) * k + i] = FieldElem::ONE;
        }
        TTensor::new([k; 3], e)
    }
}

/// T[a][b][c] = f(x_a, y_b, z_c) by staged contraction.
pub fn build_t(form: &TrilinearForm, reps: [&[FVec]; 3], certified: bool) -> TTensor {
    let f = form.field();
    let [k1, k2, k3] = [reps[0].len(), reps[1].len(), reps[2].len()];
    let n3 = form.dims()[2];
    let mut entries = vec![FieldElem::ZERO; k1 * k2 * k3];
    for (a, x) in reps[0].iter().enumerate() {
        // W[(j2, j3)] = Σ_{j1} a_e x_{j1}
        let mut w: BTreeMap<(u32, u32), FieldElem> = BTreeMap::new();
        for &([j1, j2, j3], v) in form.entries() {
            let xa = x[j1 as usize];
            if !xa.is_zero() {
                let e = w.entry((j2, j3)).or_insert(FieldElem::ZERO);
                *e = f.add(*e, f.mul(v, xa));
            }
        }
        for (b, y) in reps[1].iter().enumerate() {
            let mut u = vec![FieldElem::ZERO; n3];
            for (&(j2, j3), &v) in &w {
                let yb = y[j2 as usize];
                if !yb.is_zero() {
                    u[j3 as usize] = f.add(u[j3 as usize], f.mul(v, yb));
                }
            }
            for (c, z) in reps[2].iter().enumerate() {
                entries[(a * k2 + b) * k3 + c] = f.dot(&u, z);
            }
        }
    }
    TTensor {
        dims: [k1, k2, k3],
        entries,
        certified,
    }
}

/// Search budget for subrank bounds.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SubrankBudget {
    pub restarts: usize,
    pub seed: u64,
}

impl Default for SubrankBudget {
    fn default() -> Self {
        SubrankBudget { restarts: 64, seed: 0 }
    }
}

/// A subrank lower bound r with maps M_i (r × k_i) such that
/// (M_1 ⊗ M_2 ⊗ M_3) T is the r × r × r unit tensor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubrankResult {
    pub r: usize,
    pub exact: bool,
    pub kind: String,
    pub maps: [Vec<FVec>; 3],
}

/// Checks T(M_1[p], M_2[q], M_3[s]) = [p = q = s] for all p, q, s.
pub fn verify_subrank_certificate(field: &Field, t: &TTensor, maps: &[Vec<FVec>; 3]) -> bool {
    let r = maps[0].len();
    if maps[1].len() != r || maps[2].len() != r {
        return false;
    }
    for k in 0..3 {
        if maps[k].iter().any(|v| v.len() != t.dims[k]) {
            return false;
        }
    }
    for p in 0..r {
        for q in 0..r {
            for s in 0..r {
                let want = if p == q && q == s { FieldElem::ONE } else { FieldElem::ZERO };
                if t.evaluate(field, &maps[0][p], &maps[1][q], &maps[2][s]) != want {
                    return false;
                }
            }
        }
    }
    true
}

fn all_nonzero_vectors(field: &Field, k: usize) -> Vec<FVec> {
    let q = field.q();
    (1..q.pow(k as u32))
        .map(|mut i| {
            (0..k)
                .map(|_| {
                    let x = FieldElem((i % q) as u16);
                    i /= q;
                    x
                })
                .collect()
        })
        .collect()
}

/// Row of the functional z ↦ T(x, y, z).
fn contract_xy(field: &Field, t: &TTensor, x: &[FieldElem], y: &[FieldElem]) -> FVec {
    let mut out = vec![FieldElem::ZERO; t.dims[2]];
    for (a, &xa) in x.iter().enumerate() {
        if xa.is_zero() {
            continue;
        }
        for (b, &yb) in y.iter().enumerate() {
            if yb.is_zero() {
                continue;
            }
            let s = field.mul(xa, yb);
            for (c, o) in out.iter_mut().enumerate() {
                *o = field.add(*o, field.mul(s, t.get(a, b, c)));
            }
        }
    }
    out
}

fn exact_search(field: &Field, t: &TTensor, r: usize) -> Option<[Vec<FVec>; 3]> {
    let xs = all_nonzero_vectors(field, t.dims[0]);
    let ys = all_nonzero_vectors(field, t.dims[1]);
    let k3 = t.dims[2];
    // x-tuples strictly increasing (the diagonal can be reordered), y-tuples
    // arbitrary; each z_c then solves a linear system
    let mut xi: Vec<usize> = (0..r).collect();
    if r > xs.len() {
        return None;
    }
    loop {
        let x: Vec<&FVec> = xi.iter().map(|&i| &xs[i]).collect();
        let mut yi = vec![0usize; r];
        loop {
            let y: Vec<&FVec> = yi.iter().map(|&i| &ys[i]).collect();
            let rows: Vec<FVec> = (0..r)
                .flat_map(|p| (0..r).map(move |q| (p, q)))
                .map(|(p, q)| contract_xy(field, t, x[p], y[q]))
                .collect();
            let m = SpMat::from_dense(field, &rows, k3);
            let mut zs = Vec::with_capacity(r);
            for c in 0..r {
                let rhs: FVec = (0..r)
                    .flat_map(|p| (0..r).map(move |q| (p, q)))
                    .map(|(p, q)| if p == c && q == c { FieldElem::ONE } else { FieldElem::ZERO })
                    .collect();
                match m.solve(&rhs).ok().flatten() {
                    Some(z) => zs.push(z),
                    None => break,
                }
            }
            if zs.len() == r {
                return Some([
                    x.into_iter().cloned().collect(),
                    y.into_iter().cloned().collect(),
                    zs,
                ]);
            }
            // next y-tuple
            let mut p = 0;
            while p < r {
                yi[p] += 1;
                if yi[p] < ys.len() {
                    break;
                }
                yi[p] = 0;
                p += 1;
            }
            if p == r {
                break;
            }
        }
        // next increasing x-tuple
        let mut p = r;
        loop {
            if p == 0 {
                return None;
            }
            p -= 1;
            if xi[p] < xs.len() - (r - p) {
                xi[p] += 1;
                for q in p + 1..r {
                    xi[q] = xi[q - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Basis (as rows of ambient vectors) of {u ∈ span(basis) : constraints·u = 0}.
fn restrict_subspace(field: &Field, basis: &[FVec], constraints: &[FVec], n: usize) -> Vec<FVec> {
    if basis.is_empty() {
        return Vec::new();
    }
    // constraint matrix on coefficient space
    let rows: Vec<FVec> = constraints
        .iter()
        .map(|c| basis.iter().map(|b| field.dot(c, b)).collect())
        .collect();
    let m = SpMat::from_dense(field, &rows, basis.len());
    m.kernel_basis()
        .iter()
        .map(|coef| field.combine(coef, basis, n))
        .collect()
}

fn unit_vec(k: usize, i: usize) -> FVec {
    let mut e = vec![FieldElem::ZERO; k];
    e[i] = FieldElem::ONE;
    e
}

/// Row of the functional x ↦ T(x, y, z).
fn contract_yz(field: &Field, t: &TTensor, y: &[FieldElem], z: &[FieldElem]) -> FVec {
    (0..t.dims[0]).map(|a| t.evaluate(field, &unit_vec(t.dims[0], a), y, z)).collect()
}

/// Row of the functional y ↦ T(x, y, z).
fn contract_xz(field: &Field, t: &TTensor, x: &[FieldElem], z: &[FieldElem]) -> FVec {
    (0..t.dims[1]).map(|b| t.evaluate(field, x, &unit_vec(t.dims[1], b), z)).collect()
}

fn kernel_of(field: &Field, rows: &[FVec], n: usize) -> Vec<FVec> {
    if rows.is_empty() {
        return (0..n).map(|i| unit_vec(n, i)).collect();
    }
    SpMat::from_dense(field, rows, n).kernel_basis()
}

/// Elimination greedy: after choosing (x, y, z) every remaining subspace is
/// cut down so that no later choice can create a cross term. With
/// `basis_first` the nonzero triple comes from a shuffled scan of basis
/// triples before random combinations are tried.
fn eliminate_once(field: &Field, t: &TTensor, rng: &mut ChaCha8Rng, basis_first: bool) -> [Vec<FVec>; 3] {
    let [k1, k2, k3] = t.dims;
    let identity = |k: usize| -> Vec<FVec> { (0..k).map(|i| unit_vec(k, i)).collect() };
    let (mut u1, mut u2, mut u3) = (identity(k1), identity(k2), identity(k3));
    let mut out: [Vec<FVec>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    loop {
        let scan = |u1: &[FVec], u2: &[FVec], u3: &[FVec], rng: &mut ChaCha8Rng| {
            let (l2, l3) = (u2.len(), u3.len());
            let mut triples: Vec<(usize, usize, usize)> = (0..u1.len())
                .flat_map(|a| (0..l2).flat_map(move |b| (0..l3).map(move |c| (a, b, c))))
                .collect();
            triples.shuffle(rng);
            triples.into_iter().find_map(|(a, b, c)| {
                let v = t.evaluate(field, &u1[a], &u2[b], &u3[c]);
                (!v.is_zero()).then(|| (u1[a].clone(), u2[b].clone(), u3[c].clone(), v))
            })
        };
        let random = |u1: &[FVec], u2: &[FVec], u3: &[FVec], rng: &mut ChaCha8Rng| {
            (0..16).find_map(|_| {
                let x = field.combine(&field.random_vec(u1.len(), rng), u1, k1);
                let y = field.combine(&field.random_vec(u2.len(), rng), u2, k2);
                let z = field.combine(&field.random_vec(u3.len(), rng), u3, k3);
                let v = t.evaluate(field, &x, &y, &z);
                (!v.is_zero()).then_some((x, y, z, v))
            })
        };
        let found = if basis_first {
            scan(&u1, &u2, &u3, rng)
        } else {
            random(&u1, &u2, &u3, rng).or_else(|| scan(&u1, &u2, &u3, rng))
        };
        let Some((x, y, z, v)) = found else {
            return out;
        };
        let x = field.scale(&x, field.inv(v).unwrap());
        let c1: Vec<FVec> = u3
            .iter()
            .map(|w| contract_yz(field, t, &y, w))
            .chain(u2.iter().map(|vv| contract_yz(field, t, vv, &z)))
            .collect();
        let c2: Vec<FVec> = u3
            .iter()
            .map(|w| contract_xz(field, t, &x, w))
            .chain(u1.iter().map(|uu| contract_xz(field, t, uu, &z)))
            .collect();
        let c3: Vec<FVec> = u2
            .iter()
            .map(|vv| contract_xy(field, t, &x, vv))
            .chain(u1.iter().map(|uu| contract_xy(field, t, uu, &y)))
            .collect();
        let n1 = restrict_subspace(field, &u1, &c1, k1);
        let n2 = restrict_subspace(field, &u2, &c2, k2);
        let n3 = restrict_subspace(field, &u3, &c3, k3);
        out[0].push(x);
        out[1].push(y);
        out[2].push(z);
        u1 = n1;
        u2 = n2;
        u3 = n3;
    }
}

const EXTEND_TRIES: usize = 32;

/// Extension greedy: the m-th triple only has to avoid cross terms with the
/// triples already chosen. x and y are drawn from the kernels of their
/// constraints and z solves T(x_a, y_b, z) = [a = b = m] exactly.
fn extend_once(field: &Field, t: &TTensor, rng: &mut ChaCha8Rng) -> [Vec<FVec>; 3] {
    let [k1, k2, k3] = t.dims;
    let (mut xs, mut ys, mut zs): (Vec<FVec>, Vec<FVec>, Vec<FVec>) = (Vec::new(), Vec::new(), Vec::new());
    'grow: loop {
        let m = xs.len();
        let rows_x: Vec<FVec> = ys
            .iter()
            .flat_map(|y| zs.iter().map(move |z| (y, z)))
            .map(|(y, z)| contract_yz(field, t, y, z))
            .collect();
        let kx = kernel_of(field, &rows_x, k1);
        for _ in 0..EXTEND_TRIES {
            let x = field.combine(&field.random_vec(kx.len(), rng), &kx, k1);
            if x.iter().all(|v| v.is_zero()) {
                continue;
            }
            let rows_y: Vec<FVec> = xs
                .iter()
                .chain(std::iter::once(&x))
                .flat_map(|xa| zs.iter().map(move |z| (xa, z)))
                .map(|(xa, z)| contract_xz(field, t, xa, z))
                .collect();
            let ky = kernel_of(field, &rows_y, k2);
            let y = field.combine(&field.random_vec(ky.len(), rng), &ky, k2);
            if y.iter().all(|v| v.is_zero()) {
                continue;
            }
            let all_x: Vec<&FVec> = xs.iter().chain(std::iter::once(&x)).collect();
            let all_y: Vec<&FVec> = ys.iter().chain(std::iter::once(&y)).collect();
            let mut rows = Vec::with_capacity((m + 1) * (m + 1));
            let mut rhs = Vec::with_capacity((m + 1) * (m + 1));
            for (a, xa) in all_x.iter().enumerate() {
                for (b, yb) in all_y.iter().enumerate() {
                    rows.push(contract_xy(field, t, xa, yb));
                    rhs.push(if a == m && b == m { FieldElem::ONE } else { FieldElem::ZERO });
                }
            }
            let sys = SpMat::from_dense(field, &rows, k3);
            let Some(z0) = sys.solve(&rhs).ok().flatten() else {
                continue;
            };
            let kz = sys.kernel_basis();
            let z = add_vec(&z0, &field.combine(&field.random_vec(kz.len(), rng), &kz, k3));
            xs.push(x);
            ys.push(y);
            zs.push(z);
            continue 'grow;
        }
        return [xs, ys, zs];
    }
}

fn greedy_once(field: &Field, t: &TTensor, rng: &mut ChaCha8Rng, restart: usize) -> [Vec<FVec>; 3] {
    match restart % 3 {
        0 => eliminate_once(field, t, rng, true),
        1 => extend_once(field, t, rng),
        _ => eliminate_once(field, t, rng, false),
    }
}

/// Greedy diagonalization with seeded restarts, cycling through the
/// elimination and extension routes.
pub fn subrank_greedy(field: &Field, t: &TTensor, budget: &SubrankBudget) -> SubrankResult {
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let mut best: [Vec<FVec>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    let cap = t.dims.iter().copied().min().unwrap();
    for restart in 0..budget.restarts.max(1) {
        let maps = greedy_once(field, t, &mut rng, restart);
        if maps[0].len() > best[0].len() && verify_subrank_certificate(field, t, &maps) {
            best = maps;
        }
        if best[0].len() == cap {
            break;
        }
    }
    SubrankResult {
        r: best[0].len(),
        exact: false,
        kind: "lower bound".into(),
        maps: best,
    }
}

/// Exact search over F_2 when every k_i ≤ 3, greedy otherwise.
pub fn subrank_lower_bound(field: &Field, t: &TTensor, budget: &SubrankBudget) -> SubrankResult {
    if field.q() == 2 && t.dims.iter().all(|&k| k <= 3) {
        let cap = t.dims.iter().copied().min().unwrap();
        for r in (1..=cap).rev() {
            if let Some(maps) = exact_search(field, t, r) {
                debug_assert!(verify_subrank_certificate(field, t, &maps));
                return SubrankResult {
                    r,
                    exact: true,
                    kind: "lower bound".into(),
                    maps,
                };
            }
        }
        return SubrankResult {
            r: 0,
            exact: true,
            kind: "lower bound".into(),
            maps: [Vec::new(), Vec::new(), Vec::new()],
        };
    }
    subrank_greedy(field, t, budget)
}

/// Findings of a triorthogonality check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TriorthogonalReport {
    pub violations: Vec<String>,
}

impl TriorthogonalReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

fn ones(field: &Field, v: &[FieldElem]) -> FieldElem {
    v.iter().fold(FieldElem::ZERO, |a, &x| field.add(a, x))
}

/// Checks: every stabilizer row has even weight, every logical row odd
/// weight, every pair and every triple of distinct rows has an even overlap.
/// On success returns the diagonal form on three copies of the code.
pub fn triorthogonal_check(stab: &[FVec], logical: &[FVec]) -> Result<(TriorthogonalReport, Option<CczCode>)> {
    let f = Field::binary();
    let n = stab.iter().chain(logical).map(|r| r.len()).next().unwrap_or(0);
    if stab.iter().chain(logical).any(|r| r.len() != n || r.iter().any(|x| x.0 > 1)) {
        return Err(Error::Validation("rows must be binary vectors of one length".into()));
    }
    let mut v = Vec::new();
    for (i, b) in stab.iter().enumerate() {
        if !ones(&f, b).is_zero() {
            v.push(format!("stabilizer row {i} has odd weight"));
        }
    }
    for (i, z) in logical.iter().enumerate() {
        if ones(&f, z) != FieldElem::ONE {
            v.push(format!("logical row {i} has even weight"));
        }
    }
    let rows: Vec<&FVec> = stab.iter().chain(logical).collect();
    let name = |i: usize| {
        if i < stab.len() {
            format!("s{i}")
        } else {
            format!("l{}", i - stab.len())
        }
    };
    for a in 0..rows.len() {
        for b in a + 1..rows.len() {
            let ab = f.entrywise_product(rows[a], rows[b])?;
            if !ones(&f, &ab).is_zero() {
                v.push(format!("rows {} and {} overlap oddly", name(a), name(b)));
            }
            for c in b + 1..rows.len() {
                let abc = f.entrywise_product(&ab, rows[c])?;
                if !ones(&f, &abc).is_zero() {
                    v.push(format!("rows {}, {} and {} overlap oddly", name(a), name(b), name(c)));
                }
            }
        }
    }
    let report = TriorthogonalReport { violations: v };
    if !report.ok() {
        return Ok((report, None));
    }
    let z: Vec<FVec> = rows.iter().map(|r| (*r).clone()).collect();
    let spaces = CodeSpaces::new(&f, n, crate::gf::span_basis(&f, n, &z), crate::gf::span_basis(&f, n, stab))?;
    let code = CczCode::new([spaces.clone(), spaces.clone(), spaces], TrilinearForm::diagonal(&f, n))?;
    Ok((report, Some(code)))
}

/// The [[15,1]] punctured Reed-Muller code: four weight-8 stabilizer rows
/// (coordinate x ∈ 1..=15 has bit i in row i) and the all-ones logical row.
pub fn punctured_reed_muller() -> (Vec<FVec>, Vec<FVec>) {
    let stab = (0..4)
        .map(|i| (1..16u16).map(|x| FieldElem((x >> i) & 1)).collect())
        .collect();
    (stab, vec![vec![FieldElem::ONE; 15]])
}
