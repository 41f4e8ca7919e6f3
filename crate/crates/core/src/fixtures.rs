//! Small reference complexes and sheaves shared by tests, the acceptance
//! suite and the CLI.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ccz::{CczCode, Certification, CodeSpaces, TrilinearForm};
use crate::chain::ChainComplex;
use crate::complex::{CellComplex, CubicalSpec};
use crate::cup::cubical_trilinear_stencil;
use crate::error::{Error, Result};
use crate::gf::{Field, FieldElem};
use crate::localcode::LinCode;
use crate::sheaf::{LocalCodeAssignment, Sheaf};

/// One solid t-cube: |V| = 1 and every A_i = {id}.
pub fn single_cube_spec(t: usize) -> CubicalSpec {
    CubicalSpec {
        n: 1,
        t,
        permutations: vec![vec![vec![0]]; t],
    }
}

/// |V| = 1 with Δ = 2 identity labels in each direction.
pub fn doubled_cube_spec(t: usize) -> CubicalSpec {
    CubicalSpec {
        n: 1,
        t,
        permutations: vec![vec![vec![0], vec![0]]; t],
    }
}

/// V = Z_3, A = {+1, +2}, t = 1.
pub fn cycle_spec() -> CubicalSpec {
    CubicalSpec::shifts(3, 1, &[1, 2])
}

/// V = Z_3, every A_i = {+1, +2}, t = 3.
pub fn toric_spec() -> CubicalSpec {
    CubicalSpec::shifts(3, 3, &[1, 2])
}

/// V = Z_3, both A_i = {+1, +2}, t = 2.
pub fn square_toric_spec() -> CubicalSpec {
    CubicalSpec::shifts(3, 2, &[1, 2])
}

/// V = Z_9, every A_i = {+1, ..., +8}, t = 3.
pub fn rs_spec() -> CubicalSpec {
    CubicalSpec::shifts(9, 3, &(1..=8).collect::<Vec<_>>())
}

/// S_3 as permutations of {0,1,2} in lexicographic order, with
/// table[a][b] = index of a∘b.
pub fn s3_table() -> Vec<Vec<usize>> {
    let perms: Vec<[usize; 3]> = vec![
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let idx = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap();
    perms
        .iter()
        .map(|a| {
            perms
                .iter()
                .map(|b| idx([a[b[0]], a[b[1]], a[b[2]]]))
                .collect()
        })
        .collect()
}

/// Left-right Cayley complex of S_3 with generators (01) and (12) on both
/// sides.
pub fn s3_cayley_spec() -> CubicalSpec {
    // (01) = [1,0,2] has index 2, (12) = [0,2,1] has index 1
    CubicalSpec::left_right(&s3_table(), &[2, 1], &[2, 1])
}

pub fn cubical(spec: CubicalSpec) -> Result<Arc<CellComplex>> {
    Ok(Arc::new(CellComplex::cubical(spec)?))
}

pub fn simplicial(facets: &[Vec<u32>]) -> Result<Arc<CellComplex>> {
    Ok(Arc::new(CellComplex::simplicial(facets)?))
}

pub fn triangle() -> Vec<Vec<u32>> {
    vec![vec![0, 1, 2]]
}

/// Boundary of the 3-simplex.
pub fn tetrahedron_boundary() -> Vec<Vec<u32>> {
    vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]]
}

/// Boundary of a triangle as a 1-dimensional complex.
pub fn triangle_boundary() -> Vec<Vec<u32>> {
    vec![vec![0, 1], vec![1, 2], vec![0, 2]]
}

pub fn two_triangles() -> Vec<Vec<u32>> {
    vec![vec![0, 1, 2], vec![3, 4, 5]]
}

fn sorted(mut v: Vec<u32>) -> Vec<u32> {
    v.sort_unstable();
    v
}

/// The 7-vertex torus: triangles {i, i+1, i+3} and {i, i+2, i+3} mod 7.
pub fn torus7() -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for i in 0..7u32 {
        out.push(sorted(vec![i, (i + 1) % 7, (i + 3) % 7]));
        out.push(sorted(vec![i, (i + 2) % 7, (i + 3) % 7]));
    }
    out
}

/// Freudenthal triangulation of the 3-torus (Z_3)^3: each unit cube is cut
/// into 6 tetrahedra along monotone lattice paths.
pub fn torus3() -> Vec<Vec<u32>> {
    let id = |x: [usize; 3]| (x[0] % 3 + 3 * (x[1] % 3) + 9 * (x[2] % 3)) as u32;
    let orders = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut out = Vec::new();
    for x in 0..3 {
        for y in 0..3 {
            for z in 0..3 {
                for ord in &orders {
                    let mut p = [x, y, z];
                    let mut tet = vec![id(p)];
                    for &d in ord {
                        p[d] += 1;
                        tet.push(id(p));
                    }
                    out.push(sorted(tet));
                }
            }
        }
    }
    out
}

/// RP^3 as the antipodal quotient of the barycentric subdivision of the
/// boundary of the 4-dimensional cross-polytope: 40 vertices, 192 tetrahedra.
///
/// Faces of the cross-polytope are nonzero sign vectors in {-1,0,1}^4; a
/// barycentric tetrahedron is a chain of faces with 1, 2, 3 and 4 nonzero
/// entries, and each face is identified with its negation.
pub fn rp3() -> Vec<Vec<u32>> {
    // canonical representative: first nonzero entry is +1
    let canon = |v: [i8; 4]| {
        let s = v.iter().find(|&&x| x != 0).copied().unwrap_or(1);
        v.map(|x| x * s)
    };
    let mut ids: HashMap<[i8; 4], u32> = HashMap::new();
    let mut all = Vec::new();
    for code in 0..81usize {
        let mut v = [0i8; 4];
        let mut c = code;
        for e in v.iter_mut() {
            *e = (c % 3) as i8 - 1;
            c /= 3;
        }
        if v != [0; 4] {
            all.push(v);
        }
    }
    for v in &all {
        let k = canon(*v);
        let n = ids.len() as u32;
        ids.entry(k).or_insert(n);
    }
    let mut facets = BTreeSet::new();
    let full: Vec<[i8; 4]> = all.iter().copied().filter(|v| v.iter().all(|&x| x != 0)).collect();
    let perms = {
        let mut p = Vec::new();
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let q = [a, b, c, d];
                        if BTreeSet::from(q).len() == 4 {
                            p.push(q);
                        }
                    }
                }
            }
        }
        p
    };
    for top in &full {
        for p in &perms {
            let mut face = [0i8; 4];
            let mut tet = Vec::with_capacity(4);
            for &d in p {
                face[d] = top[d];
                tet.push(ids[&canon(face)]);
            }
            facets.insert(sorted(tet));
        }
    }
    facets.into_iter().collect()
}

/// Tensor-code sheaf with the same code in every direction.
pub fn uniform_tensor(cx: &Arc<CellComplex>, code: &LinCode) -> Result<Sheaf> {
    let codes = vec![code.clone(); cx.t()];
    Sheaf::cubical_tensor(cx, &codes)
}

/// The RS fixture: tensor sheaf of RS(F_8, 2) on `rs_spec()`.
pub fn rs_sheaf() -> Result<Sheaf> {
    let f = Field::with_degree(3)?;
    let cx = cubical(rs_spec())?;
    uniform_tensor(&cx, &LinCode::reed_solomon(&f, 2)?)
}

/// Repetition tensor sheaf on the toric fixture over F_2.
pub fn toric_sheaf() -> Result<Sheaf> {
    let cx = cubical(toric_spec())?;
    uniform_tensor(&cx, &LinCode::repetition(&Field::binary(), 2))
}

/// The length-2 binary codes: zero, span(10), span(01), repetition, full.
pub fn length_two_codes(f: &Field) -> Vec<LinCode> {
    let e = |a: u16, b: u16| vec![FieldElem(a), FieldElem(b)];
    vec![
        LinCode::zero(f, 2),
        LinCode::span(f, 2, &[e(1, 0)]).unwrap(),
        LinCode::span(f, 2, &[e(0, 1)]).unwrap(),
        LinCode::repetition(f, 2),
        LinCode::full(f, 2),
    ]
}

/// First sheaf (in seeded search order) on the doubled 3-cube whose random
/// per-cell length-2 local codes make it fail local acyclicity.
pub fn non_acyclic_sheaf(seed: u64) -> Result<Sheaf> {
    let f = Field::binary();
    let cx = cubical(doubled_cube_spec(3))?;
    let menu = length_two_codes(&f);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let codes = (0..cx.count(2))
            .map(|_| menu[rng.gen_range(0..menu.len())].clone())
            .collect();
        let s = Sheaf::from_local_codes(&cx, &f, LocalCodeAssignment::new(&cx, codes)?)?;
        if !s.is_locally_acyclic()?.ok() {
            return Ok(s);
        }
    }
}

/// Per-square codes drawn from `length_two_codes` on the toric complex,
/// redrawn until some square violates the triple product condition and the
/// cubical trilinear form fails certification. Returns the sheaf, the
/// violating squares and the failing report.
pub fn ccz_negative_control(seed: u64, trials: usize) -> Result<(Sheaf, Vec<usize>, Certification)> {
    let f = Field::binary();
    let cx = cubical(toric_spec())?;
    let menu = length_two_codes(&f);
    let st = cubical_trilinear_stencil(&cx)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 0..MAX_CONTROL_ATTEMPTS {
        let codes: Vec<LinCode> = (0..cx.count(2))
            .map(|_| menu[rng.gen_range(0..menu.len())].clone())
            .collect();
        let bad: Vec<usize> = codes
            .iter()
            .enumerate()
            .filter(|(_, c)| !LinCode::product_condition(&[c, c, c]).unwrap_or(false))
            .map(|(i, _)| i)
            .collect();
        if bad.is_empty() {
            continue;
        }
        let s = Sheaf::from_local_codes(&cx, &f, LocalCodeAssignment::new(&cx, codes)?)?;
        let cc = ChainComplex::from_sheaf(&s)?;
        let sp = CodeSpaces::from_chain(&cc, 1)?;
        let form = TrilinearForm::from_stencil(&st, [&s, &s, &s])?;
        let mut code = CczCode::new([sp.clone(), sp.clone(), sp], form)?;
        let rep = code.certify(trials, seed.wrapping_add(attempt as u64)).clone();
        if !rep.ok() {
            return Ok((s, bad, rep));
        }
    }
    Err(Error::Validation("no certification failure found".into()))
}

const MAX_CONTROL_ATTEMPTS: usize = 1000;
