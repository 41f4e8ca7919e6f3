use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sheafcode::complex::{CellComplex, CellId, CubicalSpec};
use sheafcode::fixtures;
use sheafcode::gf::{Field, FieldElem, SpMat};
use sheafcode::localcode::LinCode;
use sheafcode::sheaf::{LocalCodeAssignment, Sheaf};

fn all_cells(cx: &CellComplex) -> Vec<CellId> {
    (0..=cx.t())
        .flat_map(|d| (0..cx.count(d)).map(move |i| CellId::new(d, i)))
        .collect()
}

fn rebuild(s: &Sheaf) -> Sheaf {
    Sheaf::from_local_codes(s.complex(), s.field(), s.local_codes().unwrap().clone()).unwrap()
}

fn dense(f: &Field, m: &[Vec<FieldElem>], cols: usize) -> SpMat {
    SpMat::from_dense(f, m, cols)
}

#[test]
fn repetition_codes_give_constant_sections() {
    let f = Field::binary();
    let complexes = vec![
        fixtures::cubical(fixtures::toric_spec()).unwrap(),
        fixtures::cubical(fixtures::s3_cayley_spec()).unwrap(),
        fixtures::simplicial(&fixtures::torus7()).unwrap(),
        fixtures::simplicial(&fixtures::tetrahedron_boundary()).unwrap(),
    ];
    for cx in complexes {
        let s = Sheaf::constant(&cx, &f).unwrap();
        for c in all_cells(&cx) {
            assert_eq!(s.dim(c), 1);
            let n = cx.top_coords(c).len();
            assert!(s.space(c).contains(&f, &vec![FieldElem::ONE; n]));
        }
        assert!(s.verify_axioms().unwrap().ok());
    }
}

#[test]
fn full_codes_give_all_functions() {
    let f = Field::with_degree(2).unwrap();
    let cx = fixtures::cubical(fixtures::doubled_cube_spec(3)).unwrap();
    let s = Sheaf::from_local_codes(&cx, &f, LocalCodeAssignment::named(&cx, &f, "full").unwrap()).unwrap();
    for c in all_cells(&cx) {
        assert_eq!(s.dim(c), cx.top_coords(c).len());
    }
    assert!(s.verify_axioms().unwrap().ok());
}

fn tensor_rebuild_pairs() -> Vec<(Arc<CellComplex>, Vec<LinCode>)> {
    let f2 = Field::binary();
    let f4 = Field::with_degree(2).unwrap();
    let two = fixtures::length_two_codes(&f2);
    let rs = |k| LinCode::reed_solomon(&f4, k).unwrap();
    let sq = fixtures::cubical(fixtures::square_toric_spec()).unwrap();
    let cube = fixtures::cubical(fixtures::doubled_cube_spec(3)).unwrap();
    let toric = fixtures::cubical(fixtures::toric_spec()).unwrap();
    let z5 = fixtures::cubical(CubicalSpec::shifts(5, 2, &[1, 2, 3, 4])).unwrap();
    let z5_3d = fixtures::cubical(CubicalSpec::shifts(5, 3, &[1, 2, 3, 4])).unwrap();
    let mut out = vec![
        (sq.clone(), vec![two[3].clone(), two[3].clone()]),
        (sq.clone(), vec![two[1].clone(), two[4].clone()]),
        (sq, vec![two[3].clone(), two[2].clone()]),
        (toric.clone(), vec![two[3].clone(); 3]),
        (toric, vec![two[3].clone(), two[4].clone(), two[1].clone()]),
        (z5.clone(), vec![rs(2), rs(2)]),
        (z5, vec![rs(1), rs(3)]),
        (z5_3d, vec![rs(2), rs(2), rs(3)]),
    ];
    for a in &two {
        for b in &two {
            for c in &two {
                out.push((cube.clone(), vec![a.clone(), b.clone(), c.clone()]));
            }
        }
    }
    out
}

#[test]
fn tensor_sheaf_equals_local_code_rebuild() {
    for (cx, codes) in tensor_rebuild_pairs() {
        let t = Sheaf::cubical_tensor(&cx, &codes).unwrap();
        let r = rebuild(&t);
        assert!(t.same_sections(&r), "differ at {:?}", t.differing_cells(&r));
        t.check_representation().unwrap();
        assert!(t.verify_axioms().unwrap().ok());
    }
}

#[test]
fn tensor_dimensions() {
    let f2 = Field::binary();
    let rep = LinCode::repetition(&f2, 2);
    let cyc = fixtures::cubical(fixtures::cycle_spec()).unwrap();
    let s = fixtures::uniform_tensor(&cyc, &rep).unwrap();
    for c in all_cells(&cyc) {
        assert_eq!(s.dim(c), 1);
    }
    let f4 = Field::with_degree(2).unwrap();
    let z5 = fixtures::cubical(CubicalSpec::shifts(5, 3, &[1, 2, 3, 4])).unwrap();
    let codes = vec![
        LinCode::reed_solomon(&f4, 1).unwrap(),
        LinCode::reed_solomon(&f4, 2).unwrap(),
        LinCode::reed_solomon(&f4, 3).unwrap(),
    ];
    let s = Sheaf::cubical_tensor(&z5, &codes).unwrap();
    let m = [1, 2, 3];
    for c in all_cells(&z5) {
        let sheafcode::complex::CellKey::Cube { dirs, .. } = z5.key(c) else { unreachable!() };
        let want: usize = (0..3).filter(|j| !dirs.contains(&(*j as u8))).map(|j| m[j]).product();
        assert_eq!(s.dim(c), want);
    }
}

#[test]
fn restriction_identity_and_composition() {
    let f = Field::with_degree(2).unwrap();
    let cx = fixtures::cubical(CubicalSpec::shifts(5, 3, &[1, 2, 3, 4])).unwrap();
    let codes = vec![
        LinCode::reed_solomon(&f, 2).unwrap(),
        LinCode::reed_solomon(&f, 3).unwrap(),
        LinCode::reed_solomon(&f, 2).unwrap(),
    ];
    let s = Sheaf::cubical_tensor(&cx, &codes).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..40 {
        let sigma = CellId::new(0, rng.gen_range(0..cx.count(0)));
        let id = s.restriction(sigma, sigma).unwrap();
        assert_eq!(dense(&f, &id, s.dim(sigma)).rank(), s.dim(sigma));
        for (k, row) in id.iter().enumerate() {
            for (l, x) in row.iter().enumerate() {
                assert_eq!(*x, if k == l { FieldElem::ONE } else { FieldElem::ZERO });
            }
        }
        let ups = cx.up_set(sigma, 1).unwrap();
        let pi = CellId::new(1, ups[rng.gen_range(0..ups.len())] as usize);
        let ups2 = cx.up_set(pi, 3).unwrap();
        let tau = CellId::new(3, ups2[rng.gen_range(0..ups2.len())] as usize);
        let a = dense(&f, &s.restriction(sigma, pi).unwrap(), s.dim(sigma));
        let b = dense(&f, &s.restriction(pi, tau).unwrap(), s.dim(pi));
        let c = dense(&f, &s.restriction(sigma, tau).unwrap(), s.dim(sigma));
        assert_eq!(b.matmul(&a).unwrap().triplets(), c.triplets());
    }
    // incomparable cells
    let v0 = CellId::new(0, 0);
    let far = (0..cx.count(3))
        .find(|&i| !cx.up_set(v0, 3).unwrap().contains(&(i as u32)))
        .unwrap();
    assert!(s.restriction(v0, CellId::new(3, far)).is_err());
}

#[test]
fn constant_sheaf_restrictions_are_identity() {
    let f = Field::binary();
    let cx = fixtures::simplicial(&fixtures::torus7()).unwrap();
    let s = Sheaf::constant(&cx, &f).unwrap();
    for d in 0..2 {
        for i in 0..cx.count(d) {
            let sigma = CellId::new(d, i);
            for &p in cx.cofaces(sigma) {
                assert_eq!(s.restriction(sigma, CellId::new(d + 1, p as usize)).unwrap(), vec![vec![FieldElem::ONE]]);
            }
        }
    }
}

#[test]
fn dropped_basis_vector_breaks_gluability() {
    let s = fixtures::toric_sheaf().unwrap();
    let v = CellId::new(0, 4);
    let bad = s.with_space(v, &[]).unwrap();
    bad.check_representation().unwrap();
    let rep = bad.verify_axioms().unwrap();
    assert_eq!(rep.failures.len(), 1);
    assert_eq!(rep.failures[0].cell, v);
    assert_eq!(rep.failures[0].check, "gluability");
    // same construction on an RS vertex keeping three of its four basis sections
    let f4 = Field::with_degree(2).unwrap();
    let cx = fixtures::cubical(CubicalSpec::shifts(5, 2, &[1, 2, 3, 4])).unwrap();
    let rs2 = LinCode::reed_solomon(&f4, 2).unwrap();
    let s = fixtures::uniform_tensor(&cx, &rs2).unwrap();
    let v = CellId::new(0, 2);
    let basis = s.space(v).basis().to_vec();
    let bad = s.with_space(v, &basis[..3]).unwrap();
    let rep = bad.verify_axioms().unwrap();
    assert_eq!(rep.failures.iter().map(|f| f.cell).collect::<Vec<_>>(), vec![v]);
}

#[test]
fn enlarged_space_breaks_representation() {
    let s = fixtures::toric_sheaf().unwrap();
    let v = CellId::new(0, 0);
    let n = s.complex().top_coords(v).len();
    let mut e = vec![FieldElem::ZERO; n];
    e[0] = FieldElem::ONE;
    let bad = s.with_space(v, &[e]).unwrap();
    assert!(bad.check_representation().is_err());
}

#[test]
fn dual_examples() {
    let f = Field::binary();
    let toric = fixtures::cubical(fixtures::toric_spec()).unwrap();
    let c = Sheaf::constant(&toric, &f).unwrap();
    assert!(c.dual().unwrap().same_sections(&c));
    let cube = fixtures::cubical(fixtures::doubled_cube_spec(3)).unwrap();
    let full = Sheaf::from_local_codes(&cube, &f, LocalCodeAssignment::named(&cube, &f, "full").unwrap()).unwrap();
    let d = full.dual().unwrap();
    for i in 0..cube.count(2) {
        assert_eq!(d.dim(CellId::new(2, i)), 0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let menu = fixtures::length_two_codes(&f);
    for _ in 0..20 {
        let codes = (0..cube.count(2)).map(|_| menu[rng.gen_range(0..5)].clone()).collect();
        let s = Sheaf::from_local_codes(&cube, &f, LocalCodeAssignment::new(&cube, codes).unwrap()).unwrap();
        assert!(s.dual().unwrap().dual().unwrap().same_sections(&s));
    }
}

#[test]
fn product_examples() {
    let f = Field::binary();
    let toric = fixtures::cubical(fixtures::toric_spec()).unwrap();
    let c = Sheaf::constant(&toric, &f).unwrap();
    assert!(Sheaf::product(&[&c, &c]).unwrap().same_sections(&c));
    let full = Sheaf::from_local_codes(&toric, &f, LocalCodeAssignment::named(&toric, &f, "full").unwrap()).unwrap();
    let s = fixtures::uniform_tensor(&toric, &fixtures::length_two_codes(&f)[1]).unwrap();
    assert!(Sheaf::product(&[&s, &full]).unwrap().same_sections(&rebuild(&s)));
    let f4 = Field::with_degree(2).unwrap();
    let z5 = fixtures::cubical(CubicalSpec::shifts(5, 2, &[1, 2, 3, 4])).unwrap();
    let a = fixtures::uniform_tensor(&z5, &LinCode::reed_solomon(&f4, 2).unwrap()).unwrap();
    let b = fixtures::uniform_tensor(&z5, &LinCode::reed_solomon(&f4, 2).unwrap()).unwrap();
    let p = Sheaf::product(&[&a, &b]).unwrap();
    let want = fixtures::uniform_tensor(&z5, &LinCode::reed_solomon(&f4, 3).unwrap()).unwrap();
    assert!(p.same_sections(&want));
    let other = fixtures::cubical(fixtures::toric_spec()).unwrap();
    let c2 = Sheaf::constant(&other, &f).unwrap();
    assert!(Sheaf::product(&[&c, &c2]).is_err());
}

#[test]
fn local_acyclicity_examples() {
    assert!(fixtures::toric_sheaf().unwrap().is_locally_acyclic().unwrap().ok());
    let f = Field::binary();
    let cube = fixtures::cubical(fixtures::single_cube_spec(3)).unwrap();
    let full = Sheaf::from_local_codes(&cube, &f, LocalCodeAssignment::named(&cube, &f, "full").unwrap()).unwrap();
    assert!(full.is_locally_acyclic().unwrap().ok());
    for (cx, codes) in tensor_rebuild_pairs() {
        let s = Sheaf::cubical_tensor(&cx, &codes).unwrap();
        assert!(s.is_locally_acyclic().unwrap().ok());
    }
    let bad = fixtures::non_acyclic_sheaf(0).unwrap();
    let rep = bad.is_locally_acyclic().unwrap();
    assert!(!rep.ok());
    assert!(rep.failures.iter().all(|f| f.cell.dim == 0));
}

#[test]
fn json_has_bases() {
    let s = fixtures::toric_sheaf().unwrap();
    let j = s.to_json();
    assert_eq!(j["complex"]["t"], 3);
    assert_eq!(j["bases"][0].as_array().unwrap().len(), 3 * 8);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn random_local_codes_satisfy_representation(seed in any::<u64>()) {
        let f = Field::binary();
        let cube = fixtures::cubical(fixtures::doubled_cube_spec(3)).unwrap();
        let menu = fixtures::length_two_codes(&f);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let codes = (0..cube.count(2)).map(|_| menu[rng.gen_range(0..5)].clone()).collect();
        let s = Sheaf::from_local_codes(&cube, &f, LocalCodeAssignment::new(&cube, codes).unwrap()).unwrap();
        prop_assert!(s.check_representation().is_ok());
        // identity axiom holds by construction
        let rep = s.verify_axioms().unwrap();
        prop_assert!(rep.failures.iter().all(|x| x.check != "identity"));
    }
}
