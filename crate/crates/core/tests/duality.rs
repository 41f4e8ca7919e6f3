use std::sync::Arc;

use sheafcode::chain::{ChainComplex, Side};
use sheafcode::complex::CellComplex;
use sheafcode::duality::{
    dual_sheaf, global_sections, local_codes_of, verify_exactness, verify_h0_ht, verify_poincare,
};
use sheafcode::fixtures;
use sheafcode::gf::Field;
use sheafcode::localcode::LinCode;
use sheafcode::sheaf::Sheaf;

fn rep2(cx: &Arc<CellComplex>) -> Sheaf {
    fixtures::uniform_tensor(cx, &LinCode::repetition(&Field::binary(), 2)).unwrap()
}

fn full(cx: &Arc<CellComplex>, len: usize) -> Sheaf {
    fixtures::uniform_tensor(cx, &LinCode::full(&Field::binary(), len)).unwrap()
}

fn constant(facets: &[Vec<u32>]) -> Sheaf {
    Sheaf::constant(&fixtures::simplicial(facets).unwrap(), &Field::binary()).unwrap()
}

/// Small acyclic fixtures: cubical tensor sheaves and constant sheaves on
/// closed simplicial manifolds.
fn small_fixtures() -> Vec<(&'static str, Sheaf)> {
    vec![
        ("cube1", full(&fixtures::cubical(fixtures::single_cube_spec(1)).unwrap(), 1)),
        ("cube2", full(&fixtures::cubical(fixtures::single_cube_spec(2)).unwrap(), 1)),
        ("cube3", full(&fixtures::cubical(fixtures::single_cube_spec(3)).unwrap(), 1)),
        ("doubled2", rep2(&fixtures::cubical(fixtures::doubled_cube_spec(2)).unwrap())),
        ("doubled3", rep2(&fixtures::cubical(fixtures::doubled_cube_spec(3)).unwrap())),
        ("doubled3-full", full(&fixtures::cubical(fixtures::doubled_cube_spec(3)).unwrap(), 2)),
        ("cycle", rep2(&fixtures::cubical(fixtures::cycle_spec()).unwrap())),
        ("cayley", rep2(&fixtures::cubical(fixtures::s3_cayley_spec()).unwrap())),
        ("square-toric", rep2(&fixtures::cubical(fixtures::square_toric_spec()).unwrap())),
        ("toric", fixtures::toric_sheaf().unwrap()),
        ("torus7", constant(&fixtures::torus7())),
        ("tetra", constant(&fixtures::tetrahedron_boundary())),
        ("torus3", constant(&fixtures::torus3())),
        ("rp3", constant(&fixtures::rp3())),
    ]
}

#[test]
fn homology_dim_matches_basis_route() {
    for (name, s) in small_fixtures() {
        let cc = ChainComplex::from_sheaf(&s).unwrap();
        for i in 0..=cc.t() {
            assert_eq!(
                cc.homology_dim(i),
                cc.cohomology(i, Side::Homology).unwrap().dim,
                "{name} H_{i}"
            );
            assert_eq!(cc.betti(i), cc.cohomology(i, Side::Cohomology).unwrap().dim, "{name} H^{i}");
        }
    }
}

#[test]
fn h0_ht_on_every_fixture() {
    let mut list = small_fixtures();
    for seed in 0..3 {
        list.push(("non-acyclic", fixtures::non_acyclic_sheaf(seed).unwrap()));
    }
    for (name, s) in list {
        let rep = verify_h0_ht(&s).unwrap();
        assert!(rep.ok(), "{name}: {rep:?}");
        assert_eq!(rep.dim_ht, rep.dim_h0_dual);
        assert_eq!(rep.dim_ht, rep.dim_global_sections);
        assert!(rep.witness_homology && rep.witness_dual, "{name}");
    }
}

#[test]
fn constant_sheaf_top_homology_is_one() {
    // closed connected manifold over F_2: the fundamental class
    for facets in [fixtures::torus7(), fixtures::tetrahedron_boundary(), fixtures::rp3()] {
        let rep = verify_h0_ht(&constant(&facets)).unwrap();
        assert_eq!((rep.dim_ht, rep.dim_h0_dual, rep.dim_global_sections), (1, 1, 1));
    }
}

#[test]
fn full_codes_have_no_top_homology() {
    let cx = fixtures::cubical(fixtures::toric_spec()).unwrap();
    let s = full(&cx, 2);
    let dual = dual_sheaf(&s).unwrap();
    for c in local_codes_of(&dual).unwrap().codes() {
        assert_eq!(c.dim(), 0);
    }
    assert!(global_sections(&s).unwrap().is_empty());
    let rep = verify_h0_ht(&s).unwrap();
    assert_eq!((rep.dim_ht, rep.dim_h0_dual, rep.dim_global_sections), (0, 0, 0));
}

#[test]
fn global_sections_satisfy_dual_codes() {
    let s = fixtures::toric_sheaf().unwrap();
    let cx = s.complex().clone();
    let codes = local_codes_of(&s).unwrap();
    let secs = global_sections(&s).unwrap();
    assert_eq!(secs.len(), 1);
    let t = cx.t();
    for (k, code) in codes.codes().iter().enumerate() {
        let dual = code.dual();
        let sigma = sheafcode::complex::CellId::new(t - 1, k);
        for a in &secs {
            let local: Vec<_> = cx.top_coords(sigma).iter().map(|&tau| a[tau as usize]).collect();
            assert!(dual.contains(&local));
        }
    }
}

#[test]
fn dual_of_dual_is_original() {
    for (name, s) in small_fixtures() {
        let dd = dual_sheaf(&dual_sheaf(&s).unwrap()).unwrap();
        assert!(dd.same_sections(&s), "{name}");
    }
}

#[test]
fn poincare_on_acyclic_fixtures() {
    for (name, s) in small_fixtures() {
        let rep = verify_poincare(&s).unwrap();
        assert!(rep.acyclic, "{name}");
        assert_eq!(rep.status, "pass", "{name}: {:?}", rep.pairs);
        assert_eq!(rep.pairs.len(), s.t(), "{name}");
        assert!(rep.mismatches.is_empty());
    }
}

#[test]
fn poincare_dims_on_known_instances() {
    let dims = |s: &Sheaf| {
        verify_poincare(s)
            .unwrap()
            .pairs
            .iter()
            .map(|p| (p.homology, p.dual_cohomology))
            .collect::<Vec<_>>()
    };
    // 3-torus Betti numbers 1, 3, 3, 1 over F_2
    assert_eq!(dims(&constant(&fixtures::torus3())), vec![(1, 1), (3, 3), (3, 3)]);
    assert_eq!(dims(&constant(&fixtures::rp3())), vec![(1, 1), (1, 1), (1, 1)]);
    assert_eq!(dims(&constant(&fixtures::torus7())), vec![(1, 1), (2, 2)]);
    assert_eq!(dims(&fixtures::toric_sheaf().unwrap()), vec![(1, 1), (3, 3), (3, 3)]);
    // contractible cube with full codes: nothing above degree 0 on either side
    let d = dims(&full(&fixtures::cubical(fixtures::single_cube_spec(3)).unwrap(), 1));
    assert_eq!(d[0].0, d[0].1);
    assert!(d[1..].iter().all(|&p| p == (0, 0)), "{d:?}");
}

#[test]
fn poincare_negative_control() {
    let mut mismatched = 0;
    for seed in 0..4 {
        let rep = verify_poincare(&fixtures::non_acyclic_sheaf(seed).unwrap()).unwrap();
        assert!(!rep.acyclic);
        assert_eq!(rep.status, "not applicable");
        assert!(!rep.ok());
        if !rep.mismatches.is_empty() {
            mismatched += 1;
        }
    }
    assert!(mismatched > 0);
    let rep = verify_poincare(&fixtures::non_acyclic_sheaf(0).unwrap()).unwrap();
    assert!(!rep.mismatches.is_empty(), "{:?}", rep.pairs);
}

#[test]
fn exactness_statements_on_acyclic_fixtures() {
    for (name, s) in small_fixtures() {
        let rep = verify_exactness(&s).unwrap();
        assert!(rep.acyclic);
        assert_eq!(rep.statements.len(), 5);
        for st in &rep.statements {
            assert!(st.ok(), "{name} statement {}: {:?}", st.statement, st.failures.first());
            assert!(st.checks > 0, "{name} statement {}", st.statement);
        }
        assert!(rep.long_exact.ok(), "{name}: {:?}", rep.long_exact.failures.first());
        assert!(rep.long_exact.checks > 0);
        assert!(rep.ok());
    }
}

#[test]
fn statements_hold_without_acyclicity() {
    // statements 1..5 only use the sheaf axioms; the sequence itself may break
    let mut broken = 0;
    for seed in 0..4 {
        let rep = verify_exactness(&fixtures::non_acyclic_sheaf(seed).unwrap()).unwrap();
        assert!(!rep.acyclic);
        assert!(rep.statements.iter().all(|s| s.ok()));
        broken += rep.long_exact.failures.len();
    }
    assert!(broken > 0);
}

#[test]
fn reports_are_deterministic() {
    let s = fixtures::non_acyclic_sheaf(1).unwrap();
    let a = serde_json::to_string(&verify_poincare(&s).unwrap()).unwrap();
    let b = serde_json::to_string(&verify_poincare(&s).unwrap()).unwrap();
    assert_eq!(a, b);
    let a = serde_json::to_string(&verify_exactness(&s).unwrap()).unwrap();
    let b = serde_json::to_string(&verify_exactness(&s).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn reed_solomon_duality() {
    let s = fixtures::rs_sheaf().unwrap();
    let h = verify_h0_ht(&s).unwrap();
    assert!(h.ok());
    assert_eq!(h.dim_ht, 728);
    let p = verify_poincare(&s).unwrap();
    assert!(p.ok(), "{:?}", p.pairs);
    assert!(verify_exactness(&s).unwrap().ok());
}
