use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sheafcode::gf::{FVec, Field, FieldElem};
use sheafcode::localcode::LinCode;

fn fe(v: u16) -> FieldElem {
    FieldElem(v)
}

fn all_codewords(c: &LinCode) -> Vec<FVec> {
    let f = c.field();
    let q = f.q();
    let mut out = Vec::new();
    for idx in 0..q.pow(c.dim() as u32) {
        let mut i = idx;
        let coeffs: FVec = (0..c.dim())
            .map(|_| {
                let x = fe((i % q) as u16);
                i /= q;
                x
            })
            .collect();
        out.push(f.combine(&coeffs, c.generator(), c.length()));
    }
    out
}

#[test]
fn dual_examples() {
    let f2 = Field::binary();
    let rep2 = LinCode::repetition(&f2, 2);
    assert_eq!(rep2.dual(), rep2);
    assert_eq!(LinCode::full(&f2, 3).dual(), LinCode::zero(&f2, 3));
    assert_eq!(LinCode::zero(&f2, 3).dual(), LinCode::full(&f2, 3));
    let f8 = Field::with_degree(3).unwrap();
    let rs = LinCode::reed_solomon(&f8, 2).unwrap();
    let d = rs.dual();
    assert_eq!(d.dim(), 6);
    for a in rs.generator() {
        for b in d.generator() {
            assert!(f8.dot(a, b).is_zero());
        }
    }
}

#[test]
fn schur_span_examples() {
    let f2 = Field::binary();
    let rep = LinCode::repetition(&f2, 5);
    assert_eq!(LinCode::schur_span(&[&rep, &rep]).unwrap(), rep);
    let f8 = Field::with_degree(3).unwrap();
    let rs2 = LinCode::reed_solomon(&f8, 2).unwrap();
    let s = LinCode::schur_span(&[&rs2, &rs2]).unwrap();
    assert_eq!(s.dim(), 3);
    assert_eq!(s, LinCode::reed_solomon(&f8, 3).unwrap());
    let zero = LinCode::zero(&f8, 8);
    assert_eq!(LinCode::schur_span(&[&rs2, &zero]).unwrap(), zero);
    assert!(LinCode::schur_span(&[&rs2, &rep]).is_err());
}

#[test]
fn rs_degree_addition() {
    let f8 = Field::with_degree(3).unwrap();
    for k1 in 1..=8 {
        for k2 in 1..=8 {
            let a = LinCode::reed_solomon(&f8, k1).unwrap();
            let b = LinCode::reed_solomon(&f8, k2).unwrap();
            assert_eq!(LinCode::schur_span(&[&a, &b]).unwrap().dim(), (k1 + k2 - 1).min(8));
        }
    }
}

#[test]
fn reed_solomon_examples() {
    let f8 = Field::with_degree(3).unwrap();
    assert_eq!(LinCode::reed_solomon(&f8, 1).unwrap(), LinCode::repetition(&f8, 8));
    assert_eq!(LinCode::reed_solomon(&f8, 8).unwrap(), LinCode::full(&f8, 8));
    assert!(LinCode::reed_solomon(&f8, 0).is_err());
    assert!(LinCode::reed_solomon(&f8, 9).is_err());
    let f4 = Field::with_degree(2).unwrap();
    let rs = LinCode::reed_solomon(&f4, 2).unwrap();
    // p(x) = x evaluated at 0, 1, ω, ω+1
    assert!(rs.contains(&[fe(0), fe(1), fe(2), fe(3)]));
    assert_eq!(rs.dim(), 2);
}

#[test]
fn tensor_examples() {
    let f2 = Field::binary();
    let rep2 = LinCode::repetition(&f2, 2);
    let t = LinCode::tensor(&[&rep2, &rep2]).unwrap();
    assert_eq!(t.dim(), 1);
    assert!(t.contains(&[fe(1); 4]));
    let f4 = Field::with_degree(2).unwrap();
    let rs = LinCode::reed_solomon(&f4, 2).unwrap();
    let full = LinCode::full(&f4, 3);
    assert_eq!(LinCode::tensor(&[&rs, &full]).unwrap().dim(), 2 * 3);
}

#[test]
fn tensor_fiber_characterization() {
    // rep2 ⊗ RS(F_4, 2): a 2×4 array is a codeword iff both rows lie in RS
    // and both columns lie in rep2
    let f4 = Field::with_degree(2).unwrap();
    let rep2 = LinCode::repetition(&f4, 2);
    let rs = LinCode::reed_solomon(&f4, 2).unwrap();
    let t = LinCode::tensor(&[&rep2, &rs]).unwrap();
    let mut count = 0;
    for idx in 0..4usize.pow(8) {
        let v: FVec = (0..8).map(|k| fe(((idx >> (2 * k)) & 3) as u16)).collect();
        let rows_ok = rs.contains(&v[0..4]) && rs.contains(&v[4..8]);
        let cols_ok = (0..4).all(|j| rep2.contains(&[v[j], v[4 + j]]));
        assert_eq!(t.contains(&v), rows_ok && cols_ok);
        count += (rows_ok && cols_ok) as usize;
    }
    assert_eq!(count, 16);
}

#[test]
fn product_condition_examples() {
    let f2 = Field::binary();
    let rep2 = LinCode::repetition(&f2, 2);
    assert!(LinCode::product_condition(&[&rep2, &rep2, &rep2]).unwrap());
    let full1 = LinCode::full(&f2, 1);
    assert!(!LinCode::product_condition(&[&full1, &full1, &full1]).unwrap());
    let f8 = Field::with_degree(3).unwrap();
    let rs = LinCode::reed_solomon(&f8, 2).unwrap();
    assert!(LinCode::product_condition(&[&rs, &rs, &rs]).unwrap());
    let rs3 = LinCode::reed_solomon(&f8, 3).unwrap();
    // degrees up to 6 still sum to zero, degree 7 does not
    assert!(LinCode::product_condition(&[&rs3, &rs3, &rs3]).unwrap());
    let rs4 = LinCode::reed_solomon(&f8, 4).unwrap();
    assert!(!LinCode::product_condition(&[&rs4, &rs4, &rs4]).unwrap());
}

#[test]
fn power_sums_over_f8() {
    let f8 = Field::with_degree(3).unwrap();
    for j in 0..=7u64 {
        let s = f8.elements().fold(fe(0), |acc, x| f8.add(acc, f8.pow(x, j)));
        // 0^0 = 1, so j = 0 sums eight ones
        assert_eq!(s.is_zero(), j != 7, "j={j}");
    }
}

#[test]
fn named_codes_and_files() {
    let f8 = Field::with_degree(3).unwrap();
    assert_eq!(LinCode::named(&f8, "rs:2", 8).unwrap().dim(), 2);
    assert_eq!(LinCode::named(&f8, "dual:rs:2", 8).unwrap().dim(), 6);
    assert_eq!(LinCode::named(&f8, "parity", 5).unwrap().dim(), 4);
    assert!(LinCode::named(&f8, "rs:2", 5).is_err());
    assert!(LinCode::named(&f8, "bogus", 5).is_err());
    let c = LinCode::named(&f8, "rs:3", 8).unwrap();
    let file = c.to_file();
    let s = serde_json::to_string(&file).unwrap();
    assert!(s.contains("\"Δ\":8"));
    let back = LinCode::from_file(&serde_json::from_str(&s).unwrap()).unwrap();
    assert_eq!(back, c);
}

#[test]
fn dependent_generator_rejected() {
    let f2 = Field::binary();
    assert!(LinCode::new(&f2, 2, vec![vec![fe(1), fe(1)], vec![fe(1), fe(1)]]).is_err());
}

fn random_code(f: &Field, n: usize, m: usize, seed: u64) -> LinCode {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<FVec> = (0..m).map(|_| f.random_vec(n, &mut rng)).collect();
    LinCode::span(f, n, &rows).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn double_dual_is_identity(seed in any::<u64>(), r in 1u32..=3, n in 1usize..9, m in 0usize..9) {
        let f = Field::with_degree(r).unwrap();
        let c = random_code(&f, n, m, seed);
        prop_assert_eq!(c.dual().dim(), n - c.dim());
        prop_assert_eq!(c.dual().dual(), c);
    }

    #[test]
    fn schur_span_dimension_bound(seed in any::<u64>(), n in 1usize..9, m1 in 0usize..5, m2 in 0usize..5) {
        let f = Field::with_degree(2).unwrap();
        let a = random_code(&f, n, m1, seed);
        let b = random_code(&f, n, m2, seed ^ 1);
        let s = LinCode::schur_span(&[&a, &b]).unwrap();
        prop_assert!(s.dim() <= n.min(a.dim() * b.dim()));
        // every product of codewords lies in the span
        for x in all_codewords(&a).iter().take(16) {
            for y in all_codewords(&b).iter().take(16) {
                prop_assert!(s.contains(&f.entrywise_product(x, y).unwrap()));
            }
        }
    }

    #[test]
    fn product_condition_matches_all_ones_in_dual(seed in any::<u64>(), n in 1usize..7, m in 0usize..4) {
        let f = Field::binary();
        let a = random_code(&f, n, m, seed);
        let b = random_code(&f, n, m, seed ^ 2);
        let c = random_code(&f, n, m, seed ^ 3);
        let s = LinCode::schur_span(&[&a, &b, &c]).unwrap();
        let ones = vec![FieldElem::ONE; n];
        prop_assert_eq!(
            LinCode::product_condition(&[&a, &b, &c]).unwrap(),
            s.dual().contains(&ones)
        );
    }
}
