mod common;

use common::{det_leibniz, isometric, mat, random_odd_symmetric, random_unimodular, signature_float};
use gordian::exactmat::{adjugate, det, rank_mod_p, signature, smith, IntMatrix};
use gordian::ingest::KnotTable;
use gordian::knots::{parse_expr, seifert_matrix};
use gordian::linkform::{Cokernel, LinkingForm};
use gordian::obstruct::Invariants;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn square(max_n: usize, r: i64) -> impl Strategy<Value = IntMatrix> {
    (1..=max_n).prop_flat_map(move |n| {
        prop::collection::vec(-r..=r, n * n)
            .prop_map(move |v| mat(&v.chunks(n).map(|c| c.to_vec()).collect::<Vec<_>>()))
    })
}

fn rect(max: usize, r: i64) -> impl Strategy<Value = IntMatrix> {
    (1..=max, 1..=max).prop_flat_map(move |(m, n)| {
        prop::collection::vec(-r..=r, m * n)
            .prop_map(move |v| mat(&v.chunks(n).map(|c| c.to_vec()).collect::<Vec<_>>()))
    })
}

fn symmetric(max_n: usize, r: i64) -> impl Strategy<Value = IntMatrix> {
    square(max_n, r).prop_map(|m| m.add(&m.transpose()).unwrap())
}

fn is_unit(m: &IntMatrix) -> bool {
    det(m).unwrap().abs().is_one()
}

fn table() -> &'static KnotTable {
    use std::sync::OnceLock;
    static T: OnceLock<KnotTable> = OnceLock::new();
    T.get_or_init(KnotTable::bundled)
}

fn knot_name() -> impl Strategy<Value = String> {
    let n = table().len();
    (0..n, prop::sample::select(vec!["", "m", "r", "-"]))
        .prop_map(|(i, p)| format!("{p}{}", table().records()[i].name))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn smith_decomposes(m in rect(5, 9)) {
        let dec = smith(&m);
        let prod = dec.u.mul(&m).unwrap().mul(&dec.v).unwrap();
        prop_assert_eq!(prod, dec.diagonal_matrix());
        prop_assert!(is_unit(&dec.u));
        prop_assert!(is_unit(&dec.v));
        prop_assert_eq!(dec.u.mul(&dec.u_inv).unwrap(), IntMatrix::identity(m.rows()));
        for w in dec.diag.windows(2) {
            prop_assert!(!w[0].is_negative() && !w[1].is_negative());
            if w[0].is_zero() {
                prop_assert!(w[1].is_zero());
            } else {
                prop_assert!((&w[1] % &w[0]).is_zero());
            }
        }
        // the product of invariant factors is |det| for square input
        if m.is_square() {
            let p: BigInt = dec.diag.iter().product();
            prop_assert_eq!(p, det(&m).unwrap().abs());
        }
    }

    #[test]
    fn det_matches_leibniz(m in square(5, 20)) {
        prop_assert_eq!(det(&m).unwrap(), det_leibniz(&m));
    }

    #[test]
    fn adjugate_identity(m in square(5, 9)) {
        let d = det(&m).unwrap();
        let adj = adjugate(&m).unwrap();
        let n = m.rows();
        let scalar = IntMatrix::identity(n).scale(&d);
        prop_assert_eq!(m.mul(&adj).unwrap(), scalar.clone());
        prop_assert_eq!(adj.mul(&m).unwrap(), scalar);
    }

    #[test]
    fn signature_matches_eigenvalues(m in symmetric(5, 4)) {
        prop_assume!(!det(&m).unwrap().is_zero());
        prop_assert_eq!(signature(&m).unwrap(), signature_float(&m));
    }

    #[test]
    fn signature_and_rank_congruence_invariant(seed in any::<u64>(), m in symmetric(4, 4)) {
        prop_assume!(!det(&m).unwrap().is_zero());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_unimodular(&mut rng, m.rows(), 8);
        let m2 = p.transpose().mul(&m).unwrap().mul(&p).unwrap();
        prop_assert_eq!(signature(&m).unwrap(), signature(&m2).unwrap());
        for q in [3, 5, 7] {
            prop_assert_eq!(rank_mod_p(&m, q).unwrap(), rank_mod_p(&m2, q).unwrap());
        }
    }

    #[test]
    fn from_symmetric_congruence_invariant(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = random_odd_symmetric(&mut rng, 150);
        let p = random_unimodular(&mut rng, q.rows(), 10);
        let q2 = p.transpose().mul(&q).unwrap().mul(&p).unwrap();
        let l1 = LinkingForm::from_symmetric(&q).unwrap();
        let l2 = LinkingForm::from_symmetric(&q2).unwrap();
        prop_assert_eq!(l1.orders(), l2.orders());
        prop_assert!(isometric(&l1, &l2));
        // explicit isometry coker Q → coker Q', [x] ↦ [Pᵀx]
        let c1 = Cokernel::of_symmetric(&q).unwrap();
        let c2 = Cokernel::of_symmetric(&q2).unwrap();
        let pt = p.transpose();
        let n = q.rows();
        let basis: Vec<Vec<BigInt>> = (0..n)
            .map(|i| (0..n).map(|j| BigInt::from((i == j) as i64)).collect())
            .collect();
        let imgs: Vec<_> = basis.iter().map(|e| c2.class_of(&pt.mul(&mat_col(e)).unwrap().column(0))).collect();
        let srcs: Vec<_> = basis.iter().map(|e| c1.class_of(e)).collect();
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(
                    c1.form.evaluate(&srcs[i], &srcs[j]).unwrap(),
                    c2.form.evaluate(&imgs[i], &imgs[j]).unwrap()
                );
            }
        }
        prop_assert!(c2.form.generates(&imgs));
    }

    #[test]
    fn forms_are_symmetric_nondegenerate(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = random_odd_symmetric(&mut rng, 200);
        let l = LinkingForm::from_symmetric(&q).unwrap();
        prop_assert_eq!(BigInt::from(l.order()), det(&q).unwrap().abs());
        prop_assert!(l.is_nondegenerate(1000).unwrap());
        for i in 0..l.rank() {
            for j in 0..l.rank() {
                prop_assert_eq!(l.gram(i, j), l.gram(j, i));
            }
        }
        prop_assert!(isometric(&l.negate().negate(), &l));
    }

    #[test]
    fn connected_sum_and_mirror(a in knot_name(), b in knot_name()) {
        let inv = Invariants::new(table());
        let j = parse_expr(&a).unwrap();
        let k = parse_expr(&b).unwrap();
        let ij = inv.of(&j).unwrap();
        let ik = inv.of(&k).unwrap();
        let sum = inv.of(&j.connect(&k)).unwrap();
        prop_assert_eq!(&sum.det, &(&ij.det * &ik.det));
        prop_assert_eq!(sum.sigma, ij.sigma + ik.sigma);
        for p in [3, 5, 7, 11, 13] {
            prop_assert_eq!(sum.fp_rank(p), ij.fp_rank(p) + ik.fp_rank(p));
        }
        let mj = inv.of(&j.mirror()).unwrap();
        prop_assert_eq!(&mj.det, &ij.det);
        prop_assert_eq!(mj.sigma, -ij.sigma);
        prop_assert_eq!(mj.fp_rank(3), ij.fp_rank(3));

        // values agree with a direct computation on the block Seifert matrix
        let s = seifert_matrix(&j.connect(&k.mirror()), table()).unwrap();
        let q = s.symmetrized();
        prop_assert_eq!(det(&q).unwrap().abs(), &ij.det * &ik.det);
        prop_assert_eq!(signature(&q).unwrap(), ij.sigma - ik.sigma);
        let direct = LinkingForm::from_symmetric(&q).unwrap();
        let additive = ij.form.direct_sum(&ik.form.negate());
        prop_assert_eq!(direct.order(), additive.order());
        if direct.order() <= 400 {
            prop_assert!(isometric(&direct, &additive));
            prop_assert!(isometric(&mj.form, &ij.form.negate()));
        }
    }
}

fn mat_col(v: &[BigInt]) -> IntMatrix {
    IntMatrix::from_rows(v.iter().map(|x| vec![x.clone()]).collect()).unwrap()
}

#[test]
fn signature_even_on_every_table_knot() {
    for r in table().records() {
        let q = r.seifert.symmetrized();
        let s = signature(&q).unwrap();
        assert_eq!(s % 2, 0, "{}", r.name);
        assert_eq!(s, signature_float(&q), "{}", r.name);
        assert_eq!(det(&q).unwrap().abs() % 2u32, BigInt::one(), "{}", r.name);
    }
}

#[test]
fn jacobi_oracle_sanity() {
    assert_eq!(signature_float(&mat(&[vec![2, 1], vec![1, 2]])), 2);
    assert_eq!(signature_float(&mat(&[vec![0, 1], vec![1, 0]])), 0);
    assert_eq!(signature_float(&mat(&[vec![-2, 1, 0], vec![1, -2, 1], vec![0, 1, -2]])), -3);
}

#[test]
fn isometry_oracle_sanity() {
    // <1/5> and <2/5> differ: 2 is not a square mod 5
    let a = LinkingForm::from_symmetric(&mat(&[vec![5]])).unwrap();
    let b = LinkingForm::from_symmetric(&mat(&[vec![3, 1], vec![1, 2]])).unwrap();
    assert_eq!(a.orders(), b.orders());
    assert!(!isometric(&a, &b));
    let c = LinkingForm::from_symmetric(&mat(&[vec![-5]])).unwrap();
    // -1 is a square mod 5
    assert!(isometric(&a, &c));
    let q2 = LinkingForm::from_symmetric(&mat(&[vec![2, 1], vec![1, 3]])).unwrap();
    let q3 = LinkingForm::from_symmetric(&mat(&[vec![1, 0], vec![0, 5]])).unwrap();
    // det(diag(1,5)) = 5: form <1/5>; [[2,1],[1,3]] gives <2/5>
    assert!(isometric(&a, &q3));
    assert!(!isometric(&q2, &q3));
    assert!(isometric(&b, &q2));
}
