mod common;

use common::{isometric, mat, random_odd_symmetric, realizes_brute};
use gordian::exactmat::{det, QmodZ};
use gordian::ingest::KnotTable;
use gordian::knots::{parse_expr, KnotExpr};
use gordian::linkform::{GroupElement, LinkingForm};
use gordian::obstruct::{
    candidate_set, d1_obstruction, d2_obstruction, lambda_isometric, report, EpsChoice, Invariants,
    ReportOptions, SearchLimits, Status,
};
use gordian::scan::{scan_pairs, ScanOptions};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn lambda_isometric_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6c6b);
    let limits = SearchLimits::default();
    let (mut found, mut total) = (0, 0);
    for _ in 0..120 {
        let q = random_odd_symmetric(&mut rng, 120);
        let d = det(&q).unwrap().to_i64().unwrap();
        let l2 = LinkingForm::from_symmetric(&q).unwrap().double();
        for c in candidate_set(d.abs()).unwrap() {
            let fast = lambda_isometric(&c, &l2, &limits).unwrap();
            assert_eq!(fast.is_some(), realizes_brute(&c, &l2), "Q = {q:?}, C = {c}");
            if let Some((v1, v2)) = fast {
                let [c11, c22, c12] = c.inverse_mod1();
                assert_eq!(l2.evaluate(&v1, &v1).unwrap(), c11);
                assert_eq!(l2.evaluate(&v2, &v2).unwrap(), c22);
                assert_eq!(l2.evaluate(&v1, &v2).unwrap(), c12);
                assert!(l2.generates(&[v1, v2]));
                found += 1;
            }
            total += 1;
        }
    }
    // both outcomes occur
    assert!(found > 0 && found < total, "{found}/{total}");
}

/// Every odd 2x2 form of odd determinant has its linking form realized by a candidate.
#[test]
fn candidates_cover_small_odd_forms() {
    let r = 6i64;
    for a in -r..=r {
        for b in -r..=r {
            for c in -r..=r {
                let d = a * b - c * c;
                if d % 2 == 0 || d.abs() > 25 || (a % 2 == 0 && b % 2 == 0) {
                    continue;
                }
                let l = LinkingForm::from_symmetric(&mat(&[vec![a, c], vec![c, b]])).unwrap();
                let hit = candidate_set(d.abs())
                    .unwrap()
                    .into_iter()
                    .filter(|m| m.det() == d)
                    .any(|m| isometric(&l, &LinkingForm::from_symmetric(&m.to_matrix()).unwrap()));
                assert!(hit, "[[{a},{c}],[{c},{b}]]");
            }
        }
    }
}

#[test]
fn candidates_satisfy_constraints() {
    for d in (1..=301).step_by(2) {
        for m in candidate_set(d).unwrap() {
            assert_eq!(m.det().abs(), d);
            assert!(m.is_odd_form());
            if m.b == 0 {
                assert!(m.c > 0 && m.a.abs() <= m.c && m.det() == -m.c * m.c);
            } else {
                assert!(m.a != 0 && m.a.abs() <= m.b.abs() && m.b.abs() <= d);
                assert!(0 <= m.c && 2 * m.c <= m.a.abs());
            }
        }
    }
}

fn cyclic(n: u64, a: u64) -> LinkingForm {
    LinkingForm::from_gram(vec![n], &[QmodZ::new(a as i128, n)]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn d1_matches_generator_search(dj in (0u64..12).prop_map(|x| 2 * x + 1),
                                   dk in (0u64..12).prop_map(|x| 2 * x + 1),
                                   a in 1u64..1000) {
        let n = dj * dk;
        prop_assume!(n > 1 && dj.gcd(&dk) == 1 && a.gcd(&n) == 1);
        let l = cyclic(n, a % n);
        let limits = SearchLimits::default();
        for eps in [EpsChoice::Plus, EpsChoice::Minus, EpsChoice::Both] {
            let v = d1_obstruction(&l, &BigInt::from(dj), &BigInt::from(dk), eps, &limits).unwrap();
            let brute = (0..n).any(|k| {
                let g = GroupElement::new(vec![k]);
                l.generates(std::slice::from_ref(&g))
                    && eps.signs().iter().any(|&e| {
                        l.evaluate(&g, &g).unwrap() == QmodZ::new(2 * e as i128, n)
                    })
            });
            prop_assert_eq!(v.status == Status::Violated, !brute);
        }
    }

    /// A generator with self-link 2ε/n gives the witness C = diag(1, εn), so
    /// whenever the first test holds the second does too.
    #[test]
    fn d2_violation_implies_d1_violation(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = random_odd_symmetric(&mut rng, 150);
        let n = det(&q).unwrap().to_i64().unwrap().unsigned_abs();
        let l = LinkingForm::from_symmetric(&q).unwrap();
        let dj = BigInt::from(n);
        let dk = BigInt::from(1);
        let limits = SearchLimits::default();
        let v1 = d1_obstruction(&l, &dj, &dk, EpsChoice::Both, &limits).unwrap();
        let v2 = d2_obstruction(&l, &dj, &dk, &limits).unwrap();
        if v2.status == Status::Violated {
            prop_assert_eq!(v1.status, Status::Violated);
        }
    }
}

#[test]
fn unknotting_data_is_consistent_with_obstructions() {
    let table = KnotTable::bundled();
    let inv = Invariants::new(&table);
    let opts = ReportOptions::default();
    for r in table.records() {
        let Some(u) = r.u else { continue };
        let k = KnotExpr::knot(r.name.clone());
        let rep = report(&KnotExpr::unknot(), &k, &inv, &opts).unwrap();
        assert!(rep.lower <= u.max, "{}: lower {} > u {}", r.name, rep.lower, u.max);
        if u.max <= 2 {
            assert_ne!(rep.d2.status, Status::Violated, "{}", r.name);
        }
        if u.max <= 1 {
            assert_ne!(rep.d1.status, Status::Violated, "{}", r.name);
        }
    }
}

#[test]
fn scan_rows_are_consistent() {
    let table = KnotTable::bundled();
    let inv = Invariants::new(&table);
    let opts = ScanOptions {
        max_crossings: Some(8),
        max_composite_crossings: Some(8),
        ..Default::default()
    };
    let res = scan_pairs(&inv, &opts).unwrap();
    assert!(res.rows.len() > 1000);
    for row in &res.rows {
        if row.d2_status == Status::Violated {
            assert_eq!(row.d1_status, Status::Violated, "{}", row.pair_key);
        }
        if let Some(u) = row.upper {
            assert!(row.lower <= u, "{}", row.pair_key);
        }
        if !row.coprime {
            assert_eq!(row.d1_status, Status::Inapplicable);
        }
    }
}

#[test]
fn random_pairs_never_contradict_upper_bounds() {
    let table = KnotTable::bundled();
    let inv = Invariants::new(&table);
    let names: Vec<&str> = table.records().iter().map(|r| r.name.as_str()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let opts = ReportOptions::default();
    for _ in 0..300 {
        let mut pick = || {
            let n = names[rng.gen_range(0..names.len())];
            if rng.gen_bool(0.5) { format!("m{n}") } else { n.to_string() }
        };
        let j = parse_expr(&pick()).unwrap();
        let k = parse_expr(&format!("{} # {}", pick(), pick())).unwrap();
        // report fails with Inconsistent if lower exceeds upper
        report(&j, &k, &inv, &opts).unwrap();
    }
}
