//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use gordian::exactmat::{det, IntMatrix};
use gordian::linkform::{GroupElement, LinkingForm};
use gordian::obstruct::CandidateMatrix;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::Rng;

/// Whether some group isomorphism `l1 → l2` preserves the pairing, by
/// backtracking over images of the canonical generators of `l1`.
pub fn isometric(l1: &LinkingForm, l2: &LinkingForm) -> bool {
    if l1.order() != l2.order() {
        return false;
    }
    let elems: Vec<GroupElement> = l2.elements(u64::MAX).unwrap().collect();
    let mut images = Vec::new();
    extend(l1, l2, &elems, &mut images)
}

fn extend(l1: &LinkingForm, l2: &LinkingForm, elems: &[GroupElement], images: &mut Vec<GroupElement>) -> bool {
    let i = images.len();
    if i == l1.rank() {
        return l2.generates(images);
    }
    let ord = l1.orders()[i];
    for h in elems {
        if !l2.scale(h, ord as i64).is_zero() {
            continue;
        }
        if l2.evaluate(h, h).unwrap() != l1.gram(i, i) {
            continue;
        }
        if (0..i).any(|j| l2.evaluate(&images[j], h).unwrap() != l1.gram(j, i)) {
            continue;
        }
        images.push(h.clone());
        if extend(l1, l2, elems, images) {
            return true;
        }
        images.pop();
    }
    false
}

/// Unfiltered search for `v1, v2` generating `l2` with `l2(vi, vj) = (C⁻¹)ij`.
pub fn realizes_brute(c: &CandidateMatrix, l2: &LinkingForm) -> bool {
    let [c11, c22, c12] = c.inverse_mod1();
    let elems: Vec<GroupElement> = l2.elements(u64::MAX).unwrap().collect();
    for v1 in &elems {
        if l2.evaluate(v1, v1).unwrap() != c11 {
            continue;
        }
        for v2 in &elems {
            if l2.evaluate(v2, v2).unwrap() == c22
                && l2.evaluate(v1, v2).unwrap() == c12
                && l2.generates(&[v1.clone(), v2.clone()])
            {
                return true;
            }
        }
    }
    false
}

pub fn mat(rows: &[Vec<i64>]) -> IntMatrix {
    IntMatrix::from_i64(rows).unwrap()
}

pub fn to_i64(m: &IntMatrix) -> Vec<Vec<i64>> {
    m.to_rows()
        .iter()
        .map(|r| r.iter().map(|x| x.to_i64().unwrap()).collect())
        .collect()
}

/// Random symmetric `n x n` matrix with entries in `-r..=r`.
pub fn random_symmetric(rng: &mut impl Rng, n: usize, r: i64) -> IntMatrix {
    let mut rows = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in i..n {
            let x = rng.gen_range(-r..=r);
            rows[i][j] = x;
            rows[j][i] = x;
        }
    }
    mat(&rows)
}

/// Random symmetric matrix with odd determinant of absolute value at most `max`.
pub fn random_odd_symmetric(rng: &mut impl Rng, max: u64) -> IntMatrix {
    loop {
        let n = rng.gen_range(1..=3);
        let q = random_symmetric(rng, n, 4);
        let d = det(&q).unwrap();
        if !d.is_zero() && (&d % 2u32) != BigInt::zero() && d.abs() <= BigInt::from(max) {
            return q;
        }
    }
}

/// Random unimodular matrix as a product of elementary operations.
pub fn random_unimodular(rng: &mut impl Rng, n: usize, steps: usize) -> IntMatrix {
    let mut rows: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
    if n < 2 {
        if rng.gen_bool(0.5) {
            rows[0][0] = -1;
        }
        return mat(&rows);
    }
    for _ in 0..steps {
        let i = rng.gen_range(0..n);
        let j = (i + rng.gen_range(1..n)) % n;
        match rng.gen_range(0..3) {
            0 => {
                let k = rng.gen_range(-2..=2);
                for c in 0..n {
                    rows[i][c] += k * rows[j][c];
                }
            }
            1 => rows.swap(i, j),
            _ => rows[i].iter_mut().for_each(|x| *x = -*x),
        }
    }
    mat(&rows)
}

/// Signature from eigenvalues found by cyclic Jacobi rotations in `f64`.
pub fn signature_float(m: &IntMatrix) -> i64 {
    let n = m.rows();
    let mut a: Vec<Vec<f64>> = to_i64(m)
        .iter()
        .map(|r| r.iter().map(|&x| x as f64).collect())
        .collect();
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-22 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n)
        .map(|i| if a[i][i] > 1e-9 { 1 } else if a[i][i] < -1e-9 { -1 } else { 0 })
        .sum()
}

/// Leibniz expansion over all permutations.
pub fn det_leibniz(m: &IntMatrix) -> BigInt {
    let n = m.rows();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = BigInt::zero();
    permute(&mut perm, 0, m, &mut total);
    total
}

fn permute(p: &mut Vec<usize>, k: usize, m: &IntMatrix, total: &mut BigInt) {
    let n = p.len();
    if k == n {
        let mut inversions = 0;
        for i in 0..n {
            for j in i + 1..n {
                if p[i] > p[j] {
                    inversions += 1;
                }
            }
        }
        let mut prod = BigInt::from(if inversions % 2 == 0 { 1 } else { -1 });
        for (i, &j) in p.iter().enumerate() {
            prod *= &m[(i, j)];
        }
        *total += prod;
        return;
    }
    for i in k..n {
        p.swap(k, i);
        permute(p, k + 1, m, total);
        p.swap(k, i);
    }
}
