use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::IntMatrix;

/// `u · m · v = diag(diag)` with `u`, `v` unimodular.
///
/// `u_inv` is tracked alongside `u` because its columns are the cokernel
/// generators: the class of column `i` of `u_inv` generates the `i`-th
/// cyclic summand `Z/diag[i]` of `coker(m)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub v: IntMatrix,
    /// Invariant factors, nonnegative, each dividing the next, zeros last.
    pub diag: Vec<BigInt>,
}

impl SmithDecomposition {
    /// `diag` laid out as a matrix of the input's shape.
    pub fn diagonal_matrix(&self) -> IntMatrix {
        let mut d = IntMatrix::zeros(self.u.rows(), self.v.rows());
        for (i, x) in self.diag.iter().enumerate() {
            d[(i, i)] = x.clone();
        }
        d
    }
}

struct SmithState {
    a: IntMatrix,
    u: IntMatrix,
    u_inv: IntMatrix,
    v: IntMatrix,
}

impl SmithState {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap_rows(i, j);
        self.u.swap_rows(i, j);
        self.u_inv.swap_cols(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        self.a.swap_cols(i, j);
        self.v.swap_cols(i, j);
    }

    /// `row[dst] += k row[src]`; the inverse acts on `u_inv` as `col[src] -= k col[dst]`.
    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        self.a.add_row_multiple(dst, src, k);
        self.u.add_row_multiple(dst, src, k);
        self.u_inv.add_col_multiple(src, dst, &-k);
    }

    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        self.a.add_col_multiple(dst, src, k);
        self.v.add_col_multiple(dst, src, k);
    }

    fn negate_row(&mut self, r: usize) {
        self.a.negate_row(r);
        self.u.negate_row(r);
        self.u_inv.negate_col(r);
    }

    fn min_abs_nonzero(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.a.rows() {
            for j in t..self.a.cols() {
                let x = &self.a[(i, j)];
                if x.is_zero() {
                    continue;
                }
                match best {
                    Some((bi, bj)) if self.a[(bi, bj)].abs() <= x.abs() => {}
                    _ => best = Some((i, j)),
                }
            }
        }
        best
    }

    /// Clears row and column `t` below/right of the pivot. Returns false when
    /// a nonzero remainder is left behind, i.e. a smaller pivot now exists.
    fn eliminate(&mut self, t: usize) -> bool {
        let mut clean = true;
        for i in t + 1..self.a.rows() {
            if self.a[(i, t)].is_zero() {
                continue;
            }
            let q = self.a[(i, t)].div_floor(&self.a[(t, t)]);
            self.add_row(i, t, &-q);
            clean &= self.a[(i, t)].is_zero();
        }
        for j in t + 1..self.a.cols() {
            if self.a[(t, j)].is_zero() {
                continue;
            }
            let q = self.a[(t, j)].div_floor(&self.a[(t, t)]);
            self.add_col(j, t, &-q);
            clean &= self.a[(t, j)].is_zero();
        }
        clean
    }

    fn non_divisible_row(&self, t: usize) -> Option<usize> {
        let p = &self.a[(t, t)];
        (t + 1..self.a.rows())
            .find(|&i| (t + 1..self.a.cols()).any(|j| !(&self.a[(i, j)] % p).is_zero()))
    }
}

/// Smith normal form of an arbitrary (possibly rectangular) integer matrix.
pub fn smith(m: &IntMatrix) -> SmithDecomposition {
    let (rows, cols) = (m.rows(), m.cols());
    let mut s = SmithState {
        a: m.clone(),
        u: IntMatrix::identity(rows),
        u_inv: IntMatrix::identity(rows),
        v: IntMatrix::identity(cols),
    };
    let steps = rows.min(cols);
    for t in 0..steps {
        let mut exhausted = false;
        loop {
            let Some((pi, pj)) = s.min_abs_nonzero(t) else {
                exhausted = true;
                break;
            };
            s.swap_rows(t, pi);
            s.swap_cols(t, pj);
            if !s.eliminate(t) {
                continue;
            }
            match s.non_divisible_row(t) {
                Some(i) => s.add_row(t, i, &BigInt::from(1)),
                None => break,
            }
        }
        if exhausted {
            break;
        }
        if s.a[(t, t)].is_negative() {
            s.negate_row(t);
        }
    }
    let diag = (0..steps).map(|i| s.a[(i, i)].clone()).collect();
    SmithDecomposition {
        u: s.u,
        u_inv: s.u_inv,
        v: s.v,
        diag,
    }
}

#[cfg(test)]
mod tests {
    use super::super::det;
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_i64(rows).unwrap()
    }

    fn diag_i64(s: &SmithDecomposition) -> Vec<i64> {
        s.diag.iter().map(|x| i64::try_from(x).unwrap()).collect()
    }

    fn check(input: &IntMatrix, s: &SmithDecomposition) {
        let prod = s.u.mul(input).unwrap().mul(&s.v).unwrap();
        assert_eq!(prod, s.diagonal_matrix());
        assert_eq!(
            s.u.mul(&s.u_inv).unwrap(),
            IntMatrix::identity(input.rows())
        );
        assert_eq!(det(&s.v).unwrap().abs(), BigInt::from(1));
    }

    #[test]
    fn coprime_diagonal() {
        let a = IntMatrix::diagonal(&[2, 3]);
        let s = smith(&a);
        check(&a, &s);
        assert_eq!(diag_i64(&s), vec![1, 6]);
    }

    #[test]
    fn trefoil_symmetrization() {
        let a = m(&[&[-2, 1], &[1, -2]]);
        let s = smith(&a);
        check(&a, &s);
        assert_eq!(diag_i64(&s), vec![1, 3]);
    }

    #[test]
    fn zero_matrix() {
        let a = IntMatrix::zeros(2, 2);
        let s = smith(&a);
        check(&a, &s);
        assert_eq!(diag_i64(&s), vec![0, 0]);
    }

    #[test]
    fn rectangular_with_zeros_last() {
        let a = m(&[&[0, 0, 0], &[0, 4, 6]]);
        let s = smith(&a);
        check(&a, &s);
        assert_eq!(diag_i64(&s), vec![2, 0]);
    }

    #[test]
    fn divisibility_fixup() {
        let a = IntMatrix::diagonal(&[4, 6, 9]);
        let s = smith(&a);
        check(&a, &s);
        assert_eq!(diag_i64(&s), vec![1, 6, 36]);
    }
}
