use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::{IntMatrix, MatrixError};

/// Signature of a nonsingular symmetric matrix by rational congruence
/// diagonalization.
///
/// Pivots on a nonzero diagonal entry when one remains; otherwise the
/// remaining block has zero diagonal and some off-diagonal `b ≠ 0`, and the
/// hyperbolic block `[[0,b],[b,0]]` (one positive, one negative eigenvalue)
/// is split off instead.
pub fn signature(s: &IntMatrix) -> Result<i64, MatrixError> {
    if !s.is_square() {
        return Err(MatrixError::NotSquare {
            rows: s.rows(),
            cols: s.cols(),
        });
    }
    if !s.is_symmetric() {
        return Err(MatrixError::NotSymmetric);
    }
    let n = s.rows();
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            s.row(i)
                .iter()
                .map(|x| BigRational::from_integer(x.clone()))
                .collect()
        })
        .collect();
    // indices still in play
    let mut live: Vec<usize> = (0..n).collect();
    let mut sig = 0i64;

    while !live.is_empty() {
        if let Some(pos) = live.iter().position(|&i| !a[i][i].is_zero()) {
            let p = live.swap_remove(pos);
            let pivot = a[p][p].clone();
            sig += if pivot.is_positive() { 1 } else { -1 };
            for &i in &live {
                if a[i][p].is_zero() {
                    continue;
                }
                let f = &a[i][p] / &pivot;
                for &j in &live {
                    let v = &f * &a[p][j];
                    a[i][j] -= v;
                }
            }
            continue;
        }

        let pair = live.iter().enumerate().find_map(|(x, &i)| {
            live[x + 1..]
                .iter()
                .find(|&&j| !a[i][j].is_zero())
                .map(|&j| (i, j))
        });
        let Some((p, q)) = pair else {
            return Err(MatrixError::Singular);
        };
        live.retain(|&i| i != p && i != q);
        // Schur complement against [[0,b],[b,0]], whose inverse is [[0,1/b],[1/b,0]]:
        // a[i][j] -= (a[i][p] a[q][j] + a[i][q] a[p][j]) / b
        let b = a[p][q].clone();
        for &i in &live {
            for &j in &live {
                let v = (&a[i][p] * &a[q][j] + &a[i][q] * &a[p][j]) / &b;
                a[i][j] -= v;
            }
        }
    }
    Ok(sig)
}
