use std::fmt;

use num_integer::Roots;
use serde::{Deserialize, Serialize};

use super::ObstructError;
use crate::exactmat::{IntMatrix, QmodZ};

/// The symmetric matrix `[[a, c], [c, b]]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CandidateMatrix {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl CandidateMatrix {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        CandidateMatrix { a, b, c }
    }

    pub fn det(&self) -> i64 {
        self.a * self.b - self.c * self.c
    }

    /// Entrywise congruent to the identity mod 2.
    pub fn is_identity_mod2(&self) -> bool {
        self.a.rem_euclid(2) == 1 && self.b.rem_euclid(2) == 1 && self.c.rem_euclid(2) == 0
    }

    /// Integrally congruent to some matrix that is the identity mod 2.
    ///
    /// For odd determinant this holds iff the form is odd (some diagonal
    /// entry is odd): over `F_2` every non-alternating nondegenerate 2x2 form
    /// is congruent to `I`, and `GL_2(Z) → GL_2(F_2)` is onto. The reduced
    /// representative itself need not be the identity mod 2, e.g.
    /// `[[3,2],[2,3]]` reduces to `[[2,1],[1,3]]`.
    pub fn is_odd_form(&self) -> bool {
        self.a % 2 != 0 || self.b % 2 != 0
    }

    /// Entries of `C⁻¹ = adj(C) / det(C)` reduced mod 1, as `[(1,1), (2,2), (1,2)]`.
    pub fn inverse_mod1(&self) -> [QmodZ; 3] {
        let d = self.det();
        let q = |n: i64| {
            let (n, d) = if d < 0 { (-n, -d) } else { (n, d) };
            QmodZ::new(n as i128, d as u64)
        };
        [q(self.b), q(self.a), q(-self.c)]
    }

    pub fn to_matrix(&self) -> IntMatrix {
        IntMatrix::from_i64(&[[self.a, self.c], [self.c, self.b]]).expect("2x2")
    }
}

impl fmt::Display for CandidateMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.a, self.c, self.c, self.b)
    }
}

fn check_det(d: i64) -> Result<(), ObstructError> {
    if d == 0 || d % 2 == 0 {
        return Err(ObstructError::EvenDeterminant(d));
    }
    if d.checked_abs().and_then(|x| x.checked_mul(4)).is_none() {
        return Err(ObstructError::DeterminantTooLarge(d.to_string()));
    }
    Ok(())
}

/// Reduced forms of determinant `d` from both canonical families, before
/// the mod-2 filter.
///
/// First family: `0 < |a| ≤ |b| ≤ |d|`, `0 ≤ c ≤ ⌊|a|/2⌋`. Since
/// `|d| ≥ |ab| - c² ≥ a² - a²/4`, only `3a² ≤ 4|d|` needs visiting.
/// Second family: `[[a, c], [c, 0]]` with `c > 0`, `-c ≤ a ≤ c` and
/// determinant `-c²`.
fn reduced_forms(d: i64) -> Vec<CandidateMatrix> {
    let n = d.abs();
    let mut out = Vec::new();
    let mut abs_a = 1i64;
    while 3 * abs_a * abs_a <= 4 * n {
        for a in [abs_a, -abs_a] {
            for c in 0..=abs_a / 2 {
                let num = d + c * c;
                if num % a != 0 {
                    continue;
                }
                let b = num / a;
                if abs_a <= b.abs() && b.abs() <= n {
                    out.push(CandidateMatrix::new(a, b, c));
                }
            }
        }
        abs_a += 1;
    }
    if d < 0 {
        let c = n.sqrt();
        if c * c == n {
            for a in -c..=c {
                out.push(CandidateMatrix::new(a, 0, c));
            }
        }
    }
    out
}

/// `C_d`: reduced matrices of determinant exactly `d` whose congruence class
/// contains a matrix that is the identity mod 2, sorted by `(a, b, c)`.
pub fn candidate_matrices(d: i64) -> Result<Vec<CandidateMatrix>, ObstructError> {
    check_det(d)?;
    let mut out: Vec<CandidateMatrix> = reduced_forms(d)
        .into_iter()
        .filter(CandidateMatrix::is_odd_form)
        .collect();
    out.sort();
    out.dedup();
    Ok(out)
}

/// `C_d ∪ C_{-d}`, sorted.
pub fn candidate_set(d: i64) -> Result<Vec<CandidateMatrix>, ObstructError> {
    let mut out = candidate_matrices(d)?;
    out.extend(candidate_matrices(-d)?);
    out.sort();
    Ok(out)
}
