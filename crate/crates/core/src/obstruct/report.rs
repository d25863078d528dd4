use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use serde::Serialize;

use super::search::d2_with_candidates;
use super::{
    candidate_set, d1_obstruction, CandidateMatrix, EpsChoice, Invariants, KnotInvariants,
    ObstructError, ObstructionKind, ObstructionVerdict, SearchLimits, Status,
};
use crate::exactmat::odd_prime_divisors;
use crate::knots::{KnotExpr, Summand};

/// Signature, `s`, `τ` and `F_p`-rank lower bounds. Bounds needing data
/// that is missing for either knot are `None`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ClassicalBounds {
    pub sigma: u32,
    pub s: Option<u32>,
    pub tau: Option<u32>,
    pub fp: u32,
    /// Smallest odd prime attaining `fp`; `None` when `det(J)·det(K) = 1`.
    pub fp_prime: Option<u64>,
}

impl ClassicalBounds {
    pub fn best(&self) -> u32 {
        [Some(self.sigma), self.s, self.tau, Some(self.fp)]
            .into_iter()
            .flatten()
            .max()
            .unwrap_or(0)
    }
}

pub fn classical_bounds(j: &KnotInvariants, k: &KnotInvariants) -> ClassicalBounds {
    let diff = |a: i64, b: i64| (a - b).unsigned_abs() as u32;
    let mut fp = 0;
    let mut fp_prime = None;
    for p in odd_prime_divisors(&(&j.det * &k.det)) {
        let b = (j.fp_rank(p) as i64 - k.fp_rank(p) as i64).unsigned_abs() as u32;
        if fp_prime.is_none() || b > fp {
            fp = b;
            fp_prime = Some(p);
        }
    }
    ClassicalBounds {
        sigma: diff(j.sigma, k.sigma) / 2,
        s: j.s.zip(k.s).map(|(a, b)| diff(a, b) / 2),
        tau: j.tau.zip(k.tau).map(|(a, b)| diff(a, b)),
        fp,
        fp_prime,
    }
}

#[derive(Debug, Clone, Default)]
pub struct ReportOptions {
    pub limits: SearchLimits,
    pub eps: EpsChoice,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub knot_j: String,
    pub knot_k: String,
    #[serde(with = "crate::serde_bigint")]
    pub det_j: BigInt,
    #[serde(with = "crate::serde_bigint")]
    pub det_k: BigInt,
    pub sigma_j: i64,
    pub sigma_k: i64,
    pub coprime: bool,
    /// Orders of the invariant factors of the form of `-J # K`.
    pub group: Vec<u64>,
    pub classical: ClassicalBounds,
    pub d1: ObstructionVerdict,
    pub d2: ObstructionVerdict,
    pub lower: u32,
    pub upper: Option<u32>,
    pub exact: bool,
    pub verdict: String,
}

impl BoundReport {
    /// Whether either obstruction hit the group-order cap.
    pub fn capped(&self) -> bool {
        self.d1.status == Status::Cap || self.d2.status == Status::Cap
    }

    pub fn linking_d1(&self) -> Option<u32> {
        self.d1.bound()
    }

    pub fn linking_d2(&self) -> Option<u32> {
        self.d2.bound()
    }
}

/// Summands with unknots removed and orientations dropped, sorted. Knots are
/// compared up to orientation, like every bound in the report.
fn identity_key(e: &KnotExpr) -> Vec<Summand> {
    let mut v: Vec<Summand> = e
        .summands()
        .iter()
        .filter(|s| !s.is_unknot())
        .map(|s| Summand { reversed: false, ..s.clone() })
        .collect();
    v.sort();
    v
}

fn capped(kind: ObstructionKind, e: ObstructError) -> Result<ObstructionVerdict, ObstructError> {
    if e.is_cap() {
        Ok(ObstructionVerdict::new(kind, Status::Cap, e.to_string()))
    } else {
        Err(e)
    }
}

/// Full report for `(J, K)`. Identical expressions short-circuit to `d = 0`.
pub fn report(
    j: &KnotExpr,
    k: &KnotExpr,
    inv: &Invariants<'_>,
    opts: &ReportOptions,
) -> Result<BoundReport, ObstructError> {
    let ij = inv.of(j)?;
    let ik = inv.of(k)?;
    report_for(&ij, &ik, opts, |d| candidate_set(d))
}

/// Report from precomputed invariants; `candidates` supplies `C_d ∪ C_{-d}`.
pub fn report_for(
    j: &KnotInvariants,
    k: &KnotInvariants,
    opts: &ReportOptions,
    candidates: impl FnOnce(i64) -> Result<Vec<CandidateMatrix>, ObstructError>,
) -> Result<BoundReport, ObstructError> {
    let classical = classical_bounds(j, k);
    let coprime = j.det.gcd(&k.det).is_one();
    let form = j.form.negate().direct_sum(&k.form);
    let mut out = BoundReport {
        knot_j: j.expr.to_string(),
        knot_k: k.expr.to_string(),
        det_j: j.det.clone(),
        det_k: k.det.clone(),
        sigma_j: j.sigma,
        sigma_k: k.sigma,
        coprime,
        group: form.orders().to_vec(),
        classical,
        d1: ObstructionVerdict::new(ObstructionKind::D1, Status::Inapplicable, ""),
        d2: ObstructionVerdict::new(ObstructionKind::D2, Status::Inapplicable, ""),
        lower: 0,
        upper: j.u_max.zip(k.u_max).map(|(a, b)| a + b),
        exact: false,
        verdict: String::new(),
    };

    if identity_key(&j.expr) == identity_key(&k.expr) {
        out.d1.notes = "identical knots".into();
        out.d2.notes = "identical knots".into();
        out.upper = Some(0);
        out.exact = true;
        out.verdict = "d = 0".into();
        return Ok(out);
    }

    out.d1 = d1_obstruction(&form, &j.det, &k.det, opts.eps, &opts.limits)
        .or_else(|e| capped(ObstructionKind::D1, e))?;
    out.d2 = d2_with_candidates(&form, &j.det, &k.det, &opts.limits, candidates)
        .or_else(|e| capped(ObstructionKind::D2, e))?;

    out.lower = [
        Some(classical.best()),
        out.d1.bound(),
        out.d2.bound(),
    ]
    .into_iter()
    .flatten()
    .max()
    .unwrap_or(0);

    if let Some(u) = out.upper {
        if out.lower > u {
            return Err(ObstructError::Inconsistent {
                j: out.knot_j,
                k: out.knot_k,
                lower: out.lower,
                upper: u,
            });
        }
    }
    out.exact = out.upper == Some(out.lower);
    out.verdict = match out.upper {
        Some(u) if u == out.lower => format!("d = {u}"),
        Some(u) => format!("{} <= d <= {u}", out.lower),
        None => format!("d >= {}", out.lower),
    };
    Ok(out)
}
