use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use super::{
    candidate_set, CandidateMatrix, EpsChoice, ObstructError, ObstructionKind, ObstructionVerdict,
    SearchLimits, Status, Witness,
};
use crate::exactmat::QmodZ;
use crate::linkform::{GroupElement, LinkingForm};

fn check_order(l: &LinkingForm, det_j: &BigInt, det_k: &BigInt) -> Result<(), ObstructError> {
    let expected = det_j * det_k;
    if BigInt::from(l.order()) != expected {
        return Err(ObstructError::OrderMismatch {
            expected: expected.to_string(),
            found: l.order().to_string(),
        });
    }
    Ok(())
}

fn inapplicable(kind: ObstructionKind, det_j: &BigInt, det_k: &BigInt) -> Option<ObstructionVerdict> {
    let g = det_j.gcd(det_k);
    (!g.is_one()).then(|| {
        ObstructionVerdict::new(
            kind,
            Status::Inapplicable,
            format!("gcd(det J, det K) = {g}"),
        )
    })
}

/// The single-generator test on the form `l` of `-J # K`.
pub fn d1_obstruction(
    l: &LinkingForm,
    det_j: &BigInt,
    det_k: &BigInt,
    eps: EpsChoice,
    limits: &SearchLimits,
) -> Result<ObstructionVerdict, ObstructError> {
    use ObstructionKind::D1;
    if let Some(v) = inapplicable(D1, det_j, det_k) {
        return Ok(v);
    }
    check_order(l, det_j, det_k)?;
    if !l.is_cyclic() {
        return Ok(ObstructionVerdict::new(
            D1,
            Status::Violated,
            format!("group {:?} is not cyclic", l.orders()),
        ));
    }
    let n = l.order();
    if n > limits.cap {
        return Err(crate::linkform::LinkError::CapExceeded {
            order: n,
            cap: limits.cap,
        }
        .into());
    }
    for &e in eps.signs() {
        let target = QmodZ::new(2 * e as i128, n);
        if let Some(g) = find_generator(l, target, limits)? {
            let mut v = ObstructionVerdict::new(D1, Status::Holds, "");
            v.witness = Some(Witness::Generator {
                element: g,
                eps: e,
                self_link: target,
            });
            return Ok(v);
        }
    }
    Ok(ObstructionVerdict::new(
        D1,
        Status::Violated,
        format!("no generator has self-link 2ε/{n} for ε in {eps}"),
    ))
}

/// A generator `k·g_0` of the cyclic form `l` with `lk = target`.
fn find_generator(
    l: &LinkingForm,
    target: QmodZ,
    limits: &SearchLimits,
) -> Result<Option<GroupElement>, ObstructError> {
    if l.is_trivial() {
        return Ok(target.is_zero().then(|| l.zero()));
    }
    let n = l.order();
    let Some(want) = target.over(n) else {
        return Ok(None);
    };
    let q = l.gram(0, 0).over(n).expect("cyclic form of order n");
    for k in 1..n {
        if k % 65_536 == 0 {
            limits.check()?;
        }
        if k.gcd(&n) != 1 {
            continue;
        }
        let kk = (k as u128 * k as u128 % n as u128) as u64;
        if (q as u128 * kk as u128 % n as u128) as u64 == want {
            return Ok(Some(GroupElement::new(vec![k])));
        }
    }
    Ok(None)
}

/// Prefiltered search for `v1, v2` realizing `λ(C)` on a doubled form.
/// Self-link classes are computed once and shared across candidates.
pub struct IsometrySearch<'a> {
    form: &'a LinkingForm,
    classes: BTreeMap<u64, Vec<u64>>,
    limits: &'a SearchLimits,
}

impl<'a> IsometrySearch<'a> {
    pub fn new(l2: &'a LinkingForm, limits: &'a SearchLimits) -> Result<Self, ObstructError> {
        let classes = if l2.rank() > 2 {
            BTreeMap::new()
        } else {
            l2.self_link_classes(limits.cap)?
        };
        Ok(IsometrySearch {
            form: l2,
            classes,
            limits,
        })
    }

    pub fn find(&self, c: &CandidateMatrix) -> Result<Option<(GroupElement, GroupElement)>, ObstructError> {
        let l = self.form;
        if c.det().unsigned_abs() != l.order() {
            return Err(ObstructError::OrderMismatch {
                expected: c.det().unsigned_abs().to_string(),
                found: l.order().to_string(),
            });
        }
        // two elements cannot generate a group of rank three or more
        if l.rank() > 2 {
            return Ok(None);
        }
        let e = l.exponent();
        let [t11, t22, t12] = c.inverse_mod1();
        let (Some(n11), Some(n22), Some(n12)) = (t11.over(e), t22.over(e), t12.over(e)) else {
            return Ok(None);
        };
        let (Some(first), Some(second)) = (self.classes.get(&n11), self.classes.get(&n22)) else {
            return Ok(None);
        };
        let second: Vec<GroupElement> = second.iter().map(|&j| l.element_at(j)).collect();
        for &i in first {
            self.limits.check()?;
            let v1 = l.element_at(i);
            for v2 in &second {
                if l.pair_scaled(&v1.coeffs, &v2.coeffs) == n12
                    && l.generates(&[v1.clone(), v2.clone()])
                {
                    return Ok(Some((v1, v2.clone())));
                }
            }
        }
        Ok(None)
    }
}

/// Whether `λ(C)` is isometric to `l2` (already the doubled form), with a
/// witnessing generating pair.
pub fn lambda_isometric(
    c: &CandidateMatrix,
    l2: &LinkingForm,
    limits: &SearchLimits,
) -> Result<Option<(GroupElement, GroupElement)>, ObstructError> {
    IsometrySearch::new(l2, limits)?.find(c)
}

/// The 2x2 candidate test on the form `l` of `-J # K`.
pub fn d2_obstruction(
    l: &LinkingForm,
    det_j: &BigInt,
    det_k: &BigInt,
    limits: &SearchLimits,
) -> Result<ObstructionVerdict, ObstructError> {
    d2_with_candidates(l, det_j, det_k, limits, candidate_set)
}

pub(crate) fn d2_with_candidates(
    l: &LinkingForm,
    det_j: &BigInt,
    det_k: &BigInt,
    limits: &SearchLimits,
    candidates: impl FnOnce(i64) -> Result<Vec<CandidateMatrix>, ObstructError>,
) -> Result<ObstructionVerdict, ObstructError> {
    use ObstructionKind::D2;
    if let Some(v) = inapplicable(D2, det_j, det_k) {
        return Ok(v);
    }
    check_order(l, det_j, det_k)?;
    if l.rank() > 2 {
        return Ok(ObstructionVerdict::new(
            D2,
            Status::Violated,
            format!("group {:?} needs more than two generators", l.orders()),
        ));
    }
    let d = (det_j * det_k)
        .to_i64()
        .ok_or_else(|| ObstructError::DeterminantTooLarge((det_j * det_k).to_string()))?;
    let cands = candidates(d)?;
    let l2 = l.double();
    let search = IsometrySearch::new(&l2, limits)?;
    for c in &cands {
        if let Some((v1, v2)) = search.find(c)? {
            let mut v = ObstructionVerdict::new(D2, Status::Holds, "");
            v.witness = Some(Witness::Isometry {
                matrix: *c,
                v1,
                v2,
            });
            return Ok(v);
        }
    }
    Ok(ObstructionVerdict::new(
        D2,
        Status::Violated,
        format!("none of {} candidates of determinant ±{d} matches", cands.len()),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trefoil_form() -> LinkingForm {
        LinkingForm::from_gram(vec![3], &[QmodZ::new(1, 3)]).unwrap()
    }

    fn limits() -> SearchLimits {
        SearchLimits::default()
    }

    #[test]
    fn d1_unknot_trefoil_holds() {
        let v = d1_obstruction(
            &trefoil_form(),
            &BigInt::from(1),
            &BigInt::from(3),
            EpsChoice::Both,
            &limits(),
        )
        .unwrap();
        assert_eq!(v.status, Status::Holds);
        // only ε = -1 works: -2/3 ≡ 1/3
        assert!(matches!(v.witness, Some(Witness::Generator { eps: -1, .. })));
        let plus = d1_obstruction(
            &trefoil_form(),
            &BigInt::from(1),
            &BigInt::from(3),
            EpsChoice::Plus,
            &limits(),
        )
        .unwrap();
        assert_eq!(plus.status, Status::Violated);
    }

    #[test]
    fn d1_trivial_and_noncyclic() {
        let one = BigInt::from(1);
        let v = d1_obstruction(&LinkingForm::trivial(), &one, &one, EpsChoice::Both, &limits()).unwrap();
        assert_eq!(v.status, Status::Holds);
        let f = trefoil_form().direct_sum(&trefoil_form());
        let v = d1_obstruction(&f, &BigInt::from(9), &one, EpsChoice::Both, &limits()).unwrap();
        assert_eq!(v.status, Status::Violated);
        let v = d1_obstruction(&f, &BigInt::from(3), &BigInt::from(3), EpsChoice::Both, &limits()).unwrap();
        assert_eq!(v.status, Status::Inapplicable);
    }

    #[test]
    fn d1_order_mismatch() {
        let r = d1_obstruction(
            &trefoil_form(),
            &BigInt::from(5),
            &BigInt::from(1),
            EpsChoice::Both,
            &limits(),
        );
        assert!(matches!(r, Err(ObstructError::OrderMismatch { .. })));
    }

    #[test]
    fn lambda_examples() {
        let l2 = trefoil_form().double();
        let found = lambda_isometric(&CandidateMatrix::new(1, -3, 0), &l2, &limits()).unwrap();
        let (v1, v2) = found.expect("diag(1,-3) realizes 2lk");
        assert!(v1.is_zero());
        assert_eq!(l2.evaluate(&v2, &v2).unwrap(), QmodZ::new(2, 3));
        assert!(lambda_isometric(&CandidateMatrix::new(1, 3, 0), &l2, &limits())
            .unwrap()
            .is_none());
        let t = LinkingForm::trivial();
        let (a, b) = lambda_isometric(&CandidateMatrix::new(1, 1, 0), &t, &limits())
            .unwrap()
            .unwrap();
        assert!(a.is_zero() && b.is_zero());
    }

    #[test]
    fn d2_unknot_trefoil_holds() {
        let v = d2_obstruction(&trefoil_form(), &BigInt::from(1), &BigInt::from(3), &limits()).unwrap();
        assert_eq!(v.status, Status::Holds);
    }

    #[test]
    fn cap_is_an_error() {
        let r = d2_obstruction(
            &trefoil_form(),
            &BigInt::from(1),
            &BigInt::from(3),
            &SearchLimits::with_cap(2),
        );
        assert!(r.unwrap_err().is_cap());
    }

    #[test]
    fn cancellation() {
        let flag = std::sync::Arc::new(std::sync::atomic::AtomicBool::new(true));
        let limits = SearchLimits {
            cap: 100,
            cancel: Some(flag),
        };
        let r = d2_obstruction(&trefoil_form(), &BigInt::from(1), &BigInt::from(3), &limits);
        assert_eq!(r, Err(ObstructError::Cancelled));
    }
}
