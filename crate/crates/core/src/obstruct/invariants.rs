use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use super::ObstructError;
use crate::ingest::{CachedInvariants, InvariantCache, KnotTable};
use crate::knots::{knot_det, knot_signature, KnotError, KnotExpr, Summand};
use crate::linkform::LinkingForm;

/// Invariants of a knot expression used by the bounds.
///
/// `det`, `sigma` and `form` come from Seifert matrices and are additive
/// over connected sums. `s`, `tau` and the unknotting data come from the
/// table and are present only when every summand has them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KnotInvariants {
    pub expr: KnotExpr,
    #[serde(with = "crate::serde_bigint")]
    pub det: BigInt,
    pub sigma: i64,
    #[serde(skip)]
    pub form: LinkingForm,
    pub s: Option<i64>,
    pub tau: Option<i64>,
    /// Sum of the summands' largest possible unknotting numbers.
    pub u_max: Option<u32>,
    /// Sum of known crossing numbers.
    pub crossings: Option<u32>,
    /// `Some(true)` only for a single 2-bridge prime summand.
    pub two_bridge: Option<bool>,
}

impl KnotInvariants {
    pub fn unknot() -> Self {
        KnotInvariants {
            expr: KnotExpr::unknot(),
            det: BigInt::one(),
            sigma: 0,
            form: LinkingForm::trivial(),
            s: Some(0),
            tau: Some(0),
            u_max: Some(0),
            crossings: Some(0),
            two_bridge: Some(false),
        }
    }

    /// `dim H_1(Σ; F_p)` for an odd prime `p`.
    pub fn fp_rank(&self, p: u64) -> usize {
        self.form.orders().iter().filter(|&&d| d % p == 0).count()
    }

    /// Number of non-unknot summands.
    pub fn prime_count(&self) -> usize {
        self.expr.summands().iter().filter(|s| !s.is_unknot()).count()
    }

    pub fn is_prime(&self) -> bool {
        self.prime_count() == 1
    }
}

/// Computes invariants of expressions against a table, optionally through a cache.
#[derive(Clone, Copy)]
pub struct Invariants<'a> {
    table: &'a KnotTable,
    cache: Option<&'a InvariantCache>,
}

impl<'a> Invariants<'a> {
    pub fn new(table: &'a KnotTable) -> Self {
        Invariants { table, cache: None }
    }

    pub fn with_cache(table: &'a KnotTable, cache: &'a InvariantCache) -> Self {
        Invariants {
            table,
            cache: Some(cache),
        }
    }

    pub fn table(&self) -> &'a KnotTable {
        self.table
    }

    /// det, σ and the form of the table knot `name` in its table orientation.
    pub fn base(&self, name: &str) -> Result<CachedInvariants, ObstructError> {
        let digest = self.table.digest();
        if let Some(hit) = self.cache.and_then(|c| c.get(digest, name)) {
            return Ok(hit);
        }
        let rec = self
            .table
            .get(name)
            .ok_or_else(|| KnotError::UnknownKnot(name.to_string()))?;
        let form = LinkingForm::from_symmetric(&rec.seifert.symmetrized())?;
        let value = CachedInvariants::new(
            knot_det(&rec.seifert),
            knot_signature(&rec.seifert),
            &form,
        );
        if let Some(c) = self.cache {
            c.put(digest, name, value.clone());
        }
        Ok(value)
    }

    fn summand(&self, s: &Summand) -> Result<KnotInvariants, ObstructError> {
        if s.is_unknot() {
            return Ok(KnotInvariants::unknot());
        }
        let base = self.base(&s.name)?;
        let rec = self.table.get(&s.name).expect("base() checked the name");
        let mut form = base.form()?;
        let (mut sigma, mut sv, mut tau) = (base.sigma, rec.s, rec.tau);
        if s.mirrored {
            form = form.negate();
            sigma = -sigma;
            sv = sv.map(|x| -x);
            tau = tau.map(|x| -x);
        }
        Ok(KnotInvariants {
            expr: KnotExpr::from_summands(vec![s.clone()])?,
            det: base.det,
            sigma,
            form,
            s: sv,
            tau,
            u_max: rec.u.map(|u| u.max),
            crossings: rec.crossing_number,
            two_bridge: rec.is_two_bridge(),
        })
    }

    pub fn of(&self, expr: &KnotExpr) -> Result<KnotInvariants, ObstructError> {
        let mut acc = KnotInvariants::unknot();
        for s in expr.summands() {
            let x = self.summand(s)?;
            let add = |a: Option<i64>, b: Option<i64>| Some(a? + b?);
            acc = KnotInvariants {
                expr: acc.expr,
                det: acc.det * x.det,
                sigma: acc.sigma + x.sigma,
                form: acc.form.direct_sum(&x.form),
                s: add(acc.s, x.s),
                tau: add(acc.tau, x.tau),
                u_max: acc.u_max.zip(x.u_max).map(|(a, b)| a + b),
                crossings: acc.crossings.zip(x.crossings).map(|(a, b)| a + b),
                two_bridge: acc.two_bridge,
            };
        }
        acc.expr = expr.clone();
        acc.two_bridge = match acc.prime_count() {
            0 => Some(false),
            1 => {
                let s = expr.summands().iter().find(|s| !s.is_unknot()).unwrap();
                self.table.get(&s.name).and_then(|r| r.is_two_bridge())
            }
            _ => Some(false),
        };
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knots::parse_expr;

    #[test]
    fn trefoil_and_mirror() {
        let t = KnotTable::bundled();
        let inv = Invariants::new(&t);
        let k = inv.of(&parse_expr("3_1").unwrap()).unwrap();
        assert_eq!(k.det, BigInt::from(3));
        assert_eq!(k.sigma, -2);
        assert_eq!((k.s, k.tau, k.u_max), (Some(2), Some(1), Some(1)));
        assert_eq!(k.form.orders(), &[3]);
        let m = inv.of(&parse_expr("m3_1").unwrap()).unwrap();
        assert_eq!((m.sigma, m.s, m.tau), (2, Some(-2), Some(-1)));
        assert_eq!(m.form, k.form.negate());
        assert_eq!(k.two_bridge, Some(true));
    }

    #[test]
    fn composite_is_additive() {
        let t = KnotTable::bundled();
        let inv = Invariants::new(&t);
        let k = inv.of(&parse_expr("4_1 # 4_1").unwrap()).unwrap();
        assert_eq!(k.det, BigInt::from(25));
        assert_eq!(k.form.orders(), &[5, 5]);
        assert_eq!(k.fp_rank(5), 2);
        assert_eq!(k.u_max, Some(2));
        assert_eq!(k.two_bridge, Some(false));
        let u = inv.of(&parse_expr("unknot").unwrap()).unwrap();
        assert!(u.form.is_trivial());
    }

    #[test]
    fn cache_is_used() {
        let t = KnotTable::bundled();
        let cache = InvariantCache::in_memory();
        let inv = Invariants::with_cache(&t, &cache);
        inv.of(&parse_expr("3_1 # m4_1 # 3_1").unwrap()).unwrap();
        assert_eq!(cache.len(), 2);
        assert!(cache.get(t.digest(), "4_1").is_some());
    }

    #[test]
    fn unknown_name() {
        let t = KnotTable::bundled();
        let r = Invariants::new(&t).of(&parse_expr("11_1").unwrap());
        assert!(matches!(r, Err(ObstructError::Knot(KnotError::UnknownKnot(_)))));
    }
}
