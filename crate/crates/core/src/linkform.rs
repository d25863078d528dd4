//! Linking forms: finite abelian groups in invariant-factor form carrying a
//! symmetric Q/Z-valued pairing.
//!
//! A form is stored by the orders `d_1 | d_2 | … | d_k` of its canonical
//! generators and the pairing matrix of those generators written over the
//! common denominator `d_k` (the exponent of the group). Elements are
//! coefficient vectors with `coeffs[i]` taken mod `d_i`, and enumeration uses
//! the mixed-radix index with the first coordinate varying fastest.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactmat::{self, adjugate, det, rank_mod_p_u64, smith, IntMatrix, MatrixError, QmodZ};

/// Default bound on group orders for any exhaustive enumeration.
pub const DEFAULT_GROUP_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinkError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("determinant {0} is even; linking forms of knots have odd order")]
    EvenDeterminant(BigInt),
    #[error("group order {0} does not fit in 64 bits")]
    OrderOverflow(BigInt),
    #[error("group order {order} exceeds the enumeration cap {cap}")]
    CapExceeded { order: u64, cap: u64 },
    #[error("element has {found} coordinates, the group has {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("invalid linking form: {0}")]
    Invalid(String),
}

/// A group element as a coefficient vector over the canonical generators.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElement {
    pub coeffs: Vec<u64>,
}

impl GroupElement {
    pub fn new(coeffs: Vec<u64>) -> Self {
        GroupElement { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinkingForm {
    orders: Vec<u64>,
    exponent: u64,
    /// `lk(g_i, g_j) = pairing[i*k + j] / exponent`
    pairing: Vec<u64>,
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

impl LinkingForm {
    pub fn trivial() -> Self {
        LinkingForm {
            orders: Vec::new(),
            exponent: 1,
            pairing: Vec::new(),
        }
    }

    /// Builds a form from invariant-factor orders and the Gram matrix of the
    /// canonical generators (row-major, `k*k` entries).
    pub fn from_gram(orders: Vec<u64>, gram: &[QmodZ]) -> Result<Self, LinkError> {
        let k = orders.len();
        if gram.len() != k * k {
            return Err(LinkError::Invalid(format!(
                "gram has {} entries, expected {}",
                gram.len(),
                k * k
            )));
        }
        if orders.iter().any(|&d| d < 2) {
            return Err(LinkError::Invalid("orders must exceed 1".into()));
        }
        if orders.windows(2).any(|w| w[1] % w[0] != 0) {
            return Err(LinkError::Invalid(format!(
                "orders {orders:?} do not form a divisibility chain"
            )));
        }
        let exponent = orders.last().copied().unwrap_or(1);
        let mut pairing = Vec::with_capacity(k * k);
        for i in 0..k {
            for j in 0..k {
                let v = gram[i * k + j];
                if v != gram[j * k + i] {
                    return Err(LinkError::Invalid("gram is not symmetric".into()));
                }
                let g = num_integer::gcd(orders[i], orders[j]);
                if g % v.denominator() != 0 {
                    return Err(LinkError::Invalid(format!(
                        "lk(g{i}, g{j}) = {v} is not annihilated by gcd {g}"
                    )));
                }
                pairing.push(v.over(exponent).expect("denominator divides exponent"));
            }
        }
        Ok(LinkingForm {
            orders,
            exponent,
            pairing,
        })
    }

    /// Renormalizes an arbitrary presentation `⊕ Z/orders[a]` (orders ≥ 1, no
    /// divisibility required) with the given generator Gram matrix into
    /// invariant-factor form.
    pub fn from_presentation(orders: &[u64], gram: &[QmodZ]) -> Result<Self, LinkError> {
        let n = orders.len();
        if gram.len() != n * n {
            return Err(LinkError::Invalid("gram/order size mismatch".into()));
        }
        let dec = smith(&IntMatrix::diagonal(orders));
        let mut new_orders = Vec::new();
        let mut gens: Vec<Vec<u64>> = Vec::new();
        for (i, d) in dec.diag.iter().enumerate() {
            if d <= &BigInt::one() {
                continue;
            }
            new_orders.push(d.to_u64().expect("factor of a u64 product"));
            gens.push(
                (0..n)
                    .map(|a| {
                        let m = BigInt::from(orders[a]);
                        let c = ((&dec.u_inv[(a, i)] % &m) + &m) % &m;
                        c.to_u64().unwrap()
                    })
                    .collect(),
            );
        }
        let k = new_orders.len();
        let mut new_gram = Vec::with_capacity(k * k);
        for gi in &gens {
            for gj in &gens {
                let mut acc = QmodZ::ZERO;
                for a in 0..n {
                    if gi[a] == 0 {
                        continue;
                    }
                    for b in 0..n {
                        if gj[b] == 0 {
                            continue;
                        }
                        acc = acc + gram[a * n + b].scale(gi[a] as i128 * gj[b] as i128);
                    }
                }
                new_gram.push(acc);
            }
        }
        Self::from_gram(new_orders, &new_gram)
    }

    /// The form λ(Q): coker(Q) with `(v, w) ↦ vᵀ Q⁻¹ w mod 1`, for symmetric
    /// `Q` of odd determinant.
    pub fn from_symmetric(q: &IntMatrix) -> Result<Self, LinkError> {
        Cokernel::of_symmetric(q).map(|c| c.form)
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    /// Number of canonical generators (minimal number of generators).
    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn order(&self) -> u64 {
        self.orders.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.orders.is_empty()
    }

    pub fn is_cyclic(&self) -> bool {
        self.orders.len() <= 1
    }

    pub fn gram(&self, i: usize, j: usize) -> QmodZ {
        let k = self.rank();
        QmodZ::new(self.pairing[i * k + j] as i128, self.exponent)
    }

    pub fn gram_matrix(&self) -> Vec<Vec<QmodZ>> {
        let k = self.rank();
        (0..k).map(|i| (0..k).map(|j| self.gram(i, j)).collect()).collect()
    }

    pub fn negate(&self) -> Self {
        let e = self.exponent;
        LinkingForm {
            orders: self.orders.clone(),
            exponent: e,
            pairing: self.pairing.iter().map(|&m| (e - m) % e).collect(),
        }
    }

    /// `2·lk`; the group is unchanged.
    pub fn double(&self) -> Self {
        let e = self.exponent;
        LinkingForm {
            orders: self.orders.clone(),
            exponent: e,
            pairing: self.pairing.iter().map(|&m| mulmod(m, 2, e)).collect(),
        }
    }

    /// Orthogonal direct sum, renormalized to invariant factors.
    pub fn direct_sum(&self, other: &Self) -> Self {
        if self.is_trivial() {
            return other.clone();
        }
        if other.is_trivial() {
            return self.clone();
        }
        let (k1, k2) = (self.rank(), other.rank());
        let n = k1 + k2;
        let mut gram = vec![QmodZ::ZERO; n * n];
        for i in 0..k1 {
            for j in 0..k1 {
                gram[i * n + j] = self.gram(i, j);
            }
        }
        for i in 0..k2 {
            for j in 0..k2 {
                gram[(k1 + i) * n + k1 + j] = other.gram(i, j);
            }
        }
        let orders: Vec<u64> = self.orders.iter().chain(&other.orders).copied().collect();
        Self::from_presentation(&orders, &gram).expect("direct sum of valid forms is valid")
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement::new(vec![0; self.rank()])
    }

    /// The `i`-th canonical generator.
    pub fn generator(&self, i: usize) -> GroupElement {
        let mut c = vec![0; self.rank()];
        c[i] = 1;
        GroupElement::new(c)
    }

    fn check_len(&self, x: &GroupElement) -> Result<(), LinkError> {
        if x.coeffs.len() != self.rank() {
            return Err(LinkError::LengthMismatch {
                expected: self.rank(),
                found: x.coeffs.len(),
            });
        }
        Ok(())
    }

    /// Numerator of `lk(x, y)` over the exponent, for coefficient slices of the right length.
    pub(crate) fn pair_scaled(&self, x: &[u64], y: &[u64]) -> u64 {
        let k = self.rank();
        let e = self.exponent;
        let mut acc = 0u64;
        for i in 0..k {
            if x[i] == 0 {
                continue;
            }
            let mut row = 0u64;
            for j in 0..k {
                if y[j] == 0 {
                    continue;
                }
                row = (row + mulmod(self.pairing[i * k + j], y[j], e)) % e;
            }
            acc = (acc + mulmod(row, x[i], e)) % e;
        }
        acc
    }

    pub fn evaluate(&self, x: &GroupElement, y: &GroupElement) -> Result<QmodZ, LinkError> {
        self.check_len(x)?;
        self.check_len(y)?;
        Ok(QmodZ::new(
            self.pair_scaled(&x.coeffs, &y.coeffs) as i128,
            self.exponent,
        ))
    }

    pub fn add(&self, x: &GroupElement, y: &GroupElement) -> GroupElement {
        GroupElement::new(
            self.orders
                .iter()
                .zip(x.coeffs.iter().zip(&y.coeffs))
                .map(|(&d, (&a, &b))| (a + b) % d)
                .collect(),
        )
    }

    pub fn scale(&self, x: &GroupElement, k: i64) -> GroupElement {
        GroupElement::new(
            self.orders
                .iter()
                .zip(&x.coeffs)
                .map(|(&d, &a)| mulmod(a, k.rem_euclid(d as i64) as u64, d))
                .collect(),
        )
    }

    /// Element with the given mixed-radix index (first coordinate fastest).
    pub fn element_at(&self, mut index: u64) -> GroupElement {
        let coeffs = self
            .orders
            .iter()
            .map(|&d| {
                let c = index % d;
                index /= d;
                c
            })
            .collect();
        GroupElement::new(coeffs)
    }

    pub fn index_of(&self, x: &GroupElement) -> u64 {
        let mut idx = 0u64;
        for (&d, &c) in self.orders.iter().zip(&x.coeffs).rev() {
            idx = idx * d + c % d;
        }
        idx
    }

    fn check_cap(&self, cap: u64) -> Result<(), LinkError> {
        let order = self.order();
        if order > cap {
            return Err(LinkError::CapExceeded { order, cap });
        }
        Ok(())
    }

    /// Iterates over every group element; fails if the order exceeds `cap`.
    pub fn elements(&self, cap: u64) -> Result<impl Iterator<Item = GroupElement> + '_, LinkError> {
        self.check_cap(cap)?;
        Ok((0..self.order()).map(move |i| self.element_at(i)))
    }

    /// Whether `elems` generate the whole group.
    ///
    /// A set generates a finite abelian group iff its image spans `H/pH` for
    /// every prime `p` dividing the order, so this is a rank check over each
    /// `F_p` on the coordinates whose order is divisible by `p`.
    pub fn generates(&self, elems: &[GroupElement]) -> bool {
        for p in exactmat::odd_prime_divisors(&BigInt::from(self.exponent))
            .into_iter()
            .chain((self.exponent % 2 == 0).then_some(2))
        {
            let idx: Vec<usize> = (0..self.rank())
                .filter(|&i| self.orders[i] % p == 0)
                .collect();
            if idx.len() > elems.len() {
                return false;
            }
            let rows: Vec<Vec<u64>> = elems
                .iter()
                .map(|e| idx.iter().map(|&i| e.coeffs[i] % p).collect())
                .collect();
            if rank_mod_p_u64(rows, idx.len(), p) < idx.len() {
                return false;
            }
        }
        true
    }

    /// Self-links `lk(g, g)` over all single generators `g` of the group.
    /// Empty for a non-cyclic group; `{0}` for the trivial group, whose only
    /// element generates it.
    pub fn generator_self_links(&self, cap: u64) -> Result<BTreeSet<QmodZ>, LinkError> {
        self.check_cap(cap)?;
        let mut out = BTreeSet::new();
        match self.orders.as_slice() {
            [] => {
                out.insert(QmodZ::ZERO);
            }
            [n] => {
                let q = self.pairing[0];
                for k in 1..*n {
                    if num_integer::gcd(k, *n) == 1 {
                        out.insert(QmodZ::new(mulmod(q, mulmod(k, k, *n), *n) as i128, *n));
                    }
                }
            }
            _ => {}
        }
        Ok(out)
    }

    /// Buckets every element index by its self-link numerator over the exponent.
    pub fn self_link_classes(&self, cap: u64) -> Result<BTreeMap<u64, Vec<u64>>, LinkError> {
        self.check_cap(cap)?;
        let mut classes: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
        let mut coeffs = vec![0u64; self.rank()];
        for idx in 0..self.order() {
            let v = self.pair_scaled(&coeffs, &coeffs);
            classes.entry(v).or_default().push(idx);
            // advance the mixed-radix counter
            for (c, &d) in coeffs.iter_mut().zip(&self.orders) {
                *c += 1;
                if *c < d {
                    break;
                }
                *c = 0;
            }
        }
        Ok(classes)
    }

    /// True when `v ↦ lk(v, ·)` is injective. Exhaustive; capped.
    pub fn is_nondegenerate(&self, cap: u64) -> Result<bool, LinkError> {
        self.check_cap(cap)?;
        let gens: Vec<GroupElement> = (0..self.rank()).map(|i| self.generator(i)).collect();
        for v in self.elements(cap)?.skip(1) {
            if gens
                .iter()
                .all(|g| self.pair_scaled(&v.coeffs, &g.coeffs) == 0)
            {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl fmt::Display for LinkingForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.orders.iter().map(|d| format!("Z/{d}")).collect();
        write!(f, "{} with gram [", parts.join(" + "))?;
        for (i, row) in self.gram_matrix().iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            let r: Vec<String> = row.iter().map(QmodZ::to_string).collect();
            write!(f, "{}", r.join(" "))?;
        }
        write!(f, "]")
    }
}

/// `λ(Q)` together with the projection `Z^n → coker(Q)` onto canonical coordinates.
#[derive(Debug, Clone)]
pub struct Cokernel {
    pub form: LinkingForm,
    /// Rows of `U` (from `U·Q·V = D`) for the kept invariant factors.
    projection: Vec<Vec<BigInt>>,
}

impl Cokernel {
    pub fn of_symmetric(q: &IntMatrix) -> Result<Self, LinkError> {
        if !q.is_square() {
            return Err(MatrixError::NotSquare {
                rows: q.rows(),
                cols: q.cols(),
            }
            .into());
        }
        if !q.is_symmetric() {
            return Err(MatrixError::NotSymmetric.into());
        }
        let d = det(q)?;
        if d.is_zero() {
            return Err(MatrixError::Singular.into());
        }
        if (&d % 2u32).is_zero() {
            return Err(LinkError::EvenDeterminant(d));
        }
        if d.abs().to_u64().is_none() {
            return Err(LinkError::OrderOverflow(d.abs()));
        }
        let dec = smith(q);
        let adj = adjugate(q)?;
        let n = q.rows();
        // generator i is the class of column i of U⁻¹
        let kept: Vec<usize> = (0..dec.diag.len())
            .filter(|&i| dec.diag[i] > BigInt::one())
            .collect();
        let gens: Vec<Vec<BigInt>> = kept.iter().map(|&i| dec.u_inv.column(i)).collect();
        let adj_g: Vec<Vec<BigInt>> = gens
            .iter()
            .map(|g| {
                (0..n)
                    .map(|r| (0..n).map(|c| &adj[(r, c)] * &g[c]).sum())
                    .collect()
            })
            .collect();
        let k = gens.len();
        let mut gram = Vec::with_capacity(k * k);
        for gi in &gens {
            for ag in &adj_g {
                let num: BigInt = gi.iter().zip(ag).map(|(a, b)| a * b).sum();
                gram.push(
                    QmodZ::from_bigints(&num, &d).ok_or_else(|| LinkError::OrderOverflow(d.clone()))?,
                );
            }
        }
        let orders = kept.iter().map(|&i| dec.diag[i].to_u64().unwrap()).collect();
        Ok(Cokernel {
            form: LinkingForm::from_gram(orders, &gram)?,
            projection: kept.iter().map(|&i| dec.u.row(i).to_vec()).collect(),
        })
    }

    /// Canonical coordinates of the class of `v ∈ Z^n`.
    pub fn class_of(&self, v: &[BigInt]) -> GroupElement {
        GroupElement::new(
            self.projection
                .iter()
                .zip(self.form.orders())
                .map(|(row, &d)| {
                    let x: BigInt = row.iter().zip(v).map(|(a, b)| a * b).sum();
                    let d = BigInt::from(d);
                    (((x % &d) + &d) % &d).to_u64().unwrap()
                })
                .collect(),
        )
    }
}
