use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// An element of Q/Z in lowest terms: `0 ≤ num < den`, `gcd(num, den) = 1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct QmodZ {
    num: u64,
    den: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid Q/Z value {0:?}: expected \"num/den\" with den > 0")]
pub struct QmodZParseError(pub String);

impl QmodZ {
    pub const ZERO: QmodZ = QmodZ { num: 0, den: 1 };

    /// `num / den` reduced mod 1. Panics if `den == 0`.
    pub fn new(num: i128, den: u64) -> Self {
        assert!(den > 0, "zero denominator");
        let d = den as i128;
        let r = num.rem_euclid(d) as u64;
        let g = r.gcd(&den);
        QmodZ {
            num: r / g,
            den: den / g,
        }
    }

    /// `num / den` mod 1 for big integers; `None` if the reduced denominator
    /// does not fit in 64 bits or `den` is zero.
    pub fn from_bigints(num: &BigInt, den: &BigInt) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        let (num, den) = if den.is_negative() {
            (-num, -den)
        } else {
            (num.clone(), den.clone())
        };
        let r = num.mod_floor(&den);
        let g = r.gcd(&den);
        let n = u64::try_from(r / &g).ok()?;
        let d = u64::try_from(den / g).ok()?;
        Some(QmodZ { num: n, den: d })
    }

    pub fn numerator(&self) -> u64 {
        self.num
    }

    pub fn denominator(&self) -> u64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    /// `k · self` mod 1.
    pub fn scale(&self, k: i128) -> Self {
        let n = (self.num as i128).checked_mul(k.rem_euclid(self.den as i128));
        match n {
            Some(n) => QmodZ::new(n, self.den),
            None => {
                let n = BigInt::from(self.num) * BigInt::from(k);
                QmodZ::from_bigints(&n, &BigInt::from(self.den)).expect("denominator shrinks")
            }
        }
    }

    /// The numerator this value would have over `den`, if `self.den` divides `den`.
    pub fn over(&self, den: u64) -> Option<u64> {
        if den % self.den != 0 {
            return None;
        }
        Some(((self.num as u128 * (den / self.den) as u128) % den as u128) as u64)
    }
}

impl Add for QmodZ {
    type Output = QmodZ;

    fn add(self, rhs: QmodZ) -> QmodZ {
        let l = (self.den as u128).lcm(&(rhs.den as u128));
        let l64 = u64::try_from(l).expect("Q/Z denominator overflow");
        let a = self.num as u128 * (l / self.den as u128);
        let b = rhs.num as u128 * (l / rhs.den as u128);
        QmodZ::new(((a + b) % l) as i128, l64)
    }
}

impl Neg for QmodZ {
    type Output = QmodZ;

    fn neg(self) -> QmodZ {
        QmodZ::new(-(self.num as i128), self.den)
    }
}

impl Sub for QmodZ {
    type Output = QmodZ;

    fn sub(self, rhs: QmodZ) -> QmodZ {
        self + (-rhs)
    }
}

impl fmt::Display for QmodZ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for QmodZ {
    type Err = QmodZParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || QmodZParseError(s.to_string());
        let (n, d) = s.trim().split_once('/').ok_or_else(err)?;
        let n: i128 = n.trim().parse().map_err(|_| err())?;
        let d: u64 = d.trim().parse().map_err(|_| err())?;
        if d == 0 {
            return Err(err());
        }
        Ok(QmodZ::new(n, d))
    }
}

impl Serialize for QmodZ {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for QmodZ {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
