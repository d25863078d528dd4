//! Knot expressions and Seifert-matrix algebra.
//!
//! Expression grammar (whitespace is ignored):
//!
//! ```text
//! expr   := term ('#' term)*
//! term   := prefix* NAME
//! prefix := 'm' | 'r' | '-'
//! NAME   := [0-9A-Z][0-9A-Za-z_]* | 'unknot'
//! ```
//!
//! `m` toggles the mirror flag, `r` toggles orientation reversal and `-`
//! toggles both (`-J` is the reversed mirror). Prefixes apply left to right,
//! so `m m 4_1` is `4_1` again.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactmat::{self, det, smith, IntMatrix, MatrixError};
use crate::ingest::KnotTable;

pub const UNKNOT: &str = "unknot";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("empty knot expression")]
    Empty,
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KnotError {
    #[error("unknown knot {0:?}")]
    UnknownKnot(String),
    #[error("invalid Seifert matrix{}: {reason}", name.as_ref().map(|n| format!(" for {n}")).unwrap_or_default())]
    InvalidSeifert {
        name: Option<String>,
        reason: String,
    },
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Summand {
    pub name: String,
    pub mirrored: bool,
    pub reversed: bool,
}

impl Summand {
    pub fn new(name: impl Into<String>) -> Self {
        Summand {
            name: name.into(),
            mirrored: false,
            reversed: false,
        }
    }

    pub fn is_unknot(&self) -> bool {
        is_unknot_name(&self.name)
    }
}

pub fn is_unknot_name(name: &str) -> bool {
    name == UNKNOT || name == "0_1"
}

impl fmt::Display for Summand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match (self.mirrored, self.reversed) {
            (true, true) => "-",
            (true, false) => "m",
            (false, true) => "r",
            (false, false) => "",
        };
        write!(f, "{prefix}{}", self.name)
    }
}

/// A connected sum of (possibly mirrored and/or reversed) table knots.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct KnotExpr {
    summands: Vec<Summand>,
}

impl KnotExpr {
    pub fn from_summands(summands: Vec<Summand>) -> Result<Self, ExprError> {
        if summands.is_empty() {
            return Err(ExprError::Empty);
        }
        if summands.iter().any(|s| s.name.is_empty()) {
            return Err(ExprError::Syntax {
                offset: 0,
                message: "empty knot name".into(),
            });
        }
        Ok(KnotExpr { summands })
    }

    pub fn knot(name: impl Into<String>) -> Self {
        KnotExpr {
            summands: vec![Summand::new(name)],
        }
    }

    pub fn unknot() -> Self {
        Self::knot(UNKNOT)
    }

    pub fn summands(&self) -> &[Summand] {
        &self.summands
    }

    pub fn is_unknot(&self) -> bool {
        self.summands.iter().all(Summand::is_unknot)
    }

    pub fn mirror(&self) -> Self {
        self.map(|s| s.mirrored = !s.mirrored)
    }

    pub fn reverse(&self) -> Self {
        self.map(|s| s.reversed = !s.reversed)
    }

    /// `-J`: the mirror image with opposite orientation.
    pub fn negate(&self) -> Self {
        self.mirror().reverse()
    }

    pub fn connect(&self, other: &Self) -> Self {
        let mut summands = self.summands.clone();
        summands.extend(other.summands.iter().cloned());
        KnotExpr { summands }
    }

    fn map(&self, f: impl Fn(&mut Summand)) -> Self {
        let mut out = self.clone();
        out.summands.iter_mut().for_each(f);
        out
    }

    /// Normal form used for identifying knots: orientations dropped, unknot
    /// summands removed, mirror flags cleared on summands `amphicheiral`
    /// reports as such, and summands sorted.
    pub fn canonical(&self, amphicheiral: impl Fn(&str) -> bool) -> Self {
        let mut summands: Vec<Summand> = self
            .summands
            .iter()
            .filter(|s| !s.is_unknot())
            .map(|s| Summand {
                name: s.name.clone(),
                mirrored: s.mirrored && !amphicheiral(&s.name),
                reversed: false,
            })
            .collect();
        if summands.is_empty() {
            return Self::unknot();
        }
        summands.sort();
        KnotExpr { summands }
    }
}

impl fmt::Display for KnotExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.summands.iter().enumerate() {
            if i > 0 {
                write!(f, " # ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl FromStr for KnotExpr {
    type Err = ExprError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_expr(s)
    }
}

fn is_name_char(c: u8) -> bool {
    c.is_ascii_alphanumeric() || c == b'_'
}

pub fn parse_expr(text: &str) -> Result<KnotExpr, ExprError> {
    let bytes = text.as_bytes();
    let mut pos = 0;
    let skip_ws = |pos: &mut usize| {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
    };
    skip_ws(&mut pos);
    if pos == bytes.len() {
        return Err(ExprError::Empty);
    }

    let mut summands = Vec::new();
    loop {
        let mut mirrored = false;
        let mut reversed = false;
        loop {
            skip_ws(&mut pos);
            match bytes.get(pos) {
                Some(b'-') => {
                    mirrored = !mirrored;
                    reversed = !reversed;
                }
                Some(b'm') => mirrored = !mirrored,
                Some(b'r') => reversed = !reversed,
                _ => break,
            }
            pos += 1;
        }

        let start = pos;
        match bytes.get(pos) {
            Some(c) if c.is_ascii_digit() || c.is_ascii_uppercase() => {
                while pos < bytes.len() && is_name_char(bytes[pos]) {
                    pos += 1;
                }
            }
            Some(_) if text[pos..].starts_with(UNKNOT) => {
                pos += UNKNOT.len();
                if pos < bytes.len() && is_name_char(bytes[pos]) {
                    return Err(ExprError::Syntax {
                        offset: pos,
                        message: "unexpected character after 'unknot'".into(),
                    });
                }
            }
            Some(_) => {
                return Err(ExprError::Syntax {
                    offset: pos,
                    message: "expected a knot name".into(),
                })
            }
            None => {
                return Err(ExprError::Syntax {
                    offset: pos,
                    message: "expression ends before a knot name".into(),
                })
            }
        }
        summands.push(Summand {
            name: text[start..pos].to_string(),
            mirrored,
            reversed,
        });

        skip_ws(&mut pos);
        match bytes.get(pos) {
            None => break,
            Some(b'#') => pos += 1,
            Some(_) => {
                return Err(ExprError::Syntax {
                    offset: pos,
                    message: "expected '#' between summands".into(),
                })
            }
        }
    }
    Ok(KnotExpr { summands })
}

/// A Seifert matrix `A`: square of even size with `det(A - Aᵀ) = 1` and
/// `det(A + Aᵀ)` odd. The 0x0 matrix is the unknot.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SeifertMatrix(IntMatrix);

impl SeifertMatrix {
    pub fn new(a: IntMatrix) -> Result<Self, KnotError> {
        let invalid = |reason: String| KnotError::InvalidSeifert { name: None, reason };
        if !a.is_square() {
            return Err(invalid(format!("{}x{} is not square", a.rows(), a.cols())));
        }
        if a.rows() % 2 != 0 {
            return Err(invalid(format!("odd size {}", a.rows())));
        }
        let skew = det(&a.sub(&a.transpose())?)?;
        if !skew.is_one() {
            return Err(invalid(format!("det(A - Aᵀ) = {skew}, expected 1")));
        }
        let sym = det(&a.symmetrize()?)?;
        if (&sym % 2u32) == BigInt::from(0) {
            return Err(invalid(format!("det(A + Aᵀ) = {sym} is even")));
        }
        Ok(SeifertMatrix(a))
    }

    pub fn unknot() -> Self {
        SeifertMatrix(IntMatrix::zeros(0, 0))
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.0
    }

    pub fn size(&self) -> usize {
        self.0.rows()
    }

    /// `-Aᵀ`
    pub fn mirror(&self) -> Self {
        SeifertMatrix(self.0.transpose().neg())
    }

    /// `Aᵀ`
    pub fn reverse(&self) -> Self {
        SeifertMatrix(self.0.transpose())
    }

    pub fn connect(&self, other: &Self) -> Self {
        SeifertMatrix(self.0.block_diag(&other.0))
    }

    /// `A + Aᵀ`
    pub fn symmetrized(&self) -> IntMatrix {
        self.0.symmetrize().expect("square")
    }
}

/// Seifert matrix of an expression: block sum over summands, mirrored
/// summands contribute `-Aᵀ`, reversed ones `Aᵀ`.
pub fn seifert_matrix(expr: &KnotExpr, table: &KnotTable) -> Result<SeifertMatrix, KnotError> {
    let mut acc = SeifertMatrix::unknot();
    for s in expr.summands() {
        let mut a = if s.is_unknot() {
            SeifertMatrix::unknot()
        } else {
            table
                .get(&s.name)
                .ok_or_else(|| KnotError::UnknownKnot(s.name.clone()))?
                .seifert
                .clone()
        };
        if s.mirrored {
            a = a.mirror();
        }
        if s.reversed {
            a = a.reverse();
        }
        acc = acc.connect(&a);
    }
    Ok(acc)
}

/// `|det(A + Aᵀ)|`
pub fn knot_det(a: &SeifertMatrix) -> BigInt {
    det(&a.symmetrized()).expect("square").abs()
}

pub fn knot_signature(a: &SeifertMatrix) -> i64 {
    exactmat::signature(&a.symmetrized()).expect("nonsingular symmetric")
}

/// Invariant factors of `A + Aᵀ` greater than one, i.e. the cyclic
/// decomposition of the first homology of the double branched cover.
pub fn invariant_factors(a: &SeifertMatrix) -> Vec<BigInt> {
    smith(&a.symmetrized())
        .diag
        .into_iter()
        .filter(|d| d > &BigInt::one())
        .collect()
}

/// Dimension over `F_p` of the first homology of the double branched cover.
pub fn fp_rank(a: &SeifertMatrix, p: u64) -> Result<usize, KnotError> {
    if p == 2 || !exactmat::is_prime(p) {
        return Err(KnotError::NotOddPrime(p));
    }
    Ok(fp_rank_from_factors(&invariant_factors(a), p))
}

pub(crate) fn fp_rank_from_factors(factors: &[BigInt], p: u64) -> usize {
    factors
        .iter()
        .filter(|d| (*d % p) == BigInt::from(0))
        .count()
}
