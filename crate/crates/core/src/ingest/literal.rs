use num_bigint::BigInt;
use thiserror::Error;

use crate::exactmat::IntMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LiteralError {
    #[error("at byte {offset}: expected {expected}")]
    Expected { offset: usize, expected: &'static str },
    #[error("at byte {offset}: invalid integer {token:?}")]
    BadInteger { offset: usize, token: String },
    #[error("at byte {offset}: empty row")]
    EmptyRow { offset: usize },
    #[error("at byte {offset}: row {row} has {found} entries, expected {expected}")]
    Ragged {
        offset: usize,
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("at byte {offset}: trailing input")]
    Trailing { offset: usize },
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8, expected: &'static str) -> Result<(), LiteralError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(LiteralError::Expected {
                offset: self.pos,
                expected,
            })
        }
    }

    fn integer(&mut self) -> Result<BigInt, LiteralError> {
        self.skip_ws();
        let start = self.pos;
        if matches!(self.bytes.get(self.pos), Some(b'-' | b'+')) {
            self.pos += 1;
        }
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let token = String::from_utf8_lossy(&self.bytes[start..self.pos]).into_owned();
        if token.is_empty() {
            return Err(LiteralError::Expected {
                offset: start,
                expected: "an integer",
            });
        }
        token
            .trim_start_matches('+')
            .parse()
            .map_err(|_| LiteralError::BadInteger {
                offset: start,
                token,
            })
    }
}

/// Parses a nested bracket list such as `[[-1,1],[0,-1]]`. `[]` is the 0x0 matrix.
pub fn parse_matrix_literal(text: &str) -> Result<IntMatrix, LiteralError> {
    let mut c = Cursor {
        bytes: text.as_bytes(),
        pos: 0,
    };
    c.eat(b'[', "'['")?;
    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    if c.peek() == Some(b']') {
        c.pos += 1;
    } else {
        loop {
            let row_start = c.pos;
            c.eat(b'[', "'[' opening a row")?;
            let mut row = Vec::new();
            if c.peek() == Some(b']') {
                return Err(LiteralError::EmptyRow { offset: row_start });
            }
            loop {
                row.push(c.integer()?);
                match c.peek() {
                    Some(b',') => c.pos += 1,
                    Some(b']') => {
                        c.pos += 1;
                        break;
                    }
                    _ => {
                        return Err(LiteralError::Expected {
                            offset: c.pos,
                            expected: "',' or ']'",
                        })
                    }
                }
            }
            if let Some(first) = rows.first() {
                if first.len() != row.len() {
                    return Err(LiteralError::Ragged {
                        offset: row_start,
                        row: rows.len(),
                        expected: first.len(),
                        found: row.len(),
                    });
                }
            }
            rows.push(row);
            match c.peek() {
                Some(b',') => c.pos += 1,
                Some(b']') => {
                    c.pos += 1;
                    break;
                }
                _ => {
                    return Err(LiteralError::Expected {
                        offset: c.pos,
                        expected: "',' or ']'",
                    })
                }
            }
        }
    }
    if c.peek().is_some() {
        return Err(LiteralError::Trailing { offset: c.pos });
    }
    Ok(IntMatrix::from_rows(rows).expect("rows checked equal length"))
}
