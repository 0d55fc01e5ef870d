//! Bit-string conventions shared by every module.
//!
//! An input x over n binary variables is stored as a `usize` read big-endian:
//! the leftmost character of the printed string is variable 0 and the most
//! significant bit of the integer. Under this convention the basis order
//! 00, 01, 10, 11 is simply 0, 1, 2, 3.

use crate::error::{Error, Result};

/// Largest arity representable in a `usize` index on a 64-bit target.
pub const MAX_ARITY: usize = 63;

/// Value of variable `var` (0-based from the left) in input `x` of arity `n`.
#[inline]
pub fn variable(x: usize, var: usize, n: usize) -> u8 {
    debug_assert!(var < n);
    ((x >> (n - 1 - var)) & 1) as u8
}

/// Render an index as its n-character bit string, e.g. `format_bits(2, 2) == "10"`.
pub fn format_bits(x: usize, n: usize) -> String {
    (0..n)
        .map(|i| if variable(x, i, n) == 1 { '1' } else { '0' })
        .collect()
}

/// Parse a bit string into `(index, arity)`.
pub fn parse_bits(s: &str) -> Result<(usize, usize)> {
    if s.is_empty() || s.len() > MAX_ARITY {
        return Err(Error::InvalidBitString { input: s.to_string() });
    }
    let mut value = 0usize;
    for c in s.chars() {
        value = (value << 1)
            | match c {
                '0' => 0,
                '1' => 1,
                _ => return Err(Error::InvalidBitString { input: s.to_string() }),
            };
    }
    Ok((value, s.len()))
}

/// Parse a bit string and require it to have arity `n`.
pub fn parse_bits_with_arity(s: &str, n: usize) -> Result<usize> {
    let (value, len) = parse_bits(s)?;
    if len != n {
        return Err(Error::ArityMismatch { expected: n, actual: len });
    }
    Ok(value)
}

/// `2^n` as a usize, refusing arities that cannot index memory.
pub fn dimension(n: usize) -> Result<usize> {
    if n > MAX_ARITY {
        return Err(Error::InvalidParameter {
            reason: format!("arity {n} exceeds the addressable maximum {MAX_ARITY}"),
        });
    }
    Ok(1usize << n)
}

/// Check an index against the arity's range.
pub fn check_index(index: usize, n: usize) -> Result<()> {
    if index >> n != 0 {
        return Err(Error::IndexOutOfRange { index, arity: n });
    }
    Ok(())
}
