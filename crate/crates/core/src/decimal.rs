//! Exact `(a - b) / (c - b)` on the shortest decimal forms of `f64` inputs.
//!
//! Metric values and reference scores are written as decimals (`0.2`,
//! `0.8`); the binary approximations of those decimals do not generally
//! produce the decimal answer (`(0.5 - 0.2) / (0.8 - 0.2)` is
//! `0.4999999999999999` in plain `f64`). Here the quotient is computed on
//! exact decimals and rounded to `f64` once.

use alloc::string::String;
use core::fmt::Write;

/// Significant digits produced before appending a sticky digit. Decimal
/// midpoints between adjacent doubles need at most 767 digits.
const MAX_DIGITS: usize = 780;

/// `mant * 10^exp`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Dec {
    mant: i128,
    exp: i32,
}

fn to_dec(x: f64) -> Option<Dec> {
    if !x.is_finite() {
        return None;
    }
    let mut s = String::new();
    write!(s, "{x:e}").ok()?;
    let (mantissa, exp) = s.split_once('e')?;
    let exp: i32 = exp.parse().ok()?;
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let mut digits = String::with_capacity(int_part.len() + frac_part.len());
    digits.push_str(int_part);
    digits.push_str(frac_part);
    Some(Dec {
        mant: digits.parse().ok()?,
        exp: exp - frac_part.len() as i32,
    })
}

fn pow10(n: u32) -> Option<i128> {
    10i128.checked_pow(n)
}

fn sub(a: Dec, b: Dec) -> Option<Dec> {
    let exp = a.exp.min(b.exp);
    let am = a.mant.checked_mul(pow10((a.exp - exp) as u32)?)?;
    let bm = b.mant.checked_mul(pow10((b.exp - exp) as u32)?)?;
    Some(Dec {
        mant: am.checked_sub(bm)?,
        exp,
    })
}

/// Correctly rounded `num / den`; `None` on overflow.
fn quotient(num: Dec, den: Dec) -> Option<f64> {
    if den.mant == 0 {
        return None;
    }
    if num.mant == 0 {
        return Some(0.0);
    }
    let negative = (num.mant < 0) != (den.mant < 0);
    let n = num.mant.unsigned_abs();
    let d = den.mant.unsigned_abs();
    // keeps remainder * 10 within u128
    if d > u128::MAX / 10 {
        return None;
    }
    let mut s = String::new();
    if negative {
        s.push('-');
    }
    let int = n / d;
    let mut rem = n % d;
    write!(s, "{int}").ok()?;
    s.push('.');
    let mut significant = if int == 0 {
        0
    } else {
        s.len() - 1 - usize::from(negative)
    };
    while rem != 0 && significant < MAX_DIGITS {
        rem *= 10;
        let digit = (rem / d) as u8;
        rem %= d;
        s.push(char::from(b'0' + digit));
        if significant > 0 || digit != 0 {
            significant += 1;
        }
    }
    if rem != 0 {
        s.push('1');
    }
    write!(s, "e{}", num.exp - den.exp).ok()?;
    s.parse().ok()
}

/// `(a - b) / (c - b)` evaluated on decimals, or `None` when the operands
/// cannot be aligned in 128-bit mantissas.
pub(crate) fn ratio_of_differences(a: f64, b: f64, c: f64) -> Option<f64> {
    let (a, b, c) = (to_dec(a)?, to_dec(b)?, to_dec(c)?);
    quotient(sub(a, b)?, sub(c, b)?)
}
