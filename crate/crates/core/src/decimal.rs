//! Decimal-string parsing and formatting for exact rationals.

use alloc::format;
use alloc::string::{String, ToString};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};

use crate::error::{Error, Result};

fn pow10(e: u32) -> BigInt {
    Pow::pow(BigInt::from(10u32), e)
}

/// Parses `"-12.5e-3"`, `"7"` or `"22/7"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let bad = || Error::Parse(s.to_string());
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = t.split_once('/') {
        let n = parse_rational(n)?;
        let d = parse_rational(d)?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(n / d);
    }
    let (mant, exp) = match t.find(['e', 'E']) {
        Some(i) => {
            let e: i32 = t[i + 1..].parse().map_err(|_| bad())?;
            (&t[..i], e)
        }
        None => (t, 0),
    };
    let (neg, body) = match mant.as_bytes().first() {
        Some(b'-') => (true, &mant[1..]),
        Some(b'+') => (false, &mant[1..]),
        _ => (false, mant),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part
        .bytes()
        .chain(frac_part.bytes())
        .all(|b| b.is_ascii_digit())
    {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num: BigInt = digits.parse().map_err(|_| bad())?;
    if neg {
        num = -num;
    }
    let shift = exp - frac_part.len() as i32;
    let q = if shift >= 0 {
        BigRational::from_integer(num * pow10(shift as u32))
    } else {
        BigRational::new(num, pow10(shift.unsigned_abs()))
    };
    Ok(q)
}

/// Number of decimal digits of `|x|` (1 for zero).
fn digit_count(x: &BigInt) -> u32 {
    let s = x.magnitude().to_str_radix(10);
    s.len() as u32
}

/// Renders `q` with at most `sig` significant digits (round half away from
/// zero), trailing zeros removed. Plain notation, never an exponent.
pub fn rational_to_decimal(q: &BigRational, sig: usize) -> String {
    if q.is_zero() {
        return "0".to_string();
    }
    let neg = q.is_negative();
    let a = q.abs();
    // estimate exponent: 10^(e-1) <= a < 10^e
    let ip = a.numer() / a.denom();
    let mut e: i64 = if ip.is_zero() {
        let inv = a.denom() / a.numer();
        -(digit_count(&inv) as i64) + 1
    } else {
        digit_count(&ip) as i64
    };
    // fix off-by-one estimates
    loop {
        let lo = scale10(&BigRational::one(), e - 1);
        if a < lo {
            e -= 1;
            continue;
        }
        let hi = scale10(&BigRational::one(), e);
        if a >= hi {
            e += 1;
            continue;
        }
        break;
    }
    let frac_digits = sig as i64 - e;
    let scaled = scale10(&a, frac_digits);
    let (qt, r) = scaled.numer().div_rem(scaled.denom());
    let mut n = qt;
    if (&r << 1usize) >= *scaled.denom() {
        n += 1;
    }
    let mut s = format_scaled(&n, frac_digits);
    if neg {
        s.insert(0, '-');
    }
    s
}

fn scale10(q: &BigRational, e: i64) -> BigRational {
    if e >= 0 {
        q * BigRational::from_integer(pow10(e as u32))
    } else {
        q / BigRational::from_integer(pow10((-e) as u32))
    }
}

/// `n · 10^-frac` as a trimmed decimal string.
fn format_scaled(n: &BigInt, frac: i64) -> String {
    let digits = n.to_str_radix(10);
    if frac <= 0 {
        let mut s = digits;
        for _ in 0..(-frac) {
            s.push('0');
        }
        return s;
    }
    let frac = frac as usize;
    let padded = if digits.len() <= frac {
        let mut p = "0".repeat(frac + 1 - digits.len());
        p.push_str(&digits);
        p
    } else {
        digits
    };
    let (ip, fp) = padded.split_at(padded.len() - frac);
    let fp = fp.trim_end_matches('0');
    if fp.is_empty() {
        ip.to_string()
    } else {
        format!("{ip}.{fp}")
    }
}
