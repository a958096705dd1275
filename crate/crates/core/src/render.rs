//! Decimal rendering of exact and certified values with round-half-even.
//!
//! With `d` decimals, values strictly between 0 and 1 that would round to 0
//! are written in scientific notation, those that would round to 1 as `1-x`
//! with the complement `x` in scientific notation, and everything else with
//! `d` fixed decimals.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::qseries::{ApproxReal, ExactRatio};

/// Significant digits used for values written in scientific notation.
pub const SCIENTIFIC_DIGITS: u32 = 3;
/// Significant digits of the complement in `1-x·e-k` renderings.
pub const COMPLEMENT_DIGITS: u32 = 2;

fn pow10(k: u32) -> BigInt {
    BigInt::from(10u32).pow(k)
}

/// `round(r)` with ties to even.
fn round_half_even(r: &ExactRatio) -> BigInt {
    let floor = r.floor();
    let frac = r - &floor;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let base = floor.to_integer();
    match frac.cmp(&half) {
        std::cmp::Ordering::Less => base,
        std::cmp::Ordering::Greater => base + 1,
        std::cmp::Ordering::Equal => {
            if base.is_even() {
                base
            } else {
                base + 1
            }
        }
    }
}

/// `r` with exactly `decimals` digits after the point.
pub fn fixed(r: &ExactRatio, decimals: u32) -> String {
    let scaled = round_half_even(&(r * BigRational::from_integer(pow10(decimals))));
    let negative = scaled.is_negative();
    let digits = scaled.abs().to_string();
    let d = decimals as usize;
    let body = if d == 0 {
        digits
    } else {
        let padded = format!("{digits:0>width$}", width = d + 1);
        let (int, frac) = padded.split_at(padded.len() - d);
        format!("{int}.{frac}")
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

/// `(mantissa, exponent)` with `mantissa` having `sig` digits and
/// `r ≈ mantissa · 10^{exponent - sig + 1}`; `r` must be positive.
fn significant(r: &ExactRatio, sig: u32) -> (BigUint, i64) {
    debug_assert!(r.is_positive());
    let ten = BigRational::from_integer(BigInt::from(10));
    // exponent e with 10^e <= r < 10^{e+1}
    let mut e = (r.numer().bits() as i64 - r.denom().bits() as i64) * 30103 / 100000;
    let scale = |e: i64| -> ExactRatio {
        if e >= 0 {
            BigRational::from_integer(pow10(e as u32))
        } else {
            BigRational::new(BigInt::one(), pow10((-e) as u32))
        }
    };
    while &scale(e) > r {
        e -= 1;
    }
    while &(scale(e) * &ten) <= r {
        e += 1;
    }
    let shift = e - sig as i64 + 1;
    let mut m = round_half_even(&(r / scale(shift)));
    if m >= pow10(sig) {
        m /= 10;
        e += 1;
    }
    (m.to_biguint().expect("positive"), e)
}

/// `r` as `d.dd e-k` with `sig` significant digits, e.g. `1.07e-31`.
pub fn scientific(r: &ExactRatio, sig: u32) -> String {
    if r.is_zero() {
        return "0".to_string();
    }
    let sign = if r.is_negative() { "-" } else { "" };
    let (m, e) = significant(&r.abs(), sig);
    let digits = m.to_string();
    let mantissa = if digits.len() > 1 {
        format!("{}.{}", &digits[..1], &digits[1..])
    } else {
        digits
    };
    format!("{sign}{mantissa}e{e}")
}

/// `1-x` with `x` (the complement) in scientific notation, e.g. `1-1.4e-10`.
pub fn hybrid(complement: &ExactRatio, sig: u32) -> String {
    format!("1-{}", scientific(complement, sig))
}

/// Half a unit in the last fixed decimal.
fn threshold(decimals: u32) -> ExactRatio {
    BigRational::new(BigInt::one(), pow10(decimals) * 2)
}

/// Renders a probability-like exact value with `decimals` fixed decimals,
/// switching to scientific or complement notation at the extremes.
pub fn probability(r: &ExactRatio, decimals: u32) -> String {
    let t = threshold(decimals);
    let one = ExactRatio::one();
    if r.is_positive() && r < &t {
        scientific(r, SCIENTIFIC_DIGITS)
    } else if r.is_positive() && r < &one && (&one - r) < t {
        hybrid(&(&one - r), COMPLEMENT_DIGITS)
    } else {
        fixed(r, decimals)
    }
}

/// As [`probability`], for a certified value whose complement `1 - value`
/// is known separately (and more accurately near 1).
pub fn approx_probability(value: &ApproxReal, complement: &ApproxReal, decimals: u32) -> String {
    let t = 0.5 * 10f64.powi(-(decimals as i32));
    let exact = |x: f64| BigRational::from_float(x).unwrap_or_else(ExactRatio::zero);
    if value.value > 0.0 && value.value < t {
        scientific(&exact(value.value), SCIENTIFIC_DIGITS)
    } else if complement.value > 0.0 && complement.value < t {
        hybrid(&exact(complement.value), COMPLEMENT_DIGITS)
    } else {
        fixed(&exact(value.value), decimals)
    }
}

/// Decimal with `decimals` digits of an `f64`, rounding its exact binary
/// value half-even.
pub fn fixed_f64(x: f64, decimals: u32) -> String {
    match BigRational::from_float(x) {
        Some(r) => fixed(&r, decimals),
        None => x.to_string(),
    }
}

/// Parses `0.123`, `1.07e-31`, `1.07·10^{-31}`, `1-1.4e-10` and similar
/// into an `f64`; used to compare renderings with printed tables.
pub fn parse_rendered(text: &str) -> Option<f64> {
    let cleaned = normalise(text);
    if let Some(rest) = cleaned.strip_prefix("1-") {
        return rest.parse::<f64>().ok().map(|c| 1.0 - c);
    }
    cleaned.parse().ok()
}

/// Complement `x` of a `1-x` rendering.
pub fn parse_complement(text: &str) -> Option<f64> {
    normalise(text)
        .strip_prefix("1-")
        .and_then(|rest| rest.parse().ok())
}

fn normalise(text: &str) -> String {
    text.replace(' ', "")
        .replace("·10^{", "e")
        .replace("\\cdot10^{", "e")
        .replace("*10^", "e")
        .replace('}', "")
        .replace('−', "-")
}
