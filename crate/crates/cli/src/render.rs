//! Decimal rendering of scalar endpoints for reports.
//!
//! Interval endpoints are printed at 17 significant digits with directed
//! rounding: lower endpoints toward minus infinity, upper endpoints toward
//! plus infinity. A report therefore remains a sound enclosure of whatever
//! it certifies, and for binary doubles 17 digits also round-trip the
//! exact value. The arithmetic goes through the scalar's exact rational
//! form, so the digit strings are correct for every lane, not just floats.

use horseshoe::{BoxN, Interval, Round, Scalar};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde_json::{json, Value};

const DIGITS: i64 = 17;

fn pow10(k: u64) -> BigInt {
    BigInt::from(10u32).pow(k as u32)
}

/// floor(n / d) for nonnegative n, positive d.
fn floor_div(n: &BigInt, d: &BigInt) -> BigInt {
    n / d
}

/// ceil(n / d) for nonnegative n, positive d.
fn ceil_div(n: &BigInt, d: &BigInt) -> BigInt {
    (n + d - BigInt::from(1)) / d
}

/// Compare |q| with 10^e.
fn cmp_pow10(num: &BigInt, den: &BigInt, e: i64) -> std::cmp::Ordering {
    if e >= 0 {
        num.cmp(&(den * pow10(e as u64)))
    } else {
        (num * pow10((-e) as u64)).cmp(den)
    }
}

/// Render `q` as a decimal string with `DIGITS` significant digits,
/// rounded toward minus infinity (`up = false`) or plus infinity
/// (`up = true`).
pub fn decimal_directed(q: &BigRational, up: bool) -> String {
    if q.is_zero() {
        return "0".to_string();
    }
    let negative = q.is_negative();
    let num = q.numer().abs();
    let den = q.denom().abs();

    // Decimal exponent: 10^e <= |q| < 10^(e+1).
    let mut e = num.to_string().len() as i64 - den.to_string().len() as i64;
    while cmp_pow10(&num, &den, e) == std::cmp::Ordering::Less {
        e -= 1;
    }
    while cmp_pow10(&num, &den, e + 1) != std::cmp::Ordering::Less {
        e += 1;
    }

    // Scaled mantissa m = |q| * 10^(DIGITS - 1 - e) in [10^16, 10^17).
    let shift = DIGITS - 1 - e;
    let (m_num, m_den) = if shift >= 0 {
        (&num * pow10(shift as u64), den.clone())
    } else {
        (num.clone(), &den * pow10((-shift) as u64))
    };
    // Outward on the value: magnitudes round up exactly when the value
    // rounds away from zero.
    let away = up != negative;
    let mut mant = if away { ceil_div(&m_num, &m_den) } else { floor_div(&m_num, &m_den) };
    if mant == pow10(DIGITS as u64) {
        mant = pow10((DIGITS - 1) as u64);
        e += 1;
    }

    let digits = mant.to_string();
    debug_assert_eq!(digits.len() as i64, DIGITS);
    let head = &digits[..1];
    let tail = digits[1..].trim_end_matches('0');
    let sign = if negative { "-" } else { "" };
    if tail.is_empty() {
        format!("{sign}{head}e{e}")
    } else {
        format!("{sign}{head}.{tail}e{e}")
    }
}

pub fn lo_string<S: Scalar>(v: &S) -> String {
    decimal_directed(&v.to_rational(), false)
}

pub fn hi_string<S: Scalar>(v: &S) -> String {
    decimal_directed(&v.to_rational(), true)
}

/// Shortest round-trip rendering of a point coordinate (diagnostic data,
/// not an enclosure endpoint).
pub fn point_string<S: Scalar>(v: &S) -> String {
    format!("{:?}", v.approx_f64(Round::Down))
}

pub fn interval_json<S: Scalar>(iv: &Interval<S>) -> Value {
    json!({ "lo": lo_string(iv.lo()), "hi": hi_string(iv.hi()) })
}

pub fn box_json<S: Scalar>(b: &BoxN<S>) -> Value {
    Value::Array(b.comps().iter().map(interval_json).collect())
}

pub fn point_json<S: Scalar>(p: &[S]) -> Value {
    Value::Array(p.iter().map(|c| Value::String(point_string(c))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use horseshoe::Rational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn directed_digits_bracket_the_value() {
        let third = q(1, 3);
        assert_eq!(decimal_directed(&third, false), "3.3333333333333333e-1");
        assert_eq!(decimal_directed(&third, true), "3.3333333333333334e-1");
        let neg = q(-1, 3);
        assert_eq!(decimal_directed(&neg, false), "-3.3333333333333334e-1");
        assert_eq!(decimal_directed(&neg, true), "-3.3333333333333333e-1");
    }

    #[test]
    fn exact_values_render_without_padding() {
        assert_eq!(decimal_directed(&q(1, 2), false), "5e-1");
        assert_eq!(decimal_directed(&q(1, 2), true), "5e-1");
        assert_eq!(decimal_directed(&q(0, 5), true), "0");
        assert_eq!(decimal_directed(&q(125, 100), false), "1.25e0");
        assert_eq!(decimal_directed(&q(-3, 1), true), "-3e0");
    }

    #[test]
    fn carry_rolls_the_exponent() {
        // 0.99999999999999999999 rounds up to 1e0.
        let almost = BigRational::new(
            BigInt::parse_bytes(b"99999999999999999999", 10).unwrap(),
            BigInt::parse_bytes(b"100000000000000000000", 10).unwrap(),
        );
        assert_eq!(decimal_directed(&almost, true), "1e0");
        assert_eq!(decimal_directed(&almost, false), "9.9999999999999999e-1");
    }

    #[test]
    fn float_endpoints_round_trip_soundly() {
        let v: f64 = 0.1;
        let lo: f64 = lo_string(&v).parse().unwrap();
        let hi: f64 = hi_string(&v).parse().unwrap();
        assert!(lo <= v && v <= hi);
        // 17 significant digits identify a double uniquely.
        assert_eq!(lo, v);

        // For a non-double value the printed decimals bracket it exactly.
        let r = Rational::from_ratio(22, 7);
        let lo = Rational::from_decimal(&lo_string(&r)).unwrap();
        let hi = Rational::from_decimal(&hi_string(&r)).unwrap();
        assert!(lo < r && r < hi);
    }
}
