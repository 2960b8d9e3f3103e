//! Big-integer combinatorics and decimal rendering shared by the exact paths.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// `C(n, r)` as an arbitrary-precision integer; zero when `r > n`.
pub fn binomial(n: u64, r: u64) -> BigUint {
    if r > n {
        return BigUint::zero();
    }
    let r = r.min(n - r);
    let mut acc = BigUint::one();
    for i in 0..r {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

pub fn factorial(n: u64) -> BigUint {
    (2..=n).fold(BigUint::one(), |acc, i| acc * i)
}

pub fn ratio(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Parses `"3"`, `"0.25"`, `".5"`, `"-1.5"` or `"3/8"` into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole
        .chars()
        .chain(frac.chars())
        .all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let digits = format!("{whole}{frac}");
    let num: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().ok()?
    };
    let den = num_traits::pow(BigInt::from(10u32), frac.len());
    let r = BigRational::new(num, den);
    Some(if neg { -r } else { r })
}

/// Renders an exact rational as a terminating decimal when possible, else `p/q`.
pub fn exact_decimal(r: &BigRational) -> String {
    let mut den = r.denom().clone();
    let two = BigInt::from(2u32);
    let five = BigInt::from(5u32);
    let (mut twos, mut fives) = (0usize, 0usize);
    while den.is_even() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return format!("{}/{}", r.numer(), r.denom());
    }
    let places = twos.max(fives);
    let scaled = r * int(num_traits::pow(BigInt::from(10u32), places));
    let digits = scaled.to_integer().abs().to_string();
    let sign = if r.is_negative() { "-" } else { "" };
    if places == 0 {
        return format!("{sign}{digits}");
    }
    let padded = format!("{digits:0>width$}", width = places + 1);
    let (int_part, frac_part) = padded.split_at(padded.len() - places);
    let frac_part = frac_part.trim_end_matches('0');
    if frac_part.is_empty() {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part}")
    }
}

const SIG: usize = 15;

/// Renders 15 significant digits of an exact rational, `%g`-style.
pub fn sig15_rational(r: &BigRational) -> String {
    if r.is_zero() {
        return "0".to_string();
    }
    let num = r.numer().abs();
    let den = r.denom().clone();
    let ten = BigInt::from(10u32);
    // 10^exp <= |r| < 10^(exp+1)
    let mut exp = num.to_string().len() as i64 - den.to_string().len() as i64;
    if num < &den * pow10(&ten, exp.max(0)) / pow10(&ten, (-exp).max(0)) {
        exp -= 1;
    }
    let shift = SIG as i64 - 1 - exp;
    let (n, d) = if shift >= 0 {
        (num * pow10(&ten, shift), den)
    } else {
        (num, den * pow10(&ten, -shift))
    };
    let mut scaled = (BigInt::from(2u32) * n + &d) / (BigInt::from(2u32) * d);
    if scaled == pow10(&ten, SIG as i64) {
        scaled = pow10(&ten, SIG as i64 - 1);
        exp += 1;
    }
    render(r.is_negative(), &scaled.to_string(), exp)
}

/// Renders 15 significant digits of a float, `%g`-style; matches
/// [`sig15_rational`] on exactly representable values.
pub fn sig15_f64(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let s = format!("{:.*e}", SIG - 1, x.abs());
    let (mantissa, exp) = s.split_once('e').expect("exponent");
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    render(x < 0.0, &digits, exp.parse().expect("exponent"))
}

fn pow10(ten: &BigInt, e: i64) -> BigInt {
    num_traits::pow(ten.clone(), e as usize)
}

fn render(negative: bool, digits: &str, exp: i64) -> String {
    let sign = if negative { "-" } else { "" };
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };
    if (-5..SIG as i64).contains(&exp) {
        if exp < 0 {
            let zeros = "0".repeat((-exp - 1) as usize);
            format!("{sign}0.{zeros}{digits}")
        } else {
            let int_len = exp as usize + 1;
            if digits.len() <= int_len {
                format!("{sign}{digits}{}", "0".repeat(int_len - digits.len()))
            } else {
                format!("{sign}{}.{}", &digits[..int_len], &digits[int_len..])
            }
        }
    } else {
        let (head, tail) = digits.split_at(1);
        if tail.is_empty() {
            format!("{sign}{head}e{exp}")
        } else {
            format!("{sign}{head}.{tail}e{exp}")
        }
    }
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(3, 2), BigUint::from(3u32));
        assert_eq!(binomial(1, 2), BigUint::zero());
        assert_eq!(binomial(0, 0), BigUint::one());
        assert_eq!(binomial(52, 5), BigUint::from(2_598_960u32));
        // Pascal's rule on a large row
        assert_eq!(
            binomial(4950, 400),
            binomial(4949, 399) + binomial(4949, 400)
        );
    }

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(parse_rational("0.1"), Some(q(1, 10)));
        assert_eq!(parse_rational(" 1/5 "), Some(q(1, 5)));
        assert_eq!(parse_rational("1"), Some(q(1, 1)));
        assert_eq!(parse_rational(".5"), Some(q(1, 2)));
        assert_eq!(parse_rational("-0.25"), Some(q(-1, 4)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(parse_rational("."), None);
        assert_eq!(parse_rational(""), None);
    }

    #[test]
    fn exact_decimal_rendering() {
        assert_eq!(exact_decimal(&q(11, 10)), "1.1");
        assert_eq!(exact_decimal(&q(-2, 1)), "-2");
        assert_eq!(exact_decimal(&q(1, 40)), "0.025");
        assert_eq!(exact_decimal(&q(1, 3)), "1/3");
    }

    #[test]
    fn significant_digit_rendering() {
        assert_eq!(sig15_rational(&q(1, 1)), "1");
        assert_eq!(sig15_rational(&q(-2, 1)), "-2");
        assert_eq!(sig15_rational(&q(1, 3)), "0.333333333333333");
        assert_eq!(sig15_rational(&q(2, 3)), "0.666666666666667");
        assert_eq!(sig15_rational(&q(1, 10)), "0.1");
        assert_eq!(sig15_rational(&q(123, 1)), "123");
        assert_eq!(sig15_rational(&q(1, 1_000_000)), "1e-6");
        assert_eq!(sig15_rational(&q(9_999_999_999_999_999, 10)), "1e15");
        assert_eq!(sig15_f64(1.0), "1");
        assert_eq!(sig15_f64(-2.0), "-2");
        assert_eq!(sig15_f64(0.1), "0.1");
        assert_eq!(sig15_f64(1.0 / 3.0), "0.333333333333333");
        assert_eq!(sig15_f64(1e-6), "1e-6");
        assert_eq!(sig15_f64(0.00012), "0.00012");
        assert_eq!(sig15_f64(6.02e23), "6.02e23");
    }
}
