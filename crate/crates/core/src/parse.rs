//! Text syntax for complex literals (`0.4-0.2i`, `-i`, `3`) and digits
//! (`2+i`, `2+i'`).

use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::gaussian::GaussianInt;

fn parse_error(s: &str, what: &str) -> Error {
    Error::Parse(format!("{what}: {s:?}"))
}

/// Exact value of a decimal literal such as `-0.125`, `3`, `.5`, `2.5e-3`.
pub fn parse_decimal(s: &str) -> Result<BigRational> {
    let bad = || parse_error(s, "invalid number");
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (
            &s[..pos],
            s[pos + 1..].parse::<i32>().map_err(|_| bad())?,
        ),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let numer = BigInt::from_str(&all_digits).map_err(|_| bad())?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = BigRational::from_integer(numer);
    if scale >= 0 {
        value *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if negative { -value } else { value })
}

/// Splits `a+bi` into real and imaginary source text, accepting pure real,
/// pure imaginary and a bare `i`.
fn split_complex(s: &str) -> Result<(Option<&str>, Option<&str>)> {
    let s = s.trim();
    if s.is_empty() {
        return Err(parse_error(s, "empty complex literal"));
    }
    let Some(body) = s.strip_suffix('i') else {
        return Ok((Some(s), None));
    };
    // Find the sign that starts the imaginary part: the last +/- not at the
    // start and not directly after an exponent marker.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&p| matches!(bytes[p], b'+' | b'-') && !matches!(bytes[p - 1], b'e' | b'E'));
    match split {
        Some(p) => Ok((Some(&body[..p]), Some(&body[p..]))),
        None => Ok((None, Some(body))),
    }
}

fn imaginary_coefficient(s: &str) -> &str {
    match s {
        "" | "+" => "1",
        "-" => "-1",
        other => other,
    }
}

/// Parses a complex literal exactly.
pub fn parse_complex_exact(s: &str) -> Result<Complex<BigRational>> {
    let (re, im) = split_complex(s)?;
    let re = re.map(|r| parse_decimal(r.trim())).transpose()?;
    let im = im
        .map(|m| {
            let m = imaginary_coefficient(m.trim());
            match m {
                "1" => Ok(BigRational::one()),
                "-1" => Ok(-BigRational::one()),
                _ => parse_decimal(m),
            }
        })
        .transpose()?;
    Ok(Complex::new(
        re.unwrap_or_else(BigRational::zero),
        im.unwrap_or_else(BigRational::zero),
    ))
}

/// Parses a complex literal into `f64` components.
pub fn parse_complex(s: &str) -> Result<Complex<f64>> {
    let (re, im) = split_complex(s)?;
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| parse_error(s, "invalid complex literal"))
    };
    let re = re.map(num).transpose()?.unwrap_or(0.0);
    let im = im
        .map(|m| num(imaginary_coefficient(m.trim())))
        .transpose()?
        .unwrap_or(0.0);
    Ok(Complex::new(re, im))
}

/// Parses a Gaussian integer such as `2`, `-3-2i`, `i`, `1+2i`.
pub fn parse_gaussian(s: &str) -> Result<GaussianInt> {
    let (re, im) = split_complex(s)?;
    let int = |t: &str| {
        let t = t.trim();
        t.strip_prefix('+')
            .unwrap_or(t)
            .parse::<i64>()
            .map_err(|_| parse_error(s, "invalid Gaussian integer"))
    };
    let re = re.map(int).transpose()?.unwrap_or(0);
    let im = im
        .map(|m| int(imaginary_coefficient(m.trim())))
        .transpose()?
        .unwrap_or(0);
    Ok(Complex::new(re, im))
}
