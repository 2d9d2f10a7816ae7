//! Command-line literals: complex numbers such as `3-4i`, Gaussian integers,
//! fractions `p/q` and comma-separated coefficient lists.

use std::str::FromStr;

use foliated_core::arith::GaussianInt;
use num_complex::Complex64;

use crate::error::LabError;

fn usage(what: &str, text: &str) -> LabError {
    LabError::Usage(format!("cannot read {what} from {text:?}"))
}

/// Splits `a+bi`, `a-bi`, `bi`, `i`, `-i` or `a` into real and imaginary
/// parts, each parsed as `T`.
fn split_complex<T: FromStr + From<i8>>(text: &str) -> Option<(T, T)> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return None;
    }
    let Some(body) = s.strip_suffix('i') else {
        return Some((s.parse().ok()?, T::from(0)));
    };
    let bytes = body.as_bytes();
    // last sign that is not a leading sign or part of an exponent
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("", body),
    };
    let re = if re.is_empty() { T::from(0) } else { re.parse().ok()? };
    let im = match im {
        "" | "+" => T::from(1),
        "-" => T::from(-1),
        _ => im.parse().ok()?,
    };
    Some((re, im))
}

pub fn parse_complex(text: &str) -> Result<Complex64, LabError> {
    let (re, im): (f64, f64) = split_complex(text).ok_or_else(|| usage("a complex number", text))?;
    Ok(Complex64::new(re, im))
}

pub fn parse_gaussian(text: &str) -> Result<GaussianInt, LabError> {
    let (re, im): (i64, i64) = split_complex(text).ok_or_else(|| usage("a Gaussian integer", text))?;
    Ok(GaussianInt::new(re, im))
}

/// `a+bi` or `a+bi/c+di`.
pub fn parse_gaussian_fraction(text: &str) -> Result<(GaussianInt, GaussianInt), LabError> {
    match text.split_once('/') {
        Some((n, d)) => Ok((parse_gaussian(n)?, parse_gaussian(d)?)),
        None => Ok((parse_gaussian(text)?, GaussianInt::ONE)),
    }
}

/// `p/q` or `p`.
pub fn parse_fraction(text: &str) -> Result<(i64, i64), LabError> {
    let int = |s: &str| s.trim().parse::<i64>().map_err(|_| usage("a fraction", text));
    match text.split_once('/') {
        Some((n, d)) => Ok((int(n)?, int(d)?)),
        None => Ok((int(text)?, 1)),
    }
}

/// Comma-separated complex literals, constant term first.
pub fn parse_coefficients(text: &str) -> Result<Vec<Complex64>, LabError> {
    text.split(',').map(parse_complex).collect()
}

/// `re,im`.
pub fn parse_point(text: &str) -> Result<Complex64, LabError> {
    let parts: Vec<&str> = text.split(',').collect();
    match parts.as_slice() {
        [re] => Ok(Complex64::new(re.trim().parse().map_err(|_| usage("a point", text))?, 0.0)),
        [re, im] => {
            let re = re.trim().parse().map_err(|_| usage("a point", text))?;
            let im = im.trim().parse().map_err(|_| usage("a point", text))?;
            Ok(Complex64::new(re, im))
        }
        _ => Err(usage("a point", text)),
    }
}
