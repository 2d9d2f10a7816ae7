//! Places of `Q` and `Q(i)` and the product formula `Σ_v log |f|_v = 0`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::fmt::Write;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::verifier::VerificationReport;

/// Largest accepted absolute value / norm of an input.
pub const MAX_INPUT: u64 = 1 << 62;

/// `re + im i` in `Z[i]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GaussianInt {
    pub re: i64,
    pub im: i64,
}

impl GaussianInt {
    pub const ONE: GaussianInt = GaussianInt { re: 1, im: 0 };
    pub const I: GaussianInt = GaussianInt { re: 0, im: 1 };

    pub const fn new(re: i64, im: i64) -> Self {
        GaussianInt { re, im }
    }

    pub fn norm(&self) -> u128 {
        let (a, b) = (self.re as i128, self.im as i128);
        (a * a + b * b) as u128
    }

    pub fn is_zero(&self) -> bool {
        self.re == 0 && self.im == 0
    }

    pub fn is_unit(&self) -> bool {
        self.norm() == 1
    }

    pub fn conj(&self) -> Self {
        GaussianInt::new(self.re, -self.im)
    }

    pub fn mul(&self, o: &GaussianInt) -> Option<GaussianInt> {
        let (a, b, c, d) = (self.re as i128, self.im as i128, o.re as i128, o.im as i128);
        let re = i64::try_from(a * c - b * d).ok()?;
        let im = i64::try_from(a * d + b * c).ok()?;
        Some(GaussianInt::new(re, im))
    }

    /// Exact quotient, if `o` divides `self`.
    pub fn div_exact(&self, o: &GaussianInt) -> Option<GaussianInt> {
        let n = o.norm() as i128;
        if n == 0 {
            return None;
        }
        let (a, b, c, d) = (self.re as i128, self.im as i128, o.re as i128, o.im as i128);
        let re = a * c + b * d;
        let im = b * c - a * d;
        if re % n != 0 || im % n != 0 {
            return None;
        }
        Some(GaussianInt::new(i64::try_from(re / n).ok()?, i64::try_from(im / n).ok()?))
    }

    /// Remainder of the division with the quotient rounded to the nearest
    /// Gaussian integer.
    fn rem(&self, o: &GaussianInt) -> GaussianInt {
        let n = o.norm() as i128;
        let (a, b, c, d) = (self.re as i128, self.im as i128, o.re as i128, o.im as i128);
        let round = |x: i128| (2 * x + n).div_euclid(2 * n);
        let q = GaussianInt::new(round(a * c + b * d) as i64, round(b * c - a * d) as i64);
        let qo = q.mul(o).expect("quotient times divisor stays below the dividend");
        GaussianInt::new(self.re - qo.re, self.im - qo.im)
    }

    /// The associate with `re > 0` and `im >= 0`.
    pub fn first_quadrant(&self) -> GaussianInt {
        let mut z = *self;
        for _ in 0..4 {
            if z.re > 0 && z.im >= 0 {
                return z;
            }
            z = GaussianInt::new(-z.im, z.re);
        }
        z
    }
}

impl fmt::Display for GaussianInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (re, im) = (self.re, self.im);
        if im == 0 {
            return write!(f, "{re}");
        }
        if re != 0 {
            write!(f, "{re}")?;
            if im > 0 {
                f.write_str("+")?;
            }
        }
        match im {
            1 => f.write_str("i"),
            -1 => f.write_str("-i"),
            _ => write!(f, "{im}i"),
        }
    }
}

fn gaussian_gcd(mut a: GaussianInt, mut b: GaussianInt) -> GaussianInt {
    while !b.is_zero() {
        let r = a.rem(&b);
        a = b;
        b = r;
    }
    a
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Place {
    FinitePrime(u64),
    GaussianPrime { pi: GaussianInt, norm: u64 },
    InfiniteReal,
    InfiniteComplex,
}

impl Place {
    pub fn is_finite(&self) -> bool {
        matches!(self, Place::FinitePrime(_) | Place::GaussianPrime { .. })
    }

    /// `N(p)`; 0 for infinite places.
    pub fn norm(&self) -> u64 {
        match self {
            Place::FinitePrime(p) => *p,
            Place::GaussianPrime { norm, .. } => *norm,
            _ => 0,
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::FinitePrime(p) => write!(f, "{p}"),
            Place::GaussianPrime { pi, .. } => write!(f, "({pi})"),
            Place::InfiniteReal | Place::InfiniteComplex => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaceValuation {
    pub place: Place,
    pub ord: i64,
    pub log_norm: f64,
    pub log_abs: f64,
}

impl PlaceValuation {
    fn finite(place: Place, ord: i64) -> Self {
        let log_norm = (place.norm() as f64).ln();
        PlaceValuation {
            place,
            ord,
            log_norm,
            log_abs: -(ord as f64) * log_norm,
        }
    }
}

/// Prime factorization by trial division, primes increasing.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn rational_places(num: i64, den: i64) -> Result<Vec<PlaceValuation>> {
    if num == 0 {
        return Err(Error::ZeroInput("numerator"));
    }
    if den == 0 {
        return Err(Error::ZeroInput("denominator"));
    }
    let (n, d) = (num.unsigned_abs(), den.unsigned_abs());
    if n > MAX_INPUT || d > MAX_INPUT {
        return Err(Error::InvalidArgument("components must not exceed 2^62".into()));
    }
    let g = gcd_u64(n, d);
    let (n, d) = (n / g, d / g);
    let mut places: Vec<PlaceValuation> = factor_u64(n)
        .into_iter()
        .map(|(p, e)| PlaceValuation::finite(Place::FinitePrime(p), e as i64))
        .chain(
            factor_u64(d)
                .into_iter()
                .map(|(p, e)| PlaceValuation::finite(Place::FinitePrime(p), -(e as i64))),
        )
        .collect();
    places.sort_by_key(|v| v.place.norm());
    places.push(PlaceValuation {
        place: Place::InfiniteReal,
        ord: 0,
        log_norm: 0.0,
        log_abs: (n as f64).ln() - (d as f64).ln(),
    });
    Ok(places)
}

fn pow_mod(b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc: u128 = 1;
    let m128 = m as u128;
    let mut base = (b % m) as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m128;
        }
        base = base * base % m128;
        e >>= 1;
    }
    acc as u64
}

/// The first-quadrant Gaussian prime above a rational prime `p ≡ 1 mod 4`.
fn split_prime(p: u64) -> Result<GaussianInt> {
    let c = (2..p)
        .find(|&c| pow_mod(c, (p - 1) / 2, p) == p - 1)
        .ok_or_else(|| Error::FactorizationFailed(format!("no non-residue mod {p}")))?;
    let x = pow_mod(c, (p - 1) / 4, p);
    let pi = gaussian_gcd(GaussianInt::new(p as i64, 0), GaussianInt::new(x as i64, 1)).first_quadrant();
    if pi.norm() != p as u128 {
        return Err(Error::FactorizationFailed(format!("gcd descent for {p} gave {pi}")));
    }
    Ok(pi)
}

/// `z = unit · Π π^e` with first-quadrant primes sorted by norm, then by
/// coordinates. Reconstruction is checked exactly.
pub fn factor_gaussian(z: GaussianInt) -> Result<(GaussianInt, Vec<(GaussianInt, u32)>)> {
    if z.is_zero() {
        return Err(Error::ZeroInput("gaussian integer"));
    }
    let n = z.norm();
    if n > MAX_INPUT as u128 {
        return Err(Error::InvalidArgument("norm must not exceed 2^62".into()));
    }
    let mut candidates = Vec::new();
    for (p, _) in factor_u64(n as u64) {
        match p % 4 {
            2 => candidates.push(GaussianInt::new(1, 1)),
            3 => candidates.push(GaussianInt::new(p as i64, 0)),
            _ => {
                let pi = split_prime(p)?;
                candidates.push(pi);
                let other = pi.conj().first_quadrant();
                if other != pi {
                    candidates.push(other);
                }
            }
        }
    }
    let mut rest = z;
    let mut factors = Vec::new();
    for pi in candidates {
        let mut e = 0;
        while let Some(q) = rest.div_exact(&pi) {
            rest = q;
            e += 1;
        }
        if e > 0 {
            factors.push((pi, e));
        }
    }
    if !rest.is_unit() {
        return Err(Error::FactorizationFailed(format!("cofactor {rest} of {z} is not a unit")));
    }
    factors.sort_by(|a, b| {
        a.0.norm()
            .cmp(&b.0.norm())
            .then(a.0.re.cmp(&b.0.re))
            .then(a.0.im.cmp(&b.0.im))
    });
    let mut check = rest;
    for (pi, e) in &factors {
        for _ in 0..*e {
            check = check
                .mul(pi)
                .ok_or_else(|| Error::FactorizationFailed("overflow in reconstruction".into()))?;
        }
    }
    if check != z {
        return Err(Error::FactorizationFailed(format!("factors of {z} multiply to {check}")));
    }
    Ok((rest, factors))
}

pub fn gaussian_places(num: GaussianInt, den: GaussianInt) -> Result<Vec<PlaceValuation>> {
    if num.is_zero() {
        return Err(Error::ZeroInput("numerator"));
    }
    if den.is_zero() {
        return Err(Error::ZeroInput("denominator"));
    }
    let (_, top) = factor_gaussian(num)?;
    let (_, bottom) = factor_gaussian(den)?;
    let mut ords: Vec<(GaussianInt, i64)> = Vec::new();
    for (pi, e) in top.iter().map(|(p, e)| (*p, *e as i64)).chain(bottom.iter().map(|(p, e)| (*p, -(*e as i64)))) {
        match ords.iter_mut().find(|(q, _)| *q == pi) {
            Some(entry) => entry.1 += e,
            None => ords.push((pi, e)),
        }
    }
    ords.retain(|(_, e)| *e != 0);
    ords.sort_by(|a, b| {
        a.0.norm()
            .cmp(&b.0.norm())
            .then(a.0.re.cmp(&b.0.re))
            .then(a.0.im.cmp(&b.0.im))
    });
    let mut places: Vec<PlaceValuation> = ords
        .into_iter()
        .map(|(pi, e)| PlaceValuation::finite(Place::GaussianPrime { pi, norm: pi.norm() as u64 }, e))
        .collect();
    places.push(PlaceValuation {
        place: Place::InfiniteComplex,
        ord: 0,
        log_norm: 0.0,
        log_abs: (num.norm() as f64).ln() - (den.norm() as f64).ln(),
    });
    Ok(places)
}

/// `|Σ_v log |f|_v|`, finite places first by increasing norm.
pub fn product_formula_residual(places: &[PlaceValuation]) -> f64 {
    let mut order: Vec<&PlaceValuation> = places.iter().collect();
    order.sort_by(|a, b| match (a.place.is_finite(), b.place.is_finite()) {
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        _ => a.place.norm().cmp(&b.place.norm()),
    });
    order.iter().map(|v| v.log_abs).sum::<f64>().abs()
}

/// Closed orbits with `(l, ord)` beside finite places with `(log N, ord)`.
/// With places supplied, rows run to the shorter of the two lists.
pub fn analogy_table(report: &VerificationReport, places: Option<&[PlaceValuation]>) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<6} {:>14} {:>5} | {:<12} {:>14} {:>5}",
        "orbit", "l", "ord", "place", "log N", "ord"
    );
    let finite: Vec<&PlaceValuation> = places
        .unwrap_or(&[])
        .iter()
        .filter(|v| v.place.is_finite())
        .collect();
    let rows = match places {
        Some(_) => report.orbits.len().min(finite.len()),
        None => report.orbits.len(),
    };
    for i in 0..rows {
        let o = &report.orbits[i];
        let left = format!("{:<6} {:>14.9} {:>5}", format!("g{}", i + 1), o.length_l, o.order);
        let right = match places {
            Some(_) => {
                let v = finite[i];
                format!("{:<12} {:>14.9} {:>5}", format!("{}", v.place), v.log_norm, v.ord)
            }
            None => String::new(),
        };
        let _ = writeln!(out, "{left} | {right}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn finite_ords(places: &[PlaceValuation]) -> Vec<(u64, i64)> {
        places
            .iter()
            .filter(|v| v.place.is_finite())
            .map(|v| (v.place.norm(), v.ord))
            .collect()
    }

    #[test]
    fn gaussian_display() {
        use alloc::string::{String, ToString};
        let shown: Vec<String> = [(2, 1), (1, -1), (0, 1), (0, -1), (3, 0), (0, 4), (-5, -3)]
            .iter()
            .map(|&(a, b)| GaussianInt::new(a, b).to_string())
            .collect();
        assert_eq!(shown, ["2+i", "1-i", "i", "-i", "3", "4i", "-5-3i"]);
    }

    #[test]
    fn rational_examples() {
        let p = rational_places(-12, 5).unwrap();
        assert_eq!(finite_ords(&p), vec![(2, 2), (3, 1), (5, -1)]);
        assert!((p.last().unwrap().log_abs - (12.0f64 / 5.0).ln()).abs() < 1e-15);
        assert!(product_formula_residual(&p) < 1e-13);

        let p = rational_places(1, 1).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(product_formula_residual(&p), 0.0);

        let p = rational_places(7, 1).unwrap();
        assert_eq!(finite_ords(&p), vec![(7, 1)]);

        assert_eq!(rational_places(0, 3).unwrap_err().code(), "ZeroInput");
    }

    #[test]
    fn gaussian_examples() {
        let p = gaussian_places(GaussianInt::new(3, 4), GaussianInt::ONE).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(
            p[0].place,
            Place::GaussianPrime { pi: GaussianInt::new(2, 1), norm: 5 }
        );
        assert_eq!(p[0].ord, 2);
        assert!(product_formula_residual(&p) < 1e-13);

        let p = gaussian_places(GaussianInt::new(1, 1), GaussianInt::ONE).unwrap();
        assert_eq!(p[0].place, Place::GaussianPrime { pi: GaussianInt::new(1, 1), norm: 2 });
        assert_eq!(p[0].ord, 1);

        let p = gaussian_places(GaussianInt::I, GaussianInt::ONE).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].log_abs, 0.0);
    }

    #[test]
    fn inert_and_split_primes() {
        let (unit, f) = factor_gaussian(GaussianInt::new(3 * 5, 0)).unwrap();
        assert!(unit.is_unit());
        let norms: Vec<u128> = f.iter().map(|(p, _)| p.norm()).collect();
        assert_eq!(norms, vec![5, 5, 9]);
        let (_, f) = factor_gaussian(GaussianInt::new(0, 1_000_003)).unwrap();
        // 1000003 ≡ 3 mod 4 is inert.
        assert_eq!(f, vec![(GaussianInt::new(1_000_003, 0), 1)]);
    }

    #[test]
    fn table_shapes() {
        let empty = VerificationReport {
            orbits: Vec::new(),
            sum_l_ord: 0.0,
            residual: 0.0,
            residual_threshold: 1e-9,
            constancy_ok: true,
            constancy_profiles: Vec::new(),
            tube_checks: Vec::new(),
            stokes_checks: Vec::new(),
            prop2_residual: None,
            passed: true,
            failure: None,
        };
        assert_eq!(analogy_table(&empty, None).lines().count(), 1);
    }
}
