//! Points of the Riemann sphere in two affine charts, Moebius maps acting on
//! them, and the chordal metric.

use core::cmp::Ordering;
use core::fmt;

use num_complex::Complex64;
use num_traits::{Float, Zero};

use crate::error::{Error, Result};

/// Which affine chart a [`PointCP1`] is stored in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Chart {
    /// Coordinate `z`.
    Standard,
    /// Coordinate `w = 1/z`; `w = 0` is the point at infinity.
    Infinity,
}

/// A point of the Riemann sphere.
///
/// Points with `|z| > 1` are stored in the infinity chart, so that every
/// stored coordinate has modulus at most one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointCP1 {
    chart: Chart,
    value: Complex64,
}

impl PointCP1 {
    pub const INFINITY: PointCP1 = PointCP1 {
        chart: Chart::Infinity,
        value: Complex64::new(0.0, 0.0),
    };

    /// The finite point `z`, placed in the chart where its coordinate is
    /// bounded by one.
    pub fn finite(z: Complex64) -> Self {
        if z.norm() > 1.0 {
            PointCP1 {
                chart: Chart::Infinity,
                value: z.inv(),
            }
        } else {
            PointCP1 {
                chart: Chart::Standard,
                value: z,
            }
        }
    }

    pub fn real(x: f64) -> Self {
        Self::finite(Complex64::new(x, 0.0))
    }

    /// Builds a point from an explicit chart coordinate without re-charting.
    pub fn in_chart(chart: Chart, value: Complex64) -> Self {
        PointCP1 { chart, value }
    }

    /// The point `[p : q]` in homogeneous coordinates. `(0, 0)` is not a
    /// point; it is mapped to the origin.
    pub fn from_homogeneous(p: Complex64, q: Complex64) -> Self {
        if p.norm_sqr() <= q.norm_sqr() {
            if q.is_zero() {
                PointCP1 {
                    chart: Chart::Standard,
                    value: Complex64::zero(),
                }
            } else {
                PointCP1 {
                    chart: Chart::Standard,
                    value: p / q,
                }
            }
        } else {
            PointCP1 {
                chart: Chart::Infinity,
                value: q / p,
            }
        }
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn value(&self) -> Complex64 {
        self.value
    }

    /// Homogeneous coordinates `(p, q)` with the point equal to `p/q`.
    pub fn homogeneous(&self) -> (Complex64, Complex64) {
        match self.chart {
            Chart::Standard => (self.value, Complex64::new(1.0, 0.0)),
            Chart::Infinity => (Complex64::new(1.0, 0.0), self.value),
        }
    }

    pub fn is_infinity(&self) -> bool {
        self.chart == Chart::Infinity && self.value.is_zero()
    }

    /// The standard-chart coordinate, `None` for the point at infinity.
    pub fn to_complex(&self) -> Option<Complex64> {
        match self.chart {
            Chart::Standard => Some(self.value),
            Chart::Infinity if self.value.is_zero() => None,
            Chart::Infinity => Some(self.value.inv()),
        }
    }

    /// The coordinate of this point in the given chart, `None` when the point
    /// is the pole of that chart.
    pub fn coordinate_in(&self, chart: Chart) -> Option<Complex64> {
        if chart == self.chart {
            return Some(self.value);
        }
        if self.value.is_zero() {
            None
        } else {
            Some(self.value.inv())
        }
    }

    /// Total order used for deterministic sorting: finite points by real then
    /// imaginary part (ties within `1e-9` count as equal), infinity last.
    pub fn lexicographic_cmp(&self, other: &PointCP1) -> Ordering {
        const TIE: f64 = 1e-9;
        match (self.to_complex(), other.to_complex()) {
            (None, None) => Ordering::Equal,
            (None, Some(_)) => Ordering::Greater,
            (Some(_), None) => Ordering::Less,
            (Some(a), Some(b)) => {
                if (a.re - b.re).abs() > TIE {
                    a.re.total_cmp(&b.re)
                } else if (a.im - b.im).abs() > TIE {
                    a.im.total_cmp(&b.im)
                } else {
                    Ordering::Equal
                }
            }
        }
    }
}

impl From<Complex64> for PointCP1 {
    fn from(z: Complex64) -> Self {
        PointCP1::finite(z)
    }
}

/// Writes `a+bi` with `-0` folded to `0`.
pub(crate) fn fmt_complex(f: &mut fmt::Formatter<'_>, z: Complex64) -> fmt::Result {
    let re = z.re + 0.0;
    let im = z.im + 0.0;
    if im < 0.0 {
        write!(f, "{}-{}i", re, -im)
    } else {
        write!(f, "{}+{}i", re, im)
    }
}

impl fmt::Display for PointCP1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_complex() {
            None => f.write_str("inf"),
            Some(z) => fmt_complex(f, z),
        }
    }
}

/// Chordal distance `2|z - w| / sqrt((1 + |z|^2)(1 + |w|^2))`, extended to
/// infinity through homogeneous coordinates.
pub fn chordal_distance(p: &PointCP1, q: &PointCP1) -> f64 {
    let (a, b) = p.homogeneous();
    let (c, d) = q.homogeneous();
    let cross = (a * d - b * c).norm();
    let np = (a.norm_sqr() + b.norm_sqr()).sqrt();
    let nq = (c.norm_sqr() + d.norm_sqr()).sqrt();
    (2.0 * cross / (np * nq)).min(2.0)
}

/// The Moebius map `z -> (az + b)/(cz + d)`, stored with determinant one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoebiusMap {
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
}

const DET_FLOOR: f64 = 1e-12;

impl MoebiusMap {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let det = a * d - b * c;
        if !(det.norm() > DET_FLOOR) || !det.is_finite() {
            return Err(Error::DegenerateMap {
                det_abs: det.norm(),
            });
        }
        let s = det.sqrt();
        Ok(MoebiusMap {
            a: a / s,
            b: b / s,
            c: c / s,
            d: d / s,
        })
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::zero();
        MoebiusMap {
            a: one,
            b: zero,
            c: zero,
            d: one,
        }
    }

    /// `z -> lambda z`.
    pub fn scaling(lambda: Complex64) -> Result<Self> {
        Self::new(
            lambda,
            Complex64::zero(),
            Complex64::zero(),
            Complex64::new(1.0, 0.0),
        )
    }

    /// `z -> 1/z`.
    pub fn inversion() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::zero();
        Self::new(zero, one, one, zero).expect("inversion is nondegenerate")
    }

    pub fn coefficients(&self) -> [Complex64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn apply(&self, p: &PointCP1) -> PointCP1 {
        moebius_apply(self, p)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &MoebiusMap) -> MoebiusMap {
        moebius_compose(self, other)
    }

    pub fn inverse(&self) -> MoebiusMap {
        // Determinant one, so the adjugate is the inverse.
        MoebiusMap {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// `self^n` for `n >= 0` by repeated squaring.
    pub fn power(&self, mut n: u32) -> MoebiusMap {
        let mut acc = MoebiusMap::identity();
        let mut base = *self;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.compose(&base);
            }
            base = base.compose(&base);
            n >>= 1;
        }
        acc
    }

    /// Whether both normalized matrices agree up to the sign ambiguity of the
    /// normalization.
    pub fn approx_eq(&self, other: &MoebiusMap, tol: f64) -> bool {
        let mine = self.coefficients();
        let theirs = other.coefficients();
        let dist = |sign: f64| {
            mine.iter()
                .zip(theirs.iter())
                .map(|(x, y)| (x - y * sign).norm())
                .fold(0.0, f64::max)
        };
        dist(1.0) < tol || dist(-1.0) < tol
    }
}

pub fn moebius_apply(m: &MoebiusMap, p: &PointCP1) -> PointCP1 {
    let (x, y) = p.homogeneous();
    PointCP1::from_homogeneous(m.a * x + m.b * y, m.c * x + m.d * y)
}

pub fn moebius_compose(m1: &MoebiusMap, m2: &MoebiusMap) -> MoebiusMap {
    let a = m1.a * m2.a + m1.b * m2.c;
    let b = m1.a * m2.b + m1.b * m2.d;
    let c = m1.c * m2.a + m1.d * m2.c;
    let d = m1.c * m2.b + m1.d * m2.d;
    // The product of unimodular matrices is unimodular up to rounding; the
    // renormalization removes the drift.
    MoebiusMap::new(a, b, c, d).unwrap_or(MoebiusMap { a, b, c, d })
}
