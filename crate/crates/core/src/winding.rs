//! Argument-principle integrals: the net number of zeros minus poles of a
//! rational function inside a contour, computed as `(1/2 pi i) ∮ f'/f dz`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::orbits::ClosedOrbitRecord;
use crate::quadrature::{periodic_mean, Quadrature};
use crate::rational::RationalFunction;
use crate::scenario::MappingTorusScenario;
use crate::sphere::{chordal_distance, Chart, PointCP1};

/// Largest allowed distance of a raw winding integral from its integer.
pub const DEFAULT_SNAP: f64 = 1e-6;
pub const START_NODES: usize = 64;
pub const MAX_NODES: usize = 1 << 14;
/// Node doubling stops once successive estimates differ by less than this.
pub const CHANGE_TOL: f64 = 1e-10;
pub const MAX_HALVINGS: usize = 8;
/// No zero or pole may come chordally closer than this to a contour.
pub const SINGULARITY_GAP: f64 = 1e-7;
/// Zeros and poles must also stay this fraction of the radius away from the
/// circle, which bounds the node count the trapezoid rule needs.
const RELATIVE_GAP: f64 = 0.05;

/// Outcome of a circle integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Winding {
    pub order: i64,
    /// `(1/2 pi i) ∮ f'/f dz` before snapping.
    pub raw: Complex64,
    /// Radius actually used after halving.
    pub radius: f64,
    pub nodes: usize,
}

/// Net order of `f` inside the positively oriented circle of the given radius
/// around `center`, measured in the chart of `center`.
pub fn winding_order(f: &RationalFunction, center: &PointCP1, radius: f64) -> Result<i64> {
    Ok(winding_order_detailed(f, center, radius, DEFAULT_SNAP)?.order)
}

pub fn winding_order_detailed(
    f: &RationalFunction,
    center: &PointCP1,
    radius: f64,
    snap: f64,
) -> Result<Winding> {
    winding_with_support(f, center, radius, &f.divisor_support(), snap)
}

/// As [`winding_order_detailed`] with the zeros and poles of `f` supplied by
/// the caller.
pub fn winding_with_support(
    f: &RationalFunction,
    center: &PointCP1,
    radius: f64,
    support: &[PointCP1],
    snap: f64,
) -> Result<Winding> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial("numerator"));
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidArgument("winding radius must be positive".into()));
    }
    let r = admissible_radius(center, radius, support)?;
    let chart_fn = f.in_chart(center.chart());
    let q = circle_log_integral(&chart_fn, center.value(), r)?;
    let order = snap_to_integer(q.value, snap)?;
    Ok(Winding {
        order,
        raw: q.value,
        radius: r,
        nodes: q.nodes,
    })
}

pub(crate) fn snap_to_integer(raw: Complex64, snap: f64) -> Result<i64> {
    let n = raw.re.round();
    if (raw.re - n).abs() < snap && raw.im.abs() < snap {
        Ok(n as i64)
    } else {
        Err(Error::NotNearInteger { raw: raw.re, snap })
    }
}

fn clear_of_circle(p: &PointCP1, chart: Chart, c: Complex64, r: f64) -> bool {
    let Some(w) = p.coordinate_in(chart) else {
        return true;
    };
    let d = (w - c).norm();
    if (d - r).abs() < RELATIVE_GAP * r {
        return false;
    }
    let nearest = if d > 0.0 {
        c + (w - c) * (r / d)
    } else {
        c + r
    };
    chordal_distance(p, &PointCP1::in_chart(chart, nearest)) >= SINGULARITY_GAP
}

/// Halves `radius` until no zero or pole lies near the circle.
pub fn admissible_radius(center: &PointCP1, radius: f64, support: &[PointCP1]) -> Result<f64> {
    let mut r = radius;
    for _ in 0..=MAX_HALVINGS {
        if support
            .iter()
            .all(|p| clear_of_circle(p, center.chart(), center.value(), r))
        {
            return Ok(r);
        }
        r *= 0.5;
    }
    Err(Error::ContourThroughSingularity {
        center: *center,
        radius,
    })
}

/// `(1/2 pi i) ∮ f'/f dz` over the circle `|z - c| = r` in the coordinate of
/// `f`, without snapping.
pub fn circle_log_integral(f: &RationalFunction, c: Complex64, r: f64) -> Result<Quadrature> {
    periodic_mean(
        |t| {
            let offset = Complex64::from_polar(r, 2.0 * PI * t);
            let v = f.log_derivative(c + offset) * offset;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::ContourThroughSingularity {
                    center: PointCP1::finite(c),
                    radius: r,
                })
            }
        },
        START_NODES,
        MAX_NODES,
        CHANGE_TOL,
    )
}

/// `(1/2 pi i) ∮ f'/f dz` along a closed curve `t -> z(t)`, `t in [0, 1)`,
/// given together with `dz/dt`. Unsnapped.
pub fn curve_log_integral<C>(f: &RationalFunction, curve: C) -> Result<Quadrature>
where
    C: Fn(f64) -> (Complex64, Complex64),
{
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    periodic_mean(
        |t| {
            let (z, dz) = curve(t);
            let v = f.log_derivative(z) * dz / two_pi_i;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::ContourThroughSingularity {
                    center: PointCP1::finite(z),
                    radius: 0.0,
                })
            }
        },
        START_NODES,
        MAX_NODES,
        CHANGE_TOL,
    )
}

/// Orders of the leaf functions `f(., s)` at the orbit's points on the leaves
/// `s = j/m`, `j = 0..m`. On leaf `j` the orbit point `j mod n` is used, so
/// every point of the orbit is visited.
pub fn order_constancy_profile(
    scenario: &MappingTorusScenario,
    orbit: &ClosedOrbitRecord,
    m: usize,
) -> Result<Vec<i64>> {
    if m < 2 {
        return Err(Error::InvalidArgument("order_constancy_profile needs m >= 2".into()));
    }
    let family = scenario.family();
    let support = family.g().divisor_support();
    let radius = crate::eta::default_tube_radius(&support);
    let snap = scenario.tolerances().winding_snap;
    let mut out = Vec::with_capacity(m);
    for j in 0..m {
        let s = j as f64 / m as f64;
        let leaf = family.leaf_function(s);
        let point = &orbit.points[j % orbit.points.len()];
        out.push(winding_with_support(&leaf, point, radius, &support, snap)?.order);
    }
    Ok(out)
}
