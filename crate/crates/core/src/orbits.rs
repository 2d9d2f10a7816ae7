//! Closed flow orbits through the zeros and poles of the leafwise function.
//!
//! In the mapping torus a point `x` of the fiber lies on a closed orbit of
//! the suspension flow iff `phi^n(x) = x` for some `n >= 1`; the smallest such
//! `n` counts how often the orbit crosses the fiber `s = 0`.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fibered::{base_return_time, SpeedProfile};
use crate::rational::{rat_divisor, RationalFunction};
use crate::scenario::MappingTorusScenario;
use crate::sphere::{chordal_distance, MoebiusMap, PointCP1};

/// Chordal distance under which a forward image is identified with a
/// divisor point.
const MATCH_TOL: f64 = 1e-7;

/// A closed orbit carrying zeros or poles of `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedOrbitRecord {
    /// The orbit's crossings of the fiber `s = 0`, starting at the
    /// lexicographically smallest, with `points[j + 1] = phi(points[j])`.
    pub points: Vec<PointCP1>,
    pub period_n: usize,
    pub length_l: f64,
    pub order: i64,
}

impl ClosedOrbitRecord {
    pub fn base_point(&self) -> &PointCP1 {
        &self.points[0]
    }
}

/// Smallest `n <= n_max` with `phi^n(x) = x` (chordally within `tol`).
pub fn primitive_period(phi: &MoebiusMap, x: &PointCP1, n_max: usize, tol: f64) -> Option<usize> {
    let mut y = *x;
    for n in 1..=n_max {
        y = phi.apply(&y);
        if chordal_distance(&y, x) < tol {
            return Some(n);
        }
    }
    None
}

/// `l = n T1` for an orbit of primitive period `n`.
pub fn orbit_length(n: usize, h: &SpeedProfile) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("orbit period must be positive".into()));
    }
    Ok(n as f64 * base_return_time(h)?)
}

pub fn find_singular_orbits(scenario: &MappingTorusScenario) -> Result<Vec<ClosedOrbitRecord>> {
    let g = scenario.family().g();
    if g.is_constant() {
        return Ok(Vec::new());
    }
    let t1 = base_return_time(scenario.speed())?;
    singular_orbits(
        scenario.phi(),
        g,
        t1,
        scenario.n_max(),
        scenario.tolerances().periodicity,
    )
}

/// Groups the divisor of `g` into `phi`-orbits. `return_time` is the length
/// of a period-one orbit.
pub fn singular_orbits(
    phi: &MoebiusMap,
    g: &RationalFunction,
    return_time: f64,
    n_max: usize,
    tol: f64,
) -> Result<Vec<ClosedOrbitRecord>> {
    let divisor = rat_divisor(g)?;
    let mut used = alloc::vec![false; divisor.len()];
    let mut out = Vec::new();
    for i in 0..divisor.len() {
        if used[i] {
            continue;
        }
        let (start, order) = divisor[i];
        let Some(n) = primitive_period(phi, &start, n_max, tol) else {
            return Err(Error::OrbitNotClosed {
                kind: if order > 0 { "zero" } else { "pole" },
                point: start,
                n_max,
            });
        };
        let mut members = Vec::with_capacity(n);
        let mut q = start;
        for _ in 0..n {
            let k = (0..divisor.len())
                .filter(|&k| !used[k])
                .find(|&k| chordal_distance(&divisor[k].0, &q) < MATCH_TOL)
                .ok_or_else(|| {
                    Error::InconsistentOrders(format!("orbit of {start} leaves the divisor at {q}"))
                })?;
            if divisor[k].1 != order {
                return Err(Error::InconsistentOrders(format!(
                    "orbit of {start} carries orders {order} and {}",
                    divisor[k].1
                )));
            }
            used[k] = true;
            members.push(divisor[k].0);
            q = phi.apply(&q);
        }
        let base = (0..n)
            .min_by(|&a, &b| members[a].lexicographic_cmp(&members[b]))
            .unwrap_or(0);
        members.rotate_left(base);
        out.push(ClosedOrbitRecord {
            points: members,
            period_n: n,
            length_l: n as f64 * return_time,
            order,
        });
    }
    out.sort_by(|a, b| {
        a.period_n
            .cmp(&b.period_n)
            .then_with(|| a.points[0].lexicographic_cmp(&b.points[0]))
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use num_complex::Complex64;

    fn r(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn iz() -> MoebiusMap {
        MoebiusMap::scaling(Complex64::new(0.0, 1.0)).unwrap()
    }

    #[test]
    fn periods() {
        assert_eq!(primitive_period(&iz(), &PointCP1::real(1.0), 64, 1e-9), Some(4));
        assert_eq!(primitive_period(&iz(), &PointCP1::real(0.0), 64, 1e-9), Some(1));
        assert_eq!(primitive_period(&iz(), &PointCP1::INFINITY, 64, 1e-9), Some(1));
        let double = MoebiusMap::scaling(r(2.0)).unwrap();
        assert_eq!(primitive_period(&double, &PointCP1::real(1.0), 64, 1e-9), None);
    }

    #[test]
    fn quartic_orbits() {
        let g = RationalFunction::new(
            vec![r(0.0), r(0.0), r(0.0), r(0.0), r(1.0)],
            vec![r(1.0), r(0.0), r(0.0), r(0.0), r(1.0)],
        )
        .unwrap();
        let orbits = singular_orbits(&iz(), &g, 1.0, 64, 1e-9).unwrap();
        assert_eq!(orbits.len(), 2);
        assert_eq!((orbits[0].period_n, orbits[0].order), (1, 4));
        assert_eq!((orbits[1].period_n, orbits[1].order), (4, -1));
        assert_eq!(orbits[1].length_l, 4.0);
        for j in 0..3 {
            let next = iz().apply(&orbits[1].points[j]);
            assert!(chordal_distance(&next, &orbits[1].points[j + 1]) < 1e-9);
        }
    }

    #[test]
    fn hyperbolic_map_is_rejected() {
        let g = RationalFunction::new(vec![r(-1.0), r(1.0)], vec![r(0.0), r(1.0)]).unwrap();
        let double = MoebiusMap::scaling(r(2.0)).unwrap();
        let err = singular_orbits(&double, &g, 1.0, 64, 1e-9).unwrap_err();
        assert_eq!(err.code(), "OrbitNotClosed");
    }

    #[test]
    fn length_scales_with_period() {
        let h = SpeedProfile::constant(2.0);
        assert!((orbit_length(3, &h).unwrap() - 1.5).abs() < 1e-12);
    }
}
