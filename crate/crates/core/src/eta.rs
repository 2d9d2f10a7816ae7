//! The closed 2-form `eta = (1/f) d_F f ∧ omega` on the mapping torus and its
//! integrals over tori.
//!
//! In the coordinates `(z, s)` of the fibered model `omega = ds / h(s)` and
//! `d_F f / f = (g'/g)(z) dz`, so a map `(u, v) -> (z, s)` pulls `eta` back to
//! `(g'/g)(z) (z_u s_v - z_v s_u) / h(s) du ∧ dv`.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::{Float, Zero};

use crate::error::{Error, Result};
use crate::fibered::{base_return_time, CompactLeafRecord, TRANSVERSE_FLOOR};
use crate::orbits::{find_singular_orbits, ClosedOrbitRecord};
use crate::quadrature::periodic_mean_2d;
use crate::rational::RationalFunction;
use crate::scenario::MappingTorusScenario;
use crate::sphere::{chordal_distance, Chart, PointCP1};
use crate::winding::circle_log_integral;

/// Chordal clearance a patch must keep from the zeros and poles.
pub const PATCH_CLEARANCE: f64 = 1e-6;
/// Grid used to check patch validity.
pub const PATCH_GRID: usize = 128;
pub const SURFACE_START: usize = 16;
pub const SURFACE_MAX_PER_AXIS: usize = 1 << 10;
pub const SURFACE_TOL: f64 = 1e-9;
/// Pointwise clearance demanded by [`eta_pullback`].
pub const POINT_CLEARANCE: f64 = 1e-7;
const MAX_TUBE_RADIUS: f64 = 0.5;
/// Samples along a loop when counting how often it winds around a point.
const LOOP_SAMPLES: usize = 512;

fn two_pi_i() -> Complex64 {
    Complex64::new(0.0, 2.0 * PI)
}

/// A quarter of the smallest chordal gap between distinct points of
/// `support`, capped at 0.5.
pub fn default_tube_radius(support: &[PointCP1]) -> f64 {
    let mut gap = f64::INFINITY;
    for (i, p) in support.iter().enumerate() {
        for q in &support[i + 1..] {
            gap = gap.min(chordal_distance(p, q));
        }
    }
    (0.25 * gap).min(MAX_TUBE_RADIUS)
}

/// Solid tubes around one closed orbit: a disc of the given radius, in the
/// chart of each orbit point, times the circle.
#[derive(Debug, Clone, PartialEq)]
pub struct TubeSpec {
    orbit: ClosedOrbitRecord,
    radius: f64,
}

impl TubeSpec {
    /// Checks that the discs are pairwise disjoint and that no other zero or
    /// pole of `g` lies in or near one.
    pub fn new(orbit: ClosedOrbitRecord, radius: f64, g: &RationalFunction) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidTube("radius must be positive".into()));
        }
        if orbit.points.is_empty() {
            return Err(Error::InvalidTube("orbit has no points".into()));
        }
        let support = g.divisor_support();
        for (i, p) in orbit.points.iter().enumerate() {
            let chart = p.chart();
            for q in &support {
                if chordal_distance(p, q) < PATCH_CLEARANCE {
                    continue;
                }
                if let Some(w) = q.coordinate_in(chart) {
                    if (w - p.value()).norm() < 1.05 * radius {
                        return Err(Error::InvalidTube(format!(
                            "disc around {p} of radius {radius} reaches {q}"
                        )));
                    }
                }
            }
            for q in &orbit.points[i + 1..] {
                if discs_meet(p, q, radius) || discs_meet(q, p, radius) {
                    return Err(Error::InvalidTube(format!("discs around {p} and {q} overlap")));
                }
            }
        }
        Ok(TubeSpec { orbit, radius })
    }

    pub fn orbit(&self) -> &ClosedOrbitRecord {
        &self.orbit
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// The boundary tori, one per orbit point, oriented as boundaries.
    pub fn patches(&self) -> Vec<SurfacePatch> {
        self.orbit
            .points
            .iter()
            .map(|p| SurfacePatch::tube(p, self.radius))
            .collect()
    }
}

/// Whether the disc around `q` reaches into the disc around `p`, tested on
/// the centre and boundary of the former in the chart of the latter.
fn discs_meet(p: &PointCP1, q: &PointCP1, radius: f64) -> bool {
    let boundary = (0..64).map(|k| {
        let w = q.value() + Complex64::from_polar(radius, 2.0 * PI * k as f64 / 64.0);
        PointCP1::in_chart(q.chart(), w)
    });
    core::iter::once(*q).chain(boundary).any(|x| match x.coordinate_in(p.chart()) {
        Some(w) => (w - p.value()).norm() <= 1.05 * radius,
        None => false,
    })
}

/// `coeff e^{2πi(j u + k v)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrigTerm {
    pub j: i32,
    pub k: i32,
    pub coeff: Complex64,
}

/// A finite trigonometric polynomial in `(u, v)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrigSeries {
    pub terms: Vec<TrigTerm>,
}

impl TrigSeries {
    pub fn new(terms: Vec<TrigTerm>) -> Self {
        TrigSeries { terms }
    }

    pub fn constant(c: Complex64) -> Self {
        TrigSeries::new(alloc::vec![TrigTerm { j: 0, k: 0, coeff: c }])
    }

    /// Value and the partial derivatives in `u` and `v`.
    pub fn eval(&self, u: f64, v: f64) -> (Complex64, Complex64, Complex64) {
        let mut value = Complex64::zero();
        let mut du = Complex64::zero();
        let mut dv = Complex64::zero();
        for t in &self.terms {
            let e = t.coeff * Complex64::from_polar(1.0, 2.0 * PI * (t.j as f64 * u + t.k as f64 * v));
            value += e;
            du += e * two_pi_i() * t.j as f64;
            dv += e * two_pi_i() * t.k as f64;
        }
        (value, du, dv)
    }

    fn is_constant(&self) -> bool {
        self.terms.iter().all(|t| (t.j == 0 && t.k == 0) || t.coeff.is_zero())
    }
}

/// A map of the torus `[0,1)^2` into the mapping torus:
/// `z(u, v)` in a chart of the sphere and
/// `s(u, v) = s0 + a u + b v + Re(periodic(u, v))`.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfacePatch {
    pub chart: Chart,
    pub z: TrigSeries,
    pub s0: f64,
    pub s_winding: (i32, i32),
    pub s_periodic: TrigSeries,
}

/// Coordinates and tangent vectors of a patch at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatchPoint {
    pub z: Complex64,
    pub s: f64,
    pub z_u: Complex64,
    pub z_v: Complex64,
    pub s_u: f64,
    pub s_v: f64,
}

impl SurfacePatch {
    /// Boundary of the solid tube `|z - c| <= r` around the vertical line
    /// through `center`: `z = c + r e^{2πiu}`, `s = v`.
    pub fn tube(center: &PointCP1, radius: f64) -> Self {
        SurfacePatch::elliptic_tube(center, radius, radius)
    }

    /// `z = c + a cos 2πu + i b sin 2πu`, `s = v`.
    pub fn elliptic_tube(center: &PointCP1, a: f64, b: f64) -> Self {
        let z = TrigSeries::new(alloc::vec![
            TrigTerm { j: 0, k: 0, coeff: center.value() },
            TrigTerm { j: 1, k: 0, coeff: Complex64::new(0.5 * (a + b), 0.0) },
            TrigTerm { j: -1, k: 0, coeff: Complex64::new(0.5 * (a - b), 0.0) },
        ]);
        SurfacePatch {
            chart: center.chart(),
            z,
            s0: 0.0,
            s_winding: (0, 1),
            s_periodic: TrigSeries::default(),
        }
    }

    /// A torus inside the single leaf `s = s_const`.
    pub fn leaf_torus(chart: Chart, z: TrigSeries, s_const: f64) -> Self {
        SurfacePatch {
            chart,
            z,
            s0: s_const,
            s_winding: (0, 0),
            s_periodic: TrigSeries::default(),
        }
    }

    pub fn eval(&self, u: f64, v: f64) -> PatchPoint {
        let (z, z_u, z_v) = self.z.eval(u, v);
        let (p, p_u, p_v) = self.s_periodic.eval(u, v);
        PatchPoint {
            z,
            s: self.s0 + self.s_winding.0 as f64 * u + self.s_winding.1 as f64 * v + p.re,
            z_u,
            z_v,
            s_u: self.s_winding.0 as f64 + p_u.re,
            s_v: self.s_winding.1 as f64 + p_v.re,
        }
    }

    /// True when `s` is constant, so the patch lies in one leaf.
    pub fn is_leaf_tangent(&self) -> bool {
        self.s_winding == (0, 0) && self.s_periodic.is_constant()
    }

    pub fn point(&self, u: f64, v: f64) -> PointCP1 {
        PointCP1::in_chart(self.chart, self.eval(u, v).z)
    }
}

/// Pullback density of `eta` at a point of the standard chart.
pub fn eta_pullback(
    scenario: &MappingTorusScenario,
    z: Complex64,
    s: f64,
    z_u: Complex64,
    z_v: Complex64,
    s_u: f64,
    s_v: f64,
) -> Result<Complex64> {
    let g = scenario.family().g();
    let at = PatchPoint { z, s, z_u, z_v, s_u, s_v };
    pullback_in_chart(scenario, g, Chart::Standard, &at)
}

fn pullback_in_chart(
    scenario: &MappingTorusScenario,
    chart_fn: &RationalFunction,
    chart: Chart,
    at: &PatchPoint,
) -> Result<Complex64> {
    let jacobian = at.z_u * at.s_v - at.z_v * at.s_u;
    if jacobian.is_zero() {
        return Ok(Complex64::zero());
    }
    let point = PointCP1::in_chart(chart, at.z);
    let distance = scenario.family().g().distance_to_divisor(&point);
    if distance <= POINT_CLEARANCE {
        return Err(Error::TooCloseToDivisor { point, distance });
    }
    let h = scenario.speed().eval(at.s);
    if !(h > TRANSVERSE_FLOOR) {
        return Err(Error::NotTransverseAtPoint { s: at.s, value: h });
    }
    Ok(chart_fn.log_derivative(at.z) * jacobian / h)
}

fn validate_patch(scenario: &MappingTorusScenario, patch: &SurfacePatch) -> Result<()> {
    let g = scenario.family().g();
    let leaf_tangent = patch.is_leaf_tangent();
    for i in 0..PATCH_GRID {
        for j in 0..PATCH_GRID {
            let (u, v) = (i as f64 / PATCH_GRID as f64, j as f64 / PATCH_GRID as f64);
            let at = patch.eval(u, v);
            if !at.z.is_finite() || !at.s.is_finite() {
                return Err(Error::InvalidPatch(format!("non-finite point at (u, v) = ({u}, {v})")));
            }
            if leaf_tangent {
                continue;
            }
            let point = PointCP1::in_chart(patch.chart, at.z);
            let d = g.distance_to_divisor(&point);
            if d <= PATCH_CLEARANCE {
                return Err(Error::InvalidPatch(format!(
                    "patch passes within {d:e} of a zero or pole at {point}"
                )));
            }
            let h = scenario.speed().eval(at.s);
            if !(h > TRANSVERSE_FLOOR) {
                return Err(Error::InvalidPatch(format!("patch leaves the transverse region at s = {}", at.s)));
            }
        }
    }
    Ok(())
}

/// `∫∫ eta` over a patch by the two-dimensional trapezoid rule.
pub fn surface_integral_eta(scenario: &MappingTorusScenario, patch: &SurfacePatch) -> Result<Complex64> {
    validate_patch(scenario, patch)?;
    if patch.is_leaf_tangent() {
        return Ok(Complex64::zero());
    }
    let chart_fn = scenario.family().g().in_chart(patch.chart);
    let q = periodic_mean_2d(
        |u, v| pullback_in_chart(scenario, &chart_fn, patch.chart, &patch.eval(u, v)),
        SURFACE_START,
        SURFACE_MAX_PER_AXIS,
        SURFACE_TOL,
    )?;
    Ok(q.value)
}

/// `∫∫ eta` over the tube boundary in factorized form:
/// `Σ_j T1 ∮_{C_j} (g'/g) dz`.
pub fn tube_boundary_integral(scenario: &MappingTorusScenario, tube: &TubeSpec) -> Result<Complex64> {
    let t1 = base_return_time(scenario.speed())?;
    let g = scenario.family().g();
    let mut total = Complex64::zero();
    for p in &tube.orbit.points {
        let chart_fn = g.in_chart(p.chart());
        let q = circle_log_integral(&chart_fn, p.value(), tube.radius)?;
        total += two_pi_i() * q.value * t1;
    }
    Ok(total)
}

/// Number of times the closed loop `t -> z(t)` winds around `w`.
fn loop_winding<F: Fn(f64) -> Complex64>(z: F, w: Complex64) -> i64 {
    let mut turns = 0.0;
    let mut prev = z(0.0) - w;
    for k in 1..=LOOP_SAMPLES {
        let next = z(k as f64 / LOOP_SAMPLES as f64) - w;
        turns += (next / prev).arg();
        prev = next;
    }
    (turns / (2.0 * PI)).round() as i64
}

/// `|∫∫ eta|` over a patch that bounds a region free of zeros and poles.
pub fn stokes_residual(scenario: &MappingTorusScenario, patch: &SurfacePatch) -> Result<f64> {
    if !patch.is_leaf_tangent() {
        let (a, b) = patch.s_winding;
        let support = scenario.family().g().divisor_support();
        for d in &support {
            let Some(w) = d.coordinate_in(patch.chart) else {
                continue;
            };
            let around = match (a, b) {
                (0, 0) => 0,
                (0, _) => loop_winding(|t| patch.eval(t, 0.0).z, w),
                (_, 0) => loop_winding(|t| patch.eval(0.0, t).z, w),
                _ => {
                    return Err(Error::InvalidPatch(
                        "stokes check needs the s-winding along a single axis".into(),
                    ))
                }
            };
            if around != 0 {
                return Err(Error::InvalidPatch(format!("patch encloses the orbit through {d}")));
            }
        }
    }
    Ok(surface_integral_eta(scenario, patch)?.norm())
}

/// How a singular orbit enters the balance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// `l · ord` from the argument principle.
    A,
    /// `(1/2πi) ∫∫ eta` over the tube boundary by surface quadrature.
    B,
}

/// Half-thickness of the slabs around compact leaves.
const LEAF_OFFSET: f64 = 0.05;

/// The two leaf tori bounding a slab around a compact leaf, with opposite
/// orientations.
pub fn leaf_boundary_patches(leaf: &CompactLeafRecord) -> [SurfacePatch; 2] {
    let z = |swap: bool| {
        let (a, b) = if swap { (0, 1) } else { (1, 0) };
        TrigSeries::new(alloc::vec![
            TrigTerm { j: a, k: b, coeff: Complex64::new(0.5, 0.0) },
            TrigTerm { j: b, k: a, coeff: Complex64::new(0.25, 0.0) },
        ])
    };
    [
        SurfacePatch::leaf_torus(Chart::Standard, z(false), leaf.s_star + LEAF_OFFSET),
        SurfacePatch::leaf_torus(Chart::Standard, z(true), leaf.s_star - LEAF_OFFSET),
    ]
}

/// `|Σ_A l ord + Σ_B (1/2πi) ∫∫_{tube} eta + Σ_leaves (1/2πi) ∫∫_{∂slab} eta|`.
/// `partition` assigns a method to each orbit of [`find_singular_orbits`] in
/// order.
pub fn prop2_balance(scenario: &MappingTorusScenario, partition: &[Method]) -> Result<f64> {
    let orbits = find_singular_orbits(scenario)?;
    if partition.len() != orbits.len() {
        return Err(Error::InvalidArgument(format!(
            "partition has {} entries for {} orbits",
            partition.len(),
            orbits.len()
        )));
    }
    let g = scenario.family().g();
    let radius = default_tube_radius(&g.divisor_support());
    let mut total = Complex64::zero();
    for (orbit, method) in orbits.iter().zip(partition) {
        match method {
            Method::A => total += orbit.length_l * orbit.order as f64,
            Method::B => {
                let tube = TubeSpec::new(orbit.clone(), radius, g)?;
                for patch in tube.patches() {
                    total += surface_integral_eta(scenario, &patch)? / two_pi_i();
                }
            }
        }
    }
    for leaf in scenario.speed_class().compact_leaves() {
        for patch in leaf_boundary_patches(leaf) {
            total += surface_integral_eta(scenario, &patch)? / two_pi_i();
        }
    }
    Ok(total.norm())
}

/// A patch bounding a region free of zeros and poles, placed as far from
/// them as the sampled candidates allow. On transverse scenarios it is a
/// tube; with compact leaves its `s` oscillates inside the widest
/// transverse band.
pub fn divisor_free_patch(scenario: &MappingTorusScenario) -> SurfacePatch {
    let support = scenario.family().g().divisor_support();
    let mut best = (PointCP1::real(0.0), f64::INFINITY);
    if !support.is_empty() {
        best.1 = -1.0;
        let candidates = (0..64)
            .map(|k| PointCP1::finite(crate::sampling::plane_point(k)))
            .chain([PointCP1::real(0.0), PointCP1::INFINITY]);
        for c in candidates {
            let d = support
                .iter()
                .map(|p| chordal_distance(p, &c))
                .fold(f64::INFINITY, f64::min);
            if d > best.1 {
                best = (c, d);
            }
        }
    }
    let radius = (0.25 * best.1).min(0.25);
    let leaves = scenario.speed_class().compact_leaves();
    if leaves.is_empty() {
        return SurfacePatch::tube(&best.0, radius);
    }
    let mut stars: Vec<f64> = leaves.iter().map(|l| { let s = l.s_star % 1.0; if s < 0.0 { s + 1.0 } else { s } }).collect();
    stars.sort_by(f64::total_cmp);
    let (mut lo, mut width) = (0.0, -1.0);
    for (i, &s) in stars.iter().enumerate() {
        let next = if i + 1 < stars.len() { stars[i + 1] } else { stars[0] + 1.0 };
        if next - s > width {
            lo = s;
            width = next - s;
        }
    }
    let mut patch = SurfacePatch::tube(&best.0, radius);
    patch.s0 = lo + 0.5 * width;
    patch.s_winding = (0, 0);
    patch.s_periodic = TrigSeries::new(alloc::vec![
        TrigTerm { j: 0, k: 1, coeff: Complex64::new(0.125 * width, 0.0) },
        TrigTerm { j: 0, k: -1, coeff: Complex64::new(0.125 * width, 0.0) },
    ]);
    patch
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fibered::SpeedProfile;
    use crate::scenario::ScenarioSpec;
    use crate::sphere::MoebiusMap;
    use alloc::vec;

    fn r(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn identity_z(h: SpeedProfile) -> MappingTorusScenario {
        let g = RationalFunction::polynomial(vec![r(0.0), r(1.0)]).unwrap();
        ScenarioSpec::new(MoebiusMap::identity(), h, g).build().unwrap()
    }

    fn iz_quartic() -> MappingTorusScenario {
        let g = RationalFunction::new(
            vec![r(0.0), r(0.0), r(0.0), r(0.0), r(1.0)],
            vec![r(1.0), r(0.0), r(0.0), r(0.0), r(1.0)],
        )
        .unwrap();
        let phi = MoebiusMap::scaling(Complex64::new(0.0, 1.0)).unwrap();
        ScenarioSpec::new(phi, SpeedProfile::shifted_sine(1.0, 0.5), g).build().unwrap()
    }

    #[test]
    fn pullback_examples() {
        let sc = identity_z(SpeedProfile::constant(1.0));
        let v = eta_pullback(&sc, r(2.0), 0.0, r(1.0), r(0.0), 0.0, 1.0).unwrap();
        assert!((v - r(0.5)).norm() < 1e-15);
        let v = eta_pullback(&sc, r(2.0), 0.0, r(1.0), r(0.0), 1.0, 0.0).unwrap();
        assert_eq!(v, Complex64::zero());

        let sc = identity_z(SpeedProfile::shifted_sine(1.0, 0.5));
        let v = eta_pullback(&sc, r(2.0), 0.25, r(1.0), r(0.0), 0.0, 1.0).unwrap();
        assert!((v - r(1.0 / 3.0)).norm() < 1e-15);
    }

    #[test]
    fn pullback_refuses_divisor() {
        let sc = identity_z(SpeedProfile::constant(1.0));
        let err = eta_pullback(&sc, r(0.0), 0.0, r(1.0), r(0.0), 0.0, 1.0).unwrap_err();
        assert_eq!(err.code(), "TooCloseToDivisor");
    }

    #[test]
    fn tube_integral_of_identity() {
        let sc = identity_z(SpeedProfile::constant(1.0));
        let orbits = find_singular_orbits(&sc).unwrap();
        let zero = orbits.iter().find(|o| o.order == 1).unwrap().clone();
        let tube = TubeSpec::new(zero, 0.3, sc.family().g()).unwrap();
        let v = tube_boundary_integral(&sc, &tube).unwrap();
        assert!((v - two_pi_i()).norm() < 1e-10);
        let w = surface_integral_eta(&sc, &tube.patches()[0]).unwrap();
        assert!((w - two_pi_i()).norm() < 1e-9);
    }

    #[test]
    fn quartic_tube_integrals() {
        let sc = iz_quartic();
        let t1 = 2.0 / 3f64.sqrt();
        let radius = default_tube_radius(&sc.family().g().divisor_support());
        for orbit in find_singular_orbits(&sc).unwrap() {
            let want = two_pi_i() * orbit.length_l * orbit.order as f64;
            assert!((orbit.length_l - orbit.period_n as f64 * t1).abs() < 1e-10);
            let tube = TubeSpec::new(orbit, radius, sc.family().g()).unwrap();
            let got = tube_boundary_integral(&sc, &tube).unwrap();
            assert!((got / want - 1.0).norm() < 1e-8);
        }
    }

    #[test]
    fn divisor_free_tube_vanishes() {
        let sc = iz_quartic();
        let patch = SurfacePatch::tube(&PointCP1::real(5.0), 0.2);
        assert!(stokes_residual(&sc, &patch).unwrap() < 1e-9);
        let auto = divisor_free_patch(&sc);
        assert!(stokes_residual(&sc, &auto).unwrap() < 1e-9);
    }

    #[test]
    fn enclosing_patch_is_refused_by_stokes() {
        let sc = iz_quartic();
        let patch = SurfacePatch::tube(&PointCP1::real(0.0), 0.3);
        assert_eq!(stokes_residual(&sc, &patch).unwrap_err().code(), "InvalidPatch");
    }

    #[test]
    fn mixed_balance() {
        let sc = iz_quartic();
        assert!(prop2_balance(&sc, &[Method::A, Method::B]).unwrap() < 1e-7);
        assert!(prop2_balance(&sc, &[Method::B, Method::A]).unwrap() < 1e-7);
    }

    #[test]
    fn compact_leaf_balance() {
        let g = RationalFunction::constant(r(1.0)).unwrap();
        let h = SpeedProfile::new(0.5, vec![crate::fibered::FourierTerm { k: 1, cos_coeff: -0.5, sin_coeff: 0.0 }])
            .unwrap();
        let sc = ScenarioSpec::new(MoebiusMap::identity(), h, g).build().unwrap();
        assert!(prop2_balance(&sc, &[]).unwrap() < 1e-12);
        let patch = divisor_free_patch(&sc);
        assert!(stokes_residual(&sc, &patch).unwrap() < 1e-9);
    }
}
