//! Deterministic low-discrepancy sample points, so that every validation in
//! this crate is reproducible bit for bit.

use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Float;

// Additive recurrence constants of the two-dimensional R2 sequence.
const R2_A1: f64 = 0.754_877_666_246_692_7;
const R2_A2: f64 = 0.569_840_290_998_053_3;

fn frac(x: f64) -> f64 {
    x - x.floor()
}

/// The `k`-th point of a spiral covering the annulus `0.15 <= |z| <= 1.85`,
/// which straddles the unit circle.
pub fn plane_point(k: usize) -> Complex64 {
    let t = frac(0.5 + R2_A1 * (k + 1) as f64);
    let u = frac(0.5 + R2_A2 * (k + 1) as f64);
    Complex64::from_polar(0.15 + 1.7 * t, 2.0 * PI * u + 0.1)
}

/// The `k`-th leaf parameter in `[0, 1)`.
pub fn leaf_parameter(k: usize) -> f64 {
    frac(0.5 + 0.618_033_988_749_894_9 * (k + 1) as f64)
}
