//! The mapping torus of a Moebius map with its suspension flow, sped up or
//! slowed down by a leafwise-constant speed profile `h(s)`.
//!
//! Leaves are the fibers `s = const`. The flow moves in the `+s` direction
//! with `ds/dt = h(s)`, so a point on a periodic orbit of combinatorial period
//! `n` returns after time `n * T1` with `T1 = ∫_0^1 ds / h(s)`. Zeros of `h`
//! are compact leaves on which the flow is not transverse.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::quadrature::periodic_mean;

/// Grid used to scan `h` for zeros and negative values.
pub const SPEED_GRID: usize = 4096;
/// Values above this on the grid certify transversality.
pub const TRANSVERSE_FLOOR: f64 = 1e-9;
/// A refined minimum below this is a zero of `h`.
pub const ZERO_VALUE: f64 = 1e-10;
/// Location accuracy of refined zeros.
pub const ZERO_LOCATION_TOL: f64 = 1e-12;
pub const RETURN_TIME_TOL: f64 = 1e-10;
pub const RETURN_TIME_MAX_NODES: usize = 1 << 16;

/// One Fourier mode `cos_coeff cos 2πks + sin_coeff sin 2πks`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierTerm {
    pub k: u32,
    pub cos_coeff: f64,
    pub sin_coeff: f64,
}

/// `h(s) = a0 + Σ (c_k cos 2πks + s_k sin 2πks)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeedProfile {
    pub a0: f64,
    pub terms: Vec<FourierTerm>,
}

impl SpeedProfile {
    pub fn constant(a0: f64) -> Self {
        SpeedProfile {
            a0,
            terms: Vec::new(),
        }
    }

    pub fn new(a0: f64, terms: Vec<FourierTerm>) -> Result<Self> {
        if !a0.is_finite()
            || terms
                .iter()
                .any(|t| t.k == 0 || !t.cos_coeff.is_finite() || !t.sin_coeff.is_finite())
        {
            return Err(Error::InvalidArgument(
                "speed profile needs finite coefficients and modes k >= 1".into(),
            ));
        }
        Ok(SpeedProfile { a0, terms })
    }

    /// `a0 + a sin 2πs`.
    pub fn shifted_sine(a0: f64, a: f64) -> Self {
        SpeedProfile {
            a0,
            terms: alloc::vec![FourierTerm {
                k: 1,
                cos_coeff: 0.0,
                sin_coeff: a,
            }],
        }
    }

    pub fn eval(&self, s: f64) -> f64 {
        speed_eval(self, s)
    }

    /// `h'(s)`.
    pub fn derivative(&self, s: f64) -> f64 {
        let s = s - s.floor();
        self.terms
            .iter()
            .map(|t| {
                let w = 2.0 * PI * t.k as f64;
                let (sn, cs) = (w * s).sin_cos();
                w * (t.sin_coeff * cs - t.cos_coeff * sn)
            })
            .sum()
    }

    /// `c * h`.
    pub fn scaled(&self, c: f64) -> SpeedProfile {
        SpeedProfile {
            a0: self.a0 * c,
            terms: self
                .terms
                .iter()
                .map(|t| FourierTerm {
                    k: t.k,
                    cos_coeff: t.cos_coeff * c,
                    sin_coeff: t.sin_coeff * c,
                })
                .collect(),
        }
    }
}

pub fn speed_eval(h: &SpeedProfile, s: f64) -> f64 {
    let s = s - s.floor();
    h.terms.iter().fold(h.a0, |acc, t| {
        let (sn, cs) = (2.0 * PI * t.k as f64 * s).sin_cos();
        acc + t.cos_coeff * cs + t.sin_coeff * sn
    })
}

/// A zero of `h`: the leaf `s = s_star` is compact and fixed by the flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompactLeafRecord {
    pub s_star: f64,
    /// Estimated local vanishing order of `h`; always even.
    pub zero_order: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpeedClass {
    Transverse,
    CompactLeaves(Vec<CompactLeafRecord>),
}

impl SpeedClass {
    pub fn is_transverse(&self) -> bool {
        matches!(self, SpeedClass::Transverse)
    }

    pub fn compact_leaves(&self) -> &[CompactLeafRecord] {
        match self {
            SpeedClass::Transverse => &[],
            SpeedClass::CompactLeaves(l) => l,
        }
    }
}

/// Minimizer of `h` on `[lo, hi]`: bisection on the sign of `h'` when it
/// changes sign across the bracket, golden-section search otherwise.
fn refine_minimum(h: &SpeedProfile, mut lo: f64, mut hi: f64) -> f64 {
    if h.derivative(lo) < 0.0 && h.derivative(hi) > 0.0 {
        while hi - lo > ZERO_LOCATION_TOL {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if h.derivative(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    }
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let mut f1 = h.eval(x1);
    let mut f2 = h.eval(x2);
    while hi - lo > ZERO_LOCATION_TOL {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = h.eval(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = h.eval(x2);
        }
    }
    0.5 * (lo + hi)
}

fn estimate_zero_order(h: &SpeedProfile, s: f64) -> u32 {
    let delta = 1e-3;
    let near = h.eval(s + delta).abs().max(h.eval(s - delta).abs());
    let far = h.eval(s + 2.0 * delta).abs().max(h.eval(s - 2.0 * delta).abs());
    if near <= 0.0 || far <= 0.0 {
        return 2;
    }
    ((far / near).ln() / 2f64.ln()).round().max(1.0) as u32
}

/// Classifies the profile as transverse or lists its zeros (compact leaves).
///
/// Values below `-1e-9` anywhere are rejected: the flow must move forward.
/// Zeros of odd order therefore show up as negative speed.
pub fn transversality_check(h: &SpeedProfile) -> Result<SpeedClass> {
    let grid: Vec<f64> = (0..SPEED_GRID)
        .map(|i| h.eval(i as f64 / SPEED_GRID as f64))
        .collect();
    if let Some((i, v)) = grid
        .iter()
        .enumerate()
        .find(|(_, v)| **v < -TRANSVERSE_FLOOR)
    {
        return Err(Error::NegativeSpeed {
            s: i as f64 / SPEED_GRID as f64,
            value: *v,
        });
    }
    let step = 1.0 / SPEED_GRID as f64;
    let mut zeros: Vec<CompactLeafRecord> = Vec::new();
    for i in 0..SPEED_GRID {
        let prev = grid[(i + SPEED_GRID - 1) % SPEED_GRID];
        let next = grid[(i + 1) % SPEED_GRID];
        let here = grid[i];
        // Local minima that are not obviously bounded away from zero.
        if !(here < prev && here <= next) || here > 1e-3 {
            continue;
        }
        let s0 = i as f64 * step;
        let s = refine_minimum(h, s0 - step, s0 + step);
        let value = h.eval(s);
        if value < -TRANSVERSE_FLOOR {
            return Err(Error::NegativeSpeed { s, value });
        }
        if value < ZERO_VALUE {
            let s = s - s.floor();
            let s = if s >= 1.0 { 0.0 } else { s };
            let dup = zeros.iter().any(|z| {
                let d = (z.s_star - s).abs();
                d.min(1.0 - d) < 2.0 * step
            });
            if !dup {
                zeros.push(CompactLeafRecord {
                    s_star: s,
                    zero_order: estimate_zero_order(h, s),
                });
            }
        }
    }
    if zeros.len() > SPEED_GRID / 4 {
        return Err(Error::InvalidArgument("speed profile vanishes on an interval".into()));
    }
    for z in &zeros {
        // The flow may not cross the compact leaf.
        for d in [1e-4, -1e-4, 1e-3, -1e-3] {
            let v = h.eval(z.s_star + d);
            if v <= 0.0 {
                return Err(Error::NegativeSpeed {
                    s: z.s_star + d,
                    value: v,
                });
            }
        }
        if z.zero_order % 2 == 1 {
            return Err(Error::NegativeSpeed {
                s: z.s_star,
                value: 0.0,
            });
        }
    }
    zeros.sort_by(|a, b| a.s_star.total_cmp(&b.s_star));
    if zeros.is_empty() {
        Ok(SpeedClass::Transverse)
    } else {
        Ok(SpeedClass::CompactLeaves(zeros))
    }
}

fn require_transverse(h: &SpeedProfile) -> Result<()> {
    match transversality_check(h)? {
        SpeedClass::Transverse => Ok(()),
        SpeedClass::CompactLeaves(z) => Err(Error::NotTransverse { zeros: z.len() }),
    }
}

/// Return time `T1 = ∫_0^1 ds / h(s)` of a period-one orbit.
pub fn base_return_time(h: &SpeedProfile) -> Result<f64> {
    require_transverse(h)?;
    base_return_time_unchecked(h)
}

pub(crate) fn base_return_time_unchecked(h: &SpeedProfile) -> Result<f64> {
    let q = periodic_mean(
        |s| Ok(Complex64::new(1.0 / h.eval(s), 0.0)),
        16,
        RETURN_TIME_MAX_NODES,
        RETURN_TIME_TOL,
    )?;
    Ok(q.value.re)
}

fn rk4_step(h: &SpeedProfile, s: f64, dt: f64) -> f64 {
    let k1 = h.eval(s);
    let k2 = h.eval(s + 0.5 * dt * k1);
    let k3 = h.eval(s + 0.5 * dt * k2);
    let k4 = h.eval(s + dt * k3);
    s + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Time for the flow `ds/dt = h(s)` started at `s = 0` to advance by `n`,
/// integrated with the classical fourth-order Runge–Kutta method.
pub fn flow_return_time_ode(h: &SpeedProfile, n: u32, step: f64) -> Result<f64> {
    if n == 0 || !(step > 0.0) || step > 1e-3 {
        return Err(Error::InvalidArgument(
            "flow_return_time_ode needs n >= 1 and 0 < step <= 1e-3".into(),
        ));
    }
    require_transverse(h)?;
    let target = n as f64;
    let mut s = 0.0;
    let mut t = 0.0;
    loop {
        let next = rk4_step(h, s, step);
        if next >= target {
            // Bisect the length of the final step.
            let (mut lo, mut hi) = (0.0, step);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if rk4_step(h, s, mid) < target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok(t + 0.5 * (lo + hi));
        }
        s = next;
        t += step;
    }
}
