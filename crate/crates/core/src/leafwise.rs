//! Leafwise meromorphic functions on the mapping torus of `phi`, realized as
//! families `f(z, s) = q(s) mu^s g(z)`.
//!
//! The family descends to the mapping torus exactly when
//! `f(z, s + 1) = f(phi(z), s)`, i.e. when `g ∘ phi = mu g`. The factor
//! `q(s) = exp(Σ c_k e^{2πiks})` is 1-periodic and never vanishes, so zeros
//! and poles sit at `s`-independent positions.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::{rat_eval, RationalFunction};
use crate::sampling;
use crate::sphere::{chordal_distance, MoebiusMap, PointCP1};

/// Points closer than this (chordal) to a zero or pole are rejected by the
/// log-derivative.
pub const DIVISOR_CLEARANCE: f64 = 1e-7;
/// Allowed gluing defect `f(z, s+1)` vs `f(phi z, s)`.
pub const GLUING_TOL: f64 = 1e-9;

/// One mode `coeff e^{2πiks}` in the exponent of the twist `q(s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwistTerm {
    pub k: u32,
    pub coeff: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivariantFamily {
    g: RationalFunction,
    mu: Complex64,
    log_mu: Complex64,
    twist: Vec<TwistTerm>,
}

impl EquivariantFamily {
    /// The branch of `log mu` is the principal one, fixed here.
    pub fn new(g: RationalFunction, mu: Complex64, twist: Vec<TwistTerm>) -> Result<Self> {
        if g.is_zero() {
            return Err(Error::ZeroPolynomial("numerator"));
        }
        if mu.is_zero() || !mu.is_finite() {
            return Err(Error::InvalidArgument("multiplier must be finite and nonzero".into()));
        }
        if twist.iter().any(|t| t.k == 0 || !t.coeff.is_finite()) {
            return Err(Error::InvalidArgument("twist modes need k >= 1 and finite coefficients".into()));
        }
        Ok(EquivariantFamily {
            g,
            mu,
            log_mu: mu.ln(),
            twist,
        })
    }

    pub fn g(&self) -> &RationalFunction {
        &self.g
    }

    pub fn mu(&self) -> Complex64 {
        self.mu
    }

    pub fn twist(&self) -> &[TwistTerm] {
        &self.twist
    }

    /// The leafwise-constant factor `q(s) mu^s`.
    pub fn leaf_factor(&self, s: f64) -> Complex64 {
        let exponent: Complex64 = self
            .twist
            .iter()
            .map(|t| t.coeff * Complex64::from_polar(1.0, 2.0 * PI * t.k as f64 * s))
            .sum();
        (exponent + self.log_mu * s).exp()
    }

    /// `f(., s)` as a rational function on the leaf.
    pub fn leaf_function(&self, s: f64) -> RationalFunction {
        self.g.scaled(self.leaf_factor(s))
    }

    pub fn eval(&self, z: &PointCP1, s: f64) -> PointCP1 {
        family_eval(self, z, s)
    }
}

pub fn family_eval(family: &EquivariantFamily, z: &PointCP1, s: f64) -> PointCP1 {
    let value = rat_eval(&family.g, z);
    let (p, q) = value.homogeneous();
    PointCP1::from_homogeneous(p * family.leaf_factor(s), q)
}

/// Largest chordal gluing defect `d(f(z, s+1), f(phi z, s))` over `samples`
/// deterministic sample points.
pub fn equivariance_residual(family: &EquivariantFamily, phi: &MoebiusMap, samples: usize) -> Result<f64> {
    if samples < 16 {
        return Err(Error::InvalidArgument("equivariance_residual needs at least 16 samples".into()));
    }
    let mut worst: f64 = 0.0;
    for k in 0..samples {
        let z = PointCP1::finite(sampling::plane_point(k));
        let s = sampling::leaf_parameter(k);
        let lhs = family_eval(family, &z, s + 1.0);
        let rhs = family_eval(family, &phi.apply(&z), s);
        worst = worst.max(chordal_distance(&lhs, &rhs));
    }
    Ok(worst)
}

/// `(d_F f / f)(z, s) = g'(z)/g(z)`. Evaluated through the full leaf
/// function on three leaves, which must agree since the leafwise-constant
/// factor cancels.
pub fn leafwise_log_derivative(family: &EquivariantFamily, z: Complex64, s: f64) -> Result<Complex64> {
    let point = PointCP1::finite(z);
    let distance = family.g.distance_to_divisor(&point);
    if distance <= DIVISOR_CLEARANCE {
        return Err(Error::TooCloseToDivisor { point, distance });
    }
    let values: Vec<Complex64> = [s, s + 1.0 / 3.0, s + 2.0 / 3.0]
        .iter()
        .map(|&t| family.leaf_function(t).log_derivative(z))
        .collect();
    let scale = values[0].norm().max(1.0);
    if values.iter().any(|v| (v - values[0]).norm() > 1e-12 * scale) {
        return Err(Error::InvalidArgument(
            "leafwise log-derivative depends on the leaf".into(),
        ));
    }
    Ok(values[0])
}
