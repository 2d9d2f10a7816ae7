//! Full verification of a scenario: orbits, the length-weighted order sum,
//! order constancy, tube integrals, a Stokes check and the balance with
//! compact-leaf boundary terms.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::eta::{
    default_tube_radius, divisor_free_patch, prop2_balance, stokes_residual, tube_boundary_integral,
    Method, TubeSpec,
};
use crate::orbits::{find_singular_orbits, ClosedOrbitRecord};
use crate::scenario::MappingTorusScenario;
use crate::winding::order_constancy_profile;

/// Leaves sampled per orbit by the constancy check.
pub const CONSTANCY_SAMPLES: usize = 8;
pub const TUBE_TOL: f64 = 1e-8;
pub const BALANCE_TOL: f64 = 1e-7;
/// Below this total `Σ |l ord|` the residual threshold is absolute.
const ABSOLUTE_SCALE: f64 = 10.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub code: String,
    pub message: String,
}

impl From<&Error> for Diagnostic {
    fn from(e: &Error) -> Self {
        Diagnostic {
            code: e.code().to_string(),
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TubeCheck {
    pub orbit: usize,
    pub relative_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub orbits: Vec<ClosedOrbitRecord>,
    /// Signed `Σ l ord` in orbit order.
    pub sum_l_ord: f64,
    pub residual: f64,
    /// Threshold the residual was held to.
    pub residual_threshold: f64,
    pub constancy_ok: bool,
    pub constancy_profiles: Vec<Vec<i64>>,
    pub tube_checks: Vec<TubeCheck>,
    pub stokes_checks: Vec<f64>,
    pub prop2_residual: Option<f64>,
    pub passed: bool,
    /// Set when verification could not run to completion.
    pub failure: Option<Diagnostic>,
}

impl VerificationReport {
    fn failed(e: &Error) -> Self {
        VerificationReport {
            orbits: Vec::new(),
            sum_l_ord: 0.0,
            residual: 0.0,
            residual_threshold: 0.0,
            constancy_ok: false,
            constancy_profiles: Vec::new(),
            tube_checks: Vec::new(),
            stokes_checks: Vec::new(),
            prop2_residual: None,
            passed: false,
            failure: Some(Diagnostic::from(e)),
        }
    }

    /// Largest `|l ord|` over the orbits.
    pub fn max_term(&self) -> f64 {
        self.orbits
            .iter()
            .map(|o| (o.length_l * o.order as f64).abs())
            .fold(0.0, f64::max)
    }

    fn settle(&mut self, stokes_tol: f64) {
        self.passed = self.failure.is_none()
            && self.residual < self.residual_threshold
            && self.constancy_ok
            && self.tube_checks.iter().all(|t| t.relative_error < TUBE_TOL)
            && self.stokes_checks.iter().all(|s| *s < stokes_tol)
            && self.prop2_residual.is_none_or(|r| r < BALANCE_TOL);
    }
}

/// Orbits, `Σ l ord`, constancy, tube and Stokes checks. Errors become a
/// failed report carrying their diagnostic.
pub fn verify_product_formula(scenario: &MappingTorusScenario) -> VerificationReport {
    match product_formula_checks(scenario) {
        Ok(mut report) => {
            report.settle(scenario.tolerances().residual);
            report
        }
        Err(e) => VerificationReport::failed(&e),
    }
}

/// [`verify_product_formula`] plus the balance with the given partition
/// (all orbits by method A when `None`).
pub fn verify_all(scenario: &MappingTorusScenario, partition: Option<&[Method]>) -> VerificationReport {
    let mut report = match product_formula_checks(scenario) {
        Ok(r) => r,
        Err(e) => return VerificationReport::failed(&e),
    };
    let default_partition;
    let partition = match partition {
        Some(p) => p,
        None => {
            default_partition = vec![Method::A; report.orbits.len()];
            &default_partition
        }
    };
    match prop2_balance(scenario, partition) {
        Ok(r) => report.prop2_residual = Some(r),
        Err(e) => report.failure = Some(Diagnostic::from(&e)),
    }
    report.settle(scenario.tolerances().residual);
    report
}

fn product_formula_checks(scenario: &MappingTorusScenario) -> Result<VerificationReport> {
    let orbits = find_singular_orbits(scenario)?;
    let mut sum = 0.0;
    let mut scale = 0.0;
    for o in &orbits {
        let term = o.length_l * o.order as f64;
        sum += term;
        scale += term.abs();
    }
    let tol = scenario.tolerances().residual;
    let residual_threshold = if scale <= ABSOLUTE_SCALE { tol } else { tol * scale };

    let mut constancy_ok = true;
    let mut constancy_profiles = Vec::with_capacity(orbits.len());
    for o in &orbits {
        let profile = order_constancy_profile(scenario, o, CONSTANCY_SAMPLES)?;
        constancy_ok &= profile.iter().all(|&k| k == o.order);
        constancy_profiles.push(profile);
    }

    let g = scenario.family().g();
    let radius = default_tube_radius(&g.divisor_support());
    let mut tube_checks = Vec::with_capacity(orbits.len());
    for (i, o) in orbits.iter().enumerate() {
        let tube = TubeSpec::new(o.clone(), radius, g)?;
        let got = tube_boundary_integral(scenario, &tube)?;
        let want = Complex64::new(0.0, 2.0 * PI) * o.length_l * o.order as f64;
        tube_checks.push(TubeCheck {
            orbit: i,
            relative_error: (got / want - 1.0).norm(),
        });
    }

    let stokes = stokes_residual(scenario, &divisor_free_patch(scenario))?;

    Ok(VerificationReport {
        orbits,
        sum_l_ord: sum,
        residual: sum.abs(),
        residual_threshold,
        constancy_ok,
        constancy_profiles,
        tube_checks,
        stokes_checks: vec![stokes],
        prop2_residual: None,
        passed: false,
        failure: None,
    })
}
