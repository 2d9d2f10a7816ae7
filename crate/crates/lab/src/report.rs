//! The JSON verification report.

use foliated_core::orbits::ClosedOrbitRecord;
use foliated_core::sphere::PointCP1;
use foliated_core::verifier::VerificationReport;
use serde::{Deserialize, Serialize};

use crate::scenario_file::{pair, ComplexDoc};

pub const REPORT_VERSION: u32 = 1;

/// A sphere point in the standard chart, or the point at infinity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "chart", rename_all = "lowercase")]
pub enum PointDoc {
    Standard { z: ComplexDoc },
    Infinity,
}

impl From<&PointCP1> for PointDoc {
    fn from(p: &PointCP1) -> Self {
        match p.to_complex() {
            Some(z) => PointDoc::Standard { z: pair(z) },
            None => PointDoc::Infinity,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitDoc {
    pub period_n: usize,
    pub length_l: f64,
    pub order: i64,
    pub points: Vec<PointDoc>,
}

impl From<&ClosedOrbitRecord> for OrbitDoc {
    fn from(o: &ClosedOrbitRecord) -> Self {
        OrbitDoc {
            period_n: o.period_n,
            length_l: o.length_l,
            order: o.order,
            points: o.points.iter().map(PointDoc::from).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TubeCheckDoc {
    pub orbit: usize,
    pub relative_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticDoc {
    pub code: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDoc {
    pub version: u32,
    pub scenario_digest: String,
    pub passed: bool,
    pub orbits: Vec<OrbitDoc>,
    pub sum_l_ord: f64,
    pub residual: f64,
    pub residual_threshold: f64,
    pub constancy_ok: bool,
    pub constancy_profiles: Vec<Vec<i64>>,
    pub tube_checks: Vec<TubeCheckDoc>,
    pub stokes_checks: Vec<f64>,
    pub prop2_residual: Option<f64>,
    pub failure: Option<DiagnosticDoc>,
}

impl ReportDoc {
    pub fn new(report: &VerificationReport, scenario_digest: &str) -> Self {
        ReportDoc {
            version: REPORT_VERSION,
            scenario_digest: scenario_digest.to_owned(),
            passed: report.passed,
            orbits: report.orbits.iter().map(OrbitDoc::from).collect(),
            sum_l_ord: report.sum_l_ord,
            residual: report.residual,
            residual_threshold: report.residual_threshold,
            constancy_ok: report.constancy_ok,
            constancy_profiles: report.constancy_profiles.clone(),
            tube_checks: report
                .tube_checks
                .iter()
                .map(|t| TubeCheckDoc {
                    orbit: t.orbit,
                    relative_error: t.relative_error,
                })
                .collect(),
            stokes_checks: report.stokes_checks.clone(),
            prop2_residual: report.prop2_residual,
            failure: report.failure.as_ref().map(|d| DiagnosticDoc {
                code: d.code.clone(),
                message: d.message.clone(),
            }),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }
}

/// Plain-text summary printed by `verify`.
pub fn human_summary(report: &VerificationReport) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    if let Some(d) = &report.failure {
        let _ = writeln!(out, "{}", d.message);
    }
    let _ = writeln!(out, "closed orbits: {}", report.orbits.len());
    for (i, o) in report.orbits.iter().enumerate() {
        let _ = writeln!(
            out,
            "  gamma{:<3} n = {:<3} l = {:<18.12} ord = {:+}  base point {}",
            i + 1,
            o.period_n,
            o.length_l,
            o.order,
            o.base_point()
        );
    }
    let _ = writeln!(out, "sum l*ord  = {:+.6e}", report.sum_l_ord);
    let _ = writeln!(out, "residual   = {:.3e} (threshold {:.1e})", report.residual, report.residual_threshold);
    let _ = writeln!(out, "constancy  = {}", if report.constancy_ok { "ok" } else { "FAILED" });
    let worst_tube = report.tube_checks.iter().map(|t| t.relative_error).fold(0.0, f64::max);
    let _ = writeln!(out, "tubes      = max relative error {worst_tube:.3e}");
    let worst_stokes = report.stokes_checks.iter().copied().fold(0.0, f64::max);
    let _ = writeln!(out, "stokes     = max residual {worst_stokes:.3e}");
    if let Some(r) = report.prop2_residual {
        let _ = writeln!(out, "balance    = {r:.3e}");
    }
    let _ = writeln!(out, "{}", if report.passed { "PASSED" } else { "FAILED" });
    out
}
