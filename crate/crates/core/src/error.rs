use alloc::string::String;

use crate::sphere::PointCP1;

/// Failure modes of the numerical and arithmetic operations in this crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("degenerate Moebius map: |ad - bc| = {det_abs:e}")]
    DegenerateMap { det_abs: f64 },
    #[error("zero polynomial in {0}")]
    ZeroPolynomial(&'static str),
    #[error("degree {degree} exceeds the supported maximum {max}")]
    DegreeTooHigh { degree: usize, max: usize },
    #[error("numerator and denominator share a root near {0}")]
    CommonRoot(PointCP1),
    #[error("RootFindingFailed: root refinement did not converge in {iterations} iterations")]
    RootFindingFailed { iterations: usize },
    #[error("MultiplicityAmbiguous: clustering found {clustered} at {point} but the winding integral gives {winding}")]
    MultiplicityAmbiguous {
        point: PointCP1,
        clustered: i64,
        winding: i64,
    },
    #[error("NotProjectivelyInvariant: g(phi(z)) != mu g(z) at sample {sample} (relative residual {residual:e})")]
    NotProjectivelyInvariant { sample: usize, residual: f64 },
    #[error("NegativeSpeed: h({s}) = {value:e}")]
    NegativeSpeed { s: f64, value: f64 },
    #[error("NotTransverse: the speed profile has {zeros} zero(s) on [0,1)")]
    NotTransverse { zeros: usize },
    #[error("QuadratureNotConverged: last change {last_change:e} at {nodes} nodes")]
    QuadratureNotConverged { nodes: usize, last_change: f64 },
    #[error("TooCloseToDivisor: {point} lies within {distance:e} of the divisor")]
    TooCloseToDivisor { point: PointCP1, distance: f64 },
    #[error("NotTransverseAtPoint: h({s}) = {value:e}")]
    NotTransverseAtPoint { s: f64, value: f64 },
    #[error("ContourThroughSingularity: no admissible radius around {center} starting from {radius}")]
    ContourThroughSingularity { center: PointCP1, radius: f64 },
    #[error("NotNearInteger: winding integral {raw} is not within {snap:e} of an integer")]
    NotNearInteger { raw: f64, snap: f64 },
    #[error("OrbitNotClosed: {kind} at {point} not periodic under phi (n_max={n_max})")]
    OrbitNotClosed {
        kind: &'static str,
        point: PointCP1,
        n_max: usize,
    },
    #[error("InconsistentOrders: {0}")]
    InconsistentOrders(String),
    #[error("InvalidTube: {0}")]
    InvalidTube(String),
    #[error("InvalidPatch: {0}")]
    InvalidPatch(String),
    #[error("ZeroInput: {0} is zero")]
    ZeroInput(&'static str),
    #[error("FactorizationFailed: {0}")]
    FactorizationFailed(String),
    #[error("InvalidArgument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Stable machine-readable name of the failure, used as the diagnostic code
    /// in reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DegenerateMap { .. } => "DegenerateMap",
            Error::ZeroPolynomial(_) => "ZeroPolynomial",
            Error::DegreeTooHigh { .. } => "DegreeTooHigh",
            Error::CommonRoot(_) => "CommonRoot",
            Error::RootFindingFailed { .. } => "RootFindingFailed",
            Error::MultiplicityAmbiguous { .. } => "MultiplicityAmbiguous",
            Error::NotProjectivelyInvariant { .. } => "NotProjectivelyInvariant",
            Error::NegativeSpeed { .. } => "NegativeSpeed",
            Error::NotTransverse { .. } => "NotTransverse",
            Error::QuadratureNotConverged { .. } => "QuadratureNotConverged",
            Error::TooCloseToDivisor { .. } => "TooCloseToDivisor",
            Error::NotTransverseAtPoint { .. } => "NotTransverseAtPoint",
            Error::ContourThroughSingularity { .. } => "ContourThroughSingularity",
            Error::NotNearInteger { .. } => "NotNearInteger",
            Error::OrbitNotClosed { .. } => "OrbitNotClosed",
            Error::InconsistentOrders(_) => "InconsistentOrders",
            Error::InvalidTube(_) => "InvalidTube",
            Error::InvalidPatch(_) => "InvalidPatch",
            Error::ZeroInput(_) => "ZeroInput",
            Error::FactorizationFailed(_) => "FactorizationFailed",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
