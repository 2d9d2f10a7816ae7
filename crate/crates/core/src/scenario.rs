//! A complete foliated instance: the gluing map, the speed profile, the
//! leafwise function and the numerical tolerances.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fibered::{transversality_check, SpeedClass, SpeedProfile};
use crate::leafwise::{equivariance_residual, EquivariantFamily, TwistTerm, GLUING_TOL};
use crate::orbits::primitive_period;
use crate::rational::{check_multiplier, invariance_multiplier, RationalFunction};
use crate::sphere::{MoebiusMap, PointCP1};

pub const DEFAULT_N_MAX: usize = 64;
/// Sample counts of the construction-time checks.
const MULTIPLIER_SAMPLES: usize = 32;
const GLUING_SAMPLES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub winding_snap: f64,
    pub residual: f64,
    pub quadrature: f64,
    pub periodicity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            winding_snap: 1e-6,
            residual: 1e-9,
            quadrature: 1e-10,
            periodicity: 1e-9,
        }
    }
}

/// How the multiplier `mu` of the family is obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MultiplierSpec {
    /// Measured from `g(phi z) / g(z)`.
    Auto,
    Given(Complex64),
}

/// Unvalidated ingredients of a [`MappingTorusScenario`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub phi: MoebiusMap,
    pub speed: SpeedProfile,
    pub g: RationalFunction,
    pub mu: MultiplierSpec,
    pub twist: Vec<TwistTerm>,
    pub n_max: usize,
    pub tolerances: Tolerances,
}

impl ScenarioSpec {
    pub fn new(phi: MoebiusMap, speed: SpeedProfile, g: RationalFunction) -> Self {
        ScenarioSpec {
            phi,
            speed,
            g,
            mu: MultiplierSpec::Auto,
            twist: Vec::new(),
            n_max: DEFAULT_N_MAX,
            tolerances: Tolerances::default(),
        }
    }

    pub fn build(self) -> Result<MappingTorusScenario> {
        MappingTorusScenario::new(self)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MappingTorusScenario {
    phi: MoebiusMap,
    speed: SpeedProfile,
    family: EquivariantFamily,
    n_max: usize,
    tolerances: Tolerances,
    class: SpeedClass,
}

impl MappingTorusScenario {
    /// Validates the speed profile and the descent of the family to the
    /// mapping torus.
    ///
    /// When `g ∘ phi = mu g` fails and some zero or pole of `g` is not
    /// periodic under `phi`, the error is `OrbitNotClosed`: the zeros and
    /// poles do not lie on closed orbits. Otherwise it is
    /// `NotProjectivelyInvariant`.
    pub fn new(spec: ScenarioSpec) -> Result<Self> {
        if spec.n_max == 0 {
            return Err(Error::InvalidArgument("n_max must be positive".into()));
        }
        let class = transversality_check(&spec.speed)?;
        let mu = match spec.mu {
            MultiplierSpec::Auto => invariance_multiplier(&spec.g, &spec.phi, MULTIPLIER_SAMPLES),
            MultiplierSpec::Given(mu) => {
                check_multiplier(&spec.g, &spec.phi, mu, MULTIPLIER_SAMPLES).map(|_| mu)
            }
        };
        let mu = match mu {
            Ok(mu) => mu,
            Err(e) => {
                diagnose_open_orbits(&spec)?;
                return Err(e);
            }
        };
        let family = EquivariantFamily::new(spec.g, mu, spec.twist)?;
        let residual = equivariance_residual(&family, &spec.phi, GLUING_SAMPLES)?;
        if !(residual < GLUING_TOL) {
            return Err(Error::NotProjectivelyInvariant {
                sample: GLUING_SAMPLES,
                residual,
            });
        }
        Ok(MappingTorusScenario {
            phi: spec.phi,
            speed: spec.speed,
            family,
            n_max: spec.n_max,
            tolerances: spec.tolerances,
            class,
        })
    }

    pub fn phi(&self) -> &MoebiusMap {
        &self.phi
    }

    pub fn speed(&self) -> &SpeedProfile {
        &self.speed
    }

    pub fn family(&self) -> &EquivariantFamily {
        &self.family
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tolerances
    }

    pub fn speed_class(&self) -> &SpeedClass {
        &self.class
    }

    pub fn is_transverse(&self) -> bool {
        self.class.is_transverse()
    }

    /// The same scenario with the speed profile multiplied by `c > 0`.
    pub fn with_scaled_speed(&self, c: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(Error::InvalidArgument("speed scale must be positive".into()));
        }
        let mut out = self.clone();
        out.speed = self.speed.scaled(c);
        out.class = transversality_check(&out.speed)?;
        Ok(out)
    }

    /// The same scenario with a different twist `q(s)`.
    pub fn with_twist(&self, twist: Vec<TwistTerm>) -> Result<Self> {
        let mut out = self.clone();
        out.family = EquivariantFamily::new(self.family.g().clone(), self.family.mu(), twist)?;
        Ok(out)
    }

    /// The ingredients this scenario was built from, with the multiplier
    /// made explicit.
    pub fn to_spec(&self) -> ScenarioSpec {
        ScenarioSpec {
            phi: self.phi,
            speed: self.speed.clone(),
            g: self.family.g().clone(),
            mu: MultiplierSpec::Given(self.family.mu()),
            twist: self.family.twist().to_vec(),
            n_max: self.n_max,
            tolerances: self.tolerances,
        }
    }
}

fn diagnose_open_orbits(spec: &ScenarioSpec) -> Result<()> {
    let zeros = spec.g.zeros().iter().map(|(z, _)| ("zero", PointCP1::finite(*z)));
    let poles = spec.g.poles().iter().map(|(z, _)| ("pole", PointCP1::finite(*z)));
    let infinity = match spec.g.order_at_infinity() {
        0 => None,
        o if o > 0 => Some(("zero", PointCP1::INFINITY)),
        _ => Some(("pole", PointCP1::INFINITY)),
    };
    for (kind, point) in zeros.chain(poles).chain(infinity) {
        if primitive_period(&spec.phi, &point, spec.n_max, spec.tolerances.periodicity).is_none() {
            return Err(Error::OrbitNotClosed {
                kind,
                point,
                n_max: spec.n_max,
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn r(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn quartic() -> RationalFunction {
        RationalFunction::new(
            vec![r(0.0), r(0.0), r(0.0), r(0.0), r(1.0)],
            vec![r(1.0), r(0.0), r(0.0), r(0.0), r(1.0)],
        )
        .unwrap()
    }

    fn iz() -> MoebiusMap {
        MoebiusMap::scaling(Complex64::new(0.0, 1.0)).unwrap()
    }

    #[test]
    fn valid_scenario_builds() {
        let sc = ScenarioSpec::new(iz(), SpeedProfile::shifted_sine(1.0, 0.5), quartic())
            .build()
            .unwrap();
        assert!((sc.family().mu() - r(1.0)).norm() < 1e-12);
        assert!(sc.is_transverse());
    }

    #[test]
    fn perturbed_multiplier_is_rejected() {
        let mut spec = ScenarioSpec::new(iz(), SpeedProfile::constant(1.0), quartic());
        spec.mu = MultiplierSpec::Given(r(1.001));
        assert_eq!(spec.build().unwrap_err().code(), "NotProjectivelyInvariant");
    }

    #[test]
    fn hyperbolic_map_reports_open_orbit() {
        let g = RationalFunction::new(vec![r(-1.0), r(1.0)], vec![r(0.0), r(1.0)]).unwrap();
        let spec = ScenarioSpec::new(MoebiusMap::scaling(r(2.0)).unwrap(), SpeedProfile::constant(1.0), g);
        let err = spec.build().unwrap_err();
        assert_eq!(err.code(), "OrbitNotClosed");
        assert_eq!(
            err.to_string(),
            "OrbitNotClosed: zero at 1+0i not periodic under phi (n_max=64)"
        );
    }

    #[test]
    fn negative_speed_is_rejected() {
        let spec = ScenarioSpec::new(iz(), SpeedProfile::shifted_sine(0.2, 1.0), quartic());
        assert_eq!(spec.build().unwrap_err().code(), "NegativeSpeed");
    }

    #[test]
    fn spec_round_trip() {
        let sc = ScenarioSpec::new(iz(), SpeedProfile::shifted_sine(1.0, 0.5), quartic())
            .build()
            .unwrap();
        assert_eq!(sc.to_spec().build().unwrap(), sc);
    }
}
