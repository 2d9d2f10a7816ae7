//! The JSON scenario document.
//!
//! ```json
//! { "phi": {"a": [0, 1], "b": [0, 0], "c": [0, 0], "d": [1, 0]},
//!   "speed": {"a0": 1.0, "terms": [{"k": 1, "cos": 0.0, "sin": 0.5}]},
//!   "family": {"g_num": [[0,0],[0,0],[0,0],[0,0],[1,0]],
//!              "g_den": [[1,0],[0,0],[0,0],[0,0],[1,0]],
//!              "mu": "auto", "twist": []},
//!   "n_max": 64,
//!   "tolerances": {"residual": 1e-9} }
//! ```
//!
//! Complex numbers are `[re, im]` pairs and coefficient lists run from the
//! constant term up. `g_den`, `mu`, `twist`, `n_max` and every tolerance are
//! optional.

use std::fs;
use std::path::Path;

use foliated_core::fibered::{FourierTerm, SpeedProfile};
use foliated_core::leafwise::TwistTerm;
use foliated_core::scenario::{MultiplierSpec, ScenarioSpec, Tolerances, DEFAULT_N_MAX};
use foliated_core::sphere::MoebiusMap;
use foliated_core::{Error, MappingTorusScenario, RationalFunction};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::LabError;

pub type ComplexDoc = [f64; 2];

pub(crate) fn complex(c: ComplexDoc) -> Complex64 {
    Complex64::new(c[0], c[1])
}

pub(crate) fn pair(z: Complex64) -> ComplexDoc {
    [z.re, z.im]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDoc {
    pub phi: PhiDoc,
    pub speed: SpeedDoc,
    pub family: FamilyDoc,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default)]
    pub tolerances: TolerancesDoc,
}

fn default_n_max() -> usize {
    DEFAULT_N_MAX
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhiDoc {
    pub a: ComplexDoc,
    pub b: ComplexDoc,
    pub c: ComplexDoc,
    pub d: ComplexDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeedDoc {
    pub a0: f64,
    #[serde(default)]
    pub terms: Vec<SpeedTermDoc>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeedTermDoc {
    pub k: u32,
    #[serde(default)]
    pub cos: f64,
    #[serde(default)]
    pub sin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyDoc {
    pub g_num: Vec<ComplexDoc>,
    #[serde(default = "one")]
    pub g_den: Vec<ComplexDoc>,
    #[serde(default)]
    pub mu: MuDoc,
    #[serde(default)]
    pub twist: Vec<TwistDoc>,
}

fn one() -> Vec<ComplexDoc> {
    vec![[1.0, 0.0]]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoTag {
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MuDoc {
    Auto(AutoTag),
    Value(ComplexDoc),
}

impl Default for MuDoc {
    fn default() -> Self {
        MuDoc::Auto(AutoTag::Auto)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwistDoc {
    pub k: u32,
    pub coeff: ComplexDoc,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TolerancesDoc {
    pub winding_snap: f64,
    pub residual: f64,
    pub quadrature: f64,
    pub periodicity: f64,
}

impl Default for TolerancesDoc {
    fn default() -> Self {
        Tolerances::default().into()
    }
}

impl From<Tolerances> for TolerancesDoc {
    fn from(t: Tolerances) -> Self {
        TolerancesDoc {
            winding_snap: t.winding_snap,
            residual: t.residual,
            quadrature: t.quadrature,
            periodicity: t.periodicity,
        }
    }
}

impl ScenarioDoc {
    pub fn from_json(text: &str) -> Result<Self, LabError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let doc: ScenarioDoc = serde_path_to_error::deserialize(de).map_err(|e| {
            let field = e.path().to_string();
            let inner = e.into_inner();
            LabError::Parse {
                line: inner.line(),
                field: if field == "." { String::new() } else { field },
                message: inner.to_string(),
            }
        })?;
        Ok(doc)
    }

    pub fn to_json_pretty(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scenario documents always serialize");
        s.push('\n');
        s
    }

    /// Compact JSON with sorted keys and every default spelled out.
    pub fn canonical_json(&self) -> String {
        let value = serde_json::to_value(self).expect("scenario documents always serialize");
        serde_json::to_string(&value).expect("JSON values always serialize")
    }

    /// Lowercase hex SHA-256 of [`Self::canonical_json`].
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }

    /// The document describing `scenario`, with its multiplier explicit.
    pub fn from_scenario(scenario: &MappingTorusScenario) -> Self {
        let spec = scenario.to_spec();
        let [a, b, c, d] = spec.phi.coefficients();
        let coeffs = |p: &foliated_core::poly::Polynomial| p.coeffs().iter().map(|z| pair(*z)).collect();
        ScenarioDoc {
            phi: PhiDoc {
                a: pair(a),
                b: pair(b),
                c: pair(c),
                d: pair(d),
            },
            speed: SpeedDoc {
                a0: spec.speed.a0,
                terms: spec
                    .speed
                    .terms
                    .iter()
                    .map(|t| SpeedTermDoc {
                        k: t.k,
                        cos: t.cos_coeff,
                        sin: t.sin_coeff,
                    })
                    .collect(),
            },
            family: FamilyDoc {
                g_num: coeffs(spec.g.numerator()),
                g_den: coeffs(spec.g.denominator()),
                mu: match spec.mu {
                    MultiplierSpec::Auto => MuDoc::default(),
                    MultiplierSpec::Given(mu) => MuDoc::Value(pair(mu)),
                },
                twist: spec
                    .twist
                    .iter()
                    .map(|t| TwistDoc {
                        k: t.k,
                        coeff: pair(t.coeff),
                    })
                    .collect(),
            },
            n_max: spec.n_max,
            tolerances: spec.tolerances.into(),
        }
    }

    /// Field-level checks, then the domain objects.
    pub fn to_spec(&self) -> Result<ScenarioSpec, LabError> {
        let p = &self.phi;
        let phi = MoebiusMap::new(complex(p.a), complex(p.b), complex(p.c), complex(p.d))
            .map_err(|e| LabError::validation("phi", "degenerate", e.to_string()))?;

        for (i, t) in self.speed.terms.iter().enumerate() {
            if t.k == 0 {
                return Err(LabError::validation(format!("speed.terms[{i}].k"), "nonpositive", "modes start at k = 1"));
            }
        }
        let terms = self
            .speed
            .terms
            .iter()
            .map(|t| FourierTerm {
                k: t.k,
                cos_coeff: t.cos,
                sin_coeff: t.sin,
            })
            .collect();
        let speed = SpeedProfile::new(self.speed.a0, terms).map_err(|e| LabError::validation("speed", e.code(), e.to_string()))?;

        let num = self.family.g_num.iter().copied().map(complex).collect();
        let den = self.family.g_den.iter().copied().map(complex).collect();
        let g = RationalFunction::new(num, den).map_err(|e| {
            let field = match e {
                Error::ZeroPolynomial("numerator") => "family.g_num",
                Error::ZeroPolynomial(_) => "family.g_den",
                _ => "family",
            };
            LabError::validation(field, e.code(), e.to_string())
        })?;

        let mu = match self.family.mu {
            MuDoc::Auto(_) => MultiplierSpec::Auto,
            MuDoc::Value([0.0, 0.0]) => {
                return Err(LabError::validation("family.mu", "zero", "the multiplier must be nonzero"))
            }
            MuDoc::Value(c) => MultiplierSpec::Given(complex(c)),
        };
        let mut twist = Vec::with_capacity(self.family.twist.len());
        for (i, t) in self.family.twist.iter().enumerate() {
            if t.k == 0 {
                return Err(LabError::validation(format!("family.twist[{i}].k"), "nonpositive", "modes start at k = 1"));
            }
            twist.push(TwistTerm {
                k: t.k,
                coeff: complex(t.coeff),
            });
        }

        if self.n_max == 0 {
            return Err(LabError::validation("n_max", "nonpositive", "n_max must be at least 1"));
        }
        let t = &self.tolerances;
        for (name, value) in [
            ("winding_snap", t.winding_snap),
            ("residual", t.residual),
            ("quadrature", t.quadrature),
            ("periodicity", t.periodicity),
        ] {
            if !(value > 0.0) {
                return Err(LabError::validation(format!("tolerances.{name}"), "nonpositive", "tolerances must be positive"));
            }
        }

        Ok(ScenarioSpec {
            phi,
            speed,
            g,
            mu,
            twist,
            n_max: self.n_max,
            tolerances: Tolerances {
                winding_snap: t.winding_snap,
                residual: t.residual,
                quadrature: t.quadrature,
                periodicity: t.periodicity,
            },
        })
    }

    pub fn build(&self) -> Result<MappingTorusScenario, LabError> {
        self.to_spec()?.build().map_err(|e| {
            let field = match e {
                Error::NegativeSpeed { .. } => "speed",
                Error::NotProjectivelyInvariant { .. } | Error::OrbitNotClosed { .. } => "family",
                _ => "scenario",
            };
            LabError::validation(field, e.code(), e.to_string())
        })
    }
}

/// A scenario file read, checked and built, with the digest of its
/// canonical form.
#[derive(Debug, Clone)]
pub struct LoadedScenario {
    pub doc: ScenarioDoc,
    pub scenario: MappingTorusScenario,
    pub digest: String,
}

pub fn parse_scenario_str(text: &str) -> Result<LoadedScenario, LabError> {
    let doc = ScenarioDoc::from_json(text)?;
    let scenario = doc.build()?;
    let digest = doc.digest();
    Ok(LoadedScenario { doc, scenario, digest })
}

pub fn parse_scenario(path: &Path) -> Result<LoadedScenario, LabError> {
    let text = fs::read_to_string(path).map_err(|source| LabError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_scenario_str(&text)
}

/// Pretty JSON for `scenario`; parsing it back gives an equal scenario.
pub fn serialize_scenario(scenario: &MappingTorusScenario) -> String {
    ScenarioDoc::from_scenario(scenario).to_json_pretty()
}
