//! Experiment description and validation.

use serde::{Deserialize, Serialize};

use crate::constants::{CODATA_2018, HELIUM4_MASS};
use crate::error::{Error, Result, Violation};
use crate::gravphase::superposition_size;

/// All experimental parameters, SI units throughout.
///
/// Field names in the JSON form match the camel-case keys `m1`, `m2`, `d`,
/// `dx`, `tau`, `tauAcc`, `dBdx`, `radius`, `epsRel`, `pressure`, `tEnv`,
/// `tInt`, `chiM`, `mGas`. Unknown keys are rejected.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Test masses, kg.
    pub m1: f64,
    pub m2: f64,
    /// Separation of the two interferometer centres, m.
    pub d: f64,
    /// Superposition size, m. Derived from the Stern-Gerlach kinematics when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dx: Option<f64>,
    /// Hold time, s.
    pub tau: f64,
    /// Split (and recombination) time, s.
    #[serde(rename = "tauAcc")]
    pub tau_acc: f64,
    /// Magnetic field gradient, T m^-1.
    #[serde(rename = "dBdx")]
    pub db_dx: f64,
    /// Microsphere radius, m.
    pub radius: f64,
    /// Relative dielectric constant.
    #[serde(rename = "epsRel")]
    pub eps_rel: f64,
    /// Residual gas pressure, Pa.
    pub pressure: f64,
    /// Environment temperature, K.
    #[serde(rename = "tEnv")]
    pub t_env: f64,
    /// Internal temperature of the microspheres, K.
    #[serde(rename = "tInt")]
    pub t_int: f64,
    /// Magnetic susceptibility.
    #[serde(rename = "chiM")]
    pub chi_m: f64,
    /// Residual gas particle mass, kg.
    #[serde(rename = "mGas")]
    pub m_gas: f64,
}

/// Names accepted by [`ExperimentConfig::set`], in declaration order.
pub const PARAMETER_NAMES: [&str; 14] = [
    "m1", "m2", "d", "dx", "tau", "tauAcc", "dBdx", "radius", "epsRel", "pressure", "tEnv", "tInt", "chiM", "mGas",
];

/// Relative mismatch between explicit and derived `dx` above which a warning is attached.
pub const DX_CONSISTENCY_TOLERANCE: f64 = 0.01;

/// A configuration that passed [`ExperimentConfig::validate`]; `dx` is always present.
#[derive(Debug, Clone, PartialEq)]
pub struct Validated {
    pub config: ExperimentConfig,
    pub warnings: Vec<String>,
}

impl ExperimentConfig {
    /// The explicit scenario: two 1e-14 kg diamonds dropped from traps 450 um apart.
    pub fn paper_defaults() -> Self {
        ExperimentConfig {
            m1: 1e-14,
            m2: 1e-14,
            d: 450e-6,
            dx: Some(250e-6),
            tau: 2.5,
            tau_acc: 0.5,
            db_dx: 1e6,
            radius: 1e-6,
            eps_rel: 5.7,
            pressure: 1e-15,
            t_env: 0.15,
            t_int: 0.15,
            chi_m: 1e-5,
            m_gas: HELIUM4_MASS,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    /// Superposition size implied by the Stern-Gerlach kinematics of mass 1.
    pub fn derived_dx(&self) -> f64 {
        superposition_size(&CODATA_2018, self.db_dx, self.tau_acc, self.m1)
    }

    /// The effective superposition size: explicit if given, otherwise derived.
    pub fn split(&self) -> f64 {
        self.dx.unwrap_or_else(|| self.derived_dx())
    }

    /// Total free-flight duration tau + 2 tau_acc.
    pub fn duration(&self) -> f64 {
        self.tau + 2.0 * self.tau_acc
    }

    pub fn get(&self, name: &str) -> Result<f64> {
        Ok(match name {
            "m1" => self.m1,
            "m2" => self.m2,
            "d" => self.d,
            "dx" => self.split(),
            "tau" => self.tau,
            "tauAcc" => self.tau_acc,
            "dBdx" => self.db_dx,
            "radius" => self.radius,
            "epsRel" => self.eps_rel,
            "pressure" => self.pressure,
            "tEnv" => self.t_env,
            "tInt" => self.t_int,
            "chiM" => self.chi_m,
            "mGas" => self.m_gas,
            _ => return Err(Error::UnknownParameter(name.to_string())),
        })
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        let slot = match name {
            "m1" => &mut self.m1,
            "m2" => &mut self.m2,
            "d" => &mut self.d,
            "dx" => {
                self.dx = Some(value);
                return Ok(());
            }
            "tau" => &mut self.tau,
            "tauAcc" => &mut self.tau_acc,
            "dBdx" => &mut self.db_dx,
            "radius" => &mut self.radius,
            "epsRel" => &mut self.eps_rel,
            "pressure" => &mut self.pressure,
            "tEnv" => &mut self.t_env,
            "tInt" => &mut self.t_int,
            "chiM" => &mut self.chi_m,
            "mGas" => &mut self.m_gas,
            _ => return Err(Error::UnknownParameter(name.to_string())),
        };
        *slot = value;
        Ok(())
    }

    /// Applies a `key=value` override.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| Error::InvalidArgument(format!("override `{assignment}` is not key=value")))?;
        let key = key.trim();
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("override `{assignment}`: value is not a number")))?;
        self.set(key, value)
    }

    /// Checks every invariant and fills in `dx` when absent.
    ///
    /// All violations are collected, not just the first. Validating an already
    /// validated config returns it unchanged.
    pub fn validate(&self) -> Result<Validated> {
        let mut bad: Vec<Violation> = Vec::new();
        fn fail(bad: &mut Vec<Violation>, field: &'static str, message: &str) {
            bad.push(Violation {
                field,
                message: message.to_string(),
            });
        }

        let mut all = vec![
            ("m1", self.m1),
            ("m2", self.m2),
            ("d", self.d),
            ("tau", self.tau),
            ("tauAcc", self.tau_acc),
            ("dBdx", self.db_dx),
            ("radius", self.radius),
            ("epsRel", self.eps_rel),
            ("pressure", self.pressure),
            ("tEnv", self.t_env),
            ("tInt", self.t_int),
            ("chiM", self.chi_m),
            ("mGas", self.m_gas),
        ];
        if let Some(dx) = self.dx {
            all.push(("dx", dx));
        }
        for (field, v) in &all {
            if !v.is_finite() {
                fail(&mut bad, field, "must be finite");
            }
        }
        for (field, v) in [
            ("m1", self.m1),
            ("m2", self.m2),
            ("d", self.d),
            ("tau", self.tau),
            ("tauAcc", self.tau_acc),
            ("radius", self.radius),
            ("pressure", self.pressure),
            ("tEnv", self.t_env),
            ("mGas", self.m_gas),
        ] {
            if v.is_finite() && v <= 0.0 {
                fail(&mut bad, field, "must be > 0");
            }
        }
        if self.eps_rel.is_finite() && self.eps_rel <= 1.0 {
            fail(&mut bad, "epsRel", "must be > 1");
        }
        if self.t_int.is_finite() && self.t_int < 0.0 {
            fail(&mut bad, "tInt", "must be >= 0");
        }
        if self.db_dx.is_finite() && self.db_dx < 0.0 {
            fail(&mut bad, "dBdx", "must be >= 0");
        }
        if self.dx.is_none() && self.db_dx == 0.0 {
            fail(&mut bad, "dBdx", "must be > 0 when dx is derived");
        }

        let mut warnings = Vec::new();
        if bad.is_empty() {
            let derived = self.derived_dx();
            let dx = self.split();
            if !dx.is_finite() {
                fail(&mut bad, "dx", "must be finite");
            } else if dx <= 0.0 {
                fail(&mut bad, "dx", "must satisfy 0 < dx");
            } else if dx >= self.d {
                fail(&mut bad, "dx", "must satisfy dx < d");
            } else if self.d - dx <= 2.0 * self.radius {
                fail(&mut bad, "dx", "closest approach d - dx must exceed 2 radius");
            }
            if let Some(explicit) = self.dx {
                if self.db_dx > 0.0 && ((explicit - derived) / derived).abs() > DX_CONSISTENCY_TOLERANCE {
                    warnings.push(format!(
                        "explicit dx = {explicit:e} m differs from the Stern-Gerlach value {derived:e} m by more than {:.0}%; using the explicit value",
                        DX_CONSISTENCY_TOLERANCE * 100.0
                    ));
                }
            }
        }

        if !bad.is_empty() {
            return Err(Error::InvalidConfig(bad));
        }
        let mut config = *self;
        config.dx = Some(self.split());
        Ok(Validated { config, warnings })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fields(err: Error) -> Vec<&'static str> {
        match err {
            Error::InvalidConfig(v) => v.into_iter().map(|x| x.field).collect(),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn defaults_accepted() {
        let v = ExperimentConfig::paper_defaults().validate().unwrap();
        assert_eq!(v.config, ExperimentConfig::paper_defaults());
        // explicit 250 um vs kinematic 232 um
        assert_eq!(v.warnings.len(), 1);
    }

    #[test]
    fn defaults_geometry() {
        let c = ExperimentConfig::paper_defaults();
        assert!((c.d - c.split() - 200e-6).abs() < 1e-18);
        assert_eq!(c.eps_rel, 5.7);
    }

    #[test]
    fn dx_equal_to_d_rejected() {
        let mut c = ExperimentConfig::paper_defaults();
        c.dx = Some(c.d);
        let err = c.validate().unwrap_err();
        assert!(err.to_string().contains("dx < d"));
    }

    #[test]
    fn zero_mass_rejected() {
        let mut c = ExperimentConfig::paper_defaults();
        c.m1 = 0.0;
        assert_eq!(fields(c.validate().unwrap_err()), vec!["m1"]);
    }

    #[test]
    fn non_finite_rejected() {
        let mut c = ExperimentConfig::paper_defaults();
        c.tau = f64::NAN;
        c.radius = f64::INFINITY;
        let f = fields(c.validate().unwrap_err());
        assert!(f.contains(&"tau") && f.contains(&"radius"));
    }

    #[test]
    fn every_violation_reported() {
        let mut c = ExperimentConfig::paper_defaults();
        c.m2 = -1.0;
        c.eps_rel = 1.0;
        c.pressure = 0.0;
        let f = fields(c.validate().unwrap_err());
        assert_eq!(f, vec!["m2", "pressure", "epsRel"]);
    }

    #[test]
    fn closest_approach_must_clear_spheres() {
        let mut c = ExperimentConfig::paper_defaults();
        c.dx = Some(c.d - 1.5e-6);
        assert_eq!(fields(c.validate().unwrap_err()), vec!["dx"]);
    }

    #[test]
    fn dx_derived_when_absent() {
        let mut c = ExperimentConfig::paper_defaults();
        c.dx = None;
        let v = c.validate().unwrap();
        let dx = v.config.dx.unwrap();
        assert!((dx - 2.321_191_176_079e-4).abs() < 1e-15);
        assert!(v.warnings.is_empty());
    }

    #[test]
    fn validate_idempotent() {
        let mut c = ExperimentConfig::paper_defaults();
        c.dx = None;
        let once = c.validate().unwrap().config;
        let twice = once.validate().unwrap().config;
        assert_eq!(once, twice);
    }

    #[test]
    fn json_round_trip_and_unknown_keys() {
        let c = ExperimentConfig::paper_defaults();
        let back = ExperimentConfig::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
        assert!(c.to_json().contains("\"tauAcc\""));
        let bad = c.to_json().replacen("\"tau\"", "\"tauu\"", 1);
        assert!(ExperimentConfig::from_json(&bad).is_err());
    }

    #[test]
    fn defaults_serialisation_stable() {
        assert_eq!(
            ExperimentConfig::paper_defaults().to_json(),
            ExperimentConfig::paper_defaults().to_json()
        );
    }

    #[test]
    fn overrides() {
        let mut c = ExperimentConfig::paper_defaults();
        c.apply_override("tau=5").unwrap();
        assert_eq!(c.tau, 5.0);
        assert!(matches!(c.apply_override("tauu=5"), Err(Error::UnknownParameter(_))));
        assert!(matches!(c.apply_override("tau"), Err(Error::InvalidArgument(_))));
        assert!(matches!(c.apply_override("tau=abc"), Err(Error::InvalidArgument(_))));
        for name in PARAMETER_NAMES {
            let v = c.get(name).unwrap();
            c.set(name, v).unwrap();
        }
    }
}
