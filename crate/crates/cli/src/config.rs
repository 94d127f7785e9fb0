//! TOML configuration document.
//!
//! ```toml
//! [vehicle]            # kg, m, N s^2, rad/s; angle limits in degrees
//! mass = 1.2
//!
//! [controller]         # loop gains and rates (Hz)
//! outer_rate_hz = 100.0
//!
//! [simulation]
//! moment_model = "exact"        # or "linearized"
//!
//! [output]
//! dir = "out"
//! decimation = 1
//!
//! [[scenario]]
//! name = "slow_circle"
//! duration = 48.0
//! reference = { type = "circle", center = [2.3, 2.8], radius = 1.0, period = 24.0, altitude = 1.0 }
//! ```
//!
//! Unknown keys are rejected. Missing keys take their defaults and are
//! reported through [`Loaded::notices`].

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use svpn_core::control::ControllerConfig;
use svpn_core::dynamics::{AttitudeKinematics, MomentModel};
use svpn_core::sim::SimOptions;
use svpn_core::{Scenario, VehicleParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum LogFormat {
    #[default]
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputOptions {
    pub dir: PathBuf,
    pub format: LogFormat,
    /// Keep every Nth step in the CSV log.
    pub decimation: usize,
}

impl Default for OutputOptions {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            format: LogFormat::Csv,
            decimation: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulationOptions {
    pub moment_model: MomentModel,
    pub attitude_kinematics: AttitudeKinematics,
    /// State-norm crash threshold.
    pub divergence_bound: f64,
    /// m
    pub attach_tolerance: f64,
}

impl Default for SimulationOptions {
    fn default() -> Self {
        let d = SimOptions::default();
        Self {
            moment_model: d.moment_model,
            attitude_kinematics: d.attitude_kinematics,
            divergence_bound: d.divergence_bound,
            attach_tolerance: d.attach_tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConfigDocument {
    pub vehicle: VehicleParams,
    pub controller: ControllerConfig,
    pub simulation: SimulationOptions,
    pub output: OutputOptions,
    #[serde(rename = "scenario", skip_serializing_if = "Vec::is_empty")]
    pub scenarios: Vec<Scenario>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Loaded {
    pub doc: ConfigDocument,
    /// One line per key that fell back to its default.
    pub notices: Vec<String>,
}

impl ConfigDocument {
    pub fn sim_options(&self) -> SimOptions {
        SimOptions {
            params: self.vehicle,
            controller: self.controller,
            moment_model: self.simulation.moment_model,
            attitude_kinematics: self.simulation.attitude_kinematics,
            divergence_bound: self.simulation.divergence_bound,
            attach_tolerance: self.simulation.attach_tolerance,
        }
    }

    /// Config scenario of that name, else the built-in one.
    pub fn scenario(&self, name: &str) -> Option<Scenario> {
        self.scenarios
            .iter()
            .find(|s| s.name == name)
            .cloned()
            .or_else(|| Scenario::builtin(name))
    }

    /// Config scenarios followed by the built-ins they do not shadow.
    pub fn all_scenarios(&self) -> Vec<Scenario> {
        let mut out = self.scenarios.clone();
        for name in Scenario::BUILTIN {
            if !out.iter().any(|s| s.name == name) {
                out.extend(Scenario::builtin(name));
            }
        }
        out
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |e: svpn_core::Error| ConfigError::Invalid(e.to_string());
        self.vehicle.validate().map_err(invalid)?;
        self.controller.validate().map_err(invalid)?;
        if self.output.decimation == 0 {
            return Err(ConfigError::Invalid("output.decimation must be >= 1".into()));
        }
        let positive = |x: f64| x > 0.0;
        if !positive(self.simulation.divergence_bound) || !positive(self.simulation.attach_tolerance) {
            return Err(ConfigError::Invalid(
                "simulation.divergence_bound and attach_tolerance must be > 0".into(),
            ));
        }
        for (i, s) in self.scenarios.iter().enumerate() {
            if self.scenarios[..i].iter().any(|o| o.name == s.name) {
                return Err(ConfigError::Invalid(format!("duplicate scenario name {:?}", s.name)));
            }
            s.validate(&self.vehicle).map_err(invalid)?;
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config document serializes")
    }

    pub fn parse(text: &str, origin: &str) -> Result<Loaded, ConfigError> {
        let doc: ConfigDocument = toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: origin.into(),
            message: e.to_string(),
        })?;
        let raw: toml::Table = toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: origin.into(),
            message: e.to_string(),
        })?;
        let defaults = toml::Table::try_from(ConfigDocument::default()).expect("defaults serialize");
        let mut notices = Vec::new();
        for section in ["vehicle", "controller", "simulation", "output"] {
            let (Some(toml::Value::Table(d)), given) = (defaults.get(section), raw.get(section)) else {
                continue;
            };
            match given {
                Some(toml::Value::Table(g)) => missing_keys(section, d, g, &mut notices),
                _ => notices.push(format!("[{section}] not given; using defaults")),
            }
        }
        doc.validate()?;
        Ok(Loaded { doc, notices })
    }

    pub fn load(path: &Path) -> Result<Loaded, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.into(),
            source,
        })?;
        Self::parse(&text, &path.display().to_string())
    }
}

fn missing_keys(prefix: &str, defaults: &toml::Table, given: &toml::Table, out: &mut Vec<String>) {
    for (k, v) in defaults {
        let key = format!("{prefix}.{k}");
        match (v, given.get(k)) {
            (toml::Value::Table(d), Some(toml::Value::Table(g))) => missing_keys(&key, d, g, out),
            (_, Some(_)) => {}
            (toml::Value::Table(_), None) => out.push(format!("{key} not given; using defaults")),
            (v, None) => out.push(format!("{key} not given; using {v}")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_all_defaults() {
        let l = ConfigDocument::parse("", "t").unwrap();
        assert_eq!(l.doc, ConfigDocument::default());
        assert_eq!(l.notices.len(), 4);
    }

    #[test]
    fn unknown_key_rejected_with_location() {
        let err = ConfigDocument::parse("[vehicle]\nmass = 1.0\nmasss = 2.0\n", "cfg.toml").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("cfg.toml"), "{msg}");
        assert!(msg.contains("line 3"), "{msg}");
        assert!(msg.contains("masss"), "{msg}");
    }

    #[test]
    fn missing_key_noticed() {
        let l = ConfigDocument::parse("[vehicle]\nmass = 1.3\n", "t").unwrap();
        assert_eq!(l.doc.vehicle.mass, 1.3);
        assert!(l.notices.iter().any(|n| n.starts_with("vehicle.gravity not given; using 9.8")));
        assert!(!l.notices.iter().any(|n| n.starts_with("vehicle.mass")));
    }

    #[test]
    fn gains_typo_rejected() {
        let text = "[controller.fully_actuated.position]\nkp = [1.0, 1.0, 1.0]\nki = [0.0, 0.0, 0.0]\nkd = [0.0, 0.0, 0.0]\nintegral_limit = 1.0\noutput_limit = 1.0\nkpp = 1\n";
        assert!(ConfigDocument::parse(text, "t").is_err());
    }

    #[test]
    fn invalid_values_rejected() {
        assert!(matches!(
            ConfigDocument::parse("[vehicle]\nmass = -1.0\n", "t"),
            Err(ConfigError::Invalid(_))
        ));
        assert!(ConfigDocument::parse("[output]\ndecimation = 0\n", "t").is_err());
    }

    #[test]
    fn scenario_block_parses() {
        let text = r#"
[[scenario]]
name = "slow_circle"
duration = 30.0
metrics_from = 12.0
reference = { type = "circle", center = [0.0, 0.0], radius = 0.5, period = 20.0, altitude = 2.0 }
"#;
        let l = ConfigDocument::parse(text, "t").unwrap();
        let s = l.doc.scenario("slow_circle").unwrap();
        assert_eq!(s.duration, 30.0);
        assert!(l.doc.scenario("hover").is_some());
        assert_eq!(l.doc.all_scenarios().len(), Scenario::BUILTIN.len() + 1);
    }

    #[test]
    fn roundtrip_defaults() {
        let doc = ConfigDocument::default();
        let back = ConfigDocument::parse(&doc.to_toml(), "t").unwrap();
        assert_eq!(back.doc, doc);
        assert!(back.notices.is_empty(), "{:?}", back.notices);
    }
}
