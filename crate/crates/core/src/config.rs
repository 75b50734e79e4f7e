//! Run configuration shared by every CLI subcommand and embedded verbatim in
//! each output header.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{ConfigError, ProfileError};
use crate::hamiltonian::HamiltonianStack;
use crate::profiles::ProfileConstants;
use crate::verify::AuditConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub profile: ProfileConstants,
    /// Number of planar pairs; the space is R^{2n+1}.
    pub n: usize,
    /// Local error target of the adaptive integrator.
    pub tol: f64,
    /// Step cap of the adaptive integrator.
    pub h_max: f64,
    pub seed: u64,
    /// Torus tube radius `eps_T`.
    pub tube: f64,
    /// Half-width of the cube scanned for periodic orbits.
    pub box_half_width: f64,
    /// Worker threads for scans, sweeps and audits; `None` uses all cores.
    pub jobs: Option<usize>,
    pub audit: AuditConfig,
    /// Output file; `None` writes to stdout.
    pub output: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            profile: ProfileConstants::default(),
            n: 2,
            tol: 1e-10,
            h_max: 0.5,
            seed: 1,
            tube: 1e-6,
            box_half_width: 4.0,
            jobs: None,
            audit: AuditConfig::default(),
            output: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        self.profile.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if self.n < 1 {
            return bad("n must be at least 1".into());
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return bad(format!("tol = {} must lie in (0, 1)", self.tol));
        }
        if !(self.h_max > 0.0) {
            return bad(format!("h_max = {} must be positive", self.h_max));
        }
        if !(self.tube > 0.0 && self.tube < 1.0) {
            return bad(format!("tube = {} must lie in (0, 1)", self.tube));
        }
        if !(self.box_half_width > 0.0) {
            return bad(format!("box_half_width = {} must be positive", self.box_half_width));
        }
        if self.jobs == Some(0) {
            return bad("jobs must be positive".into());
        }
        Ok(())
    }

    pub fn hamiltonian(&self) -> Result<HamiltonianStack, ProfileError> {
        HamiltonianStack::new(self.profile, self.n)
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("RunConfig serializes")
    }

    /// `# config: <json>` line used by text outputs.
    pub fn header_line(&self) -> String {
        format!("# config: {}", serde_json::to_string(self).expect("RunConfig serializes"))
    }

    /// Recover the configuration from the first `# config:` line of a text
    /// output, or from the `config` key of a JSON / JSONL output.
    pub fn from_output(text: &str) -> Result<Self, ConfigError> {
        let first = text.lines().next().unwrap_or("");
        if let Some(json) = first.strip_prefix("# config: ") {
            return Self::from_json(json);
        }
        let value: Value = match serde_json::from_str(text) {
            Ok(v) => v,
            Err(_) => serde_json::from_str(first)?,
        };
        let cfg = value
            .get("config")
            .ok_or_else(|| ConfigError::Invalid("output carries no config header".into()))?;
        let cfg: RunConfig = serde_json::from_value(cfg.clone())?;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips() {
        let c = RunConfig::default();
        assert_eq!(RunConfig::from_json(&serde_json::to_string(&c).unwrap()).unwrap(), c);
        assert_eq!(RunConfig::from_output(&c.header_line()).unwrap(), c);
        let wrapped = serde_json::json!({"config": c.to_value(), "result": 1}).to_string();
        assert_eq!(RunConfig::from_output(&wrapped).unwrap(), c);
    }

    #[test]
    fn partial_config_fills_defaults() {
        let c = RunConfig::from_json(r#"{"tol": 1e-8, "seed": 7}"#).unwrap();
        assert_eq!(c.tol, 1e-8);
        assert_eq!(c.seed, 7);
        assert_eq!(c.n, 2);
    }

    #[test]
    fn rejects_unknown_and_invalid() {
        assert!(matches!(RunConfig::from_json(r#"{"tolerance": 1}"#), Err(ConfigError::Parse(_))));
        assert!(matches!(RunConfig::from_json(r#"{"tol": -1}"#), Err(ConfigError::Invalid(_))));
        assert!(matches!(RunConfig::from_json("{"), Err(ConfigError::Parse(_))));
        assert!(matches!(RunConfig::load(Path::new("/nonexistent/x.json")), Err(ConfigError::Io { .. })));
    }
}
