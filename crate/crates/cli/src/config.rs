//! Run configuration, read from TOML.
//!
//! ```toml
//! alpha = 0.05
//! case = "auto"            # or means_unknown | sigmas_unknown | both_unknown
//! common_case = "auto"     # or mean | sigma | both
//! group = ["2", "3"]       # optional explicit group for the common test
//! theta0 = { e = 5.0, sigma = 1.0 }   # optional fixed θ₀ for the common test
//!
//! [[population]]
//! id = "1"
//! known_sigma = 1.0
//! ```

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use uncertest::{BeliefLevel, CommonCase, NormalUncertain, ParameterCase, PopulationSample};

use crate::error::{CliError, Result};

pub const DEFAULT_ALPHA: f64 = 0.05;

fn default_alpha() -> f64 {
    DEFAULT_ALPHA
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseSelection {
    #[default]
    Auto,
    MeansUnknown,
    SigmasUnknown,
    BothUnknown,
}

impl CaseSelection {
    pub fn resolve(self, samples: &[PopulationSample]) -> Result<ParameterCase> {
        let case = match self {
            CaseSelection::Auto => {
                return ParameterCase::resolve(samples).map_err(|e| CliError::Config(e.to_string()))
            }
            CaseSelection::MeansUnknown => ParameterCase::MeansUnknown,
            CaseSelection::SigmasUnknown => ParameterCase::SigmasUnknown,
            CaseSelection::BothUnknown => ParameterCase::BothUnknown,
        };
        for s in samples {
            case.check(s).map_err(|e| CliError::Config(e.to_string()))?;
        }
        Ok(case)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommonSelection {
    #[default]
    Auto,
    Mean,
    Sigma,
    Both,
}

impl CommonSelection {
    pub fn resolve(self, case: ParameterCase) -> CommonCase {
        match self {
            CommonSelection::Auto => CommonCase::for_parameter_case(case),
            CommonSelection::Mean => CommonCase::Mean,
            CommonSelection::Sigma => CommonCase::Sigma,
            CommonSelection::Both => CommonCase::Both,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PopulationConfig {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub known_e: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub known_sigma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub case: CaseSelection,
    #[serde(default)]
    pub common_case: CommonSelection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta0: Option<NormalUncertain>,
    #[serde(default, rename = "population")]
    pub populations: Vec<PopulationConfig>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            alpha: DEFAULT_ALPHA,
            case: CaseSelection::Auto,
            common_case: CommonSelection::Auto,
            group: None,
            theta0: None,
            populations: Vec::new(),
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let config: RunConfig =
            toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.belief_level()?;
        let mut seen = BTreeSet::new();
        for p in &self.populations {
            if p.id.is_empty() {
                return Err(CliError::Config("population id must not be empty".into()));
            }
            if !seen.insert(p.id.as_str()) {
                return Err(CliError::Config(format!(
                    "duplicate population id `{}`",
                    p.id
                )));
            }
        }
        if let Some(group) = &self.group {
            if group.is_empty() {
                return Err(CliError::Config("group selection is empty".into()));
            }
            let mut seen = BTreeSet::new();
            if let Some(dup) = group.iter().find(|id| !seen.insert(id.as_str())) {
                return Err(CliError::Config(format!("group lists `{dup}` twice")));
            }
        }
        Ok(())
    }

    pub fn belief_level(&self) -> Result<BeliefLevel> {
        BeliefLevel::new(self.alpha).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn population(&self, id: &str) -> Option<&PopulationConfig> {
        self.populations.iter().find(|p| p.id == id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = RunConfig::parse("").unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!(c.alpha, 0.05);
    }

    #[test]
    fn full_document() {
        let c = RunConfig::parse(
            r#"
            alpha = 0.1
            case = "means_unknown"
            common_case = "mean"
            group = ["2", "3"]
            theta0 = { e = 5.0, sigma = 1.0 }

            [[population]]
            id = "1"
            known_sigma = 1.0

            [[population]]
            id = "2"
            known_sigma = 1.5
            "#,
        )
        .unwrap();
        assert_eq!(c.case, CaseSelection::MeansUnknown);
        assert_eq!(c.common_case, CommonSelection::Mean);
        assert_eq!(
            c.group.as_deref(),
            Some(&["2".to_string(), "3".to_string()][..])
        );
        assert_eq!(c.theta0, Some(NormalUncertain::new(5.0, 1.0).unwrap()));
        assert_eq!(c.population("2").unwrap().known_sigma, Some(1.5));
    }

    #[test]
    fn rejects_bad_documents() {
        for text in [
            "alpha = 1.5",
            "alpha = 0.0",
            "case = \"weird\"",
            "unknown_key = 1",
            "theta0 = { e = 0.0, sigma = -1.0 }",
            "group = []",
            "group = [\"1\", \"1\"]",
            "[[population]]\nid = \"1\"\n[[population]]\nid = \"1\"",
            "[[population]]\nid = \"1\"\nknown_mu = 2.0",
        ] {
            assert!(
                matches!(RunConfig::parse(text), Err(CliError::Config(_))),
                "{text}"
            );
        }
    }
}
