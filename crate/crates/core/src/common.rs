//! Common test on a homogeneous group.
//!
//! Once a group of populations shares the compared parameter, their data are
//! brought to a common footing, concatenated and tested as one sample:
//!
//! | case | adjustment            | merged model  |
//! |------|-----------------------|---------------|
//! | Mean | `(z − e_i) / σ_i + e_i` | `N(e₀, 1)`    |
//! | Sigma| `z − e_i`             | `N(0, σ₀)`    |
//! | Both | none                  | `N(e₀, σ₀)`   |

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multi::ParameterCase;
use crate::testing::{single_test, PopulationSample, TestDecision};
use crate::udist::{fit_moments, BeliefLevel, NormalUncertain};

/// Relative size of the Sigma-case merged mean, compared to `σ₀`, above which a
/// drift warning is attached.
const MEAN_DRIFT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommonCase {
    /// Shared location, per-population known scales.
    Mean,
    /// Shared scale, per-population known locations.
    Sigma,
    /// Shared location and scale.
    Both,
}

impl CommonCase {
    pub fn for_parameter_case(case: ParameterCase) -> Self {
        match case {
            ParameterCase::MeansUnknown => CommonCase::Mean,
            ParameterCase::SigmasUnknown => CommonCase::Sigma,
            ParameterCase::BothUnknown => CommonCase::Both,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            CommonCase::Mean => "mean",
            CommonCase::Sigma => "sigma",
            CommonCase::Both => "both",
        }
    }
}

/// Standardises the scale to 1 while keeping the centre `e_i`.
pub fn adjust_case_i(values: &[f64], e_i: f64, sigma_i: f64) -> Result<Vec<f64>> {
    if !(sigma_i.is_finite() && sigma_i > 0.0) {
        return Err(Error::Argument(format!(
            "adjustment scale must be positive, got {sigma_i}"
        )));
    }
    Ok(values.iter().map(|z| (z - e_i) / sigma_i + e_i).collect())
}

/// Moves the centre `e_i` to 0.
pub fn adjust_case_ii(values: &[f64], e_i: f64) -> Vec<f64> {
    values.iter().map(|z| z - e_i).collect()
}

/// Where a merged value came from: population id and 1-based index in it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Origin {
    pub population: String,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergedSample {
    pub values: Vec<f64>,
    pub origins: Vec<Origin>,
}

impl MergedSample {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Origin of the 1-based merged position `p`.
    pub fn origin(&self, p: usize) -> Option<&Origin> {
        p.checked_sub(1).and_then(|k| self.origins.get(k))
    }
}

/// Concatenates the parts in the given order, recording each value's origin.
pub fn merge<'a, I>(parts: I) -> Result<MergedSample>
where
    I: IntoIterator<Item = (&'a str, &'a [f64])>,
{
    let mut values = Vec::new();
    let mut origins = Vec::new();
    let mut any = false;
    for (id, part) in parts {
        any = true;
        if part.is_empty() {
            return Err(Error::Argument(format!(
                "cannot merge empty population `{id}`"
            )));
        }
        values.extend_from_slice(part);
        origins.extend((1..=part.len()).map(|index| Origin {
            population: id.to_string(),
            index,
        }));
    }
    if !any {
        return Err(Error::Argument("cannot merge an empty group".into()));
    }
    Ok(MergedSample { values, origins })
}

/// A population taking part in a common test, with its fitted distribution.
#[derive(Debug, Clone, Copy)]
pub struct GroupMember<'a> {
    pub sample: &'a PopulationSample,
    pub fit: NormalUncertain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Theta0Source {
    /// Estimated from the merged data.
    Merged,
    /// Supplied by the caller.
    Override,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommonTestResult {
    pub case: CommonCase,
    pub group: Vec<String>,
    /// Estimate from the merged data, whether or not it was used as `θ₀`.
    pub estimate: NormalUncertain,
    /// The fixed distribution the merged data were tested against.
    pub theta0: NormalUncertain,
    pub theta0_source: Theta0Source,
    pub merged: MergedSample,
    pub merged_mean: f64,
    pub decision: TestDecision,
    pub warnings: Vec<String>,
}

impl CommonTestResult {
    /// Outliers mapped back to their population and original index.
    pub fn outlier_origins(&self) -> Vec<&Origin> {
        self.decision
            .outlier_indices
            .iter()
            .filter_map(|&p| self.merged.origin(p))
            .collect()
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Adjusts, merges and tests the group's data.
///
/// `θ₀` defaults to the estimate from the merged data; `theta0_override`
/// replaces it with an externally fixed distribution.
pub fn common_test(
    case: CommonCase,
    members: &[GroupMember<'_>],
    alpha: BeliefLevel,
    theta0_override: Option<NormalUncertain>,
) -> Result<CommonTestResult> {
    if members.is_empty() {
        return Err(Error::Argument("common test on an empty group".into()));
    }
    let mut warnings = Vec::new();

    let adjusted: Vec<Vec<f64>> = members
        .iter()
        .map(|m| {
            let s = m.sample;
            match case {
                CommonCase::Mean => {
                    let sigma = s.known_sigma().ok_or_else(|| {
                        Error::Configuration(format!(
                            "population `{}` needs known_sigma for the mean common test",
                            s.id()
                        ))
                    })?;
                    let centre = s.known_e().unwrap_or(m.fit.e());
                    adjust_case_i(s.values(), centre, sigma)
                }
                CommonCase::Sigma => {
                    let e = s.known_e().ok_or_else(|| {
                        Error::Configuration(format!(
                            "population `{}` needs known_e for the sigma common test",
                            s.id()
                        ))
                    })?;
                    Ok(adjust_case_ii(s.values(), e))
                }
                CommonCase::Both => Ok(s.values().to_vec()),
            }
        })
        .collect::<Result<_>>()?;

    let merged = merge(
        members
            .iter()
            .zip(&adjusted)
            .map(|(m, v)| (m.sample.id(), v.as_slice())),
    )?;
    let merged_mean = mean(&merged.values);
    let group_label = || {
        members
            .iter()
            .map(|m| m.sample.id())
            .collect::<Vec<_>>()
            .join(",")
    };

    let estimate = match case {
        CommonCase::Mean => NormalUncertain::new(merged_mean, 1.0)?,
        CommonCase::Sigma => {
            let n = merged.len() as f64;
            let sigma0 = (merged.values.iter().map(|z| z * z).sum::<f64>() / n).sqrt();
            if sigma0 == 0.0 {
                return Err(Error::DegenerateSample(format!(
                    "merged group {} has zero scale",
                    group_label()
                )));
            }
            if merged_mean.abs() > MEAN_DRIFT_TOLERANCE * sigma0 {
                warnings.push(format!(
                    "merged data mean {merged_mean:.6} is not 0; scale estimated from raw \
                     second moment"
                ));
            }
            NormalUncertain::new(0.0, sigma0)?
        }
        CommonCase::Both => fit_moments(&merged.values, None, None).map_err(|err| match err {
            Error::DegenerateSample(msg) => {
                Error::DegenerateSample(format!("merged group {}: {msg}", group_label()))
            }
            other => other,
        })?,
    };

    let (theta0, theta0_source) = match theta0_override {
        Some(t) => (t, Theta0Source::Override),
        None => (estimate, Theta0Source::Merged),
    };
    let decision = single_test(&merged.values, &theta0, alpha)?;

    Ok(CommonTestResult {
        case,
        group: members.iter().map(|m| m.sample.id().to_string()).collect(),
        estimate,
        theta0,
        theta0_source,
        merged,
        merged_mean,
        decision,
        warnings,
    })
}
