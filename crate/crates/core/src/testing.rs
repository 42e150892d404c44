//! Single-population tests.
//!
//! A sample `(z_1, ..., z_m)` is tested against `N(e₀, σ₀)` by counting the
//! points strictly outside the acceptance interval
//! `[Φ⁻¹(α/2), Φ⁻¹(1 − α/2)]`. The null hypothesis is rejected when that
//! count exceeds `α · m`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::udist::{fit_moments, BeliefLevel, NormalUncertain};

/// Observed data of one population together with any known parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationSample {
    id: String,
    values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    known_e: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    known_sigma: Option<f64>,
}

impl PopulationSample {
    pub fn new(
        id: impl Into<String>,
        values: Vec<f64>,
        known_e: Option<f64>,
        known_sigma: Option<f64>,
    ) -> Result<Self> {
        let id = id.into();
        if id.is_empty() {
            return Err(Error::Argument("population id must not be empty".into()));
        }
        if values.is_empty() {
            return Err(Error::Argument(format!("population `{id}` has no values")));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Argument(format!(
                "population `{id}` contains non-finite value {bad}"
            )));
        }
        if let Some(e) = known_e {
            if !e.is_finite() {
                return Err(Error::Argument(format!(
                    "population `{id}`: known_e must be finite"
                )));
            }
        }
        if let Some(s) = known_sigma {
            if !(s.is_finite() && s > 0.0) {
                return Err(Error::Argument(format!(
                    "population `{id}`: known_sigma must be positive, got {s}"
                )));
            }
        }
        Ok(Self {
            id,
            values,
            known_e,
            known_sigma,
        })
    }

    /// Sample without known parameters.
    pub fn unknown(id: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        Self::new(id, values, None, None)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn known_e(&self) -> Option<f64> {
        self.known_e
    }

    pub fn known_sigma(&self) -> Option<f64> {
        self.known_sigma
    }
}

/// `[Φ⁻¹(α/2; θ), Φ⁻¹(1 − α/2; θ)]` together with the `θ = (e, σ)` it came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceInterval {
    pub lower: f64,
    pub upper: f64,
    pub alpha: BeliefLevel,
    pub source_e: f64,
    pub source_sigma: f64,
}

impl AcceptanceInterval {
    /// Points on either endpoint are inside.
    pub fn contains(&self, z: f64) -> bool {
        z >= self.lower && z <= self.upper
    }

    pub fn source(&self) -> NormalUncertain {
        NormalUncertain::new(self.source_e, self.source_sigma)
            .expect("interval source is a valid distribution")
    }
}

/// Outcome of testing one data vector against one acceptance interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestDecision {
    pub interval: AcceptanceInterval,
    /// 1-based positions of the values outside the interval, ascending.
    pub outlier_indices: Vec<usize>,
    pub outlier_count: usize,
    pub threshold: usize,
    pub sample_size: usize,
    pub rejected: bool,
}

impl TestDecision {
    /// Tests `values` against an already built interval.
    pub fn evaluate(values: &[f64], interval: AcceptanceInterval) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Argument("cannot test an empty sample".into()));
        }
        let outlier_indices = count_outliers(values, &interval);
        let threshold = rejection_threshold(values.len(), interval.alpha);
        let outlier_count = outlier_indices.len();
        Ok(Self {
            interval,
            outlier_indices,
            outlier_count,
            threshold,
            sample_size: values.len(),
            rejected: outlier_count >= threshold,
        })
    }

    pub fn verdict(&self) -> &'static str {
        if self.rejected {
            "rejected"
        } else {
            "cannot be rejected"
        }
    }
}

pub fn acceptance_interval(d: &NormalUncertain, alpha: BeliefLevel) -> AcceptanceInterval {
    AcceptanceInterval {
        lower: d.quantile(alpha.lower_tail()),
        upper: d.quantile(alpha.upper_tail()),
        alpha,
        source_e: d.e(),
        source_sigma: d.sigma(),
    }
}

/// 1-based positions of values strictly below `lower` or strictly above `upper`.
pub fn count_outliers(values: &[f64], interval: &AcceptanceInterval) -> Vec<usize> {
    values
        .iter()
        .enumerate()
        .filter(|(_, &z)| !interval.contains(z))
        .map(|(p, _)| p + 1)
        .collect()
}

/// Least number of outliers that rejects: `floor(α · m) + 1`.
///
/// `α · m` is snapped to the nearest integer when within `1e-9` of it, so
/// that e.g. `0.29 · 100` (which evaluates just below 29) counts as 29.
pub fn rejection_threshold(m: usize, alpha: BeliefLevel) -> usize {
    let product = alpha.value() * m as f64;
    let nearest = product.round();
    let snapped = if (product - nearest).abs() < 1e-9 {
        nearest
    } else {
        product
    };
    snapped.floor() as usize + 1
}

/// Tests the data vector against `N(e₀, σ₀)` at level `α`.
pub fn single_test(
    values: &[f64],
    d0: &NormalUncertain,
    alpha: BeliefLevel,
) -> Result<TestDecision> {
    TestDecision::evaluate(values, acceptance_interval(d0, alpha))
}

/// Fits the sample by moments and tests it against its own fit.
///
/// A rejected self-test means the fitted distribution does not describe
/// the population adequately.
pub fn fit_and_verify(
    sample: &PopulationSample,
    alpha: BeliefLevel,
) -> Result<(NormalUncertain, TestDecision)> {
    let fit =
        fit_moments(sample.values(), sample.known_e(), sample.known_sigma()).map_err(|err| {
            match err {
                Error::DegenerateSample(msg) => {
                    Error::DegenerateSample(format!("{}: {msg}", sample.id()))
                }
                other => other,
            }
        })?;
    let decision = single_test(sample.values(), &fit, alpha)?;
    Ok((fit, decision))
}

#[cfg(test)]
mod tests {
    use super::*;

    const ALPHA: f64 = 0.05;

    fn alpha() -> BeliefLevel {
        BeliefLevel::new(ALPHA).unwrap()
    }

    fn n(e: f64, s: f64) -> NormalUncertain {
        NormalUncertain::new(e, s).unwrap()
    }

    fn interval(lower: f64, upper: f64) -> AcceptanceInterval {
        AcceptanceInterval {
            lower,
            upper,
            alpha: alpha(),
            source_e: (lower + upper) / 2.0,
            source_sigma: 1.0,
        }
    }

    const EXAMPLE1_POP1: [f64; 36] = [
        6.38, 4.56, 0.01, 5.25, 4.16, 4.59, 5.81, 4.61, 4.64, 6.92, 6.70, 5.05, 2.94, 3.60, 2.46,
        3.29, 6.37, 3.29, 2.51, 3.34, 5.22, 5.57, 4.82, 3.96, 3.27, 3.83, 4.96, 4.56, 3.57, 5.33,
        4.70, 4.18, 6.43, 6.57, 6.07, 4.36,
    ];

    const EXAMPLE1_POP2: [f64; 48] = [
        4.16, 4.93, 4.91, 2.51, 5.21, 5.29, 8.45, 6.15, 5.41, 2.85, 3.80, 6.12, 4.12, 6.68, 3.52,
        5.58, 3.42, 4.95, 5.17, 5.82, 5.28, 5.70, 5.46, 4.97, 4.39, 4.61, 2.53, 5.80, 4.17, 3.64,
        5.27, 3.34, 1.72, 7.40, 6.12, 5.16, 5.40, 7.59, 5.85, 6.09, 5.87, 4.23, 5.83, 4.68, 3.56,
        2.91, 4.36, 6.15,
    ];

    #[test]
    fn interval_dental_common() {
        let ai = acceptance_interval(&n(2.516, 0.083), alpha());
        assert!((ai.lower - 2.348).abs() < 1e-3);
        assert!((ai.upper - 2.684).abs() < 1e-3);
        assert_eq!((ai.source_e, ai.source_sigma), (2.516, 0.083));
    }

    #[test]
    fn interval_centred_scale() {
        let ai = acceptance_interval(&n(0.0, 1.404), alpha());
        assert!((ai.lower + 2.836).abs() < 1e-3);
        assert!((ai.upper - 2.836).abs() < 1e-3);
    }

    #[test]
    fn interval_shrinks_with_alpha() {
        let d = n(5.0, 1.0);
        let wide = acceptance_interval(&d, alpha());
        let narrow = acceptance_interval(&d, BeliefLevel::new(0.1).unwrap());
        assert!(narrow.lower > wide.lower && narrow.upper < wide.upper);
    }

    #[test]
    fn outliers_example1() {
        assert_eq!(
            count_outliers(&EXAMPLE1_POP1, &interval(1.778, 7.223)),
            vec![3]
        );
        assert_eq!(
            count_outliers(&EXAMPLE1_POP2, &interval(2.132, 7.868)),
            vec![7, 33]
        );
        assert!(count_outliers(&EXAMPLE1_POP1, &interval(-1e300, 1e300)).is_empty());
    }

    #[test]
    fn boundary_points_are_inside() {
        let ai = interval(1.0, 2.0);
        assert_eq!(
            count_outliers(&[1.0, 2.0, 0.999_999, 2.000_001], &ai),
            vec![3, 4]
        );
    }

    #[test]
    fn thresholds() {
        let a = alpha();
        assert_eq!(rejection_threshold(144, a), 8);
        assert_eq!(rejection_threshold(6, a), 1);
        assert_eq!(rejection_threshold(60, a), 4);
        assert_eq!(rejection_threshold(7, a), 1);
        assert_eq!(rejection_threshold(20, a), 2);
        assert_eq!(rejection_threshold(30, BeliefLevel::new(0.1).unwrap()), 4);
        // 0.29 * 100 evaluates to 28.999999999999996.
        assert!(std::hint::black_box(0.29) * 100.0 < 29.0);
        assert_eq!(
            rejection_threshold(100, BeliefLevel::new(0.29).unwrap()),
            30
        );
    }

    #[test]
    fn single_test_dental_bank_one() {
        let d = single_test(&[2.8, 2.8, 2.9, 2.9, 2.9, 3.0], &n(2.883, 0.069), alpha()).unwrap();
        assert_eq!(d.outlier_count, 0);
        assert_eq!(d.threshold, 1);
        assert!(!d.rejected);
        assert_eq!(d.verdict(), "cannot be rejected");
    }

    #[test]
    fn single_test_at_median() {
        let d = n(3.0, 0.5);
        let decision = single_test(&[3.0; 9], &d, alpha()).unwrap();
        assert!(decision.outlier_indices.is_empty());
        assert!(!decision.rejected);
    }

    #[test]
    fn single_test_rejects_at_threshold() {
        // m = 20: threshold 2, two far points reject.
        let mut values = vec![0.0; 20];
        values[4] = 50.0;
        let one = single_test(&values, &n(0.0, 1.0), alpha()).unwrap();
        assert!(!one.rejected);
        values[9] = -50.0;
        let two = single_test(&values, &n(0.0, 1.0), alpha()).unwrap();
        assert_eq!(two.outlier_indices, vec![5, 10]);
        assert!(two.rejected);
        assert_eq!(two.verdict(), "rejected");
    }

    #[test]
    fn empty_sample_is_an_error() {
        assert!(single_test(&[], &n(0.0, 1.0), alpha()).is_err());
    }

    #[test]
    fn fit_and_verify_two_points() {
        let s = PopulationSample::unknown("x", vec![-1.0, 1.0]).unwrap();
        let (fit, d) = fit_and_verify(&s, alpha()).unwrap();
        assert_eq!((fit.e(), fit.sigma()), (0.0, 1.0));
        assert_eq!(d.threshold, 1);
        assert!((d.interval.upper - 2.02).abs() < 1e-2);
        assert!((d.interval.lower + 2.02).abs() < 1e-2);
        assert!(!d.rejected);
    }

    #[test]
    fn fit_and_verify_dental_banks() {
        let s3 = PopulationSample::unknown("3", vec![2.4, 2.4, 2.5, 2.6, 2.6, 2.6]).unwrap();
        let (fit, d) = fit_and_verify(&s3, alpha()).unwrap();
        assert!((fit.e() - 2.517).abs() < 1e-3 && (fit.sigma() - 0.090).abs() < 1e-3);
        assert!((d.interval.lower - 2.335).abs() < 1e-3);
        assert!((d.interval.upper - 2.698).abs() < 1e-3);
        assert_eq!(d.outlier_count, 0);

        let s6 = PopulationSample::unknown("6", vec![2.4, 2.4, 2.5, 2.5, 2.6, 2.6, 2.6]).unwrap();
        let (fit, d) = fit_and_verify(&s6, alpha()).unwrap();
        assert!((fit.e() - 2.514).abs() < 1e-3 && (fit.sigma() - 0.083).abs() < 1e-3);
        assert!((d.interval.lower - 2.346).abs() < 1e-3);
        assert!((d.interval.upper - 2.683).abs() < 1e-3);
        assert!(!d.rejected);
    }

    #[test]
    fn fit_and_verify_degenerate_names_population() {
        let s = PopulationSample::unknown("flat", vec![1.0; 4]).unwrap();
        match fit_and_verify(&s, alpha()) {
            Err(Error::DegenerateSample(msg)) => assert!(msg.contains("flat")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn sample_validation() {
        assert!(PopulationSample::unknown("", vec![1.0]).is_err());
        assert!(PopulationSample::unknown("a", vec![]).is_err());
        assert!(PopulationSample::unknown("a", vec![f64::NAN]).is_err());
        assert!(PopulationSample::new("a", vec![1.0], None, Some(-1.0)).is_err());
        assert!(PopulationSample::new("a", vec![1.0], Some(f64::INFINITY), None).is_err());
    }
}
