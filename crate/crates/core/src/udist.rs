//! Normal uncertainty distribution.
//!
//! `N(e, σ)` has the logistic-shaped belief function
//!
//! ```text
//! Φ(z; e, σ) = 1 / (1 + exp(π (e − z) / (√3 σ)))
//! ```
//!
//! and the closed-form inverse `Φ⁻¹(α; e, σ) = e + σ Φ₀⁻¹(α)` where
//! `Φ₀⁻¹(α) = (√3 / π) ln(α / (1 − α))` is the standard inverse.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `√3 / π`, the scale factor of the standard inverse distribution.
const SQRT3_OVER_PI: f64 = 0.551_328_895_421_792_1;

/// A belief level strictly inside `(0, 1)`.
///
/// Used both for significance levels `α` and for quantile arguments.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct BeliefLevel(f64);

impl BeliefLevel {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha > 0.0 && alpha < 1.0 {
            Ok(Self(alpha))
        } else {
            Err(Error::Domain(format!(
                "belief level must lie in (0, 1), got {alpha}"
            )))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// `α / 2`, the lower tail level of a two-sided acceptance interval.
    pub fn lower_tail(self) -> Self {
        Self(self.0 / 2.0)
    }

    /// `1 − α / 2`, the upper tail level of a two-sided acceptance interval.
    pub fn upper_tail(self) -> Self {
        Self(1.0 - self.0 / 2.0)
    }

    /// `1 − α`.
    pub fn complement(self) -> Self {
        Self(1.0 - self.0)
    }
}

impl TryFrom<f64> for BeliefLevel {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

impl From<BeliefLevel> for f64 {
    fn from(level: BeliefLevel) -> f64 {
        level.0
    }
}

/// Normal uncertainty distribution with location `e` and scale `sigma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawNormal")]
pub struct NormalUncertain {
    e: f64,
    sigma: f64,
}

#[derive(Deserialize)]
struct RawNormal {
    e: f64,
    sigma: f64,
}

impl TryFrom<RawNormal> for NormalUncertain {
    type Error = Error;

    fn try_from(raw: RawNormal) -> Result<Self> {
        Self::new(raw.e, raw.sigma)
    }
}

impl NormalUncertain {
    pub fn new(e: f64, sigma: f64) -> Result<Self> {
        if !e.is_finite() || !sigma.is_finite() {
            return Err(Error::Domain(format!(
                "distribution parameters must be finite, got e={e}, sigma={sigma}"
            )));
        }
        if sigma <= 0.0 {
            return Err(Error::Domain(format!(
                "sigma must be positive, got {sigma}"
            )));
        }
        Ok(Self { e, sigma })
    }

    #[inline]
    pub fn e(&self) -> f64 {
        self.e
    }

    #[inline]
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Belief degree `M{ξ ≤ z}`.
    ///
    /// Mathematically strictly inside `(0, 1)`; in floating point it
    /// saturates to `0` or `1` once `|z − e|` exceeds roughly `400 σ`.
    pub fn cdf(&self, z: f64) -> Result<f64> {
        if !z.is_finite() {
            return Err(Error::Domain(format!(
                "cdf argument must be finite, got {z}"
            )));
        }
        let t = PI * (self.e - z) / (3f64.sqrt() * self.sigma);
        Ok(1.0 / (1.0 + t.exp()))
    }

    /// Inverse uncertainty distribution `Φ⁻¹(α; e, σ)`.
    pub fn quantile(&self, alpha: BeliefLevel) -> f64 {
        self.e + self.sigma * std_quantile(alpha)
    }
}

/// Standard inverse distribution `Φ₀⁻¹(α) = (√3/π) ln(α / (1 − α))`.
pub fn std_quantile(alpha: BeliefLevel) -> f64 {
    let a = alpha.value();
    // ln(1 - a) via ln_1p keeps precision for small a.
    SQRT3_OVER_PI * (a.ln() - (-a).ln_1p())
}

/// Moment estimate of a normal uncertainty distribution.
///
/// A known location replaces the sample mean and also becomes the centre
/// of the second moment. A known scale is used as is. The scale estimate
/// uses divisor `m`, not `m − 1`.
pub fn fit_moments(
    values: &[f64],
    known_e: Option<f64>,
    known_sigma: Option<f64>,
) -> Result<NormalUncertain> {
    if values.is_empty() {
        return Err(Error::Argument("cannot fit an empty sample".into()));
    }
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::Argument(format!(
            "sample contains non-finite value {bad}"
        )));
    }
    if let Some(s) = known_sigma {
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::Argument(format!(
                "known sigma must be positive, got {s}"
            )));
        }
    }
    let m = values.len() as f64;
    let e = known_e.unwrap_or_else(|| values.iter().sum::<f64>() / m);
    let sigma = match known_sigma {
        Some(s) => s,
        None => {
            let s = (values.iter().map(|z| (z - e).powi(2)).sum::<f64>() / m).sqrt();
            if s == 0.0 {
                return Err(Error::DegenerateSample(format!(
                    "{} values all equal to {e}",
                    values.len()
                )));
            }
            s
        }
    };
    NormalUncertain::new(e, sigma)
}

/// Grid witness for the nonembedded condition.
///
/// `inv_null` is the inverse distribution at the hypothesised parameter and
/// `inv_alt` at an alternative. Returns `true` if some grid point
/// `β_k = (k / grid_size) · α/2`, `k = 1..=grid_size`, satisfies
/// `Φ⁻¹(β; θ₀) > Φ⁻¹(β; θ)` or `Φ⁻¹(1 − β; θ) > Φ⁻¹(1 − β; θ₀)`.
///
/// A `true` answer exhibits a witness. A `false` answer only says none of
/// the grid points is one; it does not prove the condition fails on all of
/// `(0, α/2]`.
pub fn nonembedded_check<F, G>(
    inv_null: F,
    inv_alt: G,
    alpha: BeliefLevel,
    grid_size: usize,
) -> Result<bool>
where
    F: Fn(BeliefLevel) -> f64,
    G: Fn(BeliefLevel) -> f64,
{
    if grid_size < 2 {
        return Err(Error::Argument(format!(
            "grid size must be at least 2, got {grid_size}"
        )));
    }
    let half = alpha.value() / 2.0;
    let witness = (1..=grid_size).any(|k| {
        let beta = BeliefLevel(k as f64 / grid_size as f64 * half);
        let beta_hi = beta.complement();
        inv_null(beta) > inv_alt(beta) || inv_alt(beta_hi) > inv_null(beta_hi)
    });
    Ok(witness)
}
