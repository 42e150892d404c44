//! Hypothesis testing for uncertain populations.
//!
//! The crate is organised bottom-up:
//!
//! - [`udist`]: the normal uncertainty distribution, its inverse and moment fitting.
//! - [`testing`]: acceptance intervals and single-population tests.
//! - [`multi`]: pairwise and homogeneity tests across populations, plus
//!   discovery of homogeneous subgroups.
//! - [`common`]: data adjustment, merging and the common test on a group.
//!
//! ```
//! use uncertest::{BeliefLevel, NormalUncertain};
//!
//! let d = NormalUncertain::new(5.146, 1.0).unwrap();
//! let upper = d.quantile(BeliefLevel::new(0.975).unwrap());
//! assert!((upper - 7.166).abs() < 1e-3);
//! ```

pub mod common;
pub mod error;
pub mod multi;
pub mod testing;
pub mod udist;

pub use common::{
    adjust_case_i, adjust_case_ii, common_test, merge, CommonCase, CommonTestResult, GroupMember,
    MergedSample, Origin, Theta0Source,
};
pub use error::{Error, Result};
pub use multi::{
    cross_interval, homogeneity_test, homogeneous_groups, pairwise_test, ufwer, HomogeneityResult,
    PairwiseDecision, ParameterCase,
};
pub use testing::{
    acceptance_interval, count_outliers, fit_and_verify, rejection_threshold, single_test,
    AcceptanceInterval, PopulationSample, TestDecision,
};
pub use udist::{fit_moments, nonembedded_check, std_quantile, BeliefLevel, NormalUncertain};
