//! The end-to-end run: fit and self-verify every population, test
//! homogeneity, enumerate groups, pick one and test it for a common
//! distribution.

use serde::{Deserialize, Serialize};
use uncertest::{
    common_test, fit_and_verify, homogeneity_test, GroupMember, HomogeneityResult, PopulationSample,
};

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::report::{
    verdict, CommonReport, HomogeneityReport, MatrixCell, MatrixRow, PairSummary, PopulationFit,
    RunReport, SCHEMA_VERSION,
};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Every stage.
    #[default]
    Pipeline,
    /// Per-population fits and self-tests only.
    Fit,
    /// Fits plus the homogeneity test and groups.
    Homogeneity,
    /// Fits plus the common test on the configured group (all populations
    /// when none is configured); homogeneity is skipped.
    Common,
}

impl Mode {
    fn tests_homogeneity(self) -> bool {
        matches!(self, Mode::Pipeline | Mode::Homogeneity)
    }

    fn tests_common(self) -> bool {
        matches!(self, Mode::Pipeline | Mode::Common)
    }
}

pub fn run_pipeline(samples: &[PopulationSample], config: &RunConfig) -> Result<RunReport> {
    run(samples, config, Mode::Pipeline)
}

pub fn run(samples: &[PopulationSample], config: &RunConfig, mode: Mode) -> Result<RunReport> {
    config.validate()?;
    let alpha = config.belief_level()?;
    if samples.is_empty() {
        return Err(CliError::Input("no populations to analyse".into()));
    }
    let case = config.case.resolve(samples)?;
    let mut warnings = Vec::new();

    let homogeneity = if mode.tests_homogeneity() && samples.len() >= 2 {
        Some(homogeneity_test(samples, case, alpha)?)
    } else if mode == Mode::Homogeneity {
        return Err(CliError::Config(
            "the homogeneity test needs at least two populations".into(),
        ));
    } else {
        if mode == Mode::Pipeline {
            warnings.push("only one population: homogeneity test skipped".to_string());
        }
        None
    };

    let fits = match &homogeneity {
        Some(h) => samples
            .iter()
            .map(|s| PopulationFit {
                id: s.id().to_string(),
                sample_size: s.len(),
                fit: h.fits[s.id()],
                self_test: h.self_tests[s.id()].clone(),
            })
            .collect(),
        None => samples
            .iter()
            .map(|s| {
                let (fit, self_test) = fit_and_verify(s, alpha)?;
                Ok(PopulationFit {
                    id: s.id().to_string(),
                    sample_size: s.len(),
                    fit,
                    self_test,
                })
            })
            .collect::<Result<Vec<_>>>()?,
    };
    for f in fits.iter().filter(|f| f.self_test.rejected) {
        warnings.push(format!(
            "population {} is not consistent with its own fitted distribution \
             ({} outliers, threshold {}); its fit is still used downstream",
            f.id, f.self_test.outlier_count, f.self_test.threshold
        ));
    }

    let mut selected_group = None;
    let mut common = None;
    if mode.tests_common() {
        let group = select_group(samples, config, homogeneity.as_ref(), &mut warnings)?;
        if group.len() == 1 {
            warnings.push(format!(
                "group {{{}}} has a single population; the common test reduces to its self-test",
                group[0]
            ));
        }
        let members: Vec<GroupMember> = group
            .iter()
            .map(|id| {
                let sample = samples.iter().find(|s| s.id() == id).expect("validated id");
                let fit = fits.iter().find(|f| &f.id == id).expect("validated id").fit;
                GroupMember { sample, fit }
            })
            .collect();
        let result = common_test(
            config.common_case.resolve(case),
            &members,
            alpha,
            config.theta0,
        )?;
        warnings.extend(result.warnings.iter().map(|w| format!("common test: {w}")));
        common = Some(CommonReport {
            verdict: verdict(result.decision.rejected).to_string(),
            outlier_origins: result.outlier_origins().into_iter().cloned().collect(),
            result,
        });
        selected_group = Some(group);
    }

    Ok(RunReport {
        schema_version: SCHEMA_VERSION,
        mode,
        config: config.clone(),
        populations: samples.to_vec(),
        case,
        fits,
        homogeneity: homogeneity.map(summarise),
        selected_group,
        common,
        warnings,
    })
}

/// The explicit group when configured, otherwise the unique largest group.
fn select_group(
    samples: &[PopulationSample],
    config: &RunConfig,
    homogeneity: Option<&HomogeneityResult>,
    warnings: &mut Vec<String>,
) -> Result<Vec<String>> {
    if let Some(group) = &config.group {
        if let Some(unknown) = group
            .iter()
            .find(|id| !samples.iter().any(|s| s.id() == id.as_str()))
        {
            return Err(CliError::Config(format!(
                "group member `{unknown}` is not a known population"
            )));
        }
        if let Some(h) = homogeneity {
            for (k, a) in group.iter().enumerate() {
                for b in &group[k + 1..] {
                    if h.pair(a, b).is_some_and(|p| !p.homogeneous) {
                        warnings.push(format!(
                            "selected group contains the non-homogeneous pair ({a}, {b})"
                        ));
                    }
                }
            }
        }
        return Ok(group.clone());
    }

    let Some(h) = homogeneity else {
        return Ok(samples.iter().map(|s| s.id().to_string()).collect());
    };
    let largest = h.groups.first().map_or(0, Vec::len);
    let tied: Vec<&Vec<String>> = h.groups.iter().filter(|g| g.len() == largest).collect();
    if tied.len() > 1 {
        let listed: Vec<String> = tied
            .iter()
            .map(|g| format!("{{{}}}", g.join(",")))
            .collect();
        return Err(CliError::Config(format!(
            "several largest groups tie: {}; choose one with `group`",
            listed.join(" ")
        )));
    }
    Ok(tied[0].clone())
}

fn summarise(h: HomogeneityResult) -> HomogeneityReport {
    let ids: Vec<String> = h.ids().map(str::to_string).collect();
    let matrix = ids
        .iter()
        .map(|data| MatrixRow {
            population: data.clone(),
            cells: ids
                .iter()
                .map(|source| MatrixCell {
                    source: source.clone(),
                    decision: h.decision(data, source).expect("complete matrix").clone(),
                })
                .collect(),
        })
        .collect();
    HomogeneityReport {
        alpha: h.alpha,
        ufwer: h.ufwer,
        rejected: h.rejected,
        verdict: verdict(h.rejected).to_string(),
        pairwise: h
            .pairwise
            .iter()
            .map(|p| PairSummary {
                i: p.i.clone(),
                j: p.j.clone(),
                homogeneous: p.homogeneous,
            })
            .collect(),
        matrix,
        groups: h.groups,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::ingest_text;

    fn pops(text: &str) -> (Vec<PopulationSample>, RunConfig) {
        ingest_text(text, None).unwrap()
    }

    #[test]
    fn single_population_pipeline() {
        let (s, c) = pops("population,value\na,1\na,2\na,3\na,4\n");
        let r = run_pipeline(&s, &c).unwrap();
        assert!(r.homogeneity.is_none());
        assert_eq!(r.selected_group.as_deref(), Some(&["a".to_string()][..]));
        assert_eq!(r.common.unwrap().result.decision, r.fits[0].self_test);
        assert_eq!(r.warnings.len(), 2);
    }

    #[test]
    fn homogeneity_mode_needs_two() {
        let (s, c) = pops("population,value\na,1\na,2\n");
        assert!(matches!(
            run(&s, &c, Mode::Homogeneity),
            Err(CliError::Config(_))
        ));
    }

    #[test]
    fn fit_mode_stops_early() {
        let (s, c) = pops("population,value\na,1\na,2\nb,1\nb,3\n");
        let r = run(&s, &c, Mode::Fit).unwrap();
        assert!(r.homogeneity.is_none() && r.common.is_none() && r.selected_group.is_none());
        assert_eq!(r.fits.len(), 2);
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn common_mode_defaults_to_every_population() {
        let (s, c) = pops("population,value\na,1\na,2\nb,1\nb,3\n");
        let r = run(&s, &c, Mode::Common).unwrap();
        assert!(r.homogeneity.is_none());
        assert_eq!(r.common.unwrap().result.merged.len(), 4);
    }

    #[test]
    fn ties_need_an_explicit_group() {
        // Two tight, well-separated clusters: {a, b} and {c, d}.
        let mut text = String::from("population,value\n");
        for (id, base) in [("a", 0.0), ("b", 0.0), ("c", 100.0), ("d", 100.0)] {
            for k in 0..10 {
                text.push_str(&format!("{id},{}\n", base + k as f64 * 0.1));
            }
        }
        let (s, mut c) = pops(&text);
        let err = run_pipeline(&s, &c).unwrap_err();
        assert!(
            matches!(&err, CliError::Config(m) if m.contains("{a,b}") && m.contains("{c,d}")),
            "{err}"
        );

        c.group = Some(vec!["c".into(), "d".into()]);
        let r = run_pipeline(&s, &c).unwrap();
        assert_eq!(r.selected_group.unwrap(), vec!["c", "d"]);

        c.group = Some(vec!["a".into(), "c".into()]);
        let r = run_pipeline(&s, &c).unwrap();
        assert!(r.warnings.iter().any(|w| w.contains("(a, c)")));

        c.group = Some(vec!["zz".into()]);
        assert!(matches!(run_pipeline(&s, &c), Err(CliError::Config(_))));
    }

    #[test]
    fn degenerate_population_is_numeric_failure() {
        let (s, c) = pops("population,value\na,1\na,1\nb,1\nb,2\n");
        let err = run_pipeline(&s, &c).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }
}
