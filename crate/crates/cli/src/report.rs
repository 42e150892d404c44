//! The run report and its two renderings: a human-readable text layout and
//! a structured JSON document that parses back to the same value.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use uncertest::{
    BeliefLevel, CommonTestResult, NormalUncertain, Origin, ParameterCase, PopulationSample,
    TestDecision, Theta0Source,
};

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::pipeline::Mode;

pub const SCHEMA_VERSION: u32 = 1;

pub fn verdict(rejected: bool) -> &'static str {
    if rejected {
        "rejected"
    } else {
        "cannot be rejected"
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationFit {
    pub id: String,
    pub sample_size: usize,
    pub fit: NormalUncertain,
    pub self_test: TestDecision,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixCell {
    /// Population whose fitted distribution produced the interval.
    pub source: String,
    pub decision: TestDecision,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixRow {
    /// Population whose data is tested.
    pub population: String,
    pub cells: Vec<MatrixCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairSummary {
    pub i: String,
    pub j: String,
    pub homogeneous: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomogeneityReport {
    pub alpha: BeliefLevel,
    pub ufwer: BeliefLevel,
    pub rejected: bool,
    pub verdict: String,
    pub matrix: Vec<MatrixRow>,
    pub pairwise: Vec<PairSummary>,
    pub groups: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommonReport {
    pub verdict: String,
    /// Source population and 1-based within-population index of each
    /// merged-sample outlier.
    pub outlier_origins: Vec<Origin>,
    pub result: CommonTestResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub mode: Mode,
    pub config: RunConfig,
    /// Input echo; enough to re-run the analysis from the report alone.
    pub populations: Vec<PopulationSample>,
    pub case: ParameterCase,
    pub fits: Vec<PopulationFit>,
    #[serde(default)]
    pub homogeneity: Option<HomogeneityReport>,
    #[serde(default)]
    pub selected_group: Option<Vec<String>>,
    #[serde(default)]
    pub common: Option<CommonReport>,
    pub warnings: Vec<String>,
}

impl RunReport {
    pub fn to_structured(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is always serialisable");
        s.push('\n');
        s
    }

    pub fn from_structured(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("invalid report: {e}")))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "alpha = {}   case: {}   populations: {}",
            fmt3(self.config.alpha),
            self.case.label(),
            self.fits.len()
        );

        out.push_str("\nPopulation fits\n");
        let mut rows = vec![cells([
            "z(i)",
            "e_i0",
            "sigma_i0",
            "AI(z(i); e_i0, sigma_i0)",
            "singular points",
        ])];
        for f in &self.fits {
            rows.push(vec![
                format!("z({})", f.id),
                fmt3(f.fit.e()),
                fmt3(f.fit.sigma()),
                fmt_interval(&f.self_test),
                fmt_positions(&f.self_test.outlier_indices),
            ]);
        }
        out.push_str(&table(&rows));

        if let Some(h) = &self.homogeneity {
            out.push_str("\nAcceptance intervals (rows: data, columns: fitted distribution)\n");
            let mut header = vec![String::new()];
            header.extend(
                h.matrix
                    .iter()
                    .map(|r| format!("AI(z(i); theta_{}0)", r.population)),
            );
            let mut intervals = vec![header.clone()];
            let mut singular = vec![header];
            for row in &h.matrix {
                let mut a = vec![format!("z({})", row.population)];
                let mut b = a.clone();
                for c in &row.cells {
                    a.push(fmt_interval(&c.decision));
                    b.push(format!(
                        "{} ({}/{})",
                        fmt_positions(&c.decision.outlier_indices),
                        c.decision.outlier_count,
                        c.decision.threshold
                    ));
                }
                intervals.push(a);
                singular.push(b);
            }
            out.push_str(&table(&intervals));
            out.push_str("\nSingular points (count/threshold)\n");
            out.push_str(&table(&singular));

            let _ = writeln!(
                out,
                "\nHomogeneity: H0 {} at UFWER {}",
                h.verdict,
                fmt3(h.ufwer.value())
            );
            let groups: Vec<String> = h.groups.iter().map(|g| fmt_group(g)).collect();
            let _ = writeln!(out, "Groups: {}", groups.join(" "));
        }

        if let Some(c) = &self.common {
            let r = &c.result;
            let _ = writeln!(
                out,
                "\nCommon test (case {}) on group {}",
                r.case.label(),
                fmt_group(&r.group)
            );
            let source = match r.theta0_source {
                Theta0Source::Merged => "estimated from the merged sample",
                Theta0Source::Override => "given",
            };
            let _ = writeln!(
                out,
                "theta0: e = {}, sigma = {} ({source})",
                fmt3(r.theta0.e()),
                fmt3(r.theta0.sigma())
            );
            let _ = writeln!(
                out,
                "N = {}   AI = {}   threshold = {}",
                r.merged.len(),
                fmt_interval(&r.decision),
                r.decision.threshold
            );
            let origins: Vec<String> = r
                .decision
                .outlier_indices
                .iter()
                .zip(&c.outlier_origins)
                .map(|(p, o)| format!("{p} (z({})#{})", o.population, o.index))
                .collect();
            let _ = writeln!(
                out,
                "singular points: {}",
                if origins.is_empty() {
                    "none".to_string()
                } else {
                    origins.join(", ")
                }
            );
            let _ = writeln!(out, "Common distribution: H0* {}", c.verdict);
        }

        if !self.warnings.is_empty() {
            out.push_str("\nWarnings\n");
            for w in &self.warnings {
                let _ = writeln!(out, "- {w}");
            }
        }
        out
    }
}

/// Three decimals, halves rounded away from zero.
pub fn fmt3(x: f64) -> String {
    let r = (x * 1000.0).round() / 1000.0;
    // Avoid printing "-0.000".
    format!("{:.3}", if r == 0.0 { 0.0 } else { r })
}

fn fmt_interval(d: &TestDecision) -> String {
    format!("[{}, {}]", fmt3(d.interval.lower), fmt3(d.interval.upper))
}

fn fmt_positions(p: &[usize]) -> String {
    if p.is_empty() {
        "none".into()
    } else {
        p.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
    }
}

fn fmt_group(g: &[String]) -> String {
    format!("{{{}}}", g.join(","))
}

fn cells<const N: usize>(c: [&str; N]) -> Vec<String> {
    c.iter().map(|s| s.to_string()).collect()
}

fn table(rows: &[Vec<String>]) -> String {
    let columns = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..columns)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r.get(c))
                .map(|s| s.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for row in rows {
        let line: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(c, s)| format!("{s:<width$}", width = widths[c]))
            .collect();
        out.push_str(line.join("   ").trim_end());
        out.push('\n');
    }
    out
}
