//! Per-point plotting data: one row for every observation under every
//! acceptance interval it was tested against.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use uncertest::{PopulationSample, TestDecision};

use crate::error::{CliError, Result};
use crate::report::RunReport;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlotRow {
    pub population: String,
    /// 1-based position within the population.
    pub index: usize,
    pub value: f64,
    /// Population whose fitted distribution produced the interval.
    pub interval_source: String,
    pub lower: f64,
    pub upper: f64,
    pub is_outlier: bool,
}

/// Rows for the full interval matrix when the homogeneity test ran, and for
/// the self-test intervals otherwise.
pub fn plot_rows(report: &RunReport, samples: &[PopulationSample]) -> Result<Vec<PlotRow>> {
    let mut rows = Vec::new();
    for s in samples {
        let tests: Vec<(&str, &TestDecision)> = match &report.homogeneity {
            Some(h) => h.matrix.iter().find(|r| r.population == s.id()).map(|r| {
                r.cells
                    .iter()
                    .map(|c| (c.source.as_str(), &c.decision))
                    .collect()
            }),
            None => report
                .fits
                .iter()
                .find(|f| f.id == s.id())
                .map(|f| vec![(f.id.as_str(), &f.self_test)]),
        }
        .ok_or_else(|| CliError::Input(format!("population `{}` is not in the report", s.id())))?;

        for (source, decision) in tests {
            for (k, &value) in s.values().iter().enumerate() {
                rows.push(PlotRow {
                    population: s.id().to_string(),
                    index: k + 1,
                    value,
                    interval_source: source.to_string(),
                    lower: decision.interval.lower,
                    upper: decision.interval.upper,
                    is_outlier: decision.outlier_indices.binary_search(&(k + 1)).is_ok(),
                });
            }
        }
    }
    Ok(rows)
}

pub fn write_plot_rows<W: Write>(rows: &[PlotRow], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    if rows.is_empty() {
        writer
            .write_record([
                "population",
                "index",
                "value",
                "interval_source",
                "lower",
                "upper",
                "is_outlier",
            ])
            .map_err(|e| CliError::Input(e.to_string()))?;
    }
    for r in rows {
        writer
            .serialize(r)
            .map_err(|e| CliError::Input(e.to_string()))?;
    }
    writer.flush().map_err(|e| CliError::Input(e.to_string()))?;
    Ok(())
}

pub fn emit_plot_data(
    report: &RunReport,
    samples: &[PopulationSample],
    path: &Path,
) -> Result<usize> {
    let rows = plot_rows(report, samples)?;
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    write_plot_rows(&rows, file).map_err(|e| match e {
        CliError::Input(m) => CliError::io(path, std::io::Error::other(m)),
        other => other,
    })?;
    Ok(rows.len())
}
