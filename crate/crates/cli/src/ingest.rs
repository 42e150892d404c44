//! Data ingestion: a long-format CSV with header `population,value`, one
//! observation per row, plus an optional TOML run configuration.

use std::fs;
use std::path::Path;

use indexmap::IndexMap;
use uncertest::PopulationSample;

use crate::config::RunConfig;
use crate::error::{CliError, Result};

pub const HEADER: [&str; 2] = ["population", "value"];

/// Observations grouped by population id, in order of first appearance.
/// Values keep file order within each population.
pub fn parse_data(text: &str) -> Result<IndexMap<String, Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let headers = reader
        .headers()
        .map_err(|e| CliError::Input(format!("cannot read header: {e}")))?
        .clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(CliError::Input("data file is empty".into()));
    }
    if headers.iter().ne(HEADER) {
        return Err(CliError::Input(format!(
            "expected header `population,value`, found `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }

    let mut out: IndexMap<String, Vec<f64>> = IndexMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Input(e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 2 {
            return Err(CliError::Input(format!(
                "line {line}: expected 2 fields, found {}",
                record.len()
            )));
        }
        let id = &record[0];
        if id.is_empty() {
            return Err(CliError::Input(format!("line {line}: empty population id")));
        }
        let value: f64 = record[1].parse().map_err(|_| {
            CliError::Input(format!("line {line}: `{}` is not a number", &record[1]))
        })?;
        if !value.is_finite() {
            return Err(CliError::Input(format!(
                "line {line}: value `{}` is not finite",
                &record[1]
            )));
        }
        out.entry(id.to_string()).or_default().push(value);
    }
    if out.is_empty() {
        return Err(CliError::Input("data file has no observations".into()));
    }
    Ok(out)
}

/// Attach the known parameters from `config` to the parsed observations.
pub fn build_samples(
    data: IndexMap<String, Vec<f64>>,
    config: &RunConfig,
) -> Result<Vec<PopulationSample>> {
    if let Some(missing) = config
        .populations
        .iter()
        .find(|p| !data.contains_key(&p.id))
    {
        return Err(CliError::Config(format!(
            "population `{}` is configured but has no observations",
            missing.id
        )));
    }
    data.into_iter()
        .map(|(id, values)| {
            let known = config.population(&id);
            PopulationSample::new(
                id.as_str(),
                values,
                known.and_then(|p| p.known_e),
                known.and_then(|p| p.known_sigma),
            )
            .map_err(|e| CliError::Config(format!("population `{id}`: {e}")))
        })
        .collect()
}

pub fn ingest_text(data: &str, config: Option<&str>) -> Result<(Vec<PopulationSample>, RunConfig)> {
    let config = match config {
        Some(text) => RunConfig::parse(text)?,
        None => RunConfig::default(),
    };
    let samples = build_samples(parse_data(data)?, &config)?;
    Ok((samples, config))
}

pub fn ingest(
    data_path: &Path,
    config_path: Option<&Path>,
) -> Result<(Vec<PopulationSample>, RunConfig)> {
    let data = fs::read_to_string(data_path).map_err(|e| CliError::io(data_path, e))?;
    let config = config_path
        .map(|p| fs::read_to_string(p).map_err(|e| CliError::io(p, e)))
        .transpose()?;
    ingest_text(&data, config.as_deref())
}

/// Serialise samples back to the long-format CSV accepted by [`parse_data`].
pub fn write_data(samples: &[PopulationSample]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(HEADER).expect("in-memory write");
    for s in samples {
        for v in s.values() {
            writer
                .write_record([s.id(), v.to_string().as_str()])
                .expect("in-memory write");
        }
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn groups_in_first_appearance_order() {
        let d = parse_data("population,value\nb,1\na,2\nb,3\n").unwrap();
        assert_eq!(d.keys().collect::<Vec<_>>(), vec!["b", "a"]);
        assert_eq!(d["b"], vec![1.0, 3.0]);
    }

    #[test]
    fn tolerates_whitespace_and_trailing_newlines() {
        let d = parse_data("population , value\n a , 1.5 \n\n").unwrap();
        assert_eq!(d["a"], vec![1.5]);
    }

    fn input_err(text: &str) -> String {
        match parse_data(text) {
            Err(CliError::Input(m)) => m,
            other => panic!("{text:?}: {other:?}"),
        }
    }

    #[test]
    fn malformed_rows_report_line() {
        assert!(input_err("population,value\na,1\na,x\n").contains("line 3"));
        assert!(input_err("population,value\na,1,2\n").contains("line 2"));
        assert!(input_err("population,value\na,NaN\n").contains("line 2"));
        assert!(input_err("population,value\n,1\n").contains("line 2"));
    }

    #[test]
    fn empty_and_headerless_files() {
        assert!(input_err("").contains("empty"));
        assert!(input_err("population,value\n").contains("no observations"));
        assert!(input_err("pop,val\na,1\n").contains("header"));
    }

    #[test]
    fn config_ids_must_exist_in_data() {
        let err = ingest_text(
            "population,value\na,1\na,2\n",
            Some("[[population]]\nid = \"b\"\nknown_e = 0.0\n"),
        )
        .unwrap_err();
        assert!(matches!(err, CliError::Config(m) if m.contains("`b`")));
    }

    #[test]
    fn unconfigured_ids_have_no_known_parameters() {
        let (s, _) = ingest_text(
            "population,value\na,1\na,2\nb,3\nb,4\n",
            Some("[[population]]\nid = \"a\"\nknown_sigma = 2.0\n"),
        )
        .unwrap();
        assert_eq!(s[0].known_sigma(), Some(2.0));
        assert_eq!((s[1].known_e(), s[1].known_sigma()), (None, None));
    }

    #[test]
    fn write_then_parse_is_identity() {
        let (s, _) = ingest_text("population,value\nx,0.1\nx,-3e-9\ny,1e300\n", None).unwrap();
        let (again, _) = ingest_text(&write_data(&s), None).unwrap();
        assert_eq!(s, again);
    }
}
