use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use uncertest::NormalUncertain;
use uncertest_cli::{emit_plot_data, ingest, run, CliError, Mode, Result};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Structured,
}

/// Test several samples for homogeneity and for a common normal uncertainty
/// distribution.
#[derive(Debug, Parser)]
#[command(name = "uncertest", version)]
struct Args {
    /// Long-format CSV with header `population,value`.
    #[arg(long)]
    data: PathBuf,

    /// TOML run configuration (significance level, case, known parameters).
    #[arg(long)]
    config: Option<PathBuf>,

    /// Significance level; overrides the configuration.
    #[arg(long)]
    alpha: Option<f64>,

    /// Write the report here instead of standard output.
    #[arg(long)]
    report: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "text")]
    format: Format,

    /// Write per-point plotting data (CSV) to this path.
    #[arg(long)]
    plot_data: Option<PathBuf>,

    /// Comma-separated population ids for the common test.
    #[arg(long, value_delimiter = ',')]
    group: Option<Vec<String>>,

    /// Fixed `e,sigma` for the common test instead of the merged estimate.
    #[arg(long, value_parser = parse_theta0)]
    theta0: Option<NormalUncertain>,

    #[arg(long, value_enum, default_value = "pipeline")]
    mode: Mode,
}

fn parse_theta0(s: &str) -> std::result::Result<NormalUncertain, String> {
    let (e, sigma) = s.split_once(',').ok_or("expected `e,sigma`")?;
    let e: f64 = e
        .trim()
        .parse()
        .map_err(|_| format!("`{e}` is not a number"))?;
    let sigma: f64 = sigma
        .trim()
        .parse()
        .map_err(|_| format!("`{sigma}` is not a number"))?;
    NormalUncertain::new(e, sigma).map_err(|e| e.to_string())
}

fn execute(args: Args) -> Result<()> {
    let (samples, mut config) = ingest(&args.data, args.config.as_deref())?;
    if let Some(alpha) = args.alpha {
        config.alpha = alpha;
    }
    if let Some(group) = args.group {
        config.group = Some(group);
    }
    if let Some(theta0) = args.theta0 {
        config.theta0 = Some(theta0);
    }

    let report = run(&samples, &config, args.mode)?;
    let rendered = match args.format {
        Format::Text => report.to_text(),
        Format::Structured => report.to_structured(),
    };
    match &args.report {
        Some(path) => fs::write(path, rendered).map_err(|e| CliError::io(path, e))?,
        None => print!("{rendered}"),
    }
    if let Some(path) = &args.plot_data {
        emit_plot_data(&report, &samples, path)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
