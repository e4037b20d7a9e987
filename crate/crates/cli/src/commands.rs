use std::path::Path;

use rayon::prelude::*;
use weakpdc::checks::{all_passed, run_checks, CheckOptions};
use weakpdc::setup::{two_prep_protocol, SetupConfig};
use weakpdc::{recover_weak_values, recover_weak_values_lsq, run_experiment, Recovery, ShiftRecord};

use crate::args::{CheckArgs, Format, InvertArgs, OutputArgs, RunArgs, SweepArgs};
use crate::config::{apply_axis, resolve, Axis, ProtocolSpreads};
use crate::error::{CliError, CliResult};
use crate::report::{
    experiment_csv, json_bytes, protocol_csv, write_output, CheckReport, InversionReport, ReportFile, Row,
};

fn format_of(out: &OutputArgs) -> Format {
    out.format.unwrap_or_else(|| match out.out.as_ref().and_then(|p| p.extension()) {
        Some(ext) if ext == "json" => Format::Json,
        _ => Format::Csv,
    })
}

/// A single run: numerical failures are fatal here, unlike in a sweep.
pub fn run(args: &RunArgs) -> CliResult<()> {
    let cfg = resolve(&args.setup)?;
    let report = run_experiment(&cfg)?;
    let file = ReportFile::new("run", cfg.clone(), Vec::new(), vec![Row::new(0, cfg, None, Ok(report))]);
    let bytes = match format_of(&args.output) {
        Format::Csv => experiment_csv(&file)?,
        Format::Json => json_bytes(&file)?,
    };
    write_output(args.output.out.as_deref(), &bytes)
}

/// Lexicographic Cartesian grid: the first axis varies slowest.
pub fn grid(base: &SetupConfig, spreads: ProtocolSpreads, axes: &[Axis]) -> Vec<(SetupConfig, ProtocolSpreads)> {
    let mut points = vec![(base.clone(), spreads)];
    for axis in axes {
        let values = axis.values();
        points = points
            .into_iter()
            .flat_map(|(cfg, sp)| {
                values.iter().map(move |&v| {
                    let (mut c, mut s) = (cfg.clone(), sp);
                    apply_axis(&mut c, &mut s, &axis.name, v);
                    (c, s)
                })
            })
            .collect();
    }
    points
}

pub fn parse_axes(specs: &[String], protocol: bool) -> CliResult<Vec<Axis>> {
    if specs.is_empty() || specs.len() > 2 {
        return Err(CliError::config(format!("expected one or two --sweep axes, got {}", specs.len())));
    }
    let axes: Vec<Axis> = specs.iter().map(|s| s.parse()).collect::<CliResult<_>>()?;
    if axes.len() == 2 && axes[0].name == axes[1].name {
        return Err(CliError::config(format!("axis '{}' given twice", axes[0].name)));
    }
    if !protocol {
        if let Some(a) = axes.iter().find(|a| a.name == "dq1" || a.name == "dq2") {
            return Err(CliError::config(format!("axis '{}' needs --protocol", a.name)));
        }
    }
    Ok(axes)
}

pub fn sweep(args: &SweepArgs) -> CliResult<()> {
    let base = resolve(&args.setup)?;
    let axes = parse_axes(&args.sweep, args.protocol)?;
    let spreads = ProtocolSpreads { dq1: args.dq1, dq2: args.dq2 };
    let points = grid(&base, spreads, &axes);
    let format = format_of(&args.output);
    // Points are validated individually so one bad value only flags its row.
    let bytes = if args.protocol {
        let rows: Vec<_> = points
            .into_par_iter()
            .enumerate()
            .map(|(i, (cfg, sp))| {
                let res = cfg.validate().and_then(|_| two_prep_protocol(&cfg, sp.dq1, sp.dq2));
                Row::new(i, cfg, Some(sp), res)
            })
            .collect();
        let file = ReportFile::new("protocol_sweep", base, axes, rows);
        match format {
            Format::Csv => protocol_csv(&file)?,
            Format::Json => json_bytes(&file)?,
        }
    } else {
        let rows: Vec<_> = points
            .into_par_iter()
            .enumerate()
            .map(|(i, (cfg, _))| {
                let res = cfg.validate().and_then(|_| run_experiment(&cfg));
                Row::new(i, cfg, None, res)
            })
            .collect();
        let file = ReportFile::new("sweep", base, axes, rows);
        match format {
            Format::Csv => experiment_csv(&file)?,
            Format::Json => json_bytes(&file)?,
        }
    };
    write_output(args.output.out.as_deref(), &bytes)
}

/// Reads shift records from a JSON array or a CSV with a header row.
pub fn read_records(path: &Path) -> CliResult<Vec<ShiftRecord>> {
    let io = |e: std::io::Error| CliError::Io { path: path.display().to_string(), source: e };
    let text = std::fs::read_to_string(path).map_err(io)?;
    let bad = |e: String| CliError::config(format!("records {}: {e}", path.display()));
    if text.trim_start().starts_with('[') {
        return serde_json::from_str(&text).map_err(|e| bad(e.to_string()));
    }
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    rdr.deserialize().collect::<Result<Vec<ShiftRecord>, _>>().map_err(|e| bad(e.to_string()))
}

pub fn invert(args: &InvertArgs) -> CliResult<()> {
    let records = read_records(&args.records)?;
    if records.len() < 2 {
        return Err(CliError::config(format!("need at least two records, got {}", records.len())));
    }
    let rec = if records.len() == 2 {
        let (a_w, b_w) = recover_weak_values(&records[0], &records[1], args.g)?;
        Recovery { a_w, b_w, residual: 0.0 }
    } else {
        recover_weak_values_lsq(&records, args.g)?
    };
    let report = InversionReport::new(&rec, records.len(), args.g);
    let bytes = match format_of(&args.output) {
        Format::Csv => report.csv()?,
        Format::Json => json_bytes(&report)?,
    };
    write_output(args.output.out.as_deref(), &bytes)
}

pub fn check(args: &CheckArgs) -> CliResult<()> {
    let opts = CheckOptions { seed: args.seed, cutoff_override: args.cutoff };
    let outcomes = run_checks(&opts);
    let report_wanted = args.output.out.is_some() || args.output.format.is_some();
    // The table goes to stderr only when stdout carries the report itself.
    let table_to_stderr = report_wanted && args.output.out.is_none();
    for c in &outcomes {
        let status = if c.passed { "PASS" } else { "FAIL" };
        let detail = c.error.as_deref().map(|e| format!(" ({e})")).unwrap_or_default();
        let line = format!(
            "{status} {:<40} observed={:.3e} tolerance={:.3e} margin={:.3e}{detail}",
            c.name, c.observed, c.tolerance, c.margin
        );
        if table_to_stderr {
            eprintln!("{line}");
        } else {
            println!("{line}");
        }
    }
    let failed = outcomes.iter().filter(|c| !c.passed).count();
    let report = CheckReport {
        schema_version: crate::report::SCHEMA_VERSION,
        seed: args.seed,
        cutoff_override: args.cutoff,
        passed: all_passed(&outcomes),
        checks: outcomes,
    };
    if report_wanted {
        let bytes = match format_of(&args.output) {
            Format::Csv => report.csv()?,
            Format::Json => json_bytes(&report)?,
        };
        write_output(args.output.out.as_deref(), &bytes)?;
    }
    if failed > 0 {
        return Err(CliError::CheckFailed(failed));
    }
    Ok(())
}
