//! Report schema: flat CSV rows (complex values as re/im column pairs, floats
//! with 17 significant digits) or one JSON document, always written
//! atomically.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use weakpdc::checks::CheckOutcome;
use weakpdc::setup::{ExperimentReport, ProtocolReport, SetupConfig};
use weakpdc::weak::{Flag, Recovery};
use weakpdc::WeakValue;

use crate::config::{Axis, ProtocolSpreads};
use crate::error::{core_error_kind, CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

/// Named cells of one CSV row, in column order.
pub type Fields = Vec<(&'static str, String)>;

type Getter<'a> = &'a dyn Fn(&ExperimentReport) -> Option<f64>;
type FlagGetter = fn(&ExperimentReport) -> Flag;

/// One grid point: its configuration and either a result or a failure.
#[derive(Clone, Debug, Serialize)]
pub struct Row<T> {
    pub index: usize,
    pub config: SetupConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spreads: Option<[f64; 2]>,
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error_kind: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<T>,
}

impl<T> Row<T> {
    pub fn new(index: usize, config: SetupConfig, spreads: Option<ProtocolSpreads>, result: weakpdc::Result<T>) -> Self {
        let spreads = spreads.map(|s| [s.dq1, s.dq2]);
        match result {
            Ok(report) => Row { index, config, spreads, status: "ok", error_kind: None, error: None, report: Some(report) },
            Err(e) => Row {
                index,
                config,
                spreads,
                status: "error",
                error_kind: Some(core_error_kind(&e)),
                error: Some(e.to_string()),
                report: None,
            },
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Summary {
    pub points: usize,
    pub failed: usize,
    pub flags_pass: usize,
    pub flags_warn: usize,
    pub flags_fail: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportFile<T> {
    pub schema_version: u32,
    pub kind: &'static str,
    pub config: SetupConfig,
    pub axes: Vec<Axis>,
    pub rows: Vec<Row<T>>,
    pub summary: Summary,
}

pub trait Flagged {
    fn overall_flag(&self) -> Flag;
}

impl Flagged for ExperimentReport {
    fn overall_flag(&self) -> Flag {
        self.diagnostics.overall()
    }
}

impl Flagged for ProtocolReport {
    fn overall_flag(&self) -> Flag {
        self.runs.iter().map(|r| r.diagnostics.overall()).max().unwrap_or(Flag::Pass)
    }
}

impl<T: Flagged> ReportFile<T> {
    pub fn new(kind: &'static str, config: SetupConfig, axes: Vec<Axis>, rows: Vec<Row<T>>) -> Self {
        let mut summary = Summary { points: rows.len(), ..Summary::default() };
        for row in &rows {
            match &row.report {
                None => summary.failed += 1,
                Some(r) => match r.overall_flag() {
                    Flag::Pass => summary.flags_pass += 1,
                    Flag::Warn => summary.flags_warn += 1,
                    Flag::Fail => summary.flags_fail += 1,
                },
            }
        }
        ReportFile { schema_version: SCHEMA_VERSION, kind, config, axes, rows, summary }
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn complex(out: &mut Fields, re: &'static str, im: &'static str, w: Option<WeakValue>) {
    out.push((re, opt(w.map(|w| w.re()))));
    out.push((im, opt(w.map(|w| w.im()))));
}

fn config_fields(cfg: &SetupConfig) -> Fields {
    vec![
        ("alpha_re", num(cfg.alpha_re)),
        ("alpha_im", num(cfg.alpha_im)),
        ("epsilon", num(cfg.epsilon)),
        ("g", num(cfg.g)),
        ("phi", num(cfg.phi)),
        ("meter_dq", num(cfg.meter_dq)),
        ("meter_q0", num(cfg.meter_q0)),
        ("meter_p0", num(cfg.meter_p0)),
        ("meter_angle", num(cfg.meter_angle)),
        ("postselect", cfg.postselect.as_str().to_string()),
        ("eta", num(cfg.eta)),
        ("cutoff_s_prime", cfg.cutoff_s_prime.to_string()),
        ("cutoff_s", cfg.cutoff_s.to_string()),
        ("cutoff_d", cfg.cutoff_d.to_string()),
        ("n_readouts", cfg.n_readouts.to_string()),
    ]
}

fn row_head<T>(row: &Row<T>) -> Fields {
    let mut f = vec![
        ("schema_version", SCHEMA_VERSION.to_string()),
        ("index", row.index.to_string()),
        ("status", row.status.to_string()),
        ("error_kind", row.error_kind.unwrap_or("").to_string()),
        ("error", row.error.clone().unwrap_or_default()),
    ];
    f.extend(config_fields(&row.config));
    f
}

/// Columns of an experiment row; with `None` every value is blank, so the
/// column set never depends on the outcome.
pub fn experiment_fields(r: Option<&ExperimentReport>) -> Fields {
    let mut f = Vec::new();
    let get = |g: Getter| r.and_then(g);
    f.push(("cutoff_d_used", r.map(|r| r.cutoffs[2].to_string()).unwrap_or_default()));
    let wv = r.map(|r| r.weak_values);
    complex(&mut f, "a_w_re", "a_w_im", wv.map(|w| w.a_numeric));
    complex(&mut f, "b_w_re", "b_w_im", wv.map(|w| w.b_numeric));
    complex(&mut f, "a_w_closed_re", "a_w_closed_im", wv.and_then(|w| w.a_closed));
    complex(&mut f, "b_w_closed_re", "b_w_closed_im", wv.and_then(|w| w.b_closed));
    let cols: [(&'static str, Getter); 46] = [
        ("dq_exact", &|r| Some(r.shifts.dq_exact)),
        ("dp_exact", &|r| Some(r.shifts.dp_exact)),
        ("dq_first_order", &|r| Some(r.shifts.dq_first_order)),
        ("dp_first_order", &|r| Some(r.shifts.dp_first_order)),
        ("dq_closed", &|r| r.shifts.dq_closed),
        ("dp_closed", &|r| r.shifts.dp_closed),
        ("dq0_exact", &|r| Some(r.unconditioned.exact_first_order.dq0_exact)),
        ("dp0_exact", &|r| Some(r.unconditioned.exact_first_order.dp0_exact)),
        ("dq0_first_order", &|r| Some(r.unconditioned.exact_first_order.dq0_first_order)),
        ("dp0_first_order", &|r| Some(r.unconditioned.exact_first_order.dp0_first_order)),
        ("dq0_closed", &|r| r.unconditioned.dq0_closed),
        ("dp0_closed", &|r| r.unconditioned.dp0_closed),
        ("p_exact", &|r| Some(r.probability.exact)),
        ("p_first_order", &|r| Some(r.probability.first_order)),
        ("p_closed", &|r| r.probability.closed),
        ("overlap_sq", &|r| Some(r.probability.overlap_sq)),
        ("k_q", &|r| r.amplification.k_q),
        ("k_p", &|r| r.amplification.k_p),
        ("a_q", &|r| r.amplification.a_q),
        ("a_p", &|r| r.amplification.a_p),
        ("a_q_from_weak_values", &|r| r.amplification.a_q_from_weak_values),
        ("a_p_from_weak_values", &|r| r.amplification.a_p_from_weak_values),
        ("snr_q_with", &|r| Some(r.amplification.snr_q_with)),
        ("snr_q_without", &|r| Some(r.amplification.snr_q_without)),
        ("snr_p_with", &|r| Some(r.amplification.snr_p_with)),
        ("snr_p_without", &|r| Some(r.amplification.snr_p_without)),
        ("k_q_closed", &|r| r.closed_gains.map(|g| g.k_q)),
        ("k_p_closed", &|r| r.closed_gains.map(|g| g.k_p)),
        ("a_q_closed", &|r| r.closed_gains.map(|g| g.a_q)),
        ("a_p_closed", &|r| r.closed_gains.map(|g| g.a_p)),
        ("meter_var_q", &|r| Some(r.meter.var_q)),
        ("meter_var_p", &|r| Some(r.meter.var_p)),
        ("meter_cov", &|r| Some(r.meter.cov_sym)),
        ("postselected_std_q", &|r| Some(r.postselected_std_q)),
        ("postselected_std_p", &|r| Some(r.postselected_std_p)),
        ("dq_exact_minus_first_order", &|r| Some(r.agreement.dq_exact_minus_first_order)),
        ("dp_exact_minus_first_order", &|r| Some(r.agreement.dp_exact_minus_first_order)),
        ("p_exact_minus_first_order", &|r| Some(r.agreement.p_exact_minus_first_order)),
        ("norm_a", &|r| Some(r.diagnostics.norm_a)),
        ("norm_b", &|r| Some(r.diagnostics.norm_b)),
        ("g_norm_a_dp", &|r| Some(r.diagnostics.g_norm_a_dp)),
        ("g_norm_b_dq", &|r| Some(r.diagnostics.g_norm_b_dq)),
        ("overlap", &|r| Some(r.diagnostics.overlap)),
        ("overlap_closed", &|r| Some(r.overlap_closed)),
        ("ratio_a", &|r| Some(r.diagnostics.ratio_a)),
        ("ratio_b", &|r| Some(r.diagnostics.ratio_b)),
    ];
    for (name, g) in cols {
        f.push((name, opt(get(g))));
    }
    let flags: [(&'static str, FlagGetter); 5] = [
        ("flag_a", |r| r.diagnostics.flag_a),
        ("flag_b", |r| r.diagnostics.flag_b),
        ("flag_ratio_a", |r| r.diagnostics.flag_ratio_a),
        ("flag_ratio_b", |r| r.diagnostics.flag_ratio_b),
        ("flag_overall", |r| r.diagnostics.overall()),
    ];
    for (name, g) in flags {
        f.push((name, r.map(|r| g(r).as_str().to_string()).unwrap_or_default()));
    }
    f
}

pub fn protocol_fields(r: Option<&ProtocolReport>, spreads: Option<[f64; 2]>) -> Fields {
    let mut f = vec![
        ("dq1", opt(spreads.map(|s| s[0]))),
        ("dq2", opt(spreads.map(|s| s[1]))),
    ];
    for (k, (dq, dp)) in [("dq_1", "dp_1"), ("dq_2", "dp_2")].into_iter().enumerate() {
        f.push((dq, opt(r.map(|r| r.records[k].dq))));
        f.push((dp, opt(r.map(|r| r.records[k].dp))));
    }
    complex(&mut f, "a_w_recovered_re", "a_w_recovered_im", r.map(|r| r.a_recovered));
    complex(&mut f, "b_w_recovered_re", "b_w_recovered_im", r.map(|r| r.b_recovered));
    complex(&mut f, "a_w_re", "a_w_im", r.map(|r| r.a_numeric));
    complex(&mut f, "b_w_re", "b_w_im", r.map(|r| r.b_numeric));
    complex(&mut f, "a_w_closed_re", "a_w_closed_im", r.and_then(|r| r.a_closed));
    complex(&mut f, "b_w_closed_re", "b_w_closed_im", r.and_then(|r| r.b_closed));
    f.push(("a_rel_error_closed", opt(r.and_then(|r| r.a_rel_error_closed))));
    f.push(("b_rel_error_closed", opt(r.and_then(|r| r.b_rel_error_closed))));
    f.push(("flag_overall", r.map(|r| r.overall_flag().as_str().to_string()).unwrap_or_default()));
    f
}

fn csv_bytes(header: Vec<&'static str>, rows: impl Iterator<Item = Vec<String>>) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::Io { path: "<csv>".into(), source: std::io::Error::other(e) };
    w.write_record(&header).map_err(err)?;
    for r in rows {
        w.write_record(&r).map_err(err)?;
    }
    w.into_inner().map_err(|e| CliError::Io { path: "<csv>".into(), source: e.into_error() })
}

fn split(fields: Fields) -> (Vec<&'static str>, Vec<String>) {
    fields.into_iter().unzip()
}

pub fn experiment_csv(file: &ReportFile<ExperimentReport>) -> CliResult<Vec<u8>> {
    let fields = |row: &Row<ExperimentReport>| {
        let mut f = row_head(row);
        f.extend(experiment_fields(row.report.as_ref()));
        f
    };
    let header = header_of(file, &fields);
    csv_bytes(header, file.rows.iter().map(|r| split(fields(r)).1))
}

pub fn protocol_csv(file: &ReportFile<ProtocolReport>) -> CliResult<Vec<u8>> {
    let fields = |row: &Row<ProtocolReport>| {
        let mut f = row_head(row);
        f.extend(protocol_fields(row.report.as_ref(), row.spreads));
        f
    };
    let header = header_of(file, &fields);
    csv_bytes(header, file.rows.iter().map(|r| split(fields(r)).1))
}

fn header_of<T>(file: &ReportFile<T>, fields: &dyn Fn(&Row<T>) -> Fields) -> Vec<&'static str> {
    let blank = Row::<T> {
        index: 0,
        config: file.config.clone(),
        spreads: None,
        status: "",
        error_kind: None,
        error: None,
        report: None,
    };
    split(fields(&blank)).0
}

pub fn json_bytes<T: Serialize>(value: &T) -> CliResult<Vec<u8>> {
    let mut v = serde_json::to_vec_pretty(value).map_err(|e| CliError::Io { path: "<json>".into(), source: e.into() })?;
    v.push(b'\n');
    Ok(v)
}

#[derive(Clone, Debug, Serialize)]
pub struct InversionReport {
    pub schema_version: u32,
    /// "pair" for exactly two records, "least_squares" otherwise.
    pub method: &'static str,
    pub n_records: usize,
    pub g: f64,
    pub a_w_re: f64,
    pub a_w_im: f64,
    pub b_w_re: f64,
    pub b_w_im: f64,
    pub residual: f64,
}

impl InversionReport {
    pub fn new(rec: &Recovery, n_records: usize, g: f64) -> Self {
        InversionReport {
            schema_version: SCHEMA_VERSION,
            method: if n_records == 2 { "pair" } else { "least_squares" },
            n_records,
            g,
            a_w_re: rec.a_w.re(),
            a_w_im: rec.a_w.im(),
            b_w_re: rec.b_w.re(),
            b_w_im: rec.b_w.im(),
            residual: rec.residual,
        }
    }

    pub fn csv(&self) -> CliResult<Vec<u8>> {
        let (h, v) = split(vec![
            ("schema_version", self.schema_version.to_string()),
            ("method", self.method.to_string()),
            ("n_records", self.n_records.to_string()),
            ("g", num(self.g)),
            ("a_w_re", num(self.a_w_re)),
            ("a_w_im", num(self.a_w_im)),
            ("b_w_re", num(self.b_w_re)),
            ("b_w_im", num(self.b_w_im)),
            ("residual", num(self.residual)),
        ]);
        csv_bytes(h, std::iter::once(v))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub schema_version: u32,
    pub seed: u64,
    pub cutoff_override: Option<usize>,
    pub passed: bool,
    pub checks: Vec<CheckOutcome>,
}

impl CheckReport {
    pub fn csv(&self) -> CliResult<Vec<u8>> {
        let header = vec!["schema_version", "name", "passed", "observed", "tolerance", "margin", "error"];
        csv_bytes(
            header,
            self.checks.iter().map(|c| {
                vec![
                    SCHEMA_VERSION.to_string(),
                    c.name.clone(),
                    c.passed.to_string(),
                    num(c.observed),
                    num(c.tolerance),
                    num(c.margin),
                    c.error.clone().unwrap_or_default(),
                ]
            }),
        )
    }
}

/// Writes to `path` through a temporary file in the same directory and a
/// rename, so readers never see a partial report; `None` means stdout.
pub fn write_output(path: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    let Some(path) = path else {
        let mut out = std::io::stdout().lock();
        return out.write_all(bytes).and_then(|_| out.flush()).map_err(|e| CliError::Io { path: "<stdout>".into(), source: e });
    };
    let io = |e: std::io::Error| CliError::Io { path: path.display().to_string(), source: e };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}
