use serde::{Deserialize, Serialize};

use super::config::SetupConfig;
use super::experiment::{run_experiment, ExperimentReport};
use crate::error::{Error, Result};
use crate::weak::first_order::SPREAD_SEPARATION;
use crate::weak::{recover_weak_values, ShiftRecord, WeakValue};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolReport {
    pub records: [ShiftRecord; 2],
    pub a_recovered: WeakValue,
    pub b_recovered: WeakValue,
    /// Weak values computed directly on the Fock model.
    pub a_numeric: WeakValue,
    pub b_numeric: WeakValue,
    pub a_closed: Option<WeakValue>,
    pub b_closed: Option<WeakValue>,
    /// |recovered − closed| / |closed|
    pub a_rel_error_closed: Option<f64>,
    pub b_rel_error_closed: Option<f64>,
    pub runs: [ExperimentReport; 2],
}

/// Runs the exact experiment with two meter spreads and inverts the measured
/// shifts for the weak values.
pub fn two_prep_protocol(cfg: &SetupConfig, dq1: f64, dq2: f64) -> Result<ProtocolReport> {
    if (dq1 * dq1 - dq2 * dq2).abs() <= SPREAD_SEPARATION {
        return Err(Error::SingularConfiguration(format!("meter spreads coincide ({dq1}, {dq2})")));
    }
    let run = |dq: f64| run_experiment(&SetupConfig { meter_dq: dq, ..cfg.clone() });
    let (r1, r2) = (run(dq1)?, run(dq2)?);
    let rec1 = ShiftRecord::new(dq1, r1.shifts.dq_exact, r1.shifts.dp_exact)?;
    let rec2 = ShiftRecord::new(dq2, r2.shifts.dq_exact, r2.shifts.dp_exact)?;
    let (a, b) = recover_weak_values(&rec1, &rec2, cfg.g)?;
    let rel = |x: WeakValue, y: Option<WeakValue>| y.map(|y| (x.value() - y.value()).norm() / y.value().norm());
    Ok(ProtocolReport {
        records: [rec1, rec2],
        a_recovered: a,
        b_recovered: b,
        a_numeric: r1.weak_values.a_numeric,
        b_numeric: r1.weak_values.b_numeric,
        a_closed: r1.weak_values.a_closed,
        b_closed: r1.weak_values.b_closed,
        a_rel_error_closed: rel(a, r1.weak_values.a_closed),
        b_rel_error_closed: rel(b, r1.weak_values.b_closed),
        runs: [r1, r2],
    })
}
