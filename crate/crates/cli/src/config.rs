use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use weakpdc::setup::{PostselectMode, SetupConfig};

use crate::args::{PostselectArg, SetupArgs};
use crate::error::{CliError, CliResult};

pub fn load_config(path: &Path) -> CliResult<SetupConfig> {
    let text = fs::read_to_string(path).map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

/// Config file (or defaults) with flag overrides applied, validated.
pub fn resolve(args: &SetupArgs) -> CliResult<SetupConfig> {
    let mut cfg = match &args.config {
        Some(p) => load_config(p)?,
        None => SetupConfig::default(),
    };
    if let Some(n) = args.cutoff_s {
        cfg.cutoff_s = n;
        cfg.cutoff_s_prime = n;
    }
    macro_rules! set {
        ($($field:ident),*) => { $( if let Some(v) = args.$field { cfg.$field = v; } )* };
    }
    set!(cutoff_d, g, epsilon, alpha_re, alpha_im, phi, meter_dq, meter_q0, meter_p0, meter_angle, eta, n_readouts);
    if let Some(p) = args.postselect {
        cfg.postselect = match p {
            PostselectArg::Ideal => PostselectMode::Ideal,
            PostselectArg::Threshold => PostselectMode::Threshold,
        };
    }
    cfg.validate().map_err(|e| CliError::config(e.to_string()))?;
    Ok(cfg)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Lin,
    Log,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

/// Axes a sweep may vary; `dq1`/`dq2` only in protocol mode.
pub const AXES: &[&str] = &[
    "alpha_re", "alpha_im", "epsilon", "g", "phi", "meter_dq", "meter_q0", "meter_p0", "meter_angle", "eta",
    "cutoff_s", "cutoff_d", "dq1", "dq2",
];

impl FromStr for Axis {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [name, min, max, count, spacing] = parts[..] else {
            return Err(CliError::config(format!("sweep '{s}' is not AXIS:MIN:MAX:COUNT:lin|log")));
        };
        if !AXES.contains(&name) {
            return Err(CliError::config(format!("unknown sweep axis '{name}' (expected one of {})", AXES.join(", "))));
        }
        let num = |x: &str| {
            x.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::config(format!("bad number '{x}' in sweep '{s}'")))
        };
        let (min, max) = (num(min)?, num(max)?);
        let count: usize = count.parse().map_err(|_| CliError::config(format!("bad count '{count}' in sweep '{s}'")))?;
        if count == 0 {
            return Err(CliError::config(format!("sweep '{s}' needs at least one point")));
        }
        let spacing = match spacing {
            "lin" => Spacing::Lin,
            "log" => Spacing::Log,
            other => return Err(CliError::config(format!("spacing must be lin or log, got '{other}'"))),
        };
        if spacing == Spacing::Log && !(min > 0.0 && max > 0.0) {
            return Err(CliError::config(format!("log sweep '{s}' needs positive bounds")));
        }
        Ok(Axis { name: name.to_string(), min, max, count, spacing })
    }
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        if n == 1 {
            return vec![self.min];
        }
        (0..n)
            .map(|k| {
                let t = k as f64 / (n - 1) as f64;
                match self.spacing {
                    Spacing::Lin => self.min + t * (self.max - self.min),
                    Spacing::Log => (self.min.ln() + t * (self.max.ln() - self.min.ln())).exp(),
                }
            })
            .map(|v| if self.is_integer() { v.round() } else { v })
            .collect()
    }

    fn is_integer(&self) -> bool {
        self.name.starts_with("cutoff")
    }
}

/// Point parameters beyond the setup config.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProtocolSpreads {
    pub dq1: f64,
    pub dq2: f64,
}

pub fn apply_axis(cfg: &mut SetupConfig, spreads: &mut ProtocolSpreads, name: &str, v: f64) {
    match name {
        "alpha_re" => cfg.alpha_re = v,
        "alpha_im" => cfg.alpha_im = v,
        "epsilon" => cfg.epsilon = v,
        "g" => cfg.g = v,
        "phi" => cfg.phi = v,
        "meter_dq" => cfg.meter_dq = v,
        "meter_q0" => cfg.meter_q0 = v,
        "meter_p0" => cfg.meter_p0 = v,
        "meter_angle" => cfg.meter_angle = v,
        "eta" => cfg.eta = v,
        "cutoff_s" => {
            cfg.cutoff_s = v as usize;
            cfg.cutoff_s_prime = v as usize;
        }
        "cutoff_d" => cfg.cutoff_d = v as usize,
        "dq1" => spreads.dq1 = v,
        "dq2" => spreads.dq2 = v,
        _ => unreachable!("axis names are validated on parse"),
    }
}
