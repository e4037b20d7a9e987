use serde::{Deserialize, Serialize};

use crate::fock::{MeterMoments, Operator};

/// Product or ratio below this passes.
pub const WARN_THRESHOLD: f64 = 0.1;
/// At or above this the first-order formulas are not trusted.
pub const FAIL_THRESHOLD: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flag {
    Pass,
    Warn,
    Fail,
}

impl Flag {
    pub fn classify(x: f64) -> Flag {
        if !(x < FAIL_THRESHOLD) {
            Flag::Fail
        } else if x < WARN_THRESHOLD {
            Flag::Pass
        } else {
            Flag::Warn
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Flag::Pass => "pass",
            Flag::Warn => "warn",
            Flag::Fail => "fail",
        }
    }
}

/// Weak-interaction checks g‖A‖Δp ≪ 1 and g‖A‖Δp ≪ |⟨ψ_f|ψ_i⟩| (and the
/// B/Δq analogues). Norms are those of the truncated operators, so
/// `system_cutoffs` records which truncation they belong to.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidityDiagnostics {
    pub system_cutoffs: Vec<usize>,
    pub norm_a: f64,
    pub norm_b: f64,
    pub g_norm_a_dp: f64,
    pub g_norm_b_dq: f64,
    pub overlap: f64,
    /// Infinite when the overlap vanishes.
    pub ratio_a: f64,
    pub ratio_b: f64,
    pub flag_a: Flag,
    pub flag_b: Flag,
    pub flag_ratio_a: Flag,
    pub flag_ratio_b: Flag,
}

impl ValidityDiagnostics {
    /// The worst of the four flags.
    pub fn overall(&self) -> Flag {
        [self.flag_a, self.flag_b, self.flag_ratio_a, self.flag_ratio_b]
            .into_iter()
            .max()
            .unwrap_or(Flag::Pass)
    }
}

/// `overlap` is |⟨ψ_f|ψ_i⟩|, or √tr(Π_f ρ_s) for mixed selections.
pub fn validity_diagnostics(g: f64, a: &Operator, b: &Operator, mom: &MeterMoments, overlap: f64) -> ValidityDiagnostics {
    let norm_a = a.operator_norm();
    let norm_b = b.operator_norm();
    let g_norm_a_dp = g.abs() * norm_a * mom.std_p();
    let g_norm_b_dq = g.abs() * norm_b * mom.std_q();
    let overlap = overlap.max(0.0);
    let ratio = |x: f64| if overlap > 0.0 { x / overlap } else { f64::INFINITY };
    let (ratio_a, ratio_b) = (ratio(g_norm_a_dp), ratio(g_norm_b_dq));
    ValidityDiagnostics {
        system_cutoffs: a.space().factors().to_vec(),
        norm_a,
        norm_b,
        g_norm_a_dp,
        g_norm_b_dq,
        overlap,
        ratio_a,
        ratio_b,
        flag_a: Flag::classify(g_norm_a_dp),
        flag_b: Flag::classify(g_norm_b_dq),
        flag_ratio_a: Flag::classify(ratio_a),
        flag_ratio_b: Flag::classify(ratio_b),
    }
}
