use serde::{Deserialize, Serialize};

use super::value::WeakValue;
use crate::error::{Error, Result};
use crate::fock::MeterMoments;

/// Signal and SNR gains of postselection relative to the plain measurement.
///
/// `None` marks a ratio that is undefined because its denominator vanishes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplificationReport {
    /// δq/δq₀
    pub k_q: Option<f64>,
    /// δp/δp₀
    pub k_p: Option<f64>,
    /// K_q √P
    pub a_q: Option<f64>,
    pub a_p: Option<f64>,
    pub probability: f64,
    pub n_readouts: u64,
    /// δq/(Δq/√(NP)): postselected SNR, only NP readouts survive.
    pub snr_q_with: f64,
    /// δq₀/(Δq/√N)
    pub snr_q_without: f64,
    pub snr_p_with: f64,
    pub snr_p_without: f64,
    /// 𝒜 evaluated from weak values instead of shift ratios.
    pub a_q_from_weak_values: Option<f64>,
    pub a_p_from_weak_values: Option<f64>,
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    (den != 0.0 && num.is_finite() && den.is_finite()).then(|| num / den)
}

/// Builds the report from conditional shifts (δq, δp), unconditioned shifts
/// (δq₀, δp₀), the postselection probability and the initial meter spread.
pub fn amplification_report(
    dq: f64,
    dp: f64,
    dq0: f64,
    dp0: f64,
    probability: f64,
    mom: &MeterMoments,
    n_readouts: u64,
) -> Result<AmplificationReport> {
    if !(0.0..=1.0 + 1e-10).contains(&probability) {
        return Err(Error::invalid(format!("probability {probability} outside [0, 1]")));
    }
    if n_readouts == 0 {
        return Err(Error::invalid("readout count must be positive"));
    }
    let probability = probability.min(1.0);
    let n = n_readouts as f64;
    let (sq, sp) = (mom.std_q(), mom.std_p());
    let k_q = ratio(dq, dq0);
    let k_p = ratio(dp, dp0);
    let root_p = probability.sqrt();
    Ok(AmplificationReport {
        k_q,
        k_p,
        a_q: k_q.map(|k| k * root_p),
        a_p: k_p.map(|k| k * root_p),
        probability,
        n_readouts,
        snr_q_with: dq / sq * (n * probability).sqrt(),
        snr_q_without: dq0 / sq * n.sqrt(),
        snr_p_with: dp / sp * (n * probability).sqrt(),
        snr_p_without: dp0 / sp * n.sqrt(),
        a_q_from_weak_values: None,
        a_p_from_weak_values: None,
    })
}

/// SNR gains from weak values:
///
/// 𝒜_q = [2 Im B_w Δq² + Re A_w] / ⟨A⟩_i · |⟨ψ_f|ψ_i⟩|
/// 𝒜_p = [2 Im A_w Δp² − Re B_w] / (−⟨B⟩_i) · |⟨ψ_f|ψ_i⟩|
///
/// The p denominator carries the sign of the unconditioned shift δp₀ = −g⟨B⟩_i.
/// Undefined when the corresponding mean vanishes.
pub fn snr_gain_from_weak_values(
    a_w: WeakValue,
    b_w: WeakValue,
    mean_a: f64,
    mean_b: f64,
    var_q: f64,
    var_p: f64,
    overlap: f64,
) -> (Option<f64>, Option<f64>) {
    (
        ratio((2.0 * b_w.im() * var_q + a_w.re()) * overlap, mean_a),
        ratio((2.0 * a_w.im() * var_p - b_w.re()) * overlap, -mean_b),
    )
}

impl AmplificationReport {
    pub fn with_weak_values(mut self, a_q: Option<f64>, a_p: Option<f64>) -> Self {
        self.a_q_from_weak_values = a_q;
        self.a_p_from_weak_values = a_p;
        self
    }

    /// Closed-form signal gain 1/(ε|α|²) of the biased interferometer.
    pub fn headline_gain(epsilon: f64, alpha_abs: f64) -> f64 {
        1.0 / (epsilon * alpha_abs * alpha_abs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C64;

    fn moments(var_q: f64) -> MeterMoments {
        MeterMoments {
            mean_q: 0.0,
            mean_p: 0.0,
            var_q,
            var_p: 0.25 / var_q,
            cov_sym: 0.0,
            commutator: C64::new(0.0, 1.0),
        }
    }

    #[test]
    fn no_postselection_is_unit_gain() {
        let r = amplification_report(3e-6, -2e-6, 3e-6, -2e-6, 1.0, &moments(0.5), 100).unwrap();
        assert_eq!((r.k_q, r.k_p, r.a_q, r.a_p), (Some(1.0), Some(1.0), Some(1.0), Some(1.0)));
        assert_eq!(r.snr_q_with, r.snr_q_without);
    }

    #[test]
    fn vanishing_reference_shift_is_undefined() {
        let r = amplification_report(3e-6, 1e-6, 0.0, 1e-7, 0.5, &moments(0.5), 1).unwrap();
        assert_eq!(r.k_q, None);
        assert_eq!(r.a_q, None);
        assert!((r.k_p.unwrap() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn snr_ratio_is_gain() {
        let r = amplification_report(5e-3, 0.0, 4e-7, 1.0, 1e-6, &moments(0.3), 1_000_000).unwrap();
        let ratio = r.snr_q_with / r.snr_q_without;
        assert!((ratio - r.a_q.unwrap()).abs() < 1e-9 * ratio);
    }

    #[test]
    fn headline_point() {
        let (eps, alpha) = (1e-2, 1e-2);
        let k = AmplificationReport::headline_gain(eps, alpha);
        assert!((k - 1e6).abs() < 1e-6);
        // P ≈ ε²|α|² gives 𝒜 = K√P = 1/|α|
        assert!((k * (eps * alpha) - 1e2).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(amplification_report(1.0, 1.0, 1.0, 1.0, 1.5, &moments(0.5), 1).is_err());
        assert!(amplification_report(1.0, 1.0, 1.0, 1.0, 0.5, &moments(0.5), 0).is_err());
    }

    #[test]
    fn weak_value_form_matches_shift_ratio() {
        // δq = g(2 Im B_w Δq² + Re A_w), δq₀ = g⟨A⟩; K√P with √P = overlap
        let g = 1e-6;
        let (a_w, b_w) = (WeakValue::new(-50.0, 3.0), WeakValue::new(1.0, -20.0));
        let (mean_a, mean_b, var_q, overlap) = (0.2, -0.1, 0.8, 0.01);
        let var_p = 0.25 / var_q;
        let dq = g * (2.0 * b_w.im() * var_q + a_w.re());
        let dp = g * (2.0 * a_w.im() * var_p - b_w.re());
        let r = amplification_report(dq, dp, g * mean_a, -g * mean_b, overlap * overlap, &moments(var_q), 1).unwrap();
        let (aq, ap) = snr_gain_from_weak_values(a_w, b_w, mean_a, mean_b, var_q, var_p, overlap);
        assert!((aq.unwrap() - r.a_q.unwrap()).abs() < 1e-12 * aq.unwrap().abs());
        assert!((ap.unwrap() - r.a_p.unwrap()).abs() < 1e-12 * ap.unwrap().abs());
        assert_eq!(snr_gain_from_weak_values(a_w, b_w, 0.0, 0.0, var_q, var_p, overlap), (None, None));
    }
}
