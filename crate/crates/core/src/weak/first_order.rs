use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::value::WeakValue;
use crate::error::{Error, Result};
use crate::fock::MeterMoments;

/// Smallest |Δq₁² − Δq₂²| the two-meter inversion accepts.
pub const SPREAD_SEPARATION: f64 = 1e-9;

/// First-order pointer shifts for a general meter:
///
/// δq = 2g Im B_w var q + g Re A_w ⟨−i[q,p]⟩ + g Im A_w cov
/// δp = 2g Im A_w var p − g Re B_w ⟨−i[q,p]⟩ + g Im B_w cov
///
/// where `commutator_qp` is ⟨[q,p]⟩ in the initial meter state and cov the
/// symmetrized covariance ⟨{q−⟨q⟩, p−⟨p⟩}⟩.
pub fn pointer_shift_first_order(
    a_w: WeakValue,
    b_w: WeakValue,
    mom: &MeterMoments,
    g: f64,
    commutator_qp: C64,
) -> (f64, f64) {
    let c = (commutator_qp * C64::new(0.0, -1.0)).re;
    let dq = 2.0 * g * b_w.im() * mom.var_q + g * a_w.re() * c + g * a_w.im() * mom.cov_sym;
    let dp = 2.0 * g * a_w.im() * mom.var_p - g * b_w.re() * c + g * b_w.im() * mom.cov_sym;
    (dq, dp)
}

/// Gaussian-meter reduction ([q,p] = i, no covariance):
/// δq = 2g Im B_w Δq² + g Re A_w, δp = 2g Im A_w Δp² − g Re B_w.
pub fn pointer_shift_gaussian(a_w: WeakValue, b_w: WeakValue, var_q: f64, var_p: f64, g: f64) -> (f64, f64) {
    (
        2.0 * g * b_w.im() * var_q + g * a_w.re(),
        2.0 * g * a_w.im() * var_p - g * b_w.re(),
    )
}

/// P ≈ |⟨ψ_f|ψ_i⟩|² (1 + 2g⟨p⟩ Im A_w + 2g⟨q⟩ Im B_w).
pub fn success_probability_first_order(
    overlap_sq: f64,
    a_w: WeakValue,
    b_w: WeakValue,
    mean_p: f64,
    mean_q: f64,
    g: f64,
) -> f64 {
    overlap_sq * (1.0 + 2.0 * g * mean_p * a_w.im() + 2.0 * g * mean_q * b_w.im())
}

/// Measured conditional shifts for one meter preparation of spread Δq.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftRecord {
    pub delta_q_meter_prep: f64,
    pub dq: f64,
    pub dp: f64,
}

impl ShiftRecord {
    pub fn new(delta_q_meter_prep: f64, dq: f64, dp: f64) -> Result<Self> {
        if !(delta_q_meter_prep > 0.0) || !delta_q_meter_prep.is_finite() {
            return Err(Error::invalid(format!("meter spread must be positive, got {delta_q_meter_prep}")));
        }
        if !dq.is_finite() || !dp.is_finite() {
            return Err(Error::invalid("shifts must be finite"));
        }
        Ok(ShiftRecord { delta_q_meter_prep, dq, dp })
    }

    fn var_q(&self) -> f64 {
        self.delta_q_meter_prep.powi(2)
    }

    fn var_p(&self) -> f64 {
        0.25 / self.var_q()
    }
}

fn check_g(g: f64) -> Result<()> {
    if !(g > 0.0) || !g.is_finite() {
        return Err(Error::invalid(format!("inversion needs g > 0, got {g}")));
    }
    Ok(())
}

/// Solves the Gaussian-meter shift equations of two preparations with
/// different spreads for (A_w, B_w):
///
/// 2g Im A_w = (δp₁ − δp₂)/(Δp₁² − Δp₂²)
/// 2g Im B_w = (δq₁ − δq₂)/(Δq₁² − Δq₂²)
/// g Re A_w  = (Δq₁² δq₂ − Δq₂² δq₁)/(Δq₁² − Δq₂²)
/// g Re B_w  = (Δp₂² δp₁ − Δp₁² δp₂)/(Δp₁² − Δp₂²)
pub fn recover_weak_values(rec1: &ShiftRecord, rec2: &ShiftRecord, g: f64) -> Result<(WeakValue, WeakValue)> {
    check_g(g)?;
    let (vq1, vq2) = (rec1.var_q(), rec2.var_q());
    if (vq1 - vq2).abs() <= SPREAD_SEPARATION {
        return Err(Error::SingularConfiguration(format!(
            "meter spreads coincide (Δq₁² = {vq1}, Δq₂² = {vq2})"
        )));
    }
    let (vp1, vp2) = (rec1.var_p(), rec2.var_p());
    let dq_den = vq1 - vq2;
    let dp_den = vp1 - vp2;
    let im_a = (rec1.dp - rec2.dp) / dp_den / (2.0 * g);
    let im_b = (rec1.dq - rec2.dq) / dq_den / (2.0 * g);
    let re_a = (vq1 * rec2.dq - vq2 * rec1.dq) / dq_den / g;
    let re_b = (vp2 * rec1.dp - vp1 * rec2.dp) / dp_den / g;
    Ok((WeakValue::new(re_a, im_a), WeakValue::new(re_b, im_b)))
}

/// Least-squares recovery over any number of preparations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Recovery {
    pub a_w: WeakValue,
    pub b_w: WeakValue,
    /// Root-sum-square residual of the q and p fits.
    pub residual: f64,
}

/// Fits δq = g Re A_w + 2g Im B_w·Δq² and δp = −g Re B_w + 2g Im A_w·Δp²
/// over all records. With two records this is exactly
/// [`recover_weak_values`].
pub fn recover_weak_values_lsq(records: &[ShiftRecord], g: f64) -> Result<Recovery> {
    check_g(g)?;
    if records.len() < 2 {
        return Err(Error::invalid("inversion needs at least two shift records"));
    }
    let xs: Vec<f64> = records.iter().map(ShiftRecord::var_q).collect();
    let (lo, hi) = xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &x| (l.min(x), h.max(x)));
    if hi - lo <= SPREAD_SEPARATION {
        return Err(Error::SingularConfiguration("all meter spreads coincide".into()));
    }
    let ys: Vec<f64> = records.iter().map(ShiftRecord::var_p).collect();
    let dq: Vec<f64> = records.iter().map(|r| r.dq).collect();
    let dp: Vec<f64> = records.iter().map(|r| r.dp).collect();
    let (q0, q1, rq) = line_fit(&xs, &dq);
    let (p0, p1, rp) = line_fit(&ys, &dp);
    Ok(Recovery {
        a_w: WeakValue::new(q0 / g, p1 / (2.0 * g)),
        b_w: WeakValue::new(-p0 / g, q1 / (2.0 * g)),
        residual: (rq * rq + rp * rp).sqrt(),
    })
}

/// Ordinary least squares y ≈ c₀ + c₁x; returns (c₀, c₁, ‖residual‖₂).
fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let c1 = sxy / sxx;
    let c0 = my - c1 * mx;
    let r = x.iter().zip(y).map(|(a, b)| (b - c0 - c1 * a).powi(2)).sum::<f64>().sqrt();
    (c0, c1, r)
}
