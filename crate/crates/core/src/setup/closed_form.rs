//! Leading-order predictions for the biased interferometer with a Gaussian
//! meter and φ = 0 quadratures.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::config::PostselectMode;
use crate::error::{Error, Result};
use crate::weak::WeakValue;

fn check_bias(alpha: C64, epsilon: f64) -> Result<()> {
    if epsilon == 0.0 || alpha.norm() == 0.0 || !(epsilon * alpha.norm()).is_finite() {
        return Err(Error::SingularConfiguration(format!(
            "closed forms need εα ≠ 0 (ε = {epsilon}, α = {alpha})"
        )));
    }
    Ok(())
}

/// Weak values of A and B on the signal mode.
///
/// * ideal: A_w ≈ −1/(2εα) − α/2, B_w ≈ −i/(2εα) + iα/2
/// * threshold: A_w ≈ −1/(2εα) − Re α, B_w ≈ −i/(2εα) − Im α
pub fn closed_form_weak_values(alpha: C64, epsilon: f64, mode: PostselectMode) -> Result<(WeakValue, WeakValue)> {
    check_bias(alpha, epsilon)?;
    let lead = (alpha * (2.0 * epsilon)).inv();
    let i = C64::new(0.0, 1.0);
    let (a, b) = match mode {
        PostselectMode::Ideal => (-lead - alpha * 0.5, -i * lead + i * alpha * 0.5),
        PostselectMode::Threshold => (-lead - alpha.re, -i * lead - alpha.im),
    };
    Ok((a.into(), b.into()))
}

/// Rotates φ = 0 weak values to the φ-family: A′ = cos φ A + sin φ B,
/// B′ = cos φ B − sin φ A.
pub fn rotate_weak_values(a_w: WeakValue, b_w: WeakValue, phi: f64) -> (WeakValue, WeakValue) {
    let (s, c) = phi.sin_cos();
    (
        (a_w.value() * c + b_w.value() * s).into(),
        (b_w.value() * c - a_w.value() * s).into(),
    )
}

/// δq = −(g/ε)(Re α/|α|²)(Δq² + ½), δp = (g/ε)(Im α/|α|²)(Δp² + ½), Δp = 1/(2Δq).
pub fn predicted_shifts(g: f64, alpha: C64, epsilon: f64, dq: f64) -> Result<(f64, f64)> {
    check_bias(alpha, epsilon)?;
    let n2 = alpha.norm_sqr();
    let dp = 0.5 / dq;
    Ok((
        -(g / epsilon) * (alpha.re / n2) * (dq * dq + 0.5),
        (g / epsilon) * (alpha.im / n2) * (dp * dp + 0.5),
    ))
}

/// Unconditioned shifts in the interferometer variables: δq₀ ≈ −g Re α,
/// δp₀ ≈ g Im α.
pub fn unconditioned_shifts(g: f64, alpha: C64) -> (f64, f64) {
    (-g * alpha.re, g * alpha.im)
}

/// Closed-form gains.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormGains {
    /// (Δq² + ½)/(ε|α|²); 1/(ε|α|²) for a coherent meter.
    pub k_q: f64,
    pub k_p: f64,
    /// ε²|α|²
    pub probability: f64,
    /// K √P with √P = ε|α| e^{−|α|²/2}, the dark-port overlap.
    pub a_q: f64,
    pub a_p: f64,
}

pub fn closed_form_gains(alpha: C64, epsilon: f64, dq: f64) -> Result<ClosedFormGains> {
    check_bias(alpha, epsilon)?;
    let n2 = alpha.norm_sqr();
    let dp = 0.5 / dq;
    let k_q = (dq * dq + 0.5) / (epsilon * n2);
    let k_p = (dp * dp + 0.5) / (epsilon * n2);
    let overlap = epsilon * alpha.norm() * (-0.5 * n2).exp();
    Ok(ClosedFormGains {
        k_q,
        k_p,
        probability: epsilon * epsilon * n2,
        a_q: k_q * overlap,
        a_p: k_p * overlap,
    })
}

/// Large-spread signal gain K_q ≈ Δq²/(ε|α|²).
pub fn squeezed_signal_gain(dq: f64, alpha: C64, epsilon: f64) -> f64 {
    dq * dq / (epsilon * alpha.norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn ideal_point() {
        let (a, b) = closed_form_weak_values(C64::new(0.1, 0.0), 0.01, PostselectMode::Ideal).unwrap();
        assert!((a.value() - C64::new(-500.05, 0.0)).norm() < 1e-9);
        assert!((b.value() - C64::new(0.0, -499.95)).norm() < 1e-9);
    }

    #[test]
    fn threshold_point() {
        let (a, b) = closed_form_weak_values(C64::new(0.1, 0.0), 0.01, PostselectMode::Threshold).unwrap();
        assert!((a.value() - C64::new(-500.10, 0.0)).norm() < 1e-9);
        assert!((b.value() - C64::new(0.0, -500.0)).norm() < 1e-9);
    }

    #[test]
    fn large_amplitude_keeps_leading_term_dominant() {
        let alpha = C64::new(0.02, 0.01);
        let (a, _) = closed_form_weak_values(alpha, 1e-3, PostselectMode::Ideal).unwrap();
        let lead = -(alpha * 2e-3).inv();
        assert!((a.value() - lead).norm() / lead.norm() < 1e-4);
    }

    #[test]
    fn degenerate_bias_is_refused() {
        assert!(closed_form_weak_values(C64::new(0.0, 0.0), 0.01, PostselectMode::Ideal).is_err());
        assert!(predicted_shifts(1e-6, C64::new(0.1, 0.0), 0.0, 1.0).is_err());
    }

    #[test]
    fn imaginary_amplitude_has_no_q_shift() {
        let (dq, dp) = predicted_shifts(1e-6, C64::new(0.0, 0.2), 0.01, FRAC_1_SQRT_2).unwrap();
        assert_eq!(dq, 0.0);
        assert!(dp > 0.0);
    }

    #[test]
    fn coherent_meter_point() {
        let (dq, dp) = predicted_shifts(1e-6, C64::new(0.1, 0.0), 0.01, FRAC_1_SQRT_2).unwrap();
        assert!((dq + 1e-3).abs() < 1e-15);
        assert_eq!(dp, 0.0);
    }

    #[test]
    fn wide_meter_approaches_quadratic_law() {
        let alpha = C64::new(0.1, 0.0);
        let mut last = f64::INFINITY;
        for dq in [5.0, 50.0, 500.0] {
            let (full, _) = predicted_shifts(1e-6, alpha, 0.01, dq).unwrap();
            let approx = -(1e-6 / 0.01) * (1.0 / 0.1) * dq * dq;
            let dev = (full / approx - 1.0).abs();
            assert!(dev < last);
            last = dev;
        }
        assert!(last < 1e-5);
    }

    #[test]
    fn rotation_by_quarter_turn_swaps() {
        let a = WeakValue::new(1.0, 2.0);
        let b = WeakValue::new(-3.0, 0.5);
        let (a2, b2) = rotate_weak_values(a, b, std::f64::consts::FRAC_PI_2);
        assert!((a2.value() - b.value()).norm() < 1e-15);
        assert!((b2.value() + a.value()).norm() < 1e-15);
    }

    #[test]
    fn headline_gains() {
        let g = closed_form_gains(C64::new(0.01, 0.0), 0.01, FRAC_1_SQRT_2).unwrap();
        assert!((g.k_q / 1e6 - 1.0).abs() < 1e-12);
        assert!((g.a_q / 100.0 - 1.0).abs() < 1e-4);
        assert!((g.probability - 1e-8).abs() < 1e-20);
    }
}
