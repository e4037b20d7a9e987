//! Displaced squeezed states D(β)S(ξ)|0⟩ built with operator exponentials on
//! a padded space, then truncated to the target cutoff. The construction is
//! validated through its quadrature moments rather than closed-form
//! amplitudes.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::expm::expm_action;
use super::moments::{moments_csr, MeterMoments, StateRef};
use super::operator::meter_quadratures;
use super::space::FockSpace;
use super::sparse::CsrMatrix;
use super::state::{StateVector, TAIL_TOL};
use crate::error::{Error, Result};

/// Meter wavefunction ∝ exp(−(q−q₀)²/(4Δq²) + i p₀ q); Δp = 1/(2Δq).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianMeterSpec {
    pub q0: f64,
    pub p0: f64,
    pub dq: f64,
}

impl GaussianMeterSpec {
    pub fn new(q0: f64, p0: f64, dq: f64) -> Result<Self> {
        let spec = GaussianMeterSpec { q0, p0, dq };
        spec.validate()?;
        Ok(spec)
    }

    /// Vacuum-width meter, Δq = Δp = 1/√2.
    pub fn coherent(q0: f64, p0: f64) -> Self {
        GaussianMeterSpec { q0, p0, dq: std::f64::consts::FRAC_1_SQRT_2 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dq > 0.0) || !self.dq.is_finite() {
            return Err(Error::invalid(format!("meter spread Δq must be positive, got {}", self.dq)));
        }
        if !self.q0.is_finite() || !self.p0.is_finite() {
            return Err(Error::invalid("meter centre must be finite"));
        }
        Ok(())
    }

    pub fn dp(&self) -> f64 {
        0.5 / self.dq
    }

    pub fn to_squeezed(&self) -> SqueezedStateSpec {
        SqueezedStateSpec {
            displacement: C64::new(self.q0, self.p0) * std::f64::consts::FRAC_1_SQRT_2,
            squeeze_r: -0.5 * (2.0 * self.dq * self.dq).ln(),
            squeeze_angle: 0.0,
        }
    }
}

/// D(β)S(ξ)|0⟩ with ξ = r·e^{iθ} and S(ξ) = exp(½(ξ*a² − ξa†²)).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SqueezedStateSpec {
    pub displacement: C64,
    pub squeeze_r: f64,
    pub squeeze_angle: f64,
}

impl SqueezedStateSpec {
    /// Target moments for the φ = 0 quadratures.
    pub fn target_moments(&self) -> MeterMoments {
        let (r, th) = (self.squeeze_r, self.squeeze_angle);
        let (c2, s2) = ((2.0 * r).cosh(), (2.0 * r).sinh());
        MeterMoments {
            mean_q: std::f64::consts::SQRT_2 * self.displacement.re,
            mean_p: std::f64::consts::SQRT_2 * self.displacement.im,
            var_q: 0.5 * (c2 - s2 * th.cos()),
            var_p: 0.5 * (c2 + s2 * th.cos()),
            cov_sym: -s2 * th.sin(),
            commutator: C64::new(0.0, 1.0),
        }
    }

    /// Squeezing magnification e^{2|r|}.
    pub fn squeeze_factor(&self) -> f64 {
        (2.0 * self.squeeze_r.abs()).exp()
    }
}

/// Default cutoff for a state of displacement |β| and squeeze factor e^{2|r|}:
/// max(16, ⌈|β|² + 8|β| + 8⌉) scaled by the squeeze factor.
pub fn suggest_cutoff(displacement: f64, squeeze_factor: f64) -> usize {
    let d = displacement.abs();
    let base = (d * d + 8.0 * d + 8.0).ceil().max(16.0);
    (base * squeeze_factor.max(1.0)).ceil() as usize
}

fn exp_apply(gen: &CsrMatrix, v: DVector<C64>) -> Result<DVector<C64>> {
    let m = DMatrix::from_column_slice(v.len(), 1, v.as_slice());
    let out = expm_action(|w| gen.mul_dense(w), gen.one_norm(), &m)?;
    Ok(out.column(0).into_owned())
}

/// Displaced squeezed vacuum on `space`, checked against its target moments
/// at tolerance 1e-6·max(1, |target|).
pub fn gaussian_state(space: FockSpace, spec: &SqueezedStateSpec) -> Result<StateVector> {
    let n = space.cutoff();
    if !spec.squeeze_r.is_finite() || !spec.squeeze_angle.is_finite() || !spec.displacement.norm().is_finite() {
        return Err(Error::invalid("non-finite squeezed-state parameters"));
    }
    let padded = n + n.max(32);
    let xi = C64::from_polar(spec.squeeze_r, spec.squeeze_angle);
    let beta = spec.displacement;
    // ½(ξ*a² − ξa†²) and βa† − β*a, assembled directly in sparse form
    let mut sq = Vec::with_capacity(2 * padded);
    let mut disp = Vec::with_capacity(2 * padded);
    for k in 1..padded {
        let s1 = (k as f64).sqrt();
        disp.push((k, k - 1, beta * s1));
        disp.push((k - 1, k, -beta.conj() * s1));
        if k >= 2 {
            let s2 = ((k * (k - 1)) as f64).sqrt();
            sq.push((k - 2, k, xi.conj() * (0.5 * s2)));
            sq.push((k, k - 2, -xi * (0.5 * s2)));
        }
    }
    let sq = CsrMatrix::from_triplets(padded, padded, sq);
    let disp = CsrMatrix::from_triplets(padded, padded, disp);

    let mut v = DVector::zeros(padded);
    v[0] = C64::new(1.0, 0.0);
    let v = exp_apply(&sq, v)?;
    let v = exp_apply(&disp, v)?;

    let tail: f64 = v.rows(n, padded - n).norm_squared();
    if tail > TAIL_TOL {
        return Err(Error::Truncation(format!(
            "Gaussian state loses {tail:e} probability beyond cutoff {n}"
        )));
    }
    let state = StateVector::normalized(space, v.rows(0, n).into_owned())?;

    let (q, p) = meter_quadratures(space, 0.0);
    let got = moments_csr(StateRef::Pure(&state), &q.to_csr(), &p.to_csr())?;
    let want = spec.target_moments();
    let checks = [
        ("mean q", got.mean_q, want.mean_q),
        ("mean p", got.mean_p, want.mean_p),
        ("var q", got.var_q, want.var_q),
        ("var p", got.var_p, want.var_p),
        ("cov", got.cov_sym, want.cov_sym),
    ];
    for (name, g, w) in checks {
        if (g - w).abs() > 1e-6 * w.abs().max(1.0) {
            return Err(Error::Truncation(format!(
                "{name} = {g} misses target {w} at cutoff {n}"
            )));
        }
    }
    Ok(state)
}

/// Meter state of the Gaussian family with moments (q₀, p₀, Δq², 1/(4Δq²), 0).
pub fn gaussian_meter_state(space: FockSpace, spec: &GaussianMeterSpec) -> Result<StateVector> {
    spec.validate()?;
    gaussian_state(space, &spec.to_squeezed())
}
