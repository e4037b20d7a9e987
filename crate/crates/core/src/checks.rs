//! Named invariants with fixed seeds, run by `weakpdc check`.
//!
//! Each check reports the observed deviation, its tolerance and the margin
//! `tolerance − observed`; a check passes when the margin is non-negative.
//! The cutoff override replaces every Fock cutoff used by the truncation and
//! experiment checks, which is how truncation failures are exercised.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::fock::expm::expm_dense;
use crate::fock::{
    coherent_state, gaussian_meter_state, meter_quadratures, moments, DensityOperator, FockSpace,
    GaussianMeterSpec, Space, StateVector,
};
use crate::setup::{run_experiment, SetupConfig};
use crate::weak::{
    coupling_generator, evolve_and_postselect, evolve_and_postselect_pure, pdc_generator, pointer_shift_gaussian,
    recover_weak_values, weak_value, weak_value_pure, CouplingConfig, PostselectionOperator, ShiftRecord,
    WeakMeasurement, WeakValue,
};

pub const DEFAULT_SEED: u64 = 20_11;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckOptions {
    pub seed: u64,
    /// Replaces all cutoffs in the truncation-sensitive checks.
    pub cutoff_override: Option<usize>,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { seed: DEFAULT_SEED, cutoff_override: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub observed: f64,
    pub tolerance: f64,
    pub margin: f64,
    /// Set when the check could not be evaluated.
    pub error: Option<String>,
}

impl CheckOutcome {
    fn measure(name: &str, observed: f64, tolerance: f64) -> Self {
        let margin = tolerance - observed;
        CheckOutcome {
            name: name.to_string(),
            passed: observed.is_finite() && margin >= 0.0,
            observed,
            tolerance,
            margin,
            error: None,
        }
    }

    fn from_result(name: &str, tolerance: f64, r: Result<f64>) -> Self {
        match r {
            Ok(obs) => Self::measure(name, obs, tolerance),
            Err(e) => CheckOutcome {
                name: name.to_string(),
                passed: false,
                observed: f64::NAN,
                tolerance,
                margin: f64::NEG_INFINITY,
                error: Some(e.to_string()),
            },
        }
    }
}

fn rand_c(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
}

fn random_state(space: FockSpace, rng: &mut ChaCha8Rng) -> Result<StateVector> {
    StateVector::normalized(space, DVector::from_fn(space.dim(), |_, _| rand_c(rng)))
}

fn random_weak_value(rng: &mut ChaCha8Rng) -> WeakValue {
    let mag = 10f64.powf(rng.random_range(-2.0..3.0));
    WeakValue(C64::from_polar(mag, rng.random_range(0.0..std::f64::consts::TAU)))
}

fn expm_unitarity(rng: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let m = DMatrix::from_fn(12, 12, |_, _| rand_c(rng) * 4.0);
        let h = (&m + m.adjoint()) * C64::new(0.5, 0.0);
        let u = expm_dense(&(h * C64::new(0.0, -1.0)))?;
        worst = worst.max((u.adjoint() * &u - DMatrix::identity(12, 12)).camax());
    }
    Ok(worst)
}

fn phi_invariance(rng: &mut ChaCha8Rng) -> Result<f64> {
    let (s, d) = (FockSpace::new(6)?, FockSpace::new(9)?);
    let safe = Space::product(&[s, d])?.safe_indices(1);
    let reference = pdc_generator(s, d).restrict(&safe);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let phi = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        let h = coupling_generator(s, d, phi).restrict(&safe);
        worst = worst.max((h - &reference).camax());
    }
    Ok(worst)
}

fn weak_value_forms(rng: &mut ChaCha8Rng) -> Result<f64> {
    let s = FockSpace::new(5)?;
    let (obs, _) = meter_quadratures(s, 0.3);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let (i, f) = (random_state(s, rng)?, random_state(s, rng)?);
        let pure = weak_value_pure(&f, &obs, &i)?;
        let general = weak_value(&PostselectionOperator::projector(&f), &obs, &DensityOperator::from_pure(&i))?;
        worst = worst.max((pure.value() - general.value()).norm() / pure.value().norm().max(1.0));
    }
    Ok(worst)
}

fn supplement_equivalence(rng: &mut ChaCha8Rng) -> Result<f64> {
    let (s, d) = (FockSpace::new(4)?, FockSpace::new(16)?);
    let model = WeakMeasurement::quadrature(&CouplingConfig::new(0.02, 0.0)?, s, d);
    let phi = coherent_state(d, C64::new(0.3, 0.2))?;
    let (i, f) = (random_state(s, rng)?, random_state(s, rng)?);
    let (pure, p) = evolve_and_postselect_pure(&model, &i, &phi, &f)?;
    let mixed = evolve_and_postselect(
        &model,
        &DensityOperator::from_pure(&i),
        &DensityOperator::from_pure(&phi),
        &PostselectionOperator::projector(&f),
    )?;
    let rho = DensityOperator::from_pure(&pure);
    Ok(((rho.matrix() - mixed.meter.matrix()).camax() / p).max((mixed.probability - p).abs() / p))
}

fn inversion_round_trip(rng: &mut ChaCha8Rng) -> Result<f64> {
    let g = 1e-6;
    let (d1, d2) = (FRAC_1_SQRT_2, 0.4);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (a, b) = (random_weak_value(rng), random_weak_value(rng));
        let rec = |dq: f64| {
            let (sq, sp) = pointer_shift_gaussian(a, b, dq * dq, 0.25 / (dq * dq), g);
            ShiftRecord::new(dq, sq, sp)
        };
        let (ra, rb) = recover_weak_values(&rec(d1)?, &rec(d2)?, g)?;
        worst = worst
            .max((ra.value() - a.value()).norm() / a.value().norm())
            .max((rb.value() - b.value()).norm() / b.value().norm());
    }
    Ok(worst)
}

fn coherent_tail(n: Option<usize>) -> Result<f64> {
    // a unit-amplitude coherent state must fit in the cutoff
    let space = FockSpace::new(n.unwrap_or(24))?;
    let psi = coherent_state(space, C64::new(1.0, 0.0))?;
    let (q, _) = meter_quadratures(space, 0.0);
    Ok((psi.expectation(&q)?.re - std::f64::consts::SQRT_2).abs())
}

fn meter_moments(n: Option<usize>) -> Result<f64> {
    let space = FockSpace::new(n.unwrap_or(48))?;
    let spec = GaussianMeterSpec::new(0.5, -0.3, 1.0)?;
    let psi = gaussian_meter_state(space, &spec)?;
    let (q, p) = meter_quadratures(space, 0.0);
    let m = moments(&psi, &q, &p)?;
    Ok((m.commutator - C64::new(0.0, 1.0)).norm().max((m.var_q * m.var_p - 0.25).abs()))
}

fn experiment_cfg(n: Option<usize>, g: f64) -> SetupConfig {
    let base = SetupConfig { alpha_re: 0.5, epsilon: 0.1, g, meter_q0: 1.0, ..SetupConfig::default() };
    match n {
        Some(n) => SetupConfig { cutoff_s_prime: n, cutoff_s: n, cutoff_d: n, ..base },
        None => base,
    }
}

fn closed_form_agreement(n: Option<usize>) -> Result<f64> {
    let r = run_experiment(&experiment_cfg(n, 1e-3))?;
    let c = r.shifts.dq_closed.unwrap_or(f64::NAN);
    Ok((r.shifts.dq_exact - c).abs() / c.abs())
}

/// |log₂(residual(g)/residual(g/2)) − 2|
fn quadratic_decay(n: Option<usize>, probability: bool) -> Result<f64> {
    let residual = |g: f64| -> Result<f64> {
        let r = run_experiment(&experiment_cfg(n, g))?;
        Ok(if probability {
            r.agreement.p_exact_minus_first_order.abs()
        } else {
            r.agreement.dq_exact_minus_closed.unwrap_or(f64::NAN).abs()
        })
    };
    Ok(((residual(1e-3)? / residual(5e-4)?).log2() - 2.0).abs())
}

fn eta_scaling(n: Option<usize>) -> Result<f64> {
    let cfg = |eta: f64| SetupConfig {
        postselect: crate::setup::PostselectMode::Threshold,
        eta,
        ..experiment_cfg(n, 1e-3)
    };
    let full = run_experiment(&cfg(1.0))?;
    let part = run_experiment(&cfg(0.37))?;
    let shift = (full.shifts.dq_exact - part.shifts.dq_exact).abs() / full.shifts.dq_exact.abs();
    let slope = (part.probability.exact / 0.37 - full.probability.exact).abs() / full.probability.exact;
    Ok(shift.max(slope))
}

/// Runs the suite; each check draws from its own seeded stream so results do
/// not depend on which other checks ran.
pub fn run_checks(opts: &CheckOptions) -> Vec<CheckOutcome> {
    let rng = |k: u64| ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(k));
    let n = opts.cutoff_override;
    vec![
        CheckOutcome::from_result("expm.unitarity", 1e-10, expm_unitarity(&mut rng(1))),
        CheckOutcome::from_result("coupling.phi_invariance", 1e-10, phi_invariance(&mut rng(2))),
        CheckOutcome::from_result("weak_value.pure_equals_general", 1e-12, weak_value_forms(&mut rng(3))),
        CheckOutcome::from_result("evolution.supplement_equivalence", 1e-12, supplement_equivalence(&mut rng(4))),
        CheckOutcome::from_result("inversion.round_trip", 1e-9, inversion_round_trip(&mut rng(5))),
        CheckOutcome::from_result("truncation.coherent_tail", 1e-8, coherent_tail(n)),
        CheckOutcome::from_result("truncation.meter_moments", 1e-6, meter_moments(n)),
        CheckOutcome::from_result("experiment.closed_form_agreement", 0.05, closed_form_agreement(n)),
        CheckOutcome::from_result("experiment.shift_quadratic_decay", 0.4, quadratic_decay(n, false)),
        CheckOutcome::from_result("experiment.probability_quadratic_decay", 0.4, quadratic_decay(n, true)),
        CheckOutcome::from_result("experiment.efficiency_scaling", 1e-10, eta_scaling(n)),
    ]
}

pub fn all_passed(outcomes: &[CheckOutcome]) -> bool {
    outcomes.iter().all(|o| o.passed)
}
