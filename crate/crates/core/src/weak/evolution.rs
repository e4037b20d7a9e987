use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::coupling::{Propagate, WeakMeasurement};
use super::first_order::pointer_shift_first_order;
use super::value::{PostselectionOperator, WeakValue};
use crate::error::{Error, Result};
use crate::fock::moments::{moments_csr, real_part, StateRef};
use crate::fock::{CsrMatrix, DensityOperator, Operator, StateVector};

/// Floor on tr(ρ_d′) for conditional means.
pub const TRACE_FLOOR: f64 = 1e-12;

/// Meter state after coupling and a successful postselection.
#[derive(Clone, Debug)]
pub struct Postselected {
    /// ρ_d′ = tr_s[Π_f U (ρ_s⊗ρ_d) U†], unnormalized.
    pub meter: DensityOperator,
    /// tr ρ_d′.
    pub probability: f64,
}

/// Exact coupled evolution followed by postselection of the system on Π_f.
/// Mixed inputs are expanded into their pure components.
pub fn evolve_and_postselect(
    u: &impl Propagate,
    pre_sys: &DensityOperator,
    meter: &DensityOperator,
    post: &PostselectionOperator,
) -> Result<Postselected> {
    let (s, d) = (pre_sys.dim(), meter.dim());
    if post.dim() != s {
        return Err(Error::DimensionMismatch { expected: s, found: post.dim() });
    }
    let pi = post.operator().matrix();
    let mut acc = DMatrix::<C64>::zeros(d, d);
    for (ws, psi) in pre_sys.ensemble().iter() {
        for (wd, phi) in meter.ensemble().iter() {
            let joint = psi * phi.transpose();
            let v = u.propagate(&joint)?;
            let block = v.adjoint() * (pi * &v);
            acc += block.transpose() * C64::from(ws * wd);
        }
    }
    let probability = real_part(acc.trace(), "postselection probability")?;
    Ok(Postselected {
        meter: DensityOperator::unnormalized(meter.space().clone(), acc)?,
        probability,
    })
}

/// Pure-state path: |φ′⟩ = ⟨ψ_f|U|ψ_i⟩|φ⟩ (unnormalized) and P = ⟨φ′|φ′⟩.
pub fn evolve_and_postselect_pure(
    u: &impl Propagate,
    pre_sys: &StateVector,
    meter: &StateVector,
    post: &StateVector,
) -> Result<(StateVector, f64)> {
    if post.dim() != pre_sys.dim() {
        return Err(Error::DimensionMismatch { expected: pre_sys.dim(), found: post.dim() });
    }
    let joint = pre_sys.amplitudes() * meter.amplitudes().transpose();
    let v = u.propagate(&joint)?;
    let out = v.transpose() * post.amplitudes().conjugate();
    let state = StateVector::unnormalized(meter.space().clone(), out)?;
    let p = state.norm_sqr();
    Ok((state, p))
}

fn mean(m: &CsrMatrix, rho: &DensityOperator) -> Result<f64> {
    let tr = rho.trace();
    if !(tr > TRACE_FLOOR) {
        return Err(Error::VanishingPostselection(tr));
    }
    real_part(m.trace_product(rho.matrix()) / tr, "pointer mean")
}

/// δM = tr(M ρ_d′)/tr(ρ_d′) − tr(M ρ_d).
pub fn pointer_shift_exact(m: &Operator, meter_out: &DensityOperator, meter_in: &DensityOperator) -> Result<f64> {
    for d in [meter_out.dim(), meter_in.dim()] {
        if d != m.dim() {
            return Err(Error::DimensionMismatch { expected: m.dim(), found: d });
        }
    }
    let csr = m.to_csr();
    Ok(mean(&csr, meter_out)? - mean(&csr, meter_in)?)
}

pub(crate) fn shift_pair(model: &WeakMeasurement, out: &DensityOperator, input: &DensityOperator) -> Result<(f64, f64)> {
    Ok((
        mean(model.q_csr(), out)? - mean(model.q_csr(), input)?,
        mean(model.p_csr(), out)? - mean(model.p_csr(), input)?,
    ))
}

/// Pointer shifts without postselection, exact and first order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoPostselectionShifts {
    pub dq0_exact: f64,
    pub dp0_exact: f64,
    pub dq0_first_order: f64,
    pub dp0_first_order: f64,
}

/// Shifts with Π_f = I. To first order δq₀ = g⟨A⟩·⟨−i[q,p]⟩ and
/// δp₀ = −g⟨B⟩·⟨−i[q,p]⟩, i.e. g⟨A⟩ and −g⟨B⟩ for a canonical meter.
pub fn no_postselection_shifts(
    model: &WeakMeasurement,
    pre_sys: &DensityOperator,
    meter: &DensityOperator,
) -> Result<NoPostselectionShifts> {
    let all = PostselectionOperator::new(Operator::identity(pre_sys.space().clone()))?;
    let out = evolve_and_postselect(model, pre_sys, meter, &all)?;
    let (dq0_exact, dp0_exact) = shift_pair(model, &out.meter, meter)?;
    let mean_a = real_part(pre_sys.expectation(model.a())?, "⟨A⟩")?;
    let mean_b = real_part(pre_sys.expectation(model.b())?, "⟨B⟩")?;
    let mom = moments_csr(StateRef::Mixed(meter), model.q_csr(), model.p_csr())?;
    let (dq0_first_order, dp0_first_order) = pointer_shift_first_order(
        WeakValue::new(mean_a, 0.0),
        WeakValue::new(mean_b, 0.0),
        &mom,
        model.g(),
        mom.commutator,
    );
    Ok(NoPostselectionShifts { dq0_exact, dp0_exact, dq0_first_order, dp0_first_order })
}
