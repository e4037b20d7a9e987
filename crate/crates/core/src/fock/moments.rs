use nalgebra::DVector;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::operator::Operator;
use super::sparse::CsrMatrix;
use super::state::{DensityOperator, StateVector};
use crate::error::{Error, Result};

/// Imaginary parts of nominally real expectations below this are dropped.
pub const IMAG_TOL: f64 = 1e-10;

/// First and second moments of a meter quadrature pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeterMoments {
    pub mean_q: f64,
    pub mean_p: f64,
    pub var_q: f64,
    pub var_p: f64,
    /// ⟨{q−⟨q⟩, p−⟨p⟩}⟩, the full anticommutator (not halved).
    pub cov_sym: f64,
    /// ⟨[q, p]⟩; equals i for canonical pairs away from the truncation edge.
    pub commutator: C64,
}

impl MeterMoments {
    pub fn std_q(&self) -> f64 {
        self.var_q.max(0.0).sqrt()
    }

    pub fn std_p(&self) -> f64 {
        self.var_p.max(0.0).sqrt()
    }

    /// ⟨−i[q,p]⟩, real for Hermitian q and p.
    pub fn minus_i_commutator(&self) -> f64 {
        (self.commutator * C64::new(0.0, -1.0)).re
    }
}

#[derive(Clone, Copy, Debug)]
pub enum StateRef<'a> {
    Pure(&'a StateVector),
    Mixed(&'a DensityOperator),
}

impl<'a> From<&'a StateVector> for StateRef<'a> {
    fn from(s: &'a StateVector) -> Self {
        StateRef::Pure(s)
    }
}

impl<'a> From<&'a DensityOperator> for StateRef<'a> {
    fn from(s: &'a DensityOperator) -> Self {
        StateRef::Mixed(s)
    }
}

impl StateRef<'_> {
    fn dim(&self) -> usize {
        match self {
            StateRef::Pure(s) => s.dim(),
            StateRef::Mixed(r) => r.dim(),
        }
    }
}

pub(crate) fn real_part(z: C64, what: &str) -> Result<f64> {
    if z.im.abs() > IMAG_TOL * z.re.abs().max(1.0) {
        return Err(Error::Numerical(format!(
            "{what} has imaginary residue {:e}",
            z.im
        )));
    }
    Ok(z.re)
}

/// Quadrature moments of a pure or mixed (possibly unnormalized) state;
/// expectations are normalized by the state's norm or trace.
pub fn moments<'a>(state: impl Into<StateRef<'a>>, q: &Operator, p: &Operator) -> Result<MeterMoments> {
    let state = state.into();
    for op in [q, p] {
        if op.dim() != state.dim() {
            return Err(Error::DimensionMismatch { expected: state.dim(), found: op.dim() });
        }
        if !op.is_hermitian(1e-12) {
            return Err(Error::invalid("moment operators must be Hermitian"));
        }
    }
    moments_csr(state, &q.to_csr(), &p.to_csr())
}

pub(crate) fn moments_csr(state: StateRef<'_>, q: &CsrMatrix, p: &CsrMatrix) -> Result<MeterMoments> {
    let (tr, eq, ep, eqq, epp, eqp, epq) = match state {
        StateRef::Pure(s) => raw_pure(s.amplitudes(), q, p),
        StateRef::Mixed(r) => {
            let m = r.matrix();
            let yq = q.mul_dense(m);
            let yp = p.mul_dense(m);
            (
                m.trace(),
                yq.trace(),
                yp.trace(),
                q.trace_product(&yq),
                p.trace_product(&yp),
                q.trace_product(&yp),
                p.trace_product(&yq),
            )
        }
    };
    let tr = real_part(tr, "trace")?;
    if !(tr > 0.0) {
        return Err(Error::VanishingPostselection(tr));
    }
    let mean_q = real_part(eq / tr, "⟨q⟩")?;
    let mean_p = real_part(ep / tr, "⟨p⟩")?;
    let qq = real_part(eqq / tr, "⟨q²⟩")?;
    let pp = real_part(epp / tr, "⟨p²⟩")?;
    let anti = real_part((eqp + epq) / tr, "⟨{q,p}⟩")?;
    Ok(MeterMoments {
        mean_q,
        mean_p,
        var_q: qq - mean_q * mean_q,
        var_p: pp - mean_p * mean_p,
        cov_sym: anti - 2.0 * mean_q * mean_p,
        commutator: (eqp - epq) / tr,
    })
}

type Raw = (C64, C64, C64, C64, C64, C64, C64);

fn raw_pure(v: &DVector<C64>, q: &CsrMatrix, p: &CsrMatrix) -> Raw {
    let qv = q.mul_vec(v);
    let pv = p.mul_vec(v);
    let qp = qv.dotc(&pv);
    (
        v.dotc(v),
        v.dotc(&qv),
        v.dotc(&pv),
        qv.dotc(&qv),
        pv.dotc(&pv),
        qp,
        qp.conj(),
    )
}
