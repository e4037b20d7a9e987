use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::expm::{expm_action, expm_dense};
use crate::fock::operator::{annihilation, meter_quadratures, system_quadratures};
use crate::fock::{CsrMatrix, FockSpace, Operator};

/// Coupling strength and quadrature angle of the impulsive interaction
/// U = exp(−ig(A′⊗p′ + B′⊗q′)). g = 0 is accepted and means no interaction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingConfig {
    pub g: f64,
    pub phi: f64,
}

impl CouplingConfig {
    pub fn new(g: f64, phi: f64) -> Result<Self> {
        if !g.is_finite() || g < 0.0 {
            return Err(Error::invalid(format!("coupling g must be finite and non-negative, got {g}")));
        }
        if !phi.is_finite() {
            return Err(Error::invalid("quadrature angle must be finite"));
        }
        Ok(CouplingConfig { g, phi })
    }
}

/// A′⊗p′ + B′⊗q′ on system ⊗ meter.
pub fn coupling_generator(sys: FockSpace, meter: FockSpace, phi: f64) -> Operator {
    let (a, b) = system_quadratures(sys, phi);
    let (q, p) = meter_quadratures(meter, phi);
    &a.kron(&p) + &b.kron(&q)
}

/// The down-conversion form a_s a_d + a_s†a_d†.
pub fn pdc_generator(sys: FockSpace, meter: FockSpace) -> Operator {
    let a_s = annihilation(sys);
    let a_d = annihilation(meter);
    let pair = a_s.kron(&a_d);
    &pair + &pair.adjoint()
}

/// Dense exp(−ig(A′⊗p′ + B′⊗q′)).
pub fn coupling_unitary(cfg: &CouplingConfig, sys: FockSpace, meter: FockSpace) -> Result<Operator> {
    let h = coupling_generator(sys, meter, cfg.phi);
    let x = h.matrix() * C64::new(0.0, -cfg.g);
    Operator::from_matrix(h.space().clone(), expm_dense(&x)?)
}

/// Evolution of a joint system–meter state held as a (system × meter)
/// amplitude matrix, so entry (i, k) is the amplitude of |i⟩|k⟩.
pub trait Propagate {
    fn propagate(&self, joint: &DMatrix<C64>) -> Result<DMatrix<C64>>;
}

impl Propagate for Operator {
    fn propagate(&self, joint: &DMatrix<C64>) -> Result<DMatrix<C64>> {
        let (s, d) = joint.shape();
        if self.dim() != s * d {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: s * d });
        }
        let flat = nalgebra::DVector::from_row_slice(joint.transpose().as_slice());
        let out = self.matrix() * flat;
        Ok(DMatrix::from_row_slice(s, d, out.as_slice()))
    }
}

/// A weak-measurement model: system observables A, B, meter pointers q, p
/// and coupling g, evolving under exp(−ig(A⊗p + B⊗q)).
///
/// Propagation applies the generator as A·Ψ·pᵀ + B·Ψ·qᵀ on the amplitude
/// matrix and never forms the joint unitary, so meters with hundreds of
/// levels stay cheap.
#[derive(Clone, Debug)]
pub struct WeakMeasurement {
    g: f64,
    a: Operator,
    b: Operator,
    q: Operator,
    p: Operator,
    sparse: [CsrMatrix; 4],
}

impl WeakMeasurement {
    pub fn new(g: f64, a: Operator, b: Operator, q: Operator, p: Operator) -> Result<Self> {
        if !g.is_finite() || g < 0.0 {
            return Err(Error::invalid(format!("coupling g must be finite and non-negative, got {g}")));
        }
        if a.space() != b.space() {
            return Err(Error::invalid("system observables live on different spaces"));
        }
        if q.space() != p.space() {
            return Err(Error::invalid("meter observables live on different spaces"));
        }
        for (name, op) in [("A", &a), ("B", &b), ("q", &q), ("p", &p)] {
            if !op.is_hermitian(1e-10) {
                return Err(Error::invalid(format!("{name} is not Hermitian")));
            }
        }
        let sparse = [a.to_csr(), b.to_csr(), q.to_csr(), p.to_csr()];
        Ok(WeakMeasurement { g, a, b, q, p, sparse })
    }

    /// Single-mode system and meter with the quadrature pairs at `cfg.phi`.
    pub fn quadrature(cfg: &CouplingConfig, sys: FockSpace, meter: FockSpace) -> Self {
        let (a, b) = system_quadratures(sys, cfg.phi);
        let (q, p) = meter_quadratures(meter, cfg.phi);
        Self::new(cfg.g, a, b, q, p).expect("quadratures are Hermitian")
    }

    /// Prepends an uncoupled spectator mode to the system: A → I⊗A, B → I⊗B.
    pub fn with_spectator(self, spectator: FockSpace) -> Self {
        let id = Operator::identity(spectator);
        let a = id.kron(&self.a);
        let b = id.kron(&self.b);
        Self::new(self.g, a, b, self.q, self.p).expect("embedding preserves Hermiticity")
    }

    pub fn with_coupling(&self, g: f64) -> Result<Self> {
        Self::new(g, self.a.clone(), self.b.clone(), self.q.clone(), self.p.clone())
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn a(&self) -> &Operator {
        &self.a
    }

    pub fn b(&self) -> &Operator {
        &self.b
    }

    pub fn q(&self) -> &Operator {
        &self.q
    }

    pub fn p(&self) -> &Operator {
        &self.p
    }

    pub(crate) fn q_csr(&self) -> &CsrMatrix {
        &self.sparse[2]
    }

    pub(crate) fn p_csr(&self) -> &CsrMatrix {
        &self.sparse[3]
    }

    pub fn system_dim(&self) -> usize {
        self.a.dim()
    }

    pub fn meter_dim(&self) -> usize {
        self.q.dim()
    }

    /// A⊗p + B⊗q as a dense joint operator.
    pub fn generator(&self) -> Operator {
        &self.a.kron(&self.p) + &self.b.kron(&self.q)
    }

    /// Dense joint unitary; only sensible for small spaces.
    pub fn unitary(&self) -> Result<Operator> {
        let h = self.generator();
        let x = h.matrix() * C64::new(0.0, -self.g);
        Operator::from_matrix(h.space().clone(), expm_dense(&x)?)
    }

    fn apply_generator(&self, psi: &DMatrix<C64>) -> DMatrix<C64> {
        let [a, b, q, p] = &self.sparse;
        p.right_mul_transpose(&a.mul_dense(psi)) + q.right_mul_transpose(&b.mul_dense(psi))
    }
}

impl Propagate for WeakMeasurement {
    fn propagate(&self, joint: &DMatrix<C64>) -> Result<DMatrix<C64>> {
        let (s, d) = joint.shape();
        if s != self.system_dim() || d != self.meter_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.system_dim() * self.meter_dim(),
                found: s * d,
            });
        }
        if self.g == 0.0 {
            return Ok(joint.clone());
        }
        let [a, b, q, p] = &self.sparse;
        let bound = self.g * (a.one_norm() * p.one_norm() + b.one_norm() * q.one_norm());
        let coeff = C64::new(0.0, -self.g);
        expm_action(|w| self.apply_generator(w) * coeff, bound, joint)
    }
}
