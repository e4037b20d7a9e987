use std::borrow::Cow;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::operator::{Operator, ZERO};
use super::space::{FockSpace, Space};
use crate::error::{Error, Result};

/// Tolerance on the unit-norm / unit-trace invariant.
pub const NORM_TOL: f64 = 1e-10;
/// Largest probability mass a state may lose to truncation.
pub const TAIL_TOL: f64 = 1e-8;

/// Whether a state carries unit norm (trace) or is an intermediate such as
/// a postselected meter state whose norm is a probability.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Normalization {
    Normalized,
    Unnormalized,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    space: Space,
    amplitudes: DVector<C64>,
    normalization: Normalization,
}

fn check_dim(space: &Space, len: usize) -> Result<()> {
    if space.dim() != len {
        return Err(Error::DimensionMismatch { expected: space.dim(), found: len });
    }
    Ok(())
}

impl StateVector {
    /// Requires unit norm within [`NORM_TOL`].
    pub fn new(space: impl Into<Space>, amplitudes: DVector<C64>) -> Result<Self> {
        let space = space.into();
        check_dim(&space, amplitudes.len())?;
        let n = amplitudes.norm();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::invalid(format!("state norm {n} is not 1")));
        }
        Ok(StateVector { space, amplitudes, normalization: Normalization::Normalized })
    }

    pub fn normalized(space: impl Into<Space>, amplitudes: DVector<C64>) -> Result<Self> {
        let n = amplitudes.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::Numerical(format!("cannot normalize vector of norm {n}")));
        }
        Self::new(space, amplitudes.unscale(n))
    }

    pub fn unnormalized(space: impl Into<Space>, amplitudes: DVector<C64>) -> Result<Self> {
        let space = space.into();
        check_dim(&space, amplitudes.len())?;
        Ok(StateVector { space, amplitudes, normalization: Normalization::Unnormalized })
    }

    pub fn basis(space: impl Into<Space>, index: usize) -> Result<Self> {
        let space = space.into();
        if index >= space.dim() {
            return Err(Error::invalid(format!(
                "basis index {index} outside dimension {}",
                space.dim()
            )));
        }
        let mut v = DVector::zeros(space.dim());
        v[index] = C64::new(1.0, 0.0);
        Self::new(space, v)
    }

    pub fn vacuum(space: impl Into<Space>) -> Self {
        Self::basis(space, 0).expect("index 0 always exists")
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// |⟨a|b⟩|² / (⟨a|a⟩⟨b|b⟩).
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr() / (self.norm_sqr() * other.norm_sqr())
    }

    /// O|ψ⟩, flagged unnormalized.
    pub fn apply(&self, op: &Operator) -> Result<StateVector> {
        check_dim(&self.space, op.dim())?;
        StateVector::unnormalized(self.space.clone(), op.matrix() * &self.amplitudes)
    }

    /// ⟨ψ|O|ψ⟩ / ⟨ψ|ψ⟩.
    pub fn expectation(&self, op: &Operator) -> Result<C64> {
        check_dim(&self.space, op.dim())?;
        Ok(self.amplitudes.dotc(&(op.matrix() * &self.amplitudes)) / self.norm_sqr())
    }

    pub fn kron(&self, other: &StateVector) -> StateVector {
        let normalization = if self.normalization == Normalization::Normalized
            && other.normalization == Normalization::Normalized
        {
            Normalization::Normalized
        } else {
            Normalization::Unnormalized
        };
        StateVector {
            space: self.space.kron(&other.space),
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
            normalization,
        }
    }
}

/// A (possibly unnormalized) density operator. States built from pure
/// vectors remember their decomposition so large meter states never need
/// an eigensolver.
#[derive(Clone, Debug)]
pub struct DensityOperator {
    space: Space,
    matrix: DMatrix<C64>,
    normalization: Normalization,
    ensemble: Option<Vec<(f64, DVector<C64>)>>,
}

impl PartialEq for DensityOperator {
    fn eq(&self, other: &Self) -> bool {
        self.space == other.space
            && self.matrix == other.matrix
            && self.normalization == other.normalization
    }
}

fn hermitian_residue(m: &DMatrix<C64>) -> f64 {
    (m - m.adjoint()).camax()
}

impl DensityOperator {
    pub fn from_pure(state: &StateVector) -> Self {
        let v = state.amplitudes();
        let w = state.norm_sqr();
        let ensemble = if w > 0.0 { vec![(w, v.unscale(w.sqrt()))] } else { Vec::new() };
        DensityOperator {
            space: state.space.clone(),
            matrix: v * v.adjoint(),
            normalization: state.normalization,
            ensemble: Some(ensemble),
        }
    }

    /// Validates Hermiticity, positivity and unit trace, each within 1e-10.
    pub fn from_matrix(space: impl Into<Space>, matrix: DMatrix<C64>) -> Result<Self> {
        let space = space.into();
        check_dim(&space, matrix.nrows())?;
        check_dim(&space, matrix.ncols())?;
        let h = hermitian_residue(&matrix);
        if h > NORM_TOL {
            return Err(Error::invalid(format!("density matrix not Hermitian (residue {h:e})")));
        }
        let tr = matrix.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > NORM_TOL {
            return Err(Error::invalid(format!("density matrix trace {tr} is not 1")));
        }
        let min = matrix.clone().symmetric_eigenvalues().min();
        if min < -NORM_TOL {
            return Err(Error::invalid(format!("density matrix has eigenvalue {min:e}")));
        }
        Ok(DensityOperator { space, matrix, normalization: Normalization::Normalized, ensemble: None })
    }

    pub fn unnormalized(space: impl Into<Space>, matrix: DMatrix<C64>) -> Result<Self> {
        let space = space.into();
        check_dim(&space, matrix.nrows())?;
        check_dim(&space, matrix.ncols())?;
        Ok(DensityOperator {
            space,
            matrix,
            normalization: Normalization::Unnormalized,
            ensemble: None,
        })
    }

    pub fn maximally_mixed(space: impl Into<Space>) -> Self {
        let space = space.into();
        let d = space.dim();
        DensityOperator {
            matrix: DMatrix::identity(d, d) / C64::from(d as f64),
            space,
            normalization: Normalization::Normalized,
            ensemble: None,
        }
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// tr(Oρ) / tr(ρ).
    pub fn expectation(&self, op: &Operator) -> Result<C64> {
        check_dim(&self.space, op.dim())?;
        let tr = self.matrix.trace();
        Ok((op.matrix() * &self.matrix).trace() / tr)
    }

    pub fn scaled(&self, factor: f64) -> DensityOperator {
        DensityOperator {
            space: self.space.clone(),
            matrix: &self.matrix * C64::from(factor),
            normalization: Normalization::Unnormalized,
            ensemble: self
                .ensemble
                .as_ref()
                .map(|e| e.iter().map(|(w, v)| (w * factor, v.clone())).collect()),
        }
    }

    pub fn kron(&self, other: &DensityOperator) -> DensityOperator {
        let normalization = if self.normalization == Normalization::Normalized
            && other.normalization == Normalization::Normalized
        {
            Normalization::Normalized
        } else {
            Normalization::Unnormalized
        };
        DensityOperator {
            space: self.space.kron(&other.space),
            matrix: self.matrix.kronecker(&other.matrix),
            normalization,
            ensemble: None,
        }
    }

    /// Weighted orthonormal pure components, ρ = Σ wₖ |vₖ⟩⟨vₖ|. Components
    /// with weight below 1e-15·tr(ρ) are dropped.
    pub fn ensemble(&self) -> Cow<'_, [(f64, DVector<C64>)]> {
        if let Some(e) = &self.ensemble {
            return Cow::Borrowed(e);
        }
        let eig = self.matrix.clone().symmetric_eigen();
        let floor = 1e-15 * self.trace().abs().max(f64::MIN_POSITIVE);
        let comps = eig
            .eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > floor)
            .map(|(k, &w)| (w, eig.eigenvectors.column(k).into_owned()))
            .collect();
        Cow::Owned(comps)
    }
}

/// Truncated coherent state e^{−|α|²/2} Σ αⁿ/√n! |n⟩, renormalized on the
/// cutoff. Fails if the discarded mass exceeds [`TAIL_TOL`].
pub fn coherent_state(space: FockSpace, alpha: C64) -> Result<StateVector> {
    if !alpha.re.is_finite() || !alpha.im.is_finite() {
        return Err(Error::invalid("non-finite coherent amplitude"));
    }
    let n = space.cutoff();
    let mut amps = DVector::from_element(n, ZERO);
    let mut c = C64::from((-alpha.norm_sqr() / 2.0).exp());
    amps[0] = c;
    for k in 1..n {
        c = c * alpha / (k as f64).sqrt();
        amps[k] = c;
    }
    let tail = coherent_tail_mass(alpha.norm(), n);
    if tail > TAIL_TOL {
        return Err(Error::Truncation(format!(
            "coherent amplitude |α|={} loses {tail:e} probability beyond cutoff {n}",
            alpha.norm()
        )));
    }
    StateVector::normalized(space, amps)
}

/// Poisson mass at n ≥ cutoff for mean photon number r².
pub(crate) fn coherent_tail_mass(r: f64, cutoff: usize) -> f64 {
    let mean = r * r;
    if mean == 0.0 {
        return 0.0;
    }
    let mut log_term = -mean + cutoff as f64 * mean.ln() - ln_factorial(cutoff);
    let mut total = 0.0;
    let mut k = cutoff;
    loop {
        let t = log_term.exp();
        total += t;
        k += 1;
        log_term += mean.ln() - (k as f64).ln();
        if (t < 1e-30 && k as f64 > mean) || k > cutoff + 100_000 {
            break;
        }
    }
    total
}

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}
