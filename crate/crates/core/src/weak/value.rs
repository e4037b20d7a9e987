use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{DensityOperator, Operator, StateVector};

/// Default floor on tr(Π_f ρ_s) below which weak values are refused.
pub const OVERLAP_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakValue(pub C64);

impl WeakValue {
    pub fn new(re: f64, im: f64) -> Self {
        WeakValue(C64::new(re, im))
    }

    pub fn value(&self) -> C64 {
        self.0
    }

    pub fn re(&self) -> f64 {
        self.0.re
    }

    pub fn im(&self) -> f64 {
        self.0.im
    }
}

impl From<C64> for WeakValue {
    fn from(z: C64) -> Self {
        WeakValue(z)
    }
}

/// Postselection effect Π_f: Hermitian with spectrum in [0, 1].
#[derive(Clone, Debug, PartialEq)]
pub struct PostselectionOperator {
    op: Operator,
}

impl PostselectionOperator {
    pub fn new(op: Operator) -> Result<Self> {
        if !op.is_hermitian(1e-10) {
            return Err(Error::invalid("postselection operator is not Hermitian"));
        }
        let eig = op.matrix().clone().symmetric_eigenvalues();
        let (lo, hi) = (eig.min(), eig.max());
        if lo < -1e-10 || hi > 1.0 + 1e-10 {
            return Err(Error::invalid(format!(
                "postselection spectrum [{lo}, {hi}] leaves [0, 1]"
            )));
        }
        Ok(PostselectionOperator { op })
    }

    /// |ψ_f⟩⟨ψ_f| for a normalized state.
    pub fn projector(state: &StateVector) -> Self {
        let v = state.amplitudes().unscale(state.norm_sqr().sqrt());
        let m = &v * v.adjoint();
        PostselectionOperator {
            op: Operator::from_matrix(state.space().clone(), m).expect("dimension from state"),
        }
    }

    /// η·Π for detector efficiency η ∈ (0, 1].
    pub fn with_efficiency(&self, eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(Error::invalid(format!("detector efficiency must lie in (0, 1], got {eta}")));
        }
        Ok(PostselectionOperator { op: self.op.scale(C64::from(eta)) })
    }

    pub fn operator(&self) -> &Operator {
        &self.op
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }
}

/// tr(Π_f ρ_s).
pub fn selection_probability(post: &PostselectionOperator, pre: &DensityOperator) -> Result<f64> {
    if post.dim() != pre.dim() {
        return Err(Error::DimensionMismatch { expected: pre.dim(), found: post.dim() });
    }
    Ok((post.op.matrix() * pre.matrix()).trace().re)
}

/// ⟨Ω⟩_w = tr(Π_f Ω ρ_s) / tr(Π_f ρ_s), refusing selections with
/// tr(Π_f ρ_s) ≤ [`OVERLAP_FLOOR`].
pub fn weak_value(post: &PostselectionOperator, obs: &Operator, pre: &DensityOperator) -> Result<WeakValue> {
    weak_value_with_floor(post, obs, pre, OVERLAP_FLOOR)
}

pub fn weak_value_with_floor(
    post: &PostselectionOperator,
    obs: &Operator,
    pre: &DensityOperator,
    floor: f64,
) -> Result<WeakValue> {
    for d in [post.dim(), obs.dim()] {
        if d != pre.dim() {
            return Err(Error::DimensionMismatch { expected: pre.dim(), found: d });
        }
    }
    let pi = post.op.matrix();
    let (num, den) = match pre.ensemble() {
        // pure-state shortcut: tr(Π Ω |ψ⟩⟨ψ|) = ⟨ψ|Π Ω|ψ⟩
        e if e.len() == 1 => {
            let (w, v) = &e[0];
            let pv = pi.adjoint() * v;
            (pv.dotc(&(obs.matrix() * v)) * *w, pv.dotc(v) * *w)
        }
        _ => (
            (pi * obs.matrix() * pre.matrix()).trace(),
            (pi * pre.matrix()).trace(),
        ),
    };
    if !(den.re > floor) {
        return Err(Error::NearOrthogonalSelection { overlap: den.re, floor });
    }
    Ok(WeakValue(num / den))
}

/// ⟨ψ_f|Ω|ψ_i⟩ / ⟨ψ_f|ψ_i⟩ with the floor applied to |⟨ψ_f|ψ_i⟩|².
pub fn weak_value_pure(post: &StateVector, obs: &Operator, pre: &StateVector) -> Result<WeakValue> {
    if post.dim() != pre.dim() || obs.dim() != pre.dim() {
        return Err(Error::DimensionMismatch { expected: pre.dim(), found: post.dim().max(obs.dim()) });
    }
    let overlap = post.inner(pre);
    if !(overlap.norm_sqr() > OVERLAP_FLOOR) {
        return Err(Error::NearOrthogonalSelection { overlap: overlap.norm_sqr(), floor: OVERLAP_FLOOR });
    }
    let num = post.amplitudes().dotc(&(obs.matrix() * pre.amplitudes()));
    Ok(WeakValue(num / overlap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{meter_quadratures, FockSpace};
    use nalgebra::DVector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_state(space: FockSpace, rng: &mut ChaCha8Rng) -> StateVector {
        let v = DVector::from_fn(space.dim(), |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        StateVector::normalized(space, v).unwrap()
    }

    #[test]
    fn identity_has_unit_weak_value() {
        let s = FockSpace::new(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pre = DensityOperator::from_pure(&random_state(s, &mut rng));
        let post = PostselectionOperator::projector(&random_state(s, &mut rng));
        let w = weak_value(&post, &Operator::identity(s), &pre).unwrap();
        assert!((w.value() - C64::new(1.0, 0.0)).norm() < 1e-13);
        let mixed = DensityOperator::maximally_mixed(s);
        let w = weak_value(&post, &Operator::identity(s), &mixed).unwrap();
        assert!((w.value() - C64::new(1.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn vacuum_quadrature_weak_value_vanishes() {
        let s = FockSpace::new(6).unwrap();
        let (q, _) = meter_quadratures(s, 0.0);
        let vac = StateVector::vacuum(s);
        let w = weak_value(&PostselectionOperator::projector(&vac), &q, &DensityOperator::from_pure(&vac)).unwrap();
        assert!(w.value().norm() < 1e-15);
    }

    #[test]
    fn generalized_form_reduces_to_pure_form() {
        let s = FockSpace::new(6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (q, p) = meter_quadratures(s, 0.4);
        for _ in 0..20 {
            let psi_i = random_state(s, &mut rng);
            let psi_f = random_state(s, &mut rng);
            let obs = if rng.random::<bool>() { &q } else { &p };
            let pure = weak_value_pure(&psi_f, obs, &psi_i).unwrap();
            // matrix route without the cached pure decomposition
            let rho = DensityOperator::from_matrix(s, DensityOperator::from_pure(&psi_i).matrix().clone()).unwrap();
            let general = weak_value(&PostselectionOperator::projector(&psi_f), obs, &rho).unwrap();
            let rel = (pure.value() - general.value()).norm() / pure.value().norm().max(1.0);
            assert!(rel < 1e-12, "{rel:e}");
        }
    }

    #[test]
    fn orthogonal_selection_is_refused() {
        let s = FockSpace::new(3).unwrap();
        let pre = DensityOperator::from_pure(&StateVector::basis(s, 0).unwrap());
        let post = PostselectionOperator::projector(&StateVector::basis(s, 1).unwrap());
        assert!(matches!(
            weak_value(&post, &Operator::identity(s), &pre),
            Err(Error::NearOrthogonalSelection { .. })
        ));
    }

    #[test]
    fn postselection_validation() {
        let s = FockSpace::new(3).unwrap();
        assert!(PostselectionOperator::new(Operator::identity(s).scale(C64::from(1.5))).is_err());
        assert!(PostselectionOperator::new(crate::fock::annihilation(s)).is_err());
        let p = PostselectionOperator::new(Operator::identity(s)).unwrap();
        assert!(p.with_efficiency(0.0).is_err());
        assert!(p.with_efficiency(0.3).is_ok());
    }
}
