use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use super::config::{PostselectMode, SetupConfig};
use crate::error::Result;
use crate::fock::{beamsplitter_5050, coherent_state, BeamsplitterConvention, FockSpace, Operator, Space, StateVector};
use crate::weak::PostselectionOperator;

/// Output of the biased beamsplitter on s′⊗s:
/// |α(1−ε)/√2⟩_{s′} ⊗ |iα(1+ε)/√2⟩_s.
pub fn preselected_state(cfg: &SetupConfig) -> Result<StateVector> {
    let (sp, s) = cfg.system_modes()?;
    let alpha = cfg.alpha();
    let eps = cfg.epsilon;
    let a_sp = alpha * ((1.0 - eps) * FRAC_1_SQRT_2);
    let a_s = alpha * C64::new(0.0, (1.0 + eps) * FRAC_1_SQRT_2);
    Ok(coherent_state(sp, a_sp)?.kron(&coherent_state(s, a_s)?))
}

/// (|1⟩_{s′}|0⟩_s − i|0⟩_{s′}|1⟩_s)/√2: one photon leaving the dark port.
pub fn dark_port_photon(sp: FockSpace, s: FockSpace) -> StateVector {
    let space = Space::product(&[sp, s]).expect("two modes");
    let mut v = DVector::from_element(space.dim(), C64::new(0.0, 0.0));
    v[space.index_of(&[1, 0])] = C64::new(FRAC_1_SQRT_2, 0.0);
    v[space.index_of(&[0, 1])] = C64::new(0.0, -FRAC_1_SQRT_2);
    StateVector::new(space, v).expect("normalized by construction")
}

pub fn ideal_postselection(sp: FockSpace, s: FockSpace) -> PostselectionOperator {
    PostselectionOperator::projector(&dark_port_photon(sp, s))
}

/// η·U†(I − |0⟩⟨0|)U with U the 50:50 beamsplitter whose first output is the
/// dark port. Both modes need the same cutoff.
pub fn threshold_postselection(sp: FockSpace, s: FockSpace, eta: f64) -> Result<PostselectionOperator> {
    let space = Space::product(&[sp, s])?;
    let u = beamsplitter_5050(&space, BeamsplitterConvention::Symmetric)?;
    let dim = space.dim();
    let mut m = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        if space.occupations(i)[0] != 0 {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
    }
    let occupied = Operator::from_matrix(space, m)?;
    let clicked = &(&u.adjoint() * &occupied) * &u;
    let hermitian = Operator::from_matrix(
        clicked.space().clone(),
        (clicked.matrix() + clicked.matrix().adjoint()) * C64::new(0.5, 0.0),
    )?;
    PostselectionOperator::new(hermitian)?.with_efficiency(eta)
}

pub fn postselection(cfg: &SetupConfig) -> Result<PostselectionOperator> {
    let (sp, s) = cfg.system_modes()?;
    match cfg.postselect {
        PostselectMode::Ideal => ideal_postselection(sp, s).with_efficiency(cfg.eta),
        PostselectMode::Threshold => threshold_postselection(sp, s, cfg.eta),
    }
}
