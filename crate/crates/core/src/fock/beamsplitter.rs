use num_complex::Complex64 as C64;

use super::expm::expm_dense;
use super::operator::{annihilation, Operator, I};
use super::space::{FockSpace, Space};
use crate::error::{Error, Result};

/// Phase convention of a 50-50 beamsplitter, stated as its action on
/// coherent amplitudes (β₁, β₂) of the two input modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BeamsplitterConvention {
    /// β₁′ = (β₁ + iβ₂)/√2, β₂′ = (iβ₁ + β₂)/√2. Maps the biased
    /// interferometer input onto a nearly dark first output port.
    Symmetric,
    /// β₁′ = (β₁ − β₂)/√2, β₂′ = (β₁ + β₂)/√2.
    Real,
}

/// Unitary of a lossless 50-50 beamsplitter on a two-mode space with equal
/// cutoffs. Exact within each total-photon-number sector that fits below
/// the cutoff.
pub fn beamsplitter_5050(space: &Space, convention: BeamsplitterConvention) -> Result<Operator> {
    let f = space.factors();
    if f.len() != 2 {
        return Err(Error::invalid(format!("beamsplitter needs two modes, got {}", f.len())));
    }
    if f[0] != f[1] {
        return Err(Error::invalid(format!("beamsplitter modes have unequal cutoffs {} and {}", f[0], f[1])));
    }
    let mode = FockSpace::new(f[0])?;
    let a = annihilation(mode);
    let id = Operator::identity(mode);
    let a1 = a.kron(&id);
    let a2 = id.kron(&a);
    let hop = &a1.adjoint() * &a2;
    let theta = C64::from(std::f64::consts::FRAC_PI_4);
    let gen = match convention {
        BeamsplitterConvention::Symmetric => (&hop + &hop.adjoint()).scale(I * theta),
        BeamsplitterConvention::Real => (&hop.adjoint() - &hop).scale(theta),
    };
    Operator::from_matrix(space.clone(), expm_dense(gen.matrix())?)
}
