use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A single bosonic mode truncated to the number states |0⟩…|N−1⟩.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FockSpace {
    cutoff: usize,
}

impl FockSpace {
    pub fn new(cutoff: usize) -> Result<Self> {
        if cutoff < 2 {
            return Err(Error::invalid(format!(
                "Fock cutoff must be at least 2, got {cutoff}"
            )));
        }
        Ok(FockSpace { cutoff })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.cutoff
    }
}

pub fn make_space(cutoff: usize) -> Result<FockSpace> {
    FockSpace::new(cutoff)
}

/// Ordered tensor product of Fock modes. Composite basis indices are
/// row-major over the factor list: the last factor varies fastest.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Space {
    factors: Vec<usize>,
}

impl Space {
    pub fn product(modes: &[FockSpace]) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::invalid("a space needs at least one mode"));
        }
        Ok(Space {
            factors: modes.iter().map(FockSpace::cutoff).collect(),
        })
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn dim(&self) -> usize {
        self.factors.iter().product()
    }

    pub fn is_single_mode(&self) -> bool {
        self.factors.len() == 1
    }

    pub fn kron(&self, other: &Space) -> Space {
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&other.factors);
        Space { factors }
    }

    /// Per-factor occupation numbers of a composite basis index.
    pub fn occupations(&self, mut index: usize) -> Vec<usize> {
        let mut occ = vec![0; self.factors.len()];
        for (slot, &n) in occ.iter_mut().zip(&self.factors).rev() {
            *slot = index % n;
            index /= n;
        }
        occ
    }

    pub fn index_of(&self, occupations: &[usize]) -> usize {
        assert_eq!(occupations.len(), self.factors.len());
        occupations
            .iter()
            .zip(&self.factors)
            .fold(0, |acc, (&k, &n)| {
                assert!(k < n, "occupation {k} exceeds cutoff {n}");
                acc * n + k
            })
    }

    /// Basis indices whose occupations stay `margin` levels below every
    /// factor's cutoff. Truncated ladder operators obey the bosonic algebra
    /// exactly there (margin 1 for linear, 2 for quadratic expressions).
    pub fn safe_indices(&self, margin: usize) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| {
                self.occupations(i)
                    .iter()
                    .zip(&self.factors)
                    .all(|(&k, &n)| k + margin < n)
            })
            .collect()
    }
}

impl From<FockSpace> for Space {
    fn from(mode: FockSpace) -> Self {
        Space {
            factors: vec![mode.cutoff],
        }
    }
}
