use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::space::{FockSpace, Space};
use super::sparse::CsrMatrix;
use crate::error::{Error, Result};

pub(crate) const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
#[allow(dead_code)]
pub(crate) const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub(crate) const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Dense complex operator on a (possibly composite) truncated Fock space.
///
/// Arithmetic between operators panics on mismatched spaces, mirroring
/// nalgebra's own shape checks.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    space: Space,
    matrix: DMatrix<C64>,
}

impl Operator {
    pub fn from_matrix(space: Space, matrix: DMatrix<C64>) -> Result<Self> {
        let d = space.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: if matrix.nrows() != d { matrix.nrows() } else { matrix.ncols() },
            });
        }
        Ok(Operator { space, matrix })
    }

    pub fn identity(space: impl Into<Space>) -> Self {
        let space = space.into();
        let d = space.dim();
        Operator { space, matrix: DMatrix::identity(d, d) }
    }

    pub fn zeros(space: impl Into<Space>) -> Self {
        let space = space.into();
        let d = space.dim();
        Operator { space, matrix: DMatrix::zeros(d, d) }
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

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn adjoint(&self) -> Operator {
        Operator { space: self.space.clone(), matrix: self.matrix.adjoint() }
    }

    pub fn scale(&self, c: C64) -> Operator {
        Operator { space: self.space.clone(), matrix: &self.matrix * c }
    }

    pub fn commutator(&self, other: &Operator) -> Operator {
        &(self * other) - &(other * self)
    }

    pub fn anticommutator(&self, other: &Operator) -> Operator {
        &(self * other) + &(other * self)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (&self.matrix - self.matrix.adjoint()).camax() <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let d = self.dim();
        (self.matrix.adjoint() * &self.matrix - DMatrix::<C64>::identity(d, d)).camax() <= tol
    }

    pub fn is_finite(&self) -> bool {
        self.matrix.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Largest singular value. On a truncated space this grows with the
    /// cutoff for unbounded observables; callers report the cutoff with it.
    pub fn operator_norm(&self) -> f64 {
        self.matrix
            .clone()
            .singular_values()
            .iter()
            .cloned()
            .fold(0.0, f64::max)
    }

    /// Submatrix on the listed basis indices.
    pub fn restrict(&self, indices: &[usize]) -> DMatrix<C64> {
        DMatrix::from_fn(indices.len(), indices.len(), |r, c| {
            self.matrix[(indices[r], indices[c])]
        })
    }

    pub fn to_csr(&self) -> CsrMatrix {
        CsrMatrix::from_dense(&self.matrix)
    }

    /// Kronecker product; the composite space lists `self`'s factors first.
    pub fn kron(&self, other: &Operator) -> Operator {
        Operator {
            space: self.space.kron(&other.space),
            matrix: self.matrix.kronecker(&other.matrix),
        }
    }
}

fn check_same(a: &Operator, b: &Operator) {
    assert_eq!(a.space, b.space, "operator spaces differ");
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        check_same(self, rhs);
        Operator { space: self.space.clone(), matrix: &self.matrix + &rhs.matrix }
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        check_same(self, rhs);
        Operator { space: self.space.clone(), matrix: &self.matrix - &rhs.matrix }
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        check_same(self, rhs);
        Operator { space: self.space.clone(), matrix: &self.matrix * &rhs.matrix }
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        Operator { space: self.space.clone(), matrix: -&self.matrix }
    }
}

/// ⟨n−1|a|n⟩ = √n.
pub fn annihilation(space: FockSpace) -> Operator {
    let n = space.cutoff();
    let matrix = DMatrix::from_fn(n, n, |r, c| {
        if c == r + 1 {
            C64::new((c as f64).sqrt(), 0.0)
        } else {
            ZERO
        }
    });
    Operator { space: space.into(), matrix }
}

pub fn creation(space: FockSpace) -> Operator {
    annihilation(space).adjoint()
}

pub fn number(space: FockSpace) -> Operator {
    let a = annihilation(space);
    &a.adjoint() * &a
}

/// System pair (A′, B′) at quadrature angle φ:
/// B′ = (e^{−iφ}a + e^{iφ}a†)/√2, A′ = i(e^{−iφ}a − e^{iφ}a†)/√2.
pub fn system_quadratures(space: FockSpace, phi: f64) -> (Operator, Operator) {
    let a = annihilation(space);
    let ad = a.adjoint();
    let em = C64::from_polar(1.0, -phi);
    let ep = C64::from_polar(1.0, phi);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let b = &a.scale(em * s) + &ad.scale(ep * s);
    let a_op = (&a.scale(em) - &ad.scale(ep)).scale(I * s);
    (a_op, b)
}

/// Meter pair (q′, p′) at quadrature angle φ:
/// q′ = (e^{iφ}a + e^{−iφ}a†)/√2, p′ = i(e^{−iφ}a† − e^{iφ}a)/√2.
/// The phase placement is mirrored relative to [`system_quadratures`], which
/// keeps A′⊗p′ + B′⊗q′ independent of φ.
pub fn meter_quadratures(space: FockSpace, phi: f64) -> (Operator, Operator) {
    let a = annihilation(space);
    let ad = a.adjoint();
    let em = C64::from_polar(1.0, -phi);
    let ep = C64::from_polar(1.0, phi);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let q = &a.scale(ep * s) + &ad.scale(em * s);
    let p = (&ad.scale(em) - &a.scale(ep)).scale(I * s);
    (q, p)
}
