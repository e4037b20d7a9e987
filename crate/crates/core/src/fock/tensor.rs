use super::operator::Operator;
use super::state::StateVector;
use crate::error::{Error, Result};

/// One factor of a tensor product. Products must be homogeneous.
#[derive(Clone, Debug, PartialEq)]
pub enum TensorFactor {
    Operator(Operator),
    State(StateVector),
}

impl From<Operator> for TensorFactor {
    fn from(op: Operator) -> Self {
        TensorFactor::Operator(op)
    }
}

impl From<StateVector> for TensorFactor {
    fn from(s: StateVector) -> Self {
        TensorFactor::State(s)
    }
}

/// Kronecker product of at least two factors of the same kind, in order.
pub fn tensor(factors: &[TensorFactor]) -> Result<TensorFactor> {
    if factors.len() < 2 {
        return Err(Error::invalid("tensor product needs at least two factors"));
    }
    let mut iter = factors.iter();
    let mut acc = iter.next().unwrap().clone();
    for f in iter {
        acc = match (acc, f) {
            (TensorFactor::Operator(a), TensorFactor::Operator(b)) => TensorFactor::Operator(a.kron(b)),
            (TensorFactor::State(a), TensorFactor::State(b)) => TensorFactor::State(a.kron(b)),
            _ => return Err(Error::invalid("cannot mix operators and states in a tensor product")),
        };
    }
    Ok(acc)
}
