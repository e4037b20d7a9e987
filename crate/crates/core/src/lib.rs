//! Joint weak measurements of complementary quadratures through a
//! down-conversion coupling, simulated exactly on truncated Fock spaces and
//! compared against first-order and closed-form predictions.
//!
//! * [`fock`]: truncated mode spaces, ladder and quadrature operators,
//!   coherent and squeezed states, exponentials, moments.
//! * [`weak`]: coupled evolution, postselection, weak values, pointer-shift
//!   formulas, two-meter inversion and amplification bookkeeping.
//! * [`setup`]: the biased-interferometer experiment with dark-port
//!   postselection.
//! * [`checks`]: the invariant suite run by `weakpdc check`.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod error;
pub mod fock;
pub mod setup;
pub mod weak;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

pub use fock::{
    coherent_state, gaussian_meter_state, DensityOperator, FockSpace, GaussianMeterSpec, MeterMoments, Operator,
    Space, SqueezedStateSpec, StateVector,
};
pub use setup::{run_experiment, ExperimentReport, PostselectMode, SetupConfig};
pub use weak::{
    recover_weak_values, recover_weak_values_lsq, AmplificationReport, Flag, Recovery, ShiftRecord,
    ValidityDiagnostics, WeakValue,
};
