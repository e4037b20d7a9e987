//! Truncated bosonic Fock-space substrate: spaces, dense operators, states,
//! tensor products, exponentials and quadrature moments.

pub mod beamsplitter;
pub mod expm;
pub mod gaussian;
pub mod moments;
pub mod operator;
pub mod space;
pub mod sparse;
pub mod state;
pub mod tensor;

pub use beamsplitter::{beamsplitter_5050, BeamsplitterConvention};
pub use expm::{expm_action, matrix_exponential};
pub use gaussian::{gaussian_meter_state, gaussian_state, suggest_cutoff, GaussianMeterSpec, SqueezedStateSpec};
pub use moments::{moments, MeterMoments, StateRef};
pub use operator::{annihilation, creation, meter_quadratures, number, system_quadratures, Operator};
pub use space::{make_space, FockSpace, Space};
pub use sparse::CsrMatrix;
pub use state::{coherent_state, DensityOperator, Normalization, StateVector};
pub use tensor::{tensor, TensorFactor};
