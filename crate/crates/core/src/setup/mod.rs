//! The biased-interferometer experiment: two system modes s′ and s leave an
//! unbalanced beamsplitter, mode s couples to the meter mode d, and the
//! system is postselected on a photon in the dark port.

pub mod closed_form;
pub mod config;
pub mod experiment;
pub mod protocol;
pub mod states;

pub use closed_form::{
    closed_form_gains, closed_form_weak_values, predicted_shifts, rotate_weak_values, squeezed_signal_gain,
    unconditioned_shifts, ClosedFormGains,
};
pub use config::{PostselectMode, SetupConfig};
pub use experiment::{measurement_model, meter_state, run_experiment, ExperimentReport};
pub use protocol::{two_prep_protocol, ProtocolReport};
pub use states::{dark_port_photon, ideal_postselection, postselection, preselected_state, threshold_postselection};
