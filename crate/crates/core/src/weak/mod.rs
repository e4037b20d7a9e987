//! Coupled evolution, postselection and everything read off the meter.

pub mod amplification;
pub mod coupling;
pub mod diagnostics;
pub mod evolution;
pub mod first_order;
pub mod value;

pub use amplification::{amplification_report, snr_gain_from_weak_values, AmplificationReport};
pub use coupling::{coupling_generator, coupling_unitary, pdc_generator, CouplingConfig, Propagate, WeakMeasurement};
pub use diagnostics::{validity_diagnostics, Flag, ValidityDiagnostics};
pub use evolution::{
    evolve_and_postselect, evolve_and_postselect_pure, no_postselection_shifts, pointer_shift_exact,
    NoPostselectionShifts, Postselected,
};
pub use first_order::{
    pointer_shift_first_order, pointer_shift_gaussian, recover_weak_values, recover_weak_values_lsq,
    success_probability_first_order, Recovery, ShiftRecord,
};
pub use value::{
    selection_probability, weak_value, weak_value_pure, weak_value_with_floor, PostselectionOperator, WeakValue,
    OVERLAP_FLOOR,
};
