//! Ideal-pulse simulator of one trapped ion: four internal levels carrying
//! the encoded spin A and a truncated motional mode carrying spin B.

mod compile;
mod ion;
mod ops;
mod prep;
mod pulse;

pub use compile::{compile_encoded_unot, internal_unitary, phase_corrected_deviation, COMPILE_TOL};
pub use ion::{
    check_cutoff, ion_dim, ion_index, IonState, DEFAULT_FOCK_CUTOFF, INTERNAL_LEVELS, TAIL_LIMIT,
};
pub use ops::{
    flip, flip_sequence, microwave, microwave_internal, red_sideband, sideband_pi_angle, swap, swap_parameters,
    swap_sequence, SwapParameters,
};
pub use prep::{encoded_target, prepare_pair, preparation_sequence, preparation_table, PrepRow};
pub use pulse::{global_cache, reduce_phase, Pulse, PulseKind, PulseSequence, UnitaryCache};
