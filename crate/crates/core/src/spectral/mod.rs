//! Angular-mode decomposition of the linearized operator and the Morse index.

mod morse;
mod mode;
mod tridiag;

pub use mode::{
    assemble_mode_operator, linearized_potential, mode_eigenpair, mode_spectrum, ModeEigenpair,
    ModeProblem, ModeSpectrum, ModeSystem,
};
pub use morse::{
    even_weight, mode_spectra, morse_index, nondegeneracy_of, radial_nondegeneracy,
    reduced_radial_eigenpair, theoretical_bound, transport_radial_eigenpair, DegenerateFlag,
    MorseReport, NondegeneracyReport, TransportedEigenpair,
};
pub use tridiag::SymTridiagonal;
