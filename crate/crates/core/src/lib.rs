//! Quantum state transfer and entanglement distribution through unmodulated
//! ferromagnetic Heisenberg spin graphs.
//!
//! Everything reduces to one complex number, the single-excitation transition
//! amplitude `f_{r,s}(t) = ⟨r| e^{-iHt} |s⟩`. The modules compute it
//! ([`sector`], [`closed_form`]), turn it into channel quantities
//! ([`channel`]), search for the best readout time ([`optimizer`]) and check
//! the reduction against the full many-body evolution ([`oracle`],
//! [`verify`]).

pub mod bessel;
pub mod channel;
pub mod closed_form;
pub mod error;
pub mod graph;
pub mod optimizer;
pub mod oracle;
pub mod sector;
pub mod verify;

pub use channel::{
    averaged_fidelity, bloch_average_oracle, compensating_field, kraus_apply, receiver_state,
    shared_entanglement, wootters_concurrence, ChannelReport, KrausPair, QubitState, ReceiverOutput,
};
pub use closed_form::{
    asymptotic_entanglement, asymptotic_readout_time, line_amplitude, line_bessel_entanglement,
    ring_amplitude, ring_bessel_entanglement, ring_dispersion, BesselSeriesParams, LineSpec, RingSpec,
};
pub use error::{Error, Result};
pub use graph::{SpinGraph, Topology};
pub use optimizer::{find_optimum, sweep, SearchConfig, SweepRecord, SweepTable};
pub use sector::{
    build_sector_hamiltonian, diagonalize, transition_amplitude, AmplitudeKernel, ExcitationBasisMatrix,
    SpectralDecomposition, TransitionAmplitude,
};
