//! Desk-scale laboratory for an entanglement-based quantum key distribution
//! protocol: exact small-system state-vector simulation, a scalable
//! Pauli-frame path for large pair counts, programmable eavesdropping
//! attacks, finite-population sampling statistics, stabilizer error
//! correction, and the end-to-end protocol runtime.

pub mod channel;
pub mod dense;
pub mod error;
pub mod pauli;
pub mod protocol;
pub mod qecc;
pub mod rng;
pub mod sampling;
pub mod teleport;

pub use channel::{
    reduce_unitary, to_distribution, AttackSpec, AxisPolicy, ErrorPatternDistribution,
};
pub use dense::{
    bell_dephase, bell_measure, bell_state, fidelity, fidelity_on, measure_axis, random_state,
    CMatrix, Ensemble, QubitRole, RegisterLayout, StateVector, TeleportSetup,
};
pub use error::{Error, Result};
pub use pauli::{
    bell_label_to_error, conjugate, error_to_bell_label, format_pauli, parse_pauli, Axis,
    BellLabel, BellPattern, Pauli, PauliString, Phase,
};
pub use protocol::{
    decide_abort, generate_key, lemma1_bound, run_protocol, AbortReason, ProtocolConfig,
    ProtocolTranscript, SecurityReport,
};
pub use qecc::{budget, correct, protect_frame, syndrome_of, CodeSpec, Decoder, ErrorBudget};
pub use sampling::{
    confidence_bound, estimate_singlet_fraction, run_sampling_dense, run_sampling_frame,
    verify_theorem2, BoundMethod, ConfidenceBound, SamplingRecord,
};
pub use teleport::{
    assign_random, independence_test, teleport_frame, verify_invariance, Assignment,
    AssignmentMode, DensePayload, IndependenceReport, InvarianceReport, TeleportOutcome,
};
