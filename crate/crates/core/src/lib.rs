//! Programmable qubit channels.
//!
//! A fixed system-ancilla unitary `V` turns each ancilla state `σ` into a
//! channel `ρ ↦ Tr₂[V(ρ⊗σ)V†]` on the system. This crate computes those
//! channels, the best program for a target unitary, the worst-case
//! programming fidelity `F(V) = min_U max_σ F(U, P_{V,σ})`, and the
//! interactions that maximise it, together with an independent numerical
//! minimax search used to cross-check the closed forms.

pub mod channel;
pub mod circuit;
pub mod cli;
pub mod cxmat;
pub mod error;
pub mod minimax;
pub mod oracle;
pub mod pauli;
pub mod random;

pub use channel::{
    apply_programmed, avg_io_fidelity, channel_fidelity, distance, program_channel,
    program_overlap, DensityMatrix, KrausChannel,
};
pub use cxmat::{ComplexMatrix, OperatorVector};
pub use error::{Error, Result};
pub use minimax::{
    closed_form_norm, controlled_unitary_worst, fidelity_uv, kraus_cirac_decompose,
    optimal_interaction, s_operator, theta_from_alpha, worst_case_fidelity, CanonicalForm,
    MinimaxReport, Sign,
};
pub use pauli::{BlochUnitary, PhaseVector, TVector};
