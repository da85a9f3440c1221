//! Dense matrices and multi-qubit operators.

mod matrix;
mod operators;

pub use matrix::ComplexMatrix;
pub use operators::{
    embed_lowering, embed_raising, excitation_count, excitation_projector, excited_projector, ground_projector,
    hilbert_dim, is_excited, partial_trace_to_pair, qubit_mask, sigma_z,
};
