//! Driven dynamics of a chiral waveguide chain under a two-photon Fock pulse.

pub mod algebra;
pub mod config;
pub mod error;
pub mod hierarchy;
pub mod integrator;
pub mod observables;
pub mod parallel;
pub mod presets;
pub mod pulse;
pub mod scenario;

pub use config::{parse_config, ExperimentConfig};
pub use error::{Error, Result};
pub use presets::{expand_preset, PresetId};
pub use scenario::{run, run_all, RunOutput, Summary};
