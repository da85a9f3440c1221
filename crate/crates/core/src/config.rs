//! TOML experiment description and its validated, resolved form.
//!
//! ```toml
//! [chain]
//! n_qubits = 2
//! gamma_r = 1.0          # scalar or one value per qubit
//! gamma_l = [1.0, 1.0]
//! delta = 0.0
//! spacing = 0.0          # positions (k - 1) * spacing unless `positions` is set
//!
//! [pulse]
//! tbar = 5.0
//! width = 1.5
//! normalization = "reference-width"
//! drive = "two-photon"
//!
//! [model]
//! cooperative = "cascaded"
//! rho21 = "fock-ladder"
//!
//! [integrator]
//! dt = 1e-3
//! t_end = 15.0
//! sample_every = 10
//!
//! [observables]
//! pair_norm = "all-pairs"
//! threshold = 0.05
//!
//! [output]
//! dir = "out"
//! name = "run"
//! ```

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hierarchy::{ChainParams, DriveMode, HierarchyModel};
use crate::integrator::IntegratorConfig;
use crate::observables::PairNormalization;
use crate::pulse::{GaussianPulse, PulseNormalization};

/// A value given once for the whole chain or once per qubit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PerQubit {
    Uniform(f64),
    Each(Vec<f64>),
}

impl PerQubit {
    fn expand(&self, n: usize, field: &str) -> Result<Vec<f64>> {
        match self {
            Self::Uniform(x) => Ok(vec![*x; n]),
            Self::Each(v) if v.len() == n => Ok(v.clone()),
            Self::Each(v) => Err(Error::field(field, format!("has {} entries, expected n_qubits = {n}", v.len()))),
        }
    }
}

impl From<f64> for PerQubit {
    fn from(x: f64) -> Self {
        Self::Uniform(x)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChainSection {
    pub n_qubits: usize,
    pub gamma_r: PerQubit,
    pub gamma_l: PerQubit,
    pub delta: PerQubit,
    /// Spacing between neighbours in units of the wavelength.
    pub spacing: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub positions: Option<Vec<f64>>,
}

impl Default for ChainSection {
    fn default() -> Self {
        Self { n_qubits: 2, gamma_r: 1.0.into(), gamma_l: 1.0.into(), delta: 0.0.into(), spacing: 0.0, positions: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PulseSection {
    pub tbar: f64,
    pub width: f64,
    pub normalization: PulseNormalization,
    pub drive: DriveMode,
}

impl Default for PulseSection {
    fn default() -> Self {
        Self { tbar: 5.0, width: 1.5, normalization: PulseNormalization::default(), drive: DriveMode::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ObservablesSection {
    pub pair_norm: PairNormalization,
    pub threshold: f64,
}

impl Default for ObservablesSection {
    fn default() -> Self {
        Self { pair_norm: PairNormalization::default(), threshold: 0.05 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    /// File stem for `<name>.csv` and `<name>.meta.toml`.
    pub name: String,
    /// Free-form provenance carried into the metadata file.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: PathBuf::from("out"), name: "run".into(), notes: Vec::new() }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub chain: ChainSection,
    pub pulse: PulseSection,
    pub model: HierarchyModel,
    pub integrator: IntegratorConfig,
    pub observables: ObservablesSection,
    pub output: OutputSection,
}

/// Everything needed to build and observe one trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct Resolved {
    pub params: ChainParams,
    pub pulse: GaussianPulse,
    pub drive: DriveMode,
    pub model: HierarchyModel,
    pub integrator: IntegratorConfig,
    pub pair_norm: PairNormalization,
    pub threshold: f64,
}

impl ExperimentConfig {
    pub fn resolve(&self) -> Result<Resolved> {
        let c = &self.chain;
        let n = c.n_qubits;
        if n == 0 {
            return Err(Error::field("chain.n_qubits", "must be at least 1"));
        }
        if n > 5 {
            return Err(Error::field("chain.n_qubits", "at most 5 qubits are supported"));
        }
        let gamma_r = c.gamma_r.expand(n, "chain.gamma_r")?;
        let gamma_l = c.gamma_l.expand(n, "chain.gamma_l")?;
        let delta = c.delta.expand(n, "chain.delta")?;
        for (field, v) in [("chain.gamma_r", &gamma_r), ("chain.gamma_l", &gamma_l)] {
            if v.iter().any(|g| !(g.is_finite() && *g >= 0.0)) {
                return Err(Error::field(field, "rates must be finite and non-negative"));
            }
        }
        if delta.iter().any(|d| !d.is_finite()) {
            return Err(Error::field("chain.delta", "must be finite"));
        }
        if !(c.spacing.is_finite() && c.spacing >= 0.0) {
            return Err(Error::field("chain.spacing", "must be finite and non-negative"));
        }
        let positions = match &c.positions {
            Some(p) if p.len() != n => {
                return Err(Error::field("chain.positions", format!("has {} entries, expected n_qubits = {n}", p.len())))
            }
            Some(p) if p.iter().any(|x| !x.is_finite()) || p.windows(2).any(|w| w[1] < w[0]) => {
                return Err(Error::field("chain.positions", "must be finite and non-decreasing"))
            }
            Some(p) => p.clone(),
            None => (0..n).map(|k| k as f64 * c.spacing).collect(),
        };
        let params = ChainParams::new(gamma_r, gamma_l, delta, positions)?;

        let p = &self.pulse;
        if !p.tbar.is_finite() {
            return Err(Error::field("pulse.tbar", "must be finite"));
        }
        if !(p.width.is_finite() && p.width > 0.0) {
            return Err(Error::field("pulse.width", "must be positive"));
        }
        let pulse = GaussianPulse::new(p.tbar, p.width, p.normalization)?;

        self.integrator.validate()?;
        let o = &self.observables;
        if !(o.threshold > 0.0 && o.threshold < 1.0) {
            return Err(Error::field("observables.threshold", "must lie in (0, 1)"));
        }
        if self.output.name.is_empty() || self.output.name.contains(['/', '\\']) {
            return Err(Error::field("output.name", "must be a non-empty file stem"));
        }
        Ok(Resolved {
            params,
            pulse,
            drive: p.drive,
            model: self.model,
            integrator: self.integrator,
            pair_norm: o.pair_norm,
            threshold: o.threshold,
        })
    }

    /// Serialize with every default written out.
    pub fn emit(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

/// Parse and validate a TOML document; unknown keys are rejected.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))?;
    cfg.resolve()?;
    Ok(cfg)
}
