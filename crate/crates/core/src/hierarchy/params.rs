use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical parameters of the chain, all rates in units of the reference
/// decay rate and positions in units of the emission wavelength.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainParams {
    pub gamma_r: Vec<f64>,
    pub gamma_l: Vec<f64>,
    pub detuning: Vec<f64>,
    pub positions: Vec<f64>,
}

impl ChainParams {
    /// Identical qubits at positions `(i - 1) * spacing`.
    pub fn uniform(n: usize, gamma_r: f64, gamma_l: f64, detuning: f64, spacing: f64) -> Result<Self> {
        Self::new(
            vec![gamma_r; n],
            vec![gamma_l; n],
            vec![detuning; n],
            (0..n).map(|k| k as f64 * spacing).collect(),
        )
    }

    pub fn new(gamma_r: Vec<f64>, gamma_l: Vec<f64>, detuning: Vec<f64>, positions: Vec<f64>) -> Result<Self> {
        let p = Self { gamma_r, gamma_l, detuning, positions };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.gamma_r.len();
        if n == 0 {
            return Err(Error::Params("chain needs at least one qubit".into()));
        }
        for (name, len) in [("gamma_l", self.gamma_l.len()), ("detuning", self.detuning.len()), ("positions", self.positions.len())] {
            if len != n {
                return Err(Error::Params(format!("{name} has {len} entries, expected {n}")));
            }
        }
        let rates = self.gamma_r.iter().chain(&self.gamma_l);
        if let Some(bad) = rates.copied().find(|g| !(g.is_finite() && *g >= 0.0)) {
            return Err(Error::Params(format!("decay rates must be finite and non-negative, got {bad}")));
        }
        if self.detuning.iter().chain(&self.positions).any(|x| !x.is_finite()) {
            return Err(Error::Params("detunings and positions must be finite".into()));
        }
        // A single qubit has no spacing constraint; spacing 0 is the co-located limit.
        if n > 1 && self.positions.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Params("positions must be non-decreasing along the chain".into()));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.gamma_r.len()
    }

    pub fn dim(&self) -> usize {
        1 << self.n()
    }

    /// `(gamma_R + gamma_L) / 2` for qubit `k` (0-based).
    pub fn gamma_rl(&self, k: usize) -> f64 {
        0.5 * (self.gamma_r[k] + self.gamma_l[k])
    }

    /// Cooperative coefficient for the ordered pair `(i, j)`, 0-based:
    /// right continuum when `i > j`, left continuum when `i < j`.
    pub fn cooperative_rate(&self, i: usize, j: usize) -> f64 {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Greater => (self.gamma_r[i] * self.gamma_r[j]).sqrt(),
            Less => (self.gamma_l[i] * self.gamma_l[j]).sqrt(),
            Equal => 0.0,
        }
    }
}
