//! Gaussian temporal envelope of the incoming two-photon wavepacket.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Prefactor convention for the envelope `A exp(-(t - tbar)^2 / (2 width^2))`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PulseNormalization {
    /// `A = 1/(sqrt(2 pi) width)`, the normalized probability density.
    Verbatim,
    /// `A = (pi width^2)^(-1/4)`, so that `int |g|^2 dt = 1`.
    UnitL2,
    /// `A = pi^(-1/4)`, the unit-L2 prefactor at a reference width of one
    /// decay time; `int |g|^2 dt` equals the width in units of 1/gamma.
    #[default]
    ReferenceWidth,
}

impl PulseNormalization {
    pub const ALL: [PulseNormalization; 3] = [Self::Verbatim, Self::UnitL2, Self::ReferenceWidth];

    pub fn name(self) -> &'static str {
        match self {
            Self::Verbatim => "verbatim",
            Self::UnitL2 => "unit-l2",
            Self::ReferenceWidth => "reference-width",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianPulse {
    /// Mean arrival time, units of 1/gamma.
    pub center: f64,
    /// Width, units of 1/gamma.
    pub width: f64,
    pub normalization: PulseNormalization,
}

impl GaussianPulse {
    pub fn new(center: f64, width: f64, normalization: PulseNormalization) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::field("pulse.width", format!("must be positive and finite, got {width}")));
        }
        if !center.is_finite() {
            return Err(Error::field("pulse.tbar", "must be finite"));
        }
        Ok(Self { center, width, normalization })
    }

    pub fn peak_amplitude(&self) -> f64 {
        let w = self.width;
        match self.normalization {
            PulseNormalization::Verbatim => 1.0 / ((2.0 * PI).sqrt() * w),
            PulseNormalization::UnitL2 => (PI * w * w).powf(-0.25),
            PulseNormalization::ReferenceWidth => PI.powf(-0.25),
        }
    }

    pub fn envelope(&self, t: f64) -> f64 {
        let x = (t - self.center) / self.width;
        self.peak_amplitude() * (-0.5 * x * x).exp()
    }

    /// `|Omega(t)|^2` with `Omega(t) = sqrt(2 gamma_r) g(t)`.
    pub fn drive_intensity(&self, gamma_r: f64, t: f64) -> f64 {
        let omega = (2.0 * gamma_r).sqrt() * self.envelope(t);
        omega * omega
    }
}
