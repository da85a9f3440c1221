//! Named parameter sets for the published figures.

use std::fmt;
use std::str::FromStr;

use crate::config::{ChainSection, ExperimentConfig, PerQubit};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PresetId {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig5cSweep,
    Fig6,
    Fig6cSweep,
    Fig7a,
    Fig7b,
}

/// Pulse widths of the survival-time sweep, bracketing the reference 1.5.
pub const SWEEP_WIDTHS: [f64; 6] = [0.5, 1.0, 1.5, 2.0, 2.5, 3.0];
/// Reduced rate for the small-decay presets.
pub const SMALL_GAMMA: f64 = 0.1;
/// Right-to-left rate ratio of the chiral presets.
pub const CHIRAL_RATIO: f64 = 5.0;
pub const DETUNING: f64 = 0.5;
/// Separations as fractions of the baseline `L`, taken to be one wavelength.
pub const SEPARATIONS: [f64; 3] = [1.0, 1.0 / 8.0, 1.0 / 16.0];

const T_END_NOTE: &str = "t_end is an estimate read off the figure time axis";
const SMALL_T_END: f64 = 40.0;

impl PresetId {
    pub const ALL: [PresetId; 9] = [
        Self::Fig2,
        Self::Fig3,
        Self::Fig4,
        Self::Fig5,
        Self::Fig5cSweep,
        Self::Fig6,
        Self::Fig6cSweep,
        Self::Fig7a,
        Self::Fig7b,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Fig2 => "fig2",
            Self::Fig3 => "fig3",
            Self::Fig4 => "fig4",
            Self::Fig5 => "fig5",
            Self::Fig5cSweep => "fig5c-sweep",
            Self::Fig6 => "fig6",
            Self::Fig6cSweep => "fig6c-sweep",
            Self::Fig7a => "fig7a",
            Self::Fig7b => "fig7b",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Self::Fig2 => "single qubit, symmetric decay",
            Self::Fig3 => "two qubits, all rates equal",
            Self::Fig4 => "3, 4 and 5 qubits, all rates equal",
            Self::Fig5 => "2 to 5 qubits with all rates 0.1",
            Self::Fig5cSweep => "survival time vs pulse width, rates 0.1 and 1, N = 2..5",
            Self::Fig6 => "2 to 5 qubits, gamma_R = 5 gamma_L",
            Self::Fig6cSweep => "maximum concurrence vs N, chiral and non-chiral",
            Self::Fig7a => "detuning 0.5 vs resonance, N = 2..5",
            Self::Fig7b => "separations L, L/8, L/16 with L one wavelength, N = 2..5",
        }
    }

    /// Sweep presets produce one summary row per member.
    pub fn is_sweep(self) -> bool {
        matches!(self, Self::Fig5cSweep | Self::Fig6cSweep)
    }

    pub fn expand(self) -> Vec<ExperimentConfig> {
        let named = |cfg: ExperimentConfig, name: String| {
            let mut cfg = cfg;
            cfg.output.name = name;
            cfg.output.notes.insert(0, format!("preset {}", self.name()));
            cfg
        };
        match self {
            Self::Fig2 => vec![named(base(1, 1.0, 1.0), "fig2".into())],
            Self::Fig3 => vec![named(base(2, 1.0, 1.0), "fig3".into())],
            Self::Fig4 => (3..=5).map(|n| named(base(n, 1.0, 1.0), format!("fig4_n{n}"))).collect(),
            Self::Fig5 => (2..=5).map(|n| named(small(n), format!("fig5_n{n}"))).collect(),
            Self::Fig5cSweep => {
                let mut out = Vec::new();
                for n in 2..=5 {
                    for (tag, gamma) in [("small", SMALL_GAMMA), ("unit", 1.0)] {
                        for w in SWEEP_WIDTHS {
                            let mut cfg = if gamma == 1.0 { long(base(n, 1.0, 1.0)) } else { small(n) };
                            cfg.pulse.width = w;
                            out.push(named(cfg, format!("fig5c_n{n}_{tag}_w{w}")));
                        }
                    }
                }
                out
            }
            Self::Fig6 => (2..=5).map(|n| named(base(n, CHIRAL_RATIO, 1.0), format!("fig6_n{n}"))).collect(),
            Self::Fig6cSweep => (2..=5)
                .flat_map(|n| {
                    [
                        named(base(n, CHIRAL_RATIO, 1.0), format!("fig6c_n{n}_chiral")),
                        named(base(n, 1.0, 1.0), format!("fig6c_n{n}_symmetric")),
                    ]
                })
                .collect(),
            Self::Fig7a => (2..=5)
                .flat_map(|n| {
                    [0.0, DETUNING].map(|d| {
                        let mut cfg = base(n, 1.0, 1.0);
                        cfg.chain.delta = d.into();
                        let tag = if d == 0.0 { "resonant" } else { "detuned" };
                        named(cfg, format!("fig7a_n{n}_{tag}"))
                    })
                })
                .collect(),
            Self::Fig7b => (2..=5)
                .flat_map(|n| {
                    SEPARATIONS.map(|d| {
                        let mut cfg = base(n, 1.0, 1.0);
                        cfg.chain.spacing = d;
                        cfg.output.notes.push("separation baseline L = 1 wavelength (D = 1)".into());
                        named(cfg, format!("fig7b_n{n}_d{}", 1.0 / d))
                    })
                })
                .collect(),
        }
    }
}

fn base(n: usize, gamma_r: f64, gamma_l: f64) -> ExperimentConfig {
    let mut cfg = ExperimentConfig {
        chain: ChainSection { n_qubits: n, gamma_r: gamma_r.into(), gamma_l: gamma_l.into(), ..ChainSection::default() },
        ..ExperimentConfig::default()
    };
    cfg.output.notes.push(T_END_NOTE.into());
    cfg
}

fn long(mut cfg: ExperimentConfig) -> ExperimentConfig {
    cfg.integrator.t_end = SMALL_T_END;
    cfg
}

fn small(n: usize) -> ExperimentConfig {
    let mut cfg = long(base(n, SMALL_GAMMA, SMALL_GAMMA));
    cfg.chain.gamma_r = PerQubit::Uniform(SMALL_GAMMA);
    cfg
}

impl fmt::Display for PresetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PresetId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| Error::UnknownPreset(s.into()))
    }
}

pub fn expand_preset(id: &str) -> Result<Vec<ExperimentConfig>> {
    Ok(id.parse::<PresetId>()?.expand())
}
