//! Coupled Fock-state master equations for a chain driven by a two-photon
//! wavepacket travelling to the right.
//!
//! The six blocks are indexed by the photon content of the reservoir on the
//! ket and bra sides: `rho_s` (2,2), `rho21`, `rho20`, `rho11`, `rho10` and
//! `rho00`. Only the lower-triangular representatives are stored; `rho12`,
//! `rho02` and `rho01` are their adjoints. Each block obeys
//!
//! ```text
//! d rho_mn / dt = L[rho_mn] + (drive terms sourced by blocks with fewer photons)
//! ```
//!
//! so the hierarchy is lower-triangular in photon number and the drive
//! enters through `sqrt(gamma_iR) e^{i 2 pi d_i} g(t) [src, s+_i]`.

mod liouvillian;
mod params;

use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

pub use liouvillian::{coherent_term, cooperative_decay_term, pure_decay_term, CooperativeForm, Liouvillian};
pub use params::ChainParams;

use crate::algebra::{embed_raising, qubit_mask, ComplexMatrix};
use crate::error::{Error, Result};
use crate::pulse::GaussianPulse;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DriveMode {
    /// Undriven chain: only `rho00` evolves.
    None,
    /// Single-photon wavepacket: `rho00`, `rho10`, `rho11` evolve and
    /// `rho11` is the system state.
    OnePhoton,
    #[default]
    TwoPhoton,
}

impl DriveMode {
    pub fn name(self) -> &'static str {
        match self {
            Self::None => "none",
            Self::OnePhoton => "one-photon",
            Self::TwoPhoton => "two-photon",
        }
    }
}

/// Drive terms of the `rho21` equation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rho21Coupling {
    /// `sqrt(2 gamma_iR) (e^{ik d_i} g [rho11, s+_i] + h.c.)` as typeset. The
    /// conjugate term does not conserve excitation number and drives
    /// `rho_s` away from positivity.
    AsPrinted,
    /// `sqrt(2 gamma_iR) e^{ik d_i} g [rho11, s+_i]` without the conjugate.
    NoConjugate,
    /// Photon-number ladder: `sqrt(2 gamma_iR) e^{ik d_i} g [rho11, s+_i]
    /// + sqrt(gamma_iR) e^{-ik d_i} g [s-_i, rho20]`.
    #[default]
    FockLadder,
}

impl Rho21Coupling {
    pub fn name(self) -> &'static str {
        match self {
            Self::AsPrinted => "as-printed",
            Self::NoConjugate => "no-conjugate",
            Self::FockLadder => "fock-ladder",
        }
    }
}

/// Structural choices for the equations themselves.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default, deny_unknown_fields)]
pub struct HierarchyModel {
    pub cooperative: CooperativeForm,
    pub rho21: Rho21Coupling,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HierarchyState {
    pub rho_s: ComplexMatrix,
    pub rho21: ComplexMatrix,
    pub rho20: ComplexMatrix,
    pub rho11: ComplexMatrix,
    pub rho10: ComplexMatrix,
    pub rho00: ComplexMatrix,
}

impl HierarchyState {
    pub const BLOCK_NAMES: [&'static str; 6] = ["rho_s", "rho21", "rho20", "rho11", "rho10", "rho00"];

    pub fn zeros(dim: usize) -> Self {
        let z = ComplexMatrix::zeros(dim);
        Self {
            rho_s: z.clone(),
            rho21: z.clone(),
            rho20: z.clone(),
            rho11: z.clone(),
            rho10: z.clone(),
            rho00: z,
        }
    }

    pub fn dim(&self) -> usize {
        self.rho_s.dim()
    }

    pub fn blocks(&self) -> [&ComplexMatrix; 6] {
        [&self.rho_s, &self.rho21, &self.rho20, &self.rho11, &self.rho10, &self.rho00]
    }

    pub fn blocks_mut(&mut self) -> [&mut ComplexMatrix; 6] {
        [&mut self.rho_s, &mut self.rho21, &mut self.rho20, &mut self.rho11, &mut self.rho10, &mut self.rho00]
    }

    /// `self += alpha * other`, blockwise.
    pub fn axpy(&mut self, alpha: f64, other: &HierarchyState) {
        let a = C64::new(alpha, 0.0);
        for (dst, src) in self.blocks_mut().into_iter().zip(other.blocks()) {
            dst.axpy(a, src);
        }
    }

    pub fn is_finite(&self) -> bool {
        self.blocks().iter().all(|b| b.is_finite())
    }

    pub fn check_consistent(&self) -> Result<()> {
        let dim = self.dim();
        for b in self.blocks() {
            if b.dim() != dim {
                return Err(Error::DimensionMismatch { left: b.dim(), right: dim });
            }
        }
        Ok(())
    }

    /// The physical chain state for a given drive mode.
    pub fn system_state(&self, mode: DriveMode) -> &ComplexMatrix {
        match mode {
            DriveMode::TwoPhoton => &self.rho_s,
            DriveMode::OnePhoton => &self.rho11,
            DriveMode::None => &self.rho00,
        }
    }
}

/// All chain qubits in the ground state; every off-diagonal photon block zero.
pub fn initial_state(n: usize) -> HierarchyState {
    let dim = 1 << n;
    let g = ComplexMatrix::basis_projector(dim, 0);
    HierarchyState {
        rho_s: g.clone(),
        rho11: g.clone(),
        rho00: g,
        ..HierarchyState::zeros(dim)
    }
}

/// `scale e^{i 2 pi d_i} g(t) [src, s+_i]`, plus the adjoint of that whole
/// matrix when `include_hc` is set. `i` is 1-based.
pub fn drive_coupling(
    src: &ComplexMatrix,
    i: usize,
    t: f64,
    scale: f64,
    p: &ChainParams,
    pulse: &GaussianPulse,
    include_hc: bool,
) -> Result<ComplexMatrix> {
    if src.dim() != p.dim() {
        return Err(Error::DimensionMismatch { left: src.dim(), right: p.dim() });
    }
    let raise = embed_raising(i, p.n())?;
    let coeff = C64::from_polar(scale * pulse.envelope(t), TAU * p.positions[i - 1]);
    let term = src.commutator(&raise)?.scale(coeff);
    Ok(if include_hc { term.adjoint() + term } else { term })
}

/// `out += sum_i coeffs[i] [src, s+_i]`.
fn add_raising_commutators(out: &mut ComplexMatrix, src: &ComplexMatrix, coeffs: &[C64]) {
    let n = coeffs.len();
    let dim = src.dim();
    let s = src.as_slice();
    let o = out.as_mut_slice();
    for (k, &w) in coeffs.iter().enumerate() {
        if w == C64::new(0.0, 0.0) {
            continue;
        }
        let m = qubit_mask(k + 1, n);
        for x in 0..dim {
            for y in 0..dim {
                // (src s+)[x,y] = src[x, y|m] for y without the bit.
                if y & m == 0 {
                    o[x * dim + y] += w * s[x * dim + (y | m)];
                }
                // (s+ src)[x,y] = src[x^m, y] for x with the bit.
                if x & m != 0 {
                    o[x * dim + y] -= w * s[(x ^ m) * dim + y];
                }
            }
        }
    }
}

/// `out += sum_i coeffs[i] [s-_i, src]`.
fn add_lowering_commutators(out: &mut ComplexMatrix, src: &ComplexMatrix, coeffs: &[C64]) {
    let n = coeffs.len();
    let dim = src.dim();
    let s = src.as_slice();
    let o = out.as_mut_slice();
    for (k, &w) in coeffs.iter().enumerate() {
        if w == C64::new(0.0, 0.0) {
            continue;
        }
        let m = qubit_mask(k + 1, n);
        for x in 0..dim {
            for y in 0..dim {
                if x & m == 0 {
                    o[x * dim + y] += w * s[(x | m) * dim + y];
                }
                if y & m != 0 {
                    o[x * dim + y] -= w * s[x * dim + (y ^ m)];
                }
            }
        }
    }
}

/// Right-hand side of the hierarchy with the Liouvillian and phases
/// precomputed for one parameter set.
#[derive(Clone, Debug)]
pub struct Hierarchy {
    params: ChainParams,
    pulse: GaussianPulse,
    mode: DriveMode,
    model: HierarchyModel,
    liouvillian: Liouvillian,
    /// `sqrt(gamma_iR) e^{i 2 pi d_i}`.
    couplings: Vec<C64>,
}

impl Hierarchy {
    pub fn new(params: ChainParams, pulse: GaussianPulse, mode: DriveMode, model: HierarchyModel) -> Result<Self> {
        params.validate()?;
        let liouvillian = Liouvillian::new(&params, model.cooperative);
        let couplings = params
            .gamma_r
            .iter()
            .zip(&params.positions)
            .map(|(&g, &d)| C64::from_polar(g.sqrt(), TAU * d))
            .collect();
        Ok(Self { params, pulse, mode, model, liouvillian, couplings })
    }

    pub fn params(&self) -> &ChainParams {
        &self.params
    }

    pub fn pulse(&self) -> &GaussianPulse {
        &self.pulse
    }

    pub fn mode(&self) -> DriveMode {
        self.mode
    }

    pub fn model(&self) -> HierarchyModel {
        self.model
    }

    pub fn liouvillian(&self) -> &Liouvillian {
        &self.liouvillian
    }

    fn scaled(&self, factor: f64, g: f64, conj: bool) -> Vec<C64> {
        self.couplings
            .iter()
            .map(|&w| if conj { w.conj() } else { w } * (factor * g))
            .collect()
    }

    /// Time derivative of every block at time `t`.
    pub fn rhs(&self, s: &HierarchyState, t: f64) -> Result<HierarchyState> {
        s.check_consistent()?;
        if s.dim() != self.params.dim() {
            return Err(Error::DimensionMismatch { left: s.dim(), right: self.params.dim() });
        }
        let dim = s.dim();
        let mut d = HierarchyState::zeros(dim);
        let lv = &self.liouvillian;
        lv.apply_add(&s.rho00, &mut d.rho00);
        if self.mode == DriveMode::None {
            return Ok(d);
        }

        let g = self.pulse.envelope(t);
        let one = self.scaled(1.0, g, false);
        let two = self.scaled(2f64.sqrt(), g, false);

        lv.apply_add(&s.rho10, &mut d.rho10);
        add_raising_commutators(&mut d.rho10, &s.rho00, &one);

        lv.apply_add(&s.rho11, &mut d.rho11);
        let mut drive = ComplexMatrix::zeros(dim);
        add_raising_commutators(&mut drive, &s.rho10.adjoint(), &one);
        add_with_adjoint(&mut d.rho11, &drive);

        if self.mode == DriveMode::OnePhoton {
            return Ok(d);
        }

        lv.apply_add(&s.rho20, &mut d.rho20);
        add_raising_commutators(&mut d.rho20, &s.rho10, &two);

        lv.apply_add(&s.rho21, &mut d.rho21);
        match self.model.rho21 {
            Rho21Coupling::AsPrinted => {
                let mut drive = ComplexMatrix::zeros(dim);
                add_raising_commutators(&mut drive, &s.rho11, &two);
                add_with_adjoint(&mut d.rho21, &drive);
            }
            Rho21Coupling::NoConjugate => add_raising_commutators(&mut d.rho21, &s.rho11, &two),
            Rho21Coupling::FockLadder => {
                add_raising_commutators(&mut d.rho21, &s.rho11, &two);
                add_lowering_commutators(&mut d.rho21, &s.rho20, &self.scaled(1.0, g, true));
            }
        }

        lv.apply_add(&s.rho_s, &mut d.rho_s);
        let mut drive = ComplexMatrix::zeros(dim);
        add_raising_commutators(&mut drive, &s.rho21.adjoint(), &two);
        add_with_adjoint(&mut d.rho_s, &drive);
        Ok(d)
    }
}

fn add_with_adjoint(out: &mut ComplexMatrix, m: &ComplexMatrix) {
    *out += m;
    *out += &m.adjoint();
}

/// One-shot evaluation of the hierarchy derivative.
pub fn hierarchy_rhs(
    s: &HierarchyState,
    t: f64,
    p: &ChainParams,
    pulse: &GaussianPulse,
    mode: DriveMode,
    model: HierarchyModel,
) -> Result<HierarchyState> {
    Hierarchy::new(p.clone(), *pulse, mode, model)?.rhs(s, t)
}
