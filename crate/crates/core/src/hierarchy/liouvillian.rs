//! The chain Liouvillian: detuning, independent decay into both continua,
//! and waveguide-mediated cooperative decay.
//!
//! The `*_term` functions are dense reference evaluations; [`Liouvillian`]
//! precomputes the same map as sparse left/right multiplications plus a
//! list of jump terms and is what the integrator uses.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::ChainParams;
use crate::algebra::{embed_lowering, hilbert_dim, qubit_mask, ComplexMatrix};
use crate::error::{Error, Result};

/// How the cooperative-decay bracket is written.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CooperativeForm {
    /// `-sum c_ij {(s+_i s-_j r - s-_j r s+_i) e^{i phi_ij} + h.c.}` with
    /// `phi_ij = 2 pi |d_i - d_j|`: the cascaded form obtained by tracing the
    /// Langevin equations. Trace- and hermiticity-preserving for any rates.
    #[default]
    Cascaded,
    /// `-sum c_ij {(s+_i s-_j r - s-_i r s+_j) e^{-2 pi i (d_i - d_j)} - h.c.}`
    /// exactly as typeset. Preserves trace only for symmetric rates.
    AsPrinted,
}

impl CooperativeForm {
    pub fn name(self) -> &'static str {
        match self {
            Self::Cascaded => "cascaded",
            Self::AsPrinted => "as-printed",
        }
    }
}

const I: C64 = C64 { re: 0.0, im: 1.0 };

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn check(rho: &ComplexMatrix, p: &ChainParams) -> Result<()> {
    if rho.dim() != p.dim() {
        return Err(Error::DimensionMismatch { left: rho.dim(), right: p.dim() });
    }
    Ok(())
}

fn lowering_ops(n: usize) -> Vec<ComplexMatrix> {
    (1..=n).map(|i| embed_lowering(i, n).expect("index in range")).collect()
}

/// `-i [H, rho]` with `H = sum_i Delta_i s+_i s-_i`.
pub fn coherent_term(rho: &ComplexMatrix, p: &ChainParams) -> Result<ComplexMatrix> {
    check(rho, p)?;
    let mut h = ComplexMatrix::zeros(p.dim());
    for (k, s) in lowering_ops(p.n()).iter().enumerate() {
        h.axpy(c(p.detuning[k]), &s.adjoint().matmul(s)?);
    }
    Ok(h.commutator(rho)?.scale(-I))
}

/// `-sum_i gamma_iRL (s+ s- rho - 2 s- rho s+ + rho s+ s-)`.
pub fn pure_decay_term(rho: &ComplexMatrix, p: &ChainParams) -> Result<ComplexMatrix> {
    check(rho, p)?;
    let mut out = ComplexMatrix::zeros(p.dim());
    for (k, s) in lowering_ops(p.n()).iter().enumerate() {
        let sd = s.adjoint();
        let num = sd.matmul(s)?;
        let term = num.matmul(rho)? - s.matmul(rho)?.matmul(&sd)?.scale(c(2.0)) + rho.matmul(&num)?;
        out.axpy(c(-p.gamma_rl(k)), &term);
    }
    Ok(out)
}

/// Linear "h.c." of `A rho B`: `B^dagger rho A^dagger`, which equals
/// `(A rho B)^dagger` whenever `rho` is hermitian.
fn conj_sandwich(a: &ComplexMatrix, rho: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    b.adjoint().matmul(rho)?.matmul(&a.adjoint())
}

pub fn cooperative_decay_term(rho: &ComplexMatrix, p: &ChainParams, form: CooperativeForm) -> Result<ComplexMatrix> {
    check(rho, p)?;
    let n = p.n();
    let dim = p.dim();
    let ops = lowering_ops(n);
    let id = ComplexMatrix::identity(dim);
    let mut out = ComplexMatrix::zeros(dim);
    for i in 0..n {
        for j in (0..n).filter(|&j| j != i) {
            let rate = p.cooperative_rate(i, j);
            if rate == 0.0 {
                continue;
            }
            let (si, sj) = (&ops[i], &ops[j]);
            let (sdi, sdj) = (si.adjoint(), sj.adjoint());
            let hop = sdi.matmul(sj)?;
            let bracket = match form {
                CooperativeForm::Cascaded => {
                    let ph = C64::from_polar(1.0, TAU * (p.positions[i] - p.positions[j]).abs());
                    let x = hop.matmul(rho)? - sj.matmul(rho)?.matmul(&sdi)?;
                    let xh = conj_sandwich(&hop, rho, &id)? - conj_sandwich(sj, rho, &sdi)?;
                    x.scale(ph) + xh.scale(ph.conj())
                }
                CooperativeForm::AsPrinted => {
                    let ph = C64::from_polar(1.0, -TAU * (p.positions[i] - p.positions[j]));
                    let x = hop.matmul(rho)? - si.matmul(rho)?.matmul(&sdj)?;
                    let xh = conj_sandwich(&hop, rho, &id)? - conj_sandwich(si, rho, &sdj)?;
                    x.scale(ph) - xh.scale(ph.conj())
                }
            };
            out.axpy(c(-rate), &bracket);
        }
    }
    Ok(out)
}

/// `sum_{(a, b)} w_ab s-_a rho s+_b` over the listed qubit masks.
#[derive(Clone, Debug)]
struct Jump {
    lower_mask: usize,
    raise_mask: usize,
    weight: C64,
}

/// Precomputed sparse form `L[rho] = G rho + rho F + sum_k w_k s-_a rho s+_b`.
#[derive(Clone, Debug)]
pub struct Liouvillian {
    dim: usize,
    left: Vec<(usize, usize, C64)>,
    right: Vec<(usize, usize, C64)>,
    jumps: Vec<Jump>,
}

/// Nonzero pattern of `s+_raise s-_lower` as `(row, col)` pairs.
fn hop_pattern(raise: usize, lower: usize, n: usize) -> Vec<(usize, usize)> {
    let (mr, ml) = (qubit_mask(raise + 1, n), qubit_mask(lower + 1, n));
    (0..hilbert_dim(n))
        .filter(|&col| col & ml != 0 && (col ^ ml) & mr == 0)
        .map(|col| ((col ^ ml) | mr, col))
        .collect()
}

impl Liouvillian {
    pub fn new(p: &ChainParams, form: CooperativeForm) -> Self {
        let n = p.n();
        let dim = p.dim();
        let mut left: BTreeMap<(usize, usize), C64> = BTreeMap::new();
        let mut right: BTreeMap<(usize, usize), C64> = BTreeMap::new();
        let mut jumps: BTreeMap<(usize, usize), C64> = BTreeMap::new();

        for k in 0..n {
            let m = qubit_mask(k + 1, n);
            let h = c(p.detuning[k]);
            let kappa = c(p.gamma_rl(k));
            for x in (0..dim).filter(|x| x & m != 0) {
                *left.entry((x, x)).or_default() += -I * h - kappa;
                *right.entry((x, x)).or_default() += I * h - kappa;
            }
            *jumps.entry((k, k)).or_default() += 2.0 * kappa;
        }

        for i in 0..n {
            for j in (0..n).filter(|&j| j != i) {
                let rate = p.cooperative_rate(i, j);
                if rate == 0.0 {
                    continue;
                }
                let rate = c(rate);
                // hop = s+_i s-_j on the left; its adjoint s+_j s-_i on the right.
                let (left_w, right_w, jump_ji, jump_ij) = match form {
                    CooperativeForm::Cascaded => {
                        let ph = C64::from_polar(1.0, TAU * (p.positions[i] - p.positions[j]).abs());
                        (-rate * ph, -rate * ph.conj(), rate * ph, rate * ph.conj())
                    }
                    CooperativeForm::AsPrinted => {
                        let ph = C64::from_polar(1.0, -TAU * (p.positions[i] - p.positions[j]));
                        (-rate * ph, rate * ph.conj(), -rate * ph.conj(), rate * ph)
                    }
                };
                for (r, col) in hop_pattern(i, j, n) {
                    *left.entry((r, col)).or_default() += left_w;
                }
                for (r, col) in hop_pattern(j, i, n) {
                    *right.entry((r, col)).or_default() += right_w;
                }
                // jump_ji multiplies s-_j rho s+_i, jump_ij multiplies s-_i rho s+_j.
                *jumps.entry((j, i)).or_default() += jump_ji;
                *jumps.entry((i, j)).or_default() += jump_ij;
            }
        }

        let nonzero = |m: BTreeMap<(usize, usize), C64>| {
            m.into_iter().filter(|(_, w)| w.norm() > 0.0).map(|((r, c), w)| (r, c, w)).collect::<Vec<_>>()
        };
        let jumps = jumps
            .into_iter()
            .filter(|(_, w)| w.norm() > 0.0)
            .map(|((a, b), weight)| Jump { lower_mask: qubit_mask(a + 1, n), raise_mask: qubit_mask(b + 1, n), weight })
            .collect();
        Self { dim, left: nonzero(left), right: nonzero(right), jumps }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `out += L[rho]`.
    pub fn apply_add(&self, rho: &ComplexMatrix, out: &mut ComplexMatrix) {
        let n = self.dim;
        let r = rho.as_slice();
        let o = out.as_mut_slice();
        for &(row, col, w) in &self.left {
            let (dst, src) = (row * n, col * n);
            for k in 0..n {
                o[dst + k] += w * r[src + k];
            }
        }
        for &(row, col, w) in &self.right {
            for k in 0..n {
                o[k * n + col] += r[k * n + row] * w;
            }
        }
        for jump in &self.jumps {
            let (ma, mb, w) = (jump.lower_mask, jump.raise_mask, jump.weight);
            for x in (0..n).filter(|x| x & ma == 0) {
                let src_row = (x | ma) * n;
                for y in (0..n).filter(|y| y & mb == 0) {
                    o[x * n + y] += w * r[src_row + (y | mb)];
                }
            }
        }
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim);
        self.apply_add(rho, &mut out);
        out
    }
}
