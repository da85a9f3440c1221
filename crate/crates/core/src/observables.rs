//! Populations and pairwise Wootters concurrence.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::algebra::{excitation_count, hilbert_dim, is_excited, partial_trace_to_pair, ComplexMatrix};
use crate::error::{Error, Result};
use crate::integrator::Trajectory;

/// Spin-flip eigenvalues in `[-INVALID, 0)` are rounding noise and clamp to 0.
const INVALID: f64 = 1e-8;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PopulationRecord {
    /// `by_excitation[k]`: probability of exactly `k` excited qubits.
    pub by_excitation: Vec<f64>,
    /// Per-qubit excited population, qubit 1 first.
    pub excited: Vec<f64>,
    /// Sum over all excitation sectors (the trace).
    pub total: f64,
}

impl PopulationRecord {
    pub fn ground(&self) -> f64 {
        self.by_excitation[0]
    }

    pub fn sector(&self, k: usize) -> f64 {
        self.by_excitation.get(k).copied().unwrap_or(0.0)
    }
}

pub fn populations(rho: &ComplexMatrix, n: usize) -> PopulationRecord {
    let dim = hilbert_dim(n);
    let mut by_excitation = vec![0.0; n + 1];
    let mut excited = vec![0.0; n];
    for idx in 0..dim {
        let p = rho[(idx, idx)].re;
        by_excitation[excitation_count(idx)] += p;
        for (q, e) in excited.iter_mut().enumerate() {
            if is_excited(idx, q + 1, n) {
                *e += p;
            }
        }
    }
    let total = by_excitation.iter().sum();
    PopulationRecord { by_excitation, excited, total }
}

/// `sigma_y (x) sigma_y` in the `gg, ge, eg, ee` ordering.
fn yy() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4);
    let one = C64::new(1.0, 0.0);
    m[(0, 3)] = -one;
    m[(3, 0)] = -one;
    m[(1, 2)] = one;
    m[(2, 1)] = one;
    m
}

fn check_pair(rho: &ComplexMatrix) -> Result<()> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch { left: rho.dim(), right: 4 });
    }
    Ok(())
}

/// `(sigma_y (x) sigma_y) rho* (sigma_y (x) sigma_y)`.
fn flipped(rho: &ComplexMatrix) -> ComplexMatrix {
    let y = yy();
    y.matmul(&rho.conj()).and_then(|m| m.matmul(&y)).expect("4x4")
}

/// `rho (sigma_y (x) sigma_y) rho* (sigma_y (x) sigma_y)`.
pub fn spin_flip(rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_pair(rho)?;
    rho.matmul(&flipped(rho))
}

/// Eigenvalues of [`spin_flip`] in descending order.
///
/// Computed as the spectrum of the hermitian `sqrt(rho) rho~ sqrt(rho)`,
/// which is similar to `rho rho~` for positive `rho`.
pub fn spin_flip_eigenvalues(rho: &ComplexMatrix) -> Result<[f64; 4]> {
    check_pair(rho)?;
    let (vals, vecs) = rho.eigh();
    if vals[0] < -INVALID {
        return Err(Error::InvalidDensity { eigenvalue: vals[0] });
    }
    let sqrt_diag = ComplexMatrix::from_fn(4, |r, c| {
        if r == c {
            C64::new(vals[r].max(0.0).sqrt(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let root = vecs.matmul(&sqrt_diag)?.matmul(&vecs.adjoint())?;
    let m = root.matmul(&flipped(rho))?.matmul(&root)?;
    let ev = m.eigenvalues_hermitian();
    if ev[0] < -INVALID {
        return Err(Error::InvalidDensity { eigenvalue: ev[0] });
    }
    Ok([ev[3].max(0.0), ev[2].max(0.0), ev[1].max(0.0), ev[0].max(0.0)])
}

/// Wootters concurrence `max(0, sqrt(l1) - sqrt(l2) - sqrt(l3) - sqrt(l4))`.
pub fn concurrence_pair(rho: &ComplexMatrix) -> Result<f64> {
    let l = spin_flip_eigenvalues(rho)?;
    let c = l[0].sqrt() - l[1].sqrt() - l[2].sqrt() - l[3].sqrt();
    Ok(c.clamp(0.0, 1.0))
}

/// Divisor for the pair average.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairNormalization {
    /// `N (N - 1) / 2`, the number of unordered pairs.
    #[default]
    AllPairs,
    /// `N / 2`.
    HalfN,
}

impl PairNormalization {
    pub fn name(self) -> &'static str {
        match self {
            Self::AllPairs => "all-pairs",
            Self::HalfN => "half-n",
        }
    }

    pub fn divisor(self, n: usize) -> f64 {
        match self {
            Self::AllPairs => (n * (n - 1)) as f64 / 2.0,
            Self::HalfN => n as f64 / 2.0,
        }
    }
}

/// Unordered pairs `(i, j)`, 1-based, in lexicographic order.
pub fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..=n).flat_map(move |i| ((i + 1)..=n).map(move |j| (i, j)))
}

/// Concurrence of every unordered pair, in [`pairs`] order.
pub fn pair_concurrences(rho: &ComplexMatrix, n: usize) -> Result<Vec<f64>> {
    pairs(n).map(|(i, j)| concurrence_pair(&partial_trace_to_pair(rho, i, j, n)?)).collect()
}

pub fn average_of(pair_values: &[f64], n: usize, norm: PairNormalization) -> f64 {
    pair_values.iter().sum::<f64>() / norm.divisor(n)
}

pub fn average_pairwise_concurrence(rho: &ComplexMatrix, n: usize, norm: PairNormalization) -> Result<f64> {
    if n < 2 {
        return Err(Error::TooFewQubits(n));
    }
    Ok(average_of(&pair_concurrences(rho, n)?, n, norm))
}

/// Largest sampled value and its time; ties go to the earliest sample.
pub fn max_concurrence(traj: &Trajectory<f64>) -> Result<(f64, f64)> {
    let mut best: Option<(f64, f64)> = None;
    for (t, &c) in traj.iter() {
        if best.is_none_or(|(b, _)| c > b) {
            best = Some((c, t));
        }
    }
    best.ok_or(Error::EmptyTrajectory)
}

/// Time between the first and last samples at or above `threshold * C_max`.
pub fn survival_time(traj: &Trajectory<f64>, threshold: f64) -> f64 {
    let Ok((cmax, _)) = max_concurrence(traj) else {
        return 0.0;
    };
    if cmax <= 0.0 {
        return 0.0;
    }
    let level = threshold * cmax;
    let above = || traj.iter().filter(|(_, &c)| c >= level).map(|(t, _)| t);
    match (above().next(), above().last()) {
        (Some(first), Some(last)) => last - first,
        _ => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{Complex, Matrix4};
    use proptest::prelude::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn bell() -> ComplexMatrix {
        ComplexMatrix::outer(&[c(FRAC_1_SQRT_2), c(0.0), c(0.0), c(FRAC_1_SQRT_2)])
    }

    fn werner(p: f64) -> ComplexMatrix {
        bell().scale(c(p)) + ComplexMatrix::identity(4).scale(c((1.0 - p) / 4.0))
    }

    /// Independent oracle: eigenvalues of the non-hermitian product by a
    /// general complex Schur decomposition.
    fn schur_eigenvalues(rho: &ComplexMatrix) -> Vec<f64> {
        let r = spin_flip(rho).unwrap();
        let m = Matrix4::from_fn(|i, j| Complex::new(r[(i, j)].re, r[(i, j)].im));
        let mut ev: Vec<f64> = m.schur().eigenvalues().unwrap().iter().map(|z| z.re).collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        ev
    }

    fn oracle_concurrence(rho: &ComplexMatrix) -> f64 {
        let l: Vec<f64> = schur_eigenvalues(rho).into_iter().map(|x| x.max(0.0).sqrt()).collect();
        (l[0] - l[1] - l[2] - l[3]).max(0.0)
    }

    #[test]
    fn ground_state_populations() {
        let p = populations(&ComplexMatrix::basis_projector(8, 0), 3);
        assert_eq!(p.ground(), 1.0);
        assert_eq!(p.by_excitation[1..], [0.0, 0.0, 0.0]);
        assert_eq!(p.excited, vec![0.0; 3]);
        assert_eq!(p.total, 1.0);
    }

    #[test]
    fn symmetric_single_excitation_populations() {
        let rho = ComplexMatrix::outer(&[c(0.0), c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2), c(0.0)]);
        let p = populations(&rho, 2);
        assert!((p.sector(1) - 1.0).abs() < 1e-15);
        assert!((p.excited[0] - 0.5).abs() < 1e-15);
        assert!((p.excited[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn maximally_mixed_has_flat_spectrum() {
        let l = spin_flip_eigenvalues(&ComplexMatrix::identity(4).scale(c(0.25))).unwrap();
        for x in l {
            assert!((x - 1.0 / 16.0).abs() < 1e-12);
        }
        assert_eq!(concurrence_pair(&ComplexMatrix::identity(4).scale(c(0.25))).unwrap(), 0.0);
    }

    #[test]
    fn bell_state_is_flip_invariant() {
        let b = bell();
        assert!(spin_flip(&b).unwrap().max_abs_diff(&b) < 1e-15);
        let l = spin_flip_eigenvalues(&b).unwrap();
        assert!((l[0] - 1.0).abs() < 1e-12);
        assert!(l[1..].iter().all(|x| x.abs() < 1e-12));
        assert!((concurrence_pair(&b).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn product_state_has_zero_concurrence() {
        // |g> (x) (|g> + |e>)/sqrt2.
        let rho = ComplexMatrix::outer(&[c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2), c(0.0), c(0.0)]);
        assert!(concurrence_pair(&rho).unwrap() < 1e-10);
    }

    #[test]
    fn werner_closed_form() {
        for p in [0.2, 1.0 / 3.0, 0.5, 0.8, 1.0] {
            let expected = ((3.0 * p - 1.0) / 2.0f64).max(0.0);
            let got = concurrence_pair(&werner(p)).unwrap();
            assert!((got - expected).abs() < 1e-10, "p={p}: {got}");
            assert!((oracle_concurrence(&werner(p)) - expected).abs() < 1e-10);
        }
        assert!((concurrence_pair(&werner(0.5)).unwrap() - 0.25).abs() < 1e-10);
    }

    #[test]
    fn non_positive_input_rejected() {
        let mut rho = bell();
        rho[(1, 1)] = c(-0.2);
        assert!(matches!(concurrence_pair(&rho), Err(Error::InvalidDensity { .. })));
        assert!(matches!(concurrence_pair(&ComplexMatrix::identity(2)), Err(Error::DimensionMismatch { .. })));
    }

    /// Closed-form eigenvalues as printed for the X-shaped states that keep
    /// only `rho1 = <gg|r|gg>`, `rho4 = <gg|r|ee>`, `rho6 = <eg|r|eg>` and
    /// `rho16 = <ee|r|ee>`, with a single-excitation block proportional to
    /// the symmetric state.
    fn printed_closed_form(r1: f64, r4: f64, r6: f64, r16: f64) -> [f64; 4] {
        let root = (r4 * r4 + 4.0 * r1 * r16).sqrt();
        let mut l = [0.0, 4.0 * r6 * r6, r1 * r16 + 0.5 * r4 * (r4 - root), r1 * r16 + 0.5 * r4 * (r4 + root)];
        l.sort_by(|a, b| b.total_cmp(a));
        l
    }

    fn x_state(r1: f64, r4: f64, r6: f64, r16: f64) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(4);
        m[(0, 0)] = c(r1);
        m[(0, 3)] = c(r4);
        m[(3, 0)] = c(r4);
        m[(3, 3)] = c(r16);
        for (a, b) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            m[(a, b)] = c(r6);
        }
        m
    }

    #[test]
    fn printed_closed_form_holds_without_two_photon_coherence() {
        for (r1, r6, r16) in [(0.7, 0.1, 0.1), (0.5, 0.2, 0.1), (0.9, 0.04, 0.02)] {
            let rho = x_state(r1, 0.0, r6, r16);
            let num = spin_flip_eigenvalues(&rho).unwrap();
            let closed = printed_closed_form(r1, 0.0, r6, r16);
            for (a, b) in num.iter().zip(closed) {
                assert!((a - b).abs() < 1e-10, "{num:?} vs {closed:?}");
            }
        }
    }

    #[test]
    fn two_photon_coherence_shifts_outer_pair() {
        // With rho4 != 0 the outer block of the flipped product is
        // [[p + z^2, 2 r1 z], [2 r16 z, p + z^2]], eigenvalues p + z^2 +- 2 z sqrt(p).
        let (r1, r4, r6, r16) = (0.6, 0.1, 0.1, 0.2);
        let rho = x_state(r1, r4, r6, r16);
        let p = r1 * r16;
        let mut expected = [0.0, 4.0 * r6 * r6, p + r4 * r4 - 2.0 * r4 * p.sqrt(), p + r4 * r4 + 2.0 * r4 * p.sqrt()];
        expected.sort_by(|a, b| b.total_cmp(a));
        let num = spin_flip_eigenvalues(&rho).unwrap();
        for (a, b) in num.iter().zip(expected) {
            assert!((a - b).abs() < 1e-10);
        }
        let printed = printed_closed_form(r1, r4, r6, r16);
        assert!(num.iter().zip(printed).any(|(a, b)| (a - b).abs() > 1e-3));
    }

    #[test]
    fn average_pairwise_examples() {
        let b = bell();
        for norm in [PairNormalization::AllPairs, PairNormalization::HalfN] {
            let avg = average_pairwise_concurrence(&b, 2, norm).unwrap();
            assert!((avg - concurrence_pair(&b).unwrap()).abs() < 1e-12);
            assert_eq!(average_pairwise_concurrence(&ComplexMatrix::basis_projector(16, 0), 4, norm).unwrap(), 0.0);
        }
        // Bell(1,2) (x) |g3 g4>.
        let mut psi = vec![c(0.0); 16];
        psi[0b0000] = c(FRAC_1_SQRT_2);
        psi[0b1100] = c(FRAC_1_SQRT_2);
        let rho = ComplexMatrix::outer(&psi);
        let avg = average_pairwise_concurrence(&rho, 4, PairNormalization::AllPairs).unwrap();
        assert!((avg - 1.0 / 6.0).abs() < 1e-10);
        let half = average_pairwise_concurrence(&rho, 4, PairNormalization::HalfN).unwrap();
        assert!((half - 0.5).abs() < 1e-10);
        assert!(matches!(
            average_pairwise_concurrence(&ComplexMatrix::identity(2), 1, PairNormalization::AllPairs),
            Err(Error::TooFewQubits(1))
        ));
    }

    fn series(values: &[(f64, f64)]) -> Trajectory<f64> {
        Trajectory { times: values.iter().map(|v| v.0).collect(), records: values.iter().map(|v| v.1).collect() }
    }

    #[test]
    fn max_concurrence_cases() {
        let zero = series(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)]);
        assert_eq!(max_concurrence(&zero).unwrap(), (0.0, 0.0));
        let tie = series(&[(0.0, 0.1), (1.0, 0.3), (2.0, 0.3)]);
        assert_eq!(max_concurrence(&tie).unwrap(), (0.3, 1.0));
        assert!(matches!(max_concurrence(&Trajectory::default()), Err(Error::EmptyTrajectory)));
    }

    #[test]
    fn survival_time_cases() {
        let zero = series(&[(0.0, 0.0), (1.0, 0.0)]);
        assert_eq!(survival_time(&zero, 0.05), 0.0);
        let boxcar: Vec<(f64, f64)> =
            (0..=80).map(|k| k as f64 * 0.1).map(|t| (t, if (2.0 - 1e-9..=5.0 + 1e-9).contains(&t) { 1.0 } else { 0.0 })).collect();
        assert!((survival_time(&series(&boxcar), 0.05) - 3.0).abs() < 1e-9);
    }

    fn random_unitary(a: [f64; 3]) -> ComplexMatrix {
        // exp(-i (a0 X + a1 Y + a2 Z)) for a single qubit, closed form.
        let norm = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt().max(1e-12);
        let (nx, ny, nz) = (a[0] / norm, a[1] / norm, a[2] / norm);
        let (cs, sn) = (norm.cos(), norm.sin());
        ComplexMatrix::from_row_major(
            2,
            vec![C64::new(cs, -sn * nz), C64::new(-sn * ny, -sn * nx), C64::new(sn * ny, -sn * nx), C64::new(cs, sn * nz)],
        )
    }

    fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
        let (da, db) = (a.dim(), b.dim());
        ComplexMatrix::from_fn(da * db, |r, c| a[(r / db, c / db)] * b[(r % db, c % db)])
    }

    proptest! {
        #[test]
        fn local_unitaries_leave_concurrence_invariant(
            w in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 16),
            ua in prop::array::uniform3(-3.0..3.0f64),
            ub in prop::array::uniform3(-3.0..3.0f64),
        ) {
            let a = ComplexMatrix::from_row_major(4, w.into_iter().map(|(re, im)| C64::new(re, im)).collect());
            let mut rho = a.matmul(&a.adjoint()).unwrap();
            let tr = rho.trace();
            rho = rho.scale(1.0 / tr);
            let u = kron(&random_unitary(ua), &random_unitary(ub));
            let rotated = u.matmul(&rho).unwrap().matmul(&u.adjoint()).unwrap();
            let c0 = concurrence_pair(&rho).unwrap();
            let c1 = concurrence_pair(&rotated).unwrap();
            prop_assert!((c0 - c1).abs() < 1e-8);
            prop_assert!((0.0..=1.0).contains(&c0));
            prop_assert!((c0 - oracle_concurrence(&rho)).abs() < 1e-8);
        }
    }
}
