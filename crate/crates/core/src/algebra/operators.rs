//! Qubit-chain operators on the `2^N` composite space.
//!
//! Local basis order is (ground, excited) and qubit 1 is the most
//! significant tensor factor, so `|g...g>` has composite index 0 and
//! `|e...e>` has index `2^N - 1`. Qubit indices in this module are 1-based.

use num_complex::Complex64 as C64;

use super::ComplexMatrix;
use crate::error::{Error, Result};

const ONE: C64 = C64 { re: 1.0, im: 0.0 };

pub fn hilbert_dim(n: usize) -> usize {
    1 << n
}

/// Bit mask of qubit `i` (1-based) inside a composite basis index.
pub fn qubit_mask(i: usize, n: usize) -> usize {
    debug_assert!((1..=n).contains(&i));
    1 << (n - i)
}

/// Whether qubit `i` (1-based) is excited in composite basis state `index`.
pub fn is_excited(index: usize, i: usize, n: usize) -> bool {
    index & qubit_mask(i, n) != 0
}

pub fn excitation_count(index: usize) -> usize {
    index.count_ones() as usize
}

fn check_qubit(i: usize, n: usize) -> Result<()> {
    if i == 0 || i > n {
        return Err(Error::QubitIndex { index: i, n });
    }
    Ok(())
}

/// `I (x) ... (x) |g><e| (x) ... (x) I` with the lowering operator in slot `i`.
pub fn embed_lowering(i: usize, n: usize) -> Result<ComplexMatrix> {
    check_qubit(i, n)?;
    let dim = hilbert_dim(n);
    let mask = qubit_mask(i, n);
    let mut m = ComplexMatrix::zeros(dim);
    for col in (0..dim).filter(|c| c & mask != 0) {
        m[(col ^ mask, col)] = ONE;
    }
    Ok(m)
}

pub fn embed_raising(i: usize, n: usize) -> Result<ComplexMatrix> {
    Ok(embed_lowering(i, n)?.adjoint())
}

/// `|e_i><e_i|` on the full chain.
pub fn excited_projector(i: usize, n: usize) -> Result<ComplexMatrix> {
    check_qubit(i, n)?;
    Ok(diagonal(n, |idx| is_excited(idx, i, n)))
}

pub fn ground_projector(i: usize, n: usize) -> Result<ComplexMatrix> {
    check_qubit(i, n)?;
    Ok(diagonal(n, |idx| !is_excited(idx, i, n)))
}

/// `|e_i><e_i| - |g_i><g_i|`.
pub fn sigma_z(i: usize, n: usize) -> Result<ComplexMatrix> {
    Ok(excited_projector(i, n)? - ground_projector(i, n)?)
}

/// Projector onto the span of basis states with exactly `k` excited qubits.
pub fn excitation_projector(k: usize, n: usize) -> Result<ComplexMatrix> {
    if k > n {
        return Err(Error::ExcitationCount { k, n });
    }
    Ok(diagonal(n, |idx| excitation_count(idx) == k))
}

fn diagonal(n: usize, include: impl Fn(usize) -> bool) -> ComplexMatrix {
    let dim = hilbert_dim(n);
    let mut m = ComplexMatrix::zeros(dim);
    for idx in (0..dim).filter(|&idx| include(idx)) {
        m[(idx, idx)] = ONE;
    }
    m
}

/// Reduced state of qubits `(i, j)`, `i < j`, as a 4x4 matrix in the order
/// `gg, ge, eg, ee` (qubit `i` most significant).
pub fn partial_trace_to_pair(rho: &ComplexMatrix, i: usize, j: usize, n: usize) -> Result<ComplexMatrix> {
    if i == 0 || j > n || i >= j {
        return Err(Error::PairIndex { i, j, n });
    }
    let dim = hilbert_dim(n);
    if rho.dim() != dim {
        return Err(Error::DimensionMismatch { left: rho.dim(), right: dim });
    }
    let mi = qubit_mask(i, n);
    let mj = qubit_mask(j, n);
    let pair_bits = |idx: usize| ((idx & mi != 0) as usize) << 1 | (idx & mj != 0) as usize;
    let mut out = ComplexMatrix::zeros(4);
    // Rows and columns must agree on every traced-out qubit.
    let rest = !(mi | mj) & (dim - 1);
    for r in 0..dim {
        let env = r & rest;
        for p in 0..4usize {
            let c = env | if p & 2 != 0 { mi } else { 0 } | if p & 1 != 0 { mj } else { 0 };
            out[(pair_bits(r), p)] += rho[(r, c)];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn single_qubit_lowering_is_g_ket_e_bra() {
        let s = embed_lowering(1, 1).unwrap();
        assert_eq!(s[(0, 1)], ONE);
        assert_eq!(s.as_slice().iter().filter(|z| z.norm() > 0.0).count(), 1);
        let sd = s.adjoint();
        assert_eq!(sd[(1, 0)], ONE);
        assert_eq!(sd.as_slice().iter().filter(|z| z.norm() > 0.0).count(), 1);
    }

    #[test]
    fn lowering_acts_on_its_own_slot() {
        // |e1 g2> has index 2 and maps to |g1 g2>.
        let s1 = embed_lowering(1, 2).unwrap();
        let psi = [c(0.0), c(0.0), c(1.0), c(0.0)];
        let out: Vec<C64> = (0..4).map(|r| (0..4).map(|k| s1[(r, k)] * psi[k]).sum()).collect();
        assert_eq!(out, vec![c(1.0), c(0.0), c(0.0), c(0.0)]);
    }

    #[test]
    fn raising_lowering_commutator_is_sigma_z() {
        let s = embed_lowering(1, 1).unwrap();
        let comm = s.adjoint().commutator(&s).unwrap();
        assert_eq!(comm, sigma_z(1, 1).unwrap());
        assert_eq!(comm[(1, 1)], c(1.0));
        assert_eq!(comm[(0, 0)], c(-1.0));
    }

    #[test]
    fn canonical_commutators_hold_up_to_four_qubits() {
        for n in 1..=4 {
            for i in 1..=n {
                for j in 1..=n {
                    let comm = embed_raising(i, n).unwrap().commutator(&embed_lowering(j, n).unwrap()).unwrap();
                    let expected = if i == j { sigma_z(i, n).unwrap() } else { ComplexMatrix::zeros(1 << n) };
                    assert_eq!(comm, expected, "n={n} i={i} j={j}");
                }
            }
        }
    }

    #[test]
    fn index_errors() {
        assert!(matches!(embed_lowering(0, 3), Err(Error::QubitIndex { .. })));
        assert!(matches!(embed_lowering(4, 3), Err(Error::QubitIndex { .. })));
        assert!(matches!(excitation_projector(4, 3), Err(Error::ExcitationCount { .. })));
        let rho = ComplexMatrix::identity(8);
        assert!(matches!(partial_trace_to_pair(&rho, 2, 2, 3), Err(Error::PairIndex { .. })));
        assert!(matches!(partial_trace_to_pair(&rho, 2, 4, 3), Err(Error::PairIndex { .. })));
        assert!(matches!(partial_trace_to_pair(&rho, 1, 2, 2), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn composite_index_convention() {
        assert_eq!(excitation_count(0), 0);
        assert_eq!(excitation_count(hilbert_dim(5) - 1), 5);
        assert!(is_excited(0b100, 1, 3));
        assert!(!is_excited(0b100, 3, 3));
    }

    #[test]
    fn excitation_projectors_small_cases() {
        let p0 = excitation_projector(0, 2).unwrap();
        assert_eq!(p0, ComplexMatrix::basis_projector(4, 0));
        let p1 = excitation_projector(1, 2).unwrap();
        assert_eq!(p1[(1, 1)], ONE);
        assert_eq!(p1[(2, 2)], ONE);
        assert_eq!(p1.trace(), c(2.0));
    }

    #[test]
    fn excitation_projectors_are_complete_idempotent_and_orthogonal() {
        for n in 1..=5 {
            let dim = hilbert_dim(n);
            let ps: Vec<_> = (0..=n).map(|k| excitation_projector(k, n).unwrap()).collect();
            let mut sum = ComplexMatrix::zeros(dim);
            for p in &ps {
                sum += p;
                assert_eq!(&p.matmul(p).unwrap(), p);
            }
            assert_eq!(sum, ComplexMatrix::identity(dim));
            for a in 0..ps.len() {
                for b in (a + 1)..ps.len() {
                    assert_eq!(ps[a].matmul(&ps[b]).unwrap().max_abs(), 0.0);
                }
            }
        }
    }

    #[test]
    fn ground_state_reduces_to_ground_pair() {
        let rho = ComplexMatrix::basis_projector(32, 0);
        for i in 1..=5 {
            for j in (i + 1)..=5 {
                assert_eq!(partial_trace_to_pair(&rho, i, j, 5).unwrap(), ComplexMatrix::basis_projector(4, 0));
            }
        }
    }

    #[test]
    fn two_qubit_partial_trace_is_identity_map() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = ComplexMatrix::outer(&[c(h), c(0.0), c(0.0), c(h)]);
        assert!(partial_trace_to_pair(&bell, 1, 2, 2).unwrap().max_abs_diff(&bell) < 1e-15);
    }

    /// Independent oracle: explicit sum over environment states of
    /// `<a, env| rho |b, env>` with the pair amplitudes placed by hand.
    fn partial_trace_oracle(rho: &ComplexMatrix, i: usize, j: usize, n: usize) -> ComplexMatrix {
        let others: Vec<usize> = (1..=n).filter(|&q| q != i && q != j).collect();
        let place = |pair: usize, env: usize| {
            let mut idx = 0;
            if pair & 2 != 0 {
                idx |= qubit_mask(i, n);
            }
            if pair & 1 != 0 {
                idx |= qubit_mask(j, n);
            }
            for (k, &q) in others.iter().enumerate() {
                if env >> k & 1 == 1 {
                    idx |= qubit_mask(q, n);
                }
            }
            idx
        };
        ComplexMatrix::from_fn(4, |a, b| (0..1usize << others.len()).map(|e| rho[(place(a, e), place(b, e))]).sum())
    }

    #[test]
    fn bell_times_ground_traced_to_outer_pair() {
        // Bell(1,2) (x) |g3><g3|, keep (1,3): (I/2) (x) |g><g|.
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut psi = vec![c(0.0); 8];
        psi[0b000] = c(h);
        psi[0b110] = c(h);
        let rho = ComplexMatrix::outer(&psi);
        let reduced = partial_trace_to_pair(&rho, 1, 3, 3).unwrap();
        let mut expected = ComplexMatrix::zeros(4);
        expected[(0, 0)] = c(0.5);
        expected[(2, 2)] = c(0.5);
        assert!(reduced.max_abs_diff(&expected) < 1e-15);
        assert!(reduced.max_abs_diff(&partial_trace_oracle(&rho, 1, 3, 3)) < 1e-15);
    }

    #[test]
    fn partial_trace_matches_oracle_and_preserves_trace_and_positivity() {
        // Deterministic pseudo-random mixed state on 4 qubits.
        let n = 4;
        let dim = hilbert_dim(n);
        let mut seed = 0x2545_f491_4f6c_dd1du64;
        let mut next = || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let a = ComplexMatrix::from_fn(dim, |_, _| C64::new(next(), next()));
        let mut rho = a.matmul(&a.adjoint()).unwrap();
        let tr = rho.trace();
        rho = rho.scale(1.0 / tr);
        for i in 1..=n {
            for j in (i + 1)..=n {
                let red = partial_trace_to_pair(&rho, i, j, n).unwrap();
                assert!(red.max_abs_diff(&partial_trace_oracle(&rho, i, j, n)) < 1e-14);
                assert!((red.trace() - c(1.0)).norm() < 1e-12);
                assert!(red.eigenvalues_hermitian()[0] >= -1e-10);
            }
        }
    }
}
