//! Fixed-step classical RK4 propagation of the hierarchy.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hierarchy::{Hierarchy, HierarchyState};

/// Trace drift beyond which integration aborts.
pub const TRACE_ABORT: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_end: f64,
    pub sample_every: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { dt: 1e-3, t_end: 15.0, sample_every: 10 }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::field("integrator.dt", "must be positive"));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::field("integrator.t_end", "must be non-negative"));
        }
        if self.sample_every == 0 {
            return Err(Error::field("integrator.sample_every", "must be at least 1"));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}

/// Sampled time series; `records[k]` belongs to `times[k]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<R> {
    pub times: Vec<f64>,
    pub records: Vec<R>,
}

impl<R> Default for Trajectory<R> {
    fn default() -> Self {
        Self { times: Vec::new(), records: Vec::new() }
    }
}

impl<R> Trajectory<R> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &R)> {
        self.times.iter().copied().zip(&self.records)
    }

    pub fn map<S>(&self, f: impl FnMut(&R) -> S) -> Trajectory<S> {
        Trajectory { times: self.times.clone(), records: self.records.iter().map(f).collect() }
    }
}

/// One classical RK4 step applied to all blocks at once.
pub fn rk4_step<F>(s: &HierarchyState, t: f64, dt: f64, rhs: F) -> Result<HierarchyState>
where
    F: Fn(&HierarchyState, f64) -> Result<HierarchyState>,
{
    let k1 = rhs(s, t)?;
    let mut tmp = s.clone();
    tmp.axpy(0.5 * dt, &k1);
    let k2 = rhs(&tmp, t + 0.5 * dt)?;
    tmp = s.clone();
    tmp.axpy(0.5 * dt, &k2);
    let k3 = rhs(&tmp, t + 0.5 * dt)?;
    tmp = s.clone();
    tmp.axpy(dt, &k3);
    let k4 = rhs(&tmp, t + dt)?;

    let mut next = s.clone();
    next.axpy(dt / 6.0, &k1);
    next.axpy(dt / 3.0, &k2);
    next.axpy(dt / 3.0, &k3);
    next.axpy(dt / 6.0, &k4);
    if !next.is_finite() {
        return Err(Error::NonFinite { time: t + dt });
    }
    Ok(next)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub trace_err_s: f64,
    pub trace_err_11: f64,
    pub trace_err_00: f64,
    /// Largest `|trace|` among `rho10`, `rho20`, `rho21`.
    pub offdiag_trace: f64,
    /// Largest entrywise `|M - M^dagger|` among `rho_s`, `rho11`, `rho00`.
    pub herm_err: f64,
    pub min_eigenvalue: f64,
}

impl Diagnostics {
    pub fn max_trace_err(&self) -> f64 {
        self.trace_err_s.max(self.trace_err_11).max(self.trace_err_00)
    }
}

pub fn diagnostics(s: &HierarchyState) -> Diagnostics {
    Diagnostics { min_eigenvalue: s.rho_s.eigenvalues_hermitian()[0], ..trace_diagnostics(s) }
}

/// [`diagnostics`] without the eigen-solve; `min_eigenvalue` is left at 0.
pub fn trace_diagnostics(s: &HierarchyState) -> Diagnostics {
    let one = C64::new(1.0, 0.0);
    let terr = |m: &crate::algebra::ComplexMatrix| (m.trace() - one).norm();
    Diagnostics {
        trace_err_s: terr(&s.rho_s),
        trace_err_11: terr(&s.rho11),
        trace_err_00: terr(&s.rho00),
        offdiag_trace: [&s.rho10, &s.rho20, &s.rho21].iter().map(|m| m.trace().norm()).fold(0.0, f64::max),
        herm_err: [&s.rho_s, &s.rho11, &s.rho00].iter().map(|m| m.hermiticity_deviation()).fold(0.0, f64::max),
        min_eigenvalue: 0.0,
    }
}

fn check_traces(s: &HierarchyState, t: f64) -> Result<()> {
    let d = [
        ("rho_s", (s.rho_s.trace() - 1.0).norm()),
        ("rho11", (s.rho11.trace() - 1.0).norm()),
        ("rho00", (s.rho00.trace() - 1.0).norm()),
        ("rho10", s.rho10.trace().norm()),
        ("rho20", s.rho20.trace().norm()),
        ("rho21", s.rho21.trace().norm()),
    ];
    match d.into_iter().find(|(_, e)| *e > TRACE_ABORT) {
        Some((block, error)) => Err(Error::TraceBreach { block, error, time: t }),
        None => Ok(()),
    }
}

/// Integrates from `t = 0` to `cfg.t_end`, calling `observe` on the initial
/// state and after every `cfg.sample_every` steps.
pub fn integrate<R, O>(s0: &HierarchyState, h: &Hierarchy, cfg: &IntegratorConfig, mut observe: O) -> Result<Trajectory<R>>
where
    O: FnMut(f64, &HierarchyState) -> R,
{
    cfg.validate()?;
    s0.check_consistent()?;
    let steps = cfg.steps();
    let mut traj = Trajectory {
        times: Vec::with_capacity(steps / cfg.sample_every + 1),
        records: Vec::with_capacity(steps / cfg.sample_every + 1),
    };
    let mut s = s0.clone();
    check_traces(&s, 0.0)?;
    traj.times.push(0.0);
    traj.records.push(observe(0.0, &s));
    for k in 0..steps {
        let t = k as f64 * cfg.dt;
        s = rk4_step(&s, t, cfg.dt, |x, tt| h.rhs(x, tt))?;
        if (k + 1) % cfg.sample_every == 0 {
            let now = (k + 1) as f64 * cfg.dt;
            check_traces(&s, now)?;
            traj.times.push(now);
            traj.records.push(observe(now, &s));
        }
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ComplexMatrix;
    use crate::hierarchy::{initial_state, ChainParams, DriveMode, HierarchyModel};
    use crate::pulse::{GaussianPulse, PulseNormalization};

    fn scalar_state(x: f64) -> HierarchyState {
        let mut s = HierarchyState::zeros(1);
        s.rho_s[(0, 0)] = C64::new(x, 0.0);
        s
    }

    fn decay(s: &HierarchyState, _t: f64) -> Result<HierarchyState> {
        let mut d = HierarchyState::zeros(1);
        d.rho_s = s.rho_s.scale(C64::new(-1.0, 0.0));
        Ok(d)
    }

    #[test]
    fn zero_rhs_keeps_state() {
        let s = initial_state(2);
        let next = rk4_step(&s, 0.0, 0.1, |x, _| Ok(HierarchyState::zeros(x.dim()))).unwrap();
        assert_eq!(next, s);
    }

    #[test]
    fn scalar_local_error_is_fifth_order() {
        let errs: Vec<f64> = [0.1, 0.05]
            .iter()
            .map(|&dt| (rk4_step(&scalar_state(1.0), 0.0, dt, decay).unwrap().rho_s[(0, 0)].re - (-dt).exp()).abs())
            .collect();
        // Leading local error is dt^5/120.
        assert!((errs[0] / 0.1f64.powi(5) - 1.0 / 120.0).abs() < 1e-3);
        let ratio = errs[0] / errs[1];
        assert!((ratio - 32.0).abs() < 1.5, "ratio {ratio}");
    }

    #[test]
    fn scalar_global_error_is_fourth_order() {
        let global = |dt: f64| {
            let mut s = scalar_state(1.0);
            let steps = (1.0 / dt).round() as usize;
            for k in 0..steps {
                s = rk4_step(&s, k as f64 * dt, dt, decay).unwrap();
            }
            (s.rho_s[(0, 0)].re - (-1.0f64).exp()).abs()
        };
        let ratio = global(0.05) / global(0.025);
        assert!((ratio - 16.0).abs() < 1.0, "ratio {ratio}");
    }

    #[test]
    fn overflow_is_reported() {
        let s = scalar_state(1.0);
        let r = rk4_step(&s, 2.0, 1.0, |x, _| {
            let mut d = HierarchyState::zeros(1);
            d.rho_s = x.rho_s.scale(C64::new(f64::MAX, 0.0));
            Ok(d)
        });
        assert!(matches!(r, Err(Error::NonFinite { .. })));
    }

    #[test]
    fn config_validation() {
        assert!(IntegratorConfig { dt: 0.0, ..Default::default() }.validate().is_err());
        assert!(IntegratorConfig { sample_every: 0, ..Default::default() }.validate().is_err());
        assert!(IntegratorConfig { t_end: -1.0, ..Default::default() }.validate().is_err());
        assert_eq!(IntegratorConfig::default().steps(), 15_000);
    }

    fn hierarchy(n: usize, mode: DriveMode) -> Hierarchy {
        let p = ChainParams::uniform(n, 1.0, 1.0, 0.0, 0.0).unwrap();
        let pulse = GaussianPulse::new(5.0, 1.5, PulseNormalization::ReferenceWidth).unwrap();
        Hierarchy::new(p, pulse, mode, HierarchyModel::default()).unwrap()
    }

    #[test]
    fn zero_end_time_gives_single_sample() {
        let s0 = initial_state(2);
        let cfg = IntegratorConfig { t_end: 0.0, ..Default::default() };
        let traj = integrate(&s0, &hierarchy(2, DriveMode::TwoPhoton), &cfg, |_, s| s.rho_s.clone()).unwrap();
        assert_eq!(traj.times, vec![0.0]);
        assert_eq!(traj.records[0], s0.rho_s);
    }

    #[test]
    fn sample_times_are_uniform() {
        let cfg = IntegratorConfig { dt: 0.01, t_end: 1.0, sample_every: 7 };
        let traj = integrate(&initial_state(1), &hierarchy(1, DriveMode::TwoPhoton), &cfg, |t, _| t).unwrap();
        assert_eq!(traj.len(), 100 / 7 + 1);
        for w in traj.times.windows(2) {
            assert!((w[1] - w[0] - 0.07).abs() < 1e-12);
        }
    }

    #[test]
    fn initial_diagnostics_vanish() {
        for n in 1..=4 {
            let d = diagnostics(&initial_state(n));
            assert_eq!(d.max_trace_err(), 0.0);
            assert_eq!(d.offdiag_trace, 0.0);
            assert_eq!(d.herm_err, 0.0);
            assert!(d.min_eigenvalue.abs() < 1e-14);
        }
    }

    #[test]
    fn corrupted_state_is_flagged() {
        let mut s = initial_state(2);
        s.rho11[(0, 1)] = C64::new(0.25, 0.0);
        assert!((diagnostics(&s).herm_err - 0.25).abs() < 1e-15);
        s.rho_s[(3, 3)] = C64::new(0.1, 0.0);
        assert!((diagnostics(&s).trace_err_s - 0.1).abs() < 1e-15);
    }

    #[test]
    fn trace_breach_aborts_with_time() {
        let pulse = GaussianPulse::new(5.0, 1.5, PulseNormalization::ReferenceWidth).unwrap();
        let p = ChainParams::uniform(1, 1.0, 1.0, 0.0, 0.0).unwrap();
        let h = Hierarchy::new(p, pulse, DriveMode::TwoPhoton, HierarchyModel::default()).unwrap();
        let mut s0 = initial_state(1);
        s0.rho_s = ComplexMatrix::basis_projector(2, 0).scale(C64::new(1.5, 0.0));
        let r = integrate(&s0, &h, &IntegratorConfig::default(), |_, _| ());
        assert!(matches!(r, Err(Error::TraceBreach { block: "rho_s", time, .. }) if time == 0.0));
    }
}
