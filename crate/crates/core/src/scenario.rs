//! Running configurations end to end: integrate, observe, summarize, write.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::algebra::ComplexMatrix;
use crate::config::{ExperimentConfig, Resolved};
use crate::error::{Error, Result};
use crate::hierarchy::{initial_state, Hierarchy};
use crate::integrator::{integrate, trace_diagnostics, Diagnostics, Trajectory};
use crate::observables::{
    average_of, max_concurrence, pair_concurrences, pairs, populations, survival_time, PairNormalization,
    PopulationRecord,
};
use crate::parallel::par_map;

/// Bounds a completed run must respect to count as valid.
pub const TRACE_TOL: f64 = 1e-8;
pub const HERM_TOL: f64 = 1e-9;
pub const OFFDIAG_TOL: f64 = 1e-9;
/// Most negative system-state eigenvalue tolerated without a warning.
pub const EIGEN_WARN: f64 = -1e-7;

#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub populations: PopulationRecord,
    /// Pair concurrences in [`pairs`] order; NaN where the reduced state is
    /// not a valid density matrix.
    pub pairs: Vec<f64>,
    pub avg_all_pairs: f64,
    pub avg_half_n: f64,
    pub pulse_intensity: f64,
    pub diagnostics: Diagnostics,
}

impl Sample {
    pub fn average(&self, norm: PairNormalization) -> f64 {
        match norm {
            PairNormalization::AllPairs => self.avg_all_pairs,
            PairNormalization::HalfN => self.avg_half_n,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Summary {
    pub name: String,
    pub n_qubits: usize,
    /// Maximum of the average concurrence under the configured normalization.
    pub c_max: f64,
    pub t_max: f64,
    pub c_max_all_pairs: f64,
    pub c_max_half_n: f64,
    pub survival_time: f64,
    /// Largest single-qubit excited population over time and qubits.
    pub peak_p_e: f64,
    pub t_peak_p_e: f64,
    pub peak_p1: f64,
    pub peak_p2: f64,
    pub min_p_g: f64,
    pub t_min_p_g: f64,
    pub max_trace_err: f64,
    pub max_offdiag_trace: f64,
    pub max_herm_err: f64,
    pub min_eigenvalue: f64,
    /// Samples whose two-qubit reductions are not positive.
    pub invalid_samples: usize,
}

impl Summary {
    /// Trace, hermiticity and positivity all within tolerance.
    pub fn invariants_hold(&self) -> bool {
        self.violations().is_empty()
    }

    pub fn violations(&self) -> Vec<String> {
        // NaN counts as a violation.
        let below = |x: f64, tol: f64| x < tol;
        let mut v = Vec::new();
        if !below(self.max_trace_err, TRACE_TOL) {
            v.push(format!("trace error {:e} exceeds {TRACE_TOL:e}", self.max_trace_err));
        }
        if !below(self.max_offdiag_trace, OFFDIAG_TOL) {
            v.push(format!("photon-coherence trace {:e} exceeds {OFFDIAG_TOL:e}", self.max_offdiag_trace));
        }
        if !below(self.max_herm_err, HERM_TOL) {
            v.push(format!("hermiticity error {:e} exceeds {HERM_TOL:e}", self.max_herm_err));
        }
        if self.invalid_samples > 0 {
            v.push(format!("{} samples have non-positive pair states", self.invalid_samples));
        }
        v
    }
}

pub struct RunOutput {
    pub config: ExperimentConfig,
    pub resolved: Resolved,
    pub trajectory: Trajectory<Sample>,
    pub summary: Summary,
}

impl RunOutput {
    pub fn concurrence(&self) -> Trajectory<f64> {
        let norm = self.resolved.pair_norm;
        self.trajectory.map(|s| s.average(norm))
    }

    pub fn csv(&self) -> String {
        emit_csv_string(&self.trajectory, self.resolved.params.n())
    }

    /// Writes `<dir>/<name>.csv` and `<dir>/<name>.meta.toml`.
    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        fs::create_dir_all(dir).map_err(|e| Error::io(format!("creating {}", dir.display()), e))?;
        let csv = dir.join(format!("{}.csv", self.config.output.name));
        emit_csv(&self.trajectory, self.resolved.params.n(), &csv)?;
        let meta = dir.join(format!("{}.meta.toml", self.config.output.name));
        fs::write(&meta, metadata(&self.config, &self.summary))
            .map_err(|e| Error::io(format!("writing {}", meta.display()), e))?;
        Ok(csv)
    }
}

fn observe(rho: &ComplexMatrix, n: usize, d: Diagnostics, intensity: f64) -> (Sample, bool) {
    let mut d = d;
    d.min_eigenvalue = rho.eigenvalues_hermitian()[0];
    let (pair_values, valid) = if n >= 2 {
        match pair_concurrences(rho, n) {
            Ok(v) => (v, true),
            Err(Error::InvalidDensity { .. }) => (vec![f64::NAN; pairs(n).count()], false),
            Err(e) => panic!("pair reduction of a consistent state failed: {e}"),
        }
    } else {
        (Vec::new(), true)
    };
    let (all, half) = if n >= 2 {
        (average_of(&pair_values, n, PairNormalization::AllPairs), average_of(&pair_values, n, PairNormalization::HalfN))
    } else {
        (f64::NAN, f64::NAN)
    };
    let sample = Sample {
        populations: populations(rho, n),
        pairs: pair_values,
        avg_all_pairs: all,
        avg_half_n: half,
        pulse_intensity: intensity,
        diagnostics: d,
    };
    (sample, valid)
}

/// Integrates one configuration and evaluates every observable.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let resolved = cfg.resolve()?;
    let n = resolved.params.n();
    let gamma_r1 = resolved.params.gamma_r[0];
    let h = Hierarchy::new(resolved.params.clone(), resolved.pulse, resolved.drive, resolved.model)?;
    let mode = resolved.drive;
    let snaps = integrate(&initial_state(n), &h, &resolved.integrator, |_, s| {
        (s.system_state(mode).clone(), trace_diagnostics(s))
    })?;

    let jobs: Vec<(f64, &(ComplexMatrix, Diagnostics))> = snaps.iter().collect();
    let pulse = &resolved.pulse;
    let observed = par_map(&jobs, |(t, (rho, d))| observe(rho, n, *d, pulse.drive_intensity(gamma_r1, *t)));
    let invalid_samples = observed.iter().filter(|(_, ok)| !ok).count();
    let trajectory = Trajectory { times: snaps.times, records: observed.into_iter().map(|(s, _)| s).collect() };

    let mut summary = summarize(&trajectory, n, resolved.pair_norm, resolved.threshold);
    summary.name = cfg.output.name.clone();
    summary.invalid_samples = invalid_samples;
    Ok(RunOutput { config: cfg.clone(), resolved, trajectory, summary })
}

/// Runs configurations in parallel, preserving order.
pub fn run_all(cfgs: &[ExperimentConfig]) -> Vec<Result<RunOutput>> {
    par_map(cfgs, run)
}

fn arg_extreme(traj: &Trajectory<Sample>, f: impl Fn(&Sample) -> f64, better: impl Fn(f64, f64) -> bool) -> (f64, f64) {
    let mut best = (f64::NAN, 0.0);
    for (t, s) in traj.iter() {
        let v = f(s);
        if best.0.is_nan() || better(v, best.0) {
            best = (v, t);
        }
    }
    best
}

pub fn summarize(traj: &Trajectory<Sample>, n: usize, norm: PairNormalization, threshold: f64) -> Summary {
    let max_by = |f: &dyn Fn(&Sample) -> f64| arg_extreme(traj, f, |a, b| a > b);
    let fold = |f: &dyn Fn(&Diagnostics) -> f64| traj.records.iter().map(|s| f(&s.diagnostics)).fold(0.0, f64::max);
    let (peak_p_e, t_peak_p_e) = max_by(&|s| s.populations.excited.iter().copied().fold(0.0, f64::max));
    let (min_p_g, t_min_p_g) = arg_extreme(traj, |s| s.populations.ground(), |a, b| a < b);
    let mut summary = Summary {
        n_qubits: n,
        peak_p_e,
        t_peak_p_e,
        peak_p1: max_by(&|s| s.populations.sector(1)).0,
        peak_p2: max_by(&|s| s.populations.sector(2)).0,
        min_p_g,
        t_min_p_g,
        max_trace_err: fold(&|d| d.max_trace_err()),
        max_offdiag_trace: fold(&|d| d.offdiag_trace),
        max_herm_err: fold(&|d| d.herm_err),
        min_eigenvalue: traj.records.iter().map(|s| s.diagnostics.min_eigenvalue).fold(0.0, f64::min),
        ..Summary::default()
    };
    if n >= 2 {
        let conc = traj.map(|s| s.average(norm));
        (summary.c_max, summary.t_max) = max_concurrence(&conc).unwrap_or((0.0, 0.0));
        summary.survival_time = survival_time(&conc, threshold);
        summary.c_max_all_pairs = max_concurrence(&traj.map(|s| s.avg_all_pairs)).map_or(0.0, |m| m.0);
        summary.c_max_half_n = max_concurrence(&traj.map(|s| s.avg_half_n)).map_or(0.0, |m| m.0);
    }
    summary
}

fn header(n: usize) -> String {
    let mut cols: Vec<String> = ["t", "P_G", "P_1", "P_2"].map(String::from).into();
    cols.extend((1..=n).map(|i| format!("P_e_{i}")));
    cols.extend(pairs(n).map(|(i, j)| format!("C_pair_{i}_{j}")));
    cols.extend(["C_avg_allpairs", "C_avg_halfN", "pulse_intensity", "trace_err", "herm_err"].map(String::from));
    cols.join(",")
}

fn field(out: &mut String, x: f64) {
    // Undefined values (single-qubit averages) stay empty.
    if x.is_nan() {
        out.push(',');
    } else {
        let _ = write!(out, ",{x}");
    }
}

pub fn emit_csv_string(traj: &Trajectory<Sample>, n: usize) -> String {
    let mut out = header(n);
    out.push('\n');
    for (t, s) in traj.iter() {
        let _ = write!(out, "{t}");
        let p = &s.populations;
        for x in [p.ground(), p.sector(1), p.sector(2)].into_iter().chain(p.excited.iter().copied()) {
            field(&mut out, x);
        }
        for &c in &s.pairs {
            field(&mut out, c);
        }
        let d = &s.diagnostics;
        let trace_err = d.max_trace_err().max(d.offdiag_trace);
        for x in [s.avg_all_pairs, s.avg_half_n, s.pulse_intensity, trace_err, d.herm_err] {
            field(&mut out, x);
        }
        out.push('\n');
    }
    out
}

pub fn emit_csv(traj: &Trajectory<Sample>, n: usize, path: &Path) -> Result<()> {
    fs::write(path, emit_csv_string(traj, n)).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

#[derive(Serialize)]
struct Metadata<'a> {
    version: &'static str,
    config: &'a ExperimentConfig,
    summary: &'a Summary,
}

pub fn metadata(cfg: &ExperimentConfig, summary: &Summary) -> String {
    toml::to_string(&Metadata { version: env!("CARGO_PKG_VERSION"), config: cfg, summary }).expect("metadata serializes")
}

fn join(values: &[f64]) -> String {
    values.iter().map(f64::to_string).collect::<Vec<_>>().join(";")
}

/// One row per run with all inputs echoed; per-qubit lists are `;`-joined.
pub fn summary_csv(runs: &[&RunOutput]) -> String {
    let mut out = String::from(
        "name,n_qubits,gamma_r,gamma_l,delta,positions,tbar,width,pulse_norm,drive,cooperative,rho21,dt,t_end,\
         pair_norm,threshold,c_max,t_max,c_max_allpairs,c_max_halfN,survival_time,peak_p_e,peak_p1,peak_p2,\
         min_p_g,t_min_p_g,max_trace_err,max_herm_err,min_eigenvalue\n",
    );
    for r in runs {
        let (p, s, z) = (&r.resolved, &r.summary, &r.resolved.params);
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            s.name,
            s.n_qubits,
            join(&z.gamma_r),
            join(&z.gamma_l),
            join(&z.detuning),
            join(&z.positions),
            p.pulse.center,
            p.pulse.width,
            p.pulse.normalization.name(),
            p.drive.name(),
            p.model.cooperative.name(),
            p.model.rho21.name(),
            p.integrator.dt,
            p.integrator.t_end,
            p.pair_norm.name(),
            p.threshold,
            s.c_max,
            s.t_max,
            s.c_max_all_pairs,
            s.c_max_half_n,
            s.survival_time,
            s.peak_p_e,
            s.peak_p1,
            s.peak_p2,
            s.min_p_g,
            s.t_min_p_g,
            s.max_trace_err,
            s.max_herm_err,
            s.min_eigenvalue,
        );
    }
    out
}
