use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::de::{value::StrDeserializer, DeserializeOwned};

use fockchain::hierarchy::{CooperativeForm, DriveMode, Rho21Coupling};
use fockchain::observables::PairNormalization;
use fockchain::pulse::PulseNormalization;
use fockchain::scenario::{summary_csv, EIGEN_WARN};
use fockchain::{parse_config, run_all, Error, ExperimentConfig, PresetId, Result, RunOutput};

#[derive(Parser)]
#[command(name = "fockchain", version, about = "Two-photon Fock-state dynamics of waveguide qubit chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single TOML configuration.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run every member of a figure preset.
    Preset {
        id: String,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run a preset and write one summary row per member.
    Sweep {
        id: String,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// List preset identifiers.
    ListPresets,
}

fn kebab<T: DeserializeOwned>(s: &str) -> std::result::Result<T, String> {
    T::deserialize(StrDeserializer::<serde::de::value::Error>::new(s)).map_err(|e| e.to_string())
}

#[derive(Args, Default)]
struct Overrides {
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    sample_every: Option<usize>,
    /// Survival threshold relative to the peak concurrence.
    #[arg(long)]
    theta: Option<f64>,
    /// all-pairs | half-n
    #[arg(long, value_parser = kebab::<PairNormalization>)]
    pair_norm: Option<PairNormalization>,
    /// verbatim | unit-l2 | reference-width
    #[arg(long, value_parser = kebab::<PulseNormalization>)]
    pulse_norm: Option<PulseNormalization>,
    /// none | one-photon | two-photon
    #[arg(long, value_parser = kebab::<DriveMode>)]
    drive: Option<DriveMode>,
    /// cascaded | as-printed
    #[arg(long, value_parser = kebab::<CooperativeForm>)]
    cooperative: Option<CooperativeForm>,
    /// fock-ladder | no-conjugate | as-printed
    #[arg(long, value_parser = kebab::<Rho21Coupling>)]
    rho21: Option<Rho21Coupling>,
}

impl Overrides {
    fn apply(&self, cfg: &mut ExperimentConfig) {
        if let Some(out) = &self.out {
            cfg.output.dir = out.clone();
        }
        let i = &mut cfg.integrator;
        i.dt = self.dt.unwrap_or(i.dt);
        i.t_end = self.t_end.unwrap_or(i.t_end);
        i.sample_every = self.sample_every.unwrap_or(i.sample_every);
        let o = &mut cfg.observables;
        o.threshold = self.theta.unwrap_or(o.threshold);
        o.pair_norm = self.pair_norm.unwrap_or(o.pair_norm);
        let p = &mut cfg.pulse;
        p.normalization = self.pulse_norm.unwrap_or(p.normalization);
        p.drive = self.drive.unwrap_or(p.drive);
        let m = &mut cfg.model;
        m.cooperative = self.cooperative.unwrap_or(m.cooperative);
        m.rho21 = self.rho21.unwrap_or(m.rho21);
    }
}

fn prepare(mut cfgs: Vec<ExperimentConfig>, overrides: &Overrides) -> Result<Vec<ExperimentConfig>> {
    for cfg in &mut cfgs {
        overrides.apply(cfg);
        cfg.resolve()?;
    }
    Ok(cfgs)
}

fn report(out: &RunOutput) -> bool {
    let s = &out.summary;
    println!(
        "{}: C_max = {:.6} at t = {:.3}, survival = {:.3}, peak P_e = {:.6}, min P_G = {:.6}",
        s.name, s.c_max, s.t_max, s.survival_time, s.peak_p_e, s.min_p_g
    );
    if s.min_eigenvalue < EIGEN_WARN {
        eprintln!("warning: {}: system state eigenvalue {:e} below {EIGEN_WARN:e}", s.name, s.min_eigenvalue);
    }
    let violations = s.violations();
    for v in &violations {
        eprintln!("invariant broken: {}: {v}", s.name);
    }
    violations.is_empty()
}

/// Returns whether every run kept its invariants.
fn execute(cfgs: &[ExperimentConfig], summary_name: Option<&str>) -> Result<bool> {
    let mut ok = true;
    let mut done = Vec::new();
    for result in run_all(cfgs) {
        let out = result?;
        let path = out.write(&out.config.output.dir)?;
        println!("wrote {}", path.display());
        ok &= report(&out);
        done.push(out);
    }
    if let (Some(name), Some(first)) = (summary_name, done.first()) {
        let path = first.config.output.dir.join(format!("{name}_summary.csv"));
        let rows: Vec<&RunOutput> = done.iter().collect();
        fs::write(&path, summary_csv(&rows)).map_err(|e| Error::Io { context: format!("writing {}", path.display()), source: e })?;
        println!("wrote {}", path.display());
    }
    Ok(ok)
}

fn main_inner(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run { config, overrides } => {
            let text = fs::read_to_string(&config)
                .map_err(|e| Error::Io { context: format!("reading {}", config.display()), source: e })?;
            let cfgs = prepare(vec![parse_config(&text)?], &overrides)?;
            execute(&cfgs, None)
        }
        Command::Preset { id, overrides } => {
            let id: PresetId = id.parse()?;
            let cfgs = prepare(id.expand(), &overrides)?;
            let summary = (cfgs.len() > 1).then(|| id.name());
            execute(&cfgs, summary)
        }
        Command::Sweep { id, overrides } => {
            let id: PresetId = id.parse()?;
            let cfgs = prepare(id.expand(), &overrides)?;
            execute(&cfgs, Some(id.name()))
        }
        Command::ListPresets => {
            for id in PresetId::ALL {
                println!("{:<12} {:>3} runs  {}", id.name(), id.expand().len(), id.description());
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
