//! Command-line front end.
//!
//! Every subcommand writes `manifest.json` into a fresh `--outdir` before any
//! result, then updates it with the outcome. Exit codes: 0 when all checks of
//! the run pass, 1 on a numerical failure, 2 on a usage error.

use std::ffi::OsString;
use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::classify;
use crate::dynamics::{self, QubitFactor, TrappingState};
use crate::eigensolver::{self, ConvergedSpectrum, ConvergenceOptions};
use crate::entanglement;
use crate::error::{Error, Result};
use crate::hamiltonian::{EnvironmentMode, EnvironmentParams, Matching, Model, ModelParams};
use crate::hilbert::Parity;
use crate::recurrence;
use crate::sweep::{self, SweepConfig, SweepMode};

#[derive(Parser, Debug)]
#[command(name = "dicke", version, about = "Exact diagonalization of the two-qubit Dicke model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Converged lowest eigenpairs of one parity subspace.
    Spectrum(SpectrumArgs),
    /// Spectrum plus concurrence, mutual information and Mandel Q per state.
    Entangle(SpectrumArgs),
    /// Spectrum split into the four interleaved classes.
    Classify(SpectrumArgs),
    /// Recurrence residuals of every converged eigenvector.
    RecurrenceCheck(SpectrumArgs),
    /// Parameter ensemble with aggregate spacing table.
    Sweep(SweepArgs),
    /// Closed evolution of a trapping state with baths.
    TrapSim(TrapArgs),
    /// Paired-singlet states on more than two qubits.
    MultiqubitCheck(MultiqubitArgs),
}

fn parse_triple(s: &str) -> std::result::Result<[f64; 3], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("'{x}': {e}")))
        .collect::<std::result::Result<_, _>>()?;
    v.try_into().map_err(|_| format!("expected three comma-separated numbers, got '{s}'"))
}

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    #[arg(long, default_value_t = 1.0)]
    pub omega0: f64,
    #[arg(long, default_value_t = 1.1)]
    pub g: f64,
    #[arg(long, value_enum, default_value_t = ModelArg::Dicke)]
    pub model: ModelArg,
    #[arg(long, default_value_t = 0.0)]
    pub drive_x: f64,
    #[arg(long, default_value_t = 0.0)]
    pub drive_y: f64,
    /// `δx,δy,δz`.
    #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
    pub dipole: Option<[f64; 3]>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelArg {
    Dicke,
    Variant,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParityArg {
    Positive,
    Negative,
}

impl From<ParityArg> for Parity {
    fn from(p: ParityArg) -> Parity {
        match p {
            ParityArg::Positive => Parity::Positive,
            ParityArg::Negative => Parity::Negative,
        }
    }
}

impl ModelArgs {
    pub fn params(&self) -> ModelParams {
        let base = match self.model {
            ModelArg::Dicke => ModelParams::dicke(self.omega, self.omega0, self.g),
            ModelArg::Variant => ModelParams::variant(self.omega, self.omega0, self.g),
        };
        base.with_drive(self.drive_x, self.drive_y).with_dipole(self.dipole.unwrap_or([0.0; 3]))
    }
}

#[derive(Args, Debug, Clone)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value_t = ParityArg::Positive)]
    pub parity: ParityArg,
    #[arg(long, default_value_t = 400)]
    pub n_states: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol_lambda: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol_vector: f64,
    /// Largest truncation tried (default four times the starting size).
    #[arg(long)]
    pub s_max: Option<usize>,
    /// Also write `plot.csv` (eigenvalue, concurrence, mutual_information, class_id).
    #[arg(long)]
    pub emit_plot_data: bool,
    #[arg(long)]
    pub outdir: PathBuf,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepModeArg {
    OnResonance,
    OffResonance,
}

#[derive(Args, Debug, Clone)]
pub struct SweepArgs {
    #[arg(long, value_enum, default_value_t = SweepModeArg::OnResonance)]
    pub mode: SweepModeArg,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    #[arg(long, default_value_t = 0.05)]
    pub g_min: f64,
    #[arg(long, default_value_t = 5.0)]
    pub g_max: f64,
    #[arg(long, default_value_t = 0.5)]
    pub omega0_min: f64,
    #[arg(long, default_value_t = 1.5)]
    pub omega0_max: f64,
    #[arg(long, value_enum, default_value_t = ParityArg::Positive)]
    pub parity: ParityArg,
    #[arg(long, default_value_t = 400)]
    pub n_states: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol_lambda: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol_vector: f64,
    /// Continue an interrupted run in the same directory.
    #[arg(long)]
    pub resume: bool,
    #[arg(long)]
    pub outdir: PathBuf,
}

impl SweepArgs {
    pub fn config(&self) -> SweepConfig {
        let mode = match self.mode {
            SweepModeArg::OnResonance => SweepMode::OnResonanceGrid,
            SweepModeArg::OffResonance => SweepMode::OffResonanceRandom,
        };
        let mut c = SweepConfig::new(mode, self.samples, self.n_states);
        c.omega = self.omega;
        c.g_range = [self.g_min, self.g_max];
        c.omega0_range = [self.omega0_min, self.omega0_max];
        c.tol_lambda = self.tol_lambda;
        c.tol_vector = self.tol_vector;
        c.rng_seed = self.seed;
        c.parity = self.parity.into();
        c
    }
}

#[derive(Clone, Debug)]
pub struct ModeList(pub Vec<EnvironmentMode>);

/// A count of unit modes with truncation 4, or a list `f:c:t,f:c:t`.
fn parse_modes(s: &str) -> std::result::Result<ModeList, String> {
    if let Ok(n) = s.trim().parse::<usize>() {
        return Ok(ModeList(vec![EnvironmentMode::unit(4); n]));
    }
    s.split(',').map(|m| m.parse().map_err(|e: Error| e.to_string())).collect::<std::result::Result<_, _>>().map(ModeList)
}

#[derive(Args, Debug, Clone)]
pub struct TrapArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value = "1", value_parser = parse_modes)]
    pub env_qubit_modes: ModeList,
    #[arg(long, default_value = "1", value_parser = parse_modes)]
    pub env_field_modes: ModeList,
    #[arg(long, default_value_t = 1)]
    pub photon: usize,
    #[arg(long, default_value_t = 8)]
    pub photon_truncation: usize,
    /// Real coherent amplitude added to the field's Fock state.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub displacement: f64,
    /// Final time in units of `1/ω`.
    #[arg(long, default_value_t = 50.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 201)]
    pub n_times: usize,
    #[arg(long)]
    pub outdir: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct MultiqubitArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 4)]
    pub n_qubits: usize,
    /// Pairs carrying the pair terms of the Hamiltonian, e.g. `0-1,2-3`.
    #[arg(long)]
    pub matching: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub photon: usize,
    #[arg(long, default_value_t = 4)]
    pub photon_truncation: usize,
    #[arg(long)]
    pub outdir: PathBuf,
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    argv: Vec<String>,
    library_version: &'static str,
    status: &'a str,
    results: Value,
}

struct Run {
    dir: PathBuf,
    command: &'static str,
    argv: Vec<String>,
}

impl Run {
    fn start(dir: &Path, command: &'static str, argv: &[OsString]) -> Result<Self> {
        if dir.exists() && fs::read_dir(dir)?.next().is_some() {
            return Err(Error::InvalidParameter(format!("output directory {} is not empty", dir.display())));
        }
        fs::create_dir_all(dir)?;
        let run = Run {
            dir: dir.to_path_buf(),
            command,
            argv: argv.iter().map(|a| a.to_string_lossy().into_owned()).collect(),
        };
        run.write("running", Value::Null)?;
        Ok(run)
    }

    fn write(&self, status: &str, results: Value) -> Result<()> {
        let m = Manifest {
            command: self.command,
            argv: self.argv.clone(),
            library_version: env!("CARGO_PKG_VERSION"),
            status,
            results,
        };
        serde_json::to_writer_pretty(BufWriter::new(fs::File::create(self.dir.join("manifest.json"))?), &m)?;
        Ok(())
    }

    fn file(&self, name: &str) -> Result<BufWriter<fs::File>> {
        Ok(BufWriter::new(fs::File::create(self.dir.join(name))?))
    }

    /// Run `body`, recording its outcome or error in the manifest.
    fn guard(&self, body: impl FnOnce(&Run) -> Result<(bool, Value)>) -> Result<bool> {
        match body(self) {
            Ok((passed, results)) => {
                self.write(if passed { "passed" } else { "failed" }, results)?;
                Ok(passed)
            }
            Err(e) => {
                self.write("error", json!({ "error": e.to_string() }))?;
                Err(e)
            }
        }
    }
}

fn is_usage(e: &Error) -> bool {
    matches!(
        e,
        Error::InvalidParameter(_)
            | Error::InvalidBasisSize(_)
            | Error::DrivingBreaksParity
            | Error::ModelMismatch(_)
            | Error::DimensionTooLarge { .. }
            | Error::OutsideTruncation { .. }
    )
}

fn converge_from(a: &SpectrumArgs) -> Result<ConvergedSpectrum> {
    let params = a.model.params();
    if params.has_driving() {
        return Err(Error::DrivingBreaksParity);
    }
    let mut opts = ConvergenceOptions::new(a.n_states);
    opts.tol_lambda = a.tol_lambda;
    opts.tol_vector = a.tol_vector;
    opts.s_max = a.s_max;
    eigensolver::converge(&params, a.parity.into(), &opts)
}

fn convergence_json(c: &ConvergedSpectrum) -> Value {
    json!({
        "params": c.params,
        "parity": c.parity,
        "final_size": c.final_size,
        "converged": c.converged,
        "n_converged": c.n_converged,
        "max_delta_lambda": c.max_delta_lambda(),
        "max_delta_vector": c.max_delta_vector(),
        "history": c.history,
    })
}

fn spectral(kind: &'static str, a: &SpectrumArgs, argv: &[OsString]) -> Result<bool> {
    Run::start(&a.outdir, kind, argv)?.guard(|run| spectral_body(kind, a, run))
}

fn spectral_body(kind: &str, a: &SpectrumArgs, run: &Run) -> Result<(bool, Value)> {
    let c = converge_from(a)?;
    eigensolver::write_spectrum_csv(run.file("spectrum.csv")?, &c)?;
    let mut results = json!({ "convergence": convergence_json(&c) });
    let mut passed = c.converged;

    let needs_diagnostics = a.emit_plot_data || matches!(kind, "entangle" | "classify");
    let diagnostics = if needs_diagnostics { Some(entanglement::diagnose(&c)?) } else { None };
    if let Some(d) = &diagnostics {
        if a.emit_plot_data {
            classify::write_plot_csv(run.file("plot.csv")?, &d[..c.n_converged])?;
        }
        if kind != "spectrum" {
            entanglement::write_diagnostics_csv(run.file("diagnostics.csv")?, d)?;
            results["positive_mandel_fraction"] = json!(entanglement::positive_mandel_fraction(&d[..c.n_converged]));
        }
    }

    match kind {
        "classify" => {
            let d = diagnostics.as_ref().expect("computed above");
            let report = classify::classify_spectrum(&c, d)?;
            classify::write_classes_csv(run.file("classes.csv")?, &report)?;
            let stats = classify::spacing_statistics(&report)?;
            let singlet = classify::singlet_statistics(&report);
            results["classes"] = json!({
                "singlet_class": report.singlet_class,
                "interleaving_broken": report.interleaving_broken,
                "spacing": stats,
                "singlet_spacing": singlet,
            });
            if let Some(s) = singlet {
                passed &= (s.mean - 2.0 * c.params.omega).abs() <= 1e-9;
            }
            println!("singlet class: {:?}, interleaving broken: {}", report.singlet_class, report.interleaving_broken);
            for (r, s) in stats.iter().enumerate() {
                println!("class 4n+{r}: mean spacing {:.9} std {:.3e} ({} spacings)", s.mean, s.std, s.count);
            }
            if let Some(s) = singlet {
                println!("singlet states: mean spacing {:.12} std {:.3e}", s.mean, s.std);
            }
        }
        "recurrence-check" => {
            let rows = recurrence::check_spectrum(&c)?;
            recurrence::write_residual_csv(run.file("residuals.csv")?, &rows)?;
            let summary = recurrence::summarize(&rows[..c.n_converged], recurrence::RESIDUAL_TOL);
            passed &= summary.pass_fraction >= 0.95;
            println!(
                "checked {} states, {} within {:e}, worst {:.3e}, {} pole-flagged, {} singlet",
                summary.checked, summary.within_tol, recurrence::RESIDUAL_TOL, summary.worst_residual,
                summary.pole_flagged, summary.singlet
            );
            results["recurrence"] = json!(summary);
        }
        _ => {
            println!(
                "{} states, S = {}, converged: {} (max δλ {:.3e}, max ΔV {:.3e})",
                c.spectrum.len(), c.final_size, c.converged, c.max_delta_lambda(), c.max_delta_vector()
            );
        }
    }
    Ok((passed, results))
}

fn sweep_cmd(a: &SweepArgs) -> Result<bool> {
    let config = a.config();
    let outcome = sweep::run_sweep(&config, &a.outdir, a.resume)?;
    let failed = outcome.manifest.samples.iter().filter(|s| !s.ok).count();
    if let Some(t) = &outcome.table {
        print!("{}", classify::format_table(std::slice::from_ref(t)));
    }
    println!("{} samples, {} failed", outcome.manifest.samples.len(), failed);
    Ok(failed == 0 && outcome.table.is_some())
}

fn trap_cmd(a: &TrapArgs, argv: &[OsString]) -> Result<bool> {
    Run::start(&a.outdir, "trap-sim", argv)?.guard(|run| trap_body(a, run))
}

fn trap_body(a: &TrapArgs, run: &Run) -> Result<(bool, Value)> {
    let params = a.model.params();
    let env = EnvironmentParams { qubit_modes: a.env_qubit_modes.0.clone(), field_modes: a.env_field_modes.0.clone() };
    let mut trap = TrappingState::new(a.photon, QubitFactor::for_model(params.model), &env);
    trap.field_displacement = num_complex::Complex64::new(a.displacement, 0.0);
    let times = dynamics::time_grid(a.t_max / params.omega, a.n_times);
    let trace = dynamics::trapping_fidelity(&params, &env, &trap, a.photon_truncation, &times)?;
    dynamics::write_fidelity_csv(run.file("fidelity.csv")?, &trace)?;
    let expect_trapped = params.model == Model::Dicke || params.drive_y == 0.0;
    let min = trace.min_fidelity();
    let fidelity_ok = if expect_trapped { min >= 1.0 - 1e-10 } else { min < 1.0 - 1e-3 };
    let unitary = trace.max_norm_error <= 1e-12 && trace.max_energy_error <= 1e-10;
    println!(
        "dimension {}, min qubit fidelity {:.12} (trap expected: {}), norm error {:.1e}, energy error {:.1e}",
        trace.dimension, min, expect_trapped, trace.max_norm_error, trace.max_energy_error
    );
    Ok((
        fidelity_ok && unitary,
        json!({
            "params": params,
            "environment": env,
            "trap": trap,
            "dimension": trace.dimension,
            "expect_trapped": expect_trapped,
            "min_fidelity": min,
            "max_norm_error": trace.max_norm_error,
            "max_energy_error": trace.max_energy_error,
        }),
    ))
}

fn multiqubit_cmd(a: &MultiqubitArgs, argv: &[OsString]) -> Result<bool> {
    if a.n_qubits == 0 || !a.n_qubits.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("--n-qubits must be even, got {}", a.n_qubits)));
    }
    Run::start(&a.outdir, "multiqubit-check", argv)?.guard(|_| multiqubit_body(a))
}

fn multiqubit_body(a: &MultiqubitArgs) -> Result<(bool, Value)> {
    let matching = match &a.matching {
        Some(m) => m.parse::<Matching>()?,
        None => Matching::sequential(a.n_qubits)?,
    };
    let report = dynamics::verify_multiqubit_traps(&a.model.params(), a.n_qubits, a.photon, a.photon_truncation, &matching)?;
    for c in &report.checks {
        println!(
            "{:<24} eigen residual {:.2e} (expected eigenstate: {})  |S_x| {:.1e} |S_y| {:.1e} |S_z| {:.1e}  {}",
            c.label, c.eigen_residual, c.expect_eigenstate, c.spin_norms[0], c.spin_norms[1], c.spin_norms[2],
            if c.passed { "ok" } else { "FAILED" }
        );
    }
    Ok((report.all_passed(), json!(report)))
}

fn dispatch(cli: &Cli, argv: &[OsString]) -> Result<bool> {
    match &cli.command {
        Command::Spectrum(a) => spectral("spectrum", a, argv),
        Command::Entangle(a) => spectral("entangle", a, argv),
        Command::Classify(a) => spectral("classify", a, argv),
        Command::RecurrenceCheck(a) => spectral("recurrence-check", a, argv),
        Command::Sweep(a) => sweep_cmd(a),
        Command::TrapSim(a) => trap_cmd(a, argv),
        Command::MultiqubitCheck(a) => multiqubit_cmd(a, argv),
    }
}

/// Parse `argv` and run; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(&cli, &argv) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            if is_usage(&e) {
                2
            } else {
                1
            }
        }
    }
}
