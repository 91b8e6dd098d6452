//! Parameter ensembles: deterministic sampling, parallel per-sample
//! pipelines, resumable on-disk results and the aggregate spacing table.
//!
//! Layout of an output directory:
//!
//! ```text
//! manifest.json
//! samples/<k>/spectrum.csv
//! samples/<k>/diagnostics.csv
//! samples/<k>/classes.csv
//! samples/<k>/sample.json
//! table1.csv
//! table1.txt
//! ```

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{self, SampleStats, SpacingTable};
use crate::eigensolver::{self, ConvergenceOptions};
use crate::entanglement;
use crate::error::{Error, Result};
use crate::hamiltonian::ModelParams;
use crate::hilbert::Parity;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    /// Evenly spaced `g`, `ω₀ = ω`.
    OnResonanceGrid,
    /// Uniform random `g` and `ω₀`.
    OffResonanceRandom,
}

impl SweepMode {
    pub fn ensemble_name(self) -> &'static str {
        match self {
            SweepMode::OnResonanceGrid => "on_resonance",
            SweepMode::OffResonanceRandom => "off_resonance",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub mode: SweepMode,
    pub n_samples: usize,
    pub omega: f64,
    /// In units of `ω`.
    pub g_range: [f64; 2],
    /// In units of `ω`; random mode only.
    pub omega0_range: [f64; 2],
    pub n_states: usize,
    pub tol_lambda: f64,
    pub tol_vector: f64,
    pub rng_seed: u64,
    pub parity: Parity,
}

impl SweepConfig {
    pub fn new(mode: SweepMode, n_samples: usize, n_states: usize) -> Self {
        SweepConfig {
            mode,
            n_samples,
            omega: 1.0,
            g_range: [0.05, 5.0],
            omega0_range: [0.5, 1.5],
            n_states,
            tol_lambda: 1e-10,
            tol_vector: 1e-10,
            rng_seed: 0,
            parity: Parity::Positive,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.n_samples == 0 {
            return bad("n_samples must be at least 1".into());
        }
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return bad(format!("omega must be positive, got {}", self.omega));
        }
        for (name, [lo, hi]) in [("g_range", self.g_range), ("omega0_range", self.omega0_range)] {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return bad(format!("{name} [{lo}, {hi}] is not an ordered finite range"));
            }
        }
        if self.g_range[0] < 0.0 || self.omega0_range[0] <= 0.0 {
            return bad("g must be non-negative and omega0 positive".into());
        }
        self.convergence_options().validate()
    }

    pub fn convergence_options(&self) -> ConvergenceOptions {
        let mut o = ConvergenceOptions::new(self.n_states);
        o.tol_lambda = self.tol_lambda;
        o.tol_vector = self.tol_vector;
        o
    }
}

/// Parameters of every sample, in sample order.
pub fn sample_parameters(config: &SweepConfig) -> Result<Vec<ModelParams>> {
    config.validate()?;
    let w = config.omega;
    let [g_lo, g_hi] = config.g_range;
    let [o_lo, o_hi] = config.omega0_range;
    let n = config.n_samples;
    Ok((0..n)
        .map(|k| match config.mode {
            SweepMode::OnResonanceGrid => {
                let g = if n == 1 { g_lo } else { g_lo + (g_hi - g_lo) * k as f64 / (n - 1) as f64 };
                ModelParams::dicke(w, w, g * w)
            }
            SweepMode::OffResonanceRandom => {
                let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
                rng.set_stream(k as u64);
                let g = g_lo + (g_hi - g_lo) * rng.gen::<f64>();
                let o = o_lo + (o_hi - o_lo) * rng.gen::<f64>();
                ModelParams::dicke(w, o * w, g * w)
            }
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub index: usize,
    pub params: ModelParams,
    pub ok: bool,
    pub error: Option<String>,
    pub final_size: Option<usize>,
    pub converged: bool,
    pub n_converged: usize,
    pub wall_time_s: f64,
    pub stats: Option<SampleStats>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: SweepConfig,
    pub library_version: String,
    pub complete: bool,
    pub samples: Vec<SampleRecord>,
}

pub struct SweepOutcome {
    pub manifest: RunManifest,
    /// `None` when fewer than two samples succeeded.
    pub table: Option<SpacingTable>,
}

pub fn sample_dir(outdir: &Path, k: usize) -> PathBuf {
    outdir.join("samples").join(k.to_string())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let tmp = path.with_extension("json.tmp");
    serde_json::to_writer_pretty(BufWriter::new(fs::File::create(&tmp)?), value)?;
    fs::rename(tmp, path)?;
    Ok(())
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    Ok(serde_json::from_reader(std::io::BufReader::new(fs::File::open(path)?))?)
}

fn run_sample(config: &SweepConfig, index: usize, params: ModelParams, dir: &Path) -> Result<SampleRecord> {
    let start = Instant::now();
    fs::create_dir_all(dir)?;
    let c = eigensolver::converge(&params, config.parity, &config.convergence_options())?;
    let diagnostics = entanglement::diagnose(&c)?;
    let report = classify::classify_spectrum(&c, &diagnostics)?;
    let stats = SampleStats::from_report(&report)?;
    eigensolver::write_spectrum_csv(BufWriter::new(fs::File::create(dir.join("spectrum.csv"))?), &c)?;
    entanglement::write_diagnostics_csv(BufWriter::new(fs::File::create(dir.join("diagnostics.csv"))?), &diagnostics)?;
    classify::write_classes_csv(BufWriter::new(fs::File::create(dir.join("classes.csv"))?), &report)?;
    Ok(SampleRecord {
        index,
        params,
        ok: true,
        error: None,
        final_size: Some(c.final_size),
        converged: c.converged,
        n_converged: c.n_converged,
        wall_time_s: start.elapsed().as_secs_f64(),
        stats: Some(stats),
    })
}

fn dir_is_empty(path: &Path) -> Result<bool> {
    Ok(!path.exists() || fs::read_dir(path)?.next().is_none())
}

/// Run every sample of `config` under `outdir`.
///
/// A non-empty `outdir` is refused unless `resume` is set, in which case its
/// manifest must hold the same configuration and samples with a finished
/// `sample.json` are kept as they are.
pub fn run_sweep(config: &SweepConfig, outdir: &Path, resume: bool) -> Result<SweepOutcome> {
    let params = sample_parameters(config)?;
    let manifest_path = outdir.join("manifest.json");
    if !dir_is_empty(outdir)? {
        if !resume {
            return Err(Error::InvalidParameter(format!(
                "output directory {} is not empty (use resume)",
                outdir.display()
            )));
        }
        let previous: RunManifest = read_json(&manifest_path)?;
        if previous.config != *config {
            return Err(Error::InvalidParameter(format!(
                "configuration differs from the manifest in {}",
                outdir.display()
            )));
        }
    }
    fs::create_dir_all(outdir.join("samples"))?;
    let mut manifest = RunManifest {
        config: config.clone(),
        library_version: env!("CARGO_PKG_VERSION").to_string(),
        complete: false,
        samples: Vec::new(),
    };
    write_json(&manifest_path, &manifest)?;

    let records: Vec<SampleRecord> = params
        .par_iter()
        .enumerate()
        .map(|(k, &p)| {
            let dir = sample_dir(outdir, k);
            let record_path = dir.join("sample.json");
            if resume {
                if let Ok(done) = read_json::<SampleRecord>(&record_path) {
                    if done.params == p {
                        return done;
                    }
                }
            }
            let record = run_sample(config, k, p, &dir).unwrap_or_else(|e| SampleRecord {
                index: k,
                params: p,
                ok: false,
                error: Some(e.to_string()),
                final_size: None,
                converged: false,
                n_converged: 0,
                wall_time_s: 0.0,
                stats: None,
            });
            let _ = fs::create_dir_all(&dir).and_then(|_| {
                write_json(&record_path, &record).map_err(|e| std::io::Error::other(e.to_string()))
            });
            record
        })
        .collect();

    let stats: Vec<SampleStats> = records.iter().filter_map(|r| r.stats.clone()).collect();
    let table = if stats.len() >= 2 {
        let t = classify::aggregate_sweep(config.mode.ensemble_name(), &stats)?;
        classify::write_table_csv(BufWriter::new(fs::File::create(outdir.join("table1.csv"))?), std::slice::from_ref(&t))?;
        fs::write(outdir.join("table1.txt"), classify::format_table(std::slice::from_ref(&t)))?;
        Some(t)
    } else {
        None
    };
    manifest.samples = records;
    manifest.complete = true;
    write_json(&manifest_path, &manifest)?;
    Ok(SweepOutcome { manifest, table })
}
