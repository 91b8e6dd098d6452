//! Four interleaved spectral classes, their spacing statistics and sweep
//! aggregation.
//!
//! Class `r` holds the converged states with index `≡ r (mod 4)` (0-based).
//! One class is normally the singlet branch; which one depends on the
//! parameters, so it is detected from per-state singlet weights.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::csvio;
use crate::eigensolver::ConvergedSpectrum;
use crate::entanglement::StateDiagnostics;
use crate::error::{Error, Result};
use crate::hilbert::{Parity, QubitLabel};

pub const SINGLET_WEIGHT_TOL: f64 = 1e-8;
/// Fraction of the top converged states left out of spacing statistics.
pub const TAIL_FRACTION: f64 = 0.1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralClassReport {
    pub n_states: usize,
    /// `(index, eigenvalue)` per residue class.
    pub class_members: [Vec<(usize, f64)>; 4],
    /// Residue class whose members from the first singlet on are exactly the
    /// singlet states.
    pub singlet_class: Option<usize>,
    /// Per-state singlet identification.
    pub singlet_members: Vec<(usize, f64)>,
    /// No residue class coincides with the singlet set, or the spectrum has
    /// degenerate clusters.
    pub interleaving_broken: bool,
    /// `λ_{m+4} − λ_m` within each class.
    pub spacings: [Vec<f64>; 4],
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassStats {
    pub mean: f64,
    pub std: f64,
    pub count: usize,
}

fn is_singlet(d: &StateDiagnostics, c: &ConvergedSpectrum) -> bool {
    if d.singlet_weight >= 1.0 - SINGLET_WEIGHT_TOL {
        return true;
    }
    // fallback: maximal concurrence on the analytic singlet ladder
    let shifted = (d.eigenvalue + c.params.dipole_sum() / 4.0) / c.params.omega;
    let n = shifted.round();
    n >= 0.0
        && (shifted - n).abs() * c.params.omega <= 1e-8
        && Parity::of(n as usize, QubitLabel::Ge) == c.parity
        && (d.concurrence - 1.0).abs() <= 1e-8
}

pub fn classify_spectrum(
    c: &ConvergedSpectrum,
    diagnostics: &[StateDiagnostics],
) -> Result<SpectralClassReport> {
    let n = c.n_converged;
    if n < 16 {
        return Err(Error::Insufficient(format!("{n} converged states, need at least 16")));
    }
    if diagnostics.len() < n {
        return Err(Error::Insufficient(format!(
            "{} diagnostics for {n} converged states",
            diagnostics.len()
        )));
    }
    let values = &c.spectrum.eigenvalues[..n];
    let mut class_members: [Vec<(usize, f64)>; 4] = Default::default();
    for (k, &v) in values.iter().enumerate() {
        class_members[k % 4].push((k, v));
    }
    let spacings = class_members
        .clone()
        .map(|m| m.windows(2).map(|w| w[1].1 - w[0].1).collect());

    let singlet_members: Vec<(usize, f64)> = diagnostics[..n]
        .iter()
        .filter(|d| is_singlet(d, c))
        .map(|d| (d.index, d.eigenvalue))
        .collect();
    let singlet_class = singlet_members.first().and_then(|&(first, _)| {
        let r = first % 4;
        let tail: Vec<(usize, f64)> = class_members[r].iter().copied().filter(|m| m.0 >= first).collect();
        (tail == singlet_members).then_some(r)
    });
    let degenerate = c.degenerate[..n].iter().any(|&d| d);

    Ok(SpectralClassReport {
        n_states: n,
        class_members,
        singlet_class,
        singlet_members,
        interleaving_broken: singlet_class.is_none() || degenerate,
        spacings,
    })
}

fn stats(values: &[f64]) -> ClassStats {
    let count = values.len();
    let mean = values.iter().sum::<f64>() / count as f64;
    let var = if count > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1) as f64
    } else {
        0.0
    };
    ClassStats { mean, std: var.sqrt(), count }
}

fn trusted_spacings(members: &[(usize, f64)], cutoff: usize) -> Vec<f64> {
    let kept: Vec<f64> = members.iter().filter(|(k, _)| *k < cutoff).map(|m| m.1).collect();
    kept.windows(2).map(|w| w[1] - w[0]).collect()
}

fn tail_cutoff(n: usize) -> usize {
    n - (TAIL_FRACTION * n as f64).floor() as usize
}

/// Mean and standard deviation of the within-class spacings, leaving out the
/// top 10% of converged states.
pub fn spacing_statistics(report: &SpectralClassReport) -> Result<[ClassStats; 4]> {
    let cutoff = tail_cutoff(report.n_states);
    let mut out = [ClassStats { mean: 0.0, std: 0.0, count: 0 }; 4];
    for (r, members) in report.class_members.iter().enumerate() {
        let s = trusted_spacings(members, cutoff);
        if s.len() + 1 < 4 {
            return Err(Error::Insufficient(format!("class {r} has fewer than 4 trusted members")));
        }
        out[r] = stats(&s);
    }
    Ok(out)
}

/// Spacing statistics of the per-state singlet set.
pub fn singlet_statistics(report: &SpectralClassReport) -> Option<ClassStats> {
    let s = trusted_spacings(&report.singlet_members, tail_cutoff(report.n_states));
    (s.len() >= 3).then(|| stats(&s))
}

/// What a sweep keeps of each sample for the aggregate table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleStats {
    pub classes: [ClassStats; 4],
    pub singlet: Option<ClassStats>,
    pub singlet_class: Option<usize>,
    pub interleaving_broken: bool,
}

impl SampleStats {
    pub fn from_report(report: &SpectralClassReport) -> Result<Self> {
        Ok(SampleStats {
            classes: spacing_statistics(report)?,
            singlet: singlet_statistics(report),
            singlet_class: report.singlet_class,
            interleaving_broken: report.interleaving_broken,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    /// `"4n+0"` … `"4n+3"` or `"singlet"`.
    pub class: String,
    /// Mean over samples of the per-sample mean spacing.
    pub mean: f64,
    /// Standard deviation over samples of the per-sample mean spacing.
    pub dispersion: f64,
    /// Mean over samples of the within-sample standard deviation.
    pub within_std: f64,
    pub n_samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpacingTable {
    pub ensemble: String,
    pub rows: Vec<TableRow>,
    pub broken_samples: usize,
}

/// Table of class spacings over a sample ensemble: one row per residue class
/// plus a singlet row.
pub fn aggregate_sweep(ensemble: &str, samples: &[SampleStats]) -> Result<SpacingTable> {
    if samples.len() < 2 {
        return Err(Error::Insufficient(format!("{} samples, need at least 2", samples.len())));
    }
    let row = |class: String, per: Vec<ClassStats>| {
        let means: Vec<f64> = per.iter().map(|s| s.mean).collect();
        let spread = stats(&means);
        TableRow {
            class,
            mean: spread.mean,
            dispersion: spread.std,
            within_std: per.iter().map(|s| s.std).sum::<f64>() / per.len().max(1) as f64,
            n_samples: per.len(),
        }
    };
    let mut rows: Vec<TableRow> = (0..4)
        .map(|r| row(format!("4n+{r}"), samples.iter().map(|s| s.classes[r]).collect()))
        .collect();
    let singlets: Vec<ClassStats> = samples.iter().filter_map(|s| s.singlet).collect();
    if !singlets.is_empty() {
        rows.push(row("singlet".into(), singlets));
    }
    Ok(SpacingTable {
        ensemble: ensemble.to_string(),
        rows,
        broken_samples: samples.iter().filter(|s| s.interleaving_broken).count(),
    })
}

/// Columns `ensemble, class, mean, dispersion, within_std, n_samples`.
pub fn write_table_csv<W: Write>(out: W, tables: &[SpacingTable]) -> Result<()> {
    let mut w = csvio::writer_from(out, &["ensemble", "class", "mean", "dispersion", "within_std", "n_samples"])?;
    for t in tables {
        for r in &t.rows {
            w.write_record([
                t.ensemble.clone(),
                r.class.clone(),
                csvio::num(r.mean),
                csvio::num(r.dispersion),
                csvio::num(r.within_std),
                r.n_samples.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn format_table(tables: &[SpacingTable]) -> String {
    let mut s = String::new();
    for t in tables {
        s.push_str(&format!("{} ({} samples with broken interleaving)\n", t.ensemble, t.broken_samples));
        s.push_str(&format!("  {:<10} {:>12} {:>14} {:>14} {:>8}\n", "class", "mean", "dispersion", "within std", "samples"));
        for r in &t.rows {
            s.push_str(&format!(
                "  {:<10} {:>12.6} {:>14.6e} {:>14.6e} {:>8}\n",
                r.class, r.mean, r.dispersion, r.within_std, r.n_samples
            ));
        }
    }
    s
}

/// Columns `index, residue, singlet` for each converged state.
pub fn write_classes_csv<W: Write>(out: W, report: &SpectralClassReport) -> Result<()> {
    let mut w = csvio::writer_from(out, &["index", "eigenvalue", "class_id", "singlet"])?;
    let singlets: std::collections::HashSet<usize> = report.singlet_members.iter().map(|m| m.0).collect();
    let mut all: Vec<(usize, f64)> = report.class_members.iter().flatten().copied().collect();
    all.sort_by_key(|m| m.0);
    for (k, v) in all {
        w.write_record([k.to_string(), csvio::num(v), (k % 4).to_string(), singlets.contains(&k).to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Scatter data: `eigenvalue, concurrence, mutual_information, class_id`.
pub fn write_plot_csv<W: Write>(out: W, diagnostics: &[StateDiagnostics]) -> Result<()> {
    let mut w = csvio::writer_from(out, &["eigenvalue", "concurrence", "mutual_information", "class_id"])?;
    for d in diagnostics {
        w.write_record([
            csvio::num(d.eigenvalue),
            csvio::num(d.concurrence),
            csvio::num(d.mutual_information),
            (d.index % 4).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
