//! CSV exports and the JSON run manifest that accompanies them.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CurvePoint, ExperimentResult, HistogramPair, Table1Row};
use crate::dataset::Corpus;
use crate::error::{Error, Result};

fn io_err(e: std::io::Error) -> Error {
    Error::io("<output>", e)
}

fn probe_id(subject: u32, sample: u32) -> String {
    format!("s{subject}/{sample}")
}

/// `probe,subject_true,subject_pred,score`, one row per probe.
pub fn write_predictions_csv<W: Write>(mut out: W, result: &ExperimentResult) -> Result<()> {
    writeln!(out, "probe,subject_true,subject_pred,score").map_err(io_err)?;
    for o in &result.outcomes {
        writeln!(out, "{},{},{},{}", probe_id(o.subject, o.sample), o.subject, o.predicted, o.score).map_err(io_err)?;
    }
    Ok(())
}

/// Same layout as the predictions file, with the fused score column name.
pub fn write_fusion_csv<W: Write>(mut out: W, result: &ExperimentResult) -> Result<()> {
    writeln!(out, "probe,subject_true,subject_pred,fused_score").map_err(io_err)?;
    for o in &result.outcomes {
        writeln!(out, "{},{},{},{}", probe_id(o.subject, o.sample), o.subject, o.predicted, o.score).map_err(io_err)?;
    }
    Ok(())
}

/// `<x_name>,dim,rate` with rates to one decimal.
pub fn write_curve_csv<W: Write>(mut out: W, x_name: &str, curve: &[CurvePoint]) -> Result<()> {
    writeln!(out, "{x_name},dim,rate").map_err(io_err)?;
    for p in curve {
        writeln!(out, "{},{},{:.1}", p.x, p.dim, p.rate).map_err(io_err)?;
    }
    Ok(())
}

pub fn write_table1_csv<W: Write>(mut out: W, rows: &[Table1Row]) -> Result<()> {
    writeln!(out, "feature,dim,used_dim,classifier,reference_rate,measured_rate,spread").map_err(io_err)?;
    for r in rows {
        let spread = r.spread.map(|s| s.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{:.1},{:.1},{}",
            r.feature, r.dim, r.used_dim, r.classifier, r.reference, r.measured, spread
        )
        .map_err(io_err)?;
    }
    Ok(())
}

/// One row per bin with both counts and each fitted density at the bin
/// centre (blank when the set was empty).
pub fn write_histogram_csv<W: Write>(mut out: W, h: &HistogramPair) -> Result<()> {
    writeln!(out, "bin_lo,bin_hi,intra_count,inter_count,intra_fit_density,inter_fit_density").map_err(io_err)?;
    let edges = &h.intra_hist.edges;
    for b in 0..h.intra_hist.counts.len() {
        let centre = 0.5 * (edges[b] + edges[b + 1]);
        let density = |fit: Option<super::GaussianFit>| fit.map(|f| f.pdf(centre).to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{}",
            edges[b],
            edges[b + 1],
            h.intra_hist.counts[b],
            h.inter_hist.counts[b],
            density(h.intra_fit),
            density(h.inter_fit)
        )
        .map_err(io_err)?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetInfo {
    /// Directory, manifest path or synthetic spec the corpus came from.
    pub source: String,
    /// SHA-256 over the decoded pixels and labels.
    pub checksum: String,
    pub images: usize,
    pub subjects: usize,
    pub samples_per_subject: usize,
    pub rows: usize,
    pub cols: usize,
}

impl DatasetInfo {
    pub fn of(corpus: &Corpus, source: impl Into<String>) -> Self {
        let (rows, cols) = corpus.dims();
        DatasetInfo {
            source: source.into(),
            checksum: corpus.checksum(),
            images: corpus.images().len(),
            subjects: corpus.n_subjects(),
            samples_per_subject: corpus.samples_per_subject(),
            rows,
            cols,
        }
    }
}

/// Everything needed to rerun a command. Runtime lives here and nowhere
/// else, so result CSVs stay byte-identical across runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub config: serde_json::Value,
    pub dataset: DatasetInfo,
    /// Extra results worth keeping in machine-readable form.
    #[serde(default)]
    pub results: serde_json::Value,
    pub outputs: Vec<String>,
    pub runtime_secs: f64,
}

impl RunManifest {
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}
