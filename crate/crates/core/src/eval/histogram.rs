//! Genuine/impostor score distributions.

use serde::{Deserialize, Serialize};

use crate::classifiers::{mad, mse_dist, Metric};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::transforms::FeatureVector;

/// Method-of-moments normal fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianFit {
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator); 0 for a single value.
    pub std: f64,
}

impl GaussianFit {
    fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Some(GaussianFit { mean, std })
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if self.std == 0.0 {
            return if x == self.mean { f64::INFINITY } else { 0.0 };
        }
        let z = (x - self.mean) / self.std;
        (-0.5 * z * z).exp() / (self.std * (2.0 * std::f64::consts::PI).sqrt())
    }
}

/// Counts over shared, equal-width bins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    /// `bins + 1` edges.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramPair {
    pub intra: Vec<f64>,
    pub inter: Vec<f64>,
    pub intra_fit: Option<GaussianFit>,
    pub inter_fit: Option<GaussianFit>,
    pub intra_hist: Histogram,
    pub inter_hist: Histogram,
}

impl HistogramPair {
    /// Shared area of the two normalized histograms, in `[0, 1]`.
    pub fn overlap(&self) -> f64 {
        if self.intra.is_empty() || self.inter.is_empty() {
            return 0.0;
        }
        let (ni, ne) = (self.intra.len() as f64, self.inter.len() as f64);
        self.intra_hist
            .counts
            .iter()
            .zip(&self.inter_hist.counts)
            .map(|(&a, &b)| (a as f64 / ni).min(b as f64 / ne))
            .sum()
    }
}

fn bin_counts(values: &[f64], edges: &[f64]) -> Vec<usize> {
    let bins = edges.len() - 1;
    let (lo, hi) = (edges[0], edges[bins]);
    let mut counts = vec![0; bins];
    for &v in values {
        let b = if hi > lo {
            (((v - lo) / (hi - lo)) * bins as f64).floor() as usize
        } else {
            0
        };
        counts[b.min(bins - 1)] += 1;
    }
    counts
}

/// Split a probe-by-model score matrix into genuine (same subject) and
/// impostor comparisons, fit a normal to each and bin both on common edges.
pub fn distance_histograms(
    scores: &[Vec<f64>],
    probe_labels: &[u32],
    model_labels: &[u32],
    bins: usize,
) -> Result<HistogramPair> {
    if scores.is_empty() || model_labels.is_empty() {
        return Err(Error::arg("empty score matrix"));
    }
    if bins == 0 {
        return Err(Error::arg("histogram needs at least one bin"));
    }
    if scores.len() != probe_labels.len() || scores.iter().any(|r| r.len() != model_labels.len()) {
        return Err(Error::arg("score matrix shape does not match the labels"));
    }
    let mut intra = Vec::new();
    let mut inter = Vec::new();
    for (row, &truth) in scores.iter().zip(probe_labels) {
        for (&v, &model) in row.iter().zip(model_labels) {
            if !v.is_finite() {
                return Err(Error::arg(format!("non-finite score {v}")));
            }
            if model == truth {
                intra.push(v);
            } else {
                inter.push(v);
            }
        }
    }
    let all = intra.iter().chain(&inter);
    let lo = all.clone().copied().fold(f64::INFINITY, f64::min);
    let hi = all.copied().fold(f64::NEG_INFINITY, f64::max);
    let edges: Vec<f64> = (0..=bins)
        .map(|i| if i == bins { hi } else { lo + (hi - lo) * i as f64 / bins as f64 })
        .collect();
    Ok(HistogramPair {
        intra_fit: GaussianFit::of(&intra),
        inter_fit: GaussianFit::of(&inter),
        intra_hist: Histogram {
            counts: bin_counts(&intra, &edges),
            edges: edges.clone(),
        },
        inter_hist: Histogram {
            counts: bin_counts(&inter, &edges),
            edges,
        },
        intra,
        inter,
    })
}

/// Distance from every probe to every gallery vector.
pub fn pairwise_distances(
    gallery: &[FeatureVector],
    probes: &[FeatureVector],
    metric: Metric,
    exec: Execution,
) -> Result<Vec<Vec<f64>>> {
    exec::try_map(exec, probes, |p| gallery
            .iter()
            .map(|g| match metric {
                Metric::Mad => mad(p, g),
                Metric::Mse => mse_dist(p, g),
            })
            .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separated_sets_do_not_overlap() {
        let scores = vec![vec![0.0, 9.0, 10.0], vec![9.5, 1.0, 9.8]];
        let h = distance_histograms(&scores, &[1, 2], &[1, 2, 3], 10).unwrap();
        assert_eq!(h.intra, vec![0.0, 1.0]);
        assert_eq!(h.inter.len(), 4);
        assert_eq!(h.overlap(), 0.0);
        assert_eq!(h.intra_hist.counts.iter().sum::<usize>(), 2);
        assert_eq!(h.inter_hist.counts.iter().sum::<usize>(), 4);
        let fit = h.intra_fit.unwrap();
        assert_eq!(fit.mean, 0.5);
        assert!((fit.std - 0.5f64.sqrt()).abs() < 1e-15);

        let same = distance_histograms(&[vec![1.0, 1.0]], &[1], &[1, 2], 4).unwrap();
        assert_eq!(same.overlap(), 1.0);
    }

    #[test]
    fn orl_protocol_counts() {
        // One probe against 5 gallery images of each of 40 subjects.
        let models: Vec<u32> = (1..=40).flat_map(|s| [s; 5]).collect();
        let row: Vec<f64> = (0..200).map(|i| i as f64).collect();
        let h = distance_histograms(&[row], &[7], &models, 20).unwrap();
        assert_eq!((h.intra.len(), h.inter.len()), (5, 195));
    }

    #[test]
    fn absent_fit_and_errors() {
        let h = distance_histograms(&[vec![0.3]], &[1], &[2], 3).unwrap();
        assert!(h.intra_fit.is_none());
        assert_eq!(h.inter_fit.unwrap().std, 0.0);
        assert!(distance_histograms(&[], &[], &[1], 3).is_err());
        assert!(distance_histograms(&[vec![0.0]], &[1], &[1, 2], 3).is_err());
        assert!(distance_histograms(&[vec![f64::NAN]], &[1], &[1], 3).is_err());
    }

    #[test]
    fn gaussian_pdf_peak() {
        let g = GaussianFit { mean: 0.0, std: 1.0 };
        assert!((g.pdf(0.0) - 0.398_942_280_401_432_7).abs() < 1e-15);
    }
}
