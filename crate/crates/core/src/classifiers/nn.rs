use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Classifier, Gallery, Polarity, ScoreSet};
use crate::error::{Error, Result};
use crate::transforms::FeatureVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    /// Sum of absolute differences.
    Mad,
    /// Sum of squared differences.
    Mse,
}

impl Metric {
    pub(crate) fn eval(self, x: &[f64], y: &[f64]) -> f64 {
        match self {
            Metric::Mad => x.iter().zip(y).map(|(a, b)| (a - b).abs()).sum(),
            Metric::Mse => x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum(),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Mad => "mad",
            Metric::Mse => "mse",
        })
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mad" => Ok(Metric::Mad),
            "mse" => Ok(Metric::Mse),
            other => Err(Error::arg(format!("unknown metric `{other}` (mad|mse)"))),
        }
    }
}

fn check_dims(x: &FeatureVector, y: &FeatureVector) -> Result<()> {
    if x.dim() != y.dim() {
        return Err(Error::arg(format!("dimension mismatch: {} vs {}", x.dim(), y.dim())));
    }
    Ok(())
}

pub fn mad(x: &FeatureVector, y: &FeatureVector) -> Result<f64> {
    check_dims(x, y)?;
    Ok(Metric::Mad.eval(&x.coeffs, &y.coeffs))
}

pub fn mse_dist(x: &FeatureVector, y: &FeatureVector) -> Result<f64> {
    check_dims(x, y)?;
    Ok(Metric::Mse.eval(&x.coeffs, &y.coeffs))
}

/// Nearest neighbour on raw features. A subject's score is its closest model.
pub fn nn_classify(probe: &FeatureVector, gallery: &Gallery, metric: Metric) -> Result<(u32, ScoreSet)> {
    if probe.dim() != gallery.dim() {
        return Err(Error::arg(format!(
            "probe dim {} does not match gallery dim {}",
            probe.dim(),
            gallery.dim()
        )));
    }
    let mut best = vec![f64::INFINITY; gallery.subjects().len()];
    for (v, &label) in gallery.vectors().iter().zip(gallery.labels()) {
        let d = metric.eval(&probe.coeffs, &v.coeffs);
        let c = gallery.class_index(label).expect("label is a gallery subject");
        if d < best[c] {
            best[c] = d;
        }
    }
    let scores = ScoreSet::new(best, gallery.subjects().to_vec(), Polarity::LowerIsBetter, format!("nn:{metric}"))?;
    Ok((scores.predicted(), scores))
}

/// Borrowing wrapper so nearest neighbour fits the [`Classifier`] trait.
#[derive(Debug, Clone, Copy)]
pub struct NnClassifier<'g> {
    pub gallery: &'g Gallery,
    pub metric: Metric,
}

impl Classifier for NnClassifier<'_> {
    fn scores(&self, probe: &FeatureVector) -> Result<ScoreSet> {
        nn_classify(probe, self.gallery, self.metric).map(|(_, s)| s)
    }
}
