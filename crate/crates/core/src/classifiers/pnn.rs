use serde::{Deserialize, Serialize};

use super::{radbas_bias, Classifier, Gallery, Normalizer, Polarity, Scaling, ScoreSet};
use crate::error::{Error, Result};
use crate::transforms::FeatureVector;

/// Probabilistic neural network: one Gaussian unit per gallery vector,
/// summed per class and normalized to posteriors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PnnModel {
    /// Normalized gallery vectors, one unit each.
    pub centers: Vec<Vec<f64>>,
    /// Class position of each center in `subjects`.
    pub classes: Vec<usize>,
    pub subjects: Vec<u32>,
    pub spread: f64,
    pub normalizer: Normalizer,
}

impl PnnModel {
    pub fn new(gallery: &Gallery, spread: f64) -> Result<Self> {
        if !(spread > 0.0 && spread.is_finite()) {
            return Err(Error::arg(format!("spread must be > 0, got {spread}")));
        }
        let normalizer = gallery.normalizer(Scaling::ZScoreRms);
        let centers = gallery
            .vectors()
            .iter()
            .map(|v| normalizer.apply(&v.coeffs))
            .collect::<Result<Vec<_>>>()?;
        let classes = gallery
            .labels()
            .iter()
            .map(|&l| gallery.class_index(l).expect("label is a gallery subject"))
            .collect();
        Ok(PnnModel {
            centers,
            classes,
            subjects: gallery.subjects().to_vec(),
            spread,
            normalizer,
        })
    }

    /// Same model with a different spread, reusing the normalized centers.
    pub fn with_spread(&self, spread: f64) -> Result<Self> {
        if !(spread > 0.0 && spread.is_finite()) {
            return Err(Error::arg(format!("spread must be > 0, got {spread}")));
        }
        Ok(PnnModel { spread, ..self.clone() })
    }

    /// Class posteriors.
    ///
    /// Exponents are shifted by their maximum before exponentiating, so the
    /// closest unit contributes exactly 1 and the class sums never all
    /// underflow. As the spread shrinks this degrades gracefully into
    /// nearest neighbour on Euclidean distance.
    pub fn scores(&self, probe: &FeatureVector) -> Result<ScoreSet> {
        let x = self.normalizer.apply(&probe.coeffs)?;
        let b2 = radbas_bias(self.spread).powi(2);
        let exps: Vec<f64> = self
            .centers
            .iter()
            .map(|c| -b2 * c.iter().zip(&x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
            .collect();
        let top = exps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !top.is_finite() {
            return Err(Error::arg("probe produced non-finite PNN activations"));
        }
        let mut sums = vec![0.0; self.subjects.len()];
        for (&e, &c) in exps.iter().zip(&self.classes) {
            sums[c] += (e - top).exp();
        }
        let total: f64 = sums.iter().sum();
        let probs = sums.iter().map(|s| s / total).collect();
        ScoreSet::new(probs, self.subjects.clone(), Polarity::HigherIsBetter, "pnn")
    }
}

pub fn pnn_classify(model: &PnnModel, probe: &FeatureVector) -> Result<(u32, ScoreSet)> {
    let s = model.scores(probe)?;
    Ok((s.predicted(), s))
}

impl Classifier for PnnModel {
    fn scores(&self, probe: &FeatureVector) -> Result<ScoreSet> {
        PnnModel::scores(self, probe)
    }
}
