//! Nearest neighbour (MAD/MSE), MLP trained by scaled conjugate gradient,
//! probabilistic neural network and incrementally grown RBF network.
//!
//! Every classifier emits a [`ScoreSet`] with one score per gallery subject;
//! the prediction is the best score, ties going to the lowest subject id.

mod mlp;
mod nn;
mod pnn;
mod rbf;
mod scg;

pub use mlp::{mlp_gradient, mlp_scores, mlp_train, MlpBatch, MlpConfig, MlpModel, Network};
pub use nn::{mad, mse_dist, nn_classify, Metric, NnClassifier};
pub use pnn::{pnn_classify, PnnModel};
pub use rbf::{rbf_scores, rbf_train, RbfModel};
pub use scg::{ScgConfig, ScgReport};

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::transforms::FeatureVector;

/// Floor applied to per-dimension standard deviations.
pub const STD_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Polarity {
    HigherIsBetter,
    LowerIsBetter,
}

/// Per-subject scores from one classifier for one probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreSet {
    pub scores: Vec<f64>,
    /// Subject id of each score, ascending.
    pub subjects: Vec<u32>,
    pub polarity: Polarity,
    pub classifier: String,
}

impl ScoreSet {
    pub fn new(
        scores: Vec<f64>,
        subjects: Vec<u32>,
        polarity: Polarity,
        classifier: impl Into<String>,
    ) -> Result<Self> {
        if scores.len() != subjects.len() || scores.is_empty() {
            return Err(Error::arg("score set needs one score per subject"));
        }
        if let Some(s) = scores.iter().find(|s| !s.is_finite()) {
            return Err(Error::arg(format!("non-finite score {s}")));
        }
        Ok(ScoreSet {
            scores,
            subjects,
            polarity,
            classifier: classifier.into(),
        })
    }

    /// Position of the best score; ties resolve to the first (lowest id).
    pub fn best_index(&self) -> usize {
        let better = |a: f64, b: f64| match self.polarity {
            Polarity::HigherIsBetter => a > b,
            Polarity::LowerIsBetter => a < b,
        };
        let mut best = 0;
        for (i, &s) in self.scores.iter().enumerate().skip(1) {
            if better(s, self.scores[best]) {
                best = i;
            }
        }
        best
    }

    pub fn predicted(&self) -> u32 {
        self.subjects[self.best_index()]
    }

    pub fn score_of(&self, subject: u32) -> Option<f64> {
        self.subjects.iter().position(|&s| s == subject).map(|i| self.scores[i])
    }
}

/// Anything that scores a probe against the enrolled subjects.
pub trait Classifier: Sync {
    fn scores(&self, probe: &FeatureVector) -> Result<ScoreSet>;

    fn classify(&self, probe: &FeatureVector) -> Result<(u32, ScoreSet)> {
        let s = self.scores(probe)?;
        Ok((s.predicted(), s))
    }
}

/// How network inputs are standardized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scaling {
    /// Per-dimension z-score.
    ZScore,
    /// Per-dimension z-score divided by `sqrt(dim)`, so the expected squared
    /// distance between two independent vectors is 2 whatever the dimension.
    ZScoreRms,
}

/// Per-dimension affine standardization fitted on the gallery.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub scale: f64,
}

impl Normalizer {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(Error::arg(format!(
                "probe dim {} does not match gallery dim {}",
                x.len(),
                self.dim()
            )));
        }
        Ok(x.iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(v, (m, s))| (v - m) / s * self.scale)
            .collect())
    }
}

/// Labeled training vectors plus their normalization statistics.
#[derive(Debug, Clone)]
pub struct Gallery {
    vectors: Vec<FeatureVector>,
    labels: Vec<u32>,
    subjects: Vec<u32>,
    mean: Vec<f64>,
    std: Vec<f64>,
}

impl Gallery {
    pub fn new(vectors: Vec<FeatureVector>) -> Result<Self> {
        let dim = vectors
            .first()
            .ok_or_else(|| Error::arg("gallery must not be empty"))?
            .dim();
        if vectors.iter().any(|v| v.dim() != dim) {
            return Err(Error::arg("gallery vectors must share a dimension"));
        }
        let labels = vectors
            .iter()
            .map(|v| v.subject.ok_or_else(|| Error::arg("gallery vectors must be labeled")))
            .collect::<Result<Vec<u32>>>()?;
        let subjects: Vec<u32> = labels.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();

        let n = vectors.len() as f64;
        let mut mean = vec![0.0; dim];
        for v in &vectors {
            for (m, x) in mean.iter_mut().zip(&v.coeffs) {
                *m += x;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; dim];
        for v in &vectors {
            for ((s, x), m) in var.iter_mut().zip(&v.coeffs).zip(&mean) {
                *s += (x - m) * (x - m);
            }
        }
        let std = var.iter().map(|s| (s / n).sqrt().max(STD_FLOOR)).collect();
        Ok(Gallery {
            vectors,
            labels,
            subjects,
            mean,
            std,
        })
    }

    pub fn vectors(&self) -> &[FeatureVector] {
        &self.vectors
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    /// Distinct subject ids, ascending.
    pub fn subjects(&self) -> &[u32] {
        &self.subjects
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn class_index(&self, subject: u32) -> Option<usize> {
        self.subjects.binary_search(&subject).ok()
    }

    pub fn normalizer(&self, scaling: Scaling) -> Normalizer {
        let scale = match scaling {
            Scaling::ZScore => 1.0,
            Scaling::ZScoreRms => 1.0 / (self.dim() as f64).sqrt(),
        };
        Normalizer {
            mean: self.mean.clone(),
            std: self.std.clone(),
            scale,
        }
    }

    /// One-of-S targets: +1 for the vector's own subject, -1 elsewhere.
    pub(crate) fn targets(&self) -> Vec<Vec<f64>> {
        self.labels
            .iter()
            .map(|&l| self.subjects.iter().map(|&s| if s == l { 1.0 } else { -1.0 }).collect())
            .collect()
    }
}

/// `radbas` bias for a spread: activation is 0.5 at distance `spread`.
pub fn radbas_bias(spread: f64) -> f64 {
    std::f64::consts::LN_2.sqrt() / spread
}

const MODEL_FORMAT: &str = "tdface-model";
const MODEL_VERSION: u32 = 1;

/// A trained network in serializable form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SavedModel {
    Mlp(MlpModel),
    Pnn(PnnModel),
    Rbf(RbfModel),
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    model: SavedModel,
}

impl SavedModel {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&ModelFile {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            model: self.clone(),
        })?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: ModelFile = serde_json::from_str(text)?;
        if f.format != MODEL_FORMAT || f.version != MODEL_VERSION {
            return Err(Error::arg(format!("unsupported model file {} v{}", f.format, f.version)));
        }
        Ok(f.model)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::from_json(&std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
    }
}

impl Classifier for SavedModel {
    fn scores(&self, probe: &FeatureVector) -> Result<ScoreSet> {
        match self {
            SavedModel::Mlp(m) => mlp_scores(m, probe),
            SavedModel::Pnn(m) => m.scores(probe),
            SavedModel::Rbf(m) => rbf_scores(m, probe),
        }
    }
}

#[cfg(test)]
pub(crate) mod test_util {
    use super::*;
    use crate::transforms::Source;

    pub fn fv(c: &[f64], s: u32) -> FeatureVector {
        FeatureVector::new(c.to_vec(), Source::Dct).unwrap().labeled(s, 1)
    }

    /// Two well separated 2-D clusters, two points each.
    pub fn toy_gallery() -> Gallery {
        Gallery::new(vec![
            fv(&[0.0, 0.0], 1),
            fv(&[0.3, 0.1], 1),
            fv(&[2.0, 2.0], 2),
            fv(&[2.2, 1.7], 2),
        ])
        .unwrap()
    }
}
