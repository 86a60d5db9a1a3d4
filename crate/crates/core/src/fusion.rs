//! Opinion fusion: per-probe score normalization and the mean rule.

use serde::{Deserialize, Serialize};

use crate::classifiers::{Polarity, ScoreSet};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoreNormalization {
    /// Min-max onto `[0, 1]`.
    #[default]
    MinMax,
    /// Z-score squashed through the logistic function.
    ZScore,
}

/// Scores on `[0, 1]` where higher is better.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizedScoreSet {
    pub scores: Vec<f64>,
    pub subjects: Vec<u32>,
    pub classifier: String,
}

impl NormalizedScoreSet {
    /// Index of the maximum; ties go to the lowest subject id.
    pub fn best_index(&self) -> usize {
        let mut best = 0;
        for (i, &s) in self.scores.iter().enumerate().skip(1) {
            if s > self.scores[best] {
                best = i;
            }
        }
        best
    }

    pub fn predicted(&self) -> u32 {
        self.subjects[self.best_index()]
    }
}

pub fn normalize_scores(raw: &ScoreSet) -> Result<NormalizedScoreSet> {
    normalize_scores_with(raw, ScoreNormalization::MinMax)
}

pub fn normalize_scores_with(raw: &ScoreSet, method: ScoreNormalization) -> Result<NormalizedScoreSet> {
    if raw.scores.len() < 2 {
        return Err(Error::arg("score normalization needs at least two subjects"));
    }
    if let Some(s) = raw.scores.iter().find(|s| !s.is_finite()) {
        return Err(Error::arg(format!("non-finite score {s}")));
    }
    let oriented: Vec<f64> = match raw.polarity {
        Polarity::HigherIsBetter => raw.scores.clone(),
        Polarity::LowerIsBetter => raw.scores.iter().map(|s| -s).collect(),
    };
    let scores = match method {
        ScoreNormalization::MinMax => {
            let lo = oriented.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = oriented.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if hi > lo {
                oriented.iter().map(|s| (s - lo) / (hi - lo)).collect()
            } else {
                vec![0.5; oriented.len()]
            }
        }
        ScoreNormalization::ZScore => {
            let n = oriented.len() as f64;
            let mean = oriented.iter().sum::<f64>() / n;
            let std = (oriented.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / n).sqrt();
            if std > 0.0 {
                oriented.iter().map(|s| 1.0 / (1.0 + (-(s - mean) / std).exp())).collect()
            } else {
                vec![0.5; oriented.len()]
            }
        }
    };
    Ok(NormalizedScoreSet {
        scores,
        subjects: raw.subjects.clone(),
        classifier: raw.classifier.clone(),
    })
}

/// Element-wise mean of normalized score sets.
pub fn fuse_mean(sets: &[NormalizedScoreSet]) -> Result<(u32, NormalizedScoreSet)> {
    let first = sets.first().ok_or_else(|| Error::arg("fusion needs at least one score set"))?;
    if let Some(bad) = sets.iter().find(|s| s.subjects != first.subjects) {
        return Err(Error::arg(format!(
            "score set `{}` covers {} subjects, expected the same {} as `{}`",
            bad.classifier,
            bad.subjects.len(),
            first.subjects.len(),
            first.classifier
        )));
    }
    let k = sets.len() as f64;
    let scores = (0..first.scores.len())
        .map(|i| sets.iter().map(|s| s.scores[i]).sum::<f64>() / k)
        .collect();
    let fused = NormalizedScoreSet {
        scores,
        subjects: first.subjects.clone(),
        classifier: sets.iter().map(|s| s.classifier.as_str()).collect::<Vec<_>>().join("+"),
    };
    Ok((fused.predicted(), fused))
}
