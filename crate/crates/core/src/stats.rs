//! Per-feature class separability: the normalized distance between class
//! means, `D_ij = |m_i - m_j| / sqrt(var_i + var_j)`.

use std::collections::BTreeMap;
use std::io::Write;

use crate::error::{Error, Result};
use crate::transforms::FeatureVector;

/// Default regularizer under the square root of [`discriminability`].
pub const DEFAULT_EPS: f64 = 1e-12;

/// Population mean and variance (1/N) of one feature within one class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassFeatureStats {
    pub mean: f64,
    pub variance: f64,
    pub count: usize,
}

pub fn class_stats(values: &[f64]) -> Result<ClassFeatureStats> {
    if values.is_empty() {
        return Err(Error::arg("class statistics need at least one value"));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let variance = values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    Ok(ClassFeatureStats {
        mean,
        variance,
        count: values.len(),
    })
}

pub fn discriminability(a: &ClassFeatureStats, b: &ClassFeatureStats, eps: f64) -> f64 {
    (a.mean - b.mean).abs() / (a.variance + b.variance + eps).sqrt()
}

/// Rank every feature index by the mean pairwise `D` over all class pairs,
/// most discriminative first. Ties keep index order.
pub fn rank_features(features: &[FeatureVector], eps: f64) -> Result<Vec<(usize, f64)>> {
    let dim = features.first().map_or(0, FeatureVector::dim);
    if features.iter().any(|f| f.dim() != dim) {
        return Err(Error::arg("features must share a dimension"));
    }
    let mut classes: BTreeMap<u32, Vec<&FeatureVector>> = BTreeMap::new();
    for f in features {
        let label = f.subject.ok_or_else(|| Error::arg("ranking needs labeled features"))?;
        classes.entry(label).or_default().push(f);
    }
    if classes.len() < 2 {
        return Err(Error::arg("ranking needs at least two classes"));
    }
    let groups: Vec<&Vec<&FeatureVector>> = classes.values().collect();
    let pairs = groups.len() * (groups.len() - 1) / 2;

    let mut scores = Vec::with_capacity(dim);
    for d in 0..dim {
        let stats = groups
            .iter()
            .map(|g| class_stats(&g.iter().map(|f| f.coeffs[d]).collect::<Vec<_>>()))
            .collect::<Result<Vec<_>>>()?;
        let mut total = 0.0;
        for i in 0..stats.len() {
            for j in i + 1..stats.len() {
                total += discriminability(&stats[i], &stats[j], eps);
            }
        }
        scores.push((d, total / pairs as f64));
    }
    scores.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    Ok(scores)
}

/// CSV `rank,feature_index,aggregate_D` with 1-based ranks.
pub fn write_ranking_csv<W: Write>(mut out: W, ranking: &[(usize, f64)]) -> Result<()> {
    let io = |e| Error::io("<ranking csv>", e);
    writeln!(out, "rank,feature_index,aggregate_D").map_err(io)?;
    for (r, (idx, d)) in ranking.iter().enumerate() {
        writeln!(out, "{},{idx},{d}", r + 1).map_err(io)?;
    }
    Ok(())
}
