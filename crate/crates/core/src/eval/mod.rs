//! Identification experiments over a gallery/probe split.
//!
//! Features are computed through a [`FeatureCache`]: the full transform (or
//! the full eigenface projection) of every image is computed once, and each
//! mask or dimension only re-selects coefficients. Probe decisions run through
//! [`crate::exec`] and are collected in probe order, so results do not
//! depend on the execution mode.

mod histogram;
mod report;
mod spec;
mod table1;

pub use histogram::{distance_histograms, pairwise_distances, GaussianFit, Histogram, HistogramPair};
pub use report::{
    write_curve_csv, write_fusion_csv, write_histogram_csv, write_predictions_csv, write_table1_csv, DatasetInfo,
    RunManifest,
};
pub use spec::{ClassifierSpec, FeatureBase, FeatureSpec, Selection, DEFAULT_SPREAD, RBF_CENTERS};
pub use table1::{table1_report, Table1Config, Table1Row, TABLE1_ROWS};

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::classifiers::{
    mlp_scores, mlp_train, nn_classify, rbf_scores, rbf_train, Gallery, MlpModel, PnnModel, RbfModel, SavedModel, ScoreSet,
};
use crate::dataset::{Image, Split};
use crate::eigenfaces::{train_full_eigenbasis, EigenBasis};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::fusion::{fuse_mean, normalize_scores_with, ScoreNormalization};
use crate::transforms::{extract_features, transform, CoeffMatrix, FeatureVector, MaskShape, ZonalMask};

/// Percentage of `(true, predicted)` pairs that agree.
pub fn identification_rate(pairs: &[(u32, u32)]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::arg("identification rate of an empty probe set"));
    }
    let hits = pairs.iter().filter(|(t, p)| t == p).count();
    Ok(100.0 * hits as f64 / pairs.len() as f64)
}

/// Full-resolution features for every gallery and probe image.
#[derive(Debug, Clone)]
pub enum FeatureCache {
    Transform {
        base: FeatureBase,
        gallery: Vec<(CoeffMatrix, u32, u32)>,
        probes: Vec<(CoeffMatrix, u32, u32)>,
    },
    Klt {
        basis: EigenBasis,
        gallery: Vec<FeatureVector>,
        probes: Vec<FeatureVector>,
    },
}

fn transform_all(images: &[Image], base: FeatureBase, exec: Execution) -> Result<Vec<(CoeffMatrix, u32, u32)>> {
    let FeatureBase::Transform { kind, offset, .. } = base else {
        unreachable!("only called for transform bases")
    };
    exec::try_map(exec, images, |im| Ok((transform(kind, &im.pixels, offset)?, im.subject, im.sample)))
}

impl FeatureCache {
    pub fn build(split: &Split, base: FeatureBase, exec: Execution) -> Result<Self> {
        match base {
            FeatureBase::Transform { .. } => Ok(FeatureCache::Transform {
                base,
                gallery: transform_all(&split.gallery, base, exec)?,
                probes: transform_all(&split.probes, base, exec)?,
            }),
            FeatureBase::Klt => {
                let basis = train_full_eigenbasis(&split.gallery)?;
                Ok(FeatureCache::Klt {
                    gallery: basis.project_all(&split.gallery, exec)?,
                    probes: basis.project_all(&split.probes, exec)?,
                    basis,
                })
            }
        }
    }

    pub fn base(&self) -> FeatureBase {
        match self {
            FeatureCache::Transform { base, .. } => *base,
            FeatureCache::Klt { .. } => FeatureBase::Klt,
        }
    }

    /// Largest eigenface count available, `None` for transform bases.
    pub fn rank(&self) -> Option<usize> {
        match self {
            FeatureCache::Klt { basis, .. } => Some(basis.len()),
            FeatureCache::Transform { .. } => None,
        }
    }

    /// Gallery and probe feature vectors under `selection`.
    pub fn select(&self, selection: &Selection, exec: Execution) -> Result<(Vec<FeatureVector>, Vec<FeatureVector>)> {
        match (self, selection) {
            (FeatureCache::Transform { base, gallery, probes }, Selection::Mask { mask }) => {
                let FeatureBase::Transform { reduction, .. } = *base else {
                    unreachable!("transform cache always has a transform base")
                };
                let pick = |set: &[(CoeffMatrix, u32, u32)]| {
                    exec::try_map(exec, set, |(c, subject, sample)| {
                        Ok::<_, Error>(extract_features(c, mask, reduction)?.labeled(*subject, *sample))
                    })
                };
                Ok((pick(gallery)?, pick(probes)?))
            }
            (FeatureCache::Klt { basis, gallery, probes }, Selection::Leading { dim }) => {
                if *dim == 0 || *dim > basis.len() {
                    return Err(Error::Rank {
                        requested: *dim,
                        attainable: basis.len(),
                    });
                }
                let cut = |set: &[FeatureVector]| {
                    set.iter()
                        .map(|v| FeatureVector {
                            coeffs: v.coeffs[..*dim].to_vec(),
                            ..v.clone()
                        })
                        .collect()
                };
                Ok((cut(gallery), cut(probes)))
            }
            _ => Err(Error::arg("selection does not match the cached feature base")),
        }
    }
}

/// A classifier fitted to a gallery.
#[derive(Debug, Clone)]
pub enum Trained {
    Nn(Gallery, crate::classifiers::Metric),
    Mlp(Box<MlpModel>),
    Pnn(PnnModel),
    Rbf(RbfModel),
    Fusion(Vec<Trained>, ScoreNormalization),
}

/// One probe's outcome. `score` is the winning subject's score in the
/// classifier's own units (fused score for fusions).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub predicted: u32,
    pub score: f64,
}

impl Trained {
    pub fn fit(spec: &ClassifierSpec, gallery_vectors: &[FeatureVector]) -> Result<Self> {
        let gallery = Gallery::new(gallery_vectors.to_vec())?;
        Self::fit_gallery(spec, &gallery)
    }

    fn fit_gallery(spec: &ClassifierSpec, gallery: &Gallery) -> Result<Self> {
        Ok(match spec {
            ClassifierSpec::Nn { metric } => Trained::Nn(gallery.clone(), *metric),
            ClassifierSpec::Mlp { config } => Trained::Mlp(Box::new(mlp_train(gallery, config)?)),
            ClassifierSpec::Pnn { spread } => Trained::Pnn(PnnModel::new(gallery, *spread)?),
            ClassifierSpec::Rbf { spread, max_centers } => Trained::Rbf(rbf_train(gallery, *spread, *max_centers)?),
            ClassifierSpec::Fusion { members, normalization } => {
                if members.is_empty() {
                    return Err(Error::arg("fusion needs at least one member"));
                }
                Trained::Fusion(
                    members.iter().map(|m| Self::fit_gallery(m, gallery)).collect::<Result<_>>()?,
                    *normalization,
                )
            }
        })
    }

    /// Serializable form of a trained network; `None` for NN and fusions.
    pub fn to_saved(&self) -> Option<SavedModel> {
        match self {
            Trained::Mlp(m) => Some(SavedModel::Mlp((**m).clone())),
            Trained::Pnn(m) => Some(SavedModel::Pnn(m.clone())),
            Trained::Rbf(m) => Some(SavedModel::Rbf(m.clone())),
            Trained::Nn(..) | Trained::Fusion(..) => None,
        }
    }

    /// Raw scores; `None` for fusions, which have no single raw score set.
    pub fn scores(&self, probe: &FeatureVector) -> Result<Option<ScoreSet>> {
        Ok(Some(match self {
            Trained::Nn(g, m) => nn_classify(probe, g, *m)?.1,
            Trained::Mlp(m) => mlp_scores(m, probe)?,
            Trained::Pnn(m) => m.scores(probe)?,
            Trained::Rbf(m) => rbf_scores(m, probe)?,
            Trained::Fusion(..) => return Ok(None),
        }))
    }

    pub fn decide(&self, probe: &FeatureVector) -> Result<Decision> {
        match self {
            Trained::Fusion(members, normalization) => {
                let sets = members
                    .iter()
                    .map(|m| {
                        let raw = m.scores(probe)?.ok_or_else(|| Error::arg("nested fusion"))?;
                        normalize_scores_with(&raw, *normalization)
                    })
                    .collect::<Result<Vec<_>>>()?;
                let (predicted, fused) = fuse_mean(&sets)?;
                Ok(Decision {
                    predicted,
                    score: fused.scores[fused.best_index()],
                })
            }
            single => {
                let s = single.scores(probe)?.expect("non-fusion classifiers have scores");
                let best = s.best_index();
                Ok(Decision {
                    predicted: s.subjects[best],
                    score: s.scores[best],
                })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeOutcome {
    pub subject: u32,
    pub sample: u32,
    pub predicted: u32,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub feature: String,
    pub classifier: String,
    pub dim: usize,
    pub outcomes: Vec<ProbeOutcome>,
    /// Percent of probes identified correctly.
    pub identification_rate: f64,
    pub runtime_secs: f64,
}

impl ExperimentResult {
    pub fn pairs(&self) -> Vec<(u32, u32)> {
        self.outcomes.iter().map(|o| (o.subject, o.predicted)).collect()
    }
}

fn label_of(v: &FeatureVector) -> Result<(u32, u32)> {
    match (v.subject, v.sample) {
        (Some(s), Some(n)) => Ok((s, n)),
        _ => Err(Error::arg("probe feature vectors must carry subject and sample ids")),
    }
}

/// Identify every probe with an already fitted classifier.
pub fn evaluate_trained(
    trained: &Trained,
    classifier: &ClassifierSpec,
    probes: &[FeatureVector],
    exec: Execution,
) -> Result<ExperimentResult> {
    let start = Instant::now();
    let outcomes = exec::try_map(exec, probes, |p| {
        let (subject, sample) = label_of(p)?;
        let d = trained.decide(p)?;
        Ok::<_, Error>(ProbeOutcome {
            subject,
            sample,
            predicted: d.predicted,
            score: d.score,
        })
    })?;
    let pairs: Vec<_> = outcomes.iter().map(|o| (o.subject, o.predicted)).collect();
    Ok(ExperimentResult {
        feature: String::new(),
        classifier: classifier.to_string(),
        dim: probes.first().map_or(0, FeatureVector::dim),
        identification_rate: identification_rate(&pairs)?,
        outcomes,
        runtime_secs: start.elapsed().as_secs_f64(),
    })
}

/// Fit `classifier` on `gallery` and identify every probe.
pub fn evaluate_features(
    gallery: &[FeatureVector],
    probes: &[FeatureVector],
    classifier: &ClassifierSpec,
    exec: Execution,
) -> Result<ExperimentResult> {
    let start = Instant::now();
    let trained = Trained::fit(classifier, gallery)?;
    let mut r = evaluate_trained(&trained, classifier, probes, exec)?;
    r.runtime_secs = start.elapsed().as_secs_f64();
    Ok(r)
}

/// Evaluate one feature selection out of a prepared cache.
pub fn run_cached(
    cache: &FeatureCache,
    selection: &Selection,
    classifier: &ClassifierSpec,
    exec: Execution,
) -> Result<ExperimentResult> {
    let start = Instant::now();
    let (gallery, probes) = cache.select(selection, exec)?;
    let mut r = evaluate_features(&gallery, &probes, classifier, exec)?;
    r.feature = FeatureSpec {
        base: cache.base(),
        selection: *selection,
    }
    .to_string();
    r.runtime_secs = start.elapsed().as_secs_f64();
    Ok(r)
}

/// Extract features and evaluate in one go.
pub fn run_experiment(
    split: &Split,
    feature: &FeatureSpec,
    classifier: &ClassifierSpec,
    exec: Execution,
) -> Result<ExperimentResult> {
    feature.validate()?;
    let start = Instant::now();
    let cache = FeatureCache::build(split, feature.base, exec)?;
    let mut r = run_cached(&cache, &feature.selection, classifier, exec)?;
    r.runtime_secs = start.elapsed().as_secs_f64();
    Ok(r)
}

/// One point of a sweep. `x` is the swept parameter (mask size, dimension or
/// spread), `dim` the resulting feature dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub x: f64,
    pub dim: usize,
    pub rate: f64,
}

/// Rectangular masks `N' = 1..=max_side`, giving dimensions 1, 4, 9, ...
pub fn rect_grid(max_side: usize) -> Result<Vec<ZonalMask>> {
    (1..=max_side).map(ZonalMask::rectangular).collect()
}

/// Sectorial masks whose quarter-disk area matches the rectangular grid:
/// `r = 2 N' / sqrt(pi)` for `N' = 1..=max_side`.
pub fn sector_grid(max_side: usize) -> Result<Vec<ZonalMask>> {
    let k = 2.0 / std::f64::consts::PI.sqrt();
    (1..=max_side).map(|n| ZonalMask::sectorial(k * n as f64)).collect()
}

/// Spreads `lo, lo+step, .., hi` computed from integer steps.
pub fn spread_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && step > 0.0 && hi.is_finite()) {
        return Err(Error::arg(format!("bad spread grid {lo}:{step}:{hi}")));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| lo + i as f64 * step).collect())
}

/// The spread grid used when none is given: 0.1 to 2.0 in steps of 0.1.
pub fn default_spread_grid() -> Vec<f64> {
    (1..=20).map(|i| i as f64 / 10.0).collect()
}

/// Identification rate as a function of feature dimension.
pub fn sweep_dimension(
    cache: &FeatureCache,
    grid: &[Selection],
    classifier: &ClassifierSpec,
    exec: Execution,
) -> Result<Vec<CurvePoint>> {
    if grid.is_empty() {
        return Err(Error::arg("empty dimension grid"));
    }
    grid.iter()
        .map(|sel| {
            let r = run_cached(cache, sel, classifier, exec)?;
            let x = match sel {
                Selection::Mask { mask } => match mask.shape {
                    MaskShape::Rectangular { side } => side as f64,
                    MaskShape::Sectorial { radius } => radius,
                },
                Selection::Leading { dim } => *dim as f64,
            };
            Ok(CurvePoint {
                x,
                dim: r.dim,
                rate: r.identification_rate,
            })
        })
        .collect()
}

/// Identification rate as a function of the PNN/RBF spread.
///
/// Grid points are independent and run through `exec`; within a point the
/// probes run sequentially.
pub fn sweep_spread(
    gallery: &[FeatureVector],
    probes: &[FeatureVector],
    classifier: &ClassifierSpec,
    spreads: &[f64],
    exec: Execution,
) -> Result<Vec<CurvePoint>> {
    if spreads.is_empty() {
        return Err(Error::arg("empty spread grid"));
    }
    if !classifier.has_spread() {
        return Err(Error::arg(format!("classifier `{classifier}` has no spread to sweep")));
    }
    if let Some(s) = spreads.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
        return Err(Error::arg(format!("spread must be > 0, got {s}")));
    }
    exec::try_map(exec, spreads, |&s| {
        let r = evaluate_features(gallery, probes, &classifier.with_spread(s), Execution::Sequential)?;
        Ok(CurvePoint {
            x: s,
            dim: r.dim,
            rate: r.identification_rate,
        })
    })
}

/// Highest-rate point; ties keep the earliest grid entry.
pub fn curve_peak(curve: &[CurvePoint]) -> Option<CurvePoint> {
    curve.iter().copied().reduce(|best, p| if p.rate > best.rate { p } else { best })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::Metric;
    use crate::dataset::{split_first_k, synth_corpus};
    use crate::transforms::TransformKind;

    fn split() -> Split {
        split_first_k(&synth_corpus(3, 6, 4, 16, 12).unwrap(), 2).unwrap()
    }

    #[test]
    fn rate_examples() {
        assert_eq!(identification_rate(&[(1, 1), (2, 2)]).unwrap(), 100.0);
        let mut pairs = vec![(1, 1); 185];
        pairs.extend(vec![(1, 2); 15]);
        assert_eq!(identification_rate(&pairs).unwrap(), 92.5);
        assert_eq!(identification_rate(&[(1, 2); 200]).unwrap(), 0.0);
        assert!(identification_rate(&[]).is_err());
    }

    #[test]
    fn grids() {
        let dims: Vec<usize> = rect_grid(4).unwrap().iter().map(|m| m.dim(8, 8).unwrap()).collect();
        assert_eq!(dims, vec![1, 4, 9, 16]);
        assert_eq!(default_spread_grid().len(), 20);
        assert_eq!(default_spread_grid()[7], 0.8);
        assert_eq!(spread_grid(0.1, 0.5, 0.1).unwrap().len(), 5);
        assert!(spread_grid(0.0, 1.0, 0.1).is_err());
        let s: Vec<usize> = sector_grid(5).unwrap().iter().map(|m| m.dim(20, 20).unwrap()).collect();
        assert!(s.windows(2).all(|w| w[0] < w[1]), "{s:?}");
    }

    #[test]
    fn experiment_is_deterministic_across_modes() {
        let sp = split();
        let f = FeatureSpec::masked(TransformKind::Dct, ZonalMask::rectangular(3).unwrap());
        let c = ClassifierSpec::Fusion {
            members: vec![
                ClassifierSpec::Rbf {
                    spread: 0.9,
                    max_centers: 8,
                },
                ClassifierSpec::Nn { metric: Metric::Mad },
            ],
            normalization: ScoreNormalization::MinMax,
        };
        let a = run_experiment(&sp, &f, &c, Execution::Sequential).unwrap();
        let b = run_experiment(&sp, &f, &c, Execution::Parallel).unwrap();
        assert_eq!(a.outcomes, b.outcomes);
        assert_eq!(a.outcomes.len(), sp.probes.len());
        assert_eq!(a.dim, 9);
        assert_eq!(a.feature, "dct/rect:3");
        let rate = identification_rate(&a.pairs()).unwrap();
        assert_eq!(rate, a.identification_rate);
    }

    #[test]
    fn klt_cache_prefix_matches_truncated_basis() {
        let sp = split();
        let cache = FeatureCache::build(&sp, FeatureBase::Klt, Execution::Parallel).unwrap();
        let rank = cache.rank().unwrap();
        let (_, probes) = cache.select(&Selection::Leading { dim: 3 }, Execution::Sequential).unwrap();
        let basis = crate::eigenfaces::train_eigenbasis(&sp.gallery, 3).unwrap();
        let direct = basis.project(&sp.probes[0]).unwrap();
        for (a, b) in probes[0].coeffs.iter().zip(&direct.coeffs) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(matches!(
            cache.select(&Selection::Leading { dim: rank + 1 }, Execution::Sequential),
            Err(Error::Rank { .. })
        ));
        let mask = Selection::Mask {
            mask: ZonalMask::rectangular(2).unwrap(),
        };
        assert!(cache.select(&mask, Execution::Sequential).is_err());
    }

    #[test]
    fn sweeps_have_one_point_per_grid_entry() {
        let sp = split();
        let cache = FeatureCache::build(&sp, FeatureBase::transform(TransformKind::Dct), Execution::Parallel).unwrap();
        let grid: Vec<Selection> = rect_grid(4).unwrap().into_iter().map(|mask| Selection::Mask { mask }).collect();
        let nn = ClassifierSpec::Nn { metric: Metric::Mad };
        let curve = sweep_dimension(&cache, &grid, &nn, Execution::Parallel).unwrap();
        assert_eq!(curve.iter().map(|p| p.dim).collect::<Vec<_>>(), vec![1, 4, 9, 16]);
        assert!(sweep_dimension(&cache, &[], &nn, Execution::Parallel).is_err());

        let (g, p) = cache.select(&grid[2], Execution::Sequential).unwrap();
        let spreads = [0.2, 0.5, 1.0];
        let pnn = ClassifierSpec::Pnn { spread: 1.0 };
        let seq = sweep_spread(&g, &p, &pnn, &spreads, Execution::Sequential).unwrap();
        let par = sweep_spread(&g, &p, &pnn, &spreads, Execution::Parallel).unwrap();
        assert_eq!(seq, par);
        assert_eq!(seq.iter().map(|c| c.x).collect::<Vec<_>>(), spreads);
        assert!(sweep_spread(&g, &p, &nn, &spreads, Execution::Parallel).is_err());
        assert!(sweep_spread(&g, &p, &pnn, &[0.0], Execution::Parallel).is_err());
    }

    #[test]
    fn peak_prefers_first_maximum() {
        let c = |x, rate| CurvePoint { x, dim: 1, rate };
        assert_eq!(curve_peak(&[c(0.1, 50.0), c(0.2, 70.0), c(0.3, 70.0)]).unwrap().x, 0.2);
        assert!(curve_peak(&[]).is_none());
    }
}
