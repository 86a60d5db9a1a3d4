//! Radial basis network grown one unit at a time.
//!
//! Starting from a bias-only linear layer, each round simulates the network
//! on the gallery, adds a radbas unit centred on the gallery vector with the
//! largest summed squared error, and re-solves the linear output layer by
//! least squares (minimum-norm solution through the SVD).

use nalgebra::{DMatrix, SVD};
use serde::{Deserialize, Serialize};

use super::{radbas_bias, Classifier, Gallery, Normalizer, Polarity, Scaling, ScoreSet};
use crate::error::{Error, Result};
use crate::transforms::FeatureVector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RbfModel {
    /// Normalized center vectors.
    pub centers: Vec<Vec<f64>>,
    /// Gallery index each center was taken from, in insertion order.
    pub center_indices: Vec<usize>,
    pub spread: f64,
    /// Output weights, one row per subject, one column per center.
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
    pub normalizer: Normalizer,
    pub subjects: Vec<u32>,
    /// Training sum of squared errors with 0, 1, .. centers.
    pub residuals: Vec<f64>,
}

const TIE_RTOL: f64 = 1e-10;
const TIE_ATOL: f64 = 1e-14;

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Minimum-norm least squares `design * W = targets`.
fn solve_min_norm(design: DMatrix<f64>, targets: &DMatrix<f64>) -> DMatrix<f64> {
    let (r, c) = design.shape();
    let svd = SVD::new(design, true, true);
    let top = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let eps = top * r.max(c) as f64 * f64::EPSILON;
    svd.solve(targets, eps).expect("SVD computed with both U and V^T")
}

pub fn rbf_train(gallery: &Gallery, spread: f64, max_centers: usize) -> Result<RbfModel> {
    if !(spread > 0.0 && spread.is_finite()) {
        return Err(Error::arg(format!("spread must be > 0, got {spread}")));
    }
    let n = gallery.len();
    if max_centers == 0 || max_centers > n {
        return Err(Error::arg(format!("max_centers={max_centers} must lie in 1..={n}")));
    }
    let normalizer = gallery.normalizer(Scaling::ZScoreRms);
    let x = gallery
        .vectors()
        .iter()
        .map(|v| normalizer.apply(&v.coeffs))
        .collect::<Result<Vec<_>>>()?;
    let t = gallery.targets();
    let s = gallery.subjects().len();
    let targets = DMatrix::from_fn(n, s, |i, j| t[i][j]);
    let b2 = radbas_bias(spread).powi(2);
    let act = DMatrix::from_fn(n, n, |i, j| (-b2 * sq_dist(&x[i], &x[j])).exp());

    let mut chosen: Vec<usize> = Vec::with_capacity(max_centers);
    let mut residuals = Vec::with_capacity(max_centers + 1);
    let mut design = DMatrix::from_element(n, 1, 1.0);
    loop {
        let w = solve_min_norm(design.clone(), &targets);
        let err = &design * &w - &targets;
        let row_sse: Vec<f64> = err.row_iter().map(|r| r.norm_squared()).collect();
        residuals.push(row_sse.iter().sum());

        if chosen.len() == max_centers {
            let k = chosen.len();
            let bias = w.row(0).iter().copied().collect();
            let weights = (0..s).map(|c| (0..k).map(|j| w[(j + 1, c)]).collect()).collect();
            return Ok(RbfModel {
                centers: chosen.iter().map(|&i| x[i].clone()).collect(),
                center_indices: chosen,
                spread,
                weights,
                bias,
                normalizer,
                subjects: gallery.subjects().to_vec(),
                residuals,
            });
        }

        // Errors equal to within rounding count as ties; the lowest index wins.
        let mut worst: Option<usize> = None;
        for i in (0..n).filter(|i| !chosen.contains(i)) {
            if worst.is_none_or(|w| row_sse[i] > row_sse[w] * (1.0 + TIE_RTOL) + TIE_ATOL) {
                worst = Some(i);
            }
        }
        let pick = worst.expect("max_centers <= gallery size leaves a candidate");
        chosen.push(pick);
        let col = design.ncols();
        design = design.insert_column(col, 0.0);
        design.set_column(col, &act.column(pick));
    }
}

pub fn rbf_scores(model: &RbfModel, probe: &FeatureVector) -> Result<ScoreSet> {
    let x = model.normalizer.apply(&probe.coeffs)?;
    let b2 = radbas_bias(model.spread).powi(2);
    let phi: Vec<f64> = model.centers.iter().map(|c| (-b2 * sq_dist(c, &x)).exp()).collect();
    let out = model
        .weights
        .iter()
        .zip(&model.bias)
        .map(|(row, b)| b + row.iter().zip(&phi).map(|(w, p)| w * p).sum::<f64>())
        .collect();
    ScoreSet::new(out, model.subjects.clone(), Polarity::HigherIsBetter, "rbf")
}

impl Classifier for RbfModel {
    fn scores(&self, probe: &FeatureVector) -> Result<ScoreSet> {
        rbf_scores(self, probe)
    }
}
