//! Eigenface (KLT) basis computed through the small `A^T A` Gram matrix.
//!
//! With `A = [Phi_1 .. Phi_M]` the mean-removed training images, the
//! covariance `C = (1/M) A A^T` is `P x P` while `(1/M) A^T A` is only
//! `M x M`. Every eigenvector `v` of the small matrix lifts to an
//! eigenvector `u = A v` of `C` with the same eigenvalue.

use std::path::Path;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::dataset::Image;
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::transforms::{FeatureVector, Source};

const FORMAT: &str = "tdface-eigenbasis";
const VERSION: u32 = 1;

/// Mean face plus `M'` unit-norm eigenfaces, strongest first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenBasis {
    pub rows: usize,
    pub cols: usize,
    pub mean_face: Vec<f64>,
    pub eigenfaces: Vec<Vec<f64>>,
    pub eigenvalues: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct BasisFile {
    format: String,
    version: u32,
    m_prime: usize,
    basis: EigenBasis,
}

impl EigenBasis {
    pub fn len(&self) -> usize {
        self.eigenfaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenfaces.is_empty()
    }

    /// Keep only the `m` strongest directions.
    pub fn truncated(&self, m: usize) -> Result<Self> {
        if m == 0 || m > self.len() {
            return Err(Error::Rank {
                requested: m,
                attainable: self.len(),
            });
        }
        Ok(EigenBasis {
            rows: self.rows,
            cols: self.cols,
            mean_face: self.mean_face.clone(),
            eigenfaces: self.eigenfaces[..m].to_vec(),
            eigenvalues: self.eigenvalues[..m].to_vec(),
        })
    }

    /// Weights `w_k = u_k . (I - mean)`.
    pub fn project(&self, image: &Image) -> Result<FeatureVector> {
        if (image.rows(), image.cols()) != (self.rows, self.cols) {
            return Err(Error::arg(format!(
                "image is {}x{} but basis expects {}x{}",
                image.rows(),
                image.cols(),
                self.rows,
                self.cols
            )));
        }
        let centered: Vec<f64> = image
            .to_row_major()
            .iter()
            .zip(&self.mean_face)
            .map(|(x, m)| x - m)
            .collect();
        let weights = self
            .eigenfaces
            .iter()
            .map(|u| u.iter().zip(&centered).map(|(a, b)| a * b).sum())
            .collect();
        Ok(FeatureVector::new(weights, Source::Klt)?.labeled(image.subject, image.sample))
    }

    pub fn project_all(&self, images: &[Image], exec: Execution) -> Result<Vec<FeatureVector>> {
        exec::try_map(exec, images, |im| self.project(im))
    }

    /// `mean + sum_k w_k u_k`, row-major.
    pub fn reconstruct(&self, weights: &[f64]) -> Result<Vec<f64>> {
        if weights.len() != self.len() {
            return Err(Error::arg("weight count does not match basis size"));
        }
        let mut out = self.mean_face.clone();
        for (w, u) in weights.iter().zip(&self.eigenfaces) {
            for (o, x) in out.iter_mut().zip(u) {
                *o += w * x;
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&BasisFile {
            format: FORMAT.into(),
            version: VERSION,
            m_prime: self.len(),
            basis: self.clone(),
        })?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: BasisFile = serde_json::from_str(text)?;
        if file.format != FORMAT || file.version != VERSION {
            return Err(Error::arg(format!(
                "unsupported basis file {} v{}",
                file.format, file.version
            )));
        }
        if file.m_prime != file.basis.len() {
            return Err(Error::arg("basis file m_prime does not match its eigenfaces"));
        }
        Ok(file.basis)
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

/// Every direction with a nonzero eigenvalue, strongest first.
pub fn train_full_eigenbasis(gallery: &[Image]) -> Result<EigenBasis> {
    let first = gallery
        .first()
        .ok_or_else(|| Error::arg("eigenbasis needs at least one training image"))?;
    let (rows, cols) = (first.rows(), first.cols());
    if gallery.iter().any(|im| (im.rows(), im.cols()) != (rows, cols)) {
        return Err(Error::arg("training images must share dimensions"));
    }
    let m = gallery.len();
    let p = rows * cols;
    let vectors: Vec<Vec<f64>> = gallery.iter().map(Image::to_row_major).collect();

    let mut mean = DVector::<f64>::zeros(p);
    for v in &vectors {
        mean += DVector::from_column_slice(v);
    }
    mean /= m as f64;

    let mut a = DMatrix::<f64>::zeros(p, m);
    for (i, v) in vectors.iter().enumerate() {
        a.set_column(i, &(DVector::from_column_slice(v) - &mean));
    }

    let gram = a.tr_mul(&a) / m as f64;
    let eig = SymmetricEigen::new(gram);

    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));

    // Directions at rounding-noise level relative to the data are dropped.
    let scale = vectors.iter().map(|v| v.iter().map(|x| x * x).sum::<f64>()).sum::<f64>() / m as f64;
    let top = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    let tol = 1e-10 * top + 1e-12 * scale;

    let mut eigenfaces = Vec::new();
    let mut eigenvalues = Vec::new();
    for &k in order.iter().filter(|&&k| eig.eigenvalues[k] > tol) {
        let mut u = &a * eig.eigenvectors.column(k);
        let norm = u.norm();
        if norm == 0.0 {
            continue;
        }
        u /= norm;
        let lead = u
            .iter()
            .enumerate()
            .fold((0, 0.0f64), |best, (i, &x)| if x.abs() > best.1.abs() { (i, x) } else { best });
        if lead.1 < 0.0 {
            u = -u;
        }
        eigenfaces.push(u.as_slice().to_vec());
        eigenvalues.push(eig.eigenvalues[k]);
    }

    Ok(EigenBasis {
        rows,
        cols,
        mean_face: mean.as_slice().to_vec(),
        eigenfaces,
        eigenvalues,
    })
}

/// Basis with the `m_prime` strongest eigenfaces.
pub fn train_eigenbasis(gallery: &[Image], m_prime: usize) -> Result<EigenBasis> {
    if m_prime == 0 || m_prime > gallery.len() {
        return Err(Error::arg(format!(
            "m_prime={m_prime} must lie in 1..={}",
            gallery.len()
        )));
    }
    train_full_eigenbasis(gallery)?.truncated(m_prime)
}
