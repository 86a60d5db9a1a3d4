//! Whole-image 2D transforms and zonal-mask feature extraction.
//!
//! The DCT is the orthonormal type-II transform
//!
//! ```text
//! B[p,q] = a(p) a(q) sum_m sum_n A[m,n] cos(pi (2m+1) p / 2M) cos(pi (2n+1) q / 2N)
//! a(0) = 1/sqrt(M), a(p>0) = sqrt(2/M)
//! ```
//!
//! evaluated separably as `C_M * A * C_N^T`, so Parseval holds exactly up to
//! rounding. The DFT is unnormalized (`F(0,0)` is the pixel sum).

mod features;
mod mask;

pub use features::{read_features_csv, write_features_csv, FeatureVector, Source};
pub use mask::{extract_features, mask_apply, ComplexReduction, MaskShape, ZonalMask};

use std::f64::consts::PI;

use nalgebra::{Complex, DMatrix};
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Complex64 = Complex<f64>;

/// Default offset added before the logarithm in [`log_dft2`].
pub const LOG_OFFSET: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformKind {
    Dct,
    Dft,
    LogDft,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Coefficients {
    Real(DMatrix<f64>),
    Complex(DMatrix<Complex64>),
}

/// Transform-domain image. Same dimensions as the source image.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffMatrix {
    pub kind: TransformKind,
    pub values: Coefficients,
}

impl CoeffMatrix {
    pub fn shape(&self) -> (usize, usize) {
        match &self.values {
            Coefficients::Real(m) => m.shape(),
            Coefficients::Complex(m) => m.shape(),
        }
    }

    pub fn as_real(&self) -> Option<&DMatrix<f64>> {
        match &self.values {
            Coefficients::Real(m) => Some(m),
            Coefficients::Complex(_) => None,
        }
    }

    pub fn as_complex(&self) -> Option<&DMatrix<Complex64>> {
        match &self.values {
            Coefficients::Complex(m) => Some(m),
            Coefficients::Real(_) => None,
        }
    }

    /// Squared magnitude of every coefficient.
    pub fn energy(&self) -> DMatrix<f64> {
        match &self.values {
            Coefficients::Real(m) => m.map(|v| v * v),
            Coefficients::Complex(m) => m.map(|v| v.norm_sqr()),
        }
    }

    /// Real view for diagnostics: the values for DCT, the modulus otherwise.
    pub fn magnitude(&self) -> DMatrix<f64> {
        match &self.values {
            Coefficients::Real(m) => m.clone(),
            Coefficients::Complex(m) => m.map(|v| v.norm()),
        }
    }
}

/// Orthonormal DCT-II basis, `C[p, m] = a(p) cos(pi (2m+1) p / 2n)`.
fn dct_basis(n: usize) -> DMatrix<f64> {
    let nf = n as f64;
    DMatrix::from_fn(n, n, |p, m| {
        let alpha = if p == 0 { (1.0 / nf).sqrt() } else { (2.0 / nf).sqrt() };
        alpha * (PI * (2 * m + 1) as f64 * p as f64 / (2.0 * nf)).cos()
    })
}

/// Precomputed DCT bases for one image size.
#[derive(Debug, Clone)]
pub struct DctPlan {
    rows: DMatrix<f64>,
    cols: DMatrix<f64>,
}

impl DctPlan {
    pub fn new(rows: usize, cols: usize) -> Self {
        DctPlan {
            rows: dct_basis(rows),
            cols: dct_basis(cols),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows.nrows(), self.cols.nrows())
    }

    pub fn forward(&self, pixels: &DMatrix<f64>) -> CoeffMatrix {
        assert_eq!(pixels.shape(), self.shape(), "DCT plan size mismatch");
        CoeffMatrix {
            kind: TransformKind::Dct,
            values: Coefficients::Real(&self.rows * pixels * self.cols.transpose()),
        }
    }

    pub fn inverse(&self, coeffs: &CoeffMatrix) -> Result<DMatrix<f64>> {
        let b = coeffs
            .as_real()
            .filter(|_| coeffs.kind == TransformKind::Dct)
            .ok_or_else(|| Error::arg(format!("idct2 needs DCT coefficients, got {:?}", coeffs.kind)))?;
        if b.shape() != self.shape() {
            return Err(Error::arg("DCT plan size mismatch"));
        }
        Ok(self.rows.transpose() * b * &self.cols)
    }
}

pub fn dct2(pixels: &DMatrix<f64>) -> CoeffMatrix {
    let (r, c) = pixels.shape();
    DctPlan::new(r, c).forward(pixels)
}

pub fn idct2(coeffs: &CoeffMatrix) -> Result<DMatrix<f64>> {
    let (r, c) = coeffs.shape();
    DctPlan::new(r, c).inverse(coeffs)
}

fn fft2(input: DMatrix<Complex64>) -> DMatrix<Complex64> {
    let (rows, cols) = input.shape();
    let mut planner = FftPlanner::new();
    // nalgebra stores column-major, so each column is contiguous.
    let mut buf = input.as_slice().to_vec();
    planner.plan_fft_forward(rows).process(&mut buf);
    let cols_done = DMatrix::from_vec(rows, cols, buf);
    let mut buf = cols_done.transpose().as_slice().to_vec();
    planner.plan_fft_forward(cols).process(&mut buf);
    DMatrix::from_vec(cols, rows, buf).transpose()
}

/// Unnormalized 2D DFT: `F(p,q) = sum A(m,n) e^{-2 pi i (pm/M + qn/N)}`.
pub fn dft2(pixels: &DMatrix<f64>) -> CoeffMatrix {
    CoeffMatrix {
        kind: TransformKind::Dft,
        values: Coefficients::Complex(fft2(pixels.map(|v| Complex64::new(v, 0.0)))),
    }
}

/// DFT of `ln(pixels + offset)`: the homomorphic illumination/reflectance split.
pub fn log_dft2(pixels: &DMatrix<f64>, offset: f64) -> Result<CoeffMatrix> {
    if !(offset > 0.0 && offset.is_finite()) {
        return Err(Error::arg(format!("log offset must be > 0, got {offset}")));
    }
    // Negated so NaN pixels are rejected too.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if let Some(v) = pixels.iter().find(|&&v| !(v + offset > 0.0)) {
        return Err(Error::arg(format!("pixel {v} + offset {offset} is not positive")));
    }
    let logged = pixels.map(|v| Complex64::new((v + offset).ln(), 0.0));
    Ok(CoeffMatrix {
        kind: TransformKind::LogDft,
        values: Coefficients::Complex(fft2(logged)),
    })
}

/// Forward transform of the requested kind (log-DFT uses `offset`).
pub fn transform(kind: TransformKind, pixels: &DMatrix<f64>, offset: f64) -> Result<CoeffMatrix> {
    match kind {
        TransformKind::Dct => Ok(dct2(pixels)),
        TransformKind::Dft => Ok(dft2(pixels)),
        TransformKind::LogDft => log_dft2(pixels, offset),
    }
}

/// Low-pass reconstruction through a DCT zonal mask.
///
/// Returns the reconstructed image and its relative L2 error
/// `||A - A'|| / ||A||`.
pub fn dct_lowpass(pixels: &DMatrix<f64>, mask: &ZonalMask) -> Result<(DMatrix<f64>, f64)> {
    let (r, c) = pixels.shape();
    let plan = DctPlan::new(r, c);
    let masked = mask_apply(&plan.forward(pixels), mask)?;
    let rec = plan.inverse(&masked)?;
    let norm = pixels.norm();
    let err = if norm > 0.0 { (pixels - &rec).norm() / norm } else { 0.0 };
    Ok((rec, err))
}

/// Fraction of total squared energy retained inside `mask`.
pub fn energy_fraction(coeffs: &CoeffMatrix, mask: &ZonalMask) -> Result<f64> {
    let energy = coeffs.energy();
    let (r, c) = energy.shape();
    let kept: f64 = mask.positions(r, c)?.iter().map(|&ix| energy[ix]).sum();
    Ok(kept / energy.sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rows: usize, cols: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DMatrix::from_fn(rows, cols, |_, _| rng.random::<f64>())
    }

    // Direct double sum of the DCT definition.
    fn naive_dct(a: &DMatrix<f64>) -> DMatrix<f64> {
        let (m, n) = a.shape();
        let (mf, nf) = (m as f64, n as f64);
        let alpha = |k: usize, len: f64| if k == 0 { 1.0 / len.sqrt() } else { (2.0 / len).sqrt() };
        DMatrix::from_fn(m, n, |p, q| {
            let mut s = 0.0;
            for i in 0..m {
                for j in 0..n {
                    s += a[(i, j)]
                        * (PI * (2 * i + 1) as f64 * p as f64 / (2.0 * mf)).cos()
                        * (PI * (2 * j + 1) as f64 * q as f64 / (2.0 * nf)).cos();
                }
            }
            alpha(p, mf) * alpha(q, nf) * s
        })
    }

    fn naive_dft(a: &DMatrix<f64>) -> DMatrix<Complex64> {
        let (m, n) = a.shape();
        DMatrix::from_fn(m, n, |p, q| {
            let mut s = Complex64::new(0.0, 0.0);
            for i in 0..m {
                for j in 0..n {
                    let ang = -2.0 * PI * ((p * i) as f64 / m as f64 + (q * j) as f64 / n as f64);
                    s += Complex64::from_polar(a[(i, j)], ang);
                }
            }
            s
        })
    }

    #[test]
    fn constant_dct_is_dc_only() {
        let b = dct2(&DMatrix::from_element(2, 2, 1.0));
        let b = b.as_real().unwrap();
        assert!((b[(0, 0)] - 2.0).abs() < 1e-14);
        assert!(b.iter().skip(1).all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn dct_matches_direct_sum() {
        for (r, c, seed) in [(4, 4, 1), (3, 7, 2), (16, 16, 3), (1, 5, 4)] {
            let a = random(r, c, seed);
            let fast = dct2(&a);
            let diff = (fast.as_real().unwrap() - naive_dct(&a)).amax();
            assert!(diff < 1e-10, "{r}x{c}: {diff}");
        }
    }

    #[test]
    fn dft_matches_direct_sum() {
        for (r, c, seed) in [(4, 4, 5), (5, 3, 6), (16, 16, 7)] {
            let a = random(r, c, seed);
            let f = dft2(&a);
            let diff = (f.as_complex().unwrap() - naive_dft(&a)).map(|z| z.norm()).max();
            assert!(diff < 1e-10, "{r}x{c}: {diff}");
        }
    }

    #[test]
    fn dft_constant_and_symmetry() {
        let f = dft2(&DMatrix::from_element(3, 4, 0.25));
        let f = f.as_complex().unwrap();
        assert!((f[(0, 0)].re - 3.0).abs() < 1e-12);
        assert!(f.iter().skip(1).all(|z| z.norm() < 1e-12));

        let a = random(5, 6, 8);
        let f = dft2(&a);
        let f = f.as_complex().unwrap();
        assert!((f[(0, 0)].re - a.sum()).abs() < 1e-12);
        for p in 0..5 {
            for q in 0..6 {
                let mirror = f[((5 - p) % 5, (6 - q) % 6)].conj();
                assert!((f[(p, q)] - mirror).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn inverse_pair() {
        let a = random(8, 8, 9);
        let back = idct2(&dct2(&a)).unwrap();
        assert!((back - &a).amax() < 1e-9);
        let zero = CoeffMatrix {
            kind: TransformKind::Dct,
            values: Coefficients::Real(DMatrix::zeros(3, 5)),
        };
        assert_eq!(idct2(&zero).unwrap(), DMatrix::zeros(3, 5));
        assert!(matches!(idct2(&dft2(&a)), Err(Error::Argument(_))));
    }

    #[test]
    fn log_dft_constant_and_errors() {
        let off = LOG_OFFSET;
        let img = DMatrix::from_element(4, 3, std::f64::consts::E - off);
        let f = log_dft2(&img, off).unwrap();
        let f = f.as_complex().unwrap();
        assert!((f[(0, 0)].re - 12.0).abs() < 1e-10);
        assert!(f.iter().skip(1).all(|z| z.norm() < 1e-10));

        let with_zeros = DMatrix::from_fn(4, 4, |r, c| if (r + c) % 2 == 0 { 0.0 } else { 1.0 });
        let f = log_dft2(&with_zeros, off).unwrap();
        assert!(f.as_complex().unwrap().iter().all(|z| z.re.is_finite() && z.im.is_finite()));

        assert!(log_dft2(&img, 0.0).is_err());
        assert!(log_dft2(&img, -1.0).is_err());
    }

    #[test]
    fn log_dft_separates_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        // Smooth illumination times a textured reflectance.
        let illum = DMatrix::from_fn(8, 8, |r, c| 0.4 + 0.05 * (r + c) as f64);
        let refl = DMatrix::from_fn(8, 8, |_, _| rng.random_range(0.2..0.9));
        let f = illum.component_mul(&refl);
        let lhs = log_dft2(&f, 1e-12).unwrap();
        let li = log_dft2(&illum, 1e-12).unwrap();
        let lr = log_dft2(&refl, 1e-12).unwrap();
        let d = lhs.as_complex().unwrap() - li.as_complex().unwrap() - lr.as_complex().unwrap();
        assert!(d.map(|z| z.norm()).max() < 1e-6);
    }

    #[test]
    fn lowpass_energy() {
        let a = random(12, 10, 11);
        let full = ZonalMask::rectangular(10).unwrap();
        let (rec, err) = dct_lowpass(&a, &full).unwrap();
        assert!(err > 0.0 && err < 1.0);
        assert_eq!(rec.shape(), (12, 10));
        let (_, err1) = dct_lowpass(&a, &ZonalMask::rectangular(1).unwrap()).unwrap();
        assert!(err1 > err);
        let frac = energy_fraction(&dct2(&a), &ZonalMask::rectangular(1).unwrap()).unwrap();
        assert!(frac > 0.5 && frac < 1.0);
    }
}
