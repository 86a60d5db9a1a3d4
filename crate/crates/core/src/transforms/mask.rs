use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{CoeffMatrix, Coefficients, FeatureVector, Source, TransformKind};
use crate::error::{Error, Result};

/// Retained zone anchored at the frequency origin `(0, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum MaskShape {
    /// `side x side` block in the low-frequency corner.
    Rectangular { side: usize },
    /// Quarter disk: `sqrt(f1^2 + f2^2) < radius`.
    Sectorial { radius: f64 },
}

/// 0/1 zonal mask with an optional low-frequency cut for band-pass use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZonalMask {
    pub shape: MaskShape,
    /// Positions with `sqrt(f1^2 + f2^2) < low_cut` are dropped. 0 keeps DC.
    #[serde(default)]
    pub low_cut: f64,
}

/// How complex DFT coefficients become real features.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComplexReduction {
    #[default]
    Modulus,
    /// `(re, im)` pairs, doubling the dimension.
    Interleaved,
}

impl ZonalMask {
    pub fn rectangular(side: usize) -> Result<Self> {
        if side == 0 {
            return Err(Error::arg("rectangular mask side must be >= 1"));
        }
        Ok(ZonalMask {
            shape: MaskShape::Rectangular { side },
            low_cut: 0.0,
        })
    }

    pub fn sectorial(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::arg(format!("sectorial radius must be > 0, got {radius}")));
        }
        Ok(ZonalMask {
            shape: MaskShape::Sectorial { radius },
            low_cut: 0.0,
        })
    }

    pub fn with_low_cut(mut self, low_cut: f64) -> Result<Self> {
        if !(low_cut >= 0.0 && low_cut.is_finite()) {
            return Err(Error::arg(format!("low cut must be >= 0, got {low_cut}")));
        }
        self.low_cut = low_cut;
        Ok(self)
    }

    /// Number of rows/cols spanned from the origin.
    fn extent(&self) -> usize {
        match self.shape {
            MaskShape::Rectangular { side } => side,
            MaskShape::Sectorial { radius } => radius.ceil() as usize,
        }
    }

    pub fn contains(&self, f1: usize, f2: usize) -> bool {
        let dist = ((f1 * f1 + f2 * f2) as f64).sqrt();
        let inside = match self.shape {
            MaskShape::Rectangular { side } => f1 < side && f2 < side,
            MaskShape::Sectorial { radius } => dist < radius,
        };
        inside && dist >= self.low_cut
    }

    pub fn check_fits(&self, rows: usize, cols: usize) -> Result<()> {
        let extent = self.extent();
        if extent > rows.min(cols) {
            return Err(Error::arg(format!(
                "mask {:?} spans {extent} coefficients but matrix is {rows}x{cols}",
                self.shape
            )));
        }
        Ok(())
    }

    /// Retained positions in row-major scan order.
    pub fn positions(&self, rows: usize, cols: usize) -> Result<Vec<(usize, usize)>> {
        self.check_fits(rows, cols)?;
        let e = self.extent();
        Ok((0..e)
            .flat_map(|r| (0..e).map(move |c| (r, c)))
            .filter(|&(r, c)| self.contains(r, c))
            .collect())
    }

    /// Number of retained coefficients on a `rows x cols` grid.
    pub fn dim(&self, rows: usize, cols: usize) -> Result<usize> {
        Ok(self.positions(rows, cols)?.len())
    }

    /// The full 0/1 array.
    pub fn to_array(&self, rows: usize, cols: usize) -> Result<DMatrix<f64>> {
        let mut m = DMatrix::zeros(rows, cols);
        for ix in self.positions(rows, cols)? {
            m[ix] = 1.0;
        }
        Ok(m)
    }
}

fn source_of(kind: TransformKind) -> Source {
    match kind {
        TransformKind::Dct => Source::Dct,
        TransformKind::Dft => Source::Dft,
        TransformKind::LogDft => Source::LogDft,
    }
}

/// Collect the coefficients under `mask` into a feature vector.
pub fn extract_features(
    coeffs: &CoeffMatrix,
    mask: &ZonalMask,
    reduction: ComplexReduction,
) -> Result<FeatureVector> {
    let (rows, cols) = coeffs.shape();
    let positions = mask.positions(rows, cols)?;
    let values: Vec<f64> = match &coeffs.values {
        Coefficients::Real(m) => positions.iter().map(|&ix| m[ix]).collect(),
        Coefficients::Complex(m) => match reduction {
            ComplexReduction::Modulus => positions.iter().map(|&ix| m[ix].norm()).collect(),
            ComplexReduction::Interleaved => positions
                .iter()
                .flat_map(|&ix| [m[ix].re, m[ix].im])
                .collect(),
        },
    };
    FeatureVector::new(values, source_of(coeffs.kind))
}

/// Pointwise product of the coefficients with the 0/1 mask array.
pub fn mask_apply(coeffs: &CoeffMatrix, mask: &ZonalMask) -> Result<CoeffMatrix> {
    let (rows, cols) = coeffs.shape();
    let keep = mask.to_array(rows, cols)?;
    let values = match &coeffs.values {
        Coefficients::Real(m) => Coefficients::Real(m.component_mul(&keep)),
        Coefficients::Complex(m) => Coefficients::Complex(m.zip_map(&keep, |z, k| z * k)),
    };
    Ok(CoeffMatrix {
        kind: coeffs.kind,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{dct2, dft2};
    use super::*;

    fn ramp(rows: usize, cols: usize) -> DMatrix<f64> {
        DMatrix::from_fn(rows, cols, |r, c| ((r * 7 + c * 3) % 11) as f64 / 10.0)
    }

    #[test]
    fn rectangular_dims_and_dc() {
        let b = dct2(&ramp(112, 92));
        let dc = extract_features(&b, &ZonalMask::rectangular(1).unwrap(), ComplexReduction::Modulus)
            .unwrap();
        assert_eq!(dc.coeffs, vec![b.as_real().unwrap()[(0, 0)]]);
        let v = extract_features(&b, &ZonalMask::rectangular(10).unwrap(), ComplexReduction::Modulus)
            .unwrap();
        assert_eq!(v.dim(), 100);
        assert_eq!(v.source, Source::Dct);
        // Row-major order: element 1 is (0, 1), element 10 is (1, 0).
        let m = b.as_real().unwrap();
        assert_eq!(v.coeffs[1], m[(0, 1)]);
        assert_eq!(v.coeffs[10], m[(1, 0)]);
        assert!(ZonalMask::rectangular(93).unwrap().check_fits(112, 92).is_err());
        assert!(ZonalMask::rectangular(0).is_err());
    }

    #[test]
    fn sectorial_enumeration() {
        // Brute-force the strict inequality over a generous grid.
        for radius in [0.5, 1.0, 2.0, 2.5, 3.0, 7.3] {
            let mask = ZonalMask::sectorial(radius).unwrap();
            let mut expected = Vec::new();
            for f1 in 0..20usize {
                for f2 in 0..20usize {
                    if (((f1 * f1 + f2 * f2) as f64).sqrt()) < radius {
                        expected.push((f1, f2));
                    }
                }
            }
            assert_eq!(mask.positions(20, 20).unwrap(), expected, "radius {radius}");
        }
        let m2 = ZonalMask::sectorial(2.0).unwrap();
        assert_eq!(m2.positions(5, 5).unwrap(), vec![(0, 0), (0, 1), (1, 0), (1, 1)]);
        assert!(ZonalMask::sectorial(5.5).unwrap().check_fits(5, 9).is_err());
        assert!(ZonalMask::sectorial(0.0).is_err());
    }

    #[test]
    fn band_pass_drops_dc() {
        let mask = ZonalMask::rectangular(3).unwrap().with_low_cut(1.0).unwrap();
        let pos = mask.positions(5, 5).unwrap();
        assert_eq!(pos.len(), 8);
        assert!(!pos.contains(&(0, 0)));
    }

    #[test]
    fn complex_reductions() {
        let f = dft2(&ramp(6, 6));
        let mask = ZonalMask::rectangular(2).unwrap();
        let m = extract_features(&f, &mask, ComplexReduction::Modulus).unwrap();
        let i = extract_features(&f, &mask, ComplexReduction::Interleaved).unwrap();
        assert_eq!((m.dim(), i.dim()), (4, 8));
        let z = f.as_complex().unwrap()[(0, 1)];
        assert_eq!(m.coeffs[1], z.norm());
        assert_eq!(&i.coeffs[2..4], &[z.re, z.im]);
    }

    #[test]
    fn apply_full_and_empty() {
        let sq = dct2(&ramp(4, 4));
        assert_eq!(mask_apply(&sq, &ZonalMask::rectangular(4).unwrap()).unwrap(), sq);
        let empty = ZonalMask::rectangular(2).unwrap().with_low_cut(10.0).unwrap();
        let z = mask_apply(&sq, &empty).unwrap();
        assert!(z.as_real().unwrap().iter().all(|&v| v == 0.0));
        assert!(extract_features(&sq, &empty, ComplexReduction::Modulus).is_err());
    }
}
