//! Textual specifications of feature pipelines and classifiers, shared by the
//! library drivers and the command line.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::classifiers::{Metric, MlpConfig};
use crate::error::{Error, Result};
use crate::fusion::ScoreNormalization;
use crate::transforms::{ComplexReduction, MaskShape, TransformKind, ZonalMask, LOG_OFFSET};

/// Default number of RBF centers.
pub const RBF_CENTERS: usize = 100;
/// Spread used when `pnn` or `rbf` is given without one.
pub const DEFAULT_SPREAD: f64 = 0.85;

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TransformKind::Dct => "dct",
            TransformKind::Dft => "dft",
            TransformKind::LogDft => "logdft",
        })
    }
}

impl FromStr for TransformKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dct" => Ok(TransformKind::Dct),
            "dft" | "fft" => Ok(TransformKind::Dft),
            "logdft" | "log-dft" => Ok(TransformKind::LogDft),
            _ => Err(Error::arg(format!("unknown transform `{s}` (dct, dft, logdft)"))),
        }
    }
}

impl fmt::Display for ZonalMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.shape {
            MaskShape::Rectangular { side } => write!(f, "rect:{side}")?,
            MaskShape::Sectorial { radius } => write!(f, "sector:{radius}")?,
        }
        if self.low_cut > 0.0 {
            write!(f, ",low:{}", self.low_cut)?;
        }
        Ok(())
    }
}

impl FromStr for ZonalMask {
    type Err = Error;

    /// `rect:N` or `sector:R`, optionally followed by `,low:R0`.
    fn from_str(s: &str) -> Result<Self> {
        let (main, low) = match s.split_once(',') {
            Some((m, l)) => (m, Some(l)),
            None => (s, None),
        };
        let bad = || Error::arg(format!("bad mask `{s}` (expected rect:N or sector:R)"));
        let (shape, value) = main.split_once(':').ok_or_else(bad)?;
        let mask = match shape {
            "rect" | "rectangular" => ZonalMask::rectangular(value.parse().map_err(|_| bad())?)?,
            "sector" | "sectorial" => ZonalMask::sectorial(value.parse().map_err(|_| bad())?)?,
            _ => return Err(bad()),
        };
        match low {
            None => Ok(mask),
            Some(l) => {
                let r = l.strip_prefix("low:").and_then(|v| v.parse().ok()).ok_or_else(bad)?;
                mask.with_low_cut(r)
            }
        }
    }
}

/// Where features come from before any coefficient selection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "base", rename_all = "lowercase")]
pub enum FeatureBase {
    Transform {
        kind: TransformKind,
        /// Only used by the log-DFT.
        offset: f64,
        reduction: ComplexReduction,
    },
    /// Eigenface projection trained on the gallery.
    Klt,
}

impl FeatureBase {
    pub fn transform(kind: TransformKind) -> Self {
        FeatureBase::Transform {
            kind,
            offset: LOG_OFFSET,
            reduction: ComplexReduction::Modulus,
        }
    }
}

/// Which coefficients of the base become the feature vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "select", rename_all = "lowercase")]
pub enum Selection {
    Mask { mask: ZonalMask },
    /// Leading eigenface weights.
    Leading { dim: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub base: FeatureBase,
    pub selection: Selection,
}

impl FeatureSpec {
    pub fn masked(kind: TransformKind, mask: ZonalMask) -> Self {
        FeatureSpec {
            base: FeatureBase::transform(kind),
            selection: Selection::Mask { mask },
        }
    }

    pub fn eigen(dim: usize) -> Self {
        FeatureSpec {
            base: FeatureBase::Klt,
            selection: Selection::Leading { dim },
        }
    }

    /// Check that the base and the selection belong together.
    pub fn validate(&self) -> Result<()> {
        match (self.base, self.selection) {
            (FeatureBase::Transform { .. }, Selection::Mask { .. }) | (FeatureBase::Klt, Selection::Leading { .. }) => Ok(()),
            _ => Err(Error::arg(format!("feature selection does not fit the base in `{self}`"))),
        }
    }
}

impl fmt::Display for FeatureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.base, self.selection) {
            (FeatureBase::Transform { kind, reduction, .. }, Selection::Mask { mask }) => {
                write!(f, "{kind}/{mask}")?;
                if reduction == ComplexReduction::Interleaved {
                    f.write_str("/reim")?;
                }
                Ok(())
            }
            (FeatureBase::Klt, Selection::Leading { dim }) => write!(f, "klt/{dim}"),
            (base, sel) => write!(f, "{base:?}/{sel:?}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ClassifierSpec {
    Nn { metric: Metric },
    Mlp { config: MlpConfig },
    Pnn { spread: f64 },
    Rbf { spread: f64, max_centers: usize },
    Fusion {
        members: Vec<ClassifierSpec>,
        normalization: ScoreNormalization,
    },
}

impl ClassifierSpec {
    /// Short name used in reports, e.g. `nn:mad` or `rbf+nn:mad`.
    pub fn label(&self) -> String {
        match self {
            ClassifierSpec::Nn { metric } => format!("nn:{metric}"),
            ClassifierSpec::Mlp { .. } => "mlp".into(),
            ClassifierSpec::Pnn { .. } => "pnn".into(),
            ClassifierSpec::Rbf { .. } => "rbf".into(),
            ClassifierSpec::Fusion { members, .. } => {
                members.iter().map(Self::label).collect::<Vec<_>>().join("+")
            }
        }
    }

    /// The same classifier with every PNN/RBF spread replaced.
    pub fn with_spread(&self, spread: f64) -> Self {
        match self {
            ClassifierSpec::Pnn { .. } => ClassifierSpec::Pnn { spread },
            ClassifierSpec::Rbf { max_centers, .. } => ClassifierSpec::Rbf {
                spread,
                max_centers: *max_centers,
            },
            ClassifierSpec::Fusion { members, normalization } => ClassifierSpec::Fusion {
                members: members.iter().map(|m| m.with_spread(spread)).collect(),
                normalization: *normalization,
            },
            other => other.clone(),
        }
    }

    pub fn has_spread(&self) -> bool {
        match self {
            ClassifierSpec::Pnn { .. } | ClassifierSpec::Rbf { .. } => true,
            ClassifierSpec::Fusion { members, .. } => members.iter().any(Self::has_spread),
            _ => false,
        }
    }

    /// Replace the MLP seed, recursively.
    pub fn with_seed(&self, seed: u64) -> Self {
        match self {
            ClassifierSpec::Mlp { config } => ClassifierSpec::Mlp {
                config: MlpConfig { seed, ..*config },
            },
            ClassifierSpec::Fusion { members, normalization } => ClassifierSpec::Fusion {
                members: members.iter().map(|m| m.with_seed(seed)).collect(),
                normalization: *normalization,
            },
            other => other.clone(),
        }
    }
}

impl fmt::Display for ClassifierSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassifierSpec::Pnn { spread } => write!(f, "pnn:{spread}"),
            ClassifierSpec::Rbf { spread, .. } => write!(f, "rbf:{spread}"),
            ClassifierSpec::Fusion { members, .. } => {
                let parts: Vec<String> = members.iter().map(|m| m.to_string()).collect();
                write!(f, "fusion:{}", parts.join("+"))
            }
            other => f.write_str(&other.label()),
        }
    }
}

fn parse_spread(name: &str, value: Option<&str>) -> Result<f64> {
    match value {
        None => Ok(DEFAULT_SPREAD),
        Some(v) => match v.parse::<f64>() {
            Ok(s) if s > 0.0 && s.is_finite() => Ok(s),
            _ => Err(Error::arg(format!("bad spread `{v}` for {name}"))),
        },
    }
}

impl FromStr for ClassifierSpec {
    type Err = Error;

    /// `nn:mad`, `nn:mse`, `mlp`, `pnn[:spread]`, `rbf[:spread]` or
    /// `fusion:A+B+..` over any of those.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        if let Some(rest) = s.strip_prefix("fusion:") {
            let members = rest.split('+').map(str::parse).collect::<Result<Vec<Self>>>()?;
            if members.iter().any(|m| matches!(m, ClassifierSpec::Fusion { .. })) {
                return Err(Error::arg("fusion members cannot be fusions"));
            }
            return Ok(ClassifierSpec::Fusion {
                members,
                normalization: ScoreNormalization::MinMax,
            });
        }
        let (name, value) = match s.split_once(':') {
            Some((n, v)) => (n, Some(v)),
            None => (s.as_str(), None),
        };
        match name {
            "nn" => Ok(ClassifierSpec::Nn {
                metric: value.unwrap_or("mad").parse()?,
            }),
            "mlp" if value.is_none() => Ok(ClassifierSpec::Mlp {
                config: MlpConfig::default(),
            }),
            "pnn" => Ok(ClassifierSpec::Pnn {
                spread: parse_spread(name, value)?,
            }),
            "rbf" => Ok(ClassifierSpec::Rbf {
                spread: parse_spread(name, value)?,
                max_centers: RBF_CENTERS,
            }),
            _ => Err(Error::arg(format!(
                "unknown classifier `{s}` (nn:mad, nn:mse, mlp, pnn[:s], rbf[:s], fusion:a+b)"
            ))),
        }
    }
}
