use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Dct,
    Dft,
    LogDft,
    Klt,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::Dct => "dct",
            Source::Dft => "dft",
            Source::LogDft => "logdft",
            Source::Klt => "klt",
        })
    }
}

impl FromStr for Source {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dct" => Ok(Source::Dct),
            "dft" => Ok(Source::Dft),
            "logdft" => Ok(Source::LogDft),
            "klt" => Ok(Source::Klt),
            other => Err(Error::arg(format!("unknown feature source `{other}`"))),
        }
    }
}

/// Classifier input: masked transform coefficients or eigenface weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub coeffs: Vec<f64>,
    pub source: Source,
    pub subject: Option<u32>,
    pub sample: Option<u32>,
}

impl FeatureVector {
    pub fn new(coeffs: Vec<f64>, source: Source) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::arg("feature vector must have dim >= 1"));
        }
        Ok(FeatureVector {
            coeffs,
            source,
            subject: None,
            sample: None,
        })
    }

    pub fn labeled(mut self, subject: u32, sample: u32) -> Self {
        self.subject = Some(subject);
        self.sample = Some(sample);
        self
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }
}

/// Write `subject,sample,source,dim,c0,c1,...`. All vectors must share a dim.
pub fn write_features_csv<W: Write>(mut out: W, vectors: &[FeatureVector]) -> Result<()> {
    let dim = vectors.first().map_or(0, FeatureVector::dim);
    if vectors.iter().any(|v| v.dim() != dim) {
        return Err(Error::arg("feature vectors in one CSV must share a dimension"));
    }
    let io = |e| Error::io("<features csv>", e);
    let mut header = String::from("subject,sample,source,dim");
    for i in 0..dim {
        header += &format!(",c{i}");
    }
    writeln!(out, "{header}").map_err(io)?;
    for v in vectors {
        let mut line = format!(
            "{},{},{},{}",
            v.subject.map(|s| s.to_string()).unwrap_or_default(),
            v.sample.map(|s| s.to_string()).unwrap_or_default(),
            v.source,
            v.dim()
        );
        for c in &v.coeffs {
            line += &format!(",{c}");
        }
        writeln!(out, "{line}").map_err(io)?;
    }
    Ok(())
}

/// Inverse of [`write_features_csv`].
pub fn read_features_csv<R: BufRead>(input: R) -> Result<Vec<FeatureVector>> {
    let mut lines = input.lines();
    let bad = |n: usize, what: &str| Error::arg(format!("features csv line {n}: {what}"));
    match lines.next() {
        Some(Ok(h)) if h.starts_with("subject,sample,source,dim") => {}
        _ => return Err(bad(1, "missing header")),
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let n = i + 2;
        let line = line.map_err(|e| Error::io("<features csv>", e))?;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() < 5 {
            return Err(bad(n, "too few fields"));
        }
        let opt = |s: &str| -> Result<Option<u32>> {
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse().map(Some).map_err(|_| bad(n, "bad id"))
            }
        };
        let dim: usize = f[3].parse().map_err(|_| bad(n, "bad dim"))?;
        let coeffs = f[4..]
            .iter()
            .map(|s| s.parse::<f64>().map_err(|_| bad(n, "bad coefficient")))
            .collect::<Result<Vec<_>>>()?;
        if coeffs.len() != dim {
            return Err(bad(n, "dim does not match coefficient count"));
        }
        let mut v = FeatureVector::new(coeffs, f[2].parse()?)?;
        v.subject = opt(f[0])?;
        v.sample = opt(f[1])?;
        out.push(v);
    }
    Ok(out)
}
