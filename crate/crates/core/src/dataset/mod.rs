//! Face corpora: PGM ingestion, ORL directory layout, manifests, the
//! first-k train/test split and a seeded synthetic corpus.

pub mod pgm;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exec::{self, Execution};

pub const ORL_SUBJECTS: usize = 40;
pub const ORL_SAMPLES: usize = 10;

/// A grayscale face image with gray levels in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    pub pixels: DMatrix<f64>,
    pub subject: u32,
    pub sample: u32,
}

impl Image {
    pub fn new(pixels: DMatrix<f64>, subject: u32, sample: u32) -> Result<Self> {
        if pixels.is_empty() {
            return Err(Error::arg("image must have at least one pixel"));
        }
        if let Some(v) = pixels.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::arg(format!("pixel value {v} outside [0, 1]")));
        }
        Ok(Image {
            pixels,
            subject,
            sample,
        })
    }

    pub fn rows(&self) -> usize {
        self.pixels.nrows()
    }

    pub fn cols(&self) -> usize {
        self.pixels.ncols()
    }

    /// Row-major flattening, the vector form used by the eigenface basis.
    pub fn to_row_major(&self) -> Vec<f64> {
        self.pixels.transpose().as_slice().to_vec()
    }

    pub fn to_pgm_bytes(&self) -> Vec<u8> {
        pgm::encode(&self.pixels)
    }
}

/// Parse `(subject, sample)` out of a `.../sX/Y.pgm` path.
pub fn ids_from_path(path: &Path) -> Option<(u32, u32)> {
    let sample = path.file_stem()?.to_str()?.parse().ok()?;
    let dir = path.parent()?.file_name()?.to_str()?;
    let subject = dir.strip_prefix('s')?.parse().ok()?;
    Some((subject, sample))
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

fn decode_image(path: &Path, subject: u32, sample: u32) -> Result<Image> {
    let pgm = pgm::decode(&read_file(path)?, path)?;
    Ok(Image {
        pixels: pgm.to_unit_matrix(),
        subject,
        sample,
    })
}

/// Load one PGM whose path follows the ORL `sX/Y.pgm` layout.
pub fn load_pgm(path: impl AsRef<Path>) -> Result<Image> {
    let path = path.as_ref();
    let (subject, sample) = ids_from_path(path).ok_or_else(|| {
        Error::arg(format!("{} does not follow the sX/Y.pgm layout", path.display()))
    })?;
    decode_image(path, subject, sample)
}

/// Write an image as binary P5.
pub fn save_pgm(image: &Image, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, image.to_pgm_bytes()).map_err(|e| Error::io(path, e))
}

/// A complete set of `n_subjects x samples_per_subject` equally sized images,
/// ordered by `(subject, sample)`.
#[derive(Debug, Clone)]
pub struct Corpus {
    images: Vec<Image>,
    n_subjects: usize,
    samples_per_subject: usize,
}

impl Corpus {
    /// Validate and sort a set of images into a corpus.
    pub fn new(mut images: Vec<Image>) -> Result<Self> {
        let first = images
            .first()
            .ok_or_else(|| Error::arg("corpus must contain at least one image"))?;
        let dims = (first.rows(), first.cols());
        if let Some(bad) = images.iter().find(|im| (im.rows(), im.cols()) != dims) {
            return Err(Error::arg(format!(
                "image s{}/{} is {}x{}, expected {}x{}",
                bad.subject,
                bad.sample,
                bad.rows(),
                bad.cols(),
                dims.0,
                dims.1
            )));
        }
        images.sort_by_key(|im| (im.subject, im.sample));
        if let Some(w) = images
            .windows(2)
            .find(|w| (w[0].subject, w[0].sample) == (w[1].subject, w[1].sample))
        {
            return Err(Error::arg(format!(
                "duplicate image s{}/{}",
                w[0].subject, w[0].sample
            )));
        }
        let mut per_subject: BTreeMap<u32, usize> = BTreeMap::new();
        for im in &images {
            *per_subject.entry(im.subject).or_default() += 1;
        }
        let samples_per_subject = *per_subject.values().next().unwrap_or(&0);
        if let Some((s, n)) = per_subject.iter().find(|(_, &n)| n != samples_per_subject) {
            return Err(Error::arg(format!(
                "subject {s} has {n} images, expected {samples_per_subject}"
            )));
        }
        Ok(Corpus {
            n_subjects: per_subject.len(),
            samples_per_subject,
            images,
        })
    }

    pub fn images(&self) -> &[Image] {
        &self.images
    }

    pub fn n_subjects(&self) -> usize {
        self.n_subjects
    }

    pub fn samples_per_subject(&self) -> usize {
        self.samples_per_subject
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.images[0].rows(), self.images[0].cols())
    }

    /// SHA-256 over dimensions, identities and pixel bit patterns.
    pub fn checksum(&self) -> String {
        let mut h = Sha256::new();
        let (r, c) = self.dims();
        h.update((r as u64).to_le_bytes());
        h.update((c as u64).to_le_bytes());
        for im in &self.images {
            h.update(im.subject.to_le_bytes());
            h.update(im.sample.to_le_bytes());
            for v in im.pixels.iter() {
                h.update(v.to_bits().to_le_bytes());
            }
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Load the standard ORL tree: `root/s1..s40/1.pgm..10.pgm`.
pub fn load_orl(root: impl AsRef<Path>, exec: Execution) -> Result<Corpus> {
    load_layout(root.as_ref(), ORL_SUBJECTS, ORL_SAMPLES, exec)
}

/// Load an ORL-style tree with arbitrary subject/sample counts.
pub fn load_layout(root: &Path, subjects: usize, samples: usize, exec: Execution) -> Result<Corpus> {
    let entries: Vec<(PathBuf, u32, u32)> = (1..=subjects as u32)
        .flat_map(|s| (1..=samples as u32).map(move |k| (s, k)))
        .map(|(s, k)| (root.join(format!("s{s}")).join(format!("{k}.pgm")), s, k))
        .collect();
    load_entries(&entries, exec)
}

/// Load a corpus from a manifest of `path subject_id sample_id` lines.
///
/// Relative paths resolve against the manifest's directory. Blank lines and
/// lines starting with `#` are ignored.
pub fn load_manifest(manifest: impl AsRef<Path>, exec: Execution) -> Result<Corpus> {
    let manifest = manifest.as_ref();
    let text = fs::read_to_string(manifest).map_err(|e| Error::io(manifest, e))?;
    let base = manifest.parent().unwrap_or(Path::new("."));
    let mut entries = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parsed = match fields.as_slice() {
            [p, s, k] => s.parse::<u32>().ok().zip(k.parse::<u32>().ok()).map(|ids| (p, ids)),
            _ => None,
        };
        let (p, (s, k)) = parsed.ok_or_else(|| {
            Error::arg(format!(
                "{}:{}: expected `path subject_id sample_id`",
                manifest.display(),
                lineno + 1
            ))
        })?;
        entries.push((base.join(p), s, k));
    }
    load_entries(&entries, exec)
}

fn load_entries(entries: &[(PathBuf, u32, u32)], exec: Execution) -> Result<Corpus> {
    let missing: Vec<String> = entries
        .iter()
        .filter(|(p, _, _)| !p.is_file())
        .map(|(_, s, k)| format!("s{s}/{k}"))
        .collect();
    if !missing.is_empty() {
        return Err(Error::Inventory { missing });
    }
    let images = exec::try_map(exec, entries, |(p, s, k)| decode_image(p, *s, *k))?;
    Corpus::new(images)
}

/// Train/test partition.
#[derive(Debug, Clone)]
pub struct Split {
    pub gallery: Vec<Image>,
    pub probes: Vec<Image>,
}

/// Samples `1..=k` of every subject go to the gallery, the rest to probes.
pub fn split_first_k(corpus: &Corpus, k: usize) -> Result<Split> {
    let n = corpus.samples_per_subject();
    if k < 1 || k >= n {
        return Err(Error::arg(format!("split k={k} must lie in 1..{n}")));
    }
    // Rank by position within the subject so non-contiguous sample ids work.
    let mut gallery = Vec::new();
    let mut probes = Vec::new();
    for chunk in corpus.images().chunks(n) {
        gallery.extend_from_slice(&chunk[..k]);
        probes.extend_from_slice(&chunk[k..]);
    }
    Ok(Split { gallery, probes })
}

/// Deterministic stand-in corpus for when ORL is unavailable.
///
/// Each subject gets a random low-frequency cosine mixture as its base
/// pattern. Each sample shifts it slightly, scales its contrast, adds a
/// weaker mixture of its own, a brightness offset and pixel noise, and is
/// quantized to 8-bit levels so it round-trips through PGM.
const SAMPLE_TERMS: usize = 4;
const SAMPLE_AMPLITUDE: f64 = 0.06;
const CONTRAST_JITTER: f64 = 0.2;
/// Largest shift of the subject pattern, as a fraction of the image side.
const SHIFT: f64 = 0.05;

pub fn synth_corpus(
    seed: u64,
    n_subjects: usize,
    samples: usize,
    rows: usize,
    cols: usize,
) -> Result<Corpus> {
    if n_subjects == 0 || samples == 0 || rows == 0 || cols == 0 {
        return Err(Error::arg("synthetic corpus counts must all be >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut images = Vec::with_capacity(n_subjects * samples);
    for s in 1..=n_subjects {
        let base = CosineMixture::random(&mut rng, 6, 0.09);
        for k in 1..=samples {
            let pert = CosineMixture::random(&mut rng, SAMPLE_TERMS, SAMPLE_AMPLITUDE);
            let offset = rng.random_range(-0.04..0.04);
            let contrast = rng.random_range(1.0 - CONTRAST_JITTER..1.0 + CONTRAST_JITTER);
            let dx = rng.random_range(-SHIFT..SHIFT);
            let dy = rng.random_range(-SHIFT..SHIFT);
            let pixels = DMatrix::from_fn(rows, cols, |r, c| {
                let y = r as f64 / rows as f64;
                let x = c as f64 / cols as f64;
                let noise = rng.random_range(-0.02..0.02);
                let v = 0.5 + contrast * base.eval(x + dx, y + dy) + pert.eval(x, y) + offset + noise;
                (v.clamp(0.0, 1.0) * 255.0).round() / 255.0
            });
            images.push(Image {
                pixels,
                subject: s as u32,
                sample: k as u32,
            });
        }
    }
    Corpus::new(images)
}

struct CosineMixture {
    terms: Vec<(f64, f64, f64, f64)>,
}

impl CosineMixture {
    fn random(rng: &mut impl Rng, n: usize, amplitude: f64) -> Self {
        let terms = (0..n)
            .map(|_| {
                (
                    rng.random_range(0.3..1.0) * amplitude,
                    f64::from(rng.random_range(0..4u8)),
                    f64::from(rng.random_range(0..4u8)),
                    rng.random_range(0.0..std::f64::consts::TAU),
                )
            })
            .collect();
        CosineMixture { terms }
    }

    fn eval(&self, x: f64, y: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(a, fx, fy, ph)| a * (std::f64::consts::TAU * (fx * x + fy * y) + ph).cos())
            .sum()
    }
}
