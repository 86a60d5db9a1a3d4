use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::{json, Value};
use tdface::classifiers::MlpConfig;
use tdface::dataset::{load_manifest, load_orl, pgm, save_pgm, split_first_k, synth_corpus, Corpus, Split};
use tdface::eval::{
    curve_peak, default_spread_grid, distance_histograms, evaluate_trained, pairwise_distances, rect_grid,
    sector_grid, spread_grid, sweep_dimension, sweep_spread, table1_report, write_curve_csv, write_fusion_csv,
    write_histogram_csv, write_predictions_csv, write_table1_csv, ClassifierSpec, DatasetInfo, FeatureBase,
    FeatureCache, FeatureSpec, RunManifest, Selection, Table1Config, Trained, RBF_CENTERS,
};
use tdface::fusion::ScoreNormalization;
use tdface::transforms::{
    dct_lowpass, write_features_csv, ComplexReduction, TransformKind, ZonalMask, LOG_OFFSET,
};
use tdface::{Error, Execution, Result};

use crate::settings::Settings;
use crate::{Cli, Command, DataArgs, FeatureArgs, TrainArgs};

const DEFAULT_OUT: &str = "tdface-out";
const MANIFEST: &str = "manifest.json";

pub fn run(cli: Cli) -> Result<()> {
    let settings = Settings::load(cli.config.as_deref())?;
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let ctx = Ctx { settings, exec };
    match cli.command {
        Command::Extract {
            data,
            feature,
            reconstruct,
            out,
        } => ctx.extract(&data, &feature, reconstruct, out),
        Command::Evaluate {
            data,
            feature,
            classifier,
            train,
            histogram,
            save_model,
            out,
        } => ctx.evaluate(&data, &feature, classifier, &train, histogram, save_model, out),
        Command::Sweep {
            data,
            feature,
            classifier,
            train,
            axis,
            max_side,
            shape,
            spreads,
            out,
        } => ctx.sweep(&data, &feature, classifier, &train, axis, max_side, shape, spreads, out),
        Command::Synth {
            seed,
            subjects,
            samples,
            rows,
            cols,
            out,
        } => write_synth(seed, subjects, samples, rows, cols, &out),
        Command::Table1 {
            data,
            train,
            spreads,
            rows,
            out,
        } => ctx.table1(&data, &train, spreads, rows, out),
    }
}

fn write_synth(seed: u64, subjects: usize, samples: usize, rows: usize, cols: usize, out: &Path) -> Result<()> {
    let corpus = synth_corpus(seed, subjects, samples, rows, cols)?;
    for im in corpus.images() {
        let dir = out.join(format!("s{}", im.subject));
        std::fs::create_dir_all(&dir).map_err(|e| Error::Io {
            path: dir.clone(),
            source: e,
        })?;
        save_pgm(im, dir.join(format!("{}.pgm", im.sample)))?;
    }
    println!("wrote {} images to {} (checksum {})", corpus.images().len(), out.display(), corpus.checksum());
    Ok(())
}

fn arg(msg: impl Into<String>) -> Error {
    Error::Argument(msg.into())
}

struct Dataset {
    corpus: Corpus,
    split: Split,
    info: DatasetInfo,
}

/// Resolved training knobs shared by every classifier kind.
#[derive(Debug, Clone, Copy)]
struct Overrides {
    seed: u64,
    gamma: f64,
    epochs: usize,
    hidden: usize,
    max_centers: usize,
    normalization: ScoreNormalization,
}

impl Overrides {
    fn mlp(&self) -> MlpConfig {
        MlpConfig {
            seed: self.seed,
            gamma: self.gamma,
            epochs: self.epochs,
            hidden: self.hidden,
            ..MlpConfig::default()
        }
    }

    fn apply(&self, spec: &ClassifierSpec) -> ClassifierSpec {
        match spec {
            ClassifierSpec::Mlp { .. } => ClassifierSpec::Mlp { config: self.mlp() },
            ClassifierSpec::Rbf { spread, .. } => ClassifierSpec::Rbf {
                spread: *spread,
                max_centers: self.max_centers,
            },
            ClassifierSpec::Fusion { members, .. } => ClassifierSpec::Fusion {
                members: members.iter().map(|m| self.apply(m)).collect(),
                normalization: self.normalization,
            },
            other => other.clone(),
        }
    }

    fn to_json(self) -> Value {
        json!({
            "seed": self.seed,
            "gamma": self.gamma,
            "epochs": self.epochs,
            "hidden": self.hidden,
            "max_centers": self.max_centers,
            "normalization": format!("{:?}", self.normalization).to_lowercase(),
        })
    }
}

fn parse_spreads(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() == 3 {
        let num = |s: &str| s.trim().parse::<f64>().map_err(|_| arg(format!("bad spread grid `{text}`")));
        return spread_grid(num(parts[0])?, num(parts[2])?, num(parts[1])?);
    }
    let grid = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| arg(format!("bad spread `{s}`"))))
        .collect::<Result<Vec<_>>>()?;
    if grid.is_empty() {
        return Err(arg("empty spread grid"));
    }
    if let Some(s) = grid.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
        return Err(arg(format!("spread must be > 0, got {s}")));
    }
    Ok(grid)
}

fn write_file(path: &Path, fill: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<()> {
    let mut buf = Vec::new();
    fill(&mut buf)?;
    std::fs::write(path, buf).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

struct Ctx {
    settings: Settings,
    exec: Execution,
}

impl Ctx {
    fn load(&self, d: &DataArgs) -> Result<Dataset> {
        let s = &self.settings;
        let flags_given = d.orl.is_some() || d.manifest.is_some() || d.synth.is_some();
        let (orl, manifest, synth) = if flags_given {
            (d.orl.clone(), d.manifest.clone(), d.synth)
        } else {
            (
                s.pick_opt::<PathBuf>(None, "orl")?,
                s.pick_opt::<PathBuf>(None, "manifest")?,
                s.pick_opt::<u64>(None, "synth")?,
            )
        };
        let given = [orl.is_some(), manifest.is_some(), synth.is_some()];
        let orl = match given.iter().filter(|g| **g).count() {
            0 => match std::env::var_os("ORL_ROOT") {
                Some(root) => Some(PathBuf::from(root)),
                None => {
                    return Err(arg(
                        "no dataset: pass --orl DIR, --manifest FILE or --synth SEED, or set ORL_ROOT",
                    ))
                }
            },
            1 => orl,
            _ => return Err(arg("choose exactly one of --orl, --manifest and --synth")),
        };
        let (corpus, source) = if let Some(root) = orl {
            if !root.is_dir() {
                return Err(arg(format!("dataset directory {} does not exist", root.display())));
            }
            (load_orl(&root, self.exec)?, root.display().to_string())
        } else if let Some(m) = manifest {
            (load_manifest(&m, self.exec)?, m.display().to_string())
        } else {
            let seed = synth.expect("one source is set");
            let subjects = s.pick(d.synth_subjects, "synth_subjects", 40)?;
            let samples = s.pick(d.synth_samples, "synth_samples", 10)?;
            let rows = s.pick(d.synth_rows, "synth_rows", 112)?;
            let cols = s.pick(d.synth_cols, "synth_cols", 92)?;
            (
                synth_corpus(seed, subjects, samples, rows, cols)?,
                format!("synth:{seed}:{subjects}x{samples}:{rows}x{cols}"),
            )
        };
        let k = s.pick(d.train_per_subject, "train_per_subject", 5)?;
        let split = split_first_k(&corpus, k)?;
        let info = DatasetInfo::of(&corpus, source);
        Ok(Dataset { corpus, split, info })
    }

    fn feature(&self, f: &FeatureArgs) -> Result<FeatureSpec> {
        let s = &self.settings;
        let transform: String = s.pick(f.transform.clone(), "transform", "dct".into())?;
        if matches!(transform.to_ascii_lowercase().as_str(), "klt" | "eigenfaces" | "pca") {
            return Ok(FeatureSpec::eigen(s.pick(f.dim, "dim", 100)?));
        }
        let kind: TransformKind = transform.parse()?;
        let mut mask: ZonalMask = s.pick(f.mask.clone(), "mask", "rect:10".to_string())?.parse()?;
        if let Some(cut) = s.pick_opt(f.low_cut, "low_cut")? {
            mask = mask.with_low_cut(cut)?;
        }
        let reduction = match s.pick(f.complex.clone(), "complex", "modulus".into())?.as_str() {
            "modulus" | "abs" => ComplexReduction::Modulus,
            "reim" | "interleaved" => ComplexReduction::Interleaved,
            other => return Err(arg(format!("unknown complex handling `{other}` (modulus, reim)"))),
        };
        let offset = s.pick(f.offset, "offset", LOG_OFFSET)?;
        if !(offset > 0.0 && offset.is_finite()) {
            return Err(arg(format!("offset must be > 0, got {offset}")));
        }
        Ok(FeatureSpec {
            base: FeatureBase::Transform {
                kind,
                offset,
                reduction,
            },
            selection: Selection::Mask { mask },
        })
    }

    fn overrides(&self, t: &TrainArgs) -> Result<Overrides> {
        let s = &self.settings;
        let o = Overrides {
            seed: s.pick(t.seed, "seed", 0)?,
            gamma: s.pick(t.gamma, "gamma", 0.9)?,
            epochs: s.pick(t.epochs, "epochs", 15000)?,
            hidden: s.pick(t.hidden, "hidden", 40)?,
            max_centers: s.pick(t.max_centers, "max_centers", RBF_CENTERS)?,
            normalization: match s.pick(t.normalization.clone(), "normalization", "minmax".into())?.as_str() {
                "minmax" => ScoreNormalization::MinMax,
                "zscore" => ScoreNormalization::ZScore,
                other => return Err(arg(format!("unknown normalization `{other}` (minmax, zscore)"))),
            },
        };
        if !(0.0..=1.0).contains(&o.gamma) {
            return Err(arg(format!("gamma must lie in [0, 1], got {}", o.gamma)));
        }
        if o.epochs == 0 || o.hidden == 0 || o.max_centers == 0 {
            return Err(arg("epochs, hidden and max-centers must be >= 1"));
        }
        Ok(o)
    }

    fn classifier(&self, flag: Option<String>, default: &str, o: &Overrides) -> Result<ClassifierSpec> {
        let spec: ClassifierSpec = self.settings.pick(flag, "classifier", default.to_string())?.parse()?;
        Ok(o.apply(&spec))
    }

    fn out_dir(&self, out: Option<PathBuf>) -> Result<PathBuf> {
        let dir = self.settings.pick(out, "out", PathBuf::from(DEFAULT_OUT))?;
        std::fs::create_dir_all(&dir).map_err(|e| Error::Io {
            path: dir.clone(),
            source: e,
        })?;
        Ok(dir)
    }

    #[allow(clippy::too_many_arguments)]
    fn finish(
        &self,
        dir: &Path,
        command: &str,
        seed: u64,
        config: Value,
        data: &Dataset,
        results: Value,
        outputs: Vec<String>,
        start: Instant,
    ) -> Result<()> {
        let path = dir.join(MANIFEST);
        if let Ok(prior) = RunManifest::load(&path) {
            if prior.dataset.checksum != data.info.checksum {
                eprintln!(
                    "warning: dataset checksum {} differs from the previous run in {} ({})",
                    data.info.checksum,
                    dir.display(),
                    prior.dataset.checksum
                );
            }
        }
        RunManifest {
            tool: "tdface".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            seed,
            config,
            dataset: data.info.clone(),
            results,
            outputs,
            runtime_secs: start.elapsed().as_secs_f64(),
        }
        .save(path)
    }

    fn extract(&self, d: &DataArgs, f: &FeatureArgs, reconstruct: Option<usize>, out: Option<PathBuf>) -> Result<()> {
        let start = Instant::now();
        let feature = self.feature(f)?;
        let reconstruct = self.settings.pick(reconstruct, "reconstruct", 0)?;
        let data = self.load(d)?;
        let dir = self.out_dir(out)?;
        let cache = FeatureCache::build(&data.split, feature.base, self.exec)?;
        let (gallery, probes) = cache.select(&feature.selection, self.exec)?;
        let mut outputs = vec!["gallery_features.csv".to_string(), "probe_features.csv".to_string()];
        write_file(&dir.join(&outputs[0]), |b| write_features_csv(b, &gallery))?;
        write_file(&dir.join(&outputs[1]), |b| write_features_csv(b, &probes))?;

        let mut results = json!({ "gallery": gallery.len(), "probes": probes.len(), "dim": gallery[0].dim() });
        if let (FeatureCache::Klt { basis, .. }, Selection::Leading { dim }) = (&cache, feature.selection) {
            basis.truncated(dim)?.save(dir.join("eigenbasis.json"))?;
            outputs.push("eigenbasis.json".into());
        }
        if reconstruct > 0 {
            let (FeatureBase::Transform { kind: TransformKind::Dct, .. }, Selection::Mask { mask }) =
                (feature.base, feature.selection)
            else {
                return Err(arg("--reconstruct needs DCT features"));
            };
            let mut errors = Vec::new();
            for im in data.split.probes.iter().take(reconstruct) {
                let (rec, err) = dct_lowpass(&im.pixels, &mask)?;
                let name = format!("reconstruction_s{}_{}.pgm", im.subject, im.sample);
                write_file(&dir.join(&name), |b| {
                    b.extend(pgm::encode(&rec));
                    Ok(())
                })?;
                errors.push(json!({ "image": name, "relative_error": err }));
                outputs.push(name);
            }
            results["reconstructions"] = Value::Array(errors);
        }
        println!(
            "wrote {} gallery and {} probe vectors of dimension {} ({}) to {}",
            gallery.len(),
            probes.len(),
            gallery[0].dim(),
            feature,
            dir.display()
        );
        let config = json!({ "feature": feature.to_string(), "feature_spec": feature, "reconstruct": reconstruct });
        self.finish(&dir, "extract", 0, config, &data, results, outputs, start)
    }

    #[allow(clippy::too_many_arguments)]
    fn evaluate(
        &self,
        d: &DataArgs,
        f: &FeatureArgs,
        classifier: Option<String>,
        t: &TrainArgs,
        histogram: Option<usize>,
        save_model: bool,
        out: Option<PathBuf>,
    ) -> Result<()> {
        let start = Instant::now();
        let feature = self.feature(f)?;
        let o = self.overrides(t)?;
        let spec = self.classifier(classifier, "nn:mad", &o)?;
        let histogram = self.settings.pick_opt(histogram, "histogram")?;
        if histogram == Some(0) {
            return Err(arg("--histogram needs at least one bin"));
        }
        let data = self.load(d)?;
        let dir = self.out_dir(out)?;
        let cache = FeatureCache::build(&data.split, feature.base, self.exec)?;
        let (gallery, probes) = cache.select(&feature.selection, self.exec)?;
        let trained = Trained::fit(&spec, &gallery)?;
        let mut result = evaluate_trained(&trained, &spec, &probes, self.exec)?;
        result.feature = feature.to_string();

        let mut outputs = vec!["predictions.csv".to_string()];
        write_file(&dir.join("predictions.csv"), |b| write_predictions_csv(b, &result))?;
        if matches!(spec, ClassifierSpec::Fusion { .. }) {
            write_file(&dir.join("fusion.csv"), |b| write_fusion_csv(b, &result))?;
            outputs.push("fusion.csv".into());
        }
        let mut results = json!({});
        if let Some(bins) = histogram {
            let labels: Vec<u32> = probes.iter().map(|p| p.subject.unwrap_or(0)).collect();
            let (matrix, models) = match &trained {
                Trained::Nn(_, metric) => (
                    pairwise_distances(&gallery, &probes, *metric, self.exec)?,
                    gallery.iter().map(|g| g.subject.unwrap_or(0)).collect::<Vec<_>>(),
                ),
                Trained::Fusion(..) => return Err(arg("--histogram is not available for fusions")),
                single => {
                    let sets = probes
                        .iter()
                        .map(|p| Ok(single.scores(p)?.expect("single classifier")))
                        .collect::<Result<Vec<_>>>()?;
                    let models = sets[0].subjects.clone();
                    (sets.into_iter().map(|s| s.scores).collect(), models)
                }
            };
            let h = distance_histograms(&matrix, &labels, &models, bins)?;
            write_file(&dir.join("histogram.csv"), |b| write_histogram_csv(b, &h))?;
            outputs.push("histogram.csv".into());
            results["histogram"] = json!({
                "intra": h.intra.len(),
                "inter": h.inter.len(),
                "intra_fit": h.intra_fit,
                "inter_fit": h.inter_fit,
                "overlap": h.overlap(),
            });
        }
        if save_model {
            let model = trained
                .to_saved()
                .ok_or_else(|| arg("--save-model needs an mlp, pnn or rbf classifier"))?;
            model.save(dir.join("model.json"))?;
            outputs.push("model.json".into());
        }
        let correct = result.outcomes.iter().filter(|o| o.subject == o.predicted).count();
        println!(
            "{} {} dim {}: identification rate {:.1}% ({}/{} probes)",
            result.feature,
            spec,
            result.dim,
            result.identification_rate,
            correct,
            result.outcomes.len()
        );
        results["identification_rate"] = json!(result.identification_rate);
        results["correct"] = json!(correct);
        results["probes"] = json!(result.outcomes.len());
        results["dim"] = json!(result.dim);
        if let Trained::Mlp(m) = &trained {
            results["final_training_loss"] = json!(m.loss_history.last());
            results["epochs_run"] = json!(m.loss_history.len());
        }
        let config = json!({
            "feature": feature.to_string(),
            "feature_spec": feature,
            "classifier": spec.to_string(),
            "classifier_spec": spec,
            "training": o.to_json(),
        });
        self.finish(&dir, "evaluate", o.seed, config, &data, results, outputs, start)
    }

    #[allow(clippy::too_many_arguments)]
    fn sweep(
        &self,
        d: &DataArgs,
        f: &FeatureArgs,
        classifier: Option<String>,
        t: &TrainArgs,
        axis: Option<String>,
        max_side: Option<usize>,
        shape: Option<String>,
        spreads: Option<String>,
        out: Option<PathBuf>,
    ) -> Result<()> {
        let start = Instant::now();
        let s = &self.settings;
        let axis: String = s.pick(axis, "axis", "dim".into())?;
        let feature = self.feature(f)?;
        let o = self.overrides(t)?;
        let (data, curve, x_name, spec, grid) = match axis.as_str() {
            "dim" => {
                let spec = self.classifier(classifier, "nn:mad", &o)?;
                let max_side = s.pick(max_side, "max_side", 30)?;
                if max_side == 0 {
                    return Err(arg("empty dimension grid (max-side 0)"));
                }
                let shape: String = s.pick(shape, "shape", "rect".into())?;
                let data = self.load(d)?;
                let cache = FeatureCache::build(&data.split, feature.base, self.exec)?;
                let (rows, cols) = data.corpus.dims();
                let (grid, x_name): (Vec<Selection>, &str) = match (feature.base, shape.as_str()) {
                    (FeatureBase::Klt, _) => {
                        let rank = cache.rank().unwrap_or(0);
                        let dims = (1..=max_side).map(|n| n * n).filter(|&n| n <= rank);
                        (dims.map(|dim| Selection::Leading { dim }).collect(), "dim")
                    }
                    (_, "rect" | "sector") => {
                        let masks = if shape == "rect" {
                            rect_grid(max_side)?
                        } else {
                            sector_grid(max_side)?
                        };
                        let low = match feature.selection {
                            Selection::Mask { mask } => mask.low_cut,
                            Selection::Leading { .. } => 0.0,
                        };
                        let mut fitting = Vec::new();
                        for m in masks {
                            let m = m.with_low_cut(low)?;
                            if m.check_fits(rows, cols).is_ok() && m.dim(rows, cols).is_ok_and(|n| n > 0) {
                                fitting.push(Selection::Mask { mask: m });
                            }
                        }
                        let x = if shape == "rect" { "side" } else { "radius" };
                        (fitting, x)
                    }
                    (_, other) => return Err(arg(format!("unknown mask family `{other}` (rect, sector)"))),
                };
                if grid.is_empty() {
                    return Err(arg("no grid point fits the image size"));
                }
                let curve = sweep_dimension(&cache, &grid, &spec, self.exec)?;
                (data, curve, x_name, spec, json!(grid))
            }
            "spread" => {
                let spec = self.classifier(classifier, "rbf", &o)?;
                if !spec.has_spread() {
                    return Err(arg(format!("classifier `{spec}` has no spread to sweep")));
                }
                let grid = match s.pick_opt(spreads, "spreads")? {
                    Some(text) => parse_spreads(&text)?,
                    None => default_spread_grid(),
                };
                let data = self.load(d)?;
                let cache = FeatureCache::build(&data.split, feature.base, self.exec)?;
                let (g, p) = cache.select(&feature.selection, self.exec)?;
                let curve = sweep_spread(&g, &p, &spec, &grid, self.exec)?;
                (data, curve, "spread", spec, json!(grid))
            }
            other => return Err(arg(format!("unknown sweep axis `{other}` (dim, spread)"))),
        };
        let dir = self.out_dir(out)?;
        self.write_sweep(&dir, &axis, x_name, &curve, &spec, &feature, &o, &data, grid, start)
    }

    #[allow(clippy::too_many_arguments)]
    fn write_sweep(
        &self,
        dir: &Path,
        axis: &str,
        x_name: &str,
        curve: &[tdface::eval::CurvePoint],
        spec: &ClassifierSpec,
        feature: &FeatureSpec,
        o: &Overrides,
        data: &Dataset,
        grid: Value,
        start: Instant,
    ) -> Result<()> {
        write_file(&dir.join("curve.csv"), |b| write_curve_csv(b, x_name, curve))?;
        let peak = curve_peak(curve).expect("sweeps are non-empty");
        for p in curve {
            println!("{x_name} {:<8} dim {:<5} rate {:.1}%", p.x, p.dim, p.rate);
        }
        println!("peak: {:.1}% at {x_name} {} (dim {})", peak.rate, peak.x, peak.dim);
        let config = json!({
            "axis": axis,
            "feature": feature.to_string(),
            "feature_spec": feature,
            "classifier": if spec.has_spread() { spec.label() } else { spec.to_string() },
            "classifier_spec": spec,
            "training": o.to_json(),
            "grid": grid,
        });
        let results = json!({ "peak": peak, "points": curve.len() });
        self.finish(dir, "sweep", o.seed, config, data, results, vec!["curve.csv".into()], start)
    }

    fn table1(
        &self,
        d: &DataArgs,
        t: &TrainArgs,
        spreads: Option<String>,
        rows: Option<String>,
        out: Option<PathBuf>,
    ) -> Result<()> {
        let start = Instant::now();
        let s = &self.settings;
        let o = self.overrides(t)?;
        let spreads = match s.pick_opt(spreads, "spreads")? {
            Some(text) => parse_spreads(&text)?,
            None => default_spread_grid(),
        };
        let nn_only = match s.pick(rows, "rows", "all".to_string())?.as_str() {
            "all" => false,
            "nn" => true,
            other => return Err(arg(format!("unknown row filter `{other}` (all, nn)"))),
        };
        let data = self.load(d)?;
        let dir = self.out_dir(out)?;
        let cfg = Table1Config {
            gallery_per_subject: s.pick(d.train_per_subject, "train_per_subject", 5)?,
            mlp: o.mlp(),
            spreads,
            max_centers: o.max_centers,
            nn_only,
        };
        let table = table1_report(&data.corpus, &cfg, self.exec)?;
        write_file(&dir.join("table1.csv"), |b| write_table1_csv(b, &table))?;
        println!("{:<11} {:>4} {:>5}  {:<13} {:>9} {:>9}", "feature", "dim", "used", "classifier", "reference", "measured");
        for r in &table {
            let spread = r.spread.map(|s| format!("  (spread {s})")).unwrap_or_default();
            println!(
                "{:<11} {:>4} {:>5}  {:<13} {:>9.1} {:>9.1}{spread}",
                r.feature, r.dim, r.used_dim, r.classifier, r.reference, r.measured
            );
        }
        let config = json!({
            "rows": if nn_only { "nn" } else { "all" },
            "table": cfg,
            "training": o.to_json(),
        });
        self.finish(&dir, "table1", o.seed, config, &data, json!(table), vec!["table1.csv".into()], start)
    }
}
