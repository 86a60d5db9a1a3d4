use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const SMALL: [&str; 10] = [
    "--synth",
    "5",
    "--synth-subjects",
    "6",
    "--synth-samples",
    "4",
    "--synth-rows",
    "24",
    "--synth-cols",
    "20",
];

fn tdface(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tdface"))
        .args(args)
        .env_remove("ORL_ROOT")
        .output()
        .expect("binary runs")
}

fn with_small<'a>(cmd: &[&'a str], out: &'a str, extra: &[&'a str]) -> Vec<&'a str> {
    let mut v = cmd.to_vec();
    v.extend_from_slice(&SMALL);
    v.extend_from_slice(&["--train-per-subject", "2", "--out", out]);
    v.extend_from_slice(extra);
    v
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn configuration_errors_exit_2() {
    let o = tdface(&["evaluate"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("no dataset"));

    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    let o = tdface(&with_small(&["evaluate"], out, &["--classifier", "knn"]));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Usage"));

    let o = tdface(&with_small(&["sweep"], out, &["--axis", "spread", "--spreads", ""]));
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));

    let o = tdface(&["evaluate", "--synth", "1", "--orl", "/x", "--out", out]);
    assert_eq!(o.status.code(), Some(2));

    let o = tdface(&["evaluate", "--bogus-flag"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn data_errors_exit_3() {
    let tmp = tempfile::tempdir().unwrap();
    let tree = tmp.path().join("orl");
    fs::create_dir_all(tree.join("s1")).unwrap();
    fs::write(tree.join("s1").join("1.pgm"), b"P5\n2 2\n255\n\x01").unwrap();
    let out = tmp.path().join("out");
    let o = tdface(&["evaluate", "--orl", tree.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn extract_writes_features_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    let o = tdface(&with_small(&["extract"], out, &["--mask", "rect:3", "--reconstruct", "2"]));
    assert!(o.status.success(), "{}", stderr(&o));
    let gallery = fs::read_to_string(tmp.path().join("gallery_features.csv")).unwrap();
    let probes = fs::read_to_string(tmp.path().join("probe_features.csv")).unwrap();
    assert_eq!(gallery.lines().count(), 1 + 12);
    assert_eq!(probes.lines().count(), 1 + 12);
    assert!(gallery.lines().nth(1).unwrap().starts_with("1,1,dct,9,"));
    assert!(tmp.path().join("reconstruction_s1_3.pgm").is_file());
    let m = manifest(tmp.path());
    assert_eq!(m["command"], "extract");
    assert_eq!(m["dataset"]["checksum"].as_str().unwrap().len(), 64);

    let o = tdface(&with_small(&["extract"], out, &["--transform", "klt", "--dim", "5"]));
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(tmp.path().join("eigenbasis.json").is_file());
    let probes = fs::read_to_string(tmp.path().join("probe_features.csv")).unwrap();
    assert!(probes.lines().nth(1).unwrap().starts_with("1,3,klt,5,"));
}

#[test]
fn evaluate_is_byte_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["--classifier", "fusion:rbf:0.9+nn:mad", "--max-centers", "8", "--mask", "rect:4"];
    for dir in [&a, &b] {
        let o = tdface(&with_small(&["evaluate"], dir.path().to_str().unwrap(), &args));
        assert!(o.status.success(), "{}", stderr(&o));
        assert!(String::from_utf8_lossy(&o.stdout).contains("identification rate"));
    }
    for file in ["predictions.csv", "fusion.csv"] {
        let x = fs::read(a.path().join(file)).unwrap();
        assert_eq!(x, fs::read(b.path().join(file)).unwrap(), "{file}");
    }
    let fusion = fs::read_to_string(a.path().join("fusion.csv")).unwrap();
    assert!(fusion.starts_with("probe,subject_true,subject_pred,fused_score\n"));
    assert_eq!(fusion.lines().count(), 13);
}

#[test]
fn networks_save_models_and_histograms() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    let o = tdface(&with_small(
        &["evaluate"],
        out,
        &["--classifier", "mlp", "--epochs", "50", "--hidden", "5", "--histogram", "8", "--save-model"],
    ));
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(fs::read_to_string(tmp.path().join("model.json")).unwrap().contains("\"kind\":\"mlp\""));
    let m = manifest(tmp.path());
    // 12 probes against 6 subject outputs.
    assert_eq!(m["results"]["histogram"]["intra"], 12);
    assert_eq!(m["results"]["histogram"]["inter"], 60);
    assert_eq!(m["results"]["epochs_run"], 50);

    let o = tdface(&with_small(&["evaluate"], out, &["--histogram", "8"]));
    assert!(o.status.success());
    // 12 probes against 12 gallery images, 2 per subject.
    assert_eq!(manifest(tmp.path())["results"]["histogram"]["intra"], 24);

    let o = tdface(&with_small(&["evaluate"], out, &["--save-model"]));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_sits_between_flags_and_defaults() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.conf");
    fs::write(&cfg, "# small run\nmask = rect:2\nclassifier = nn:mse\n").unwrap();
    let out = tmp.path().join("out");
    let out_s = out.to_str().unwrap();
    let cfg_s = cfg.to_str().unwrap();

    let o = tdface(&with_small(&["evaluate", "--config", cfg_s], out_s, &[]));
    assert!(o.status.success(), "{}", stderr(&o));
    let m = manifest(&out);
    assert_eq!(m["config"]["feature"], "dct/rect:2");
    assert_eq!(m["config"]["classifier"], "nn:mse");

    let o = tdface(&with_small(&["evaluate", "--config", cfg_s], out_s, &["--mask", "rect:3"]));
    assert!(o.status.success());
    assert_eq!(manifest(&out)["config"]["feature"], "dct/rect:3");
    assert_eq!(manifest(&out)["config"]["classifier"], "nn:mse");

    fs::write(&cfg, "epochs = many\n").unwrap();
    let o = tdface(&with_small(&["evaluate", "--config", cfg_s], out_s, &[]));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn checksum_change_warns_but_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    assert!(tdface(&with_small(&["evaluate"], out, &[])).status.success());
    let mut args = with_small(&["evaluate"], out, &[]);
    args[2] = "6";
    let o = tdface(&args);
    assert!(o.status.success());
    assert!(stderr(&o).contains("warning: dataset checksum"));
}

#[test]
fn sweeps_write_one_point_per_grid_entry() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    let o = tdface(&with_small(&["sweep"], out, &["--axis", "dim", "--max-side", "5"]));
    assert!(o.status.success(), "{}", stderr(&o));
    let curve = fs::read_to_string(tmp.path().join("curve.csv")).unwrap();
    let dims: Vec<&str> = curve.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(curve.lines().next(), Some("side,dim,rate"));
    assert_eq!(dims, ["1", "4", "9", "16", "25"]);

    let o = tdface(&with_small(
        &["sweep"],
        out,
        &["--axis", "spread", "--classifier", "pnn", "--spreads", "0.2,0.4,0.6"],
    ));
    assert!(o.status.success(), "{}", stderr(&o));
    let curve = fs::read_to_string(tmp.path().join("curve.csv")).unwrap();
    assert_eq!(curve.lines().count(), 4);
    assert!(curve.starts_with("spread,dim,rate\n0.2,100,"));
}

#[test]
fn table_rows_filter_and_synth_tree() {
    let tmp = tempfile::tempdir().unwrap();
    let tree = tmp.path().join("tree");
    let o = tdface(&[
        "synth", "--seed", "3", "--subjects", "6", "--samples", "4", "--rows", "24", "--cols", "20", "--out",
        tree.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = tdface(&["evaluate", "--orl", tree.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "a partial tree is not ORL");
    assert!(stderr(&o).contains("more)"));

    let list = tmp.path().join("images.txt");
    let lines: String = (1..=6)
        .flat_map(|s| (1..=4).map(move |k| format!("tree/s{s}/{k}.pgm {s} {k}\n")))
        .collect();
    fs::write(&list, lines).unwrap();
    let out = tmp.path().join("out");
    let o = tdface(&[
        "table1",
        "--manifest",
        list.to_str().unwrap(),
        "--train-per-subject",
        "2",
        "--rows",
        "nn",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let table = fs::read_to_string(out.join("table1.csv")).unwrap();
    assert_eq!(table.lines().count(), 1 + 6);
    assert!(table.lines().all(|l| !l.contains("MLP")));
    // The gallery has 12 images, so eigenfaces stop at rank 11.
    assert!(table.lines().nth(1).unwrap().starts_with("eigenfaces,200,11,NN (MAD),86.5,"));
}
