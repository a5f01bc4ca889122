use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures/synthetic")
}

fn capsift(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_capsift")).args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_writes_reports() {
    let out = tempfile::tempdir().unwrap();
    let conf = fixture().join("capsift.conf");
    let o = capsift(&[
        "run",
        "--config",
        path(&conf),
        "--out",
        path(out.path()),
        "--task",
        "binary",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let reports = fs::read_to_string(out.path().join("reports.csv")).unwrap();
    // header + 2 topics x 1 task x 1 embedding x 7 models
    assert_eq!(reports.lines().count(), 1 + 14);
    assert!(reports.lines().skip(1).all(|l| l.split(',').nth(1) == Some("binary")));
    let resolved = fs::read_to_string(out.path().join("config.resolved")).unwrap();
    assert!(resolved.contains("task = binary"));
}

#[test]
fn flags_override_config() {
    let out = tempfile::tempdir().unwrap();
    let conf = fixture().join("capsift.conf");
    let o = capsift(&[
        "run",
        "--config",
        path(&conf),
        "--out",
        path(out.path()),
        "--topics",
        "flatearth",
        "--seed",
        "99",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let reports = fs::read_to_string(out.path().join("reports.csv")).unwrap();
    assert!(reports.lines().skip(1).all(|l| l.starts_with("flatearth,")));
    let meta = fs::read_to_string(out.path().join("run_meta.txt")).unwrap();
    assert!(meta.contains("master_seed = 99"));
}

#[test]
fn skipped_topic_exits_2() {
    let out = tempfile::tempdir().unwrap();
    let conf = fixture().join("capsift.conf");
    let o = capsift(&[
        "run",
        "--config",
        path(&conf),
        "--out",
        path(out.path()),
        "--topics",
        "moon,vaccines",
        "--task",
        "three",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let log = fs::read_to_string(out.path().join("exclusions.log")).unwrap();
    assert!(log.lines().any(|l| l.starts_with("skipped\tmoon")));
}

#[test]
fn bad_config_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("bad.conf");
    fs::write(&conf, "manifest = m.csv\nwhat = 3\n").unwrap();
    let o = capsift(&["run", "--config", path(&conf)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    let o = capsift(&["run", "--config", path(&dir.path().join("absent.conf"))]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn stats_prints_boxplot_rows() {
    let manifest = fixture().join("manifest.csv");
    let o = capsift(&["stats", "--manifest", path(&manifest), "--field", "views"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("topic,label,field,n,min,q1,median,q3,max"));
    // 2 topics x 3 classes
    assert_eq!(lines.count(), 6);
}

#[test]
fn vectorize_exports_one_row_per_usable_video() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("vectors.csv");
    let f = fixture();
    let o = capsift(&[
        "vectorize",
        "--embedding",
        path(&f.join("synth24.glove.txt")),
        "--captions",
        path(&f.join("captions")),
        "--manifest",
        path(&f.join("manifest.csv")),
        "--out",
        path(&out),
    ]);
    assert_eq!(o.status.code(), Some(0));
    // short, missing and out-of-vocabulary captions are reported, not exported
    assert_eq!(String::from_utf8_lossy(&o.stderr).matches("skipped ").count(), 3);
    let text = fs::read_to_string(&out).unwrap();
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    assert_eq!(header[..3], ["video_id", "label", "coverage"]);
    assert_eq!(header.len(), 3 + 24);
    assert_eq!(text.lines().count(), 1 + 64);
    for line in text.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), header.len());
        let coverage: f64 = fields[2].parse().unwrap();
        assert!(coverage > 0.0 && coverage <= 1.0);
    }
}
