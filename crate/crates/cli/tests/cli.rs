use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const MINIMAL_TRACE: &str = "[operator]\nkind = \"laplacian\"\n";

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_graded-weyl"));
    c.env_remove("GRADED_WEYL_CACHE");
    c
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn run(cmd: &str, configs: &[&Path], out: &Path, extra: &[&str]) -> Output {
    let mut c = bin();
    c.arg(cmd).arg("--config").args(configs).arg("--out").arg(out).args(extra);
    c.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// The single run directory under `out`.
fn run_dir(out: &Path) -> PathBuf {
    let dirs: Vec<PathBuf> = fs::read_dir(out).unwrap().map(|e| e.unwrap().path()).filter(|p| p.is_dir()).collect();
    assert_eq!(dirs.len(), 1, "{dirs:?}");
    dirs[0].clone()
}

fn summary_value(dir: &Path, quantity: &str) -> f64 {
    let text = fs::read_to_string(dir.join("summary.csv")).unwrap();
    let line = text.lines().find(|l| l.starts_with(&format!("{quantity},"))).unwrap_or_else(|| panic!("{quantity} missing:\n{text}"));
    line.split(',').nth(1).unwrap().parse().unwrap()
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    v.sort();
    v
}

#[test]
fn minimal_trace_and_cache_hit() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "trace.toml", MINIMAL_TRACE);
    let out = tmp.path().join("out");
    let first = run("trace", &[&cfg], &out, &[]);
    assert!(first.status.success(), "{}", stderr(&first));
    assert!(stdout(&first).contains("cache miss"));
    let dir = run_dir(&out);
    let v = summary_value(&dir, "tau_exp[sphere]");
    assert!((v - 0.2820948).abs() < 1e-7, "{v}");
    let before = snapshot(&dir);
    let second = run("trace", &[&cfg], &out, &[]);
    assert!(second.status.success());
    assert!(stdout(&second).contains("cache hit"));
    assert_eq!(snapshot(&dir), before);
    let ledger = fs::read_to_string(out.join("ledger.csv")).unwrap();
    let lines: Vec<&str> = ledger.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("config_hash,command,version,status"));
    assert!(lines[1].contains(",miss,") && lines[2].contains(",hit,"));
}

#[test]
fn recomputation_is_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "spectrum.toml",
        "[operator]\nkind = \"laplacian\"\n[function]\nkind = \"gaussian\"\ncenter = [0.0]\nwidths = [1.0]\n[numeric]\nhalf_widths = [12.0]\npoints = [256]\nseed = 3\n",
    );
    let out = tmp.path().join("out");
    assert!(run("spectrum", &[&cfg], &out, &[]).status.success());
    let dir = run_dir(&out);
    let before = snapshot(&dir);
    let again = run("spectrum", &[&cfg], &out, &["--no-cache", "--threads", "1"]);
    assert!(again.status.success());
    assert!(stdout(&again).contains("cache miss"));
    assert_eq!(snapshot(&dir), before);
    assert!(before.iter().any(|(n, _)| n == "singular_values.csv"));
}

#[test]
fn outputs_embed_hash_and_version() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "weyl.toml",
        "[operator]\nkind = \"laplacian\"\n[function]\nkind = \"gaussian\"\ncenter = [0.0]\nwidths = [1.0]\n[numeric]\nhalf_widths = [50.26548245743669]\npoints = [2048]\nwindow = [5, 60]\n",
    );
    let out = tmp.path().join("out");
    let o = run("weyl", &[&cfg], &out, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let dir = run_dir(&out);
    let name = dir.file_name().unwrap().to_string_lossy().into_owned();
    let version = format!("graded-weyl {}", env!("CARGO_PKG_VERSION"));
    for (file, bytes) in snapshot(&dir) {
        let text = String::from_utf8(bytes).unwrap();
        assert!(text.contains(&version), "{file} lacks the version");
        assert!(text.contains(&format!("config {name}")), "{file} lacks the hash");
    }
    let sv = fs::read_to_string(dir.join("singular_values.csv")).unwrap();
    assert!(sv.lines().any(|l| l == "k,mu"));
    let echoed = fs::read_to_string(dir.join("config.toml")).unwrap();
    assert!(echoed.contains("support_threshold"), "defaults are echoed");
    assert!(summary_value(&dir, "predicted_constant") > 0.6);
    assert!(fs::read_to_string(dir.join("plot.svg")).unwrap().contains("<svg"));
}

#[test]
fn nonpositive_gamma_exits_with_schema_code() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "bad.toml", "[operator]\nkind = \"laplacian\"\n[numeric]\ngamma = 0.0\n");
    let o = run("trace", &[&cfg], &tmp.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("numeric.gamma"), "{}", stderr(&o));
    let ledger = fs::read_to_string(tmp.path().join("out/ledger.csv")).unwrap();
    assert!(ledger.contains("schema_error"));
}

#[test]
fn unknown_and_mistyped_keys_are_schema_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let typo = write_config(tmp.path(), "typo.toml", "[operator]\nkind = \"laplacian\"\ndimension = 2\n");
    let o = run("trace", &[&typo], &tmp.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("operator") && stderr(&o).contains("dimension"), "{}", stderr(&o));
    let mistyped = write_config(tmp.path(), "type.toml", "[operator]\nkind = \"laplacian\"\ndim = \"two\"\n");
    let o = run("trace", &[&mistyped], &tmp.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("operator.dim"), "{}", stderr(&o));
}

#[test]
fn numeric_failure_names_the_stage() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "coarse.toml",
        "[operator]\nkind = \"laplacian\"\n[function]\nkind = \"gaussian\"\ncenter = [0.0]\nwidths = [1.0]\n[numeric]\nhalf_widths = [12.0]\npoints = [64]\n",
    );
    let o = run("weyl", &[&cfg], &tmp.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("stage weyl_experiment"), "{}", stderr(&o));
}

#[test]
fn cache_root_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "trace.toml", MINIMAL_TRACE);
    let cache = tmp.path().join("cache");
    let go = |out: &str| {
        let mut c = bin();
        c.env("GRADED_WEYL_CACHE", &cache).arg("trace").arg("--config").arg(&cfg).arg("--out").arg(tmp.path().join(out));
        c.output().unwrap()
    };
    let a = go("a");
    assert!(stdout(&a).contains("cache miss"));
    let b = go("b");
    assert!(stdout(&b).contains("cache hit"), "{}", stdout(&b));
    assert_eq!(snapshot(&run_dir(&tmp.path().join("a"))), snapshot(&run_dir(&tmp.path().join("b"))));
    assert_eq!(snapshot(&run_dir(&cache)), snapshot(&run_dir(&tmp.path().join("a"))));
}

#[test]
fn several_configs_share_the_pool() {
    let tmp = tempfile::tempdir().unwrap();
    let a = write_config(tmp.path(), "a.toml", MINIMAL_TRACE);
    let b = write_config(tmp.path(), "b.toml", "[operator]\nkind = \"laplacian\"\ndim = 2\n");
    let bad = write_config(tmp.path(), "c.toml", "[operator]\nkind = \"laplacian\"\ndim = 0\n");
    let out = tmp.path().join("out");
    let o = run("residue", &[&a, &b, &bad], &out, &["--threads", "2"]);
    assert_eq!(o.status.code(), Some(2));
    let ledger = fs::read_to_string(out.join("ledger.csv")).unwrap();
    assert_eq!(ledger.lines().filter(|l| l.contains(",ok,")).count(), 2);
    assert_eq!(ledger.lines().filter(|l| l.contains(",schema_error,")).count(), 1);
}

#[test]
fn cover_reports_multiplicity() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "cover.toml",
        "[cover]\nspace = \"euclidean\"\ndim = 1\nlo = [0.0]\nhi = [10.0]\nradius = 1.0\nsamples_per_axis = 1000\n",
    );
    let out = tmp.path().join("out");
    let o = run("cover", &[&cfg], &out, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let dir = run_dir(&out);
    assert_eq!(summary_value(&dir, "covers_sample"), 1.0);
    assert!(summary_value(&dir, "max_multiplicity") <= 5.0);
    assert!(fs::read_to_string(dir.join("cover.csv")).unwrap().contains("index,x0,radius"));
}
