//! Command-line behaviour on the bundled fixture.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn manifest() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/minirepo/bugloc.toml")
}

struct Lab {
    tmp: TempDir,
}

impl Lab {
    /// A fresh output directory with entities and links already extracted.
    fn prepared() -> Self {
        let lab = Self {
            tmp: tempfile::tempdir().unwrap(),
        };
        lab.ok(&["extract"]);
        lab.ok(&["link"]);
        lab
    }

    fn out(&self) -> PathBuf {
        self.tmp.path().join("out")
    }

    fn run(&self, cmd: &str, extra: &[&str]) -> Output {
        let m = manifest();
        let out = self.out();
        Command::new(env!("CARGO_BIN_EXE_bugloc"))
            .arg(cmd)
            .args(["-m", m.to_str().unwrap(), "--output", out.to_str().unwrap()])
            .args(extra)
            .env("BUGLOC_CACHE_DIR", self.tmp.path().join("cache"))
            .env("RUST_LOG", "warn")
            .output()
            .unwrap()
    }

    fn ok(&self, args: &[&str]) -> String {
        let o = self.run(args[0], &args[1..]);
        assert!(
            o.status.success(),
            "{args:?} failed: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        String::from_utf8(o.stdout).unwrap()
    }

    fn read(&self, rel: &str) -> String {
        fs::read_to_string(self.out().join(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
    }

    fn details(&self) -> Vec<String> {
        let mut names: Vec<String> = fs::read_dir(self.out().join("details"))
            .unwrap()
            .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
            .collect();
        names.sort();
        names
    }
}

/// Data rows of a CSV written by the tool (header comment and column row skipped).
fn data_rows(csv: &str) -> Vec<&str> {
    csv.lines().skip(2).collect()
}

#[test]
fn em_family_yields_one_row_per_query_and_configuration() {
    let lab = Lab::prepared();
    let stdout = lab.ok(&["run", "--families", "em"]);
    assert!(
        stdout.contains("4 configurations run, 0 already complete, 0 failed"),
        "{stdout}"
    );
    assert_eq!(lab.details(), ["M1.csv", "M2.csv", "M3.csv", "M4.csv"]);
    // four included queries: three on s1, one on s2
    for name in lab.details() {
        let rows = lab.read(&format!("details/{name}"));
        assert_eq!(data_rows(&rows).len(), 4, "{name}");
        assert_eq!(
            data_rows(&rows)
                .iter()
                .filter(|r| r.contains(",s2,"))
                .count(),
            1
        );
    }
    lab.ok(&["evaluate", "--families", "em"]);
    let eval = lab.read("evaluation.csv");
    assert_eq!(data_rows(&eval).len(), 4);
    assert!(
        data_rows(&eval).iter().all(|r| r.contains(",em,4,1,")),
        "{eval}"
    );
}

#[test]
fn single_configuration_runs_once_unless_forced() {
    let lab = Lab::prepared();
    let id = "A1.B4.C5.D1.E1";
    let first = lab.ok(&["run", "--configs", id]);
    assert!(
        first.contains("1 configurations run, 0 already complete"),
        "{first}"
    );
    assert_eq!(lab.details(), [format!("{id}.csv")]);
    let again = lab.ok(&["run", "--configs", id]);
    assert!(
        again.contains("0 configurations run, 1 already complete"),
        "{again}"
    );
    let forced = lab.ok(&["run", "--configs", id, "--force"]);
    assert!(
        forced.contains("1 configurations run, 0 already complete"),
        "{forced}"
    );
    // one record per snapshot and execution
    assert_eq!(lab.read("runs.jsonl").lines().count(), 4);
}

#[test]
fn split_runs_equal_one_combined_run() {
    let whole = Lab::prepared();
    whole.ok(&["run", "--families", "vsm,em"]);
    let parts = Lab::prepared();
    parts.ok(&["run", "--families", "em"]);
    parts.ok(&["run", "--families", "vsm"]);

    assert_eq!(whole.details(), parts.details());
    for name in whole.details() {
        let rel = format!("details/{name}");
        assert_eq!(whole.read(&rel), parts.read(&rel), "{name}");
    }
    for lab in [&whole, &parts] {
        lab.ok(&["evaluate", "--families", "vsm,em"]);
    }
    assert_eq!(whole.read("evaluation.csv"), parts.read("evaluation.csv"));
}

#[test]
fn thread_count_does_not_change_results() {
    let configs = "A1.B1.C7.J32.K1,A2.B4.C6.J64.K1,A1.B5.C7.F2.G32";
    let parallel = Lab::prepared();
    parallel.ok(&["run", "--configs", configs]);
    let serial = Lab::prepared();
    serial.ok(&["run", "--configs", configs, "--jobs", "1"]);
    for name in parallel.details() {
        let rel = format!("details/{name}");
        assert_eq!(parallel.read(&rel), serial.read(&rel), "{name}");
    }
    assert_eq!(parallel.read("runs.jsonl"), serial.read("runs.jsonl"));
}

#[test]
fn sensitivity_output_depends_only_on_seed() {
    let lab = Lab::prepared();
    lab.ok(&["run", "--families", "vsm"]);
    let mut outputs = Vec::new();
    for jobs in ["0", "1"] {
        lab.ok(&[
            "sensitivity",
            "--families",
            "vsm",
            "--bootstrap",
            "40",
            "--seed",
            "3",
            "--jobs",
            jobs,
        ]);
        outputs.push(lab.read("sensitivity.csv"));
    }
    assert_eq!(outputs[0], outputs[1]);
    let csv = &outputs[0];
    assert!(csv
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("family,system,response,parameter,df,median_chi2"));
    assert!(data_rows(csv)
        .iter()
        .all(|r| r.starts_with("vsm,minirepo,")));

    lab.ok(&[
        "sensitivity",
        "--families",
        "vsm",
        "--bootstrap",
        "40",
        "--seed",
        "4",
    ]);
    assert_ne!(lab.read("sensitivity.csv"), outputs[0]);
}

#[test]
fn evaluating_without_results_fails() {
    let lab = Lab::prepared();
    let o = lab.run("evaluate", &["--families", "lda"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("lda"));
}

#[test]
fn unknown_configuration_is_rejected() {
    let lab = Lab::prepared();
    let o = lab.run("run", &["--configs", "A9.B1.C0.D1.E1"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("A9"));
}

#[test]
fn invalid_manifest_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = fs::read_to_string(manifest())
        .unwrap()
        .replace("cap = 200", "cap = 10");
    let path = tmp.path().join("bugloc.toml");
    fs::write(&path, bad).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_bugloc"))
        .args(["link", "-m", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("cap"));
}

fn extract_dir(dir: &Path, extra: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bugloc"))
        .arg("extract")
        .arg(dir)
        .args(extra)
        .output()
        .unwrap()
}

#[test]
fn extracting_an_empty_directory_yields_no_entities() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("e.jsonl");
    let o = extract_dir(
        tmp.path(),
        &["--id", "empty", "--out", out.to_str().unwrap()],
    );
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout)
        .contains("empty: 0 files, 0 methods, 0 dummies, 0 fallbacks, 0 entities"));
    assert_eq!(fs::read_to_string(out).unwrap(), "");
}

#[test]
fn file_granularity_yields_one_entity_per_file() {
    let dir = manifest().parent().unwrap().join("snapshots/s1");
    let o = extract_dir(&dir, &["--granularity", "file"]);
    assert!(o.status.success());
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 3);
    assert!(
        stdout
            .lines()
            .all(|l| l.contains("\"granularity\":\"file\"")),
        "{stdout}"
    );
    assert!(String::from_utf8_lossy(&o.stderr)
        .contains("s1: 3 files, 0 methods, 0 dummies, 0 fallbacks, 3 entities"));
}
