use std::path::Path;
use std::process::{Command, Output};

const HEADER: &str =
    "experiment,curve,M,K,policy,precoder,B_bits,snr_db,throughput_bps_hz,std_err,trials,seed,resamples";

fn fbmimo(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_fbmimo"));
    cmd.args(args).env_remove("FBMIMO_THREADS");
    if let Some(t) = threads {
        cmd.env("FBMIMO_THREADS", t);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().skip(1).map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

const SMALL_SWEEP: &[&str] = &["sweep", "--M", "3", "--policy", "fixed:6", "--trials", "300", "--snr", "0:10:20"];

#[test]
fn sweep_writes_the_csv_schema() {
    let o = fbmimo(SMALL_SWEEP, None);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(out.lines().next().unwrap(), HEADER);
    let r = rows(&out);
    assert_eq!(r.len(), 3);
    let snrs: Vec<&str> = r.iter().map(|row| row[7].as_str()).collect();
    assert_eq!(snrs, ["0", "10", "20"]);
    for row in &r {
        assert_eq!(row.len(), 13);
        assert_eq!(row[2], "3");
        assert_eq!(row[10], "300");
        assert_eq!(row[11], "42", "default seed");
        assert!(row[8].parse::<f64>().unwrap() > 0.0);
    }
}

#[test]
fn same_seed_is_byte_identical_across_thread_counts() {
    let one = fbmimo(SMALL_SWEEP, Some("1"));
    let three = fbmimo(SMALL_SWEEP, Some("3"));
    let again = fbmimo(SMALL_SWEEP, Some("3"));
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, three.stdout);
    assert_eq!(three.stdout, again.stdout);

    let mut other = SMALL_SWEEP.to_vec();
    other.extend(["--seed", "7"]);
    assert_ne!(fbmimo(&other, None).stdout, one.stdout);
}

#[test]
fn zero_trials_is_a_config_error() {
    let o = fbmimo(&["sweep", "--M", "2", "--trials", "0"], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("trials"), "{}", stderr(&o));
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"command": "sweep", "M": 2, "trails": 10}"#);
    let o = fbmimo(&["sweep", "--config", &cfg], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("trails"), "{}", stderr(&o));
}

#[test]
fn config_field_errors_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"M": 2, "trials": 0}"#);
    let o = fbmimo(&["sweep", "--config", &cfg], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("trials"));

    let o = fbmimo(&["sweep", "--M", "2", "--snr", "10:5:0"], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("snr"), "{}", stderr(&o));
}

#[test]
fn flags_beat_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"M": 3, "policy": "fixed:6", "trials": 200, "seed": 5, "snr": "0:10:20"}"#,
    );
    let from_file = fbmimo(&["sweep", "--config", &cfg], None);
    assert_eq!(from_file.status.code(), Some(0), "{}", stderr(&from_file));
    let r = rows(&stdout(&from_file));
    assert_eq!(r.len(), 3);
    assert!(r.iter().all(|row| row[10] == "200" && row[11] == "5"));

    let overridden = fbmimo(&["sweep", "--config", &cfg, "--trials", "100", "--snr", "5:5:10"], None);
    assert_eq!(overridden.status.code(), Some(0));
    let r = rows(&stdout(&overridden));
    assert_eq!(r.len(), 2);
    assert!(r.iter().all(|row| row[10] == "100" && row[11] == "5"));
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    let mut args = SMALL_SWEEP.to_vec();
    let p = path.to_str().unwrap();
    args.extend(["--out", p]);
    let o = fbmimo(&args, None);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read(&path).unwrap(), fbmimo(SMALL_SWEEP, None).stdout);
}

#[test]
fn unwritable_out_path_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("missing").join("r.csv");
    let mut args = SMALL_SWEEP.to_vec();
    let p = bad.to_str().unwrap();
    args.extend(["--out", p]);
    assert_eq!(fbmimo(&args, None).status.code(), Some(3));

    let o = fbmimo(&["sweep", "--config", "/nonexistent/c.json"], None);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn bad_thread_cap_is_a_config_error() {
    let o = fbmimo(SMALL_SWEEP, Some("zero"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("FBMIMO_THREADS"));
}

#[test]
fn quantizer_table_columns_and_rows() {
    let o = fbmimo(&["table", "quantizer", "--M", "4", "--B", "0..16"], None);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next().unwrap(), "B,expected_error,upper_bound,optimal_lower_mean,neg_log2_mean");
    let body: Vec<Vec<f64>> =
        lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(body.len(), 17);
    for (b, row) in body.iter().enumerate() {
        assert_eq!(row[0], b as f64);
        // optimal quantizer <= RVQ <= upper bound
        assert!(row[3] <= row[1] + 1e-12 && row[1] <= row[2] + 1e-15, "{row:?}");
    }
    // M = 4, B = 0 draws a single random word: E[Z] = (M - 1) / M
    assert!((body[0][1] - 0.75).abs() < 1e-12);
}

#[test]
fn scaled_figure_covers_its_grid() {
    let o = fbmimo(&["figure", "scaled5x5", "--trials", "200"], None);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = rows(&stdout(&o));
    assert!(!r.is_empty());
    assert!(r.iter().all(|row| row[0] == "scaled5x5"));
    let curves: std::collections::BTreeSet<&str> = r.iter().map(|row| row[1].as_str()).collect();
    assert!(curves.len() >= 2, "{curves:?}");
    let mut snrs: Vec<f64> = r.iter().map(|row| row[7].parse().unwrap()).collect();
    snrs.sort_by(f64::total_cmp);
    snrs.dedup();
    assert_eq!(snrs, [0.0, 5.0, 10.0, 15.0, 20.0, 25.0]);
}

#[test]
fn unknown_figure_is_a_config_error() {
    let o = fbmimo(&["figure", "nope"], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn validate_bounds_reports_each_check() {
    let o = fbmimo(&["validate", "bounds", "--grid", "quick"], None);
    assert_eq!(o.status.code(), Some(0), "{}\n{}", stdout(&o), stderr(&o));
    let out = stdout(&o);
    assert!(out.lines().count() >= 3);
    assert!(!out.contains("FAIL"));
}
