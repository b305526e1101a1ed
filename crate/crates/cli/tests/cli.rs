use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn tchm() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tchm"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str]) -> Output {
    tchm().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

#[test]
fn bands_with_reference_parameters() {
    let o = run(&["bands", "--n", "5", "--m", "1", "--j", "1", "--g", "0.2", "--omega0", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = parse_csv(&stdout(&o));
    assert_eq!(header, ["k", "e_minus", "e_plus", "photon_weight_minus", "photon_weight_plus"]);
    assert_eq!(rows.len(), 5);
    // k = π/2 sits at ω0 ∓ g
    let mid: Vec<f64> = rows[2].iter().map(|s| s.parse().unwrap()).collect();
    assert!((mid[0] - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    assert!((mid[1] - 3.8).abs() < 1e-12 && (mid[2] - 4.2).abs() < 1e-12);
    assert!(String::from_utf8_lossy(&o.stderr).contains("omega_0: 4.0"));
}

#[test]
fn eigs_is_byte_identical_across_runs() {
    let cfg = configs().join("two_by_two.cfg");
    let args = ["eigs", "--config", cfg.to_str().unwrap(), "--seed", "7"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let (header, rows) = parse_csv(&stdout(&a));
    assert_eq!(header[0], "state_index");
    assert_eq!(rows.len(), 6);
    // full double precision
    assert!(rows[0][1].contains('e') && rows[0][1].split('e').next().unwrap().len() >= 18);
    let resolved = String::from_utf8_lossy(&a.stderr);
    assert!(resolved.contains("seed = 7") && resolved.contains("n_cavities = 2"));
}

#[test]
fn metrics_columns_and_json() {
    let cfg = configs().join("five_by_three.cfg");
    let o = run(&["metrics", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = parse_csv(&stdout(&o));
    assert_eq!(
        header,
        ["state_index", "re_energy", "im_energy", "band", "p_n_raw", "p_n_norm", "p_p_raw", "p_p_norm"]
    );
    assert_eq!(rows.len(), 20);
    assert_eq!(rows.iter().filter(|r| r[3] == "subradiant").count(), 10);

    let o = run(&["metrics", "--config", cfg.to_str().unwrap(), "--format", "json"]);
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["rows"].as_array().unwrap().len(), 20);
    assert_eq!(doc["columns"][3], "band");
}

#[test]
fn sweep_preset_with_override() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig3");
    let o = run(&["sweep", "--preset", "fig3", "--realizations", "5", "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for name in ["eigenvalues.csv", "p_n.csv", "p_p.csv", "manifest.json"] {
        assert!(out.join(name).exists(), "{name}");
    }
    let (header, rows) = parse_csv(&std::fs::read_to_string(out.join("p_n.csv")).unwrap());
    assert_eq!(header, ["series", "delta", "selector", "quantity", "mean", "std", "count"]);
    assert!(rows.iter().all(|r| r[6] == "5"));
    let manifest: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["realizations"], 5);
    assert_eq!(manifest["spec"]["realizations"], 5);
    assert_eq!(manifest["spec_hash"].as_str().unwrap().len(), 64);
    // no temporary files left behind
    assert_eq!(std::fs::read_dir(&out).unwrap().count(), 4);
}

#[test]
fn sweep_output_is_independent_of_job_count() {
    let dir = tempfile::tempdir().unwrap();
    let spec = configs().join("custom_sweep.toml");
    let mut outputs = Vec::new();
    for jobs in ["1", "3"] {
        let out = dir.path().join(jobs);
        let o = tchm()
            .args(["sweep", "--spec", spec.to_str().unwrap(), "--realizations", "8", "--output", out.to_str().unwrap()])
            .env("TCHM_JOBS", jobs)
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        outputs.push(std::fs::read(out.join("lowest_state.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn analytic_preset_writes_band_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["sweep", "--preset", "figA1", "--output", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let (_, rows) = parse_csv(&std::fs::read_to_string(dir.path().join("bands.csv")).unwrap());
    assert_eq!(rows.len(), 50);
}

#[test]
fn qme_spectrum_of_a_single_node() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("one.cfg");
    std::fs::write(&cfg, "n_cavities = 1\nemitters_per_cavity = 1\n").unwrap();
    let out = dir.path().join("spectrum.csv");
    let o = run(&[
        "qme-spectrum",
        "--config",
        cfg.to_str().unwrap(),
        "--omega-min",
        "-60",
        "--omega-max",
        "60",
        "--points",
        "241",
        "--normalize",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = parse_csv(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(header, ["omega", "cav_1", "em_1_1"]);
    assert_eq!(rows.len(), 241);
    // vacuum Rabi doublet at ±g
    let g = std::f64::consts::TAU * 5.0;
    let col: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r[0].parse().unwrap(), r[1].parse().unwrap()))
        .collect();
    let (w_max, s_max) = col.iter().copied().fold((0.0, f64::MIN), |a, b| if b.1 > a.1 { b } else { a });
    assert!((w_max.abs() - g).abs() < 2.0, "peak at {w_max}");
    assert!((s_max - 1.0).abs() < 0.05);
}

#[test]
fn usage_errors_exit_with_one() {
    let o = run(&["eigs", "--no-such-flag"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["sweep", "--preset", "fig42"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("figA5"));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "n_cavities = 2\nkappa_ghz = -1\n").unwrap();
    let o = run(&["eigs", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2") && err.contains("kappa_ghz"), "{err}");

    let o = run(&["qme-spectrum", "--config", configs().join("five_by_three.cfg").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("dimension"));
}

#[test]
fn help_exits_cleanly() {
    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    for sub in ["bands", "eigs", "metrics", "qme-spectrum", "sweep"] {
        assert!(stdout(&o).contains(sub));
    }
}
