use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_bohmian");
const CONFIGS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs");

fn bohmian(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("BOHMIAN_OUT").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// The built-in free-Gaussian file with edits applied line by line.
fn free_gaussian_with(dir: &Path, edits: &[(&str, &str)]) -> String {
    let mut text = fs::read_to_string(format!("{CONFIGS}/free_gaussian.toml")).unwrap();
    for (from, to) in edits {
        assert!(text.contains(from), "{from}");
        text = text.replacen(from, to, 1);
    }
    let path = dir.join("scenario.toml");
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

const THREE: (&str, &str) = (
    "analyses = [\"bohm_fields\", \"residuals\", \"clifford\", \"momentum_cev\", \"wigner\", \"trajectories\", \"energy_symbol\"]",
    "analyses = [\"bohm_fields\", \"residuals\", \"wigner\"]",
);

#[test]
fn list_prints_the_six_scenarios() {
    let o = bohmian(&["list"]);
    assert!(o.status.success());
    assert_eq!(
        stdout(&o).lines().collect::<Vec<_>>(),
        [
            "free_gaussian",
            "harmonic_eigenstate",
            "two_gaussian_interference",
            "pauli_mixed_spinor",
            "hbar_sweep",
            "moyal_vs_schrodinger"
        ]
    );
}

#[test]
fn validate_accepts_every_shipped_config() {
    for name in ["free_gaussian", "hbar_sweep", "pauli_mixed_spinor"] {
        let o = bohmian(&["validate", &format!("{CONFIGS}/{name}.toml")]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert_eq!(stdout(&o), "OK\n");
    }
    let o = bohmian(&["validate", "moyal_vs_schrodinger"]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), "OK\n"));
}

#[test]
fn unknown_analysis_is_a_usage_error_listing_valid_names() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = free_gaussian_with(dir.path(), &[("\"bohm_fields\",", "\"frobnicate\", \"bohm_fields\",")]);
    for cmd in ["validate", "run"] {
        let o = bohmian(&[cmd, &cfg, "--out", &dir.path().join("out").to_string_lossy()]);
        assert_eq!(o.status.code(), Some(2));
        let err = stderr(&o);
        assert!(err.contains("frobnicate"), "{err}");
        for valid in ["bohm_fields", "momentum_cev", "classical_limit", "moyal_liouville", "pauli"] {
            assert!(err.contains(valid), "{err}");
        }
    }
    assert!(!dir.path().join("out").exists());
}

#[test]
fn unknown_scenario_lists_valid_scenarios() {
    let o = bohmian(&["run", "no_such_scenario"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("two_gaussian_interference"));

    let dir = tempfile::tempdir().unwrap();
    let cfg = free_gaussian_with(dir.path(), &[("scenario = \"free_gaussian\"", "scenario = \"frobnicate\"")]);
    let o = bohmian(&["validate", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("hbar_sweep"));
}

#[test]
fn unstable_dt_names_the_propagator_guard() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = free_gaussian_with(
        dir.path(),
        &[
            ("kind = \"free\"", "kind = \"harmonic\"\nomega = 3.0"),
            ("dt = 0.001", "dt = 0.01"),
            ("stride = 250", "stride = 25"),
            ("propagator = \"closed_form\"", "propagator = \"split_step\""),
        ],
    );
    let o = bohmian(&["validate", &cfg]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("propagator.stability"), "{}", stderr(&o));
}

#[test]
fn parse_errors_carry_line_information() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = free_gaussian_with(dir.path(), &[("n = 512", "n = \"lots\"")]);
    let o = bohmian(&["validate", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line"), "{}", stderr(&o));
}

#[test]
fn bad_flags_are_usage_errors() {
    assert_eq!(bohmian(&["run"]).status.code(), Some(2));
    assert_eq!(bohmian(&["list", "--threads", "many"]).status.code(), Some(2));
    assert_eq!(bohmian(&["validate", "free_gaussian", "--hbar", "-1"]).status.code(), Some(2));
    assert_eq!(bohmian(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn run_writes_one_entry_per_analysis_and_grid_sized_files_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = free_gaussian_with(dir.path(), &[THREE]);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = bohmian(&["run", &cfg, "--out", &out.to_string_lossy(), "--seed", "5", "--threads", "1"]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }

    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(a.join("report.json")).unwrap()).unwrap();
    let entries = report["analyses"].as_array().unwrap();
    let names: Vec<_> = entries.iter().map(|e| e["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["bohm_fields", "residuals", "wigner"]);
    assert_eq!(report["format_version"], 1);
    assert_eq!(report["seed"], 5);
    assert_eq!(report["config"]["grid"]["n"], 512);

    let field = fs::read_to_string(a.join("bohm_fields_t000.dat")).unwrap();
    assert_eq!(field.lines().filter(|l| !l.starts_with('#')).count(), 512);
    for key in ["# format:", "# grid: x_min=-20 x_max=20 n=512", "# columns: x ", "# column_units:", "# t: 0"] {
        assert!(field.contains(key), "{key}");
    }
    let wigner = fs::read(a.join("wigner.mbw")).unwrap();
    assert_eq!(&wigner[..4], b"MBW1");
    assert_eq!(u64::from_le_bytes(wigner[4..12].try_into().unwrap()), 512);
    assert_eq!(wigner.len(), 20 + 512 * 512 * 8);
    assert!(fs::read_to_string(a.join("plot.gp")).unwrap().contains("bohm_fields_t000.dat"));
    assert!(fs::read_to_string(a.join("timing.txt")).unwrap().starts_with("wall_time_seconds = "));

    let mut files: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    files.sort();
    assert!(files.len() > 5);
    for f in files.iter().filter(|f| *f != "timing.txt") {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f:?} differs");
    }
}

#[test]
fn seed_and_hbar_overrides_reach_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = free_gaussian_with(dir.path(), &[THREE, ("n = 512", "n = 256")]);
    let out = dir.path().join("o");
    let o = bohmian(&["run", &cfg, "--out", &out.to_string_lossy(), "--seed", "77", "--hbar", "0.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["config"]["physics"]["hbar"], 0.5);
    assert_eq!(report["config"]["ensemble"]["seed"], 77);
}

#[test]
fn environment_overrides_the_output_directory_and_out_flag_wins() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = free_gaussian_with(dir.path(), &[THREE, ("n = 512", "n = 256")]);
    let env_root = dir.path().join("env");
    let o = Command::new(BIN).args(["run", &cfg]).env("BOHMIAN_OUT", &env_root).output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(env_root.join("free_gaussian").join("report.json").exists());

    let flag = dir.path().join("flag");
    let o = Command::new(BIN)
        .args(["run", &cfg, "--out", &flag.to_string_lossy()])
        .env("BOHMIAN_OUT", dir.path().join("ignored"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(flag.join("report.json").exists());
    assert!(!dir.path().join("ignored").exists());
}

#[test]
fn strict_turns_a_failed_bound_into_exit_four() {
    // Momentum CEV on a split-step state sits far above its 1e-6 bound at the node-mask edge.
    let dir = tempfile::tempdir().unwrap();
    let cfg = free_gaussian_with(
        dir.path(),
        &[
            (THREE.0, "analyses = [\"momentum_cev\"]"),
            ("propagator = \"closed_form\"", "propagator = \"split_step\""),
        ],
    );
    let out = dir.path().join("o").to_string_lossy().into_owned();
    let lax = bohmian(&["run", &cfg, "--out", &out]);
    assert_eq!(lax.status.code(), Some(0));
    assert!(stderr(&lax).contains("warning"));
    let strict = bohmian(&["run", &cfg, "--out", &out, "--strict"]);
    assert_eq!(strict.status.code(), Some(4), "{}", stderr(&strict));
    assert!(stderr(&strict).contains("cev_vs_bohm_momentum"));
}
