use std::path::Path;
use std::process::{Command, Output};

use phasekit::fock::TruncationConfig;
use phasekit::io::{read_matrix_binary, read_matrix_csv};
use phasekit::phase_operators::{build_phi, PhaseLabeling};
use phasekit::phase_states::build_phase_table;
use phasekit::special::build_quadrature;

fn phasekit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phasekit")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<csv::StringRecord> {
    csv::Reader::from_reader(text.as_bytes()).records().map(Result::unwrap).collect()
}

#[test]
fn legacy_divergence_equals_s() {
    let out = phasekit(&["legacy", "--s", "100", "--n-max", "16"]);
    assert!(out.status.success());
    let rows = csv_rows(&stdout(&out));
    let div = rows.iter().find(|r| &r[0] == "pb_divergence").unwrap();
    assert_eq!(&div[2], "100");
    let vac_im = rows.iter().find(|r| &r[0] == "sg_cs_commutator_vacuum_im").unwrap();
    assert_eq!(vac_im[2].parse::<f64>().unwrap(), 0.5);
}

#[test]
fn vacuum_phase_density_integrates_to_one() {
    let out = phasekit(&["phase-dist", "fock:0", "--n-max", "64", "--quad", "512"]);
    assert!(out.status.success());
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows.len(), 2 * 512);
    let grid = build_quadrature(512).unwrap();
    // Rows are the plus branch over the grid, then the minus branch.
    let integral: f64 = rows
        .iter()
        .enumerate()
        .map(|(i, r)| r[2].parse::<f64>().unwrap() * grid.weights()[i % 512])
        .sum();
    assert!((integral - 1.0).abs() <= 1e-6, "{integral}");
}

#[test]
fn phi_dump_round_trips_bit_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let text = dir.path().join("phi.csv");
    let bin = dir.path().join("phi.bin");
    let common = ["--n-max", "32", "--quad", "256", "--time", "0"];
    for (path, extra) in [(&text, None), (&bin, Some("--binary"))] {
        let mut args = vec!["dump", "phi", "--out", path.to_str().unwrap()];
        args.extend(common);
        args.extend(extra);
        assert!(phasekit(&args).status.success());
    }

    let cfg = TruncationConfig::new(32, 4).unwrap();
    let table = build_phase_table(&cfg, &build_quadrature(256).unwrap()).unwrap();
    let expected = build_phi(&table, PhaseLabeling::Eigenvalue).into_entries();
    let from_text = read_matrix_csv(std::io::BufReader::new(std::fs::File::open(&text).unwrap())).unwrap();
    let from_bin = read_matrix_binary(std::fs::File::open(&bin).unwrap()).unwrap();
    for m in [from_text, from_bin] {
        assert_eq!(m.shape(), expected.shape());
        for (a, b) in m.iter().zip(expected.iter()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }
}

#[test]
fn dump_is_deterministic_and_quarter_times_are_exact() {
    let once = phasekit(&["dump", "cos2phi", "--n-max", "16", "--time", "pi/2"]);
    let twice = phasekit(&["dump", "cos2phi", "--n-max", "16", "--time", "pi/2"]);
    assert!(once.status.success());
    assert_eq!(once.stdout, twice.stdout);
    let zero = read_matrix_csv(phasekit(&["dump", "cos2phi", "--n-max", "16"]).stdout.as_slice()).unwrap();
    let half = read_matrix_csv(once.stdout.as_slice()).unwrap();
    assert_eq!(half, -zero);
}

#[test]
fn exact_moments_are_the_six_fractions() {
    let out = phasekit(&["moments", "--n", "0,1,2", "--k", "2,3", "--exact"]);
    assert!(out.status.success());
    let values: Vec<String> = csv_rows(&stdout(&out)).iter().map(|r| r[3].to_owned()).collect();
    assert_eq!(values, ["7/20", "11/40", "9/28", "13/56", "5/12", "3/8"]);
}

#[test]
fn moment_rows_beyond_the_interior_are_marked() {
    let out = phasekit(&["moments", "--n", "0,60", "--k", "2", "--n-max", "64", "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    let rows: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rows[0]["error"], serde_json::Value::Null);
    assert!(rows[1]["error"].as_str().unwrap().contains("truncation"));
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.toml");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn malformed_config_exits_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    for text in ["n_max = 64\ncolour = \"red\"\n", "n_max = [", "n_max = 63\n", "[tolerances]\nnot_a_check = 1.0\n"] {
        let cfg = write_config(dir.path(), text);
        let out = phasekit(&["verify", "--config", &cfg]);
        assert_eq!(out.status.code(), Some(2), "{text}");
        assert!(out.stdout.is_empty(), "{text}");
    }
}

#[test]
fn bad_arguments_exit_2() {
    for args in [
        &["dump", "theta", "--n-max", "16"][..],
        &["phase-dist", "squeezed:1", "--n-max", "16"],
        &["coherent", "--phase", "pie", "--n-max", "16"],
        &["legacy", "--s", "0", "--n-max", "16"],
    ] {
        let out = phasekit(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty());
    }
    let out = Command::new(env!("CARGO_BIN_EXE_phasekit"))
        .args(["legacy", "--n-max", "16"])
        .env("PHASEKIT_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_sets_format_and_output() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("legacy.json");
    let cfg = write_config(dir.path(), &format!("n_max = 16\nformat = \"json\"\nout = {:?}\n", report.to_str().unwrap()));
    let out = phasekit(&["legacy", "--config", &cfg]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let rows: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(rows.as_array().unwrap().last().unwrap()["value"], 100);
}

#[test]
fn verify_passes_at_defaults() {
    let out = phasekit(&["verify", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let rows: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), phasekit::verify::check_ids().count());
    assert!(rows.iter().all(|r| r["pass"] == true));
}

#[test]
fn verify_reports_degraded_checks_on_a_coarse_grid() {
    let out = phasekit(&["verify", "--n-max", "8", "--quad", "64"]);
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows.len(), phasekit::verify::check_ids().count());
    let failed: Vec<&str> = rows.iter().filter(|r| &r[4] == "false").map(|r| r.get(0).unwrap()).collect();
    assert_eq!(out.status.code(), Some(if failed.is_empty() { 0 } else { 1 }), "{failed:?}");
}
