use std::path::Path;
use std::process::{Command, Output};

use nvzeno::output::{decode_json, encode_json, Cell, Document, Table};
use nvzeno::sweep::{figure_recipe, rerun_from_provenance, run_figure, run_sweep, RunOptions};
use proptest::prelude::*;

fn nvzeno(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nvzeno"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn closed_transfer_single_row() {
    let out = nvzeno(&["qst", "--model", "full"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("fidelity,"));
    let f: f64 = lines[1].split(',').next().unwrap().parse().unwrap();
    assert!(f > 0.998, "{f}");
    assert!(!text.contains('\r'));
}

#[test]
fn malformed_config_exits_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", "omgea = 0.05\n");
    let out_path = dir.path().join("out.csv");
    let out = nvzeno(&["qst", "--config", &cfg, "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out_path.exists());
    assert!(String::from_utf8_lossy(&out.stderr).contains("omgea"));
}

#[test]
fn bad_flags_exit_2() {
    assert_eq!(nvzeno(&["qst", "--precision", "3"]).status.code(), Some(2));
    assert_eq!(nvzeno(&["qst", "--model", "closed"]).status.code(), Some(2));
    assert_eq!(nvzeno(&["sweep", "--figure", "fig9"]).status.code(), Some(2));
}

#[test]
fn zero_detuning_fails_validation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "d0.toml", "delta = 0.0\n");
    let out = nvzeno(&["validate", "--config", &cfg, "--model", "effective"]);
    assert!(!out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("FAIL effective_model_defined"));
    let ok = nvzeno(&["validate"]);
    assert!(ok.status.success(), "{}", String::from_utf8_lossy(&ok.stdout));
}

#[test]
fn numerical_failure_in_single_run_is_reported_in_status() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "d0.toml", "delta = 0.0\n");
    let out = nvzeno(&["qst", "--config", &cfg]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("zero_detuning"));
}

#[test]
fn identical_invocations_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "sweep.toml",
        "protocol = \"cpg\"\n[axes]\ndelta_t_frac = { min = -0.1, max = 0.1, count = 5 }\n",
    );
    let a = nvzeno(&["sweep", "--config", &cfg, "--format", "json"]);
    let b = nvzeno(&["sweep", "--config", &cfg, "--format", "json", "--workers", "1"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let doc = decode_json(&a.stdout).unwrap();
    assert_eq!(doc.table.rows.len(), 5);
}

#[test]
fn csv_file_gets_provenance_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("fig5.csv");
    let out = nvzeno(&[
        "sweep",
        "--figure",
        "fig5",
        "--out",
        out_path.to_str().unwrap(),
        "--run-id",
        "r1",
    ]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(csv.lines().count(), 42);
    assert!(csv.lines().next().unwrap().starts_with("delta_t_frac,fidelity,"));
    let side = std::fs::read_to_string(dir.path().join("fig5.csv.provenance.json")).unwrap();
    assert!(side.contains("\"run_id\": \"r1\""));
}

#[test]
fn physical_units_flag_the_operation_time() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "s6.toml",
        "g_GHz = 1.0\ng = 1.0\ngamma = 0.015\nkappa = 0.12\nomega = 0.05\ndelta = 0.5\noptimize = false\n",
    );
    let out = nvzeno(&["qst", "--config", &cfg, "--model", "full", "--format", "json"]);
    assert!(out.status.success());
    let doc = decode_json(&out.stdout).unwrap();
    let t = doc.table.numbers("duration_ns").unwrap()[0].unwrap();
    let gate = doc.table.numbers("gate_time_ns").unwrap()[0].unwrap();
    assert!((t - 100.0).abs() < 1e-9 && (gate - 200.0).abs() < 1e-9);
    assert!(String::from_utf8_lossy(&out.stderr).contains("200.0 ns"));
}

#[test]
fn parallel_and_serial_sweeps_agree() {
    let recipe = figure_recipe("fig3").unwrap();
    let (_, spec) = &recipe.panels[0];
    let mut small = spec.clone();
    small.axes.iter_mut().for_each(|a| a.count = 4);
    let serial = run_sweep(&small, &RunOptions { workers: 1 }, None).unwrap();
    let parallel = run_sweep(&small, &RunOptions { workers: 3 }, None).unwrap();
    assert_eq!(serial, parallel);
}

#[test]
fn provenance_recreates_the_result() {
    let doc = run_figure(&figure_recipe("fig2").unwrap(), &RunOptions::default(), Some("x")).unwrap();
    let parsed = decode_json(&encode_json(&doc).unwrap()).unwrap();
    let again = rerun_from_provenance(&parsed, &RunOptions::default()).unwrap();
    assert_eq!(again, doc);
    assert_eq!(doc.table.columns[0], "panel");
    assert_eq!(doc.table.rows.len(), 802);
}

fn cell() -> impl Strategy<Value = Cell> {
    prop_oneof![
        any::<f64>().prop_map(Cell::num),
        "[a-z_ ,\"]{0,8}".prop_map(Cell::Text),
        Just(Cell::Null),
    ]
}

proptest! {
    #[test]
    fn json_round_trips(rows in proptest::collection::vec(proptest::collection::vec(cell(), 3), 0..6)) {
        let doc = Document {
            provenance: vec![],
            table: Table { columns: vec!["a".into(), "b".into(), "c".into()], rows },
        };
        prop_assert_eq!(decode_json(&encode_json(&doc).unwrap()).unwrap(), doc);
    }
}
