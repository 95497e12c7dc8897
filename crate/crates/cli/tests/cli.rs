use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tcim_cli::report::RunReport;

fn tcim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tcim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn diamond() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/diamond.txt")
}

fn json_report(args: &[&str]) -> RunReport {
    let out = tcim(args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    RunReport::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap()
}

#[test]
fn diamond_every_mode() {
    let path = diamond();
    let path = path.to_str().unwrap();
    for mode in ["bitwise", "pim", "oracle-matmul", "oracle-intersect"] {
        let r = json_report(&[
            "count",
            path,
            "--mode",
            mode,
            "--slice-size",
            "4",
            "--report",
            "json",
        ]);
        assert_eq!(r.triangle_count, Some(2), "{mode}");
        assert_eq!(r.num_vertices, 4);
        assert_eq!(r.num_edges, 5);
    }
}

#[test]
fn diamond_pim_counters() {
    let path = diamond();
    let r = json_report(&[
        "count",
        path.to_str().unwrap(),
        "--slice-size",
        "4",
        "--report",
        "json",
    ]);
    let sim = r.sim.unwrap();
    assert_eq!(sim.stats.col_misses, 3);
    assert_eq!(sim.stats.col_hits, 2);
    assert_eq!(sim.stats.writes, 6);
    assert_eq!(r.slices.n_vs, 6);
}

#[test]
fn summary_goes_to_stderr_when_report_is_on_stdout() {
    let path = diamond();
    let out = tcim(&["count", path.to_str().unwrap(), "--report", "json"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("triangles        2"));
    let plain = tcim(&["count", path.to_str().unwrap()]);
    assert!(String::from_utf8_lossy(&plain.stdout).contains("triangles        2"));
}

#[test]
fn empty_file_counts_zero() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.txt");
    std::fs::write(&path, "# nothing here\n").unwrap();
    let r = json_report(&["count", path.to_str().unwrap(), "--report", "json"]);
    assert_eq!(r.triangle_count, Some(0));
    assert_eq!(r.num_vertices, 0);
    assert_eq!(r.sim.unwrap().stats.writes, 0);
}

#[test]
fn complete_graph_stats() {
    let r = json_report(&["stats", "complete:64", "--report", "json"]);
    assert_eq!(r.triangle_count, None);
    // Row 63 and column 0 are all zero; every other line has its one slice.
    assert_eq!(r.slices.n_vs, 126);
    assert_eq!(r.slices.valid_fraction, 126.0 / 128.0);
    assert_eq!(r.slices.compressed_bytes, 126 * 12);
}

#[test]
fn report_written_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("r.json");
    let out = tcim(&[
        "count",
        "er:200:0.1",
        "--seed",
        "9",
        "--mode",
        "bitwise",
        "--report",
        "json",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&out_path).unwrap();
    let r = RunReport::from_json(&text).unwrap();
    assert_eq!(r.config.seed, 9);
    assert_eq!(r.config.input, "er:200:0.1");
    let oracle = json_report(&[
        "count",
        "er:200:0.1",
        "--seed",
        "9",
        "--mode",
        "oracle-intersect",
        "--report",
        "json",
    ]);
    assert_eq!(r.triangle_count, oracle.triangle_count);
}

#[test]
fn sweep_outputs_grid() {
    let path = diamond();
    let out = tcim(&[
        "sweep",
        path.to_str().unwrap(),
        "--slice-size",
        "32,64",
        "--capacity",
        "1KiB,16MiB",
        "--row-slots",
        "2",
        "--report",
        "json",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let reports: Vec<RunReport> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(reports.len(), 4);
    assert!(reports.iter().all(|r| r.triangle_count == Some(2)));
}

#[test]
fn sweep_csv() {
    let out = tcim(&[
        "sweep",
        "complete:20",
        "--capacity",
        "1KiB,2KiB",
        "--row-slots",
        "4",
        "--report",
        "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("schema_version,"));
    assert!(lines[1].starts_with("1,sweep,complete:20,pim,20,190,1140,"));
}

#[test]
fn matmul_oracle_refuses_large_graphs() {
    let out = tcim(&["count", "er:5000:0.0001", "--mode", "oracle-matmul"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn parse_error_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    std::fs::write(&path, "0 1\n1 x\n").unwrap();
    let out = tcim(&["count", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn bad_arguments_are_rejected() {
    assert!(!tcim(&["count", "complete:5", "--slice-size", "12"])
        .status
        .success());
    assert!(!tcim(&["count", "complete:5", "--capacity", "1.5MiB"])
        .status
        .success());
    // Too small for the row region plus one column slot.
    let out = tcim(&["count", "complete:5", "--capacity", "8", "--row-slots", "1"]);
    assert!(!out.status.success());
}

#[test]
fn cost_model_file_is_used() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("costs.txt");
    std::fs::write(&path, "slice_write 2.0 0.5\n").unwrap();
    let r = json_report(&[
        "count",
        diamond().to_str().unwrap(),
        "--slice-size",
        "4",
        "--cost-model",
        path.to_str().unwrap(),
        "--report",
        "json",
    ]);
    let stats = r.sim.unwrap().stats;
    assert_eq!(stats.total_latency, 12.0);
    assert_eq!(stats.total_energy, 3.0);
}
