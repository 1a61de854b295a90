//! CLI acceptance: every shipped configuration is deterministic (two runs
//! produce byte-identical CSVs), the open-gate populations conserve
//! probability row by row, and the exit codes follow the contract.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_transistor")
}

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

const SHIPPED: [(&str, &str); 6] = [
    ("closed-gate", "closed_gate.cfg"),
    ("open-gate", "open_gate.cfg"),
    ("lindblad-sweep", "lindblad_transfer.cfg"),
    ("lindblad-sweep", "lindblad_blockade.cfg"),
    ("milburn-sweep", "milburn_transfer.cfg"),
    ("milburn-sweep", "milburn_blockade.cfg"),
];

fn run_simulate(scenario: &str, config: &Path, out: &Path) {
    let status = Command::new(binary())
        .args(["simulate", scenario, "--config"])
        .arg(config)
        .arg("--out")
        .arg(out)
        .status()
        .expect("binary runs");
    assert!(
        status.success(),
        "simulate {scenario} failed for {config:?}"
    );
}

/// CSV bytes keyed by file name (the manifest is excluded: it carries the
/// timestamp and duration).
fn csv_bytes(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    for entry in std::fs::read_dir(dir).expect("output dir exists") {
        let entry = entry.unwrap();
        let name = entry.file_name().into_string().unwrap();
        if name.ends_with(".csv") {
            out.insert(name, std::fs::read(entry.path()).unwrap());
        }
    }
    out
}

#[test]
fn shipped_scenarios_are_deterministic_and_conservative() {
    let start = Instant::now();
    let tmp = tempfile::tempdir().unwrap();

    for (idx, (scenario, file)) in SHIPPED.iter().enumerate() {
        let config = configs_dir().join(file);
        let out_a = tmp.path().join(format!("{idx}_a"));
        let out_b = tmp.path().join(format!("{idx}_b"));
        run_simulate(scenario, &config, &out_a);
        run_simulate(scenario, &config, &out_b);

        let a = csv_bytes(&out_a);
        let b = csv_bytes(&out_b);
        assert!(!a.is_empty(), "{file}: no CSVs produced");
        assert_eq!(
            a.keys().collect::<Vec<_>>(),
            b.keys().collect::<Vec<_>>(),
            "{file}: file sets differ"
        );
        for (name, bytes) in &a {
            assert_eq!(bytes, &b[name], "{file}: {name} differs between runs");
        }
        println!(
            "PASS determinism: {file} -> {} byte-identical CSV(s)",
            a.len()
        );
    }

    // Conservation in the open-gate table: populations sum to one per row.
    let out = tmp.path().join("open_gate_check");
    run_simulate("open-gate", &configs_dir().join("open_gate.cfg"), &out);
    let text = std::fs::read_to_string(out.join("open_gate.csv")).unwrap();
    let mut rows = 0usize;
    let mut worst = 0.0f64;
    for line in text.lines().skip(1) {
        let fields: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(fields.len(), 5);
        let sum = fields[2] + fields[3] + fields[4];
        worst = worst.max((sum - 1.0).abs());
        assert!((sum - 1.0).abs() < 1e-9, "row {rows}: sum {sum}");
        for p in &fields[2..] {
            assert!((0.0..=1.0).contains(p));
        }
        rows += 1;
    }
    assert_eq!(rows, 2001);

    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 10.0, "runtime {elapsed:.2}s exceeds 10s");
    println!(
        "PASS open-gate conservation: max row-sum deviation {worst:.3e} over {rows} rows, \
         total {elapsed:.2}s"
    );
}

#[test]
fn exit_codes_follow_the_contract() {
    let tmp = tempfile::tempdir().unwrap();

    // Config error: unknown key.
    let bad = tmp.path().join("bad.cfg");
    std::fs::write(&bad, "scenario = open-gate\nnonsense = 1\n").unwrap();
    let status = Command::new(binary())
        .args(["validate", "--config"])
        .arg(&bad)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));

    // Config error: scenario mismatch between CLI and file.
    let ok = configs_dir().join("open_gate.cfg");
    let status = Command::new(binary())
        .args(["simulate", "closed-gate", "--config"])
        .arg(&ok)
        .arg("--out")
        .arg(tmp.path().join("x"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));

    // I/O error: missing config file.
    let status = Command::new(binary())
        .args(["simulate", "open-gate", "--config"])
        .arg(tmp.path().join("missing.cfg"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(4));

    // Success path, and validate on every shipped file.
    for (_, file) in SHIPPED {
        let status = Command::new(binary())
            .args(["validate", "--config"])
            .arg(configs_dir().join(file))
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0), "{file} failed validation");
    }
    println!("PASS exit codes: 2 on config errors, 4 on i/o errors, 0 on success");
}

#[test]
fn overrides_and_units_reach_the_physics() {
    let tmp = tempfile::tempdir().unwrap();
    let config = configs_dir().join("open_gate.cfg");

    // Halving J doubles the exchange period; the default horizon tracks it.
    let out = tmp.path().join("halved");
    let status = Command::new(binary())
        .args(["simulate", "open-gate", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .args(["--override", "chain.coupling_j=500"])
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(out.join("open_gate.csv")).unwrap();
    let last = text.lines().last().unwrap();
    let t_final: f64 = last.split(',').next().unwrap().parse().unwrap();
    let expected = std::f64::consts::PI * std::f64::consts::SQRT_2 / 500.0;
    assert!((t_final - expected).abs() < 1e-12);

    // Cyclic units scale J by 2*pi, shortening the period accordingly.
    let out = tmp.path().join("cyclic");
    let status = Command::new(binary())
        .args(["simulate", "open-gate", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .args(["--units", "cyclic"])
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(out.join("open_gate.csv")).unwrap();
    let last = text.lines().last().unwrap();
    let t_final: f64 = last.split(',').next().unwrap().parse().unwrap();
    let expected = std::f64::consts::PI * std::f64::consts::SQRT_2 / (1e3 * std::f64::consts::TAU);
    assert!((t_final - expected).abs() < 1e-15);
    println!("PASS overrides and units flags reach the chain parameters");
}

#[test]
fn custom_scenario_runs_an_explicit_trace() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("custom.cfg");
    std::fs::write(
        &cfg,
        "scenario = custom\n\
         [sweep]\nkind = blockade\n\
         [chain]\ndelta = 5e5\ncoupling_j = 1e3\n\
         [input]\nalpha_re = 0.6\nbeta_re = 0.8\n\
         [rates]\ngamma = 1e-6\n\
         [grid]\nt_end = 1e-3\nn_points = 101\n",
    )
    .unwrap();
    let out = tmp.path().join("custom_out");
    let status = Command::new(binary())
        .args(["simulate", "custom", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(out.join("custom_blockade_rate_1e-6.csv").exists());
    assert!(out.join("custom_blockade_summary.csv").exists());
    let text = std::fs::read_to_string(out.join("custom_blockade_summary.csv")).unwrap();
    let f: f64 = text
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!((0.0..=1.0).contains(&f));
    println!("PASS custom scenario: explicit blockade trace at fidelity {f:.6}");
}
