//! End-to-end checks of the binary: exit codes, schema, and byte-identical
//! output for identical invocations.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_yamabe-lab"))
}

#[test]
fn annulus_json_reports_both_energies() {
    let out = bin()
        .args([
            "annulus", "--n", "3", "--r", "0.5", "--m", "1", "--format", "json",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value["schema"], "yamabe-lab/1");
    let energy = value["result"]["energy"].as_f64().unwrap();
    let euclid = value["result"]["euclid_energy"].as_f64().unwrap();
    assert!((energy - 8.24287971175524).abs() < 1e-9);
    assert!((euclid - 6.341323676169618).abs() < 1e-9);
    let pipeline = value["result"]["pipeline_energy"].as_f64().unwrap();
    assert!((energy - pipeline).abs() < 1e-10 * energy);
}

#[test]
fn annulus_at_zero_mass_agrees_with_direct_quadrature() {
    let out = bin()
        .args([
            "annulus", "--n", "3", "--r", "0.5", "--m", "0", "--format", "json",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let closed = value["result"]["euclid_energy"].as_f64().unwrap();
    let quadrature = value["result"]["euclid_energy_quadrature"]
        .as_f64()
        .unwrap();
    assert!((closed - quadrature).abs() < 1e-10 * closed);
    assert!((closed - 6.341323676169618).abs() < 1e-9);
}

#[test]
fn cherrier_reports_reference_bound() {
    let out = bin()
        .args(["cherrier", "--n", "4", "--format", "json"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value["result"]["satisfied"], true);
    let reference = value["result"]["reference_bound"].as_f64().unwrap();
    assert!((reference - 3.0 / std::f64::consts::PI).abs() < 1e-12);
    assert!(value["result"]["bound"].as_f64().unwrap() < 1.0);
}

#[test]
fn steklov_flags_the_euclidean_ball_degenerate() {
    let out = bin()
        .args([
            "steklov", "--domain", "ball", "--n", "3", "--H", "2", "--format", "json",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value["result"]["degenerate"], true);
}

#[test]
fn identical_invocations_are_byte_identical() {
    let run = || {
        bin()
            .args([
                "minimize",
                "--domain",
                "ball",
                "--l-max",
                "4",
                "--seed",
                "7",
                "--max-iters",
                "200",
                "--format",
                "json",
            ])
            .output()
            .unwrap()
    };
    let a = run();
    let b = run();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn domain_error_exits_one() {
    // annulus radius out of range is a domain error, not a usage error
    let out = bin()
        .args(["annulus", "--n", "3", "--r", "1.5", "--m", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn usage_error_exits_two() {
    let out = bin().args(["no-such-subcommand"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn csv_format_emits_table_for_sweeps() {
    let out = bin()
        .args([
            "annulus",
            "--n",
            "3",
            "--r",
            "0.5",
            "--m",
            "0.5",
            "--sweep-to",
            "100",
            "--sweep-points",
            "5",
            "--format",
            "csv",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("m,energy,euclid_energy,limit"));
    assert_eq!(lines.count(), 5);
}

#[test]
fn cr_energy_reads_csv() {
    let dir = std::env::temp_dir().join("yamabe_cli_cr");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("cr.csv");
    std::fs::write(&path, "weight,R\n1.0,1.0\n2.0,3.0\n").unwrap();
    let out = bin()
        .args([
            "cr-energy",
            "--csv",
            path.to_str().unwrap(),
            "--n",
            "1",
            "--format",
            "json",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let energy = value["result"]["energy"].as_f64().unwrap();
    assert!((energy - 7.0 / 3.0_f64.sqrt()).abs() < 1e-12);
}

#[test]
fn bump_reports_profile_and_maximum() {
    let out = bin()
        .args([
            "bump",
            "--amplitude",
            "0.2",
            "--width",
            "0.3",
            "--samples",
            "64",
            "--format",
            "json",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(value["result"]["max_defect"].as_f64().unwrap() > 0.01);
}

#[test]
fn output_flag_writes_file() {
    let dir = std::env::temp_dir().join("yamabe_cli_out");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = bin()
        .args([
            "escobar",
            "--a",
            "0.3",
            "--family",
            "0,0.3,0.6",
            "--format",
            "json",
            "--output",
            path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let value: serde_json::Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert!(value["result"]["family_spread"].as_f64().unwrap() < 1e-6);
    assert!(value["result"]["residual_boundary"].as_f64().unwrap() < 1e-9);
}

#[test]
fn check_commands_report_conclusions() {
    let out = bin()
        .args([
            "check-thm1",
            "--n",
            "3",
            "--gamma",
            "1",
            "--c",
            "0.1",
            "--h-g",
            "2",
            "--h-h",
            "1",
            "--ratio-sup",
            "0.4",
            "--format",
            "json",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value["result"]["conclusion"], "unique_type_II_yamabe");

    let out = bin()
        .args([
            "check-cr",
            "--r-theta",
            "0.9",
            "--r-big-theta",
            "1.0",
            "--ratio-sup",
            "0.9",
            "--format",
            "json",
        ])
        .output()
        .unwrap();
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value["result"]["conclusion"], "unique_cr_yamabe");

    // missing the volume acknowledgement is a precondition error
    let out = bin()
        .args([
            "check-corollary",
            "--n",
            "3",
            "--h-g",
            "2",
            "--h-h",
            "1",
            "--density-condition",
            "-0.5",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
