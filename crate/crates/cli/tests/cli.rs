//! End-to-end checks of the command line: artifacts, determinism, exit
//! codes and the CSV round trip.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_plasmabranch"))
}

fn tmpdir(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("plasmabranch-test-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header: Vec<String> = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse::<f64>().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn solve_at_origin_writes_unit_alpha() {
    let dir = tmpdir("solve");
    let out = dir.join("s0");
    let status = bin()
        .args([
            "solve", "--domain", "disk", "--res", "64x16", "--p", "1", "--lambda", "0",
        ])
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let (header, rows) = read_csv(&dir.join("s0.csv"));
    assert_eq!(header[0], "s");
    assert_eq!(header[2], "alpha");
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][1], 0.0); // lambda
    assert_eq!(rows[0][2], 1.0); // alpha
}

#[test]
fn branch_artifacts_and_determinism() {
    let dir = tmpdir("branch");
    for name in ["a", "b"] {
        let status = bin()
            .args([
                "branch", "--domain", "disk", "--res", "96x16", "--p", "1", "--seed", "7",
            ])
            .arg("--out")
            .arg(dir.join(name))
            .status()
            .unwrap();
        assert!(status.success());
    }
    let a = std::fs::read(dir.join("a.csv")).unwrap();
    let b = std::fs::read(dir.join("b.csv")).unwrap();
    assert_eq!(a, b, "identical config + seed must give byte-identical CSV");
    assert!(dir.join("a.json").exists());
    assert!(dir.join("a.gp").exists());

    // final row approximates the p = 1 endpoint
    let (_, rows) = read_csv(&dir.join("a.csv"));
    let last = rows.last().unwrap();
    assert!(
        (last[1] - 18.17).abs() < 0.19,
        "endpoint lambda {}",
        last[1]
    );
    assert!((last[3] - 0.0398).abs() < 0.001, "endpoint E {}", last[3]);

    // sidecar + CSV round trip: recheck branch-data invariants offline
    let (header, rows) = read_csv(&dir.join("a.csv"));
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let (il, ia, ie) = (col("lambda"), col("alpha"), col("E"));
    let (ida, ide) = (col("dalpha_dlambda"), col("dE_dlambda"));
    let n = rows.len() - 1; // last row is the extrapolated endpoint
    for w in rows[..n].windows(2) {
        assert!(w[1][ia] < w[0][ia]);
        assert!(w[1][ie] > w[0][ie]);
    }
    let mut worst = 0.0f64;
    for i in 1..n - 1 {
        let hm = rows[i][il] - rows[i - 1][il];
        let hp = rows[i + 1][il] - rows[i][il];
        let fd = |k: usize| {
            rows[i + 1][k] * hm / (hp * (hm + hp)) + rows[i][k] * (hp - hm) / (hp * hm)
                - rows[i - 1][k] * hp / (hm * (hm + hp))
        };
        worst = worst.max(((fd(ia) - rows[i][ida]) / rows[i][ida]).abs());
        worst = worst.max(((fd(ie) - rows[i][ide]) / rows[i][ide]).abs());
    }
    assert!(worst < 1e-3, "offline slope recheck {worst}");
    let sidecar: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("a.json")).unwrap()).unwrap();
    assert_eq!(sidecar["termination"], "alpha tolerance reached");
    assert!(sidecar["endpoint"]["lambda"].as_f64().unwrap() > 17.9);
}

#[test]
fn config_file_and_flag_override() {
    let dir = tmpdir("config");
    let cfg = dir.join("run.json");
    std::fs::write(
        &cfg,
        r#"{ "domain": "disk", "res": "64x16", "p": 2.0, "lambda": 0.5 }"#,
    )
    .unwrap();
    let out = dir.join("cfg");
    let status = bin()
        .args(["solve", "--config"])
        .arg(&cfg)
        .args(["--lambda", "0.25"]) // overrides the file
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let (_, rows) = read_csv(&dir.join("cfg.csv"));
    assert_eq!(rows[0][1], 0.25);
}

#[test]
fn bad_configs_exit_one_with_field_name() {
    // malformed json
    let dir = tmpdir("bad");
    let cfg = dir.join("broken.json");
    std::fs::write(&cfg, r#"{ "domain": "disk", "p": }"#).unwrap();
    let out = bin()
        .args(["solve", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));

    // unknown field named in the message
    std::fs::write(&cfg, r#"{ "domain": "disk", "wavelength": 3 }"#).unwrap();
    let out = bin()
        .args(["solve", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("wavelength"), "stderr: {msg}");

    // invalid parameter named
    let out = bin()
        .args(["solve", "--domain", "ball3", "--p", "4"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("'p'"), "stderr: {msg}");

    // unsupported domain
    let out = bin()
        .args(["solve", "--domain", "triangle"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn spectrum_and_sobolev_json() {
    let dir = tmpdir("json");
    let status = bin()
        .args([
            "spectrum", "--domain", "disk", "--res", "64x16", "--p", "2", "--lambda", "0",
        ])
        .arg("--out")
        .arg(dir.join("spec"))
        .status()
        .unwrap();
    assert!(status.success());
    let spec: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("spec.json")).unwrap()).unwrap();
    let sig = spec["sigmas"][0].as_f64().unwrap();
    assert!((sig - 46.1).abs() < 1.0, "sigma1 {sig}");

    let status = bin()
        .args(["sobolev", "--domain", "square", "--res", "41", "--p", "2"])
        .arg("--out")
        .arg(dir.join("sob"))
        .status()
        .unwrap();
    assert!(status.success());
    let sob: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("sob.json")).unwrap()).unwrap();
    let lam = sob["lambda"].as_f64().unwrap();
    assert!(
        (lam - 2.0 * std::f64::consts::PI.powi(2)).abs() < 0.2,
        "{lam}"
    );
}

#[test]
fn verify_coarse_grid_reports_and_exit_code() {
    let dir = tmpdir("verify");
    let cfg = dir.join("verify.json");
    std::fs::write(
        &cfg,
        r#"{ "disk_radial": 64, "disk_angular": 16, "square_nodes": 33,
             "ball_nodes": 128, "samples": 6, "modes": 6 }"#,
    )
    .unwrap();
    let out = bin()
        .args(["verify", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("report"))
        .output()
        .unwrap();
    // the stated ball constant cannot match the measured torsion energy at
    // N >= 3, so the suite reports failures and exits 3
    assert_eq!(out.status.code(), Some(3));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("criteria passed"), "{stdout}");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap();
    let records = report.as_array().unwrap();
    assert_eq!(records.len(), 14);
    for r in records {
        assert!(r["id"].as_u64().is_some());
        assert!(r["expected"].as_str().is_some());
        assert!(r["measured"].as_str().is_some());
        assert!(r["tolerance"].as_str().is_some());
        assert!(r["pass"].as_bool().is_some());
    }
    // coarse grids show up in the tolerance records
    let tol1 = records[0]["tolerance"].as_str().unwrap();
    assert!(tol1.contains("coarse grid"), "{tol1}");
}
