use std::path::Path;
use std::process::{Command, Output};

fn hcf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hcf"))
        .args(args)
        .env_remove("HCF_WORKERS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn assert_single_line_error(o: &Output, code: i32) {
    assert_eq!(o.status.code(), Some(code), "stderr: {}", stderr(o));
    let err = stderr(o);
    assert_eq!(err.lines().count(), 1, "{err:?}");
    assert!(err.starts_with("error: "), "{err:?}");
}

#[test]
fn expand_finite_expansion() {
    let o = hcf(&["expand", "0.4-0.2i", "5", "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["digits"], serde_json::json!(["2+i"]));
    assert_eq!(v["terminated"], true);
    assert_eq!(v["pass"], true);

    let o = hcf(&["expand", "0", "5"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("0 digits"));
}

#[test]
fn expand_outside_domain_is_a_domain_error() {
    let o = hcf(&["expand", "0.7", "3"]);
    assert_single_line_error(&o, 1);
    assert!(stderr(&o).contains("outside the fundamental domain"));

    assert_single_line_error(&hcf(&["expand", "1+", "3"]), 1);
    assert_single_line_error(&hcf(&["expand"]), 1);
}

#[test]
fn classify_and_admissible() {
    let o = hcf(&["classify", "-0.3-0.3i"]);
    assert_eq!(stdout(&o).trim(), "K1,1");

    let o = hcf(&["admissible", "2, 3"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "admissible");

    let o = hcf(&["admissible", "2, 2+i'"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("not admissible"), "{}", stdout(&o));

    assert_single_line_error(&hcf(&["admissible", "2, 1"]), 1);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "# small run\nk = 6\nL = 1\nregion = 1,1\n").unwrap();
    let cfg = cfg.to_str().unwrap();

    let o = hcf(&["--config", cfg, "table"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = stdout(&o);
    assert!(csv.lines().skip(1).all(|l| l.starts_with("6,")), "{csv}");
    assert_eq!(csv.lines().count(), 1 + 4);

    let o = hcf(&["--config", cfg, "table", "--k", "5", "--L", "0"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().nth(1).unwrap().split(',').next(), Some("5"));

    let bad = dir.path().join("bad.conf");
    std::fs::write(&bad, "colour = red\n").unwrap();
    assert_single_line_error(&hcf(&["--config", bad.to_str().unwrap(), "table"]), 1);
    assert_single_line_error(&hcf(&["table", "--k", "17"]), 1);
    assert_single_line_error(&hcf(&["table", "--L", "13"]), 1);
}

#[test]
fn table_v21_odd_coefficient() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("v21.csv");
    let o = hcf(&[
        "table", "--region", "2,1", "--base", "0,0", "--k", "7", "--L", "4", "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&csv).unwrap();
    let h01: f64 = text
        .lines()
        .find(|l| l.starts_with("7,0,1,"))
        .unwrap()
        .rsplit(',')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!((h01 - 0.529).abs() < 0.03, "h01 = {h01}");
}

#[test]
fn table_fit_json_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let run = |workers: &str, tag: &str| {
        let csv = dir.path().join(format!("{tag}.csv"));
        let json = dir.path().join(format!("{tag}.json"));
        let o = hcf(&[
            "--workers", workers, "table", "--k", "5..8", "--L", "2", "--csv",
            csv.to_str().unwrap(), "--json", json.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        (std::fs::read(csv).unwrap(), std::fs::read(json).unwrap())
    };
    let one = run("1", "one");
    let four = run("4", "four");
    assert_eq!(one, four);

    let v: serde_json::Value = serde_json::from_slice(&one.1).unwrap();
    assert_eq!(v["fits"].as_array().unwrap().len(), 6);
    assert_eq!(v["resolutions"], serde_json::json!([5, 6, 7, 8]));

    let o = hcf(&["fit", dir.path().join("one.csv").to_str().unwrap(), "--m", "0", "--n", "0"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let a = v["fits"][0]["a"].as_f64().unwrap();
    assert!((a - 0.71).abs() < 0.03, "a = {a}");
}

fn read_pgm(path: &Path) -> (usize, Vec<u8>) {
    let bytes = std::fs::read(path).unwrap();
    let mut fields = Vec::new();
    let mut pos = 0;
    while fields.len() < 4 {
        while bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        fields.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    assert_eq!(fields[0], "P5");
    assert_eq!(fields[3], "255");
    let n: usize = fields[1].parse().unwrap();
    assert_eq!(fields[2].parse::<usize>().unwrap(), n);
    let pixels = bytes[pos + 1..].to_vec();
    assert_eq!(pixels.len(), n * n);
    (n, pixels)
}

#[test]
fn plot_smoke_and_rotation_symmetry() {
    let dir = tempfile::tempdir().unwrap();
    let small = dir.path().join("small.pgm");
    let o = hcf(&["plot", "--n", "8", "--k", "6", "--out", small.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (n, px) = read_pgm(&small);
    assert_eq!(n, 8);
    assert!(px.contains(&255));

    let img = dir.path().join("h.pgm");
    let o = hcf(&["plot", "--n", "128", "--k", "7", "--out", img.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let (n, px) = read_pgm(&img);
    // A quarter turn about the centre maps (row, col) to (col, n-1-row).
    let mut sum = 0.0;
    let mut count = 0;
    for row in 0..n {
        for col in 0..n {
            let (a, b) = (px[row * n + col], px[col * n + (n - 1 - row)]);
            if a == 0 || b == 0 {
                continue;
            }
            let rel = (a as f64 - b as f64) / a as f64;
            sum += rel * rel;
            count += 1;
        }
    }
    let rms = (sum / count as f64).sqrt();
    assert!(count > n * n / 2);
    assert!(rms < 0.03, "rotation rms {rms}");

    let ppm = dir.path().join("h.ppm");
    let o = hcf(&["plot", "--n", "8", "--k", "6", "--out", ppm.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(std::fs::read(&ppm).unwrap().starts_with(b"P6\n8 8 255\n"));
}

#[test]
fn plot_with_missing_grid_names_the_region() {
    let dir = tempfile::tempdir().unwrap();
    let o = hcf(&["grid", "build", "--all", "--k", "5", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v23 = dir.path().join("V23.grid");
    let info = hcf(&["grid", "info", v23.to_str().unwrap()]);
    assert!(stdout(&info).starts_with("region K2,3\nk 5\n"), "{}", stdout(&info));
    let pbm = dir.path().join("v23.pbm");
    assert!(hcf(&["grid", "export-pbm", v23.to_str().unwrap(), pbm.to_str().unwrap()])
        .status
        .success());
    assert!(std::fs::read(&pbm).unwrap().starts_with(b"P4\n64 64\n"));

    std::fs::remove_file(&v23).unwrap();
    let out = dir.path().join("x.pgm");
    let o = hcf(&[
        "plot", "--n", "8", "--grids", dir.path().to_str().unwrap(), "--out",
        out.to_str().unwrap(),
    ]);
    assert_single_line_error(&o, 1);
    assert!(stderr(&o).contains("K2,3"), "{}", stderr(&o));
}

#[test]
fn validate_passes_and_catches_injected_fault() {
    let o = hcf(&["validate", "--samples", "200", "--steps", "1e5"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["suites"].as_array().unwrap().len(), 7);

    let o = hcf(&["validate", "--suite", "admissible", "--steps", "1e6"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["suites"][0]["failures"], 0);

    let o = hcf(&["validate", "--suite", "determinant", "--flip-q-sign"]);
    assert_eq!(o.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["suites"][0]["suite"], "determinant");
    assert_eq!(v["suites"][0]["pass"], false);

    assert_single_line_error(&hcf(&["validate", "--suite", "nonsense"]), 1);
}

#[test]
fn freq_of_k11() {
    let o = hcf(&["freq", "--steps", "1e6", "--region", "K11"]);
    assert!(o.status.success());
    let f: f64 = stdout(&o).trim().parse().unwrap();
    assert!((f - 0.066).abs() < 0.005, "{f}");
}

#[test]
fn bad_worker_env_is_rejected() {
    let o = Command::new(env!("CARGO_BIN_EXE_hcf"))
        .args(["classify", "0.1+0.1i"])
        .env("HCF_WORKERS", "lots")
        .output()
        .unwrap();
    assert_single_line_error(&o, 1);
}
