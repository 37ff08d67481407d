use std::path::Path;
use std::process::{Command, Output};

use latzero::design::{solve_design, FourierBesselDesign, LatticeSpec};
use latzero::synthesis::{synthesize_waves, QuantizationSpec};

fn latzero(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_latzero"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str], dir: &Path) -> String {
    let out = latzero(args, dir);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str], dir: &Path) -> i32 {
    latzero(args, dir).status.code().expect("exited normally")
}

fn tmp() -> tempfile::TempDir {
    tempfile::tempdir().unwrap()
}

/// `(nx, ny, words)` with `words[row][col]`, row 0 at the top.
fn read_pgm(path: &Path) -> (usize, usize, Vec<Vec<u16>>) {
    let bytes = std::fs::read(path).unwrap();
    let mut fields = Vec::new();
    let mut pos = 0;
    while fields.len() < 4 {
        let start = pos;
        while !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        fields.push(String::from_utf8(bytes[start..pos].to_vec()).unwrap());
        pos += 1;
    }
    assert_eq!(fields[0], "P5");
    assert_eq!(fields[3], "65535");
    let (nx, ny): (usize, usize) = (fields[1].parse().unwrap(), fields[2].parse().unwrap());
    let data = &bytes[pos..];
    assert_eq!(data.len(), 2 * nx * ny);
    let rows = (0..ny)
        .map(|r| (0..nx).map(|c| u16::from_be_bytes([data[2 * (r * nx + c)], data[2 * (r * nx + c) + 1]])).collect())
        .collect();
    (nx, ny, rows)
}

fn csv_cells(text: &str, label: &str) -> Vec<String> {
    let line = text.lines().find(|l| l.split(',').next() == Some(label)).unwrap_or_else(|| panic!("no row {label}"));
    line.split(',').skip(1).map(str::to_string).collect()
}

fn lattice(lambda_f: f64) -> LatticeSpec {
    LatticeSpec::new(0.78, lambda_f).unwrap()
}

#[test]
fn design_prints_coefficients() {
    let dir = tmp();
    let out = ok(&["design", "--lambda", "0.78", "--lattice", "0.8", "--sites", "2"], dir.path());
    assert!(out.contains("a2  = 0.715295"), "{out}");
    assert!(out.contains("a4  = -0.118415"), "{out}");
}

#[test]
fn design_rejects_zero_sites() {
    let dir = tmp();
    let out = latzero(&["design", "--sites", "0"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--sites"));
}

#[test]
fn design_file_reserializes_identically() {
    let dir = tmp();
    ok(&["design", "--sites", "6", "-o", "m6.json", "--quiet"], dir.path());
    let bytes = std::fs::read_to_string(dir.path().join("m6.json")).unwrap();
    let design = FourierBesselDesign::from_json(&bytes).unwrap();
    assert_eq!(design.to_json(), bytes);
    assert_eq!(design.coefficients(), solve_design(lattice(0.8), 6).unwrap().coefficients());
}

#[test]
fn table1_default_column_m5() {
    let dir = tmp();
    let out = ok(&["table1"], dir.path());
    let ideal: Vec<&str> = out
        .lines()
        .map(|l| l.split_whitespace().collect::<Vec<_>>())
        .find(|t| t[0] == "max|A|^2" && t[1].parse::<f64>().is_ok())
        .unwrap();
    assert_eq!(ideal[5], "3.64e-05");
    let m_max: Vec<&str> = out.lines().find(|l| l.starts_with("m_max ")).unwrap().split_whitespace().collect();
    assert_eq!(m_max[1..], ["4", "8", "11", "14", "19", "28"]);
}

#[test]
fn table1_csv_matches_library_exactly() {
    let dir = tmp();
    let out = ok(&["table1", "--format", "csv"], dir.path());
    let max = csv_cells(&out, "max|A|^2");
    let quantized = csv_cells(&out, "max|A|^2 14-bit N=256");
    for m in 1..=6 {
        let d = solve_design(lattice(0.8), m).unwrap();
        let ideal = d.crosstalk_report(50).unwrap().max_intensity;
        assert_eq!(max[m - 1].parse::<f64>().unwrap(), ideal);
        let q = synthesize_waves(&d, 256)
            .unwrap()
            .quantize(QuantizationSpec::uniform(14).unwrap())
            .unwrap()
            .lattice_crosstalk(&lattice(0.8), 50)
            .unwrap();
        assert_eq!(quantized[m - 1].parse::<f64>().unwrap(), q.max_intensity);
        let a = csv_cells(&out, &format!("a{}", 2 * m));
        assert_eq!(a[m - 1].parse::<f64>().unwrap(), d.coefficients()[m - 1]);
    }
}

#[test]
fn table1_longer_lattice_matches_library() {
    let dir = tmp();
    let out = ok(&["table1", "--lattice", "1.0", "--format", "json"], dir.path());
    let cols: serde_json::Value = serde_json::from_str(&out).unwrap();
    for m in 1..=6 {
        let r = solve_design(lattice(1.0), m).unwrap().crosstalk_report(50).unwrap();
        assert_eq!(cols[m - 1]["max_intensity"].as_f64().unwrap(), r.max_intensity);
        assert_eq!(cols[m - 1]["m_max"].as_u64().unwrap() as usize, r.m_max);
    }
}

#[test]
fn table1_high_bit_depth_matches_ideal() {
    let dir = tmp();
    let out = ok(&["table1", "--bits", "30", "-o", "t.csv"], dir.path());
    assert!(out.is_empty());
    let text = std::fs::read_to_string(dir.path().join("t.csv")).unwrap();
    let ideal = csv_cells(&text, "max|A|^2");
    let quantized = csv_cells(&text, "max|A|^2 30-bit N=256");
    for (i, q) in ideal.iter().zip(&quantized) {
        let (i, q): (f64, f64) = (i.parse().unwrap(), q.parse().unwrap());
        assert!((q / i - 1.0).abs() < 0.01, "{q} vs {i}");
    }
}

#[test]
fn table1_is_deterministic() {
    let dir = tmp();
    assert_eq!(ok(&["table1", "--format", "csv"], dir.path()), ok(&["table1", "--format", "csv"], dir.path()));
}

#[test]
fn gaussian_waists() {
    let dir = tmp();
    let out = ok(&["gaussian", "--epsilon", "1e-5", "--lattice", "1.0", "--format", "json"], dir.path());
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!((v["w0_tilde"].as_f64().unwrap() - 0.2084).abs() < 5e-5);

    let out = ok(&["gaussian", "--epsilon", "0.99", "--format", "json"], dir.path());
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!((v["w0_tilde"].as_f64().unwrap() - 7.05).abs() < 0.01);

    assert_eq!(code(&["gaussian", "--epsilon", "2"], dir.path()), 2);
}

#[test]
fn na_curve_csv_file() {
    let dir = tmp();
    ok(&["na-curve", "--ratios", "1,2,10", "--range", "0.1:1.0:0.01", "-o", "na.csv"], dir.path());
    let text = std::fs::read_to_string(dir.path().join("na.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("w0_tilde,na_1,na_2,na_10"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 91);
    let at = rows.iter().find(|r| (r[0] - 0.3).abs() < 1e-9).unwrap();
    assert!(at[1] > at[2] && at[2] > at[3]);

    let single = ok(&["na-curve", "--ratios", "1", "--range", "0.3:0.3:0.01", "--format", "csv"], dir.path());
    assert_eq!(single, "w0_tilde,na\n0.3,0.846733\n");

    assert_eq!(code(&["na-curve", "--range", "1:0.1:0.01"], dir.path()), 2);
    assert_eq!(code(&["na-curve", "--range", "0.1:1"], dir.path()), 2);
}

#[test]
fn map_steered_ring_peak() {
    let dir = tmp();
    let args = ["map", "--uniform", "--n-beams", "100", "--shift", "4,2", "--extent", "10", "--step", "0.05", "-o", "steered.pgm"];
    ok(&args, dir.path());
    let (nx, ny, rows) = read_pgm(&dir.path().join("steered.pgm"));
    let meta: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("steered.json")).unwrap()).unwrap();
    assert_eq!((meta["nx"].as_u64().unwrap() as usize, meta["ny"].as_u64().unwrap() as usize), (nx, ny));

    let (mut best, mut at) = (0, (0, 0));
    for (r, row) in rows.iter().enumerate() {
        for (c, &w) in row.iter().enumerate() {
            if w > best {
                best = w;
                at = (r, c);
            }
        }
    }
    let step = meta["step"].as_f64().unwrap();
    let x = meta["x_min"].as_f64().unwrap() + at.1 as f64 * step;
    let y = meta["top_row_y"].as_f64().unwrap() - at.0 as f64 * step;
    assert!((x - 4.0).abs() <= step && (y - 2.0).abs() <= step, "peak at ({x}, {y})");

    let first = std::fs::read(dir.path().join("steered.pgm")).unwrap();
    ok(&args, dir.path());
    assert_eq!(first, std::fs::read(dir.path().join("steered.pgm")).unwrap());
}

#[test]
fn map_design_sites_are_dark() {
    let dir = tmp();
    ok(&["design", "--sites", "6", "-o", "m6.json", "--quiet"], dir.path());
    ok(&["map", "--design", "m6.json", "--n-beams", "256", "--extent", "12", "--step", "0.1", "-o", "out.pgm"], dir.path());
    let (nx, ny, rows) = read_pgm(&dir.path().join("out.pgm"));
    assert_eq!((nx, ny), (241, 241));
    let centre = 120;
    assert_eq!(rows[centre][centre], 65535);
    for m in 1..=6 {
        // sites sit at x = 0.4 m, four samples apart
        assert_eq!(rows[centre][centre + 4 * m], 0, "site {m}");
        assert_eq!(rows[centre][centre - 4 * m], 0, "site -{m}");
    }
}

#[test]
fn map_usage_errors() {
    let dir = tmp();
    assert_eq!(code(&["map", "--uniform", "--step", "0", "-o", "x.pgm"], dir.path()), 2);
    assert_eq!(code(&["map", "--uniform"], dir.path()), 2);
    assert_eq!(code(&["map", "--uniform", "--design", "d.json", "-o", "x.pgm"], dir.path()), 2);
    assert_eq!(code(&["map", "--uniform", "--extent", "1000", "--step", "0.01", "-o", "x.pgm"], dir.path()), 2);

    ok(&["design", "--sites", "2", "-o", "m2.json", "--quiet"], dir.path());
    let before = std::fs::read(dir.path().join("m2.json")).unwrap();
    assert_eq!(code(&["map", "--design", "m2.json", "--extent", "1", "-o", "m2.pgm"], dir.path()), 2);
    assert_eq!(before, std::fs::read(dir.path().join("m2.json")).unwrap());
}

#[test]
fn map_csv_output() {
    let dir = tmp();
    ok(&["map", "--uniform", "--n-beams", "16", "--extent", "1", "--step", "0.5", "-o", "m.csv", "--quiet"], dir.path());
    let text = std::fs::read_to_string(dir.path().join("m.csv")).unwrap();
    assert_eq!(text.lines().next(), Some("x,y,intensity"));
    assert_eq!(text.lines().count(), 26);
    assert!(dir.path().join("m.json").exists());
}

#[test]
fn ring_diameter() {
    let dir = tmp();
    let out = ok(&["ring", "--n-beams", "100", "--lambda", "0.78", "--format", "json"], dir.path());
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!((v["predicted_um"].as_f64().unwrap() - 19.5).abs() < 1e-9);
    let ratio = v["ratio"].as_f64().unwrap();
    assert!((1.05..=1.6).contains(&ratio), "{ratio}");

    let out = ok(&["ring", "--n-beams", "8", "--format", "json"], dir.path());
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!((v["predicted_um"].as_f64().unwrap() - 1.56).abs() < 1e-9);
    assert!(v["measured_um"].as_f64().unwrap().is_finite());

    assert_eq!(code(&["ring", "--n-beams", "7"], dir.path()), 2);
    assert_eq!(code(&["ring", "--n-beams", "100", "--threshold", "0.9"], dir.path()), 5);
}

#[test]
fn wave_pipeline() {
    let dir = tmp();
    ok(&["synth", "--sites", "3", "--n-beams", "64", "-o", "w.json", "--quiet"], dir.path());
    ok(&["steer", "--waves", "w.json", "--shift", "-1.5,0.5", "-o", "s.json", "--quiet"], dir.path());
    let out = ok(&["quantize", "--waves", "s.json", "--bits", "10", "--words", "words.csv", "-o", "q.json"], dir.path());
    assert!(out.contains("10-bit amplitude"));

    let words = std::fs::read_to_string(dir.path().join("words.csv")).unwrap();
    assert_eq!(words.lines().next(), Some("pixel,amp_word,phase_word"));
    assert_eq!(words.lines().count(), 65);
    let q = latzero::PlaneWaveSet::from_json(&std::fs::read_to_string(dir.path().join("q.json")).unwrap()).unwrap();
    assert_eq!(q.len(), 64);

    let csv = ok(&["synth", "--sites", "3", "--n-beams", "64", "--format", "csv"], dir.path());
    assert_eq!(csv.lines().next(), Some("j,phi,re,im"));
    assert_eq!(csv.lines().count(), 65);
}

#[test]
fn undersampled_and_io_errors() {
    let dir = tmp();
    assert_eq!(code(&["synth", "--sites", "6", "--n-beams", "20"], dir.path()), 2);
    assert_eq!(code(&["crosstalk", "--design", "missing.json"], dir.path()), 4);
    std::fs::write(dir.path().join("bad.json"), "{\"bad\": 1}").unwrap();
    assert_eq!(code(&["crosstalk", "--design", "bad.json"], dir.path()), 4);
    assert_eq!(code(&["design", "-o", "no/such/dir/d.json"], dir.path()), 4);
}

#[test]
fn crosstalk_synthesized_close_to_ideal() {
    let dir = tmp();
    let ideal: serde_json::Value =
        serde_json::from_str(&ok(&["crosstalk", "--sites", "4", "--format", "json"], dir.path())).unwrap();
    let synth: serde_json::Value =
        serde_json::from_str(&ok(&["crosstalk", "--sites", "4", "--n-beams", "256", "--format", "json"], dir.path())).unwrap();
    assert_eq!(ideal["m_max"], synth["m_max"]);
    let (a, b) = (ideal["max_intensity"].as_f64().unwrap(), synth["max_intensity"].as_f64().unwrap());
    assert!((a / b - 1.0).abs() < 1e-6);
}
