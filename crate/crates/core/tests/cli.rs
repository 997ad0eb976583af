use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nrule::curves::verify_incidence;
use nrule::geometry::{Line, Point};
use nrule::io::{load_config, read_records, CurveRecord, Flag, OrbitRecord, System};

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

fn nrule(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nrule"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn orbit_csv(path: &Path) -> Vec<OrbitRecord> {
    read_records(std::fs::File::open(path).unwrap()).unwrap()
}

fn simulate(cfg: &str, steps: usize, extra: &[&str]) -> (Output, Vec<OrbitRecord>, String) {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("orbit.csv");
    let svg = dir.path().join("orbit.svg");
    let steps = steps.to_string();
    let cfg = config(cfg);
    let mut args = vec![
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--steps",
        &steps,
        "--out",
        csv.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    let out = nrule(&args);
    let rows = if csv.exists() { orbit_csv(&csv) } else { Vec::new() };
    let svg = std::fs::read_to_string(&svg).unwrap_or_default();
    (out, rows, svg)
}

fn tail_repeats(rows: &[OrbitRecord], period: usize, tol: f64) -> bool {
    let n = rows.len();
    (n - 3 * period..n - period).all(|i| {
        let (a, b) = (&rows[i], &rows[i + period]);
        Point::new(a.x, a.y).distance(Point::new(b.x, b.y)) < tol
    })
}

fn smallest_tail_period(rows: &[OrbitRecord], tol: f64) -> usize {
    (1..=64).find(|&p| tail_repeats(rows, p, tol)).unwrap()
}

fn svg_line_labels(svg: &str) -> Vec<String> {
    let doc = roxmltree::Document::parse(svg).expect("well-formed SVG");
    assert_eq!(doc.root_element().tag_name().name(), "svg");
    doc.descendants()
        .filter(|n| n.has_tag_name("line"))
        .map(|n| n.attribute("data-label").unwrap().to_string())
        .collect()
}

#[test]
fn six_cycle_on_four_lines() {
    let (out, rows, svg) = simulate("x4_six_cycle.json", 600, &["--require-convergence"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(rows.len(), 601);
    assert!(rows.windows(2).all(|w| w[1].step == w[0].step + 1));
    assert_eq!(smallest_tail_period(&rows, 1e-8), 6);
    assert_eq!(rows.last().unwrap().flag, Flag::Converged);
    assert_eq!(svg_line_labels(&svg).len(), 4);
    assert!(svg.contains("id=\"cycle\""));
}

#[test]
fn four_cycle_on_five_lines() {
    let (out, rows, svg) = simulate("y5_four_cycle.json", 2000, &["--require-convergence"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(smallest_tail_period(&rows, 1e-8), 4);
    let doc = roxmltree::Document::parse(&svg).unwrap();
    let cycle = doc
        .descendants()
        .find(|n| n.attribute("id") == Some("cycle"))
        .expect("limit cycle drawn");
    assert_eq!(cycle.tag_name().name(), "polygon");
    assert_eq!(cycle.attribute("points").unwrap().split(' ').count(), 4);
    assert_eq!(svg_line_labels(&svg).len(), 5);
}

#[test]
fn zero_steps_writes_only_the_start() {
    let (out, rows, svg) = simulate("x3_curve.json", 0, &["--start", "0.25,0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(rows.len(), 1);
    assert_eq!((rows[0].step, rows[0].x, rows[0].y), (0, 0.25, 0.0));
    assert_eq!(rows[0].carrier, "L1");
    assert_eq!(svg_line_labels(&svg).len(), 3);
}

#[test]
fn degenerate_and_unconverged_exit_codes() {
    // (1, 0) is equidistant from the other two lines
    let (out, rows, _) = simulate("y3_acc.json", 50, &["--start", "1,0"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].flag, Flag::TieHit);

    let (out, _, _) = simulate("x4_six_cycle.json", 3, &["--require-convergence"]);
    assert_eq!(out.status.code(), Some(3));
    let (out, _, _) = simulate("x4_six_cycle.json", 3, &[]);
    assert_eq!(out.status.code(), Some(0));

    let (out, _, _) = simulate("x3_curve.json", 3, &["--start", "3,3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("does not lie on any line"));
}

#[test]
fn build_curve_on_three_lines() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("curve.csv");
    let svg = dir.path().join("curve.svg");
    let cfg = config("x3_curve.json");
    let out = nrule(&[
        "build-curve",
        "--config",
        cfg.to_str().unwrap(),
        "--angles",
        "80,80,80",
        "--labels",
        "L1,L2,L3",
        "--out",
        csv.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows: Vec<CurveRecord> = read_records(std::fs::File::open(&csv).unwrap()).unwrap();
    assert_eq!(rows.len(), 3);

    let System::Symbolic(map) = load_config(&cfg).unwrap().system().unwrap() else {
        unreachable!()
    };
    let arr = map.arrangement();
    let vertices: Vec<Point> = rows.iter().map(|r| Point::new(r.x, r.y)).collect();
    let carriers: Vec<Line> = rows
        .iter()
        .map(|r| arr.line(arr.index_of(&r.carrier).unwrap()).clone())
        .collect();
    let curve = nrule::curves::ClosedCurve::new(vertices, carriers).unwrap();
    let labels: Vec<String> = ["L1", "L2", "L3"].map(String::from).to_vec();
    assert!(verify_incidence(&curve, &[80f64.to_radians(); 3], &labels, 1e-9));
    for r in &rows {
        assert!((r.realized_angle_deg - 80.0).abs() < 1e-9);
    }
    let text = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(svg_line_labels(&text).len(), 3);
    assert!(text.contains("id=\"curve\""));
}

#[test]
fn build_curve_rejects_bad_specs() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("curve.csv");
    let cfg = config("x3_curve.json");
    let run = |angles: &str, labels: &str| {
        nrule(&[
            "build-curve",
            "--config",
            cfg.to_str().unwrap(),
            "--angles",
            angles,
            "--labels",
            labels,
            "--out",
            csv.to_str().unwrap(),
        ])
    };
    let short = run("80,80", "L1,L2");
    assert_eq!(short.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&short.stderr).contains("invalid curve spec"));

    let missing = run("80,80,80,80", "L1,L2,L1,L2");
    assert_eq!(missing.status.code(), Some(1));
    let msg = String::from_utf8_lossy(&missing.stderr);
    assert!(msg.contains("invalid curve spec") && msg.contains("L3"), "{msg}");
}

#[test]
fn analyze_reports() {
    let out = nrule(&["analyze", "--config", config("collapsing_five_rule.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("collapsing: true (rule 3)"), "{text}");

    let out = nrule(&["analyze", "--config", config("y3_acc.json").to_str().unwrap()]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("ACC: satisfied, margin 12.5°"), "{text}");

    let out = nrule(&[
        "analyze",
        "--config",
        config("x4_six_cycle.json").to_str().unwrap(),
        "--format",
        "csv",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    let value = |field: &str| -> Vec<f64> {
        rows.iter()
            .filter(|r| &r[2] == field)
            .map(|r| r[3].parse().unwrap())
            .collect()
    };
    let product: f64 = value("c").iter().product();
    assert_eq!(value("c").len(), 6);
    assert!((product - value("C")[0]).abs() < 1e-9);
}

#[test]
fn invalid_configs_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"mode": "symbolic", "lines": []"#).unwrap();
    let out = nrule(&["analyze", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parse error"));

    let out = nrule(&["simulate", "--config", "missing.json", "--steps", "1", "--out", "x.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.json"));

    let out = nrule(&["simulate", "--steps", "1"]);
    assert_eq!(out.status.code(), Some(1));
}
