use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::config::{ConfigError, System, SystemConfig};
use super::records::{write_records, CurveRecord, Flag, OrbitRecord};
use super::svg;
use crate::curves::build_closed_curve_with_map;
use crate::error::Error;
use crate::geometry::{Point, VERIFY_TOL};
use crate::piecewise::{
    detect_periodic_points, separation_coefficient, toward_coefficient, PeriodicCycle,
    StepOutcome, DEFAULT_K_MAX, DEFAULT_PERIOD_TOL, ESCAPE_NORM,
};
use crate::symbolic::Branch;

/// Longest orbit tail drawn in SVG output.
const SVG_MAX_POINTS: usize = 5000;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(Error::DegenerateHit(_)) => 2,
            CliError::Core(Error::NotConverged(_)) => 3,
            _ => 1,
        }
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| io_err(path, e))
}

fn write_csv<T: serde::Serialize>(path: &Path, rows: &[T]) -> Result<(), CliError> {
    let f = File::create(path).map_err(|e| io_err(path, e))?;
    write_records(BufWriter::new(f), rows).map_err(|e| io_err(path, e))
}

/// How a simulation run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    Degenerate,
    NotConverged,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Success => 0,
            Outcome::Degenerate => 2,
            Outcome::NotConverged => 3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Simulation {
    pub records: Vec<OrbitRecord>,
    pub points: Vec<Point>,
    pub cycle: Option<PeriodicCycle>,
    pub degenerate: bool,
    pub escaped: bool,
}

/// Runs `steps` rule applications from `start` and looks for a limit cycle.
pub fn simulate(system: &System, start: Point, steps: usize) -> Result<Simulation, Error> {
    let arr = system.arrangement();
    let n = system.len();
    let start_line = arr
        .locate(start, VERIFY_TOL)
        .ok_or(Error::PointOffArrangement(start.x, start.y))?;
    let mut points = vec![start];
    let mut carriers = vec![start_line];
    let (mut degenerate, mut escaped) = (false, false);
    match system {
        System::Symbolic(map) => {
            let mut map = map.clone();
            map.reset();
            let mut x = start;
            for k in 0..steps {
                x = map.step(x)?;
                points.push(x);
                carriers.push(map.target(k % n));
                if !x.is_finite() || x.norm() > ESCAPE_NORM {
                    escaped = true;
                    break;
                }
            }
        }
        System::Piecewise(map) => {
            let orbit = map.iterate(start, steps)?;
            for (s, p) in orbit.steps.iter().zip(&orbit.points[1..]) {
                if let StepOutcome::Moved { target } = s.outcome {
                    carriers.push(target);
                    points.push(*p);
                }
            }
            degenerate = orbit.terminated_degenerate;
            escaped = orbit.escaped;
        }
    }
    let cycle = if degenerate || escaped {
        None
    } else {
        detect_periodic_points(&points, n, DEFAULT_PERIOD_TOL, DEFAULT_K_MAX).ok()
    };
    let converged_from = cycle
        .as_ref()
        .map(|c| converged_from(&points, c.period, DEFAULT_PERIOD_TOL))
        .unwrap_or(usize::MAX);
    let last = points.len() - 1;
    let records = points
        .iter()
        .zip(&carriers)
        .enumerate()
        .map(|(k, (p, &c))| OrbitRecord {
            step: k,
            x: p.x,
            y: p.y,
            rule_index: k % n,
            carrier: arr.line(c).label().to_string(),
            flag: if degenerate && k == last {
                Flag::TieHit
            } else if k >= converged_from {
                Flag::Converged
            } else {
                Flag::Ok
            },
        })
        .collect();
    Ok(Simulation {
        records,
        points,
        cycle,
        degenerate,
        escaped,
    })
}

/// First index from which every point returns within `tol` after `period`
/// steps, for as long as the run lasts.
fn converged_from(points: &[Point], period: usize, tol: f64) -> usize {
    let mut j = points.len();
    while j > period && points[j - 1].distance(points[j - 1 - period]) < tol {
        j -= 1;
    }
    j.saturating_sub(period).min(points.len())
}

#[derive(Debug, Clone, Default)]
pub struct SimulateArgs {
    pub steps: usize,
    pub start: Option<Point>,
    pub out_csv: PathBuf,
    pub out_svg: Option<PathBuf>,
    pub require_convergence: bool,
}

pub fn cmd_simulate(config: &SystemConfig, args: &SimulateArgs) -> Result<Outcome, CliError> {
    let system = config.system()?;
    let start = args.start.unwrap_or_else(|| config.default_start(&system));
    let sim = simulate(&system, start, args.steps)?;
    write_csv(&args.out_csv, &sim.records)?;
    if let Some(path) = &args.out_svg {
        let tail = &sim.points[sim.points.len().saturating_sub(SVG_MAX_POINTS)..];
        let cycle = sim.cycle.as_ref().map(|c| c.points.as_slice());
        write_file(path, &svg::orbit_svg(system.arrangement(), tail, cycle))?;
    }
    if sim.escaped {
        eprintln!("warning: orbit left every bounded window and was stopped");
    }
    Ok(if sim.degenerate {
        Outcome::Degenerate
    } else if args.require_convergence && sim.cycle.is_none() {
        Outcome::NotConverged
    } else {
        Outcome::Success
    })
}

pub struct BuildCurveArgs {
    pub angles_deg: Vec<f64>,
    pub labels: Vec<String>,
    pub out_csv: PathBuf,
    pub out_svg: Option<PathBuf>,
}

pub fn cmd_build_curve(config: &SystemConfig, args: &BuildCurveArgs) -> Result<Vec<CurveRecord>, CliError> {
    let arr = config.arrangement()?;
    if !matches!(config.mode, super::config::Mode::Symbolic) {
        return Err(CliError::Usage("build-curve needs a symbolic config".into()));
    }
    let angles: Vec<f64> = args.angles_deg.iter().map(|a| a.to_radians()).collect();
    let build = build_closed_curve_with_map(&arr, &angles, &args.labels)?;
    let curve = &build.curve;
    let rows: Vec<CurveRecord> = curve
        .vertices()
        .iter()
        .zip(curve.carrier_labels())
        .zip(curve.realized_angles())
        .enumerate()
        .map(|(k, ((p, label), a))| CurveRecord {
            k,
            x: p.x,
            y: p.y,
            carrier: label.to_string(),
            realized_angle_deg: a.to_degrees(),
        })
        .collect();
    write_csv(&args.out_csv, &rows)?;
    if let Some(path) = &args.out_svg {
        write_file(path, &svg::curve_svg(&arr, curve.vertices()))?;
    }
    if !build.flipped.is_empty() {
        eprintln!("orientation flips applied at rules {:?}", build.flipped);
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Csv,
}

/// Trims a fixed-precision rendering, so 12.500000 prints as 12.5.
pub fn trim_number(v: f64) -> String {
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

struct Report {
    rows: Vec<(String, String, String, String)>,
    text: String,
}

impl Report {
    fn row(&mut self, section: &str, index: &str, field: &str, value: String) {
        self.rows
            .push((section.into(), index.into(), field.into(), value));
    }
}

/// The analysis report as text or as `section,index,field,value` CSV rows.
pub fn cmd_analyze(config: &SystemConfig, format: ReportFormat) -> Result<String, CliError> {
    let system = config.system()?;
    let arr = system.arrangement();
    let mut r = Report {
        rows: Vec::new(),
        text: String::new(),
    };
    let t = &mut String::new();
    match &system {
        System::Symbolic(map) => {
            writeln!(t, "mode: symbolic").unwrap();
            writeln!(t, "lines: {}, rules: {}", arr.len(), map.len()).unwrap();
            let coefficients = map.coefficients();
            for (i, rule) in map.rules().iter().enumerate() {
                let (from, to) = (arr.line(map.source(i)), arr.line(map.target(i)));
                let branch = match map.rule_branch(i) {
                    Some(Branch::Away) => "away",
                    Some(Branch::Toward) => "toward",
                    None => "parallel",
                };
                writeln!(
                    t,
                    "rule {i}: {} -> {}, theta {}°, orientation {}, {branch}, c = {:.9}",
                    from.label(),
                    to.label(),
                    trim_number(rule.theta.to_degrees()),
                    rule.orientation.bit(),
                    coefficients[i]
                )
                .unwrap();
                let idx = i.to_string();
                r.row("rule", &idx, "from", from.label().into());
                r.row("rule", &idx, "to", to.label().into());
                r.row("rule", &idx, "theta_deg", trim_number(rule.theta.to_degrees()));
                r.row("rule", &idx, "orientation", rule.orientation.bit().to_string());
                r.row("rule", &idx, "branch", branch.into());
                r.row("rule", &idx, "c", format!("{:.12}", coefficients[i]));
            }
            let c = map.induced_coefficient();
            writeln!(t, "C: {c:.12}").unwrap();
            r.row("map", "", "C", format!("{c:.12}"));
            let culprits = map.collapsing_rules();
            if culprits.is_empty() {
                writeln!(t, "collapsing: false").unwrap();
            } else {
                let list: Vec<String> = culprits.iter().map(|i| i.to_string()).collect();
                writeln!(t, "collapsing: true (rule {})", list.join(", ")).unwrap();
            }
            r.row("map", "", "collapsing", (!culprits.is_empty()).to_string());
            for i in &culprits {
                r.row("map", &i.to_string(), "collapsing_rule", i.to_string());
            }
            match map.induced_fixed_point() {
                Ok(p) => {
                    writeln!(t, "fixed point: ({:.9}, {:.9}) on {}", p.x, p.y, map.induced_line().label())
                        .unwrap();
                    r.row("map", "", "fixed_point_x", format!("{:.12}", p.x));
                    r.row("map", "", "fixed_point_y", format!("{:.12}", p.y));
                }
                Err(_) => {
                    writeln!(t, "fixed point: none (neutral cycle)").unwrap();
                    r.row("map", "", "fixed_point_x", String::new());
                    r.row("map", "", "fixed_point_y", String::new());
                }
            }
            writeln!(t, "invariant points: none").unwrap();
        }
        System::Piecewise(map) => {
            let acc = map.acc_check();
            writeln!(t, "mode: piecewise").unwrap();
            writeln!(t, "lines: {}, rules: {}", arr.len(), map.len()).unwrap();
            for (i, rule) in map.rules().iter().enumerate() {
                let away = separation_coefficient(rule.theta, acc.delta);
                let toward = toward_coefficient(rule.theta, acc.delta);
                writeln!(
                    t,
                    "rule {i}: rank {}, theta {}°, orientation {}, c(delta) away {away:.9}, toward {toward:.9}",
                    rule.rank,
                    trim_number(rule.theta.to_degrees()),
                    rule.orientation.bit()
                )
                .unwrap();
                let idx = i.to_string();
                r.row("rule", &idx, "rank", rule.rank.to_string());
                r.row("rule", &idx, "theta_deg", trim_number(rule.theta.to_degrees()));
                r.row("rule", &idx, "orientation", rule.orientation.bit().to_string());
                r.row("rule", &idx, "c_away", format!("{away:.12}"));
                r.row("rule", &idx, "c_toward", format!("{toward:.12}"));
            }
            let delta_deg = acc.delta.to_degrees();
            let mean_deg = acc.mean_theta.to_degrees();
            let margin = trim_number(acc.margin().to_degrees());
            writeln!(t, "delta: {}°", trim_number(delta_deg)).unwrap();
            writeln!(t, "mean theta: {}°", trim_number(mean_deg)).unwrap();
            let verdict = if acc.satisfied { "satisfied" } else { "not satisfied" };
            writeln!(t, "ACC: {verdict}, margin {margin}°").unwrap();
            r.row("map", "", "delta_deg", trim_number(delta_deg));
            r.row("map", "", "mean_theta_deg", trim_number(mean_deg));
            r.row("map", "", "acc_satisfied", acc.satisfied.to_string());
            r.row("map", "", "acc_margin_deg", margin);
            writeln!(t, "collapsing: false").unwrap();
            let pts = map.invariant_points();
            writeln!(t, "invariant points: {}", pts.len()).unwrap();
            for (k, p) in pts.iter().enumerate() {
                let rules: Vec<String> = p.rules_affected.iter().map(|i| i.to_string()).collect();
                let kind = match p.kind {
                    crate::piecewise::InvariantKind::Strict => "strict",
                    crate::piecewise::InvariantKind::Sometimes => "sometimes",
                };
                writeln!(
                    t,
                    "  ({:.9}, {:.9}) on {}, {kind}, rules {}",
                    p.location.x,
                    p.location.y,
                    arr.line(p.carrier).label(),
                    rules.join(" ")
                )
                .unwrap();
                let idx = k.to_string();
                r.row("invariant", &idx, "x", format!("{:.12}", p.location.x));
                r.row("invariant", &idx, "y", format!("{:.12}", p.location.y));
                r.row("invariant", &idx, "carrier", arr.line(p.carrier).label().into());
                r.row("invariant", &idx, "kind", kind.into());
                r.row("invariant", &idx, "rules", rules.join(" "));
            }
        }
    }
    r.text = std::mem::take(t);
    match format {
        ReportFormat::Text => Ok(r.text),
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["section", "index", "field", "value"])
                .expect("in-memory write");
            for row in &r.rows {
                w.write_record([&row.0, &row.1, &row.2, &row.3])
                    .expect("in-memory write");
            }
            Ok(String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv"))
        }
    }
}
