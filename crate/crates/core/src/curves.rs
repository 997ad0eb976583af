//! Closed curves over a symbolic arrangement realizing a prescribed
//! incidence-angle sequence against a prescribed line-label sequence.
//!
//! The builder turns the spec into a symbolic map with all orientations 0
//! and reads the curve off the map's period-n orbit. A neutral induced map
//! (C = 1) is resolved by flipping one rule that targets a line neither
//! parallel nor perpendicular to any other; orbits that stall on a line
//! intersection are repaired by flipping the rule feeding the stall.

use std::collections::HashSet;
use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::geometry::{Arrangement, ArrangementKind, Line, Orientation, Point};
use crate::symbolic::{SymbolicMap, SymbolicRule};

/// Consecutive vertices closer than this (scaled by magnitude) coincide.
pub const VERTEX_COINCIDENCE_TOL: f64 = 1e-9;

/// Acute (or right) angle between segment `a → b` and `line`.
pub fn incidence_angle(a: Point, b: Point, line: &Line) -> f64 {
    let s = b - a;
    let u = line.direction();
    s.cross(u).abs().atan2(s.dot(u).abs())
}

fn coincident(a: Point, b: Point) -> bool {
    a.distance(b) <= a.scaled_tol(VERTEX_COINCIDENCE_TOL)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedCurve {
    vertices: Vec<Point>,
    carriers: Vec<Line>,
    realized_angles: Vec<f64>,
}

impl ClosedCurve {
    /// Builds a curve from cyclic vertices and their carrier lines, checking
    /// incidence and non-degeneracy; the incidence angles are measured.
    pub fn new(vertices: Vec<Point>, carriers: Vec<Line>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 || carriers.len() != n {
            return Err(Error::InvalidSpec(format!(
                "{n} vertices with {} carriers",
                carriers.len()
            )));
        }
        for k in 0..n {
            let prev = (k + n - 1) % n;
            if !vertices[k].is_finite() {
                return Err(Error::NonFinite);
            }
            if !carriers[k].contains(vertices[k], VERTEX_COINCIDENCE_TOL) {
                return Err(Error::InvalidSpec(format!(
                    "vertex {k} is off line {}",
                    carriers[k].label()
                )));
            }
            if carriers[k].label() == carriers[prev].label() {
                return Err(Error::InvalidSpec(format!(
                    "vertices {prev} and {k} share carrier {}",
                    carriers[k].label()
                )));
            }
            if coincident(vertices[prev], vertices[k]) {
                return Err(Error::InvalidSpec(format!(
                    "vertices {prev} and {k} coincide"
                )));
            }
        }
        let realized_angles = (0..n)
            .map(|k| incidence_angle(vertices[(k + n - 1) % n], vertices[k], &carriers[k]))
            .collect();
        Ok(ClosedCurve {
            vertices,
            carriers,
            realized_angles,
        })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn carriers(&self) -> &[Line] {
        &self.carriers
    }

    pub fn carrier_labels(&self) -> impl Iterator<Item = &str> {
        self.carriers.iter().map(Line::label)
    }

    pub fn realized_angles(&self) -> &[f64] {
        &self.realized_angles
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// A maximal run of consecutive rules that leave a line intersection fixed
/// on the map's periodic orbit.
#[derive(Debug, Clone, PartialEq)]
pub struct AbsorbedRun {
    /// Index of the first absorbed rule.
    pub start_index: usize,
    pub length: usize,
    /// The absorbing intersection point.
    pub point: Point,
}

/// Absorbed runs on the period-n orbit, ordered by `start_index`.
///
/// Maps with a neutral induced map have no isolated periodic orbit and
/// report no runs.
pub fn find_absorbed_runs(map: &SymbolicMap) -> Vec<AbsorbedRun> {
    let Ok(orbit) = map.periodic_orbit() else {
        return Vec::new();
    };
    let n = orbit.len();
    // rule i is absorbed when it leaves its input (p_{i-1}) in place
    let absorbed: Vec<bool> = (0..n)
        .map(|i| coincident(orbit[(i + n - 1) % n], orbit[i]))
        .collect();
    if absorbed.iter().all(|&a| a) {
        // every vertex is the same point: cannot happen on a valid arrangement
        return vec![AbsorbedRun {
            start_index: 0,
            length: n,
            point: orbit[0],
        }];
    }
    let mut runs = Vec::new();
    for i in 0..n {
        if absorbed[i] && !absorbed[(i + n - 1) % n] {
            let length = (0..n).take_while(|&k| absorbed[(i + k) % n]).count();
            runs.push(AbsorbedRun {
                start_index: i,
                length,
                point: orbit[i],
            });
        }
    }
    runs
}

/// Outcome of the orientation repair loop.
#[derive(Debug, Clone)]
pub struct Repair {
    pub map: SymbolicMap,
    /// Rule indices flipped, in order.
    pub flipped: Vec<usize>,
    /// Distinct orientation configurations visited (including the start).
    pub visited: usize,
}

fn config_cap(n: usize) -> usize {
    if n >= usize::BITS as usize {
        usize::MAX
    } else {
        1usize << n
    }
}

/// Flips the rule before the earliest absorbed run until no run remains.
pub fn deabsorb(map: &SymbolicMap) -> Result<Repair> {
    let mut map = map.clone();
    let n = map.len();
    let cap = config_cap(n);
    let mut seen = HashSet::new();
    let mut flipped = Vec::new();
    loop {
        if !seen.insert(map.orientations()) || seen.len() > cap {
            return Err(Error::RepairExhausted(seen.len()));
        }
        let runs = find_absorbed_runs(&map);
        let Some(first) = runs.first() else {
            return Ok(Repair {
                map,
                flipped,
                visited: seen.len(),
            });
        };
        let i = (first.start_index + n - 1) % n;
        map.flip_orientation(i);
        flipped.push(i);
    }
}

fn check_spec(arr: &Arrangement, angles: &[f64], labels: &[String]) -> Result<()> {
    if arr.kind() != ArrangementKind::Symbolic {
        return Err(Error::InvalidSpec("arrangement must be symbolic".into()));
    }
    let (m, n) = (arr.len(), angles.len());
    if labels.len() != n {
        return Err(Error::InvalidSpec(format!(
            "{n} angles but {} labels",
            labels.len()
        )));
    }
    if n < m {
        return Err(Error::InvalidSpec(format!(
            "sequence length {n} is shorter than the {m} lines"
        )));
    }
    for (k, &a) in angles.iter().enumerate() {
        if !(a > 0.0 && a < FRAC_PI_2) {
            return Err(Error::InvalidSpec(format!(
                "angle {k} ({a} rad) is not strictly acute"
            )));
        }
    }
    for (k, l) in labels.iter().enumerate() {
        if arr.index_of(l).is_none() {
            return Err(Error::InvalidSpec(format!("label {k} ({l:?}) is not a line")));
        }
        if *l == labels[(k + 1) % n] {
            return Err(Error::InvalidSpec(format!(
                "labels {k} and {} are both {l:?}",
                (k + 1) % n
            )));
        }
    }
    for line in arr.lines() {
        if !labels.iter().any(|l| l == line.label()) {
            return Err(Error::InvalidSpec(format!(
                "label {:?} never occurs in the sequence",
                line.label()
            )));
        }
    }
    Ok(())
}

/// A built curve plus the map that produced it.
#[derive(Debug, Clone)]
pub struct CurveBuild {
    pub curve: ClosedCurve,
    pub map: SymbolicMap,
    /// Rule indices whose orientation was flipped away from 0, in order.
    pub flipped: Vec<usize>,
}

/// Synthesizes a closed curve whose k-th vertex lies on `labels[k]` and whose
/// k-th segment meets that line at `angles[k]` (radians, strictly acute).
pub fn build_closed_curve(
    arr: &Arrangement,
    angles: &[f64],
    labels: &[String],
) -> Result<ClosedCurve> {
    build_closed_curve_with_map(arr, angles, labels).map(|b| b.curve)
}

pub fn build_closed_curve_with_map(
    arr: &Arrangement,
    angles: &[f64],
    labels: &[String],
) -> Result<CurveBuild> {
    check_spec(arr, angles, labels)?;
    let rules = angles
        .iter()
        .zip(labels)
        .map(|(&a, l)| SymbolicRule::new(a, Orientation::Zero, l.clone()))
        .collect();
    let mut map = SymbolicMap::new(arr.clone(), rules)
        .map_err(|e| Error::InvalidSpec(e.to_string()))?;
    let n = map.len();
    let cap = config_cap(n);
    let mut seen = HashSet::new();
    let mut flipped = Vec::new();

    loop {
        if !seen.insert(map.orientations()) || seen.len() > cap {
            return Err(Error::RepairExhausted(seen.len()));
        }
        if map.cycle_affine().fixed_point().is_none() {
            let i = (0..n)
                .find(|&i| arr.is_generic_line(map.target(i)))
                .ok_or_else(|| Error::InvalidSpec("no rule targets a generic line".into()))?;
            map.flip_orientation(i);
            flipped.push(i);
            continue;
        }
        if let Some(run) = find_absorbed_runs(&map).first() {
            let i = (run.start_index + n - 1) % n;
            map.flip_orientation(i);
            flipped.push(i);
            continue;
        }
        let vertices = map.periodic_orbit()?;
        let carriers = (0..n).map(|i| arr.line(map.target(i)).clone()).collect();
        let curve = ClosedCurve::new(vertices, carriers)?;
        return Ok(CurveBuild {
            curve,
            map,
            flipped,
        });
    }
}

/// Checks that `curve` realizes `angles` against `labels` within `tol`.
pub fn verify_incidence(curve: &ClosedCurve, angles: &[f64], labels: &[String], tol: f64) -> bool {
    let n = curve.len();
    if n == 0 || angles.len() != n || labels.len() != n {
        return false;
    }
    (0..n).all(|k| {
        let prev = curve.vertices[(k + n - 1) % n];
        let p = curve.vertices[k];
        let line = &curve.carriers[k];
        line.label() == labels[k]
            && line.contains(p, tol)
            && !coincident(prev, p)
            && (incidence_angle(prev, p, line) - angles[k]).abs() <= tol
    })
}
