//! Random system generators shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, PI};

use nrule::geometry::{Arrangement, ArrangementKind, Line, Orientation, Point};
use nrule::piecewise::{PiecewiseMap, PiecewiseRule};
use nrule::symbolic::{SymbolicMap, SymbolicRule};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type TestRng = ChaCha8Rng;

pub fn orientation(rng: &mut TestRng) -> Orientation {
    if rng.gen_bool(0.5) {
        Orientation::Zero
    } else {
        Orientation::One
    }
}

pub fn random_line(rng: &mut TestRng, label: impl Into<String>) -> Line {
    let p = Point::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
    Line::from_point_angle(p, rng.gen_range(0.0..PI), label).unwrap()
}

/// Random arrangement whose pairwise angles are all at least `min_angle`.
pub fn random_arrangement(
    rng: &mut TestRng,
    m: usize,
    kind: ArrangementKind,
    min_angle: f64,
) -> Arrangement {
    loop {
        let lines: Vec<Line> = (0..m).map(|i| random_line(rng, format!("L{}", i + 1))).collect();
        let Ok(arr) = Arrangement::new(lines, kind) else {
            continue;
        };
        let ok = (0..m).all(|i| {
            (i + 1..m).all(|j| arr.pair_angle(i, j).is_some_and(|a| a >= min_angle))
        });
        if ok {
            return arr;
        }
    }
}

/// A cyclic target sequence of length `n ≥ m` that covers every line and
/// never repeats a target twice in a row.
pub fn random_targets(rng: &mut TestRng, m: usize, n: usize) -> Vec<usize> {
    loop {
        let mut t: Vec<usize> = (0..m).collect();
        t.shuffle(rng);
        while t.len() < n {
            let prev = *t.last().unwrap();
            let next = (prev + rng.gen_range(1..m)) % m;
            t.push(next);
        }
        // insert the tail at random places so coverage is not always a prefix
        t.rotate_left(rng.gen_range(0..n));
        if (0..n).all(|i| t[i] != t[(i + 1) % n]) {
            return t;
        }
    }
}

pub fn random_symbolic(rng: &mut TestRng, m: usize, n: usize, theta_deg: (f64, f64)) -> SymbolicMap {
    let arr = random_arrangement(rng, m, ArrangementKind::Symbolic, 5f64.to_radians());
    let targets = random_targets(rng, m, n);
    let rules = targets
        .iter()
        .map(|&t| {
            let theta = rng.gen_range(theta_deg.0..theta_deg.1).to_radians();
            SymbolicRule::new(theta, orientation(rng), arr.line(t).label())
        })
        .collect();
    SymbolicMap::new(arr, rules).unwrap()
}

/// Random piecewise map satisfying the average contraction condition with at
/// least `margin` radians to spare.
pub fn random_piecewise_acc(rng: &mut TestRng, m: usize, n: usize, margin: f64) -> PiecewiseMap {
    loop {
        let arr = random_arrangement(rng, m, ArrangementKind::Piecewise, 2f64.to_radians());
        let delta = arr.min_angle().unwrap();
        let bound = (PI - delta) / 2.0;
        let lo = (bound - 10f64.to_radians()).max(0.05);
        let mut ranks: Vec<usize> = (0..n).map(|_| rng.gen_range(2..=m)).collect();
        if ranks.iter().all(|&r| r == 2) {
            ranks[rng.gen_range(0..n)] = rng.gen_range(3..=m);
        }
        let rules: Vec<PiecewiseRule> = ranks
            .into_iter()
            .map(|r| PiecewiseRule::new(rng.gen_range(lo..=FRAC_PI_2), orientation(rng), r))
            .collect();
        let mean = rules.iter().map(|r| r.theta).sum::<f64>() / n as f64;
        if mean <= bound + margin {
            continue;
        }
        return PiecewiseMap::new(arr, rules).unwrap();
    }
}

/// A uniformly placed point on a random line, within `spread` of the
/// arrangement's vertex centroid.
pub fn random_point_on(rng: &mut TestRng, arr: &Arrangement, spread: f64) -> (usize, Point) {
    let i = rng.gen_range(0..arr.len());
    let verts = arr.vertices();
    let c = verts
        .iter()
        .fold(Point::new(0.0, 0.0), |a, v| a + v.2)
        * (1.0 / verts.len() as f64);
    let line = arr.line(i);
    (i, line.point_at(line.param_of(c) + rng.gen_range(-spread..spread)))
}
