//! Rules that target the l-th nearest line, and the piecewise n-rule maps
//! built from them.
//!
//! Rank `l = 1` is the carrier line of the point (distance 0), `l = 2` the
//! nearest other line and `l = m` the farthest. When the distance at a rule's
//! rank is shared with another line the rule fixes the point (a tie hit).

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::geometry::{
    check_theta, project, Arrangement, ArrangementKind, Line, Orientation, Point,
    COINCIDENCE_TOL, VERIFY_TOL,
};
use crate::symbolic::{rule_action, AffineMap1D};

/// Distance gaps below this are reported as near ties.
pub const NEAR_TIE_TOL: f64 = 1e-9;
/// Orbits whose norm exceeds this are stopped and flagged as escaping.
pub const ESCAPE_NORM: f64 = 1e12;
pub const DEFAULT_PERIOD_TOL: f64 = 1e-8;
pub const DEFAULT_K_MAX: usize = 64;
/// Consecutive cycle samples that must agree before a period is accepted.
pub const CONFIRMATIONS: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseRule {
    pub theta: f64,
    pub orientation: Orientation,
    /// Distance rank `l` in `2..=m`.
    pub rank: usize,
}

impl PiecewiseRule {
    pub fn new(theta: f64, orientation: Orientation, rank: usize) -> Self {
        PiecewiseRule {
            theta,
            orientation,
            rank,
        }
    }
}

/// Distances from a point to every line, ascending, with per-rank tie flags.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceProfile {
    /// `(line index, distance)` sorted by distance; entry `k` is rank `k + 1`.
    pub entries: Vec<(usize, f64)>,
    pub tie_flags: Vec<bool>,
}

fn tied(a: f64, b: f64) -> bool {
    (a - b).abs() <= COINCIDENCE_TOL * a.max(b).max(1.0)
}

impl DistanceProfile {
    /// Line index at 1-based rank `l`.
    pub fn line_at(&self, rank: usize) -> usize {
        self.entries[rank - 1].0
    }

    pub fn distance_at(&self, rank: usize) -> f64 {
        self.entries[rank - 1].1
    }

    pub fn is_tied(&self, rank: usize) -> bool {
        self.tie_flags[rank - 1]
    }

    /// The point sits on two lines at once (a pairwise intersection).
    pub fn at_intersection(&self, x: Point) -> bool {
        self.entries.len() > 1 && self.entries[1].1 <= x.scaled_tol(COINCIDENCE_TOL)
    }

    /// A rule of this rank leaves the point in place.
    pub fn fixes(&self, rank: usize, x: Point) -> bool {
        self.is_tied(rank) || self.at_intersection(x)
    }

    /// Smallest gap between the rank-`l` distance and its neighbours.
    pub fn gap_at(&self, rank: usize) -> f64 {
        let k = rank - 1;
        let d = self.entries[k].1;
        let below = (k > 0).then(|| d - self.entries[k - 1].1);
        let above = self.entries.get(k + 1).map(|e| e.1 - d);
        below
            .into_iter()
            .chain(above)
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn distance_profile(x: Point, arr: &Arrangement) -> DistanceProfile {
    let mut entries: Vec<(usize, f64)> = arr
        .lines()
        .iter()
        .enumerate()
        .map(|(i, l)| (i, l.signed_distance(x).abs()))
        .collect();
    entries.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    let m = entries.len();
    let tie_flags = (0..m)
        .map(|k| {
            (k > 0 && tied(entries[k].1, entries[k - 1].1))
                || (k + 1 < m && tied(entries[k].1, entries[k + 1].1))
        })
        .collect();
    DistanceProfile { entries, tie_flags }
}

/// Result of applying one piecewise rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RuleOutcome {
    Moved { point: Point, target: usize },
    /// The rank is tied, so the point is invariant under this rule.
    TieHit,
}

fn check_on_arrangement(x: Point, profile: &DistanceProfile) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::NonFinite);
    }
    if profile.entries[0].1 > x.scaled_tol(VERIFY_TOL) {
        return Err(Error::PointOffArrangement(x.x, x.y));
    }
    Ok(())
}

fn apply_with_profile(
    rule: &PiecewiseRule,
    x: Point,
    arr: &Arrangement,
    profile: &DistanceProfile,
) -> Result<RuleOutcome> {
    if profile.fixes(rule.rank, x) {
        return Ok(RuleOutcome::TieHit);
    }
    let target = profile.line_at(rule.rank);
    let point = project(x, rule.theta, rule.orientation, arr.line(target))?;
    Ok(RuleOutcome::Moved { point, target })
}

pub fn apply_piecewise(rule: &PiecewiseRule, x: Point, arr: &Arrangement) -> Result<RuleOutcome> {
    if rule.rank < 2 || rule.rank > arr.len() {
        return Err(Error::InvalidRules(format!(
            "rank {} outside 2..={}",
            rule.rank,
            arr.len()
        )));
    }
    let profile = distance_profile(x, arr);
    check_on_arrangement(x, &profile)?;
    apply_with_profile(rule, x, arr, &profile)
}

/// Away-branch separation coefficient `sin(π − θ − δ) / sin θ`.
pub fn separation_coefficient(theta: f64, delta: f64) -> f64 {
    (PI - theta - delta).sin() / theta.sin()
}

/// Toward-branch coefficient `|sin(θ − δ)| / sin θ`.
pub fn toward_coefficient(theta: f64, delta: f64) -> f64 {
    (theta - delta).sin().abs() / theta.sin()
}

/// `c₁·c₂` for two away-branch rules across an intersection angle `delta`.
pub fn separation_product(theta1: f64, theta2: f64, delta: f64) -> f64 {
    separation_coefficient(theta1, delta) * separation_coefficient(theta2, delta)
}

/// `(π − δ)/2 < (θ₁ + θ₂)/2 ≤ π/2`.
pub fn pair_contraction_condition(theta1: f64, theta2: f64, delta: f64) -> bool {
    let mean = (theta1 + theta2) / 2.0;
    mean > (PI - delta) / 2.0 && mean <= FRAC_PI_2
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccReport {
    pub satisfied: bool,
    pub mean_theta: f64,
    pub delta: f64,
}

impl AccReport {
    /// `θ̄ − (π − δ)/2`, positive when the strict lower bound holds.
    pub fn margin(&self) -> f64 {
        self.mean_theta - (PI - self.delta) / 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum InvariantKind {
    /// Fixed by some but not all rules.
    Sometimes,
    /// Fixed by every rule.
    Strict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantPoint {
    pub location: Point,
    pub carrier: usize,
    pub kind: InvariantKind,
    pub rules_affected: BTreeSet<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepOutcome {
    Moved { target: usize },
    TieHit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiecewiseStep {
    pub rule_index: usize,
    pub outcome: StepOutcome,
    /// The distance at the rule's rank was within `NEAR_TIE_TOL` of a neighbour.
    pub near_tie: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseOrbit {
    pub points: Vec<Point>,
    /// `steps[k]` produced `points[k + 1]`; a trailing tie hit has no point.
    pub steps: Vec<PiecewiseStep>,
    pub terminated_degenerate: bool,
    /// Stopped because the orbit left every bounded window.
    pub escaped: bool,
}

/// A detected limit cycle of period `k·n`, aligned to phase 0.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicCycle {
    pub period: usize,
    pub k: usize,
    pub points: Vec<Point>,
}

/// A cycling composition of piecewise rules over a distance-ranked arrangement.
#[derive(Debug, Clone)]
pub struct PiecewiseMap {
    arrangement: Arrangement,
    rules: Vec<PiecewiseRule>,
    phase: usize,
}

impl PiecewiseMap {
    pub fn new(arrangement: Arrangement, rules: Vec<PiecewiseRule>) -> Result<Self> {
        if arrangement.kind() != ArrangementKind::Piecewise {
            return Err(Error::InvalidArrangement(
                "piecewise maps need a piecewise arrangement".into(),
            ));
        }
        if rules.is_empty() {
            return Err(Error::InvalidRules("need at least one rule".into()));
        }
        let m = arrangement.len();
        for (i, r) in rules.iter().enumerate() {
            check_theta(r.theta).map_err(|_| {
                Error::InvalidRules(format!("rule {i}: theta {} outside (0, pi/2]", r.theta))
            })?;
            if r.rank < 2 || r.rank > m {
                return Err(Error::InvalidRules(format!(
                    "rule {i}: rank {} outside 2..={m}",
                    r.rank
                )));
            }
        }
        if rules.iter().all(|r| r.rank == 2) {
            return Err(Error::InvalidRules(
                "at least one rule needs rank l > 2".into(),
            ));
        }
        Ok(PiecewiseMap {
            arrangement,
            rules,
            phase: 0,
        })
    }

    pub fn arrangement(&self) -> &Arrangement {
        &self.arrangement
    }

    pub fn rules(&self) -> &[PiecewiseRule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn phase(&self) -> usize {
        self.phase
    }

    pub fn reset(&mut self) {
        self.phase = 0;
    }

    /// Applies the rule at the current phase. The phase advances on ties too.
    pub fn step(&mut self, x: Point) -> Result<RuleOutcome> {
        let out = apply_piecewise(&self.rules[self.phase], x, &self.arrangement)?;
        self.phase = (self.phase + 1) % self.rules.len();
        Ok(out)
    }

    /// The cycle map: all n rules from phase 0.
    pub fn cycle_map(&self, x: Point) -> Result<Point> {
        let mut p = x;
        for (i, rule) in self.rules.iter().enumerate() {
            match apply_piecewise(rule, p, &self.arrangement)? {
                RuleOutcome::Moved { point, .. } => p = point,
                RuleOutcome::TieHit => return Err(Error::DegenerateHit(i)),
            }
        }
        Ok(p)
    }

    pub fn acc_check(&self) -> AccReport {
        let mean_theta =
            self.rules.iter().map(|r| r.theta).sum::<f64>() / self.rules.len() as f64;
        let delta = self
            .arrangement
            .min_angle()
            .expect("piecewise arrangements cache their least angle");
        let satisfied = mean_theta > (PI - delta) / 2.0 + COINCIDENCE_TOL
            && mean_theta <= FRAC_PI_2 + COINCIDENCE_TOL;
        AccReport {
            satisfied,
            mean_theta,
            delta,
        }
    }

    /// Finite set of points where some rule's rank is tied: on every carrier,
    /// the crossings with the two bisectors of each pair of other lines.
    pub fn invariant_points(&self) -> Vec<InvariantPoint> {
        let arr = &self.arrangement;
        let m = arr.len();
        let mut found: Vec<InvariantPoint> = Vec::new();
        for c in 0..m {
            let carrier = arr.line(c);
            for a in 0..m {
                for b in a + 1..m {
                    if a == c || b == c {
                        continue;
                    }
                    for q in bisector_crossings(carrier, arr.line(a), arr.line(b)) {
                        let profile = distance_profile(q, arr);
                        let affected: BTreeSet<usize> = self
                            .rules
                            .iter()
                            .enumerate()
                            .filter(|(_, r)| profile.fixes(r.rank, q))
                            .map(|(i, _)| i)
                            .collect();
                        if affected.is_empty() {
                            continue;
                        }
                        match found
                            .iter_mut()
                            .find(|p| p.location.distance(q) <= q.scaled_tol(NEAR_TIE_TOL))
                        {
                            Some(p) => p.rules_affected.extend(affected),
                            None => found.push(InvariantPoint {
                                location: q,
                                carrier: c,
                                kind: InvariantKind::Sometimes,
                                rules_affected: affected,
                            }),
                        }
                    }
                }
            }
        }
        let n = self.rules.len();
        for p in &mut found {
            if p.rules_affected.len() == n {
                p.kind = InvariantKind::Strict;
            }
        }
        found
    }

    /// Iterates from `x0` at phase 0 for up to `max_steps` rule applications,
    /// stopping at the first tie hit or when the orbit escapes.
    pub fn iterate(&self, x0: Point, max_steps: usize) -> Result<PiecewiseOrbit> {
        let arr = &self.arrangement;
        check_on_arrangement(x0, &distance_profile(x0, arr))?;
        let n = self.rules.len();
        let mut orbit = PiecewiseOrbit {
            points: Vec::with_capacity(max_steps + 1),
            steps: Vec::with_capacity(max_steps),
            terminated_degenerate: false,
            escaped: false,
        };
        orbit.points.push(x0);
        let mut x = x0;
        for s in 0..max_steps {
            let rule_index = s % n;
            let rule = &self.rules[rule_index];
            let profile = distance_profile(x, arr);
            let near_tie = profile.gap_at(rule.rank) < NEAR_TIE_TOL;
            match apply_with_profile(rule, x, arr, &profile)? {
                RuleOutcome::TieHit => {
                    orbit.steps.push(PiecewiseStep {
                        rule_index,
                        outcome: StepOutcome::TieHit,
                        near_tie,
                    });
                    orbit.terminated_degenerate = true;
                    break;
                }
                RuleOutcome::Moved { point, target } => {
                    orbit.steps.push(PiecewiseStep {
                        rule_index,
                        outcome: StepOutcome::Moved { target },
                        near_tie,
                    });
                    orbit.points.push(point);
                    x = point;
                    if !point.is_finite() || point.norm() > ESCAPE_NORM {
                        orbit.escaped = true;
                        break;
                    }
                }
            }
        }
        Ok(orbit)
    }

    /// Affine action, on arc-length parameters, of the next `steps` rule
    /// applications from `x` (phase 0) along the continuity piece containing
    /// `x`. Returns the map with the start and end carrier indices.
    pub fn route_affine(&self, x: Point, steps: usize) -> Result<(AffineMap1D, usize, usize)> {
        let arr = &self.arrangement;
        let profile = distance_profile(x, arr);
        check_on_arrangement(x, &profile)?;
        let start = profile.line_at(1);
        let mut carrier = start;
        let mut acc = AffineMap1D::IDENTITY;
        let mut p = x;
        for s in 0..steps {
            let rule = &self.rules[s % self.rules.len()];
            match apply_piecewise(rule, p, arr)? {
                RuleOutcome::TieHit => return Err(Error::DegenerateHit(s)),
                RuleOutcome::Moved { point, target } => {
                    let act =
                        rule_action(rule.theta, rule.orientation, arr.line(carrier), arr.line(target))?;
                    acc = acc.then(&act);
                    carrier = target;
                    p = point;
                }
            }
        }
        Ok((acc, start, carrier))
    }
}

/// Points on `carrier` equidistant from `a` and `b`.
fn bisector_crossings(carrier: &Line, a: &Line, b: &Line) -> Vec<Point> {
    // signed distances along the carrier: s(t) = s0 + t·k
    let base = carrier.anchor();
    let u = carrier.direction();
    let (sa0, ka) = (a.signed_distance(base), u.dot(a.normal()));
    let (sb0, kb) = (b.signed_distance(base), u.dot(b.normal()));
    let mut out = Vec::with_capacity(2);
    for sign in [1.0, -1.0] {
        let denom = ka - sign * kb;
        if denom.abs() <= COINCIDENCE_TOL {
            continue;
        }
        let t = (sign * sb0 - sa0) / denom;
        out.push(carrier.point_at(t));
    }
    out
}

pub fn acc_check(map: &PiecewiseMap) -> AccReport {
    map.acc_check()
}

pub fn invariant_points(map: &PiecewiseMap) -> Vec<InvariantPoint> {
    map.invariant_points()
}

pub fn iterate_piecewise(map: &PiecewiseMap, x0: Point, max_steps: usize) -> Result<PiecewiseOrbit> {
    map.iterate(x0, max_steps)
}

/// Smallest `k ≤ k_max` such that the last `CONFIRMATIONS` cycle-map samples
/// each return within `tol` after `k` more cycles.
pub fn detect_periodic_points(
    points: &[Point],
    n: usize,
    tol: f64,
    k_max: usize,
) -> Result<PeriodicCycle> {
    if n == 0 || points.is_empty() {
        return Err(Error::NotConverged(k_max));
    }
    let last = (points.len() - 1) / n;
    let sample = |t: usize| points[t * n];
    for k in 1..=k_max {
        if last < k + CONFIRMATIONS - 1 {
            break;
        }
        let holds = (0..CONFIRMATIONS).all(|j| {
            let t = last - j;
            sample(t).distance(sample(t - k)) < tol
        });
        if holds {
            return Ok(PeriodicCycle {
                period: k * n,
                k,
                points: points[(last - k) * n..last * n].to_vec(),
            });
        }
    }
    Err(Error::NotConverged(k_max))
}

pub fn detect_periodic(
    orbit: &PiecewiseOrbit,
    n: usize,
    tol: f64,
    k_max: usize,
) -> Result<PeriodicCycle> {
    detect_periodic_points(&orbit.points, n, tol, k_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    /// y = 0, y = x, y = −x + 2
    fn y3() -> Arrangement {
        Arrangement::new(
            vec![
                Line::new(0.0, 0.0, "A").unwrap(),
                Line::new(FRAC_PI_4, 0.0, "B").unwrap(),
                Line::from_point_angle(Point::new(2.0, 0.0), 3.0 * FRAC_PI_4, "C").unwrap(),
            ],
            ArrangementKind::Piecewise,
        )
        .unwrap()
    }

    #[test]
    fn profile_ranks() {
        let arr = y3();
        let p = distance_profile(Point::new(0.5, 0.0), &arr);
        assert_eq!(p.line_at(1), 0);
        assert_eq!(p.line_at(2), 1);
        assert_eq!(p.line_at(3), 2);
        assert_eq!(p.distance_at(1), 0.0);
        assert!((p.distance_at(2) - 0.5 / 2f64.sqrt()).abs() < 1e-12);
        assert!((p.distance_at(3) - 1.5 / 2f64.sqrt()).abs() < 1e-12);
        assert!(p.tie_flags.iter().all(|t| !t));

        let p = distance_profile(Point::new(1.0, 0.0), &arr);
        assert!((p.distance_at(2) - 0.5f64.sqrt()).abs() < 1e-12);
        assert_eq!(p.tie_flags, vec![false, true, true]);

        let p = distance_profile(Point::new(0.0, 0.0), &arr);
        assert_eq!(p.tie_flags[..2], [true, true]);
        assert!(p.at_intersection(Point::new(0.0, 0.0)));
    }

    #[test]
    fn apply_examples() {
        let arr = y3();
        let r = PiecewiseRule::new(FRAC_PI_2, Orientation::Zero, 2);
        match apply_piecewise(&r, Point::new(0.5, 0.0), &arr).unwrap() {
            RuleOutcome::Moved { point, target } => {
                assert_eq!(target, 1);
                assert!(point.distance(Point::new(0.25, 0.25)) < 1e-15);
            }
            other => panic!("{other:?}"),
        }
        for rank in [2, 3] {
            let r = PiecewiseRule::new(1.0, Orientation::One, rank);
            assert_eq!(
                apply_piecewise(&r, Point::new(1.0, 0.0), &arr).unwrap(),
                RuleOutcome::TieHit
            );
        }
        // intersections are fixed by every rule
        let r = PiecewiseRule::new(1.0, Orientation::One, 3);
        assert_eq!(
            apply_piecewise(&r, Point::new(1.0, 1.0), &arr).unwrap(),
            RuleOutcome::TieHit
        );
        assert!(matches!(
            apply_piecewise(&r, Point::new(1.0, 0.5), &arr),
            Err(Error::PointOffArrangement(..))
        ));
    }

    #[test]
    fn map_validation() {
        let arr = y3();
        let r = |rank| PiecewiseRule::new(1.2, Orientation::Zero, rank);
        assert!(PiecewiseMap::new(arr.clone(), vec![r(2), r(2)]).is_err());
        assert!(PiecewiseMap::new(arr.clone(), vec![r(4)]).is_err());
        assert!(PiecewiseMap::new(arr.clone(), vec![r(1), r(3)]).is_err());
        assert!(PiecewiseMap::new(arr.clone(), vec![]).is_err());
        assert!(PiecewiseMap::new(arr, vec![r(3)]).is_ok());
    }

    #[test]
    fn acc_examples() {
        let arr = y3();
        let map = |thetas: &[f64]| {
            PiecewiseMap::new(
                arr.clone(),
                thetas
                    .iter()
                    .map(|&t| PiecewiseRule::new(t, Orientation::Zero, 3))
                    .collect(),
            )
            .unwrap()
        };
        let rep = map(&[80f64.to_radians(), 80f64.to_radians()]).acc_check();
        assert!(rep.satisfied);
        assert!((rep.delta - FRAC_PI_4).abs() < 1e-12);
        assert!((rep.margin().to_degrees() - 12.5).abs() < 1e-9);

        let rep = map(&[67.5f64.to_radians()]).acc_check();
        assert!(!rep.satisfied);
        let rep = map(&[60f64.to_radians(), 75f64.to_radians()]).acc_check();
        assert!(!rep.satisfied);

        assert!(map(&[FRAC_PI_2]).acc_check().satisfied);
    }

    #[test]
    fn separation_examples() {
        let d = PI / 3.0;
        assert!((separation_product(FRAC_PI_2, FRAC_PI_2, d) - 0.25).abs() < 1e-15);
        let iso = (PI - d) / 2.0;
        assert!((separation_product(iso, iso, d) - 1.0).abs() < 1e-12);
        let p = separation_product(FRAC_PI_4, FRAC_PI_4, d);
        let expected = (5.0 * PI / 12.0).sin().powi(2) / FRAC_PI_4.sin().powi(2);
        assert!((p - expected).abs() < 1e-12);
        assert!((p - 1.866_025_403_784_438_6).abs() < 1e-12);
    }

    #[test]
    fn separation_matches_two_point_mapping() {
        // two rules across the same pair, both mapping away from the crossing
        let delta = 0.7;
        let a = Line::new(0.0, 0.0, "A").unwrap();
        let b = Line::new(delta, 0.0, "B").unwrap();
        for theta in [0.5, 1.0, 1.3, FRAC_PI_2] {
            let away = [Orientation::Zero, Orientation::One]
                .into_iter()
                .max_by(|&o1, &o2| {
                    let f = |o| project(a.point_at(3.0), theta, o, &b).unwrap().norm();
                    f(o1).total_cmp(&f(o2))
                })
                .unwrap();
            let (x, y) = (a.point_at(2.0), a.point_at(2.5));
            let rx = project(x, theta, away, &b).unwrap();
            let ry = project(y, theta, away, &b).unwrap();
            let ratio = rx.distance(ry) / x.distance(y);
            assert!((ratio - separation_coefficient(theta, delta)).abs() < 1e-12);
        }
    }

    #[test]
    fn invariant_point_examples() {
        let arr = y3();
        let map = PiecewiseMap::new(
            arr.clone(),
            vec![
                PiecewiseRule::new(1.2, Orientation::Zero, 2),
                PiecewiseRule::new(1.4, Orientation::One, 3),
            ],
        )
        .unwrap();
        let pts = map.invariant_points();
        let p = pts
            .iter()
            .find(|p| p.location.distance(Point::new(1.0, 0.0)) < 1e-12)
            .expect("(1, 0) is a tie point");
        assert_eq!(p.kind, InvariantKind::Strict);
        assert_eq!(p.rules_affected, BTreeSet::from([0, 1]));

        let single = PiecewiseMap::new(arr, vec![PiecewiseRule::new(1.2, Orientation::Zero, 3)])
            .unwrap();
        let pts = single.invariant_points();
        assert!(!pts.is_empty());
        assert!(pts.iter().all(|p| p.kind == InvariantKind::Strict));
    }

    #[test]
    fn invariant_start_terminates_immediately() {
        let map = PiecewiseMap::new(y3(), vec![PiecewiseRule::new(1.2, Orientation::Zero, 3)])
            .unwrap();
        let orbit = map.iterate(Point::new(1.0, 0.0), 100).unwrap();
        assert_eq!(orbit.points.len(), 1);
        assert!(orbit.terminated_degenerate);
        assert_eq!(orbit.steps.last().unwrap().outcome, StepOutcome::TieHit);
    }

    #[test]
    fn cycle_map_matches_stepping() {
        let map = PiecewiseMap::new(
            y3(),
            vec![
                PiecewiseRule::new(1.3, Orientation::Zero, 3),
                PiecewiseRule::new(1.1, Orientation::One, 2),
            ],
        )
        .unwrap();
        let x0 = Point::new(-0.37, 0.0);
        let orbit = map.iterate(x0, 6).unwrap();
        assert_eq!(orbit.points.len(), 7);
        let mut x = x0;
        for t in 1..=3 {
            x = map.cycle_map(x).unwrap();
            assert!(x.distance(orbit.points[2 * t]) < 1e-12);
        }

        let one = PiecewiseMap::new(y3(), vec![PiecewiseRule::new(1.3, Orientation::Zero, 3)])
            .unwrap();
        let direct = apply_piecewise(&one.rules()[0], x0, one.arrangement()).unwrap();
        assert_eq!(direct, RuleOutcome::Moved {
            point: one.cycle_map(x0).unwrap(),
            target: 2
        });
        assert_eq!(
            one.cycle_map(Point::new(1.0, 0.0)),
            Err(Error::DegenerateHit(0))
        );
    }

    #[test]
    fn periodic_detection_on_exact_cycles() {
        let pts: Vec<Point> = (0..40)
            .map(|i| Point::new((i % 6) as f64, 0.0))
            .collect();
        let cyc = detect_periodic_points(&pts, 2, 1e-8, 10).unwrap();
        assert_eq!(cyc.period, 6);
        assert_eq!(cyc.k, 3);
        assert_eq!(cyc.points.len(), 6);
        // aligned to phase 0 of the 2-rule cycle
        assert_eq!(cyc.points[0].x as usize % 2, 0);

        let drifting: Vec<Point> = (0..40).map(|i| Point::new(i as f64, 0.0)).collect();
        assert_eq!(
            detect_periodic_points(&drifting, 2, 1e-8, 5),
            Err(Error::NotConverged(5))
        );
    }

    #[test]
    fn route_affine_tracks_the_orbit() {
        let map = PiecewiseMap::new(
            y3(),
            vec![
                PiecewiseRule::new(1.3, Orientation::Zero, 3),
                PiecewiseRule::new(1.1, Orientation::One, 2),
            ],
        )
        .unwrap();
        let x0 = Point::new(-0.37, 0.0);
        let (aff, start, end) = map.route_affine(x0, 4).unwrap();
        let arr = map.arrangement();
        let orbit = map.iterate(x0, 4).unwrap();
        let got = arr.line(end).point_at(aff.apply(arr.line(start).param_of(x0)));
        assert!(got.distance(orbit.points[4]) < 1e-12);
    }
}
