//! Rules that target lines by label, and the n-rule maps built from them.
//!
//! Once a rule's source line is fixed (the target of the previous rule in
//! the cycle) the rule acts on arc-length coordinates as an affine map
//! `t ↦ scale·t + shift`. `|scale|` is the rule's similarity coefficient and
//! the cycle composes to the induced map on the last rule's target line.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::geometry::{
    acute_angle, check_theta, project, Arrangement, ArrangementKind, Line, Orientation, Point,
    COINCIDENCE_TOL, VERIFY_TOL,
};

#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicRule {
    pub theta: f64,
    pub orientation: Orientation,
    pub target: String,
}

impl SymbolicRule {
    pub fn new(theta: f64, orientation: Orientation, target: impl Into<String>) -> Self {
        SymbolicRule {
            theta,
            orientation,
            target: target.into(),
        }
    }
}

/// `t ↦ scale·t + shift` on a line's arc-length parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineMap1D {
    pub scale: f64,
    pub shift: f64,
}

impl AffineMap1D {
    pub const IDENTITY: AffineMap1D = AffineMap1D {
        scale: 1.0,
        shift: 0.0,
    };

    pub fn apply(&self, t: f64) -> f64 {
        self.scale * t + self.shift
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &AffineMap1D) -> AffineMap1D {
        AffineMap1D {
            scale: next.scale * self.scale,
            shift: next.scale * self.shift + next.shift,
        }
    }

    pub fn inverse(&self) -> Option<AffineMap1D> {
        if self.scale.abs() <= COINCIDENCE_TOL {
            return None;
        }
        Some(AffineMap1D {
            scale: 1.0 / self.scale,
            shift: -self.shift / self.scale,
        })
    }

    /// Unique fixed point `shift / (1 - scale)`, `None` when `|scale| = 1`.
    pub fn fixed_point(&self) -> Option<f64> {
        if (self.scale.abs() - 1.0).abs() <= COINCIDENCE_TOL {
            return None;
        }
        Some(self.shift / (1.0 - self.scale))
    }
}

/// Which supplementary intersection angle a projection maps across.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// Images move away from the intersection; `c = sin(π − δ − θ) / sin θ`.
    Away,
    /// Images move toward the intersection; `c = |sin(θ − δ)| / sin θ`.
    Toward,
}

/// Branch taken by an angle-θ projection from `from` onto `to`.
///
/// The projection direction is `n − σ·u·cot θ` for the target's normal `n`
/// and direction `u` (σ = ±1 by orientation), so the branch does not depend
/// on where the point sits on `from`.
pub fn branch(orientation: Orientation, from: &Line, to: &Line) -> Result<Branch> {
    acute_angle(from, to)?;
    let phi = from.angle() - to.angle();
    let psi = (orientation.sign() * phi).rem_euclid(PI);
    Ok(if psi <= FRAC_PI_2 {
        Branch::Away
    } else {
        Branch::Toward
    })
}

/// Law-of-sines similarity coefficient of `rule` restricted to `from → to`.
pub fn similarity_coefficient(rule: &SymbolicRule, from: &Line, to: &Line) -> Result<f64> {
    let theta = check_theta(rule.theta)?;
    let delta = acute_angle(from, to)?;
    let c = match branch(rule.orientation, from, to)? {
        Branch::Away => (PI - delta - theta).sin() / theta.sin(),
        Branch::Toward => (theta - delta).sin().abs() / theta.sin(),
    };
    Ok(c.max(0.0))
}

/// Exact affine action of an angle-θ projection from `from` onto `to`, in
/// the arc-length parameters of the two lines. Defined for parallel pairs too.
pub fn rule_action(
    theta: f64,
    orientation: Orientation,
    from: &Line,
    to: &Line,
) -> Result<AffineMap1D> {
    let theta = check_theta(theta)?;
    let (u_from, u_to, n_to) = (from.direction(), to.direction(), to.normal());
    let cot = if theta == FRAC_PI_2 { 0.0 } else { 1.0 / theta.tan() };
    let scale = u_from.dot(u_to) + orientation.sign() * u_from.dot(n_to) * cot;
    let shift = to.param_of(project(from.anchor(), theta, orientation, to)?);
    Ok(AffineMap1D { scale, shift })
}

/// Applies a rule to a point lying on the arrangement.
pub fn apply_rule(rule: &SymbolicRule, x: Point, arr: &Arrangement) -> Result<Point> {
    let target = arr
        .index_of(&rule.target)
        .ok_or_else(|| Error::UnknownLabel(rule.target.clone()))?;
    if arr.locate(x, VERIFY_TOL).is_none() {
        return Err(Error::PointOffArrangement(x.x, x.y));
    }
    project(x, rule.theta, rule.orientation, arr.line(target))
}

/// A cycling composition of symbolic rules over a label-targeted arrangement.
#[derive(Debug, Clone)]
pub struct SymbolicMap {
    arrangement: Arrangement,
    rules: Vec<SymbolicRule>,
    targets: Vec<usize>,
    /// Intersection point each collapsing rule sends its source line to.
    collapse_to: Vec<Option<Point>>,
    phase: usize,
}

impl SymbolicMap {
    pub fn new(arrangement: Arrangement, rules: Vec<SymbolicRule>) -> Result<Self> {
        if arrangement.kind() != ArrangementKind::Symbolic {
            return Err(Error::InvalidArrangement(
                "symbolic maps need a symbolic arrangement".into(),
            ));
        }
        let m = arrangement.len();
        let n = rules.len();
        if n < m {
            return Err(Error::InvalidRules(format!(
                "need at least {m} rules (one per line), got {n}"
            )));
        }
        let mut targets = Vec::with_capacity(n);
        for (i, r) in rules.iter().enumerate() {
            check_theta(r.theta)
                .map_err(|_| Error::InvalidRules(format!("rule {i}: theta {} outside (0, pi/2]", r.theta)))?;
            let t = arrangement.index_of(&r.target).ok_or_else(|| {
                Error::InvalidRules(format!("rule {i}: unknown target {:?}", r.target))
            })?;
            targets.push(t);
        }
        for i in 0..n {
            let j = (i + 1) % n;
            if targets[i] == targets[j] {
                return Err(Error::InvalidRules(format!(
                    "rules {i} and {j} both target {}",
                    rules[i].target
                )));
            }
        }
        for k in 0..m {
            if !targets.contains(&k) {
                return Err(Error::InvalidRules(format!(
                    "line {} is never targeted",
                    arrangement.line(k).label()
                )));
            }
        }
        let mut map = SymbolicMap {
            arrangement,
            rules,
            targets,
            collapse_to: Vec::new(),
            phase: 0,
        };
        map.refresh_collapse();
        Ok(map)
    }

    fn refresh_collapse(&mut self) {
        self.collapse_to = (0..self.rules.len())
            .map(|i| {
                self.rule_collapses(i)
                    .then(|| self.arrangement.intersection(self.source(i), self.targets[i]))
                    .flatten()
            })
            .collect();
    }

    fn rule_collapses(&self, i: usize) -> bool {
        let (s, t) = (self.source(i), self.targets[i]);
        let Some(delta) = self.arrangement.pair_angle(s, t) else {
            return false;
        };
        if (self.rules[i].theta - delta).abs() > COINCIDENCE_TOL {
            return false;
        }
        // perpendicular pairs collapse on either branch
        (delta - FRAC_PI_2).abs() <= COINCIDENCE_TOL || self.rule_branch(i) == Some(Branch::Toward)
    }

    pub fn arrangement(&self) -> &Arrangement {
        &self.arrangement
    }

    pub fn rules(&self) -> &[SymbolicRule] {
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

    /// Index of the line rule `i` projects onto.
    pub fn target(&self, i: usize) -> usize {
        self.targets[i]
    }

    /// Index of the line rule `i` maps from inside the cycle.
    pub fn source(&self, i: usize) -> usize {
        let n = self.targets.len();
        self.targets[(i + n - 1) % n]
    }

    /// The line the induced map acts on (target of the last rule).
    pub fn induced_line(&self) -> &Line {
        self.arrangement.line(self.targets[self.targets.len() - 1])
    }

    pub fn flip_orientation(&mut self, i: usize) {
        self.rules[i].orientation = self.rules[i].orientation.flipped();
        self.refresh_collapse();
    }

    pub fn orientations(&self) -> Vec<Orientation> {
        self.rules.iter().map(|r| r.orientation).collect()
    }

    fn apply_index(&self, i: usize, x: Point) -> Result<Point> {
        let r = &self.rules[i];
        // a collapsing rule maps its whole source line to one vertex; return
        // it exactly rather than through cot(θ) rounding
        if let Some(z) = self.collapse_to[i] {
            if self.arrangement.line(self.source(i)).contains(x, VERIFY_TOL) {
                return Ok(z);
            }
        }
        project(x, r.theta, r.orientation, self.arrangement.line(self.targets[i]))
    }

    /// Applies the rule at the current phase and advances the phase.
    pub fn step(&mut self, x: Point) -> Result<Point> {
        if self.arrangement.locate(x, VERIFY_TOL).is_none() {
            return Err(Error::PointOffArrangement(x.x, x.y));
        }
        let y = self.apply_index(self.phase, x)?;
        self.phase = (self.phase + 1) % self.rules.len();
        Ok(y)
    }

    /// One full cycle from phase 0 (the induced map for points on the induced line).
    pub fn cycle(&self, x: Point) -> Result<Point> {
        if self.arrangement.locate(x, VERIFY_TOL).is_none() {
            return Err(Error::PointOffArrangement(x.x, x.y));
        }
        (0..self.rules.len()).try_fold(x, |p, i| self.apply_index(i, p))
    }

    /// `steps + 1` points starting at `x0` with phase 0.
    pub fn orbit(&self, x0: Point, steps: usize) -> Result<Vec<Point>> {
        let mut map = self.clone();
        map.reset();
        let mut points = Vec::with_capacity(steps + 1);
        points.push(x0);
        let mut x = x0;
        for _ in 0..steps {
            x = map.step(x)?;
            points.push(x);
        }
        Ok(points)
    }

    /// Affine action of rule `i` from its in-cycle source line to its target.
    pub fn rule_action(&self, i: usize) -> AffineMap1D {
        let r = &self.rules[i];
        rule_action(
            r.theta,
            r.orientation,
            self.arrangement.line(self.source(i)),
            self.arrangement.line(self.targets[i]),
        )
        .expect("rule angles are validated on construction")
    }

    /// Per-rule similarity coefficients `c_i` (`1` for parallel line pairs).
    pub fn coefficients(&self) -> Vec<f64> {
        (0..self.rules.len())
            .map(|i| self.rule_action(i).scale.abs())
            .collect()
    }

    /// Branch of rule `i`, `None` when its source and target are parallel.
    pub fn rule_branch(&self, i: usize) -> Option<Branch> {
        branch(
            self.rules[i].orientation,
            self.arrangement.line(self.source(i)),
            self.arrangement.line(self.targets[i]),
        )
        .ok()
    }

    /// The induced map on the last rule's target line.
    pub fn cycle_affine(&self) -> AffineMap1D {
        (0..self.rules.len()).fold(AffineMap1D::IDENTITY, |acc, i| {
            acc.then(&self.rule_action(i))
        })
    }

    /// `C = c_1·c_2···c_n`.
    pub fn induced_coefficient(&self) -> f64 {
        self.cycle_affine().scale.abs()
    }

    /// Rules whose projection lands on the source/target intersection for
    /// every input (θ equal to the pair angle on the toward branch).
    pub fn collapsing_rules(&self) -> Vec<usize> {
        (0..self.rules.len())
            .filter(|&i| self.collapse_to[i].is_some())
            .collect()
    }

    pub fn is_collapsing(&self) -> bool {
        !self.collapsing_rules().is_empty()
    }

    /// Fixed point of the induced map, on the induced line.
    ///
    /// For collapsing maps this is the last collapse point carried through the
    /// remaining rules, which matches iterated orbits to rounding.
    pub fn induced_fixed_point(&self) -> Result<Point> {
        if let Some(&i) = self.collapsing_rules().last() {
            let z = self
                .arrangement
                .intersection(self.source(i), self.targets[i])
                .expect("collapsing pairs intersect");
            return (i + 1..self.rules.len()).try_fold(z, |p, k| self.apply_index(k, p));
        }
        let induced = self.cycle_affine();
        let t = induced
            .fixed_point()
            .ok_or(Error::NeutralCycle(induced.scale))?;
        Ok(self.induced_line().point_at(t))
    }

    /// Preimage of `y` (on the induced line) under one full cycle.
    pub fn invert_cycle(&self, y: Point) -> Result<Point> {
        if self.is_collapsing() {
            return Err(Error::NotInvertible);
        }
        let line = self.induced_line();
        if !line.contains(y, VERIFY_TOL) {
            return Err(Error::PointOffArrangement(y.x, y.y));
        }
        let inv = self.cycle_affine().inverse().ok_or(Error::NotInvertible)?;
        Ok(line.point_at(inv.apply(line.param_of(y))))
    }

    /// The period-n orbit `p_1, …, p_n` through the induced fixed point, with
    /// `p_k` on the target of rule `k` (so `p_n` is the fixed point itself).
    pub fn periodic_orbit(&self) -> Result<Vec<Point>> {
        let start = self.induced_fixed_point()?;
        let mut points = Vec::with_capacity(self.rules.len());
        let mut x = start;
        for i in 0..self.rules.len() {
            x = self.apply_index(i, x)?;
            points.push(x);
        }
        // pin the closing vertex to the solved fixed point
        if let Some(last) = points.last_mut() {
            *last = start;
        }
        Ok(points)
    }
}
