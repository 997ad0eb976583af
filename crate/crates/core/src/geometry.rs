//! Plane primitives: points, canonical lines, line arrangements and the
//! oriented angle-θ projection every rule type is built from.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Geometric coincidence tolerance.
pub const COINCIDENCE_TOL: f64 = 1e-12;
/// Tolerance used when checking incidence/angle postconditions.
pub const VERIFY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point) -> f64 {
        (self - other).norm()
    }

    /// Counterclockwise quarter turn.
    pub fn rot90(self) -> Point {
        Point::new(-self.y, self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Absolute tolerance scaled to the magnitude of the point.
    pub(crate) fn scaled_tol(self, tol: f64) -> f64 {
        tol * self.x.abs().max(self.y.abs()).max(1.0)
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Which of the two mirror-image angle-θ projections a rule selects.
///
/// Seen from the point being projected, looking at its perpendicular foot on
/// the target, `Zero` lands on the left of the foot and `One` on the right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Orientation {
    #[default]
    Zero,
    One,
}

impl Orientation {
    pub fn from_bit(bit: u8) -> Option<Self> {
        match bit {
            0 => Some(Orientation::Zero),
            1 => Some(Orientation::One),
            _ => None,
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            Orientation::Zero => 0,
            Orientation::One => 1,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Orientation::Zero => Orientation::One,
            Orientation::One => Orientation::Zero,
        }
    }

    /// +1 for `Zero`, -1 for `One`.
    pub(crate) fn sign(self) -> f64 {
        match self {
            Orientation::Zero => 1.0,
            Orientation::One => -1.0,
        }
    }
}

/// A line in canonical form: direction angle in `[0, π)` and signed offset
/// of the line from the origin along the left normal of the direction.
#[derive(Debug, Clone, PartialEq)]
pub struct Line {
    angle: f64,
    offset: f64,
    label: String,
}

impl Line {
    /// Builds a line from any direction angle; the angle is folded into `[0, π)`.
    pub fn new(angle: f64, offset: f64, label: impl Into<String>) -> Result<Self> {
        if !angle.is_finite() || !offset.is_finite() {
            return Err(Error::NonFinite);
        }
        let mut a = angle.rem_euclid(2.0 * PI);
        let mut o = offset;
        // rem_euclid may round up to 2π itself, so fold twice
        while a >= PI {
            a -= PI;
            o = -o;
        }
        Ok(Line {
            angle: a,
            offset: o,
            label: label.into(),
        })
    }

    /// The line through `p` and `q`.
    pub fn through(p: Point, q: Point, label: impl Into<String>) -> Result<Self> {
        if !p.is_finite() || !q.is_finite() {
            return Err(Error::NonFinite);
        }
        let d = q - p;
        if d.norm() <= COINCIDENCE_TOL {
            return Err(Error::DegenerateLine);
        }
        Self::from_point_angle(p, d.y.atan2(d.x), label)
    }

    /// The line through `p` with direction angle `angle` (radians).
    pub fn from_point_angle(p: Point, angle: f64, label: impl Into<String>) -> Result<Self> {
        if !p.is_finite() {
            return Err(Error::NonFinite);
        }
        let mut line = Line::new(angle, 0.0, label)?;
        line.offset = p.dot(line.normal());
        Ok(line)
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Unit direction `(cos angle, sin angle)`.
    pub fn direction(&self) -> Point {
        Point::new(self.angle.cos(), self.angle.sin())
    }

    /// Unit left normal of the direction.
    pub fn normal(&self) -> Point {
        self.direction().rot90()
    }

    /// Foot of the perpendicular from the origin; the zero of the arc-length parameter.
    pub fn anchor(&self) -> Point {
        self.normal() * self.offset
    }

    /// Arc-length coordinate of the orthogonal projection of `p` onto the line.
    pub fn param_of(&self, p: Point) -> f64 {
        p.dot(self.direction())
    }

    pub fn point_at(&self, t: f64) -> Point {
        self.anchor() + self.direction() * t
    }

    pub fn signed_distance(&self, p: Point) -> f64 {
        p.dot(self.normal()) - self.offset
    }

    pub fn foot(&self, p: Point) -> Point {
        p - self.normal() * self.signed_distance(p)
    }

    pub fn contains(&self, p: Point, tol: f64) -> bool {
        self.signed_distance(p).abs() <= p.scaled_tol(tol)
    }

    /// Same geometric line, labels ignored.
    pub fn coincides(&self, other: &Line) -> bool {
        is_parallel(self, other) && {
            let same_dir = self.direction().dot(other.direction()) > 0.0;
            let other_off = if same_dir { other.offset } else { -other.offset };
            (self.offset - other_off).abs()
                <= COINCIDENCE_TOL * self.offset.abs().max(other.offset.abs()).max(1.0)
        }
    }
}

/// Canonical line through two points.
pub fn canonicalize_line(p: Point, q: Point, label: &str) -> Result<Line> {
    Line::through(p, q, label)
}

/// Difference of direction angles folded into `[0, π/2]`.
fn angle_gap(a: &Line, b: &Line) -> f64 {
    let d = (a.angle - b.angle).abs();
    d.min(PI - d)
}

pub fn is_parallel(a: &Line, b: &Line) -> bool {
    angle_gap(a, b) <= COINCIDENCE_TOL
}

pub fn is_perpendicular(a: &Line, b: &Line) -> bool {
    (angle_gap(a, b) - FRAC_PI_2).abs() <= COINCIDENCE_TOL
}

/// Intersection point of two lines, `None` when they are parallel.
pub fn intersect(a: &Line, b: &Line) -> Option<Point> {
    if is_parallel(a, b) {
        return None;
    }
    let (na, nb) = (a.normal(), b.normal());
    let det = na.cross(nb);
    Some(Point::new(
        (a.offset * nb.y - b.offset * na.y) / det,
        (na.x * b.offset - nb.x * a.offset) / det,
    ))
}

/// The acute (or right) angle between two non-parallel lines.
pub fn acute_angle(a: &Line, b: &Line) -> Result<f64> {
    if is_parallel(a, b) {
        return Err(Error::ParallelLines(a.label.clone(), b.label.clone()));
    }
    Ok(angle_gap(a, b))
}

pub fn distance_to_line(x: Point, l: &Line) -> f64 {
    l.signed_distance(x).abs()
}

pub(crate) fn check_theta(theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta <= FRAC_PI_2 + COINCIDENCE_TOL) {
        return Err(Error::InvalidAngle(theta));
    }
    Ok(theta.min(FRAC_PI_2))
}

/// Angle-θ projection of `x` onto `target` with the given orientation.
///
/// With `p` the perpendicular foot and `h` the distance, the result is
/// `p ± (h / tan θ)·u` along the target. Orientation `Zero` picks the side
/// to the left of the gaze `x → p`. Points already on the target are fixed.
pub fn project(x: Point, theta: f64, orientation: Orientation, target: &Line) -> Result<Point> {
    let theta = check_theta(theta)?;
    if !x.is_finite() {
        return Err(Error::NonFinite);
    }
    let h = target.signed_distance(x);
    if h.abs() <= COINCIDENCE_TOL {
        return Ok(x);
    }
    let foot = x - target.normal() * h;
    if theta == FRAC_PI_2 {
        return Ok(foot);
    }
    // (foot - x) has length h, so its quarter turn scaled by 1/tanθ is the
    // left-hand offset of length h/tanθ.
    Ok(foot + (foot - x).rot90() * (orientation.sign() / theta.tan()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArrangementKind {
    /// Lines targeted by label; parallel and perpendicular pairs allowed.
    Symbolic,
    /// Lines targeted by distance rank; pairwise non-parallel, no three concurrent.
    Piecewise,
}

/// A validated collection of labelled lines with cached pairwise data.
#[derive(Debug, Clone)]
pub struct Arrangement {
    lines: Vec<Line>,
    kind: ArrangementKind,
    intersections: Vec<Option<Point>>,
    pair_angles: Vec<Option<f64>>,
    min_angle: Option<f64>,
}

/// Tolerance for treating two intersection points as the same point.
const CONCURRENCY_TOL: f64 = 1e-9;

impl Arrangement {
    pub fn new(lines: Vec<Line>, kind: ArrangementKind) -> Result<Self> {
        let m = lines.len();
        if m < 3 {
            return Err(Error::InvalidArrangement(format!(
                "need at least 3 lines, got {m}"
            )));
        }
        for (i, a) in lines.iter().enumerate() {
            if a.label.is_empty() {
                return Err(Error::InvalidArrangement(format!("line {i} has an empty label")));
            }
            for b in &lines[i + 1..] {
                if a.label == b.label {
                    return Err(Error::InvalidArrangement(format!(
                        "duplicate label {:?}",
                        a.label
                    )));
                }
                if a.coincides(b) {
                    return Err(Error::InvalidArrangement(format!(
                        "lines {} and {} coincide",
                        a.label, b.label
                    )));
                }
            }
        }

        let mut intersections = Vec::with_capacity(m * (m - 1) / 2);
        let mut pair_angles = Vec::with_capacity(m * (m - 1) / 2);
        for i in 0..m {
            for j in i + 1..m {
                intersections.push(intersect(&lines[i], &lines[j]));
                pair_angles.push(acute_angle(&lines[i], &lines[j]).ok());
            }
        }

        let mut arr = Arrangement {
            lines,
            kind,
            intersections,
            pair_angles,
            min_angle: None,
        };
        match kind {
            ArrangementKind::Symbolic => arr.validate_symbolic()?,
            ArrangementKind::Piecewise => arr.validate_piecewise()?,
        }
        Ok(arr)
    }

    fn validate_symbolic(&self) -> Result<()> {
        let m = self.lines.len();
        let all_concurrent = self.intersections.iter().all(Option::is_some) && {
            let z = self.intersections[0].unwrap();
            self.lines.iter().all(|l| l.contains(z, CONCURRENCY_TOL))
        };
        if all_concurrent {
            return Err(Error::InvalidArrangement(
                "all lines pass through a common point".into(),
            ));
        }
        if (0..m).all(|i| !self.is_generic_line(i)) {
            return Err(Error::InvalidArrangement(
                "every line is parallel or perpendicular to some other line".into(),
            ));
        }
        Ok(())
    }

    fn validate_piecewise(&mut self) -> Result<()> {
        let m = self.lines.len();
        for i in 0..m {
            for j in i + 1..m {
                if self.intersection(i, j).is_none() {
                    return Err(Error::InvalidArrangement(format!(
                        "lines {} and {} are parallel",
                        self.lines[i].label, self.lines[j].label
                    )));
                }
            }
        }
        let points: Vec<Point> = self.intersections.iter().flatten().copied().collect();
        for (a, p) in points.iter().enumerate() {
            for q in &points[a + 1..] {
                if p.distance(*q) <= p.scaled_tol(CONCURRENCY_TOL) {
                    return Err(Error::InvalidArrangement(format!(
                        "three or more lines meet at {p}"
                    )));
                }
            }
        }
        self.min_angle = self
            .pair_angles
            .iter()
            .flatten()
            .copied()
            .reduce(f64::min);
        Ok(())
    }

    fn pair_slot(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        let m = self.lines.len();
        i * m - i * (i + 1) / 2 + (j - i - 1)
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    pub fn line(&self, i: usize) -> &Line {
        &self.lines[i]
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn kind(&self) -> ArrangementKind {
        self.kind
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.lines.iter().position(|l| l.label == label)
    }

    /// Cached intersection of lines `i` and `j` (`None` if parallel or `i == j`).
    pub fn intersection(&self, i: usize, j: usize) -> Option<Point> {
        if i == j {
            return None;
        }
        self.intersections[self.pair_slot(i, j)]
    }

    /// Cached acute angle between lines `i` and `j` (`None` if parallel or `i == j`).
    pub fn pair_angle(&self, i: usize, j: usize) -> Option<f64> {
        if i == j {
            return None;
        }
        self.pair_angles[self.pair_slot(i, j)]
    }

    /// All finite pairwise intersection points with their line index pairs.
    pub fn vertices(&self) -> Vec<(usize, usize, Point)> {
        let m = self.lines.len();
        let mut out = Vec::new();
        for i in 0..m {
            for j in i + 1..m {
                if let Some(p) = self.intersection(i, j) {
                    out.push((i, j, p));
                }
            }
        }
        out
    }

    /// Least pairwise intersection angle δ. Only set for piecewise arrangements.
    pub fn min_angle(&self) -> Option<f64> {
        self.min_angle
    }

    /// Neither parallel nor perpendicular to any other line.
    pub fn is_generic_line(&self, i: usize) -> bool {
        let li = &self.lines[i];
        self.lines
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .all(|(_, lj)| !is_parallel(li, lj) && !is_perpendicular(li, lj))
    }

    /// Index of the first line carrying `x` within `tol` (scaled by |x|).
    pub fn locate(&self, x: Point, tol: f64) -> Option<usize> {
        self.lines.iter().position(|l| l.contains(x, tol))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn x_axis() -> Line {
        Line::new(0.0, 0.0, "X").unwrap()
    }

    fn y_axis() -> Line {
        Line::new(FRAC_PI_2, 0.0, "Y").unwrap()
    }

    #[test]
    fn canonical_forms() {
        let l = canonicalize_line(Point::new(0.0, 0.0), Point::new(1.0, 0.0), "L").unwrap();
        assert_eq!(l.angle(), 0.0);
        assert_eq!(l.offset(), 0.0);

        let l = canonicalize_line(Point::new(0.0, 1.0), Point::new(1.0, 2.0), "L").unwrap();
        assert!((l.angle() - FRAC_PI_4).abs() < 1e-15);
        assert!((l.offset() - 0.5f64.sqrt()).abs() < 1e-15);
        // distance oracle: |offset| is the distance from the origin
        let foot = l.foot(Point::new(0.0, 0.0));
        assert!((foot.norm() - l.offset().abs()).abs() < 1e-15);

        assert_eq!(
            canonicalize_line(Point::new(0.0, 0.0), Point::new(0.0, 0.0), "L"),
            Err(Error::DegenerateLine)
        );
    }

    #[test]
    fn reversed_points_give_the_same_line() {
        let p = Point::new(-1.5, 2.0);
        let q = Point::new(3.0, -0.25);
        let a = Line::through(p, q, "a").unwrap();
        let b = Line::through(q, p, "b").unwrap();
        assert!((a.angle() - b.angle()).abs() < 1e-15);
        assert!((a.offset() - b.offset()).abs() < 1e-14);
        assert!(a.angle() >= 0.0 && a.angle() < PI);
    }

    #[test]
    fn intersections() {
        assert_eq!(intersect(&x_axis(), &y_axis()), Some(Point::new(0.0, 0.0)));
        let diag = Line::from_point_angle(Point::new(0.0, 1.0), FRAC_PI_4, "D").unwrap();
        let p = intersect(&diag, &x_axis()).unwrap();
        assert!(p.distance(Point::new(-1.0, 0.0)) < 1e-12);
        let y1 = Line::new(0.0, 1.0, "Y1").unwrap();
        assert_eq!(intersect(&x_axis(), &y1), None);
    }

    #[test]
    fn acute_angles() {
        assert!((acute_angle(&x_axis(), &y_axis()).unwrap() - FRAC_PI_2).abs() < 1e-15);
        let diag = Line::new(FRAC_PI_4, 0.0, "D").unwrap();
        assert!((acute_angle(&x_axis(), &diag).unwrap() - FRAC_PI_4).abs() < 1e-15);

        let a = Line::new(0.2, 0.0, "a").unwrap();
        let b = Line::new(2.9, 0.0, "b").unwrap();
        let got = acute_angle(&a, &b).unwrap();
        // dot-product oracle
        let oracle = a.direction().dot(b.direction()).abs().acos();
        assert!((got - oracle).abs() < 1e-12);
        assert!((got - 0.441_592_653_589_793).abs() < 1e-12);
        assert_eq!(acute_angle(&b, &a).unwrap(), got);

        assert!(matches!(
            acute_angle(&x_axis(), &Line::new(0.0, 3.0, "P").unwrap()),
            Err(Error::ParallelLines(..))
        ));
    }

    #[test]
    fn point_line_distances() {
        assert_eq!(distance_to_line(Point::new(0.0, 1.0), &x_axis()), 1.0);
        let diag = Line::new(FRAC_PI_4, 0.0, "D").unwrap();
        let d = distance_to_line(Point::new(0.5, 0.0), &diag);
        // |x - y| / sqrt(2)
        assert!((d - 0.5 / 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(distance_to_line(Point::new(3.0, 0.0), &x_axis()), 0.0);
    }

    #[test]
    fn projection_examples() {
        let xa = x_axis();
        let z = project(Point::new(0.0, 1.0), FRAC_PI_2, Orientation::Zero, &xa).unwrap();
        assert_eq!(z, Point::new(0.0, 0.0));

        let z0 = project(Point::new(0.0, 1.0), FRAC_PI_4, Orientation::Zero, &xa).unwrap();
        let z1 = project(Point::new(0.0, 1.0), FRAC_PI_4, Orientation::One, &xa).unwrap();
        assert!(z0.distance(Point::new(1.0, 0.0)) < 1e-15);
        assert!(z1.distance(Point::new(-1.0, 0.0)) < 1e-15);

        let z = project(Point::new(0.0, 2.0), PI / 3.0, Orientation::Zero, &xa).unwrap();
        assert!(z.distance(Point::new(2.0 / 3f64.sqrt(), 0.0)) < 1e-15);
    }

    #[test]
    fn projection_rejects_bad_angles() {
        let xa = x_axis();
        for theta in [0.0, -0.1, 1.6, f64::NAN] {
            assert!(matches!(
                project(Point::new(0.0, 1.0), theta, Orientation::Zero, &xa),
                Err(Error::InvalidAngle(_))
            ));
        }
    }

    #[test]
    fn points_on_target_are_fixed() {
        let xa = x_axis();
        let p = Point::new(3.5, 0.0);
        assert_eq!(project(p, 0.3, Orientation::One, &xa).unwrap(), p);
    }

    #[test]
    fn symbolic_arrangement_validation() {
        // three concurrent lines
        let lines = vec![
            x_axis(),
            y_axis(),
            Line::new(FRAC_PI_4, 0.0, "D").unwrap(),
        ];
        assert!(Arrangement::new(lines, ArrangementKind::Symbolic).is_err());

        // axes plus a parallel: every line parallel or perpendicular to another
        let lines = vec![x_axis(), y_axis(), Line::new(0.0, 1.0, "X1").unwrap()];
        assert!(Arrangement::new(lines, ArrangementKind::Symbolic).is_err());

        let lines = vec![
            x_axis(),
            y_axis(),
            Line::from_point_angle(Point::new(0.0, 1.0), FRAC_PI_4, "D").unwrap(),
        ];
        let arr = Arrangement::new(lines, ArrangementKind::Symbolic).unwrap();
        assert!(arr.is_generic_line(2));
        assert!(!arr.is_generic_line(0));
        assert_eq!(arr.min_angle(), None);
    }

    #[test]
    fn piecewise_arrangement_validation() {
        let lines = vec![
            Line::new(0.0, 0.0, "A").unwrap(),
            Line::new(FRAC_PI_4, 0.0, "B").unwrap(),
            Line::from_point_angle(Point::new(2.0, 0.0), 3.0 * FRAC_PI_4, "C").unwrap(),
        ];
        let arr = Arrangement::new(lines, ArrangementKind::Piecewise).unwrap();
        assert!((arr.min_angle().unwrap() - FRAC_PI_4).abs() < 1e-15);
        assert!(arr.intersection(1, 2).unwrap().distance(Point::new(1.0, 1.0)) < 1e-12);

        let lines = vec![
            x_axis(),
            Line::new(0.0, 2.0, "P").unwrap(),
            y_axis(),
        ];
        assert!(Arrangement::new(lines, ArrangementKind::Piecewise).is_err());
    }
}
