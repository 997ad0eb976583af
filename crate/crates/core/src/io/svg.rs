//! SVG 1.1 figures: arrangement lines clipped to a padded window, plus an
//! orbit polyline, a highlighted cycle or a closed curve.

use std::fmt::Write as _;

use quick_xml::escape::escape;

use crate::geometry::{Arrangement, Line, Point};

const CANVAS: f64 = 800.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#2ca02c", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub min: Point,
    pub max: Point,
}

impl Window {
    /// Bounding box of `points` padded by 10% on each side.
    pub fn fit(points: &[Point]) -> Window {
        let mut min = Point::new(f64::INFINITY, f64::INFINITY);
        let mut max = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in points.iter().filter(|p| p.is_finite()) {
            min = Point::new(min.x.min(p.x), min.y.min(p.y));
            max = Point::new(max.x.max(p.x), max.y.max(p.y));
        }
        if !min.x.is_finite() {
            return Window {
                min: Point::new(-1.0, -1.0),
                max: Point::new(1.0, 1.0),
            };
        }
        let span = (max.x - min.x).max(max.y - min.y);
        if span < 1e-9 {
            let c = Point::new(min.x, min.y);
            return Window {
                min: c - Point::new(1.0, 1.0),
                max: c + Point::new(1.0, 1.0),
            };
        }
        let pad_x = 0.1 * (max.x - min.x).max(span * 0.1);
        let pad_y = 0.1 * (max.y - min.y).max(span * 0.1);
        Window {
            min: Point::new(min.x - pad_x, min.y - pad_y),
            max: Point::new(max.x + pad_x, max.y + pad_y),
        }
    }

    fn scale(&self) -> f64 {
        CANVAS / (self.max.x - self.min.x).max(self.max.y - self.min.y)
    }

    fn size(&self) -> (f64, f64) {
        let s = self.scale();
        ((self.max.x - self.min.x) * s, (self.max.y - self.min.y) * s)
    }

    /// World to canvas coordinates, with y pointing down.
    fn map(&self, p: Point) -> (f64, f64) {
        let s = self.scale();
        ((p.x - self.min.x) * s, (self.max.y - p.y) * s)
    }

    /// The part of `line` inside the window (Liang-Barsky).
    pub fn clip(&self, line: &Line) -> Option<(Point, Point)> {
        let reach = self.min.distance(self.max) + line.anchor().distance(self.min);
        let (a, d) = (line.point_at(line.param_of(self.min) - reach), line.direction() * (2.0 * reach));
        let (mut t0, mut t1) = (0.0f64, 1.0f64);
        for (p, q) in [
            (-d.x, a.x - self.min.x),
            (d.x, self.max.x - a.x),
            (-d.y, a.y - self.min.y),
            (d.y, self.max.y - a.y),
        ] {
            if p == 0.0 {
                if q < 0.0 {
                    return None;
                }
                continue;
            }
            let r = q / p;
            if p < 0.0 {
                t0 = t0.max(r);
            } else {
                t1 = t1.min(r);
            }
        }
        (t0 < t1).then(|| (a + d * t0, a + d * t1))
    }
}

/// Everything the figure window must contain: the given points and every
/// pairwise intersection, so each line crosses the window.
pub fn figure_window(arr: &Arrangement, points: &[Point]) -> Window {
    let mut all: Vec<Point> = arr.vertices().into_iter().map(|v| v.2).collect();
    all.extend_from_slice(points);
    Window::fit(&all)
}

fn fmt(v: f64) -> String {
    format!("{v:.3}")
}

fn points_attr(w: &Window, pts: &[Point]) -> String {
    pts.iter()
        .map(|&p| {
            let (x, y) = w.map(p);
            format!("{},{}", fmt(x), fmt(y))
        })
        .collect::<Vec<_>>()
        .join(" ")
}

struct Figure {
    out: String,
    window: Window,
}

impl Figure {
    fn new(arr: &Arrangement, window: Window, title: &str) -> Figure {
        let (width, height) = window.size();
        let (width, height) = (fmt(width), fmt(height));
        let mut out = String::new();
        out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        let _ = writeln!(
            out,
            "<svg version=\"1.1\" xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">"
        );
        let _ = writeln!(out, "<title>{}</title>", escape(title));
        out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
        out.push_str("<g id=\"lines\" stroke-width=\"1.5\">\n");
        for (i, line) in arr.lines().iter().enumerate() {
            let Some((a, b)) = window.clip(line) else {
                continue;
            };
            let ((x1, y1), (x2, y2)) = (window.map(a), window.map(b));
            let color = PALETTE[i % PALETTE.len()];
            let label = escape(line.label());
            let _ = writeln!(
                out,
                "  <line data-label=\"{label}\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{color}\"/>",
                fmt(x1),
                fmt(y1),
                fmt(x2),
                fmt(y2)
            );
            let _ = writeln!(
                out,
                "  <text x=\"{}\" y=\"{}\" font-size=\"14\" fill=\"{color}\">{label}</text>",
                fmt(x1 + 0.9 * (x2 - x1)),
                fmt(y1 + 0.9 * (y2 - y1) - 6.0)
            );
        }
        out.push_str("</g>\n");
        Figure { out, window }
    }

    fn path(&mut self, element: &str, id: &str, pts: &[Point], stroke: &str, width: &str) {
        if pts.is_empty() {
            return;
        }
        let _ = writeln!(
            self.out,
            "<{element} id=\"{id}\" points=\"{}\" fill=\"none\" stroke=\"{stroke}\" stroke-width=\"{width}\"/>",
            points_attr(&self.window, pts)
        );
    }

    fn markers(&mut self, id: &str, pts: &[Point], fill: &str) {
        let _ = writeln!(self.out, "<g id=\"{id}\" fill=\"{fill}\">");
        for &p in pts {
            let (x, y) = self.window.map(p);
            let _ = writeln!(self.out, "  <circle cx=\"{}\" cy=\"{}\" r=\"3\"/>", fmt(x), fmt(y));
        }
        self.out.push_str("</g>\n");
    }

    fn finish(mut self) -> String {
        self.out.push_str("</svg>\n");
        self.out
    }
}

/// Arrangement, orbit polyline and (if any) the limit cycle as a closed polygon.
pub fn orbit_svg(arr: &Arrangement, orbit: &[Point], cycle: Option<&[Point]>) -> String {
    let finite: Vec<Point> = orbit.iter().copied().filter(|p| p.is_finite()).collect();
    let window = figure_window(arr, &finite);
    let mut fig = Figure::new(arr, window, "orbit");
    fig.path("polyline", "orbit", &finite, "#7f7f7f", "0.8");
    fig.markers("orbit-points", &finite, "#7f7f7f");
    if let Some(c) = cycle {
        fig.path("polygon", "cycle", c, "#d62728", "2.5");
        fig.markers("cycle-points", c, "#d62728");
    }
    fig.finish()
}

/// Arrangement with a closed curve drawn as a polygon.
pub fn curve_svg(arr: &Arrangement, vertices: &[Point]) -> String {
    let window = figure_window(arr, vertices);
    let mut fig = Figure::new(arr, window, "closed curve");
    fig.path("polygon", "curve", vertices, "#d62728", "2.5");
    fig.markers("curve-points", vertices, "#d62728");
    fig.finish()
}
