//! Deterministic SVG pictures of a trace: request, online server and
//! optional offline trajectories, phase-colored server strokes, offset arrows
//! at phase switches and cycle-start markers.

use std::fmt::Write;

use crate::engine::{EventKind, PhaseKind, Trace};
use crate::geometry::{Point, Vector};
use crate::instance::AlignedTrajectory;
use crate::scalar::Scalar;

const SIZE: f64 = 640.0;
const MARGIN: f64 = 24.0;

struct Viewport {
    min_x: f64,
    max_y: f64,
    scale: f64,
}

impl Viewport {
    fn fit(points: &[(f64, f64)]) -> Viewport {
        let (mut lo_x, mut hi_x, mut lo_y, mut hi_y) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        if let Some(&(x, y)) = points.first() {
            (lo_x, hi_x, lo_y, hi_y) = (x, x, y, y);
        }
        for &(x, y) in points {
            lo_x = lo_x.min(x);
            hi_x = hi_x.max(x);
            lo_y = lo_y.min(y);
            hi_y = hi_y.max(y);
        }
        let span = (hi_x - lo_x).max(hi_y - lo_y).max(1e-9);
        Viewport {
            min_x: lo_x,
            max_y: hi_y,
            scale: (SIZE - 2.0 * MARGIN) / span,
        }
    }

    fn map(&self, p: &Point) -> (f64, f64) {
        let (x, y) = p.to_f64();
        (
            MARGIN + (x - self.min_x) * self.scale,
            MARGIN + (self.max_y - y) * self.scale,
        )
    }
}

fn coords(view: &Viewport, pts: &[Point]) -> String {
    let mut out = String::new();
    for (i, p) in pts.iter().enumerate() {
        let (x, y) = view.map(p);
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{x:.4},{y:.4}");
    }
    out
}

fn dedup(pts: Vec<Point>) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::with_capacity(pts.len());
    for p in pts {
        if out.last() != Some(&p) {
            out.push(p);
        }
    }
    out
}

pub fn render_svg(trace: &Trace, opt: Option<&AlignedTrajectory>) -> String {
    let request = dedup(trace.events.iter().map(|e| e.request.clone()).collect());
    let server = dedup(trace.events.iter().map(|e| e.server.clone()).collect());
    let opt_pts: Option<Vec<Point>> =
        opt.map(|o| dedup(o.breakpoints().iter().map(|b| b.point()).collect()));

    let mut all: Vec<(f64, f64)> = request.iter().chain(&server).map(Point::to_f64).collect();
    if let Some(o) = &opt_pts {
        all.extend(o.iter().map(Point::to_f64));
    }
    let view = Viewport::fit(&all);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    svg.push_str(concat!(
        "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" ",
        "markerWidth=\"6\" markerHeight=\"6\" orient=\"auto-start-reverse\">",
        "<path d=\"M 0 0 L 10 5 L 0 10 z\" fill=\"#7b3294\"/></marker></defs>\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    let _ = writeln!(
        svg,
        r##"<polyline class="request" points="{}" fill="none" stroke="#999999" stroke-width="2" stroke-dasharray="6 3"/>"##,
        coords(&view, &request)
    );
    let _ = writeln!(
        svg,
        r##"<polyline class="server" points="{}" fill="none" stroke="#222222" stroke-width="1"/>"##,
        coords(&view, &server)
    );
    if let Some(o) = &opt_pts {
        let _ = writeln!(
            svg,
            r##"<polyline class="opt" points="{}" fill="none" stroke="#1a9641" stroke-width="2"/>"##,
            coords(&view, o)
        );
    }

    for (phase, color) in [(PhaseKind::Bishop, "#d7191c"), (PhaseKind::Rook, "#2c7bb6")] {
        let mut d = String::new();
        for w in trace.events.windows(2) {
            if w[1].phase != phase || w[0].s == w[1].s || w[0].server == w[1].server {
                continue;
            }
            let (x0, y0) = view.map(&w[0].server);
            let (x1, y1) = view.map(&w[1].server);
            let _ = write!(d, "M {x0:.4} {y0:.4} L {x1:.4} {y1:.4} ");
        }
        if !d.is_empty() {
            let name = match phase {
                PhaseKind::Bishop => "bishop",
                PhaseKind::Rook => "rook",
            };
            let _ = writeln!(
                svg,
                r#"<path class="phase-{name}" d="{}" fill="none" stroke="{color}" stroke-width="3" stroke-opacity="0.7"/>"#,
                d.trim_end()
            );
        }
    }

    for e in &trace.events {
        let (x, y) = view.map(&e.server);
        match e.kind {
            EventKind::PhaseSwitch if e.offset_mag.is_positive() => {
                let offset = e
                    .frame
                    .invert()
                    .apply_vector(&Vector::new(-&e.offset_mag, Scalar::zero()));
                let (tx, ty) = view.map(&(&e.server + &offset));
                let _ = writeln!(
                    svg,
                    r##"<line class="offset" x1="{x:.4}" y1="{y:.4}" x2="{tx:.4}" y2="{ty:.4}" stroke="#7b3294" stroke-width="1.5" marker-end="url(#arrow)"/>"##
                );
            }
            EventKind::CycleStart => {
                let _ = writeln!(
                    svg,
                    r##"<circle class="cycle-start" cx="{x:.4}" cy="{y:.4}" r="3" fill="#fdae61" stroke="#222222" stroke-width="0.5"/>"##
                );
            }
            _ => {}
        }
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::run;
    use crate::instance::Instance;

    #[test]
    fn structure() {
        let inst = Instance::from_waypoints(&[
            Point::int(0, 1),
            Point::int(0, 0),
            Point::int(1, 0),
            Point::int(1, 1),
        ])
        .unwrap();
        let trace = run(&inst).unwrap();
        let svg = render_svg(&trace, None);
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("class=\"offset\""));
        assert!(svg.contains("phase-bishop"));
        assert_eq!(svg, render_svg(&trace, None));
        let opt = AlignedTrajectory::stationary(Point::int(0, 0), &inst.total_length());
        assert_eq!(
            render_svg(&trace, Some(&opt)).matches("<polyline").count(),
            3
        );
    }
}
