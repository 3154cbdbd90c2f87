//! Request trajectories, candidate server trajectories synchronized to the
//! request's arc length, alignment checking, rectification and refinement.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Axis, Point, Vector};
use crate::scalar::Scalar;

/// One straight leg of the request trajectory.
///
/// The leg's displacement is `len · dir`. Axis-parallel legs are stored with
/// a unit direction, so `len` is their L1 length; a raw diagonal leg keeps
/// its direction as given and `len` is its parameter length.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SegmentJson")]
pub struct RequestSegment {
    pub dir: Vector,
    pub len: Scalar,
}

#[derive(Deserialize)]
struct SegmentJson {
    dir: Vector,
    len: Scalar,
}

impl TryFrom<SegmentJson> for RequestSegment {
    type Error = Error;

    fn try_from(raw: SegmentJson) -> Result<RequestSegment> {
        if raw.dir.is_zero() {
            return Err(Error::InvalidInstance(
                "segment has a zero direction".into(),
            ));
        }
        if raw.len.is_negative() {
            return Err(Error::InvalidInstance("segment has negative length".into()));
        }
        Ok(RequestSegment {
            dir: raw.dir,
            len: raw.len,
        })
    }
}

impl RequestSegment {
    /// An axis-parallel leg from a signed displacement along `axis`.
    pub fn axis(axis: Axis, signed_len: Scalar) -> RequestSegment {
        let unit = if signed_len.is_negative() { -1 } else { 1 };
        let dir = match axis {
            Axis::X => Vector::int(unit, 0),
            Axis::Y => Vector::int(0, unit),
        };
        RequestSegment {
            dir,
            len: signed_len.abs(),
        }
    }

    /// The axis-parallel leg from `a` to `b`; `None` unless they differ in
    /// exactly one coordinate.
    pub fn between(a: &Point, b: &Point) -> Option<RequestSegment> {
        let d = b - a;
        match d.axis()? {
            Axis::X => Some(RequestSegment::axis(Axis::X, d.dx)),
            Axis::Y => Some(RequestSegment::axis(Axis::Y, d.dy)),
        }
    }

    pub fn displacement(&self) -> Vector {
        self.dir.scale(&self.len)
    }

    pub fn is_axis_parallel(&self) -> bool {
        self.dir.axis().is_some()
    }
}

#[derive(Deserialize)]
struct InstanceJson {
    start: Point,
    segments: Vec<RequestSegment>,
}

/// A request trajectory: a start point and a list of straight legs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "InstanceJson")]
pub struct Instance {
    pub start: Point,
    pub segments: Vec<RequestSegment>,
}

impl TryFrom<InstanceJson> for Instance {
    type Error = Error;

    fn try_from(raw: InstanceJson) -> Result<Instance> {
        Instance::new(raw.start, raw.segments)
    }
}

impl Instance {
    /// Validates and normalizes: zero-length legs are dropped and
    /// axis-parallel directions become unit vectors.
    pub fn new(start: Point, segments: Vec<RequestSegment>) -> Result<Instance> {
        let mut out = Vec::with_capacity(segments.len());
        for (i, seg) in segments.into_iter().enumerate() {
            if seg.dir.is_zero() {
                return Err(Error::InvalidInstance(format!(
                    "segment {i} has a zero direction"
                )));
            }
            if seg.len.is_negative() {
                return Err(Error::InvalidInstance(format!(
                    "segment {i} has negative length"
                )));
            }
            if seg.len.is_zero() {
                continue;
            }
            let seg = match seg.dir.axis() {
                Some(Axis::X) => RequestSegment::axis(Axis::X, &seg.dir.dx * &seg.len),
                Some(Axis::Y) => RequestSegment::axis(Axis::Y, &seg.dir.dy * &seg.len),
                None => seg,
            };
            out.push(seg);
        }
        Ok(Instance {
            start,
            segments: out,
        })
    }

    pub fn empty(start: Point) -> Instance {
        Instance {
            start,
            segments: Vec::new(),
        }
    }

    /// Builds an axis-parallel instance through the given waypoints.
    pub fn from_waypoints(points: &[Point]) -> Result<Instance> {
        let start = points
            .first()
            .cloned()
            .ok_or_else(|| Error::InvalidInstance("no waypoints".into()))?;
        let mut segs = Vec::new();
        for (i, w) in points.windows(2).enumerate() {
            if w[0] == w[1] {
                continue;
            }
            let seg = RequestSegment::between(&w[0], &w[1]).ok_or_else(|| {
                Error::InvalidInstance(format!("waypoints {i} and {} are not axis-aligned", i + 1))
            })?;
            segs.push(seg);
        }
        Instance::new(start, segs)
    }

    pub fn total_length(&self) -> Scalar {
        self.segments.iter().map(|s| s.len.clone()).sum()
    }

    pub fn is_axis_parallel(&self) -> bool {
        self.first_diagonal().is_none()
    }

    pub fn first_diagonal(&self) -> Option<usize> {
        self.segments.iter().position(|s| !s.is_axis_parallel())
    }

    /// Arc-length knots `(s, point)` at every segment boundary, starting with
    /// `(0, start)`.
    pub fn knots(&self) -> Vec<(Scalar, Point)> {
        let mut out = Vec::with_capacity(self.segments.len() + 1);
        let mut s = Scalar::zero();
        let mut p = self.start.clone();
        out.push((s.clone(), p.clone()));
        for seg in &self.segments {
            s = &s + &seg.len;
            p = &p + &seg.displacement();
            out.push((s.clone(), p.clone()));
        }
        out
    }

    pub fn end_point(&self) -> Point {
        self.segments
            .iter()
            .fold(self.start.clone(), |p, seg| &p + &seg.displacement())
    }

    /// Request position at arc length `s`.
    pub fn position_at(&self, s: &Scalar) -> Result<Point> {
        if s.is_negative() {
            return Err(Error::OutOfRange(s.to_string()));
        }
        let mut s0 = Scalar::zero();
        let mut p = self.start.clone();
        for seg in &self.segments {
            let s1 = &s0 + &seg.len;
            if *s <= s1 {
                return Ok(&p + &seg.dir.scale(&(s - &s0)));
            }
            p = &p + &seg.displacement();
            s0 = s1;
        }
        if *s == s0 {
            Ok(p)
        } else {
            Err(Error::OutOfRange(s.to_string()))
        }
    }

    /// Request positions at the given arc lengths, which must be sorted.
    pub fn positions_at(&self, sorted: &[Scalar]) -> Result<Vec<Point>> {
        let mut out = Vec::with_capacity(sorted.len());
        let mut segs = self.segments.iter();
        let mut cur = segs.next();
        let mut s0 = Scalar::zero();
        let mut p = self.start.clone();
        for s in sorted {
            if *s < s0 {
                return Err(Error::InvalidArgument("arc lengths must be sorted".into()));
            }
            loop {
                match cur {
                    Some(seg) if *s > &s0 + &seg.len => {
                        s0 = &s0 + &seg.len;
                        p = &p + &seg.displacement();
                        cur = segs.next();
                    }
                    _ => break,
                }
            }
            let q = match cur {
                Some(seg) => &p + &seg.dir.scale(&(s - &s0)),
                None if *s == s0 => p.clone(),
                None => return Err(Error::OutOfRange(s.to_string())),
            };
            out.push(q);
        }
        Ok(out)
    }

    /// Appends axis-parallel legs through `waypoints`, starting from the
    /// current end point.
    pub fn extend_through(&self, waypoints: &[Point]) -> Result<Instance> {
        let mut pts = vec![self.end_point()];
        pts.extend_from_slice(waypoints);
        let tail = Instance::from_waypoints(&pts)?;
        let mut segments = self.segments.clone();
        segments.extend(tail.segments);
        Instance::new(self.start.clone(), segments)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Breakpoint {
    pub s: Scalar,
    pub x: Scalar,
    pub y: Scalar,
}

impl Breakpoint {
    pub fn new(s: Scalar, p: Point) -> Self {
        Breakpoint { s, x: p.x, y: p.y }
    }

    pub fn point(&self) -> Point {
        Point::new(self.x.clone(), self.y.clone())
    }
}

#[derive(Deserialize)]
struct TrajectoryJson {
    breakpoints: Vec<Breakpoint>,
}

/// A piecewise-linear server trajectory parameterized by the request's arc
/// length.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TrajectoryJson")]
pub struct AlignedTrajectory {
    breakpoints: Vec<Breakpoint>,
}

impl TryFrom<TrajectoryJson> for AlignedTrajectory {
    type Error = Error;

    fn try_from(raw: TrajectoryJson) -> Result<AlignedTrajectory> {
        AlignedTrajectory::new(raw.breakpoints)
    }
}

impl AlignedTrajectory {
    /// Requires a breakpoint at `s = 0` and strictly increasing `s`.
    pub fn new(breakpoints: Vec<Breakpoint>) -> Result<AlignedTrajectory> {
        let first = breakpoints
            .first()
            .ok_or_else(|| Error::InvalidTrajectory("no breakpoints".into()))?;
        if !first.s.is_zero() {
            return Err(Error::InvalidTrajectory(format!(
                "first breakpoint must be at s = 0, found {}",
                first.s
            )));
        }
        for (i, w) in breakpoints.windows(2).enumerate() {
            if w[1].s <= w[0].s {
                return Err(Error::InvalidTrajectory(format!(
                    "breakpoint {} does not advance s ({} after {})",
                    i + 1,
                    w[1].s,
                    w[0].s
                )));
            }
        }
        Ok(AlignedTrajectory { breakpoints })
    }

    /// Builds from `(s, point)` pairs, merging repeated `s` values (the later
    /// point must equal the earlier one).
    pub fn from_points(points: Vec<(Scalar, Point)>) -> Result<AlignedTrajectory> {
        let mut bps: Vec<Breakpoint> = Vec::with_capacity(points.len());
        for (s, p) in points {
            if let Some(last) = bps.last() {
                if last.s == s {
                    if last.point() != p {
                        return Err(Error::InvalidTrajectory(format!("jump at s = {s}")));
                    }
                    continue;
                }
            }
            bps.push(Breakpoint::new(s, p));
        }
        AlignedTrajectory::new(bps)
    }

    pub fn stationary(p: Point, total: &Scalar) -> AlignedTrajectory {
        let mut bps = vec![Breakpoint::new(Scalar::zero(), p.clone())];
        if total.is_positive() {
            bps.push(Breakpoint::new(total.clone(), p));
        }
        AlignedTrajectory { breakpoints: bps }
    }

    pub fn breakpoints(&self) -> &[Breakpoint] {
        &self.breakpoints
    }

    pub fn total_s(&self) -> Scalar {
        self.breakpoints
            .last()
            .map(|b| b.s.clone())
            .unwrap_or_default()
    }

    pub fn start(&self) -> Point {
        self.breakpoints[0].point()
    }

    pub fn end(&self) -> Point {
        self.breakpoints[self.breakpoints.len() - 1].point()
    }

    pub fn position_at(&self, s: &Scalar) -> Result<Point> {
        let idx = self.breakpoints.partition_point(|b| b.s <= *s);
        if idx == 0 {
            return Err(Error::OutOfRange(s.to_string()));
        }
        let b0 = &self.breakpoints[idx - 1];
        if b0.s == *s {
            return Ok(b0.point());
        }
        let b1 = self
            .breakpoints
            .get(idx)
            .ok_or_else(|| Error::OutOfRange(s.to_string()))?;
        let t = (s - &b0.s) / (&b1.s - &b0.s);
        Ok(b0.point().lerp(&b1.point(), &t))
    }

    /// Total L1 distance travelled.
    pub fn length(&self) -> Scalar {
        self.breakpoints
            .windows(2)
            .map(|w| crate::geometry::l1_distance(&w[0].point(), &w[1].point()))
            .sum()
    }

    /// Cumulative L1 distance travelled at each breakpoint.
    pub fn cumulative_lengths(&self) -> Vec<Scalar> {
        let mut acc = Scalar::zero();
        let mut out = vec![acc.clone()];
        for w in self.breakpoints.windows(2) {
            acc = &acc + &crate::geometry::l1_distance(&w[0].point(), &w[1].point());
            out.push(acc.clone());
        }
        out
    }

    /// Holds the final position until arc length `total`.
    pub fn extend_stationary(&self, total: &Scalar) -> Result<AlignedTrajectory> {
        let end = self.total_s();
        if *total < end {
            return Err(Error::OutOfRange(total.to_string()));
        }
        let mut bps = self.breakpoints.clone();
        if *total > end {
            bps.push(Breakpoint::new(total.clone(), self.end()));
        }
        Ok(AlignedTrajectory { breakpoints: bps })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignmentReport {
    pub feasible: bool,
    /// Infimum of the arc lengths at which alignment is lost.
    pub first_violation: Option<Scalar>,
}

/// Sorted union of two knot lists without duplicates.
pub(crate) fn merge_knots(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    let mut all: Vec<Scalar> = a.iter().chain(b).cloned().collect();
    all.sort();
    all.dedup();
    all
}

/// Decides whether `traj` stays aligned with the request for every arc
/// length. Between consecutive knots both motions are linear, so each axis
/// difference is either identically zero on the piece or zero at most once;
/// alignment on a piece of positive length therefore needs one difference to
/// vanish identically.
pub fn validate_alignment(traj: &AlignedTrajectory, inst: &Instance) -> Result<AlignmentReport> {
    let total = inst.total_length();
    if traj.total_s() != total {
        return Err(Error::LengthMismatch {
            instance: total.to_string(),
            trajectory: traj.total_s().to_string(),
        });
    }
    let inst_knots: Vec<Scalar> = inst.knots().into_iter().map(|(s, _)| s).collect();
    let traj_knots: Vec<Scalar> = traj.breakpoints().iter().map(|b| b.s.clone()).collect();
    let knots = merge_knots(&inst_knots, &traj_knots);
    if knots.len() == 1 {
        let ok = traj.start().aligned(&inst.start);
        return Ok(AlignmentReport {
            feasible: ok,
            first_violation: (!ok).then(Scalar::zero),
        });
    }
    let req = inst.positions_at(&knots)?;
    let srv = knots
        .iter()
        .map(|s| traj.position_at(s))
        .collect::<Result<Vec<_>>>()?;
    for (i, w) in knots.windows(2).enumerate() {
        let (r0, r1) = (&req[i], &req[i + 1]);
        let (q0, q1) = (&srv[i], &srv[i + 1]);
        let x_locked = q0.x == r0.x && q1.x == r1.x;
        let y_locked = q0.y == r0.y && q1.y == r1.y;
        if !x_locked && !y_locked {
            return Ok(AlignmentReport {
                feasible: false,
                first_violation: Some(w[0].clone()),
            });
        }
    }
    Ok(AlignmentReport {
        feasible: true,
        first_violation: None,
    })
}

/// Above this many stair steps per leg, rectification refuses to run.
const MAX_STAIR_STEPS: usize = 1 << 22;

/// Replaces every diagonal leg by a monotone staircase whose horizontal and
/// vertical steps are at most `epsilon` long. Each step pair covers `1/n` of
/// the leg's displacement (horizontal first), so the staircase ends exactly at
/// the leg's end point and its L1 length equals the leg's L1 extent.
pub fn rectify(inst: &Instance, epsilon: &Scalar) -> Result<Instance> {
    if !epsilon.is_positive() {
        return Err(Error::InvalidArgument(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let mut out = Vec::new();
    for seg in &inst.segments {
        if seg.is_axis_parallel() {
            out.push(seg.clone());
            continue;
        }
        let d = seg.displacement();
        let widest = d.dx.abs().max(d.dy.abs());
        let n = (widest / epsilon).ceil();
        let n: usize = n
            .try_into()
            .ok()
            .filter(|&n| (1..=MAX_STAIR_STEPS).contains(&n))
            .ok_or_else(|| Error::InvalidArgument("epsilon too small for this instance".into()))?;
        let k = Scalar::from_int(n as i64);
        let hx = &d.dx / &k;
        let hy = &d.dy / &k;
        for _ in 0..n {
            out.push(RequestSegment::axis(Axis::X, hx.clone()));
            out.push(RequestSegment::axis(Axis::Y, hy.clone()));
        }
    }
    Instance::new(inst.start.clone(), out)
}

/// Splits the leg containing arc length `s` in two collinear legs.
pub fn refine(inst: &Instance, s: &Scalar) -> Result<Instance> {
    let total = inst.total_length();
    if s.is_negative() || *s > total {
        return Err(Error::OutOfRange(s.to_string()));
    }
    let mut out = Vec::with_capacity(inst.segments.len() + 1);
    let mut s0 = Scalar::zero();
    for seg in &inst.segments {
        let s1 = &s0 + &seg.len;
        if s0 < *s && *s < s1 {
            out.push(RequestSegment {
                dir: seg.dir.clone(),
                len: s - &s0,
            });
            out.push(RequestSegment {
                dir: seg.dir.clone(),
                len: &s1 - s,
            });
        } else {
            out.push(seg.clone());
        }
        s0 = s1;
    }
    Instance::new(inst.start.clone(), out)
}

/// Pretty JSON with a trailing newline.
pub fn to_json_text<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable value");
    text.push('\n');
    text
}

/// Parses JSON, reporting the failing field path with line and column.
pub fn from_json_text<T: DeserializeOwned>(text: &str) -> Result<T> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        Error::Schema {
            path,
            line: inner.line(),
            column: inner.column(),
            message: inner.to_string(),
        }
    })?;
    de.end().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(value)
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    from_json_text(text)
}

pub fn serialize_instance(inst: &Instance) -> String {
    to_json_text(inst)
}

pub fn parse_trajectory(text: &str) -> Result<AlignedTrajectory> {
    from_json_text(text)
}

pub fn serialize_trajectory(traj: &AlignedTrajectory) -> String {
    to_json_text(traj)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn horizontal_unit() -> Instance {
        Instance::from_waypoints(&[Point::int(0, 0), Point::int(1, 0)]).unwrap()
    }

    #[test]
    fn rectify_leaves_axis_parallel_instances_alone() {
        let inst =
            Instance::from_waypoints(&[Point::int(0, 0), Point::int(2, 0), Point::int(2, -3)])
                .unwrap();
        assert_eq!(rectify(&inst, &Scalar::ratio(1, 3)).unwrap(), inst);
    }

    #[test]
    fn rectify_unit_diagonal() {
        let inst = Instance::new(
            Point::origin(),
            vec![RequestSegment {
                dir: Vector::int(1, 1),
                len: Scalar::one(),
            }],
        )
        .unwrap();
        let out = rectify(&inst, &Scalar::ratio(1, 2)).unwrap();
        let pts: Vec<Point> = out.knots().into_iter().map(|(_, p)| p).collect();
        let h = Scalar::ratio(1, 2);
        let expected = vec![
            Point::int(0, 0),
            Point::new(h.clone(), Scalar::zero()),
            Point::new(h.clone(), h.clone()),
            Point::new(Scalar::one(), h.clone()),
            Point::int(1, 1),
        ];
        assert_eq!(pts, expected);
        assert_eq!(out.total_length(), Scalar::from_int(2));
    }

    #[test]
    fn rectify_three_four_five() {
        let inst = Instance::new(
            Point::origin(),
            vec![RequestSegment {
                dir: Vector::new(Scalar::ratio(3, 5), Scalar::ratio(4, 5)),
                len: Scalar::from_int(5),
            }],
        )
        .unwrap();
        let out = rectify(&inst, &Scalar::one()).unwrap();
        assert_eq!(out.total_length(), Scalar::from_int(7));
        assert_eq!(out.end_point(), Point::int(3, 4));
        assert!(out.is_axis_parallel());
    }

    #[test]
    fn rectify_rejects_bad_epsilon() {
        assert!(rectify(&horizontal_unit(), &Scalar::zero()).is_err());
        assert!(rectify(&horizontal_unit(), &Scalar::from_int(-1)).is_err());
    }

    #[test]
    fn alignment_examples() {
        let inst = horizontal_unit();
        let same = AlignedTrajectory::from_points(vec![
            (Scalar::zero(), Point::int(0, 0)),
            (Scalar::one(), Point::int(1, 0)),
        ])
        .unwrap();
        assert!(validate_alignment(&same, &inst).unwrap().feasible);

        let still = AlignedTrajectory::stationary(Point::int(0, 0), &Scalar::one());
        assert!(validate_alignment(&still, &inst).unwrap().feasible);

        let off = AlignedTrajectory::stationary(Point::int(0, 1), &Scalar::one());
        let rep = validate_alignment(&off, &inst).unwrap();
        assert!(!rep.feasible);
        assert_eq!(rep.first_violation, Some(Scalar::zero()));

        let short = AlignedTrajectory::stationary(Point::int(0, 0), &Scalar::from_int(2));
        assert!(matches!(
            validate_alignment(&short, &inst),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn alignment_detects_crossing_mid_piece() {
        // Server slides along y = 0 then leaves it while the request keeps
        // moving in x: the loss happens at the breakpoint where it departs.
        let inst = Instance::from_waypoints(&[Point::int(0, 0), Point::int(4, 0)]).unwrap();
        let traj = AlignedTrajectory::from_points(vec![
            (Scalar::zero(), Point::int(0, 0)),
            (Scalar::from_int(2), Point::int(0, 0)),
            (Scalar::from_int(4), Point::int(0, 2)),
        ])
        .unwrap();
        let rep = validate_alignment(&traj, &inst).unwrap();
        assert_eq!(rep.first_violation, Some(Scalar::from_int(2)));
    }

    #[test]
    fn refine_examples() {
        let inst = Instance::from_waypoints(&[Point::int(0, 0), Point::int(3, 0)]).unwrap();
        assert_eq!(refine(&inst, &Scalar::zero()).unwrap(), inst);
        let r = refine(&inst, &Scalar::one()).unwrap();
        assert_eq!(r.segments.len(), 2);
        assert_eq!(
            r.segments[0].len.clone() + r.segments[1].len.clone(),
            Scalar::from_int(3)
        );
        assert_eq!(refine(&r, &Scalar::one()).unwrap(), r);
        assert!(refine(&inst, &Scalar::from_int(4)).is_err());
    }

    #[test]
    fn parse_accepts_decimals_and_drops_zero_legs() {
        let text = r#"{"start": {"x": 0, "y": "0.5"},
            "segments": [{"dir": {"dx": 1, "dy": 0}, "len": "0.5"},
                         {"dir": {"dx": 0, "dy": -1}, "len": 0}]}"#;
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.start.y, Scalar::ratio(1, 2));
        assert_eq!(inst.segments.len(), 1);
        assert_eq!(inst.segments[0].len, Scalar::ratio(1, 2));
    }

    #[test]
    fn parse_rejects_zero_direction_with_location() {
        let text = "{\"start\": {\"x\": 0, \"y\": 0},\n \"segments\": [{\"dir\": {\"dx\": 0, \"dy\": 0}, \"len\": 1}]}";
        match parse_instance(text) {
            Err(Error::Schema { message, line, .. }) => {
                assert!(message.contains("zero direction"), "{message}");
                assert_eq!(line, 2);
            }
            other => panic!("expected schema error, got {other:?}"),
        }
        let text =
            r#"{"start": {"x": 0, "y": 0}, "segments": [{"dir": {"dx": 1, "dy": 0}, "len": "x"}]}"#;
        match parse_instance(text) {
            Err(Error::Schema { path, .. }) => assert_eq!(path, "segments[0].len"),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn trajectory_json_round_trip() {
        let traj = AlignedTrajectory::from_points(vec![
            (Scalar::zero(), Point::int(0, 0)),
            (
                Scalar::sqrt3(),
                Point::new(Scalar::ratio(1, 3), Scalar::zero()),
            ),
        ])
        .unwrap();
        let text = serialize_trajectory(&traj);
        assert!(text.ends_with('\n'));
        assert_eq!(parse_trajectory(&text).unwrap(), traj);
        assert!(parse_trajectory(r#"{"breakpoints": []}"#).is_err());
    }
}
