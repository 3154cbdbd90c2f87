//! Exact evaluation of the potential
//!
//! `Φ = (3 + 2√3)·ℓopt − 3·d(p_on + o, p_opt) − ℓon − |o| + f(|o|, h)`
//!
//! along an engine trace paired with a candidate offline trajectory, and a
//! certificate that it never decreases.

use serde::{Deserialize, Serialize};

use crate::engine::{BishopRook, PhaseKind, Trace, TraceEvent};
use crate::error::{Error, Result};
use crate::geometry::{l1_distance, Axis, Frame, Point, Vector};
use crate::instance::{validate_alignment, AlignedTrajectory, Instance, RequestSegment};
use crate::scalar::Scalar;

/// `3 + 2√3`.
pub fn ratio_bound() -> Scalar {
    Scalar::from_int(3) + Scalar::from_int(2) * Scalar::sqrt3()
}

/// `6 − 2√3`, the slope of `f`.
pub fn f_slope() -> Scalar {
    Scalar::from_int(6) - Scalar::from_int(2) * Scalar::sqrt3()
}

/// `f = (6 − 2√3)·clamp(h, 0, |o|)`.
pub fn f_term(offset_mag: &Scalar, h: &Scalar) -> Result<Scalar> {
    if offset_mag.is_negative() {
        return Err(Error::InvalidArgument(format!(
            "negative offset magnitude {offset_mag}"
        )));
    }
    let clamped = h.clone().max(Scalar::zero()).min(offset_mag.clone());
    Ok(f_slope() * clamped)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PotentialRecord {
    pub s: Scalar,
    pub ell_opt: Scalar,
    pub ell_on: Scalar,
    pub d_term: Scalar,
    pub offset_mag: Scalar,
    pub h: Scalar,
    pub f_term: Scalar,
    pub phi: Scalar,
}

/// Evaluates Φ. `offset_vec` is in world coordinates; `h` is the canonical
/// height of the offline server above the online one in `frame`.
pub fn phi(
    server: &Point,
    opt: &Point,
    offset_vec: &Vector,
    ell_on: &Scalar,
    ell_opt: &Scalar,
    frame: &Frame,
) -> PotentialRecord {
    let shifted = server + offset_vec;
    let d_term = l1_distance(&shifted, opt);
    let offset_mag = offset_vec.l1_norm();
    let h = &frame.apply(opt).y - &frame.apply(server).y;
    let f = f_term(&offset_mag, &h).expect("norms are non-negative");
    let value =
        &ratio_bound() * ell_opt - &(Scalar::from_int(3) * &d_term) - ell_on - &offset_mag + &f;
    PotentialRecord {
        s: Scalar::zero(),
        ell_opt: ell_opt.clone(),
        ell_on: ell_on.clone(),
        d_term,
        offset_mag,
        h,
        f_term: f,
        phi: value,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decrease {
    pub s: Scalar,
    pub phi_before: Scalar,
    pub phi_after: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub ok: bool,
    pub first_decrease: Option<Decrease>,
    pub records: Vec<PotentialRecord>,
}

/// The online side of Φ at one instant, in a given cycle frame.
struct OnlineSample {
    server: Point,
    offset_x: Scalar,
    ell_on: Scalar,
}

fn online_at(ev: &TraceEvent, phase: PhaseKind, frame: &Frame) -> OnlineSample {
    let offset_x = match phase {
        PhaseKind::Bishop => -frame.apply(&ev.server).x,
        PhaseKind::Rook => -&ev.offset_mag,
    };
    OnlineSample {
        server: ev.server.clone(),
        offset_x,
        ell_on: ev.cost_on.clone(),
    }
}

fn lerp(a: &Scalar, b: &Scalar, t: &Scalar) -> Scalar {
    a + &(t * &(b - a))
}

fn online_lerp(a: &OnlineSample, b: &OnlineSample, t: &Scalar) -> OnlineSample {
    OnlineSample {
        server: a.server.lerp(&b.server, t),
        offset_x: lerp(&a.offset_x, &b.offset_x, t),
        ell_on: lerp(&a.ell_on, &b.ell_on, t),
    }
}

/// Offline position and cumulative cost as functions of `s`.
struct OptTrack<'a> {
    traj: &'a AlignedTrajectory,
    cumulative: Vec<Scalar>,
}

impl<'a> OptTrack<'a> {
    fn new(traj: &'a AlignedTrajectory) -> Self {
        OptTrack {
            traj,
            cumulative: traj.cumulative_lengths(),
        }
    }

    fn at(&self, s: &Scalar) -> (Point, Scalar) {
        let bps = self.traj.breakpoints();
        let idx = bps.partition_point(|b| b.s <= *s).max(1);
        let i = idx - 1;
        if bps[i].s == *s || i + 1 == bps.len() {
            return (bps[i].point(), self.cumulative[i].clone());
        }
        let t = (s - &bps[i].s) / (&bps[i + 1].s - &bps[i].s);
        (
            bps[i].point().lerp(&bps[i + 1].point(), &t),
            lerp(&self.cumulative[i], &self.cumulative[i + 1], &t),
        )
    }

    /// Breakpoint arc lengths strictly between `lo` and `hi`.
    fn interior(&self, lo: &Scalar, hi: &Scalar) -> Vec<Scalar> {
        let bps = self.traj.breakpoints();
        let start = bps.partition_point(|b| b.s <= *lo);
        bps[start..]
            .iter()
            .take_while(|b| b.s < *hi)
            .map(|b| b.s.clone())
            .collect()
    }
}

fn record(
    s: &Scalar,
    online: &OnlineSample,
    opt: &(Point, Scalar),
    frame: &Frame,
) -> PotentialRecord {
    let offset = frame
        .invert()
        .apply_vector(&Vector::new(online.offset_x.clone(), Scalar::zero()));
    let mut rec = phi(
        &online.server,
        &opt.0,
        &offset,
        &online.ell_on,
        &opt.1,
        frame,
    );
    rec.s = s.clone();
    rec
}

/// Quantities whose sign changes mark the kinks of Φ inside a linear piece.
fn kink_terms(online: &OnlineSample, opt: &Point, frame: &Frame) -> [Scalar; 6] {
    let p = frame.apply(&online.server);
    let q = frame.apply(opt);
    let h = &q.y - &p.y;
    [
        &(&p.x + &online.offset_x) - &q.x,
        &p.y - &q.y,
        online.offset_x.clone(),
        h.clone(),
        &h + &online.offset_x,
        &h - &online.offset_x,
    ]
}

/// Parameter `t ∈ (0, 1)` where a linear function with end values `a`, `b`
/// crosses zero, if it does.
fn crossing(a: &Scalar, b: &Scalar) -> Option<Scalar> {
    let straddles = (a.is_negative() && b.is_positive()) || (a.is_positive() && b.is_negative());
    straddles.then(|| a / &(a - b))
}

struct Verifier<'a> {
    opt: OptTrack<'a>,
    records: Vec<PotentialRecord>,
    first_decrease: Option<Decrease>,
}

impl Verifier<'_> {
    fn push(&mut self, rec: PotentialRecord) {
        if let Some(prev) = self.records.last() {
            if rec.phi < prev.phi && self.first_decrease.is_none() {
                self.first_decrease = Some(Decrease {
                    s: prev.s.clone(),
                    phi_before: prev.phi.clone(),
                    phi_after: rec.phi.clone(),
                });
            }
        }
        self.records.push(rec);
    }

    /// Φ along a positive-length stretch between two events sharing one
    /// phase and frame.
    fn piece(&mut self, a: &TraceEvent, b: &TraceEvent) {
        let frame = &b.frame;
        let oa = online_at(a, b.phase, frame);
        let ob = online_at(b, b.phase, frame);
        let span = &b.s - &a.s;
        let mut knots = vec![a.s.clone()];
        knots.extend(self.opt.interior(&a.s, &b.s));
        knots.push(b.s.clone());
        let at = |s: &Scalar| online_lerp(&oa, &ob, &((s - &a.s) / &span));

        for w in knots.windows(2) {
            let (u, v) = (&w[0], &w[1]);
            let (ou, ov) = (at(u), at(v));
            let (qu, qv) = (self.opt.at(u), self.opt.at(v));
            let ku = kink_terms(&ou, &qu.0, frame);
            let kv = kink_terms(&ov, &qv.0, frame);
            let mut points: Vec<Scalar> = ku
                .iter()
                .zip(&kv)
                .filter_map(|(x, y)| crossing(x, y))
                .collect();
            points.sort();
            points.dedup();
            if self.records.last().is_none_or(|r| r.s != *u) {
                self.push(record(u, &ou, &qu, frame));
            }
            for t in points {
                let s = lerp(u, v, &t);
                let online = online_lerp(&ou, &ov, &t);
                let q = self.opt.at(&s);
                self.push(record(&s, &online, &q, frame));
            }
            self.push(record(v, &ov, &qv, frame));
        }
    }
}

/// Certifies that Φ never decreases along `trace` against the offline
/// trajectory `opt`. Between the evaluated points every term of Φ is linear
/// in `s`, so comparing consecutive values decides monotonicity exactly.
pub fn verify_nondecreasing(trace: &Trace, opt: &AlignedTrajectory) -> Result<VerificationReport> {
    trace.check_structure()?;
    let inst = trace.instance()?;
    let report = validate_alignment(opt, &inst)?;
    if let Some(s) = report.first_violation {
        return Err(Error::InfeasibleOpt(s.to_string()));
    }
    let mut v = Verifier {
        opt: OptTrack::new(opt),
        records: Vec::new(),
        first_decrease: None,
    };
    let first = trace.start();
    v.push(record(
        &first.s,
        &online_at(first, first.phase, &first.frame),
        &v.opt.at(&first.s),
        &first.frame,
    ));
    for w in trace.events.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if a.s == b.s {
            let q = v.opt.at(&b.s);
            v.push(record(&b.s, &online_at(b, b.phase, &b.frame), &q, &b.frame));
        } else {
            if a.phase != b.phase || a.frame != b.frame {
                return Err(Error::MalformedTrace(format!(
                    "phase or frame changes without an event at s = {}",
                    a.s
                )));
            }
            v.piece(a, b);
        }
    }
    Ok(VerificationReport {
        ok: v.first_decrease.is_none(),
        first_decrease: v.first_decrease,
        records: v.records,
    })
}

/// Appends `reps` L-shaped request loops at `corner`: after walking from the
/// final request point to the corner, each loop visits the tips of two unit
/// arms through the corner, one pointing back along the approach and one
/// perpendicular to it.
pub fn append_homing_suffix(inst: &Instance, corner: &Point, reps: usize) -> Result<Instance> {
    if reps == 0 {
        return Ok(inst.clone());
    }
    let end = inst.end_point();
    if !end.aligned(corner) {
        return Err(Error::Misaligned(format!(
            "corner {corner} vs final request {end}"
        )));
    }
    let (a, b) = homing_arms(&end, corner);
    let mut pts = vec![corner.clone()];
    for _ in 0..reps {
        pts.push(corner + &b);
        pts.push(corner.clone());
        pts.push(corner + &a);
        pts.push(corner.clone());
    }
    inst.extend_through(&pts)
}

fn homing_arms(end: &Point, corner: &Point) -> (Vector, Vector) {
    let a = match (end - corner).axis() {
        Some(Axis::X) => Vector::int((end.x.clone() - corner.x.clone()).signum() as i64, 0),
        Some(Axis::Y) => Vector::int(0, (end.y.clone() - corner.y.clone()).signum() as i64),
        None => Vector::int(1, 0),
    };
    let b = Vector::new(-&a.dy, a.dx.clone());
    (a, b)
}

/// Smallest number of homing loops after which the engine's server rests at
/// `corner`, searching up to `max_reps`.
pub fn homing_reps(inst: &Instance, corner: &Point, max_reps: usize) -> Result<Option<usize>> {
    let end = inst.end_point();
    if !end.aligned(corner) {
        return Err(Error::Misaligned(format!(
            "corner {corner} vs final request {end}"
        )));
    }
    let mut engine = BishopRook::new(inst.start.clone());
    for seg in &inst.segments {
        engine.feed(seg)?;
    }
    let (a, b) = homing_arms(&end, corner);
    let leg = |from: &Point, to: &Point| RequestSegment::between(from, to);
    if let Some(seg) = leg(&end, corner) {
        engine.feed(&seg)?;
    }
    for reps in 1..=max_reps {
        for tip in [corner + &b, corner + &a] {
            engine.feed(&leg(corner, &tip).expect("unit arm"))?;
            engine.feed(&leg(&tip, corner).expect("unit arm"))?;
        }
        if engine.server() == corner {
            return Ok(Some(reps));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum Ratio {
    Finite(Scalar),
    Unbounded,
}

impl Ratio {
    pub fn to_f64(&self) -> f64 {
        match self {
            Ratio::Finite(r) => r.to_f64(),
            Ratio::Unbounded => f64::INFINITY,
        }
    }
}

fn check_pair(trace: &Trace, opt: &AlignedTrajectory) -> Result<()> {
    let inst = trace.instance()?;
    if let Some(s) = validate_alignment(opt, &inst)?.first_violation {
        return Err(Error::InfeasibleOpt(s.to_string()));
    }
    Ok(())
}

/// `ℓon / ℓopt`, with `0/0 = 1` and `x/0 = ∞`.
pub fn competitive_ratio(trace: &Trace, opt: &AlignedTrajectory) -> Result<Ratio> {
    check_pair(trace, opt)?;
    let on = &trace.final_cost;
    let off = opt.length();
    Ok(if off.is_zero() {
        if on.is_zero() {
            Ratio::Finite(Scalar::one())
        } else {
            Ratio::Unbounded
        }
    } else {
        Ratio::Finite(on / &off)
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuaranteeReport {
    pub ell_on: Scalar,
    /// Offline cost including the walk from the instance start to the
    /// offline trajectory's own start.
    pub ell_opt: Scalar,
    pub holds: bool,
}

/// Checks `ℓon ≤ (3 + 2√3)·ℓopt`. Both servers start at the instance's start
/// point, so an offline trajectory that begins elsewhere is charged for
/// getting there.
pub fn check_guarantee(trace: &Trace, opt: &AlignedTrajectory) -> Result<GuaranteeReport> {
    check_pair(trace, opt)?;
    let startup = l1_distance(&trace.start().request, &opt.start());
    let ell_opt = opt.length() + startup;
    let ell_on = trace.final_cost.clone();
    Ok(GuaranteeReport {
        holds: ell_on <= &ratio_bound() * &ell_opt,
        ell_on,
        ell_opt,
    })
}

pub fn serialize_report(report: &VerificationReport) -> String {
    crate::instance::to_json_text(report)
}
