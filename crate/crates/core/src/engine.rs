//! The Bishop-Rook online algorithm for the continuous CNN problem, run
//! exactly on axis-parallel request trajectories.
//!
//! Each cycle fixes a canonical frame in which the request starts at the
//! origin and the server sits at `(0, h)` with `h ≥ 0`. In the bishop phase
//! the server answers horizontal request motion by a 45° descent and ignores
//! vertical motion, until it meets the request. The rook phase then keeps the
//! server y-aligned with the request and to its left, spending an offset of
//! magnitude `|s_x|` at rate `1 + √3` per unit of vertical motion and rate 1
//! per unit of leftward drag. When the offset is used up a new cycle starts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Frame, Point, SignedPerm, Vector};
use crate::instance::{AlignedTrajectory, Instance, RequestSegment};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseKind {
    Bishop,
    Rook,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Phase {
    pub kind: PhaseKind,
    /// World to canonical coordinates for the current cycle.
    pub frame: Frame,
    /// `|o|`. In the rook phase the offset is `−offset_mag·x̂` canonically; in
    /// the bishop phase it is the running value `−(canonical server x)·x̂`.
    pub offset_mag: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EngineState {
    pub server: Point,
    pub request: Point,
    pub phase: Phase,
    pub cost_on: Scalar,
    pub s: Scalar,
}

impl EngineState {
    pub fn initial(start: Point) -> EngineState {
        let phase = start_cycle(&start, &start).expect("a point is aligned with itself");
        EngineState {
            server: start.clone(),
            request: start,
            phase,
            cost_on: Scalar::zero(),
            s: Scalar::zero(),
        }
    }

    pub fn canonical_server(&self) -> Point {
        self.phase.frame.apply(&self.server)
    }

    pub fn canonical_request(&self) -> Point {
        self.phase.frame.apply(&self.request)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EventKind {
    RequestHorizontal,
    RequestVertical,
    PhaseSwitch,
    CycleStart,
}

/// Snapshot of the engine after an elementary motion or a phase change.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub s: Scalar,
    pub request: Point,
    pub server: Point,
    pub phase: PhaseKind,
    pub frame: Frame,
    pub offset_mag: Scalar,
    pub cost_on: Scalar,
    pub kind: EventKind,
}

impl TraceEvent {
    fn snapshot(state: &EngineState, kind: EventKind) -> TraceEvent {
        TraceEvent {
            s: state.s.clone(),
            request: state.request.clone(),
            server: state.server.clone(),
            phase: state.phase.kind,
            frame: state.phase.frame.clone(),
            offset_mag: state.phase.offset_mag.clone(),
            cost_on: state.cost_on.clone(),
            kind,
        }
    }

    /// Canonical x component of the offset vector (always `≤ 0` for engine
    /// output).
    pub fn offset_x(&self) -> Scalar {
        match self.phase {
            PhaseKind::Bishop => -self.frame.apply(&self.server).x,
            PhaseKind::Rook => -&self.offset_mag,
        }
    }
}

#[derive(Deserialize)]
struct TraceJson {
    events: Vec<TraceEvent>,
    final_cost: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TraceJson")]
pub struct Trace {
    pub events: Vec<TraceEvent>,
    pub final_cost: Scalar,
}

impl TryFrom<TraceJson> for Trace {
    type Error = Error;

    fn try_from(raw: TraceJson) -> Result<Trace> {
        let trace = Trace {
            events: raw.events,
            final_cost: raw.final_cost,
        };
        trace.check_structure()?;
        Ok(trace)
    }
}

impl Trace {
    /// Structural sanity: starts at `s = 0`, `s` never decreases, the server
    /// never jumps, and between events the request makes one axis-parallel
    /// move whose length equals the advance in `s`.
    pub fn check_structure(&self) -> Result<()> {
        let first = self
            .events
            .first()
            .ok_or_else(|| Error::MalformedTrace("no events".into()))?;
        if !first.s.is_zero() {
            return Err(Error::MalformedTrace("first event must be at s = 0".into()));
        }
        for (i, w) in self.events.windows(2).enumerate() {
            let (a, b) = (&w[0], &w[1]);
            let ds = &b.s - &a.s;
            if ds.is_negative() {
                return Err(Error::MalformedTrace(format!(
                    "event {} goes back in s",
                    i + 1
                )));
            }
            let dr = &b.request - &a.request;
            if !dr.is_zero() && dr.axis().is_none() {
                return Err(Error::MalformedTrace(format!(
                    "request moves diagonally before event {}",
                    i + 1
                )));
            }
            if dr.l1_norm() != ds {
                return Err(Error::MalformedTrace(format!(
                    "request displacement before event {} does not match the arc length",
                    i + 1
                )));
            }
            if ds.is_zero() && a.server != b.server {
                return Err(Error::MalformedTrace(format!(
                    "server jumps at event {}",
                    i + 1
                )));
            }
        }
        Ok(())
    }

    pub fn start(&self) -> &TraceEvent {
        &self.events[0]
    }

    pub fn last(&self) -> &TraceEvent {
        &self.events[self.events.len() - 1]
    }

    pub fn total_s(&self) -> Scalar {
        self.last().s.clone()
    }

    /// The request trajectory recorded in the trace.
    pub fn instance(&self) -> Result<Instance> {
        let pts: Vec<Point> = self.events.iter().map(|e| e.request.clone()).collect();
        Instance::from_waypoints(&pts)
    }

    /// The online server's trajectory.
    pub fn as_trajectory(&self) -> Result<AlignedTrajectory> {
        AlignedTrajectory::from_points(
            self.events
                .iter()
                .map(|e| (e.s.clone(), e.server.clone()))
                .collect(),
        )
    }

    /// Drops arrival events that sit in the middle of a single linear motion
    /// (same phase and frame on both sides, every field interpolated), so
    /// traces of refined instances compare equal to the originals.
    pub fn normalize(&self) -> Trace {
        let mut out: Vec<TraceEvent> = Vec::with_capacity(self.events.len());
        for (i, e) in self.events.iter().enumerate() {
            let next = self.events.get(i + 1);
            let removable = match (out.last(), next) {
                (Some(prev), Some(next)) => is_interior(prev, e, next),
                _ => false,
            };
            if !removable {
                out.push(e.clone());
            }
        }
        Trace {
            events: out,
            final_cost: self.final_cost.clone(),
        }
    }
}

fn is_interior(prev: &TraceEvent, e: &TraceEvent, next: &TraceEvent) -> bool {
    if !matches!(
        e.kind,
        EventKind::RequestHorizontal | EventKind::RequestVertical
    ) || next.kind != e.kind
        || prev.phase != e.phase
        || next.phase != e.phase
        || prev.frame != e.frame
        || next.frame != e.frame
        || !(prev.s < e.s && e.s < next.s)
    {
        return false;
    }
    let t = (&e.s - &prev.s) / (&next.s - &prev.s);
    let lerp = |a: &Scalar, b: &Scalar| a + &(&t * &(b - a));
    e.request == prev.request.lerp(&next.request, &t)
        && e.server == prev.server.lerp(&next.server, &t)
        && e.cost_on == lerp(&prev.cost_on, &next.cost_on)
        && e.offset_mag == lerp(&prev.offset_mag, &next.offset_mag)
}

/// `1 + √3`, the rook's offset decay rate under vertical motion.
pub fn vertical_decay_rate() -> Scalar {
    Scalar::one() + Scalar::sqrt3()
}

fn perm_mapping(from: &Vector, to: &Vector) -> Option<SignedPerm> {
    SignedPerm::ALL.into_iter().find(|p| p.apply(from) == *to)
}

/// Opens a bishop phase. The frame sends the request to the origin and the
/// server to `(0, h)`; among qualifying orientations the first in
/// [`SignedPerm::ALL`] wins. With `h = 0` the identity orientation is a
/// placeholder that the engine replaces when the next move arrives.
pub fn start_cycle(server: &Point, request: &Point) -> Result<Phase> {
    if !server.aligned(request) {
        return Err(Error::InvariantBreach(format!(
            "cycle starts with server {server} not aligned with request {request}"
        )));
    }
    let sep = server - request;
    let perm = if sep.is_zero() {
        SignedPerm::Id
    } else {
        let up = Vector::new(Scalar::zero(), sep.l1_norm());
        perm_mapping(&sep, &up).expect("axis vectors map to +y")
    };
    Ok(Phase {
        kind: PhaseKind::Bishop,
        frame: Frame::centered(perm, request),
        offset_mag: Scalar::zero(),
    })
}

/// Result of one elementary step.
#[derive(Clone, Debug)]
pub struct StepOutcome {
    /// State at the end of the consumed motion, still in the starting phase.
    pub arrived: EngineState,
    /// Length of the move actually consumed; the rest is left to the caller.
    pub consumed: Scalar,
    /// The state after the phase switch, when one happens at `arrived.s`.
    pub switched: Option<EngineState>,
}

fn check_move(mv: &RequestSegment) -> Result<()> {
    let unit = mv.dir.l1_norm() == Scalar::one();
    if mv.dir.axis().is_none() || !unit || mv.len.is_negative() {
        return Err(Error::InvalidArgument(format!(
            "elementary moves must be axis-parallel unit directions, got {:?}",
            mv.dir
        )));
    }
    Ok(())
}

/// One bishop step. A horizontal request move of `δ` moves the server by
/// `(δ, −|δ|)` canonically at cost `2|δ|`; a vertical one leaves it still.
/// The step stops at the first coincidence, where the rook phase begins with
/// `offset_mag = |s_x|`, reflecting the frame across the y-axis if `s_x < 0`.
pub fn step_bishop(state: &EngineState, mv: &RequestSegment) -> Result<StepOutcome> {
    check_move(mv)?;
    if state.phase.kind != PhaseKind::Bishop {
        return Err(Error::InvariantBreach(
            "step_bishop outside a bishop phase".into(),
        ));
    }
    let mut phase = state.phase.clone();
    if state.server == state.request {
        // h = 0: orient the cycle so that the first move points down the
        // canonical y-axis, which the server can ignore.
        let down = Vector::int(0, -1);
        let perm = perm_mapping(&mv.dir, &down).expect("axis vectors map to -y");
        phase.frame = Frame::centered(perm, &state.request);
    }
    let frame = &phase.frame;
    let srv = frame.apply(&state.server);
    let req = frame.apply(&state.request);
    if srv.x != req.x || srv.y < req.y {
        return Err(Error::InvariantBreach(format!(
            "bishop server {srv} not above request {req} canonically"
        )));
    }
    let gap = &srv.y - &req.y;
    let cdir = frame.apply_vector(&mv.dir);
    let horizontal = !cdir.dx.is_zero();
    let closing = horizontal || cdir.dy.is_positive();
    let (consumed, meets) = if closing && gap <= mv.len {
        (gap, true)
    } else {
        (mv.len.clone(), false)
    };

    let request = &state.request + &mv.dir.scale(&consumed);
    let (server, cost_on) = if horizontal {
        let world = frame
            .invert()
            .apply_vector(&Vector::new(&cdir.dx * &consumed, -&consumed));
        (
            &state.server + &world,
            &state.cost_on + &(Scalar::from_int(2) * &consumed),
        )
    } else {
        (state.server.clone(), state.cost_on.clone())
    };
    phase.offset_mag = frame.apply(&server).x.abs();
    let arrived = EngineState {
        server,
        request,
        phase,
        cost_on,
        s: &state.s + &consumed,
    };
    let switched = if meets {
        let s_x = arrived.canonical_server().x;
        let frame = if s_x.is_negative() {
            Frame::new(SignedPerm::FlipX, Vector::zero()).compose(&arrived.phase.frame)
        } else {
            arrived.phase.frame.clone()
        };
        Some(EngineState {
            phase: Phase {
                kind: PhaseKind::Rook,
                frame,
                offset_mag: s_x.abs(),
            },
            ..arrived.clone()
        })
    } else {
        None
    };
    Ok(StepOutcome {
        arrived,
        consumed,
        switched,
    })
}

/// One rook step. Vertical request motion drags the server along at offset
/// rate `1 + √3`; motion to the right leaves it still; motion to the left
/// leaves it still until the request reaches it and then drags it at rate 1.
/// The step stops where the offset is used up, and a new cycle begins there.
pub fn step_rook(state: &EngineState, mv: &RequestSegment) -> Result<StepOutcome> {
    check_move(mv)?;
    if state.phase.kind != PhaseKind::Rook {
        return Err(Error::InvariantBreach(
            "step_rook outside a rook phase".into(),
        ));
    }
    let m = &state.phase.offset_mag;
    if !m.is_positive() {
        return Err(Error::InvariantBreach(
            "rook phase with exhausted offset".into(),
        ));
    }
    let frame = &state.phase.frame;
    let srv = frame.apply(&state.server);
    let req = frame.apply(&state.request);
    if srv.y != req.y || srv.x > req.x {
        return Err(Error::InvariantBreach(format!(
            "rook server {srv} not left of request {req} on its row"
        )));
    }
    let cdir = frame.apply_vector(&mv.dir);
    enum Motion {
        Still,
        Follow { rate: Scalar },
    }
    let (motion, limit) = if !cdir.dy.is_zero() {
        let rate = vertical_decay_rate();
        let limit = m / &rate;
        (Motion::Follow { rate }, Some(limit))
    } else if cdir.dx.is_positive() {
        (Motion::Still, None)
    } else if srv.x < req.x {
        let gap = &req.x - &srv.x;
        (Motion::Still, Some(gap))
    } else {
        (
            Motion::Follow {
                rate: Scalar::one(),
            },
            Some(m.clone()),
        )
    };
    let (consumed, hit_limit) = match limit {
        Some(l) if l <= mv.len => (l, true),
        _ => (mv.len.clone(), false),
    };
    let step = mv.dir.scale(&consumed);
    let request = &state.request + &step;
    let mut phase = state.phase.clone();
    let (server, cost_on, exhausted) = match &motion {
        Motion::Still => (state.server.clone(), state.cost_on.clone(), false),
        Motion::Follow { rate } => {
            phase.offset_mag = if hit_limit {
                Scalar::zero()
            } else {
                m - &(rate * &consumed)
            };
            (&state.server + &step, &state.cost_on + &consumed, hit_limit)
        }
    };
    let arrived = EngineState {
        server,
        request,
        phase,
        cost_on,
        s: &state.s + &consumed,
    };
    let switched = if exhausted {
        Some(EngineState {
            phase: start_cycle(&arrived.server, &arrived.request)?,
            ..arrived.clone()
        })
    } else {
        None
    };
    Ok(StepOutcome {
        arrived,
        consumed,
        switched,
    })
}

/// Incremental engine: feed request legs one at a time and inspect the
/// server between legs.
#[derive(Clone, Debug)]
pub struct BishopRook {
    state: EngineState,
    events: Vec<TraceEvent>,
}

impl BishopRook {
    pub fn new(start: Point) -> BishopRook {
        let state = EngineState::initial(start);
        let events = vec![TraceEvent::snapshot(&state, EventKind::CycleStart)];
        BishopRook { state, events }
    }

    pub fn state(&self) -> &EngineState {
        &self.state
    }

    pub fn server(&self) -> &Point {
        &self.state.server
    }

    pub fn cost(&self) -> &Scalar {
        &self.state.cost_on
    }

    pub fn events(&self) -> &[TraceEvent] {
        &self.events
    }

    /// Consumes one axis-parallel request leg.
    pub fn feed(&mut self, seg: &RequestSegment) -> Result<()> {
        if !seg.is_axis_parallel() {
            return Err(Error::InvalidArgument(
                "request legs must be axis-parallel".into(),
            ));
        }
        let dir = match seg.dir.axis() {
            Some(crate::geometry::Axis::X) => Vector::int(seg.dir.dx.signum() as i64, 0),
            _ => Vector::int(0, seg.dir.dy.signum() as i64),
        };
        let len = seg.displacement().l1_norm();
        let kind = if dir.dx.is_zero() {
            EventKind::RequestVertical
        } else {
            EventKind::RequestHorizontal
        };
        let mut remaining = len;
        while remaining.is_positive() {
            let mv = RequestSegment {
                dir: dir.clone(),
                len: remaining.clone(),
            };
            let out = match self.state.phase.kind {
                PhaseKind::Bishop => step_bishop(&self.state, &mv)?,
                PhaseKind::Rook => step_rook(&self.state, &mv)?,
            };
            if out.arrived.phase.frame != self.state.phase.frame
                && self.state.phase.kind == PhaseKind::Bishop
            {
                // Lazy orientation of an h = 0 cycle, decided at the same
                // instant the cycle began.
                let last = self.events.last_mut().expect("events start non-empty");
                debug_assert_eq!(last.kind, EventKind::CycleStart);
                debug_assert_eq!(last.s, self.state.s);
                last.frame = out.arrived.phase.frame.clone();
            }
            remaining -= &out.consumed;
            if out.consumed.is_positive() {
                self.events.push(TraceEvent::snapshot(&out.arrived, kind));
            }
            self.state = out.arrived;
            if let Some(next) = out.switched {
                self.enter(next)?;
            }
        }
        Ok(())
    }

    fn enter(&mut self, next: EngineState) -> Result<()> {
        match next.phase.kind {
            PhaseKind::Rook => {
                self.events
                    .push(TraceEvent::snapshot(&next, EventKind::PhaseSwitch));
                if next.phase.offset_mag.is_zero() {
                    let phase = start_cycle(&next.server, &next.request)?;
                    self.state = EngineState { phase, ..next };
                    self.events
                        .push(TraceEvent::snapshot(&self.state, EventKind::CycleStart));
                } else {
                    self.state = next;
                }
            }
            PhaseKind::Bishop => {
                self.state = next;
                self.events
                    .push(TraceEvent::snapshot(&self.state, EventKind::CycleStart));
            }
        }
        Ok(())
    }

    pub fn trace(&self) -> Trace {
        Trace {
            events: self.events.clone(),
            final_cost: self.state.cost_on.clone(),
        }
    }

    pub fn finish(self) -> Trace {
        Trace {
            final_cost: self.state.cost_on,
            events: self.events,
        }
    }
}

/// Runs the engine on an axis-parallel instance.
pub fn run(inst: &Instance) -> Result<Trace> {
    if let Some(i) = inst.first_diagonal() {
        return Err(Error::NotAxisParallel(i));
    }
    let mut engine = BishopRook::new(inst.start.clone());
    for seg in &inst.segments {
        engine.feed(seg)?;
    }
    Ok(engine.finish())
}

pub fn parse_trace(text: &str) -> Result<Trace> {
    crate::instance::from_json_text(text)
}

pub fn serialize_trace(trace: &Trace) -> String {
    crate::instance::to_json_text(trace)
}
