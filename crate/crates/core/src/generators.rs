//! Named instances with bundled offline trajectories, interactive
//! adversaries, and seeded random orthogonal instances.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::engine::BishopRook;
use crate::error::{Error, Result};
use crate::geometry::{Frame, Point, SignedPerm, Vector};
use crate::instance::{rectify, AlignedTrajectory, Instance, RequestSegment};
use crate::monitor::ratio_bound;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Meta {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycles: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_ratio: Option<Scalar>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratedPair {
    pub instance: Instance,
    pub opt: AlignedTrajectory,
    pub meta: Meta,
}

pub fn parse_pair(text: &str) -> Result<GeneratedPair> {
    crate::instance::from_json_text(text)
}

pub fn serialize_pair(pair: &GeneratedPair) -> String {
    crate::instance::to_json_text(pair)
}

/// `(√3 − 1)/2 = 1/(1 + √3)`.
pub fn tight_step() -> Scalar {
    (Scalar::sqrt3() - Scalar::one()) / Scalar::from_int(2)
}

/// Collects request waypoints and offline breakpoints against a running arc
/// length.
struct Builder {
    waypoints: Vec<Point>,
    opt: Vec<(Scalar, Point)>,
    s: Scalar,
}

impl Builder {
    fn new(start: Point, opt_start: Point) -> Self {
        Builder {
            waypoints: vec![start],
            opt: vec![(Scalar::zero(), opt_start)],
            s: Scalar::zero(),
        }
    }

    fn request(&self) -> &Point {
        self.waypoints.last().expect("non-empty")
    }

    fn opt_pos(&self) -> &Point {
        &self.opt.last().expect("non-empty").1
    }

    /// Moves the request to `to` while the offline server moves linearly to
    /// `opt_to`.
    fn leg(&mut self, to: Point, opt_to: Point) {
        let len = crate::geometry::l1_distance(self.request(), &to);
        if len.is_zero() {
            return;
        }
        self.s = &self.s + &len;
        self.waypoints.push(to);
        self.opt.push((self.s.clone(), opt_to));
    }

    fn hold(&mut self, to: Point) {
        let here = self.opt_pos().clone();
        self.leg(to, here);
    }

    fn finish(self) -> Result<(Instance, AlignedTrajectory)> {
        let inst = Instance::from_waypoints(&self.waypoints)?;
        let opt = AlignedTrajectory::from_points(self.opt)?;
        Ok((inst, opt))
    }
}

fn require_cycles(cycles: usize) -> Result<()> {
    if cycles == 0 {
        return Err(Error::InvalidArgument("cycles must be at least 1".into()));
    }
    Ok(())
}

/// First tight sequence. In each cycle's own frame the request runs
/// `(0,1) → (0,0) → (1,0) → (1,c)` with `c = (√3 − 1)/2`, starting on the
/// online server; the offline server waits at `(0,0)` and rises to `(0,c)`
/// with the last leg. The end of a cycle is the start of the next one seen
/// through a quarter turn.
pub fn tight1(cycles: usize) -> Result<GeneratedPair> {
    require_cycles(cycles)?;
    let c = tight_step();
    let step = Frame::new(SignedPerm::Rot90, Vector::new(c.clone(), Scalar::zero()));
    let mut frame = Frame::identity();
    let mut b: Option<Builder> = None;
    for _ in 0..cycles {
        let world = frame.invert();
        let at = |x: Scalar, y: Scalar| world.apply(&Point::new(x, y));
        let origin = at(Scalar::zero(), Scalar::zero());
        let b = b
            .get_or_insert_with(|| Builder::new(at(Scalar::zero(), Scalar::one()), origin.clone()));
        b.hold(origin);
        b.hold(at(Scalar::one(), Scalar::zero()));
        b.leg(at(Scalar::one(), c.clone()), at(Scalar::zero(), c.clone()));
        frame = step.compose(&frame);
    }
    let (instance, opt) = b.expect("cycles ≥ 1").finish()?;
    Ok(GeneratedPair {
        instance,
        opt,
        meta: Meta {
            name: "tight1".into(),
            cycles: Some(cycles),
            seed: None,
            expected_ratio: Some(ratio_bound()),
        },
    })
}

/// Second tight sequence. After dropping from `(0,1)` to the origin, cycle
/// `k` (shifted by `k` along x) runs the request
/// `(0,0) → (1,0) → (1,−c) → (1,1) → (−c,1) → (1,1) → (1,0)`; the offline
/// server slides from `(0,1)` to `(1,1)` during the first leg and then stays.
pub fn tight2(cycles: usize) -> Result<GeneratedPair> {
    require_cycles(cycles)?;
    let c = tight_step();
    let mut b = Builder::new(Point::int(0, 1), Point::int(0, 1));
    b.hold(Point::int(0, 0));
    for k in 0..cycles as i64 {
        let x = |v: Scalar| v + Scalar::from_int(k);
        let p = |px: Scalar, py: Scalar| Point::new(x(px), py);
        let (zero, one) = (Scalar::zero(), Scalar::one());
        b.leg(p(one.clone(), zero.clone()), p(one.clone(), one.clone()));
        b.hold(p(one.clone(), -&c));
        b.hold(p(one.clone(), one.clone()));
        b.hold(p(-&c, one.clone()));
        b.hold(p(one.clone(), one.clone()));
        b.hold(p(one.clone(), zero.clone()));
    }
    let (instance, opt) = b.finish()?;
    Ok(GeneratedPair {
        instance,
        opt,
        meta: Meta {
            name: "tight2".into(),
            cycles: Some(cycles),
            seed: None,
            expected_ratio: Some(ratio_bound()),
        },
    })
}

/// Staircase step used by the unit-square scenarios.
pub fn square_epsilon() -> Scalar {
    Scalar::ratio(1, 4)
}

const FIG2_LOOPS: usize = 3;

/// The unit-square story: the request crosses from the top-left to the
/// bottom-right corner (as a staircase), then runs L-shaped loops over the
/// left and bottom edges. The offline server drops once to the bottom-left
/// corner and waits there.
pub fn fig2_scenario() -> Result<GeneratedPair> {
    let diag = Instance::new(
        Point::int(0, 1),
        vec![RequestSegment {
            dir: Vector::int(1, -1),
            len: Scalar::one(),
        }],
    )?;
    let stair = rectify(&diag, &square_epsilon())?;
    let mut b = Builder::new(Point::int(0, 1), Point::int(0, 1));
    for (_, p) in stair.knots().into_iter().skip(1) {
        let opt = Point::new(Scalar::zero(), p.y.clone());
        b.leg(p, opt);
    }
    for _ in 0..FIG2_LOOPS {
        for p in [(0, 0), (0, 1), (0, 0), (1, 0)] {
            b.hold(Point::int(p.0, p.1));
        }
    }
    let (instance, opt) = b.finish()?;
    Ok(GeneratedPair {
        instance,
        opt,
        meta: Meta {
            name: "fig2".into(),
            cycles: None,
            seed: None,
            expected_ratio: None,
        },
    })
}

/// The corner-committing online server of the same story: it follows the
/// request's x along the top edge to the top-right corner, comes back along
/// the top edge during the first L, and drops to the sweet spot on the way
/// down. Total cost 3.
pub fn fig2_corner_committing_online(inst: &Instance) -> Result<AlignedTrajectory> {
    let mut pts = Vec::new();
    let mut dropped = false;
    let mut prev: Option<Point> = None;
    for (s, r) in inst.knots() {
        let server = if dropped {
            Point::origin()
        } else if prev
            .as_ref()
            .is_some_and(|p| p.x.is_zero() && p.y == Scalar::one())
            && r == Point::origin()
        {
            dropped = true;
            Point::origin()
        } else {
            Point::new(r.x.clone(), Scalar::one())
        };
        pts.push((s, server));
        prev = Some(r);
    }
    AlignedTrajectory::from_points(pts)
}

/// An online algorithm for the continuous problem driven leg by leg.
pub trait ContinuousOnline {
    fn position(&self) -> Point;
    fn cost(&self) -> Scalar;
    fn advance(&mut self, seg: &RequestSegment) -> Result<()>;
}

impl ContinuousOnline for BishopRook {
    fn position(&self) -> Point {
        self.server().clone()
    }

    fn cost(&self) -> Scalar {
        BishopRook::cost(self).clone()
    }

    fn advance(&mut self, seg: &RequestSegment) -> Result<()> {
        self.feed(seg)
    }
}

/// Keeps whichever alignment it has: moves with the request only along the
/// coordinate it shares and would otherwise lose.
#[derive(Clone, Debug)]
pub struct GreedyFollower {
    server: Point,
    request: Point,
    cost: Scalar,
}

impl GreedyFollower {
    pub fn new(start: Point) -> Self {
        GreedyFollower {
            server: start.clone(),
            request: start,
            cost: Scalar::zero(),
        }
    }
}

impl ContinuousOnline for GreedyFollower {
    fn position(&self) -> Point {
        self.server.clone()
    }

    fn cost(&self) -> Scalar {
        self.cost.clone()
    }

    fn advance(&mut self, seg: &RequestSegment) -> Result<()> {
        let d = seg.displacement();
        let to = &self.request + &d;
        let horizontal = !d.dx.is_zero();
        let kept = if horizontal {
            self.server.y == self.request.y
        } else {
            self.server.x == self.request.x
        };
        if !kept {
            let moved = if horizontal {
                Point::new(to.x.clone(), self.server.y.clone())
            } else {
                Point::new(self.server.x.clone(), to.y.clone())
            };
            self.cost = &self.cost + &crate::geometry::l1_distance(&self.server, &moved);
            self.server = moved;
        }
        self.request = to;
        Ok(())
    }
}

/// Cap on the L-loops the continuous adversary spends homing the online
/// server into the sweet spot.
const MAX_HOMING_LOOPS: usize = 8;

/// Extends the request to `to`, tells the online server and checks that it
/// still serves the request.
fn feed(b: &mut Builder, online: &mut dyn ContinuousOnline, to: Point, opt: Point) -> Result<()> {
    let from = b.request().clone();
    b.leg(to.clone(), opt);
    if let Some(seg) = RequestSegment::between(&from, &to) {
        online.advance(&seg)?;
        let pos = online.position();
        if !pos.aligned(&to) {
            return Err(Error::Protocol(format!(
                "online server {pos} does not serve request {to}"
            )));
        }
    }
    Ok(())
}

/// Realized instance, bundled offline trajectory and the online cost paid
/// against it.
#[derive(Clone, Debug)]
pub struct AdversaryOutcome {
    pub pair: GeneratedPair,
    pub online_cost: Scalar,
}

/// Interactive unit-square adversary. Each cycle the request crosses the
/// square diagonally (as a staircase) from corner `C` to the opposite corner
/// `D`. Of the two corners adjacent to both, it picks the one farther from
/// the online server as the sweet spot `A`, walks to it along an edge and
/// runs L-loops over the two edges at `A` until the online server arrives
/// (or a loop cap is hit). The offline server follows the edge from `C`
/// towards `A` during the crossing and waits at `A` afterwards.
pub fn adversary_continuous(
    online: &mut dyn ContinuousOnline,
    cycles: usize,
) -> Result<AdversaryOutcome> {
    let start = online.position();
    let mut b = Builder::new(start.clone(), start.clone());
    let eps = square_epsilon();
    let flip = |v: &Scalar| Scalar::one() - v.clone();
    for _ in 0..cycles {
        let c = b.request().clone();
        let d = Point::new(flip(&c.x), flip(&c.y));
        let diag = Instance::new(
            c.clone(),
            vec![RequestSegment {
                dir: &d - &c,
                len: Scalar::one(),
            }],
        )?;
        let stair = rectify(&diag, &eps)?;
        let here = online.position();
        let a1 = Point::new(d.x.clone(), c.y.clone());
        let a2 = Point::new(c.x.clone(), d.y.clone());
        let dist = |p: &Point| crate::geometry::l1_distance(p, &here);
        let (sweet, along_x) = if dist(&a1) >= dist(&a2) {
            (a1, true)
        } else {
            (a2, false)
        };
        for (_, p) in stair.knots().into_iter().skip(1) {
            let opt = if along_x {
                Point::new(p.x.clone(), c.y.clone())
            } else {
                Point::new(c.x.clone(), p.y.clone())
            };
            feed(&mut b, online, p, opt)?;
        }
        feed(&mut b, online, sweet.clone(), sweet.clone())?;
        let arms = [
            Point::new(flip(&sweet.x), sweet.y.clone()),
            Point::new(sweet.x.clone(), flip(&sweet.y)),
        ];
        for _ in 0..MAX_HOMING_LOOPS {
            if online.position() == sweet {
                break;
            }
            for tip in &arms {
                feed(&mut b, online, tip.clone(), sweet.clone())?;
                feed(&mut b, online, sweet.clone(), sweet.clone())?;
            }
        }
    }
    let (instance, opt) = b.finish()?;
    Ok(AdversaryOutcome {
        pair: GeneratedPair {
            instance,
            opt,
            meta: Meta {
                name: "adversary".into(),
                cycles: Some(cycles),
                seed: None,
                expected_ratio: None,
            },
        },
        online_cost: online.cost(),
    })
}

/// Seeded random axis-parallel instance from the origin with endpoints on
/// the half-integer grid inside `[−bound, bound]²`, plus a random feasible
/// offline trajectory. The offline server splits each request leg into up to
/// three pieces; on each piece it either keeps the alignment it can keep for
/// free (roaming along the shared line or waiting) or tracks the request's
/// moving coordinate while drifting in the other one.
pub fn random_orthogonal(seed: u64, n_segments: usize, bound: u32) -> Result<GeneratedPair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = 2 * i64::from(bound.max(1));
    let coord = |rng: &mut ChaCha8Rng| Scalar::ratio(rng.random_range(-half..=half), 2);
    let start = Point::origin();
    let mut b = Builder::new(start.clone(), start);
    for _ in 0..n_segments {
        let r = b.request().clone();
        let horizontal: bool = rng.random();
        let to = loop {
            let v = coord(&mut rng);
            let cand = if horizontal {
                Point::new(v, r.y.clone())
            } else {
                Point::new(r.x.clone(), v)
            };
            if cand != r {
                break cand;
            }
        };
        let pieces = rng.random_range(1..=3i64);
        let mut cuts: Vec<i64> = (1..pieces).map(|_| rng.random_range(1..4i64)).collect();
        cuts.sort();
        cuts.dedup();
        cuts.push(4);
        for cut in cuts {
            let t = Scalar::ratio(cut, 4);
            let target = r.lerp(&to, &t);
            let q = b.opt_pos().clone();
            // Along a horizontal leg the shared row is free to roam and the
            // shared column must be tracked; mirrored for vertical legs.
            let (free, tracked) = if horizontal {
                (q.y == target.y, q.x == b.request().x)
            } else {
                (q.x == target.x, q.y == b.request().y)
            };
            let roam = free && (!tracked || rng.random::<bool>());
            let lazy = rng.random_ratio(1, 2);
            let v = coord(&mut rng);
            let opt_to = match (horizontal, roam) {
                (_, true) if lazy => q.clone(),
                (true, true) => Point::new(v, q.y.clone()),
                (false, true) => Point::new(q.x.clone(), v),
                (true, false) => Point::new(target.x.clone(), if lazy { q.y.clone() } else { v }),
                (false, false) => Point::new(if lazy { q.x.clone() } else { v }, target.y.clone()),
            };
            b.leg(target, opt_to);
        }
    }
    let (instance, opt) = b.finish()?;
    Ok(GeneratedPair {
        instance,
        opt,
        meta: Meta {
            name: "random".into(),
            cycles: None,
            seed: Some(seed),
            expected_ratio: None,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::run;
    use crate::instance::validate_alignment;

    fn feasible(pair: &GeneratedPair) -> bool {
        validate_alignment(&pair.opt, &pair.instance)
            .unwrap()
            .feasible
    }

    #[test]
    fn tight1_one_cycle() {
        let p = tight1(1).unwrap();
        let c = tight_step();
        assert_eq!(p.instance.total_length(), Scalar::from_int(2) + c.clone());
        assert_eq!(p.opt.length(), c.clone());
        assert_eq!(
            run(&p.instance).unwrap().final_cost,
            Scalar::from_int(2) + c
        );
        assert!(feasible(&p));
        assert!(tight1(0).is_err());
    }

    #[test]
    fn tight1_cycles_chain() {
        let p = tight1(4).unwrap();
        assert!(feasible(&p));
        let c = tight_step();
        assert_eq!(p.opt.length(), Scalar::from_int(4) * c.clone());
        let t = run(&p.instance).unwrap();
        assert_eq!(
            t.final_cost,
            Scalar::from_int(4) * (Scalar::from_int(2) + c)
        );
    }

    #[test]
    fn tight2_one_cycle() {
        let p = tight2(1).unwrap();
        assert!(feasible(&p));
        assert_eq!(p.opt.length(), Scalar::one());
        let t = run(&p.instance).unwrap();
        assert_eq!(t.final_cost, ratio_bound());
        let last = t.last();
        assert_eq!(last.server, Point::int(1, 1));
        assert_eq!(p.opt.end(), Point::int(1, 1));
    }

    #[test]
    fn fig2_story() {
        let p = fig2_scenario().unwrap();
        assert!(feasible(&p));
        assert_eq!(p.opt.length(), Scalar::one());
        let committed = fig2_corner_committing_online(&p.instance).unwrap();
        assert!(
            validate_alignment(&committed, &p.instance)
                .unwrap()
                .feasible
        );
        assert_eq!(committed.length(), Scalar::from_int(3));
    }

    #[test]
    fn random_is_deterministic_and_feasible() {
        let a = random_orthogonal(7, 12, 3).unwrap();
        assert_eq!(a, random_orthogonal(7, 12, 3).unwrap());
        assert_ne!(a, random_orthogonal(8, 12, 3).unwrap());
        assert!(feasible(&a));
        let e = random_orthogonal(1, 0, 3).unwrap();
        assert!(e.instance.segments.is_empty());
        assert!(e.opt.length().is_zero());
    }

    #[test]
    fn adversary_empty_and_small() {
        let mut br = BishopRook::new(Point::origin());
        let out = adversary_continuous(&mut br, 0).unwrap();
        assert!(out.pair.instance.segments.is_empty());
        let mut br = BishopRook::new(Point::origin());
        let out = adversary_continuous(&mut br, 3).unwrap();
        assert!(feasible(&out.pair));
        assert!(out.pair.opt.length() <= Scalar::from_int(3));
        assert_eq!(run(&out.pair.instance).unwrap().final_cost, out.online_cost);
    }

    #[test]
    fn pair_json_round_trip() {
        let p = tight2(2).unwrap();
        assert_eq!(parse_pair(&serialize_pair(&p)).unwrap(), p);
    }
}
