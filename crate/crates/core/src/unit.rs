//! The unit-cost CNN problem: every axis-parallel move costs $1 whatever its
//! length, a move with both components costs $2.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;

/// Default cap on the number of requests the brute-force optimum accepts.
pub const DEFAULT_OPT_LIMIT: usize = 14;

pub fn move_charge(from: &Point, to: &Point) -> u64 {
    match (from.x == to.x, from.y == to.y) {
        (true, true) => 0,
        (true, false) | (false, true) => 1,
        (false, false) => 2,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitMove {
    pub request: usize,
    pub from: Point,
    pub to: Point,
    pub charge: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub request: Point,
    pub online_position: Point,
    pub charge: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitRun {
    pub moves: Vec<UnitMove>,
    pub dollars: u64,
    pub transcript: Vec<TranscriptEntry>,
}

/// An online unit-CNN algorithm driven one request at a time.
pub trait UnitOnline {
    fn position(&self) -> &Point;
    fn dollars(&self) -> u64;
    /// Serves `request`, returning the charge paid for it.
    fn serve(&mut self, request: &Point) -> Result<u64>;
}

fn drive(algo: &mut dyn UnitOnline, requests: &[Point]) -> Result<UnitRun> {
    let mut moves = Vec::new();
    let mut transcript = Vec::with_capacity(requests.len());
    for (i, r) in requests.iter().enumerate() {
        let from = algo.position().clone();
        let charge = algo.serve(r)?;
        let to = algo.position().clone();
        if !to.aligned(r) {
            return Err(Error::Protocol(format!("request {i} left unserved")));
        }
        if charge > 0 {
            moves.push(UnitMove {
                request: i,
                from,
                to: to.clone(),
                charge,
            });
        }
        transcript.push(TranscriptEntry {
            request: r.clone(),
            online_position: to,
            charge,
        });
    }
    Ok(UnitRun {
        moves,
        dollars: algo.dollars(),
        transcript,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
enum CycleState {
    Fresh,
    AwaitSecond { r1: Point },
    SameRow { y1: crate::scalar::Scalar },
    TwoCandidates { r1: Point, r2: Point },
    Parked { spot: Point },
}

/// The cycle algorithm: align with the first request's column, step to the
/// second request's row, then commit to the sweet spot the third request
/// reveals. Spends at most $4 per cycle.
#[derive(Clone, Debug)]
pub struct Sweet4 {
    pos: Point,
    dollars: u64,
    state: CycleState,
    cycle_cost: u64,
    cycle_costs: Vec<u64>,
}

impl Sweet4 {
    pub fn new(start: Point) -> Self {
        Sweet4 {
            pos: start,
            dollars: 0,
            state: CycleState::Fresh,
            cycle_cost: 0,
            cycle_costs: Vec::new(),
        }
    }

    /// Cost of every cycle so far, the running one last.
    pub fn cycle_costs(&self) -> Vec<u64> {
        let mut out = self.cycle_costs.clone();
        if self.state != CycleState::Fresh || self.cycle_cost > 0 {
            out.push(self.cycle_cost);
        }
        out
    }

    fn go(&mut self, to: Point) -> Result<u64> {
        let c = move_charge(&self.pos, &to);
        self.pos = to;
        self.dollars += c;
        self.cycle_cost += c;
        if self.cycle_cost > 4 {
            return Err(Error::InvariantBreach(format!(
                "cycle spent ${}",
                self.cycle_cost
            )));
        }
        Ok(c)
    }

    fn end_cycle(&mut self) {
        self.cycle_costs.push(self.cycle_cost);
        self.cycle_cost = 0;
        self.state = CycleState::Fresh;
    }
}

impl UnitOnline for Sweet4 {
    fn position(&self) -> &Point {
        &self.pos
    }

    fn dollars(&self) -> u64 {
        self.dollars
    }

    fn serve(&mut self, r: &Point) -> Result<u64> {
        match self.state.clone() {
            CycleState::Fresh => {
                let c = self.go(Point::new(r.x.clone(), self.pos.y.clone()))?;
                self.state = CycleState::AwaitSecond { r1: r.clone() };
                Ok(c)
            }
            CycleState::AwaitSecond { r1 } => {
                if r.x == r1.x {
                    return Ok(0);
                }
                let c = self.go(Point::new(r1.x.clone(), r.y.clone()))?;
                self.state = if r.y == r1.y {
                    CycleState::SameRow { y1: r1.y }
                } else {
                    CycleState::TwoCandidates { r1, r2: r.clone() }
                };
                Ok(c)
            }
            CycleState::SameRow { y1 } => {
                if self.pos.aligned(r) {
                    return Ok(0);
                }
                let spot = Point::new(r.x.clone(), y1);
                let c = self.go(spot.clone())?;
                self.state = CycleState::Parked { spot };
                Ok(c)
            }
            CycleState::TwoCandidates { r1, r2 } => {
                let here = self.pos.clone();
                let other = Point::new(r2.x.clone(), r1.y.clone());
                match (here.aligned(r), other.aligned(r)) {
                    (true, true) => Ok(0),
                    (true, false) => {
                        self.state = CycleState::Parked { spot: here };
                        Ok(0)
                    }
                    (false, true) => {
                        let c = self.go(other.clone())?;
                        self.state = CycleState::Parked { spot: other };
                        Ok(c)
                    }
                    (false, false) => {
                        self.end_cycle();
                        self.serve(r)
                    }
                }
            }
            CycleState::Parked { .. } => {
                if self.pos.aligned(r) {
                    return Ok(0);
                }
                self.end_cycle();
                self.serve(r)
            }
        }
    }
}

/// For orthogonal request sequences: stay while aligned, otherwise step to
/// the previous request.
#[derive(Clone, Debug)]
pub struct Ortho3 {
    pos: Point,
    dollars: u64,
    last: Option<Point>,
    count: usize,
}

impl Ortho3 {
    pub fn new(start: Point) -> Self {
        Ortho3 {
            pos: start,
            dollars: 0,
            last: None,
            count: 0,
        }
    }
}

impl UnitOnline for Ortho3 {
    fn position(&self) -> &Point {
        &self.pos
    }

    fn dollars(&self) -> u64 {
        self.dollars
    }

    fn serve(&mut self, r: &Point) -> Result<u64> {
        let index = self.count;
        if let Some(prev) = &self.last {
            if prev == r || !prev.aligned(r) {
                return Err(Error::NonOrthogonal { index });
            }
        }
        self.count += 1;
        let target = if self.pos.aligned(r) {
            self.pos.clone()
        } else {
            match &self.last {
                Some(prev) => prev.clone(),
                None => Point::new(r.x.clone(), self.pos.y.clone()),
            }
        };
        let c = move_charge(&self.pos, &target);
        self.pos = target;
        self.dollars += c;
        self.last = Some(r.clone());
        Ok(c)
    }
}

pub fn sweet4_run(start: &Point, requests: &[Point]) -> Result<UnitRun> {
    drive(&mut Sweet4::new(start.clone()), requests)
}

pub fn ortho3_run(start: &Point, requests: &[Point]) -> Result<UnitRun> {
    drive(&mut Ortho3::new(start.clone()), requests)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptResult {
    pub dollars: u64,
    /// Server position after each request on one optimal schedule.
    pub positions: Vec<Point>,
}

pub fn bruteforce_opt(start: &Point, requests: &[Point]) -> Result<OptResult> {
    bruteforce_opt_with_limit(start, requests, DEFAULT_OPT_LIMIT)
}

/// Exact offline optimum over lazy, frugal schedules: the server moves only
/// when the request is unserved, and then by one axis move onto the
/// request's row or column. Dynamic program over reachable positions; ties
/// go to the lexicographically smallest position.
pub fn bruteforce_opt_with_limit(
    start: &Point,
    requests: &[Point],
    limit: usize,
) -> Result<OptResult> {
    if requests.len() > limit {
        return Err(Error::SequenceTooLong {
            len: requests.len(),
            limit,
        });
    }
    // layers[i] maps a position after request i to (cost, predecessor).
    let mut layers: Vec<BTreeMap<Point, (u64, Point)>> = Vec::with_capacity(requests.len());
    let mut frontier: BTreeMap<Point, u64> = BTreeMap::from([(start.clone(), 0)]);
    for r in requests {
        let mut next: BTreeMap<Point, (u64, Point)> = BTreeMap::new();
        let mut relax = |q: Point, cost: u64, from: &Point| match next.get(&q) {
            Some((c, p)) if (*c, p) <= (cost, from) => {}
            _ => {
                next.insert(q, (cost, from.clone()));
            }
        };
        for (p, &c) in &frontier {
            if p.aligned(r) {
                relax(p.clone(), c, p);
            } else {
                relax(Point::new(r.x.clone(), p.y.clone()), c + 1, p);
                relax(Point::new(p.x.clone(), r.y.clone()), c + 1, p);
            }
        }
        frontier = next.iter().map(|(q, (c, _))| (q.clone(), *c)).collect();
        layers.push(next);
    }
    let Some(last) = layers.last() else {
        return Ok(OptResult {
            dollars: 0,
            positions: Vec::new(),
        });
    };
    let (best, &(dollars, _)) = last
        .iter()
        .min_by(|a, b| (a.1 .0, a.0).cmp(&(b.1 .0, b.0)))
        .expect("some position serves every request");
    let mut pos = best.clone();
    let mut positions = vec![pos.clone()];
    for layer in layers[1..].iter().rev() {
        pos = layer[&pos].1.clone();
        positions.push(pos.clone());
    }
    positions.reverse();
    Ok(OptResult { dollars, positions })
}

/// Adversary on the unit square: each request is the vertex
/// diagonally opposite the online server. When the server sits on the
/// previous request, an adjacent vertex is requested first so that the
/// stream stays orthogonal.
pub fn adversary_unit_square(
    online: &mut dyn UnitOnline,
    rounds: usize,
) -> Result<(Vec<Point>, UnitRun)> {
    let mut requests: Vec<Point> = Vec::with_capacity(rounds);
    let mut moves = Vec::new();
    let mut transcript = Vec::with_capacity(rounds);
    let zero = crate::scalar::Scalar::zero();
    let one = crate::scalar::Scalar::one();
    let flip = |v: &crate::scalar::Scalar| {
        if v.is_zero() {
            one.clone()
        } else {
            zero.clone()
        }
    };
    while requests.len() < rounds {
        let pos = online.position().clone();
        let on_vertex = |v: &crate::scalar::Scalar| v.is_zero() || *v == one;
        if !on_vertex(&pos.x) || !on_vertex(&pos.y) {
            return Err(Error::Protocol(format!(
                "server at {pos} is not a square vertex"
            )));
        }
        let opposite = Point::new(flip(&pos.x), flip(&pos.y));
        let r = match requests.last() {
            Some(prev) if !prev.aligned(&opposite) => Point::new(flip(&pos.x), pos.y.clone()),
            _ => opposite,
        };
        let i = requests.len();
        let from = pos;
        let charge = online.serve(&r)?;
        let to = online.position().clone();
        if !to.aligned(&r) {
            return Err(Error::Protocol(format!("request {i} left unserved")));
        }
        if charge > 0 {
            moves.push(UnitMove {
                request: i,
                from,
                to: to.clone(),
                charge,
            });
        }
        transcript.push(TranscriptEntry {
            request: r.clone(),
            online_position: to,
            charge,
        });
        requests.push(r);
    }
    let run = UnitRun {
        moves,
        dollars: online.dollars(),
        transcript,
    };
    Ok((requests, run))
}

/// Checks that consecutive requests share a coordinate and differ.
pub fn check_orthogonal(requests: &[Point]) -> Result<()> {
    for (i, w) in requests.windows(2).enumerate() {
        if w[0] == w[1] || !w[0].aligned(&w[1]) {
            return Err(Error::NonOrthogonal { index: i + 1 });
        }
    }
    Ok(())
}

pub fn parse_requests(text: &str) -> Result<Vec<Point>> {
    crate::instance::from_json_text(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[(i64, i64)]) -> Vec<Point> {
        v.iter().map(|&(x, y)| Point::int(x, y)).collect()
    }

    #[test]
    fn charges() {
        let o = Point::origin();
        assert_eq!(move_charge(&o, &o), 0);
        assert_eq!(move_charge(&o, &Point::int(0, 9)), 1);
        assert_eq!(move_charge(&o, &Point::int(1, 1)), 2);
    }

    #[test]
    fn sweet4_one_column() {
        let reqs = pts(&[(3, 0), (3, 5), (3, -2), (3, 7)]);
        assert!(sweet4_run(&Point::origin(), &reqs).unwrap().dollars <= 1);
    }

    #[test]
    fn sweet4_full_second_case_cycle() {
        // r1 = (1, 0), r2 = (2, 3), r3 shares x with r2 but not with the
        // server at (1, 3).
        let reqs = pts(&[(1, 0), (2, 3), (2, 7)]);
        let mut algo = Sweet4::new(Point::int(0, 5));
        let run = drive(&mut algo, &reqs).unwrap();
        assert_eq!(run.dollars, 4);
        assert_eq!(algo.position(), &Point::int(2, 0));
    }

    #[test]
    fn ortho3_row() {
        let reqs = pts(&[(1, 0), (4, 0), (-2, 0), (7, 0)]);
        let run = ortho3_run(&Point::int(0, 3), &reqs).unwrap();
        assert!(run.moves.iter().all(|m| m.request <= 1));
        assert_eq!(run.transcript[1].online_position, Point::int(1, 0));
    }

    #[test]
    fn ortho3_lands_on_previous_requests() {
        let reqs = pts(&[(0, 1), (1, 1), (1, 0), (2, 0), (2, 2), (0, 2)]);
        let run = ortho3_run(&Point::origin(), &reqs).unwrap();
        for m in &run.moves[1..] {
            assert!(reqs[..m.request].contains(&m.to));
        }
        assert!(matches!(
            ortho3_run(&Point::origin(), &pts(&[(0, 1), (1, 2)])),
            Err(Error::NonOrthogonal { index: 1 })
        ));
    }

    #[test]
    fn opt_small_cases() {
        let o = Point::origin();
        assert_eq!(bruteforce_opt(&o, &[]).unwrap().dollars, 0);
        assert_eq!(bruteforce_opt(&o, &pts(&[(0, 5)])).unwrap().dollars, 0);
        assert_eq!(bruteforce_opt(&o, &pts(&[(4, 5)])).unwrap().dollars, 1);
        let res = bruteforce_opt(&o, &pts(&[(4, 5), (4, 9), (1, 5)])).unwrap();
        assert_eq!(res.dollars, 2);
        let res = bruteforce_opt(&o, &pts(&[(4, 5), (4, 9), (4, -1)])).unwrap();
        assert_eq!(res.dollars, 1);
        assert_eq!(res.positions, pts(&[(4, 0), (4, 0), (4, 0)]));
        assert_eq!(res.positions.len(), 3);
        let long = vec![Point::int(1, 1); 15];
        assert!(matches!(
            bruteforce_opt(&o, &long),
            Err(Error::SequenceTooLong { len: 15, limit: 14 })
        ));
    }

    #[test]
    fn adversary_against_ortho3() {
        let mut algo = Ortho3::new(Point::origin());
        let (reqs, run) = adversary_unit_square(&mut algo, 30).unwrap();
        assert_eq!(run.dollars, 30);
        check_orthogonal(&reqs).unwrap();
        let opt = bruteforce_opt_with_limit(&Point::origin(), &reqs, 30).unwrap();
        assert!(opt.dollars <= 10);
        let (empty, _) = adversary_unit_square(&mut Ortho3::new(Point::origin()), 0).unwrap();
        assert!(empty.is_empty());
    }
}
