//! Test-side oracles, written against plain integers and independent of the
//! library's own algorithms.

#![allow(dead_code)]

use cnn_core::engine::{EventKind, PhaseKind, Trace};
use cnn_core::{Point, Scalar};

pub type P = (i64, i64);

fn aligned(a: P, b: P) -> bool {
    a.0 == b.0 || a.1 == b.1
}

/// Minimum cost over every frugal schedule, by exhaustive search: an
/// unserved request is met by a horizontal or a vertical $1 move.
pub fn frugal_exhaustive(start: P, reqs: &[P]) -> u64 {
    fn go(pos: P, reqs: &[P]) -> u64 {
        match reqs.split_first() {
            None => 0,
            Some((&r, rest)) => {
                if aligned(pos, r) {
                    go(pos, rest)
                } else {
                    let a = go((r.0, pos.1), rest);
                    let b = go((pos.0, r.1), rest);
                    1 + a.min(b)
                }
            }
        }
    }
    go(start, reqs)
}

/// Minimum cost when the server may make any number of $1 or $2 moves to any
/// grid point before each request (no frugality assumed).
pub fn unrestricted_grid_opt(start: P, reqs: &[P], grid: &[i64]) -> u64 {
    let pts: Vec<P> = grid
        .iter()
        .flat_map(|&x| grid.iter().map(move |&y| (x, y)))
        .chain(std::iter::once(start))
        .collect();
    let charge = |a: P, b: P| match (a.0 == b.0, a.1 == b.1) {
        (true, true) => 0u64,
        (false, false) => 2,
        _ => 1,
    };
    let inf = u64::MAX / 4;
    let mut best: Vec<u64> = pts
        .iter()
        .map(|&p| if p == start { 0 } else { inf })
        .collect();
    for &r in reqs {
        // Cheapest way to reach each point (one hop suffices: two $1 hops
        // cost the same as one $2 move).
        let mut reach = vec![inf; pts.len()];
        for (i, &p) in pts.iter().enumerate() {
            for (j, &q) in pts.iter().enumerate() {
                reach[j] = reach[j].min(best[i] + charge(p, q));
            }
        }
        best = reach
            .iter()
            .zip(&pts)
            .map(|(&c, &p)| if aligned(p, r) { c } else { inf })
            .collect();
    }
    best.into_iter().min().unwrap_or(0)
}

pub fn to_point(p: P) -> Point {
    Point::int(p.0, p.1)
}

pub fn to_points(ps: &[P]) -> Vec<Point> {
    ps.iter().map(|&p| to_point(p)).collect()
}

fn decay_rate() -> Scalar {
    Scalar::one() + Scalar::sqrt3()
}

/// Checks the engine's structural invariants on every piece of a trace:
/// 45° descent in the bishop phase, the rook row and left-of-request
/// conditions, offset decay at exactly the tabulated rates, zero offset at
/// each cycle start, and cost equal to the server's path length.
pub fn check_engine_invariants(trace: &Trace) -> Result<(), String> {
    let mut path = Scalar::zero();
    for e in &trace.events {
        if e.kind == EventKind::CycleStart && !e.offset_mag.is_zero() {
            return Err(format!(
                "cycle starts with offset {} at s = {}",
                e.offset_mag, e.s
            ));
        }
        if e.phase == PhaseKind::Rook {
            let srv = e.frame.apply(&e.server);
            let req = e.frame.apply(&e.request);
            if srv.y != req.y || srv.x > req.x {
                return Err(format!("rook invariant fails at s = {}", e.s));
            }
        }
    }
    for w in trace.events.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let dserver = &b.server - &a.server;
        path = &path + &dserver.l1_norm();
        if b.cost_on != path {
            return Err(format!(
                "cost {} differs from path length {path}",
                b.cost_on
            ));
        }
        if a.s == b.s {
            continue;
        }
        let frame = &b.frame;
        let ds = frame.apply_vector(&dserver);
        let dr = frame.apply_vector(&(&b.request - &a.request));
        let t = &b.s - &a.s;
        match b.phase {
            PhaseKind::Bishop => {
                if dr.dx.is_zero() {
                    if !ds.is_zero() {
                        return Err(format!(
                            "bishop server moves on a vertical leg at s = {}",
                            b.s
                        ));
                    }
                } else if ds.dx.abs() != ds.dy.abs() || ds.dy.is_positive() || ds.dx != dr.dx {
                    return Err(format!("bishop move is not a 45° descent at s = {}", b.s));
                }
            }
            PhaseKind::Rook => {
                let dm = &b.offset_mag - &a.offset_mag;
                let expected = if ds.is_zero() {
                    Scalar::zero()
                } else if !dr.dy.is_zero() {
                    -(decay_rate() * t.clone())
                } else if dr.dx.is_negative() {
                    -t.clone()
                } else {
                    return Err(format!("rook server moves right at s = {}", b.s));
                };
                if ds != dr && !ds.is_zero() {
                    return Err(format!(
                        "rook server does not move with the request at s = {}",
                        b.s
                    ));
                }
                if dm != expected {
                    return Err(format!(
                        "offset changes by {dm}, expected {expected} at s = {}",
                        b.s
                    ));
                }
            }
        }
    }
    if trace.final_cost != path {
        return Err("final cost differs from path length".into());
    }
    Ok(())
}

/// Every request sequence of length `len` over `grid²`.
pub fn all_sequences(grid: &[i64], len: usize) -> Vec<Vec<P>> {
    let pts: Vec<P> = grid
        .iter()
        .flat_map(|&x| grid.iter().map(move |&y| (x, y)))
        .collect();
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|seq: Vec<P>| {
                pts.iter().map(move |&p| {
                    let mut s = seq.clone();
                    s.push(p);
                    s
                })
            })
            .collect();
    }
    out
}
