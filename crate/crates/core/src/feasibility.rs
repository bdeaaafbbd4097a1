//! Minimal slot durations.
//!
//! Every minimal power is strictly decreasing in its slot duration, so the
//! shortest admissible duration is found by bisection on "all powers within
//! their caps". A scenario is infeasible when even the whole frame does not
//! suffice, or when the two-slot minima do not fit in one frame together.

use crate::error::{Error, InfeasibleCause, Result};
use crate::model::{Node, Scenario, Strategy};
use crate::strategies::{
    broadcast_power_hd, forward_powers_2ts, powers_1ts, reverse_powers_2ts, uplink_powers_hd,
};

/// Bisection settings, as fractions of the frame duration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BisectionConfig {
    /// Absolute bracket width at termination.
    pub tol: f64,
    pub max_iters: usize,
    /// Durations below this are never considered.
    pub floor: f64,
}

impl Default for BisectionConfig {
    fn default() -> Self {
        BisectionConfig {
            tol: 1e-9,
            max_iters: 200,
            floor: 1e-6,
        }
    }
}

/// The bracket is also narrowed to this fraction of the result, so that
/// `t_min * (1 - 1e-6)` is reliably infeasible even for tiny `t_min`.
const REL_TOL: f64 = 1e-9;

/// What pins a minimal duration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Binding {
    PowerCap(Node),
    Cancellation,
    /// Nothing binds above the duration floor.
    Floor,
}

/// Lower bounds on the decision durations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibleWindow {
    pub strategy: Strategy,
    pub t_min_1: f64,
    /// Zero for the single-slot strategy.
    pub t_min_2: f64,
    pub binding_1: Binding,
    pub binding_2: Option<Binding>,
}

impl FeasibleWindow {
    /// Upper end of the first duration's range.
    pub fn t1_max(&self, frame_t: f64) -> f64 {
        frame_t - self.t_min_2
    }

    pub fn t2_max(&self, frame_t: f64) -> f64 {
        frame_t - self.t_min_1
    }
}

/// Smallest `t` in `[floor, frame]` with `ok(t)`, assuming `ok` is monotone.
/// `None` when `ok(frame)` fails. Returns the feasible end of the bracket.
pub fn smallest_feasible(
    ok: impl Fn(f64) -> bool,
    frame_t: f64,
    cfg: &BisectionConfig,
) -> Option<f64> {
    let (mut lo, mut hi) = (cfg.floor * frame_t, frame_t);
    if !ok(hi) {
        return None;
    }
    if ok(lo) {
        return Some(lo);
    }
    let abs_tol = cfg.tol * frame_t;
    for _ in 0..cfg.max_iters {
        let w = hi - lo;
        if w <= abs_tol && w <= REL_TOL * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// Minimal duration for a set of independent node constraints sharing one slot.
fn slot_min(
    s: &Scenario,
    cfg: &BisectionConfig,
    constraints: &[(Node, &dyn Fn(f64) -> bool)],
) -> Result<(f64, Binding)> {
    let floor = cfg.floor * s.frame_t;
    let mut best = (floor, Binding::Floor);
    for (node, ok) in constraints {
        let t = smallest_feasible(ok, s.frame_t, cfg)
            .ok_or(Error::Infeasible(InfeasibleCause::PowerCap(*node)))?;
        if t > best.0 {
            best = (t, Binding::PowerCap(*node));
        }
    }
    Ok(best)
}

fn within_budget(s: &Scenario, w: FeasibleWindow) -> Result<FeasibleWindow> {
    if w.t_min_1 + w.t_min_2 > s.frame_t {
        Err(Error::Infeasible(InfeasibleCause::FrameBudget {
            t_min_1: w.t_min_1,
            t_min_2: w.t_min_2,
        }))
    } else {
        Ok(w)
    }
}

pub fn tmin_2ts(s: &Scenario, cfg: &BisectionConfig) -> Result<FeasibleWindow> {
    let (pa, pr, pb) = (s.pa.a.p_max, s.pa.r.p_max, s.pa.b.p_max);
    let (t1, b1) = slot_min(
        s,
        cfg,
        &[
            (Node::A, &|t| forward_powers_2ts(s, t).0 <= pa),
            (Node::Relay, &|t| forward_powers_2ts(s, t).1 <= pr),
        ],
    )?;
    let (t2, b2) = slot_min(
        s,
        cfg,
        &[
            (Node::B, &|t| reverse_powers_2ts(s, t).0 <= pb),
            (Node::Relay, &|t| reverse_powers_2ts(s, t).1 <= pr),
        ],
    )?;
    within_budget(
        s,
        FeasibleWindow {
            strategy: Strategy::Fd2ts,
            t_min_1: t1,
            t_min_2: t2,
            binding_1: b1,
            binding_2: Some(b2),
        },
    )
}

/// Which constraint fails for the single-slot strategy at `t`, if any.
fn violation_1ts(s: &Scenario, t: f64) -> Option<Binding> {
    match powers_1ts(s, t) {
        Err(Error::InsufficientCancellation { .. }) => Some(Binding::Cancellation),
        Err(_) => Some(Binding::PowerCap(Node::A)),
        Ok(p) => [
            (Node::A, p.p_a / s.pa.a.p_max),
            (Node::B, p.p_b / s.pa.b.p_max),
            (Node::Relay, p.p_r / s.pa.r.p_max),
        ]
        .into_iter()
        .filter(|(_, ratio)| *ratio > 1.0)
        .max_by(|x, y| x.1.total_cmp(&y.1))
        .map(|(n, _)| Binding::PowerCap(n)),
    }
}

pub fn tmin_1ts(s: &Scenario, cfg: &BisectionConfig) -> Result<FeasibleWindow> {
    let Some(t) = smallest_feasible(|t| violation_1ts(s, t).is_none(), s.frame_t, cfg) else {
        let cause = match violation_1ts(s, s.frame_t) {
            Some(Binding::PowerCap(n)) => InfeasibleCause::PowerCap(n),
            _ => InfeasibleCause::InsufficientCancellation,
        };
        return Err(Error::Infeasible(cause));
    };
    let floor = cfg.floor * s.frame_t;
    let binding = if t <= floor {
        Binding::Floor
    } else {
        // Probe just below the minimum to name the constraint that bites.
        violation_1ts(s, t * (1.0 - 1e-6)).unwrap_or(Binding::Floor)
    };
    Ok(FeasibleWindow {
        strategy: Strategy::Fd1ts,
        t_min_1: t,
        t_min_2: 0.0,
        binding_1: binding,
        binding_2: None,
    })
}

pub fn tmin_hd(s: &Scenario, cfg: &BisectionConfig) -> Result<FeasibleWindow> {
    let (pa, pr, pb) = (s.pa.a.p_max, s.pa.r.p_max, s.pa.b.p_max);
    let (t1, b1) = slot_min(
        s,
        cfg,
        &[
            (Node::A, &|t| uplink_powers_hd(s, t).0 <= pa),
            (Node::B, &|t| uplink_powers_hd(s, t).1 <= pb),
        ],
    )?;
    let (t2, b2) = slot_min(
        s,
        cfg,
        &[(Node::Relay, &|t| broadcast_power_hd(s, t) <= pr)],
    )?;
    within_budget(
        s,
        FeasibleWindow {
            strategy: Strategy::Hd2ts,
            t_min_1: t1,
            t_min_2: t2,
            binding_1: b1,
            binding_2: Some(b2),
        },
    )
}

/// Feasible window for the scenario's own strategy.
pub fn tmin(s: &Scenario, cfg: &BisectionConfig) -> Result<FeasibleWindow> {
    s.validate()?;
    match s.strategy {
        Strategy::Fd1ts => tmin_1ts(s, cfg),
        Strategy::Fd2ts => tmin_2ts(s, cfg),
        Strategy::Hd2ts => tmin_hd(s, cfg),
    }
}
