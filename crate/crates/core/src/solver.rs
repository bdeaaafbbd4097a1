//! Energy minimisation over the slot durations.
//!
//! With powers at their closed-form minima the energy depends on the
//! durations only. The two-slot objectives split into one term per slot, so
//! each slot is a 1-D problem; the frame budget couples them only when the
//! two unconstrained optima overrun the frame, in which case the search moves
//! to the line `t1 + t2 = T`. Every 1-D search is a coarse scan followed by
//! golden-section refinement around the best scan point.

use crate::error::{Error, Result};
use crate::feasibility::{tmin, BisectionConfig, FeasibleWindow};
use crate::model::{ee_from_energy, Scenario, Schedule, Strategy};
use crate::oracle::{self, OracleConfig};
use crate::strategies::{
    broadcast_draw_hd, broadcast_power_hd, energy_1ts, energy_2ts, energy_hd, forward_draw_2ts,
    forward_powers_2ts, powers_1ts, powers_2ts, powers_hd, reverse_draw_2ts, reverse_powers_2ts,
    uplink_draw_hd, uplink_powers_hd,
};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Golden-section bracket width at termination, as a fraction of the frame.
    pub duration_tol: f64,
    pub max_iters: usize,
    /// Points of the coarse scan that seeds each 1-D search.
    pub scan_points: usize,
    pub bisection: BisectionConfig,
    /// Cross-check the result against the brute-force oracle.
    pub oracle_check: bool,
    pub oracle: OracleConfig,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            duration_tol: 1e-7,
            max_iters: 300,
            scan_points: 64,
            bisection: BisectionConfig::default(),
            oracle_check: false,
            oracle: OracleConfig::default(),
        }
    }
}

fn finite(x: f64, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite { at: x })
    }
}

/// Golden-section search for the minimum of a unimodal `f` on `[lo, hi]`.
/// Returns `(x, f(x))`; the endpoints are compared at the end so boundary
/// minima come back exactly.
pub fn minimize_unimodal_1d(
    mut f: impl FnMut(f64) -> Result<f64>,
    lo: f64,
    hi: f64,
    tol: f64,
    max_iters: usize,
) -> Result<(f64, f64)> {
    if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::EmptyBracket { lo, hi });
    }
    let mut eval = |x: f64| -> Result<f64> { finite(x, f(x)?) };
    let (f_lo, f_hi) = (eval(lo)?, eval(hi)?);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (eval(c)?, eval(d)?);
    for _ in 0..max_iters {
        if b - a <= tol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d)?;
        }
    }
    let (mut x, mut fx) = if fc <= fd { (c, fc) } else { (d, fd) };
    if f_lo <= fx {
        (x, fx) = (lo, f_lo);
    }
    if f_hi < fx {
        (x, fx) = (hi, f_hi);
    }
    Ok((x, fx))
}

/// Coarse uniform scan, then golden-section inside the two cells around the
/// best scan point. Robust to mild non-unimodality.
pub fn minimize_scanned_1d(
    mut f: impl FnMut(f64) -> Result<f64>,
    lo: f64,
    hi: f64,
    scan_points: usize,
    tol: f64,
    max_iters: usize,
) -> Result<(f64, f64)> {
    if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::EmptyBracket { lo, hi });
    }
    let n = scan_points.max(3);
    let step = (hi - lo) / (n - 1) as f64;
    let at = |i: usize| if i == n - 1 { hi } else { lo + step * i as f64 };
    let mut best = (0usize, f64::INFINITY);
    for i in 0..n {
        let x = at(i);
        let v = finite(x, f(x)?)?;
        if v < best.1 {
            best = (i, v);
        }
    }
    let (a, b) = (at(best.0.saturating_sub(1)), at((best.0 + 1).min(n - 1)));
    let (x, fx) = minimize_unimodal_1d(&mut f, a, b, tol, max_iters)?;
    Ok(if fx <= best.1 {
        (x, fx)
    } else {
        (at(best.0), best.1)
    })
}

fn search(
    cfg: &SolverConfig,
    frame_t: f64,
    f: impl FnMut(f64) -> Result<f64>,
    lo: f64,
    hi: f64,
) -> Result<(f64, f64)> {
    minimize_scanned_1d(
        f,
        lo,
        hi,
        cfg.scan_points,
        cfg.duration_tol * frame_t,
        cfg.max_iters,
    )
}

/// Two separable slot costs `f1(t1) + f2(t2)` on the feasible window.
fn solve_separable(
    s: &Scenario,
    cfg: &SolverConfig,
    w: &FeasibleWindow,
    f1: impl Fn(f64) -> Result<f64>,
    f2: impl Fn(f64) -> Result<f64>,
) -> Result<(f64, f64)> {
    let t = s.frame_t;
    let (t1_hi, t2_hi) = (w.t1_max(t), w.t2_max(t));
    let (t1, _) = search(cfg, t, &f1, w.t_min_1, t1_hi)?;
    let (t2, _) = search(cfg, t, &f2, w.t_min_2, t2_hi)?;
    if t1 + t2 <= t {
        return Ok((t1, t2));
    }
    // Budget binds: search along t2 = T - t1.
    let rest = |t1: f64| (t - t1).max(w.t_min_2);
    let (t1, _) = search(cfg, t, |x| Ok(f1(x)? + f2(rest(x))?), w.t_min_1, t1_hi)?;
    Ok((t1, rest(t1)))
}

fn schedule(s: &Scenario, t1: f64, t2: f64, e_total: f64) -> Result<Schedule> {
    let mut sched = Schedule {
        strategy: s.strategy,
        t1,
        t2,
        p_a: 0.0,
        p_b: 0.0,
        p_r_fwd: 0.0,
        p_r_rev: 0.0,
        e_total,
        ee: ee_from_energy(s.r_fl, s.r_rl, s.frame_t, e_total)?,
        active_broadcast: None,
        oracle: None,
    };
    match s.strategy {
        Strategy::Fd2ts => {
            let p = powers_2ts(s, t1, t2);
            (sched.p_a, sched.p_b, sched.p_r_fwd, sched.p_r_rev) = (p.p_a, p.p_b, p.p_rb, p.p_ra);
        }
        Strategy::Fd1ts => {
            let p = powers_1ts(s, t1)?;
            (sched.p_a, sched.p_b, sched.p_r_fwd, sched.p_r_rev) = (p.p_a, p.p_b, p.p_r, p.p_r);
            sched.active_broadcast = Some(p.active);
        }
        Strategy::Hd2ts => {
            let p = powers_hd(s, t1, t2);
            (sched.p_a, sched.p_b, sched.p_r_fwd, sched.p_r_rev) = (p.p_a, p.p_b, p.p_r, p.p_r);
        }
    }
    Ok(sched)
}

pub fn solve_2ts(s: &Scenario, cfg: &SolverConfig, w: &FeasibleWindow) -> Result<Schedule> {
    let idle = s.idle_power();
    let f1 = |t: f64| {
        let (p_a, p_rb) = forward_powers_2ts(s, t);
        Ok((forward_draw_2ts(s, p_a, p_rb)? - idle) * t)
    };
    let f2 = |t: f64| {
        let (p_b, p_ra) = reverse_powers_2ts(s, t);
        Ok((reverse_draw_2ts(s, p_b, p_ra)? - idle) * t)
    };
    let (t1, t2) = solve_separable(s, cfg, w, f1, f2)?;
    schedule(s, t1, t2, energy_2ts(s, t1, t2)?)
}

pub fn solve_1ts(s: &Scenario, cfg: &SolverConfig, w: &FeasibleWindow) -> Result<Schedule> {
    let (t1, e) = search(cfg, s.frame_t, |t| energy_1ts(s, t), w.t_min_1, s.frame_t)?;
    schedule(s, t1, 0.0, e)
}

pub fn solve_hd(s: &Scenario, cfg: &SolverConfig, w: &FeasibleWindow) -> Result<Schedule> {
    let idle = s.idle_power();
    let f1 = |t: f64| {
        let (p_a, p_b) = uplink_powers_hd(s, t);
        Ok((uplink_draw_hd(s, p_a, p_b)? - idle) * t)
    };
    let f2 = |t: f64| Ok((broadcast_draw_hd(s, broadcast_power_hd(s, t))? - idle) * t);
    let (t1, t2) = solve_separable(s, cfg, w, f1, f2)?;
    schedule(s, t1, t2, energy_hd(s, t1, t2)?)
}

/// Energy-minimal schedule for the scenario's strategy.
///
/// Errors with [`Error::Infeasible`] when no durations meet the demands.
pub fn solve(s: &Scenario, cfg: &SolverConfig) -> Result<Schedule> {
    let w = tmin(s, &cfg.bisection)?;
    let mut sched = match s.strategy {
        Strategy::Fd2ts => solve_2ts(s, cfg, &w)?,
        Strategy::Fd1ts => solve_1ts(s, cfg, &w)?,
        Strategy::Hd2ts => solve_hd(s, cfg, &w)?,
    };
    if cfg.oracle_check {
        sched.oracle = Some(oracle::verify(s, &sched, &cfg.oracle));
    }
    Ok(sched)
}
