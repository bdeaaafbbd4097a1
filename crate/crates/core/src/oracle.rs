//! Independent cross-checks of the closed-form solver.
//!
//! * [`grid_search`] brute-forces durations and per-node powers, judging rate
//!   feasibility with the capacity formulas only. Power grids start at the
//!   closed-form minimum, with a few probes just below it that must all turn
//!   out rate-infeasible.
//! * [`verify_necessary_conditions`] checks that the optimum keeps the right
//!   rate constraints tight.
//! * [`convexity_probe_1d`]/[`convexity_probe_2d`] sample central second
//!   differences; [`unimodality_probe`] is the weaker check used where the
//!   objective is only quasi-convex.

use crate::error::{Error, Result};
use crate::feasibility::{tmin, BisectionConfig};
use crate::model::{
    db_to_linear, defaults, link_gain, residual_self_gain, PaKind, Scenario, Schedule, Strategy,
};
use crate::strategies::{
    broadcast_draw_hd, broadcast_power_hd, caps_1ts, caps_2ts, caps_hd, energy_1ts, energy_2ts,
    energy_at_1ts, energy_hd, forward_draw_2ts, forward_powers_2ts, powers_1ts, reverse_draw_2ts,
    reverse_powers_2ts, uplink_draw_hd, uplink_powers_hd, LinkCapacities, Powers2ts, PowersHd,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Relative shortfall tolerated when a grid point is tested against a demand.
const RATE_TOL: f64 = 1e-9;
/// Multipliers of the closed-form power probed below the grid.
const BELOW_ANCHOR: [f64; 3] = [0.5, 0.9, 0.999];

#[derive(Debug, Clone, PartialEq)]
pub struct OracleConfig {
    /// Duration grid points per slot.
    pub n_t: usize,
    /// Power grid points per node.
    pub n_p: usize,
    /// Relative slack tolerated on constraints that must be tight.
    pub slack_tol: f64,
    /// Random second-difference probes of the objective.
    pub convexity_samples: usize,
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            n_t: 50,
            n_p: 20,
            slack_tol: 1e-9,
            convexity_samples: 200,
            seed: 0x5eed,
        }
    }
}

/// Best point found on the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub t1: f64,
    pub t2: f64,
    pub p_a: f64,
    pub p_b: f64,
    pub p_r_fwd: f64,
    pub p_r_rev: f64,
    pub energy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridOutcome {
    pub best: GridPoint,
    /// Grid points (durations x powers) evaluated.
    pub evaluated: usize,
    /// Of those, how many met every demand.
    pub feasible: usize,
    /// Feasible points with some power below its closed-form minimum. A
    /// non-zero count refutes the closed form.
    pub below_anchor_feasible: usize,
}

fn meets(c: f64, r: f64) -> bool {
    c >= r * (1.0 - RATE_TOL)
}

/// Candidate powers for one node: below-anchor probes, then a geometric grid
/// from the anchor up to `p_max`. The flag marks below-anchor entries.
fn power_axis(anchor: f64, p_max: f64, n: usize) -> Vec<(f64, bool)> {
    if !(anchor <= p_max) || !anchor.is_finite() {
        return Vec::new();
    }
    let mut out: Vec<(f64, bool)> = Vec::with_capacity(n + BELOW_ANCHOR.len());
    if anchor > 0.0 {
        out.extend(BELOW_ANCHOR.iter().map(|m| (anchor * m, true)));
    } else {
        out.push((0.0, false));
    }
    let start = if anchor > 0.0 { anchor } else { p_max * 1e-9 };
    let n = n.max(2);
    let ratio = p_max / start;
    for k in 0..n {
        let p = if k == n - 1 {
            p_max
        } else {
            start * ratio.powf(k as f64 / (n - 1) as f64)
        };
        out.push((p, false));
    }
    out
}

fn durations(s: &Scenario, n_t: usize) -> Vec<f64> {
    (1..=n_t)
        .map(|i| {
            if i == n_t {
                s.frame_t
            } else {
                s.frame_t * i as f64 / n_t as f64
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy)]
struct SlotBest {
    cost: f64,
    p1: f64,
    p2: f64,
}

/// Per-slot brute force for two-power slots: `cost(p1, p2)` is the slot's
/// energy above idle, `ok` the slot's rate test.
fn slot_grid(
    axis1: &[(f64, bool)],
    axis2: &[(f64, bool)],
    ok: impl Fn(f64, f64) -> bool,
    cost: impl Fn(f64, f64) -> Option<f64>,
    tally: &mut (usize, usize, usize),
) -> Option<SlotBest> {
    let mut best: Option<SlotBest> = None;
    for &(p1, below1) in axis1 {
        for &(p2, below2) in axis2 {
            tally.0 += 1;
            if !ok(p1, p2) {
                continue;
            }
            tally.1 += 1;
            if below1 || below2 {
                tally.2 += 1;
            }
            if let Some(c) = cost(p1, p2) {
                if best.is_none_or(|b| c < b.cost) {
                    best = Some(SlotBest { cost: c, p1, p2 });
                }
            }
        }
    }
    best
}

/// Combine per-slot optima under `t1 + t2 <= T`.
fn combine(
    s: &Scenario,
    ts: &[f64],
    first: &[Option<SlotBest>],
    second: &[Option<SlotBest>],
) -> Option<(usize, usize, f64)> {
    let n = ts.len();
    let mut best: Option<(usize, usize, f64)> = None;
    for (i, a) in first.iter().enumerate() {
        let Some(a) = a else { continue };
        // Durations are (i+1)T/n, so the budget allows j <= n - i - 2.
        for (j, b) in second.iter().enumerate().take(n.saturating_sub(i + 1)) {
            let Some(b) = b else { continue };
            let e = a.cost + b.cost + s.idle_power() * s.frame_t;
            if best.is_none_or(|x| e < x.2) {
                best = Some((i, j, e));
            }
        }
    }
    best
}

fn exact_anchor(s: &Scenario) -> Scenario {
    s.clone().with_asymptotic_1ts(false)
}

/// Exhaustive search over `n_t` durations per slot and `n_p` powers per node.
pub fn grid_search(s: &Scenario, n_t: usize, n_p: usize) -> Result<GridOutcome> {
    s.validate()?;
    let ts = durations(s, n_t);
    let idle = s.idle_power();
    let mut tally = (0usize, 0usize, 0usize);
    let best = match s.strategy {
        Strategy::Fd2ts => {
            let fwd: Vec<_> = ts
                .iter()
                .map(|&t| {
                    let (a0, r0) = forward_powers_2ts(s, t);
                    slot_grid(
                        &power_axis(a0, s.pa.a.p_max, n_p),
                        &power_axis(r0, s.pa.r.p_max, n_p),
                        |p_a, p_rb| {
                            let c = caps_2ts(
                                s,
                                t,
                                t,
                                &Powers2ts {
                                    p_a,
                                    p_rb,
                                    p_b: 0.0,
                                    p_ra: 0.0,
                                },
                            );
                            meets(c.c_ar, s.r_fl) && meets(c.c_rb, s.r_fl)
                        },
                        |p_a, p_rb| forward_draw_2ts(s, p_a, p_rb).ok().map(|d| (d - idle) * t),
                        &mut tally,
                    )
                })
                .collect();
            let rev: Vec<_> = ts
                .iter()
                .map(|&t| {
                    let (b0, r0) = reverse_powers_2ts(s, t);
                    slot_grid(
                        &power_axis(b0, s.pa.b.p_max, n_p),
                        &power_axis(r0, s.pa.r.p_max, n_p),
                        |p_b, p_ra| {
                            let c = caps_2ts(
                                s,
                                t,
                                t,
                                &Powers2ts {
                                    p_a: 0.0,
                                    p_rb: 0.0,
                                    p_b,
                                    p_ra,
                                },
                            );
                            meets(c.c_br, s.r_rl) && meets(c.c_ra, s.r_rl)
                        },
                        |p_b, p_ra| reverse_draw_2ts(s, p_b, p_ra).ok().map(|d| (d - idle) * t),
                        &mut tally,
                    )
                })
                .collect();
            combine(s, &ts, &fwd, &rev).map(|(i, j, e)| {
                let (f, r) = (fwd[i].unwrap(), rev[j].unwrap());
                GridPoint {
                    t1: ts[i],
                    t2: ts[j],
                    p_a: f.p1,
                    p_b: r.p1,
                    p_r_fwd: f.p2,
                    p_r_rev: r.p2,
                    energy: e,
                }
            })
        }
        Strategy::Hd2ts => {
            let up: Vec<_> = ts
                .iter()
                .map(|&t| {
                    let (a0, b0) = uplink_powers_hd(s, t);
                    slot_grid(
                        &power_axis(a0, s.pa.a.p_max, n_p),
                        &power_axis(b0, s.pa.b.p_max, n_p),
                        |p_a, p_b| {
                            let c = caps_hd(s, t, t, &PowersHd { p_a, p_b, p_r: 0.0 });
                            meets(c.c_ar, s.r_fl) && meets(c.c_br, s.r_rl)
                        },
                        |p_a, p_b| uplink_draw_hd(s, p_a, p_b).ok().map(|d| (d - idle) * t),
                        &mut tally,
                    )
                })
                .collect();
            let down: Vec<_> = ts
                .iter()
                .map(|&t| {
                    let r0 = broadcast_power_hd(s, t);
                    slot_grid(
                        &power_axis(r0, s.pa.r.p_max, n_p),
                        &[(0.0, false)],
                        |p_r, _| {
                            let c = caps_hd(
                                s,
                                t,
                                t,
                                &PowersHd {
                                    p_a: 1.0,
                                    p_b: 1.0,
                                    p_r,
                                },
                            );
                            meets(c.c_rb, s.r_fl) && meets(c.c_ra, s.r_rl)
                        },
                        |p_r, _| broadcast_draw_hd(s, p_r).ok().map(|d| (d - idle) * t),
                        &mut tally,
                    )
                })
                .collect();
            combine(s, &ts, &up, &down).map(|(i, j, e)| {
                let (u, d) = (up[i].unwrap(), down[j].unwrap());
                GridPoint {
                    t1: ts[i],
                    t2: ts[j],
                    p_a: u.p1,
                    p_b: u.p2,
                    p_r_fwd: d.p1,
                    p_r_rev: d.p1,
                    energy: e,
                }
            })
        }
        Strategy::Fd1ts => {
            let anchor = exact_anchor(s);
            let mut best: Option<GridPoint> = None;
            for &t in &ts {
                let Ok(p0) = powers_1ts(&anchor, t) else {
                    continue;
                };
                let ax_a = power_axis(p0.p_a, s.pa.a.p_max, n_p);
                let ax_b = power_axis(p0.p_b, s.pa.b.p_max, n_p);
                let ax_r = power_axis(p0.p_r, s.pa.r.p_max, n_p);
                for &(p_r, br) in &ax_r {
                    for &(p_a, ba) in &ax_a {
                        for &(p_b, bb) in &ax_b {
                            tally.0 += 1;
                            let c = caps_1ts(s, t, p_a, p_b, p_r);
                            if !all_met(s, &c) {
                                continue;
                            }
                            tally.1 += 1;
                            if ba || bb || br {
                                tally.2 += 1;
                            }
                            let Ok(e) = energy_at_1ts(s, t, p_a, p_b, p_r) else {
                                continue;
                            };
                            if best.is_none_or(|b| e < b.energy) {
                                best = Some(GridPoint {
                                    t1: t,
                                    t2: 0.0,
                                    p_a,
                                    p_b,
                                    p_r_fwd: p_r,
                                    p_r_rev: p_r,
                                    energy: e,
                                });
                            }
                        }
                    }
                }
            }
            best
        }
    };
    let best = best.ok_or(Error::EmptyFeasibleSet)?;
    Ok(GridOutcome {
        best,
        evaluated: tally.0,
        feasible: tally.1,
        below_anchor_feasible: tally.2,
    })
}

fn all_met(s: &Scenario, c: &LinkCapacities) -> bool {
    meets(c.c_ar, s.r_fl) && meets(c.c_rb, s.r_fl) && meets(c.c_br, s.r_rl) && meets(c.c_ra, s.r_rl)
}

/// Relative slack `(capacity - demand) / demand` of one rate constraint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintSlack {
    pub name: &'static str,
    pub capacity: f64,
    pub demand: f64,
    pub slack: f64,
}

fn slack(name: &'static str, capacity: f64, demand: f64) -> ConstraintSlack {
    let slack = if demand > 0.0 {
        (capacity - demand) / demand
    } else {
        0.0
    };
    ConstraintSlack {
        name,
        capacity,
        demand,
        slack,
    }
}

/// Slacks of the four rate constraints at a schedule.
pub fn constraint_slacks(s: &Scenario, sched: &Schedule) -> Vec<ConstraintSlack> {
    let c = match sched.strategy {
        Strategy::Fd2ts => caps_2ts(
            s,
            sched.t1,
            sched.t2,
            &Powers2ts {
                p_a: sched.p_a,
                p_rb: sched.p_r_fwd,
                p_b: sched.p_b,
                p_ra: sched.p_r_rev,
            },
        ),
        Strategy::Fd1ts => caps_1ts(s, sched.t1, sched.p_a, sched.p_b, sched.p_r_fwd),
        Strategy::Hd2ts => caps_hd(
            s,
            sched.t1,
            sched.t2,
            &PowersHd {
                p_a: sched.p_a,
                p_b: sched.p_b,
                p_r: sched.p_r_fwd,
            },
        ),
    };
    vec![
        slack("c_ar", c.c_ar, s.r_fl),
        slack("c_br", c.c_br, s.r_rl),
        slack("c_rb", c.c_rb, s.r_fl),
        slack("c_ra", c.c_ra, s.r_rl),
    ]
}

/// Check which constraints are tight at an optimum.
///
/// Two-slot full duplex: all four. Otherwise both uplinks are tight and at
/// least one broadcast link is tight while the other is not violated.
pub fn verify_necessary_conditions(
    s: &Scenario,
    sched: &Schedule,
    tol: f64,
) -> Result<Vec<ConstraintSlack>> {
    let sl = constraint_slacks(s, sched);
    let fail = |c: &ConstraintSlack| Error::NecessaryCondition {
        constraint: c.name,
        slack: c.slack,
    };
    let tight = |c: &ConstraintSlack| c.slack.abs() <= tol;
    let (up, down) = sl.split_at(2);
    match sched.strategy {
        Strategy::Fd2ts => {
            if let Some(c) = sl.iter().find(|c| !tight(c)) {
                return Err(fail(c));
            }
        }
        Strategy::Fd1ts | Strategy::Hd2ts => {
            if let Some(c) = up.iter().find(|c| !tight(c)) {
                return Err(fail(c));
            }
            if let Some(c) = down.iter().find(|c| c.slack < -tol) {
                return Err(fail(c));
            }
            if !down.iter().any(tight) {
                let c = down
                    .iter()
                    .min_by(|x, y| x.slack.total_cmp(&y.slack))
                    .unwrap();
                return Err(fail(c));
            }
        }
    }
    Ok(sl)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ProbeOutcome {
    pub samples: usize,
    pub violations: usize,
}

fn concave_step(fm: f64, f0: f64, fp: f64, h: f64) -> bool {
    (fp - 2.0 * f0 + fm) / (h * h) < -1e-6 * f0.abs()
}

/// Central second differences of `f` at random points of `[lo + h, hi - h]`.
/// Points where `f` is undefined are redrawn. Work in normalised coordinates
/// so `h` and the tolerance are scale-free.
pub fn convexity_probe_1d(
    f: impl Fn(f64) -> Option<f64>,
    lo: f64,
    hi: f64,
    n_samples: usize,
    h: f64,
    rng: &mut impl Rng,
) -> ProbeOutcome {
    let mut out = ProbeOutcome::default();
    if hi - lo <= 2.0 * h {
        return out;
    }
    for _ in 0..n_samples * 20 {
        if out.samples == n_samples {
            break;
        }
        let x = rng.gen_range(lo + h..hi - h);
        let (Some(fm), Some(f0), Some(fp)) = (f(x - h), f(x), f(x + h)) else {
            continue;
        };
        out.samples += 1;
        if concave_step(fm, f0, fp, h) {
            out.violations += 1;
        }
    }
    out
}

/// Second differences along random directions at random points of the box
/// `[lo, hi]` that, with both neighbours, satisfy `admissible`.
pub fn convexity_probe_2d(
    f: impl Fn(f64, f64) -> Option<f64>,
    admissible: impl Fn(f64, f64) -> bool,
    lo: (f64, f64),
    hi: (f64, f64),
    n_samples: usize,
    h: f64,
    rng: &mut impl Rng,
) -> ProbeOutcome {
    let mut out = ProbeOutcome::default();
    if !(lo.0 < hi.0 && lo.1 < hi.1) {
        return out;
    }
    for _ in 0..n_samples * 50 {
        if out.samples == n_samples {
            break;
        }
        let (x, y) = (rng.gen_range(lo.0..hi.0), rng.gen_range(lo.1..hi.1));
        let th = rng.gen_range(0.0..std::f64::consts::TAU);
        let (dx, dy) = (h * th.cos(), h * th.sin());
        if !(admissible(x - dx, y - dy) && admissible(x, y) && admissible(x + dx, y + dy)) {
            continue;
        }
        let (Some(fm), Some(f0), Some(fp)) = (f(x - dx, y - dy), f(x, y), f(x + dx, y + dy)) else {
            continue;
        };
        out.samples += 1;
        if concave_step(fm, f0, fp, h) {
            out.violations += 1;
        }
    }
    out
}

/// Number of times `f`, sampled at `n` uniform points on `[lo, hi]`, turns
/// from rising back to falling. Zero for a unimodal function.
pub fn unimodality_probe(
    f: impl Fn(f64) -> Option<f64>,
    lo: f64,
    hi: f64,
    n: usize,
) -> ProbeOutcome {
    let vals: Vec<f64> = (0..n.max(2))
        .filter_map(|i| f(lo + (hi - lo) * i as f64 / (n.max(2) - 1) as f64))
        .collect();
    let mut out = ProbeOutcome {
        samples: vals.len(),
        violations: 0,
    };
    let mut rising = false;
    for w in vals.windows(2) {
        let tol = 1e-12 * w[0].abs().max(w[1].abs());
        if w[1] > w[0] + tol {
            rising = true;
        } else if rising && w[1] < w[0] - tol {
            out.violations += 1;
            rising = false;
        }
    }
    out
}

/// Probe the scenario's energy over the feasible durations (normalised by
/// the frame). Quasi-convex cases (half duplex with TPA) get the per-axis
/// unimodality check instead.
pub fn probe_objective(s: &Scenario, n_samples: usize, seed: u64) -> Result<ProbeOutcome> {
    let w = tmin(s, &BisectionConfig::default())?;
    let t = s.frame_t;
    let (x1, x2) = (w.t_min_1 / t, w.t_min_2 / t);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = 1e-3 * (1.0 - x1 - x2).max(1e-3);
    let admissible = |a: f64, b: f64| a >= x1 && b >= x2 && a + b <= 1.0;
    Ok(match (s.strategy, s.pa.a.kind) {
        (Strategy::Fd1ts, _) => convexity_probe_1d(
            |x| energy_1ts(s, x * t).ok(),
            x1,
            1.0,
            n_samples,
            h,
            &mut rng,
        ),
        (Strategy::Fd2ts, _) => convexity_probe_2d(
            |a, b| energy_2ts(s, a * t, b * t).ok(),
            admissible,
            (x1, x2),
            (1.0 - x2, 1.0 - x1),
            n_samples,
            h,
            &mut rng,
        ),
        (Strategy::Hd2ts, PaKind::Etpa) => convexity_probe_2d(
            |a, b| energy_hd(s, a * t, b * t).ok(),
            admissible,
            (x1, x2),
            (1.0 - x2, 1.0 - x1),
            n_samples,
            h,
            &mut rng,
        ),
        (Strategy::Hd2ts, PaKind::Tpa) => {
            let n = n_samples.max(4) / 2;
            let mut acc = ProbeOutcome::default();
            for _ in 0..4 {
                let b = rng.gen_range(x2..(1.0 - x1));
                let a = rng.gen_range(x1..(1.0 - x2));
                for o in [
                    unimodality_probe(|x| energy_hd(s, x * t, b * t).ok(), x1, 1.0 - b, n),
                    unimodality_probe(|y| energy_hd(s, a * t, y * t).ok(), x2, 1.0 - a, n),
                ] {
                    acc.samples += o.samples;
                    acc.violations += o.violations;
                }
            }
            acc
        }
    })
}

/// Everything the oracle has to say about a solved schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub solver_energy: f64,
    /// `None` when the grid holds no feasible point.
    pub grid_best: Option<GridPoint>,
    /// `(solver - grid) / grid`; non-positive when the solver wins.
    pub relative_gap: Option<f64>,
    pub below_anchor_feasible: usize,
    pub slacks: Vec<ConstraintSlack>,
    /// First failed tightness condition, if any. Not checked for the
    /// high-load single-slot approximation, whose powers are deliberately
    /// slack.
    pub condition_violation: Option<String>,
    pub convexity: ProbeOutcome,
}

impl OracleReport {
    /// Solver within `gap` of the grid, closed form unrefuted, conditions met.
    pub fn passes(&self, gap: f64) -> bool {
        self.relative_gap.is_some_and(|g| g <= gap)
            && self.below_anchor_feasible == 0
            && self.condition_violation.is_none()
            && self.convexity.violations == 0
    }
}

pub fn verify(s: &Scenario, sched: &Schedule, cfg: &OracleConfig) -> OracleReport {
    let grid = grid_search(s, cfg.n_t, cfg.n_p).ok();
    let approximate = sched.strategy == Strategy::Fd1ts && s.asymptotic_1ts;
    let condition_violation = if approximate {
        None
    } else {
        verify_necessary_conditions(s, sched, cfg.slack_tol)
            .err()
            .map(|e| e.to_string())
    };
    OracleReport {
        solver_energy: sched.e_total,
        grid_best: grid.map(|g| g.best),
        relative_gap: grid.map(|g| (sched.e_total - g.best.energy) / g.best.energy),
        below_anchor_feasible: grid.map_or(0, |g| g.below_anchor_feasible),
        slacks: constraint_slacks(s, sched),
        condition_violation,
        convexity: probe_objective(s, cfg.convexity_samples, cfg.seed).unwrap_or_default(),
    }
}

/// A random deployment around the reference one: link lengths in
/// [10, 200] m, total demand in [5, 120] Mbit/s split between 10% and 90%
/// forward, cancellation in [30, 80] dB.
pub fn random_scenario(rng: &mut impl Rng, strategy: Strategy, pa: PaKind) -> Scenario {
    let mut s = Scenario::reference()
        .with_strategy(strategy)
        .with_pa_kind(pa);
    let (g_a, g_b) = (
        link_gain(rng.gen_range(10.0..200.0)),
        link_gain(rng.gen_range(10.0..200.0)),
    );
    let total = rng.gen_range(5e6..120e6);
    let share = rng.gen_range(0.1..0.9);
    let gs = residual_self_gain(
        defaults::SELF_DISTANCE_M,
        db_to_linear(rng.gen_range(30.0..80.0)),
    );
    s.r_fl = total * share;
    s.r_rl = total - s.r_fl;
    s.channels.g_ar = g_a;
    s.channels.g_ra = g_a;
    s.channels.g_br = g_b;
    s.channels.g_rb = g_b;
    s.channels.gs_a = gs;
    s.channels.gs_b = gs;
    s.channels.gs_r = gs;
    s
}

/// `count` feasible random scenarios, reproducible from `seed`.
pub fn feasible_corpus(seed: u64, count: usize, strategy: Strategy, pa: PaKind) -> Vec<Scenario> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = BisectionConfig::default();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count * 200 {
        if out.len() == count {
            break;
        }
        let s = random_scenario(&mut rng, strategy, pa);
        if tmin(&s, &cfg).is_ok() {
            out.push(s);
        }
    }
    out
}
