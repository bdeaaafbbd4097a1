//! Minimal transmit powers, frame energies and link capacities for the three
//! strategies.
//!
//! Powers are the smallest ones meeting every rate demand with equality at
//! given slot durations. The `energy_at_*` and `caps_*` functions accept
//! arbitrary powers so the oracle can evaluate off-optimum points with the
//! same bookkeeping.

use crate::error::{Error, Result};
use crate::model::{
    rx_circuit_power, tx_circuit_power, ActiveBroadcast, CircuitAccounting, Scenario,
};
use std::f64::consts::LN_2;

/// Loads above this many bit/s/Hz are reported as infeasible rather than
/// evaluated (`2^load` would overflow once squared or multiplied).
pub const MAX_LOAD: f64 = 500.0;

/// Spectral load `rate * frame_t / (bandwidth * t)` in bit/s/Hz.
pub fn spectral_load(rate: f64, frame_t: f64, bandwidth_w: f64, t: f64) -> f64 {
    rate * frame_t / (bandwidth_w * t)
}

fn load(s: &Scenario, rate: f64, t: f64) -> Result<f64> {
    let lambda = spectral_load(rate, s.frame_t, s.bandwidth_w, t);
    if lambda > MAX_LOAD || !lambda.is_finite() {
        Err(Error::LoadTooHigh { lambda })
    } else {
        Ok(lambda)
    }
}

/// `2^x - 1`, accurate for small `x`.
fn exp2m1(x: f64) -> f64 {
    (x * LN_2).exp_m1()
}

/// `log2(1 + x)`, accurate for small `x`.
fn log2_1p(x: f64) -> f64 {
    x.ln_1p() / LN_2
}

/// Frame-averaged throughput of a slot of length `t` at spectral efficiency `se`.
fn throughput(s: &Scenario, t: f64, se: f64) -> f64 {
    t / s.frame_t * s.bandwidth_w * se
}

fn check_two_slots(s: &Scenario, t1: f64, t2: f64) -> Result<()> {
    if t1 > 0.0 && t2 > 0.0 && t1 + t2 <= s.frame_t * (1.0 + 1e-12) {
        Ok(())
    } else {
        Err(Error::DurationOutOfRange { t1, t2 })
    }
}

fn check_one_slot(s: &Scenario, t1: f64) -> Result<()> {
    if t1 > 0.0 && t1 <= s.frame_t * (1.0 + 1e-12) {
        Ok(())
    } else {
        Err(Error::DurationOutOfRange { t1, t2: 0.0 })
    }
}

/// Frame-averaged capacities of the four hops, bit/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkCapacities {
    pub c_ar: f64,
    pub c_rb: f64,
    pub c_br: f64,
    pub c_ra: f64,
}

// ---------------------------------------------------------------------------
// Full duplex, two slots
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Powers2ts {
    pub p_a: f64,
    /// Relay power in the forward slot (towards `b`).
    pub p_rb: f64,
    pub p_b: f64,
    /// Relay power in the reverse slot (towards `a`).
    pub p_ra: f64,
}

/// Minimal `(source, relay)` powers for one hop pair of a two-slot exchange.
/// Infinite when the load is beyond [`MAX_LOAD`].
fn relay_pair_2ts(
    s: &Scenario,
    rate: f64,
    t: f64,
    g_src: f64,
    g_dst: f64,
    sigma2_dst: f64,
) -> (f64, f64) {
    let Ok(lambda) = load(s, rate, t) else {
        return (f64::INFINITY, f64::INFINITY);
    };
    let c = &s.channels;
    let a = exp2m1(lambda);
    let p_relay = sigma2_dst / g_dst * a;
    let p_src = c.sigma2_r / g_src * a + sigma2_dst * c.gs_r / (g_src * g_dst) * a * a;
    (p_src, p_relay)
}

/// Forward slot: `(p_a, p_rb)` at duration `t1`.
pub fn forward_powers_2ts(s: &Scenario, t1: f64) -> (f64, f64) {
    let c = &s.channels;
    relay_pair_2ts(s, s.r_fl, t1, c.g_ar, c.g_rb, c.sigma2_b)
}

/// Reverse slot: `(p_b, p_ra)` at duration `t2`.
pub fn reverse_powers_2ts(s: &Scenario, t2: f64) -> (f64, f64) {
    let c = &s.channels;
    relay_pair_2ts(s, s.r_rl, t2, c.g_br, c.g_ra, c.sigma2_a)
}

pub fn powers_2ts(s: &Scenario, t1: f64, t2: f64) -> Powers2ts {
    let (p_a, p_rb) = forward_powers_2ts(s, t1);
    let (p_b, p_ra) = reverse_powers_2ts(s, t2);
    Powers2ts {
        p_a,
        p_rb,
        p_b,
        p_ra,
    }
}

/// Total draw (W) while the forward slot is active.
pub fn forward_draw_2ts(s: &Scenario, p_a: f64, p_rb: f64) -> Result<f64> {
    let (pa, ci, r) = (&s.pa, &s.circuit, s.r_fl);
    Ok(tx_circuit_power(&ci.a, &pa.a, p_a, r)?
        + tx_circuit_power(&ci.r, &pa.r, p_rb, r)?
        + rx_circuit_power(&ci.r, r)
        + rx_circuit_power(&ci.b, r))
}

/// Total draw (W) while the reverse slot is active.
pub fn reverse_draw_2ts(s: &Scenario, p_b: f64, p_ra: f64) -> Result<f64> {
    let (pa, ci, r) = (&s.pa, &s.circuit, s.r_rl);
    Ok(tx_circuit_power(&ci.b, &pa.b, p_b, r)?
        + tx_circuit_power(&ci.r, &pa.r, p_ra, r)?
        + rx_circuit_power(&ci.r, r)
        + rx_circuit_power(&ci.a, r))
}

pub fn energy_at_2ts(s: &Scenario, t1: f64, t2: f64, p: &Powers2ts) -> Result<f64> {
    check_two_slots(s, t1, t2)?;
    let idle = s.idle_power() * (s.frame_t - t1 - t2).max(0.0);
    Ok(forward_draw_2ts(s, p.p_a, p.p_rb)? * t1 + reverse_draw_2ts(s, p.p_b, p.p_ra)? * t2 + idle)
}

/// Frame energy with minimal powers at `(t1, t2)`.
pub fn energy_2ts(s: &Scenario, t1: f64, t2: f64) -> Result<f64> {
    check_two_slots(s, t1, t2)?;
    energy_at_2ts(s, t1, t2, &powers_2ts(s, t1, t2))
}

pub fn caps_2ts(s: &Scenario, t1: f64, t2: f64, p: &Powers2ts) -> LinkCapacities {
    let c = &s.channels;
    LinkCapacities {
        c_ar: throughput(
            s,
            t1,
            log2_1p(p.p_a * c.g_ar / (p.p_rb * c.gs_r + c.sigma2_r)),
        ),
        c_rb: throughput(s, t1, log2_1p(p.p_rb * c.g_rb / c.sigma2_b)),
        c_br: throughput(
            s,
            t2,
            log2_1p(p.p_b * c.g_br / (p.p_ra * c.gs_r + c.sigma2_r)),
        ),
        c_ra: throughput(s, t2, log2_1p(p.p_ra * c.g_ra / c.sigma2_a)),
    }
}

// ---------------------------------------------------------------------------
// Full duplex, one slot
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Powers1ts {
    pub p_a: f64,
    pub p_b: f64,
    pub p_r: f64,
    /// Relay power that makes the relay-to-`a` link exactly tight.
    pub p_r_reverse: f64,
    /// Relay power that makes the relay-to-`b` link exactly tight.
    pub p_r_forward: f64,
    pub active: ActiveBroadcast,
}

struct Loads1ts {
    /// `2^load - 1` per direction.
    am1: f64,
    bm1: f64,
}

fn loads_1ts(s: &Scenario, t1: f64) -> Result<Loads1ts> {
    Ok(Loads1ts {
        am1: exp2m1(load(s, s.r_fl, t1)?),
        bm1: exp2m1(load(s, s.r_rl, t1)?),
    })
}

/// Terminal powers `(p_a, p_b)` per unit of relay-side noise-plus-interference.
fn terminal_factors_1ts(s: &Scenario, l: &Loads1ts) -> (f64, f64) {
    let c = &s.channels;
    let (a, b) = (l.am1 + 1.0, l.bm1 + 1.0);
    if s.asymptotic_1ts {
        (a / c.g_ar, b / c.g_br)
    } else {
        // Lattice MAC at the relay: both uplinks tight with equality.
        let share = (l.am1 + l.bm1 + 1.0) / (a + b);
        (a * share / c.g_ar, b * share / c.g_br)
    }
}

/// Minimal powers at duration `t1`.
///
/// Errors with [`Error::InsufficientCancellation`] when no finite relay power
/// meets both broadcast demands against the terminals' self-interference.
pub fn powers_1ts(s: &Scenario, t1: f64) -> Result<Powers1ts> {
    let c = &s.channels;
    let l = loads_1ts(s, t1)?;
    let (fa, fb) = terminal_factors_1ts(s, &l);
    let (p_r_reverse, p_r_forward) = if s.asymptotic_1ts {
        let (a, b) = (l.am1 + 1.0, l.bm1 + 1.0);
        let den_rev = c.g_ra * c.g_ar - a * b * c.gs_a * c.gs_r;
        let den_fwd = c.g_rb * c.g_br - a * b * c.gs_b * c.gs_r;
        if !(den_rev > 0.0 && den_fwd > 0.0) {
            return Err(Error::InsufficientCancellation { t: t1 });
        }
        (
            b * (a * c.gs_a * c.sigma2_r + c.g_ar * c.sigma2_a) / den_rev,
            a * (b * c.gs_b * c.sigma2_r + c.g_br * c.sigma2_b) / den_fwd,
        )
    } else {
        let den_rev = c.g_ra - l.bm1 * fa * c.gs_a * c.gs_r;
        let den_fwd = c.g_rb - l.am1 * fb * c.gs_b * c.gs_r;
        if !(den_rev > 0.0 && den_fwd > 0.0) {
            return Err(Error::InsufficientCancellation { t: t1 });
        }
        (
            l.bm1 * (fa * c.gs_a * c.sigma2_r + c.sigma2_a) / den_rev,
            l.am1 * (fb * c.gs_b * c.sigma2_r + c.sigma2_b) / den_fwd,
        )
    };
    let (p_r, active) = if p_r_reverse >= p_r_forward {
        (p_r_reverse, ActiveBroadcast::Reverse)
    } else {
        (p_r_forward, ActiveBroadcast::Forward)
    };
    let n_r = p_r * c.gs_r + c.sigma2_r;
    Ok(Powers1ts {
        p_a: fa * n_r,
        p_b: fb * n_r,
        p_r,
        p_r_reverse,
        p_r_forward,
        active,
    })
}

/// Terminal powers `(p_a, p_b)` that keep both uplinks tight for a given
/// relay power.
pub fn terminal_powers_1ts(s: &Scenario, t1: f64, p_r: f64) -> Result<(f64, f64)> {
    let l = loads_1ts(s, t1)?;
    let (fa, fb) = terminal_factors_1ts(s, &l);
    let n_r = p_r * s.channels.gs_r + s.channels.sigma2_r;
    Ok((fa * n_r, fb * n_r))
}

/// Frame energy of the single-slot strategy at arbitrary powers.
pub fn energy_at_1ts(s: &Scenario, t1: f64, p_a: f64, p_b: f64, p_r: f64) -> Result<f64> {
    check_one_slot(s, t1)?;
    let (pa, ci) = (&s.pa, &s.circuit);
    let (fl, rl) = (s.r_fl, s.r_rl);
    let draw = match s.accounting {
        CircuitAccounting::AsPrinted => {
            pa.a.consumption(p_a)?
                + pa.b.consumption(p_b)?
                + pa.r.consumption(p_r)?
                + 2.0 * s.base_power()
                + s.common_epsilon() * (fl + 2.0 * rl)
        }
        CircuitAccounting::FirstPrinciples => {
            tx_circuit_power(&ci.a, &pa.a, p_a, fl)?
                + tx_circuit_power(&ci.b, &pa.b, p_b, rl)?
                + tx_circuit_power(&ci.r, &pa.r, p_r, fl.max(rl))?
                + rx_circuit_power(&ci.a, rl)
                + rx_circuit_power(&ci.b, fl)
                + rx_circuit_power(&ci.r, fl + rl)
        }
    };
    Ok(draw * t1 + s.idle_power() * (s.frame_t - t1).max(0.0))
}

/// Energies `(E_reverse, E_forward)` with the relay sized for each broadcast
/// constraint in turn (terminal powers follow the relay power).
pub fn case_energies_1ts(s: &Scenario, t1: f64) -> Result<(f64, f64)> {
    let p = powers_1ts(s, t1)?;
    let at = |p_r: f64| -> Result<f64> {
        let (p_a, p_b) = terminal_powers_1ts(s, t1, p_r)?;
        energy_at_1ts(s, t1, p_a, p_b, p_r)
    };
    Ok((at(p.p_r_reverse)?, at(p.p_r_forward)?))
}

/// Frame energy with minimal powers: the larger of the two case energies.
pub fn energy_1ts(s: &Scenario, t1: f64) -> Result<f64> {
    check_one_slot(s, t1)?;
    let (e_rev, e_fwd) = case_energies_1ts(s, t1)?;
    Ok(e_rev.max(e_fwd))
}

pub fn caps_1ts(s: &Scenario, t1: f64, p_a: f64, p_b: f64, p_r: f64) -> LinkCapacities {
    let c = &s.channels;
    let (x, y) = (p_a * c.g_ar, p_b * c.g_br);
    let n_r = p_r * c.gs_r + c.sigma2_r;
    LinkCapacities {
        c_ar: throughput(s, t1, (x / (x + y) + x / n_r).log2()),
        c_br: throughput(s, t1, (y / (x + y) + y / n_r).log2()),
        c_ra: throughput(s, t1, log2_1p(p_r * c.g_ra / (p_a * c.gs_a + c.sigma2_a))),
        c_rb: throughput(s, t1, log2_1p(p_r * c.g_rb / (p_b * c.gs_b + c.sigma2_b))),
    }
}

// ---------------------------------------------------------------------------
// Half duplex, two slots
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowersHd {
    pub p_a: f64,
    pub p_b: f64,
    pub p_r: f64,
}

/// Terminal powers `(p_a, p_b)` for the uplink slot of length `t1`.
pub fn uplink_powers_hd(s: &Scenario, t1: f64) -> (f64, f64) {
    let c = &s.channels;
    let (Ok(l1), Ok(l2)) = (load(s, s.r_fl, t1), load(s, s.r_rl, t1)) else {
        return (f64::INFINITY, f64::INFINITY);
    };
    let (a, b) = (2f64.powf(l1), 2f64.powf(l2));
    let share = (exp2m1(l1) + exp2m1(l2) + 1.0) / (a + b);
    (
        a * share * c.sigma2_r / c.g_ar,
        b * share * c.sigma2_r / c.g_br,
    )
}

/// Relay broadcast power for the second slot of length `t2`.
pub fn broadcast_power_hd(s: &Scenario, t2: f64) -> f64 {
    let c = &s.channels;
    let (Ok(l3), Ok(l4)) = (load(s, s.r_fl, t2), load(s, s.r_rl, t2)) else {
        return f64::INFINITY;
    };
    (exp2m1(l3) * c.sigma2_b / c.g_rb).max(exp2m1(l4) * c.sigma2_a / c.g_ra)
}

pub fn powers_hd(s: &Scenario, t1: f64, t2: f64) -> PowersHd {
    let (p_a, p_b) = uplink_powers_hd(s, t1);
    PowersHd {
        p_a,
        p_b,
        p_r: broadcast_power_hd(s, t2),
    }
}

/// Total draw (W) during the uplink slot.
pub fn uplink_draw_hd(s: &Scenario, p_a: f64, p_b: f64) -> Result<f64> {
    let (pa, ci, fl, rl) = (&s.pa, &s.circuit, s.r_fl, s.r_rl);
    Ok(match s.accounting {
        CircuitAccounting::AsPrinted => {
            pa.a.consumption(p_a)?
                + pa.b.consumption(p_b)?
                + s.base_power()
                + s.common_epsilon() * (fl + rl)
        }
        CircuitAccounting::FirstPrinciples => {
            tx_circuit_power(&ci.a, &pa.a, p_a, fl)?
                + tx_circuit_power(&ci.b, &pa.b, p_b, rl)?
                + rx_circuit_power(&ci.r, fl + rl)
        }
    })
}

/// Total draw (W) during the broadcast slot.
pub fn broadcast_draw_hd(s: &Scenario, p_r: f64) -> Result<f64> {
    let (pa, ci, fl, rl) = (&s.pa, &s.circuit, s.r_fl, s.r_rl);
    Ok(match s.accounting {
        CircuitAccounting::AsPrinted => {
            pa.r.consumption(p_r)? + s.base_power() + s.common_epsilon() * fl.max(rl)
        }
        CircuitAccounting::FirstPrinciples => {
            tx_circuit_power(&ci.r, &pa.r, p_r, fl.max(rl))?
                + rx_circuit_power(&ci.a, rl)
                + rx_circuit_power(&ci.b, fl)
        }
    })
}

pub fn energy_at_hd(s: &Scenario, t1: f64, t2: f64, p: &PowersHd) -> Result<f64> {
    check_two_slots(s, t1, t2)?;
    let idle = s.idle_power() * (s.frame_t - t1 - t2).max(0.0);
    Ok(uplink_draw_hd(s, p.p_a, p.p_b)? * t1 + broadcast_draw_hd(s, p.p_r)? * t2 + idle)
}

pub fn energy_hd(s: &Scenario, t1: f64, t2: f64) -> Result<f64> {
    check_two_slots(s, t1, t2)?;
    energy_at_hd(s, t1, t2, &powers_hd(s, t1, t2))
}

pub fn caps_hd(s: &Scenario, t1: f64, t2: f64, p: &PowersHd) -> LinkCapacities {
    let c = &s.channels;
    let (x, y) = (p.p_a * c.g_ar, p.p_b * c.g_br);
    let n = c.sigma2_r;
    LinkCapacities {
        c_ar: throughput(s, t1, (x / (x + y) + x / n).log2()),
        c_br: throughput(s, t1, (y / (x + y) + y / n).log2()),
        c_ra: throughput(s, t2, log2_1p(p.p_r * c.g_ra / c.sigma2_a)),
        c_rb: throughput(s, t2, log2_1p(p.p_r * c.g_rb / c.sigma2_b)),
    }
}
