//! Randomised invariants of the model, the power maps, the feasibility
//! bounds, the solver and the oracle.

use approx::assert_relative_eq;
use fdtwr::feasibility::{tmin, Binding, BisectionConfig};
use fdtwr::model::{
    db_to_linear, ee_from_energy, residual_self_gain, CircuitAccounting, PaKind, PaModel, Scenario,
    Strategy,
};
use fdtwr::oracle::{grid_search, random_scenario};
use fdtwr::solver::minimize_scanned_1d;
use fdtwr::strategies::{
    caps_1ts, caps_2ts, caps_hd, energy_1ts, energy_2ts, energy_at_2ts, energy_hd,
    forward_draw_2ts, forward_powers_2ts, powers_1ts, powers_2ts, powers_hd, LinkCapacities,
    Powers2ts,
};
use fdtwr::{solve, SolverConfig};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn strategy() -> impl proptest::strategy::Strategy<Value = Strategy> {
    prop::sample::select(Strategy::ALL.to_vec())
}

fn pa_kind() -> impl proptest::strategy::Strategy<Value = PaKind> {
    prop::sample::select(PaKind::ALL.to_vec())
}

fn scenario(seed: u64, st: Strategy, pa: PaKind) -> Scenario {
    random_scenario(&mut ChaCha8Rng::seed_from_u64(seed), st, pa)
}

/// A random scenario that passes the feasibility check, if the seed gives one.
fn feasible(seed: u64, st: Strategy, pa: PaKind) -> Option<Scenario> {
    let s = scenario(seed, st, pa);
    tmin(&s, &BisectionConfig::default()).is_ok().then_some(s)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

fn demands_met(s: &Scenario, c: &LinkCapacities, tol: f64) -> bool {
    let ok = |cap: f64, r: f64| cap >= r * (1.0 - tol);
    ok(c.c_ar, s.r_fl) && ok(c.c_rb, s.r_fl) && ok(c.c_br, s.r_rl) && ok(c.c_ra, s.r_rl)
}

fn within_caps(s: &Scenario, p_a: f64, p_b: f64, p_r: &[f64]) -> bool {
    p_a <= s.pa.a.p_max && p_b <= s.pa.b.p_max && p_r.iter().all(|&p| p <= s.pa.r.p_max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn pa_consumption_is_monotone(kind in pa_kind(), p_max in 0.1f64..50.0, eta in 0.05f64..1.0,
                                  u in 0.0f64..0.05, x in 0.0f64..1.0, y in 0.0f64..1.0) {
        let pa = PaModel::etpa(p_max, eta, db_to_linear(8.0), u).unwrap().with_kind(kind);
        let (lo, hi) = (x.min(y) * p_max, x.max(y) * p_max);
        prop_assert!(pa.consumption(lo).unwrap() <= pa.consumption(hi).unwrap());
    }

    #[test]
    fn tpa_and_offset_free_etpa_agree_at_full_output(p_max in 0.1f64..50.0, eta in 0.05f64..1.0) {
        let tpa = PaModel::tpa(p_max, eta).unwrap();
        let etpa = PaModel::etpa(p_max, eta, 6.0, 0.0).unwrap();
        assert_relative_eq!(tpa.consumption(p_max).unwrap(), p_max / eta, max_relative = 1e-12);
        assert_relative_eq!(etpa.consumption(p_max).unwrap(), p_max / eta, max_relative = 1e-12);
    }

    #[test]
    fn self_interference_falls_with_cancellation(a in 0.0f64..100.0, d in 0.1f64..20.0) {
        let lo = residual_self_gain(0.05, db_to_linear(a));
        let hi = residual_self_gain(0.05, db_to_linear(a + d));
        prop_assert!(hi < lo);
    }

    #[test]
    fn ee_round_trip(r_fl in 0.0f64..1e8, r_rl in 1.0f64..1e8, t in 1e-3f64..1.0, e in 1e-6f64..10.0) {
        let ee = ee_from_energy(r_fl, r_rl, t, e).unwrap();
        assert_relative_eq!(ee * e, (r_fl + r_rl) * t, max_relative = 1e-12);
    }

    #[test]
    fn two_slot_powers_fall_with_duration(seed: u64, x in 0.05f64..0.9, d in 0.01f64..0.09) {
        let s = scenario(seed, Strategy::Fd2ts, PaKind::Etpa);
        let (t, u) = (x * s.frame_t, (x + d) * s.frame_t);
        let (a, b) = (powers_2ts(&s, t, t), powers_2ts(&s, u, u));
        prop_assert!(b.p_a < a.p_a && b.p_rb < a.p_rb && b.p_b < a.p_b && b.p_ra < a.p_ra);
    }

    #[test]
    fn powers_do_not_rise_with_cancellation(seed: u64, x in 0.3f64..1.0, alpha in 30.0f64..80.0,
                                            d in 0.5f64..20.0) {
        let s = scenario(seed, Strategy::Fd1ts, PaKind::Etpa);
        let (lo, hi) = (s.clone().with_cancellation_db(alpha), s.with_cancellation_db(alpha + d));
        let t = x * lo.frame_t;
        let (a, b) = (powers_2ts(&lo, t / 2.0, t / 2.0), powers_2ts(&hi, t / 2.0, t / 2.0));
        prop_assert!(b.p_a <= a.p_a && b.p_rb <= a.p_rb && b.p_b <= a.p_b && b.p_ra <= a.p_ra);
        if let Ok(a) = powers_1ts(&lo, t) {
            let b = powers_1ts(&hi, t).expect("more cancellation cannot break feasibility");
            prop_assert!(b.p_a <= a.p_a * (1.0 + 1e-12));
            prop_assert!(b.p_b <= a.p_b * (1.0 + 1e-12));
            prop_assert!(b.p_r <= a.p_r * (1.0 + 1e-12));
        }
    }

    #[test]
    fn exact_and_high_load_powers_agree_at_high_load(seed: u64, x in 0.2f64..1.0) {
        let s = scenario(seed, Strategy::Fd1ts, PaKind::Etpa);
        let t = x * s.frame_t;
        let (Ok(e), Ok(a)) = (powers_1ts(&s, t), powers_1ts(&s.clone().with_asymptotic_1ts(true), t))
        else { return Ok(()) };
        let c = &s.channels;
        let (ea, eb) = (
            2f64.powf(s.r_fl * s.frame_t / (s.bandwidth_w * t)),
            2f64.powf(s.r_rl * s.frame_t / (s.bandwidth_w * t)),
        );
        // Only meaningful away from the cancellation limit, where the
        // self-interference loop gain is at most one half.
        let loop_gain = ea * eb * c.gs_a.max(c.gs_b) * c.gs_r / (c.g_ra * c.g_ar).min(c.g_rb * c.g_br);
        prop_assume!(loop_gain <= 0.5);
        let bound = 4.0 / ea.min(eb);
        let err = rel(e.p_a, a.p_a).max(rel(e.p_b, a.p_b)).max(rel(e.p_r, a.p_r));
        prop_assert!(err <= bound, "error {err} bound {bound}");
    }

    #[test]
    fn relabelling_terminals_leaves_energy_unchanged(seed: u64, st in strategy(), pa in pa_kind(),
                                                    x in 0.1f64..0.9, y in 0.05f64..1.0) {
        // The compact single-slot circuit constant weights the two directions
        // differently, so that case is checked with per-node accounting.
        let s = scenario(seed, st, pa).with_accounting(CircuitAccounting::FirstPrinciples);
        let w = s.swapped_terminals();
        let t1 = x * s.frame_t;
        let t2 = y * (s.frame_t - t1);
        let (e, f) = match st {
            Strategy::Fd2ts => (energy_2ts(&s, t1, t2), energy_2ts(&w, t2, t1)),
            Strategy::Fd1ts => (energy_1ts(&s, t1), energy_1ts(&w, t1)),
            Strategy::Hd2ts => (energy_hd(&s, t1, t2), energy_hd(&w, t1, t2)),
        };
        match (e, f) {
            (Ok(e), Ok(f)) => assert_relative_eq!(e, f, max_relative = 1e-9),
            (Err(_), Err(_)) => {}
            (e, f) => prop_assert!(false, "{e:?} vs {f:?}"),
        }
        if st == Strategy::Hd2ts {
            let p = s.with_accounting(CircuitAccounting::AsPrinted);
            let q = p.swapped_terminals();
            if let (Ok(e), Ok(f)) = (energy_hd(&p, t1, t2), energy_hd(&q, t1, t2)) {
                assert_relative_eq!(e, f, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn minimal_powers_make_constraints_tight(seed: u64, st in strategy(), x in 0.1f64..0.9,
                                             y in 0.05f64..1.0) {
        let s = scenario(seed, st, PaKind::Etpa);
        let t1 = x * s.frame_t;
        let t2 = y * (s.frame_t - t1);
        let tight = |c: f64, r: f64| rel(c, r) <= 1e-9;
        match st {
            Strategy::Fd2ts => {
                let c = caps_2ts(&s, t1, t2, &powers_2ts(&s, t1, t2));
                prop_assert!(tight(c.c_ar, s.r_fl) && tight(c.c_rb, s.r_fl));
                prop_assert!(tight(c.c_br, s.r_rl) && tight(c.c_ra, s.r_rl));
            }
            Strategy::Fd1ts => {
                let Ok(p) = powers_1ts(&s, t1) else { return Ok(()) };
                let c = caps_1ts(&s, t1, p.p_a, p.p_b, p.p_r);
                prop_assert!(tight(c.c_ar, s.r_fl) && tight(c.c_br, s.r_rl));
                let m = ((c.c_ra - s.r_rl) / s.r_rl).min((c.c_rb - s.r_fl) / s.r_fl);
                prop_assert!(m.abs() <= 1e-9, "broadcast slack {m}");
            }
            Strategy::Hd2ts => {
                let c = caps_hd(&s, t1, t2, &powers_hd(&s, t1, t2));
                prop_assert!(tight(c.c_ar, s.r_fl) && tight(c.c_br, s.r_rl));
                let m = ((c.c_ra - s.r_rl) / s.r_rl).min((c.c_rb - s.r_fl) / s.r_fl);
                prop_assert!(m.abs() <= 1e-9, "broadcast slack {m}");
            }
        }
    }

    #[test]
    fn minimal_durations_are_bracketed(seed: u64, st in strategy()) {
        let s = scenario(seed, st, PaKind::Etpa);
        let Ok(w) = tmin(&s, &BisectionConfig::default()) else { return Ok(()) };
        let (up, down) = (1.0 + 1e-6, 1.0 - 1e-6);
        match st {
            Strategy::Fd2ts => {
                let fits1 = |t: f64| { let (a, r) = forward_powers_2ts(&s, t); a <= s.pa.a.p_max && r <= s.pa.r.p_max };
                let fits2 = |t: f64| { let p = powers_2ts(&s, t, t); p.p_b <= s.pa.b.p_max && p.p_ra <= s.pa.r.p_max };
                prop_assert!(fits1(w.t_min_1 * up) && fits2(w.t_min_2 * up));
                if w.binding_1 != Binding::Floor { prop_assert!(!fits1(w.t_min_1 * down)); }
                if w.binding_2 != Some(Binding::Floor) { prop_assert!(!fits2(w.t_min_2 * down)); }
            }
            Strategy::Fd1ts => {
                let fits = |t: f64| powers_1ts(&s, t).is_ok_and(|p| within_caps(&s, p.p_a, p.p_b, &[p.p_r]));
                prop_assert!(fits((w.t_min_1 * up).min(s.frame_t)));
                if w.binding_1 != Binding::Floor { prop_assert!(!fits(w.t_min_1 * down)); }
            }
            Strategy::Hd2ts => {
                let fits1 = |t: f64| { let p = powers_hd(&s, t, t); p.p_a <= s.pa.a.p_max && p.p_b <= s.pa.b.p_max };
                let fits2 = |t: f64| powers_hd(&s, t, t).p_r <= s.pa.r.p_max;
                prop_assert!(fits1(w.t_min_1 * up) && fits2(w.t_min_2 * up));
                if w.binding_1 != Binding::Floor { prop_assert!(!fits1(w.t_min_1 * down)); }
                if w.binding_2 != Some(Binding::Floor) { prop_assert!(!fits2(w.t_min_2 * down)); }
            }
        }
    }

    #[test]
    fn longer_durations_stay_feasible(seed: u64, st in strategy(), x in 0.0f64..1.0, y in 0.0f64..1.0) {
        let s = scenario(seed, st, PaKind::Tpa);
        let Ok(w) = tmin(&s, &BisectionConfig::default()) else { return Ok(()) };
        let spare = s.frame_t - w.t_min_1 - w.t_min_2;
        let t1 = (w.t_min_1 * (1.0 + 1e-6) + x * spare).min(s.frame_t - w.t_min_2);
        let t2 = w.t_min_2 + y * (s.frame_t - t1 - w.t_min_2);
        let ok = match st {
            Strategy::Fd2ts => { let p = powers_2ts(&s, t1, t2); within_caps(&s, p.p_a, p.p_b, &[p.p_rb, p.p_ra]) }
            Strategy::Fd1ts => powers_1ts(&s, t1).is_ok_and(|p| within_caps(&s, p.p_a, p.p_b, &[p.p_r])),
            Strategy::Hd2ts => { let p = powers_hd(&s, t1, t2 * (1.0 + 1e-6)); within_caps(&s, p.p_a, p.p_b, &[p.p_r]) }
        };
        prop_assert!(ok);
    }

    #[test]
    fn closed_form_powers_beat_any_feasible_alternative(seed: u64, x in 0.2f64..0.5, y in 0.2f64..0.5,
                                                       f in prop::array::uniform4(0.5f64..3.0)) {
        let s = scenario(seed, Strategy::Fd2ts, PaKind::Tpa);
        let (t1, t2) = (x * s.frame_t, y * s.frame_t);
        let p = powers_2ts(&s, t1, t2);
        let q = Powers2ts { p_a: p.p_a * f[0], p_rb: p.p_rb * f[1], p_b: p.p_b * f[2], p_ra: p.p_ra * f[3] };
        prop_assume!(within_caps(&s, q.p_a, q.p_b, &[q.p_rb, q.p_ra]));
        prop_assume!(demands_met(&s, &caps_2ts(&s, t1, t2, &q), 0.0));
        let best = energy_2ts(&s, t1, t2).unwrap();
        prop_assert!(energy_at_2ts(&s, t1, t2, &q).unwrap() >= best * (1.0 - 1e-12));
    }

    #[test]
    fn schedules_report_consistent_efficiency(seed: u64, st in strategy(), pa in pa_kind()) {
        let Some(s) = feasible(seed, st, pa) else { return Ok(()) };
        let sched = solve(&s, &SolverConfig::default()).unwrap();
        assert_relative_eq!(sched.ee * sched.e_total, s.total_rate() * s.frame_t, max_relative = 1e-12);
        prop_assert!(sched.t1 >= 0.0 && sched.t2 >= 0.0);
        prop_assert!(sched.t1 + sched.t2 <= s.frame_t * (1.0 + 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn scaling_every_power_draw_scales_the_optimum(seed: u64, st in strategy(), pa in pa_kind(),
                                                   c in 0.5f64..2.0) {
        let Some(s) = feasible(seed, st, pa) else { return Ok(()) };
        let mut k = s.clone();
        k.pa = k.pa.map(|p| PaModel { eta_max: p.eta_max / c, ..*p });
        k.circuit = k.circuit.map(|n| fdtwr::model::NodeCircuit {
            p_base: n.p_base * c,
            p_idle: n.p_idle * c,
            epsilon: n.epsilon * c,
        });
        prop_assume!(k.validate().is_ok());
        let cfg = SolverConfig { duration_tol: 1e-10, ..SolverConfig::default() };
        let (a, b) = (solve(&s, &cfg).unwrap(), solve(&k, &cfg).unwrap());
        assert_relative_eq!(b.e_total, c * a.e_total, max_relative = 1e-9);
        prop_assert!((a.t1 - b.t1).abs() <= 1e-6 * s.frame_t, "{} vs {}", a.t1, b.t1);
        prop_assert!((a.t2 - b.t2).abs() <= 1e-6 * s.frame_t, "{} vs {}", a.t2, b.t2);
    }

    #[test]
    fn tighter_tolerance_barely_moves_the_optimum(seed: u64, st in strategy(), pa in pa_kind()) {
        let Some(s) = feasible(seed, st, pa) else { return Ok(()) };
        let base = SolverConfig::default();
        let fine = SolverConfig { duration_tol: base.duration_tol / 10.0, ..base.clone() };
        let (a, b) = (solve(&s, &base).unwrap(), solve(&s, &fine).unwrap());
        prop_assert!(rel(a.e_total, b.e_total) < 1e-6);
    }

    #[test]
    fn budget_free_two_slot_optimum_is_per_slot_optimum(seed: u64, pa in pa_kind()) {
        let Some(s) = feasible(seed, Strategy::Fd2ts, pa) else { return Ok(()) };
        let sched = solve(&s, &SolverConfig::default()).unwrap();
        prop_assume!(sched.t1 + sched.t2 < s.frame_t * (1.0 - 1e-6));
        let w = tmin(&s, &BisectionConfig::default()).unwrap();
        let idle = s.idle_power();
        let cost = |t: f64| {
            let (a, r) = forward_powers_2ts(&s, t);
            forward_draw_2ts(&s, a, r).map(|d| (d - idle) * t)
        };
        let (t1, _) = minimize_scanned_1d(cost, w.t_min_1, w.t1_max(s.frame_t), 64, 1e-7 * s.frame_t, 300)
            .unwrap();
        prop_assert!((t1 - sched.t1).abs() <= 1e-6 * s.frame_t, "{t1} vs {}", sched.t1);
    }

    #[test]
    fn grid_and_feasibility_agree(seed: u64, st in strategy(), pa in pa_kind(), hard in any::<bool>()) {
        let mut s = scenario(seed, st, pa);
        if hard {
            // Push towards the feasibility boundary.
            let (f, r) = (s.r_fl * 4.0, s.r_rl * 4.0);
            s = s.with_rates(f, r);
        }
        let f = tmin(&s, &BisectionConfig::default());
        let g = grid_search(&s, 50, 20);
        match (&f, &g) {
            (Ok(_), Ok(_)) | (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "feasibility {:?} grid {:?}", f.is_ok(), g.as_ref().map(|g| g.feasible)),
        }
    }
}
