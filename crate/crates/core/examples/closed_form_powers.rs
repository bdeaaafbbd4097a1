// Minimal transmit powers of each strategy at fixed slot durations, and the
// link capacities they produce.
//
//     cargo run --example closed_form_powers

use fdtwr::strategies::{
    caps_1ts, caps_2ts, caps_hd, powers_1ts, powers_2ts, powers_hd, LinkCapacities,
};
use fdtwr::{Scenario, Strategy};

fn show(label: &str, c: &LinkCapacities) {
    println!(
        "  {label}: C_ar {:.4} C_rb {:.4} C_br {:.4} C_ra {:.4} Mbit/s",
        c.c_ar / 1e6,
        c.c_rb / 1e6,
        c.c_br / 1e6,
        c.c_ra / 1e6
    );
}

fn main() {
    let s = Scenario::reference().with_rates(40e6, 20e6);
    let (t1, t2) = (0.5 * s.frame_t, 0.4 * s.frame_t);
    println!(
        "demands: forward {} Mbit/s, reverse {} Mbit/s",
        s.r_fl / 1e6,
        s.r_rl / 1e6
    );

    let p = powers_2ts(&s, t1, t2);
    println!("\nfd2ts, t1 = {:.1} ms, t2 = {:.1} ms", t1 * 1e3, t2 * 1e3);
    println!(
        "  p_a {:.4e} W, p_r->b {:.4e} W, p_b {:.4e} W, p_r->a {:.4e} W",
        p.p_a, p.p_rb, p.p_b, p.p_ra
    );
    show("capacities", &caps_2ts(&s, t1, t2, &p));

    let s1 = s.clone().with_strategy(Strategy::Fd1ts);
    for asym in [false, true] {
        let s1 = s1.clone().with_asymptotic_1ts(asym);
        let p = powers_1ts(&s1, s.frame_t).unwrap();
        println!(
            "\nfd1ts over the whole frame ({})",
            if asym { "high-load form" } else { "exact" }
        );
        println!(
            "  p_a {:.4e} W, p_b {:.4e} W, p_r {:.4e} W, tighter broadcast: {:?}",
            p.p_a, p.p_b, p.p_r, p.active
        );
        show("capacities", &caps_1ts(&s1, s.frame_t, p.p_a, p.p_b, p.p_r));
    }

    let p = powers_hd(&s, t1, t2);
    println!("\nhd2ts, t1 = {:.1} ms, t2 = {:.1} ms", t1 * 1e3, t2 * 1e3);
    println!(
        "  p_a {:.4e} W, p_b {:.4e} W, p_r {:.4e} W",
        p.p_a, p.p_b, p.p_r
    );
    show("capacities", &caps_hd(&s, t1, t2, &p));
}
