// Energy-optimal schedules for every strategy and amplifier model, starting
// from a scenario file.
//
//     cargo run --example solve_schedules

use fdtwr::experiments::parse_scenario_config;
use fdtwr::model::PaKind;
use fdtwr::{solve, SolverConfig, Strategy};

const SCENARIO: &str = "\
# reference deployment, slightly uneven demand
r_fl_mbps = 40
r_rl_mbps = 25
alpha_db  = 60
";

fn main() {
    let cfg = parse_scenario_config(SCENARIO).expect("valid scenario");
    println!(
        "{:>6} {:>5} {:>8} {:>8} {:>11} {:>11} {:>11} {:>12}",
        "", "pa", "t1 [ms]", "t2 [ms]", "p_a [W]", "p_b [W]", "p_r [W]", "EE [Mbit/J]"
    );
    for pa in PaKind::ALL {
        for st in Strategy::ALL {
            let s = fdtwr::experiments::ScenarioConfig {
                strategy: st,
                pa,
                ..cfg.clone()
            }
            .to_scenario()
            .unwrap();
            let sched = solve(&s, &SolverConfig::default()).unwrap();
            println!(
                "{st:>6} {pa:>5} {:>8.3} {:>8.3} {:>11.3e} {:>11.3e} {:>11.3e} {:>12.2}",
                sched.t1 * 1e3,
                sched.t2 * 1e3,
                sched.p_a,
                sched.p_b,
                sched.p_r_fwd.max(sched.p_r_rev),
                sched.ee / 1e6
            );
        }
    }
}
