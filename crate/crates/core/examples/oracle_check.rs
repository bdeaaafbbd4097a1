// Cross-check solver results against the brute-force grid and the
// constraint-activity conditions on a few random deployments.
//
//     cargo run --example oracle_check

use fdtwr::model::PaKind;
use fdtwr::oracle::{feasible_corpus, OracleConfig};
use fdtwr::{solve, SolverConfig, Strategy};

fn main() {
    let cfg = SolverConfig {
        oracle_check: true,
        oracle: OracleConfig {
            convexity_samples: 50,
            ..OracleConfig::default()
        },
        ..SolverConfig::default()
    };
    for st in Strategy::ALL {
        for s in feasible_corpus(11, 3, st, PaKind::Tpa) {
            let sched = solve(&s, &cfg).unwrap();
            let r = sched.oracle.as_ref().unwrap();
            println!(
                "{st:>6} {:>6.1}+{:<6.1} Mbit/s  solver {:.5e} J  grid {:.5e} J  gap {:+.2e}  conditions {}  convexity {}/{}",
                s.r_fl / 1e6,
                s.r_rl / 1e6,
                r.solver_energy,
                r.grid_best.map_or(f64::NAN, |g| g.energy),
                r.relative_gap.unwrap_or(f64::NAN),
                r.condition_violation.as_deref().unwrap_or("ok"),
                r.convexity.violations,
                r.convexity.samples
            );
        }
    }
}
