// Shortest admissible slot durations as demand grows, and what limits them.
//
//     cargo run --example feasibility_window

use fdtwr::feasibility::BisectionConfig;
use fdtwr::{tmin, Scenario, Strategy};

fn main() {
    let cfg = BisectionConfig::default();
    println!(
        "{:>8} {:>7} {:>10} {:>10}  binding",
        "Mbit/s", "", "t_min_1", "t_min_2"
    );
    for total in [20.0, 100.0, 200.0, 300.0, 400.0] {
        for st in Strategy::ALL {
            let s = Scenario::reference()
                .with_strategy(st)
                .with_rates(total * 0.5e6, total * 0.5e6);
            match tmin(&s, &cfg) {
                Ok(w) => println!(
                    "{total:>8} {st:>7} {:>9.4}ms {:>9.4}ms  {:?} / {:?}",
                    w.t_min_1 * 1e3,
                    w.t_min_2 * 1e3,
                    w.binding_1,
                    w.binding_2
                ),
                Err(e) => println!("{total:>8} {st:>7}  {e}"),
            }
        }
    }
}
