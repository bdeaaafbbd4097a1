// Efficiency over traffic imbalance and amplifier efficiency at a fixed
// 60 Mbit/s total, printed as one small table per strategy.
//
//     cargo run --example imbalance_surface

use fdtwr::experiments::{run_sweep, Axis, AxisRange, ScenarioConfig, SweepSpec};
use fdtwr::Strategy;

fn main() {
    let base = ScenarioConfig {
        r_fl_mbps: 30.0,
        r_rl_mbps: 30.0,
        alpha_db: 40.0,
        ..ScenarioConfig::default()
    };
    let mut spec = SweepSpec::new(
        base,
        AxisRange::new(Axis::TrafficRatio, 1.0, 9.0, 2.0).unwrap(),
    );
    spec.axis2 = Some(AxisRange::new(Axis::PaEfficiency, 0.2, 0.5, 0.1).unwrap());
    spec.strategies = vec![Strategy::Fd1ts, Strategy::Fd2ts];
    let rows = run_sweep(&spec).unwrap();
    let etas = spec.axis2.unwrap().values();

    for st in &spec.strategies {
        println!("{st}: EE [Mbit/J], rows r_fl/r_rl, columns eta_max");
        print!("{:>6}", "");
        for e in &etas {
            print!(" {e:>7.2}");
        }
        println!();
        for ratio in spec.axis1.values() {
            print!("{ratio:>6.0}");
            for r in rows
                .iter()
                .filter(|r| r.strategy == *st && r.axis1.1 == ratio)
            {
                print!(" {:>7.2}", r.ee().map_or(f64::NAN, |x| x / 1e6));
            }
            println!();
        }
        println!();
    }
}
