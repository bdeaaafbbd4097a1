// Largest sustainable total demand per strategy, and efficiency as the
// demand approaches it.
//
//     cargo run --example rate_sweep

use fdtwr::experiments::{
    max_total_rate_mbps, run_sweep, Axis, AxisRange, ScenarioConfig, SweepSpec,
};
use fdtwr::model::PaKind;
use fdtwr::Strategy;

fn main() {
    let base = ScenarioConfig::default();
    for st in Strategy::ALL {
        let max = max_total_rate_mbps(&base, st, PaKind::Etpa, 1.0, 2000.0, 0.1);
        println!("{st:>6}: up to {:.1} Mbit/s", max.unwrap_or(0.0));
    }

    let spec = SweepSpec::new(
        base,
        AxisRange::new(Axis::TotalRate, 20.0, 360.0, 40.0).unwrap(),
    );
    println!(
        "\n{:>8} {:>10} {:>10} {:>10}",
        "Mbit/s", "fd1ts", "fd2ts", "hd2ts"
    );
    let rows = run_sweep(&spec).unwrap();
    for chunk in rows.chunks(3) {
        print!("{:>8.0}", chunk[0].axis1.1);
        for r in chunk {
            match r.ee() {
                Some(ee) => print!(" {:>10.2}", ee / 1e6),
                None => print!(" {:>10}", "-"),
            }
        }
        println!();
    }
}
