// Energy efficiency against self-interference cancellation, as CSV on stdout.
//
//     cargo run --example cancellation_sweep > alpha.csv

use fdtwr::experiments::{emit_csv, run_sweep, Axis, AxisRange, ScenarioConfig, SweepSpec};

fn main() {
    let spec = SweepSpec::new(
        ScenarioConfig::default(),
        AxisRange::new(Axis::CancellationDb, 20.0, 80.0, 10.0).unwrap(),
    );
    let rows = run_sweep(&spec).unwrap();
    let mut csv = Vec::new();
    emit_csv(&rows, &mut csv).unwrap();
    print!("{}", String::from_utf8(csv).unwrap());
}
