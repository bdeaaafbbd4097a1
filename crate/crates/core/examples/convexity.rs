// Numerical second-difference probes of the energy objectives, plus a
// concave control that the probe must reject.
//
//     cargo run --example convexity

use fdtwr::model::PaKind;
use fdtwr::oracle::{convexity_probe_1d, probe_objective};
use fdtwr::{Scenario, Strategy};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    for pa in PaKind::ALL {
        for st in Strategy::ALL {
            let s = Scenario::reference().with_pa_kind(pa).with_strategy(st);
            let o = probe_objective(&s, 500, 3).unwrap();
            println!(
                "{st:>6} {pa:>5}: {} of {} probes negative",
                o.violations, o.samples
            );
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let c = convexity_probe_1d(|x| Some(x.sqrt()), 0.01, 1.0, 500, 1e-3, &mut rng);
    println!(
        "sqrt control: {} of {} probes negative",
        c.violations, c.samples
    );
}
