// Consumed power of the amplifier models across the output range, and the
// resulting drain efficiency.
//
//     cargo run --example pa_models

use fdtwr::model::{db_to_linear, dbm_to_watts, defaults, PaModel};

fn main() {
    let p_max = dbm_to_watts(defaults::P_MAX_DBM[1]);
    let eta = defaults::ETA_MAX;
    let models = [
        ("tpa", PaModel::tpa(p_max, eta).unwrap()),
        (
            "etpa",
            PaModel::etpa(
                p_max,
                eta,
                db_to_linear(defaults::PAPR_DB),
                defaults::ETPA_U,
            )
            .unwrap(),
        ),
        ("ideal", PaModel::ideal(p_max, eta).unwrap()),
    ];
    println!("relay amplifier, p_max = {p_max:.2} W, eta_max = {eta}");
    print!("{:>10}", "p/p_max");
    for (name, _) in &models {
        print!(" {:>12} {:>8}", format!("{name} [W]"), "eff");
    }
    println!();
    for frac in [0.0, 0.001, 0.01, 0.1, 0.25, 0.5, 1.0] {
        let p = frac * p_max;
        print!("{frac:>10}");
        for (_, m) in &models {
            let c = m.consumption(p).unwrap();
            let eff = if c > 0.0 { p / c } else { 0.0 };
            print!(" {c:>12.4} {eff:>8.3}");
        }
        println!();
    }
    println!(
        "\nenvelope-tracking static draw: {:.4} W",
        models[1].1.offset()
    );
}
