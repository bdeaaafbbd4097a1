// Link budget of the reference deployment: noise floor, path gain and SNR
// versus distance, and residual self-interference versus cancellation depth.
//
//     cargo run --example link_budget

use fdtwr::model::{
    db_to_linear, dbm_to_watts, defaults, link_gain, noise_power, residual_self_gain,
};

fn main() {
    let sigma2 = noise_power(defaults::N0_DBM_PER_HZ, defaults::BANDWIDTH_HZ);
    println!(
        "noise over {} MHz: {sigma2:.4e} W",
        defaults::BANDWIDTH_HZ / 1e6
    );

    println!(
        "\n{:>8} {:>12} {:>12} {:>12} {:>12}",
        "d [m]", "gain", "SNR a [dB]", "SNR r [dB]", "SNR b [dB]"
    );
    for d in [10.0, 25.0, 50.0, 100.0, 200.0] {
        let g = link_gain(d);
        let snr = |dbm: f64| 10.0 * (dbm_to_watts(dbm) * g / sigma2).log10();
        let [pa, pr, pb] = defaults::P_MAX_DBM;
        println!(
            "{d:>8.0} {g:>12.4e} {:>12.1} {:>12.1} {:>12.1}",
            snr(pa),
            snr(pr),
            snr(pb)
        );
    }

    println!(
        "\n{:>10} {:>14} {:>18}",
        "alpha [dB]", "residual gain", "SI at 37 dBm [dBm]"
    );
    for alpha_db in [20.0, 40.0, 60.0, 80.0] {
        let gs = residual_self_gain(defaults::SELF_DISTANCE_M, db_to_linear(alpha_db));
        let si_dbm = 10.0 * (dbm_to_watts(37.0) * gs * 1e3).log10();
        println!("{alpha_db:>10.0} {gs:>14.4e} {si_dbm:>18.1}");
    }
}
