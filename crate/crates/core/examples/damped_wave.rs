//! Viscoelastic string A = (1 + i*gamma) L, D = d I: certified rates
//! against the spectral abscissa. A dash means no certificate was found;
//! a negative last column means the system is unstable.

use decaycert::certificate::{optimize_rate, SearchConfig, Variant};
use decaycert::generators::gen_damped_wave;
use decaycert::{decompose, pencil_spectrum};

fn main() -> decaycert::Result<()> {
    let config = SearchConfig::default();
    println!("{:>3} {:>6} {:>5} {:>10} {:>10} {:>10}", "n", "gamma", "d", "t1 rate", "t2 rate", "-abscissa");
    for n in [3, 7, 15] {
        for gamma in [0.0, 0.05, 0.2] {
            for d in [0.5, 1.0, 4.0] {
                let dec = decompose(&gen_damped_wave(n, gamma, d)?)?;
                let spec = pencil_spectrum(&dec)?;
                let rate = |v| match optimize_rate(&dec, v, &config) {
                    Ok(c) => format!("{:.5}", c.rate),
                    Err(_) => "-".to_string(),
                };
                println!(
                    "{n:>3} {gamma:>6} {d:>5} {:>10} {:>10} {:>10.5}",
                    rate(Variant::Theorem1),
                    rate(Variant::Theorem2),
                    -spec.spectral_abscissa
                );
            }
        }
    }
    Ok(())
}
