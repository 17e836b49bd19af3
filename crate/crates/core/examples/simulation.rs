//! Trajectory of a random system against the certified energy envelope.
//!
//! Pass a path to also write the trajectory as CSV.

use decaycert::certificate::{optimize_rate, SearchConfig, Variant};
use decaycert::generators::gen_random_valid;
use decaycert::simulate::{check_envelope, default_time_grid, random_initial_data, write_csv, DEFAULT_SAMPLES};
use decaycert::{decompose, pencil_spectrum, propagate};

fn main() -> decaycert::Result<()> {
    let dec = decompose(&gen_random_valid(10, 0.2, 1.0, 21))?;
    let cert = optimize_rate(&dec, Variant::Theorem1, &SearchConfig::default())?;
    let abscissa = pencil_spectrum(&dec)?.spectral_abscissa;

    let (u0, u1) = random_initial_data(dec.dim(), 0);
    let times = default_time_grid(cert.rate, DEFAULT_SAMPLES);
    let traj = propagate(&dec, &u0, &u1, &times)?;
    let env = check_envelope(&traj, &cert, cert.energy_constant());

    println!("certified rate {:.5}, fitted rate {:?}, -abscissa {:.5}", cert.rate, traj.fitted_rate, -abscissa);
    println!("envelope holds: {} (worst ratio {:.4} at t = {:.2})", env.holds, env.worst_ratio, env.worst_time);
    for i in (0..times.len()).step_by(50) {
        let bound = cert.energy_constant() * (-2.0 * cert.rate * times[i]).exp() * traj.energies[0];
        println!("  t = {:>8.2}  E = {:.3e}  bound = {:.3e}", times[i], traj.energies[i], bound);
    }

    if let Some(path) = std::env::args().nth(1) {
        write_csv(&traj, std::fs::File::create(&path)?)?;
        println!("wrote {path}");
    }
    Ok(())
}
