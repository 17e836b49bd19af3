//! Parameter search on random systems: how the certified rate depends on
//! the sector tangent, and what the grid size buys. A dash means no
//! certificate was found.

use std::time::Instant;

use decaycert::certificate::{optimize_rate, SearchConfig, Variant};
use decaycert::generators::gen_random_valid;
use decaycert::{decompose, pencil_spectrum};

fn main() -> decaycert::Result<()> {
    println!("{:>6} {:>10} {:>10} {:>10}", "tan", "t1 rate", "t2 rate", "-abscissa");
    for tan in [0.0, 0.25, 0.5, 1.0, 2.0] {
        let dec = decompose(&gen_random_valid(8, tan, 1.0, 3))?;
        let abscissa = pencil_spectrum(&dec)?.spectral_abscissa;
        let rate = |v| {
            optimize_rate(&dec, v, &SearchConfig::default()).map_or("-".to_string(), |c| format!("{:.5}", c.rate))
        };
        println!("{tan:>6} {:>10} {:>10} {:>10.5}", rate(Variant::Theorem1), rate(Variant::Theorem2), -abscissa);
    }

    let dec = decompose(&gen_random_valid(20, 0.1, 1.0, 9))?;
    println!("\ngrid  rate        k          time");
    for grid in [4, 8, 16, 64, 256] {
        let start = Instant::now();
        let cert = optimize_rate(&dec, Variant::Theorem1, &SearchConfig::with_grid(grid))?;
        println!("{grid:>4}  {:.8}  {:.6}  {:.1} ms", cert.rate, cert.k, start.elapsed().as_secs_f64() * 1e3);
    }
    Ok(())
}
