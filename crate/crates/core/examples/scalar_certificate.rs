//! Certificates for the scalar equation u'' + 2u' + (1+i)u = 0.

use decaycert::certificate::{make_certificate_t1, make_certificate_t2, optimize_rate, SearchConfig, Variant};
use decaycert::constants::{Theorem1Params, Theorem2Params};
use decaycert::generators::gen_scalar;
use decaycert::linalg::{cplx, real};
use decaycert::{check_assumptions, decompose};

fn main() -> decaycert::Result<()> {
    let sys = gen_scalar(cplx(1.0, 1.0), real(2.0))?;
    let dec = decompose(&sys.pair)?;
    let flags = check_assumptions(&dec);
    println!("a0 = {}, beta = {}, delta = {}, sector tangent = {}", dec.a0, dec.beta, dec.delta, dec.sector_tan);
    println!("assumptions: A={} B={} C={}", flags.holds_a, flags.holds_b, flags.holds_c);
    println!("pencil roots: {} and {}", sys.roots[0], sys.roots[1]);

    let pinned = make_certificate_t1(&dec, Theorem1Params::new(1.0, 1.0))?;
    println!("\nt1 at k=1, m=1: omega1 = {}, omega2 = {}, rate = {}", pinned.omega1_value, pinned.omega2_value, pinned.rate);
    let pinned = make_certificate_t2(&dec, Theorem2Params::new(1.0, 0.5, 0.5))?;
    println!("t2 at k=1, p=q=0.5: omega1' = {}, rate = {}", pinned.omega1_value, pinned.rate);

    let config = SearchConfig::default();
    for variant in [Variant::Theorem1, Variant::Theorem2] {
        let cert = optimize_rate(&dec, variant, &config)?;
        println!(
            "\nbest {}: k = {:.6}, rate = {:.6} (true decay rate {:.6})",
            variant.short_name(),
            cert.k,
            cert.rate,
            -sys.abscissa()
        );
        println!("  energy bound: E(t) <= {:.4} exp(-{:.4} t) E(0)", cert.energy_constant(), 2.0 * cert.rate);
    }
    Ok(())
}
