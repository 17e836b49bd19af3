//! Quadratic pencil spectrum, residuals, localization and the block resolvent.

use decaycert::certificate::{optimize_rate, SearchConfig, Variant};
use decaycert::generators::gen_random_valid;
use decaycert::linalg::cplx;
use decaycert::pencil::{resolvent_check, verify_localization};
use decaycert::{decompose, pencil_spectrum};

fn main() -> decaycert::Result<()> {
    let dec = decompose(&gen_random_valid(4, 0.5, 1.0, 7))?;
    let mut spec = pencil_spectrum(&dec)?;
    println!("eigenvalues of the companion matrix:");
    for (l, r) in spec.eigenvalues.iter().zip(&spec.residuals) {
        println!("  {:>+.6} {:>+.6}i   residual {r:.1e}", l.re, l.im);
    }
    println!("residuals within tolerance: {}", spec.residuals_ok(&dec));

    let cert = optimize_rate(&dec, Variant::Theorem1, &SearchConfig::default())?;
    let loc = verify_localization(&spec, &cert)?;
    spec.localize(&cert)?;
    println!("\nabscissa {:.6}, certified rate {:.6}, gap {:.6}, localized {}", loc.abscissa, loc.rate, loc.gap, loc.localized);

    for lambda in [cplx(1.0, 0.0), cplx(-0.1, 2.0), cplx(0.5, -3.0)] {
        println!("resolvent at {lambda}: relative discrepancy {:.1e}", resolvent_check(&dec, lambda)?);
    }
    Ok(())
}
