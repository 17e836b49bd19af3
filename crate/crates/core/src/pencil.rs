//! Spectrum of the quadratic pencil `L(λ) = λ²I + λD + A` through its
//! companion linearization `𝒜 = [[−D, −A], [I, 0]]`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::certificate::{build_block_matrix, Certificate};
use crate::decomposition::Decomposition;
use crate::error::{DecayError, Result};
use crate::linalg::{self, CMat, CVec, EigenDecomposition};

/// Relative tolerance for eigenpair residuals.
pub const RESIDUAL_RTOL: f64 = 1e-8;

/// Absolute slack for the half-plane localization test.
pub const LOCALIZATION_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumReport {
    /// All 2n eigenvalues, descending real part, ties by ascending imaginary part.
    pub eigenvalues: Vec<Complex64>,
    pub spectral_abscissa: f64,
    /// `‖L(λᵢ)vᵢ‖/‖vᵢ‖` for the recovered pencil eigenvectors.
    pub residuals: Vec<f64>,
    /// Set by [`SpectrumReport::localize`].
    pub localized: Option<bool>,
    /// `−abscissa − rate` of the last localization check.
    pub gap: Option<f64>,
}

/// `λ²I + λD + A`.
pub fn pencil_at(dec: &Decomposition, lambda: Complex64) -> CMat {
    let pair = dec.pair();
    linalg::identity(dec.dim()) * (lambda * lambda) + pair.damping() * lambda + pair.stiffness()
}

/// Residual scale `|λ|² + |λ|·‖D‖ + ‖A‖` (spectral norms).
pub fn residual_scale(lambda: Complex64, norm_a: f64, norm_d: f64) -> f64 {
    lambda.norm_sqr() + lambda.norm() * norm_d + norm_a
}

/// Roots of `λ² + dλ + a` without cancellation.
pub fn quadratic_roots(a: Complex64, d: Complex64) -> [Complex64; 2] {
    let disc = (d * d - a * 4.0).sqrt();
    let plus = d + disc;
    let minus = d - disc;
    let big = if plus.norm() >= minus.norm() { plus } else { minus };
    let r1 = -big * 0.5;
    let r2 = if r1.norm() > 0.0 { a / r1 } else { Complex64::new(0.0, 0.0) };
    let mut roots = [r1, r2];
    roots.sort_by(linalg::spectrum_order);
    roots
}

pub fn pencil_spectrum(dec: &Decomposition) -> Result<SpectrumReport> {
    let eig = linalg::eigen_decomposition(&build_block_matrix(dec))?;
    Ok(spectrum_from_decomposition(dec, &eig))
}

/// Builds the report from an existing eigendecomposition of `𝒜`.
///
/// For `n = 1` the eigenvalues are taken from the quadratic formula instead:
/// an eigensolver resolves a double root only to about `√ε`.
pub fn spectrum_from_decomposition(dec: &Decomposition, eig: &EigenDecomposition) -> SpectrumReport {
    let n = dec.dim();
    if n == 1 {
        let a = dec.pair().stiffness()[(0, 0)];
        let d = dec.pair().damping()[(0, 0)];
        let eigenvalues = quadratic_roots(a, d).to_vec();
        let residuals = eigenvalues.iter().map(|&l| (l * l + d * l + a).norm()).collect();
        return SpectrumReport {
            spectral_abscissa: linalg::spectral_abscissa(&eigenvalues),
            eigenvalues,
            residuals,
            localized: None,
            gap: None,
        };
    }
    let residuals = eig
        .values
        .iter()
        .enumerate()
        .map(|(j, &lambda)| {
            // companion structure: v = (λ·w, w)
            let w: CVec = eig.vectors.column(j).rows(n, n).into_owned();
            let r = pencil_at(dec, lambda) * &w;
            linalg::vec_norm(&r) / linalg::vec_norm(&w)
        })
        .collect();
    SpectrumReport {
        eigenvalues: eig.values.clone(),
        spectral_abscissa: linalg::spectral_abscissa(&eig.values),
        residuals,
        localized: None,
        gap: None,
    }
}

impl SpectrumReport {
    /// Every residual within `RESIDUAL_RTOL·(|λ|² + |λ|‖D‖ + ‖A‖)`.
    pub fn residuals_ok(&self, dec: &Decomposition) -> bool {
        let norm_a = linalg::spectral_norm(dec.pair().stiffness());
        let norm_d = linalg::spectral_norm(dec.pair().damping());
        self.eigenvalues
            .iter()
            .zip(&self.residuals)
            .all(|(&l, &r)| r <= RESIDUAL_RTOL * residual_scale(l, norm_a, norm_d))
    }

    /// Records the localization verdict against `cert` in the report.
    pub fn localize(&mut self, cert: &Certificate) -> Result<Localization> {
        let loc = verify_localization(self, cert)?;
        self.localized = Some(loc.localized);
        self.gap = Some(loc.gap);
        Ok(loc)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Localization {
    pub localized: bool,
    pub abscissa: f64,
    pub rate: f64,
    /// `−abscissa − rate`: how conservative the certificate is.
    pub gap: f64,
}

/// Checks that the spectrum lies in `{Re λ ≤ −rate}`.
pub fn verify_localization(report: &SpectrumReport, cert: &Certificate) -> Result<Localization> {
    verify_localization_with_tol(report, cert, LOCALIZATION_TOL)
}

pub fn verify_localization_with_tol(report: &SpectrumReport, cert: &Certificate, tol: f64) -> Result<Localization> {
    if !cert.valid {
        return Err(DecayError::InvalidParams("localization needs a valid certificate".into()));
    }
    let abscissa = report.spectral_abscissa;
    Ok(Localization {
        localized: abscissa <= -cert.rate + tol,
        abscissa,
        rate: cert.rate,
        gap: -abscissa - cert.rate,
    })
}

/// `(𝒜 − λI)⁻¹` assembled from `L(λ)⁻¹` in the state ordering `(u′, u)`:
///
/// ```text
/// [[ −λL⁻¹,  L⁻¹A            ],
///  [ −L⁻¹,   λ⁻¹(L⁻¹A − I)   ]]
/// ```
pub fn resolvent_from_pencil(dec: &Decomposition, lambda: Complex64) -> Result<CMat> {
    if lambda.norm() == 0.0 {
        return Err(DecayError::InvalidParams("the block resolvent formula needs lambda != 0".into()));
    }
    let n = dec.dim();
    let singular = || DecayError::SingularPencil { re: lambda.re, im: lambda.im };
    let l = pencil_at(dec, lambda);
    let lu = l.lu();
    let l_inv = lu.solve(&linalg::identity(n)).ok_or_else(singular)?;
    if !linalg::is_finite(&l_inv) {
        return Err(singular());
    }
    let l_inv_a = &l_inv * dec.pair().stiffness();
    let eye = linalg::identity(n);
    Ok(linalg::block2x2(
        &(&l_inv * -lambda),
        &l_inv_a,
        &(-&l_inv),
        &((&l_inv_a - eye) * lambda.inv()),
    ))
}

/// Relative Frobenius discrepancy between the pencil-based resolvent and a
/// direct solve of `(𝒜 − λI)X = I`.
pub fn resolvent_check(dec: &Decomposition, lambda: Complex64) -> Result<f64> {
    let block = resolvent_from_pencil(dec, lambda)?;
    let a = build_block_matrix(dec);
    let shifted = &a - linalg::identity(a.nrows()) * lambda;
    let direct = shifted
        .lu()
        .solve(&linalg::identity(a.nrows()))
        .ok_or(DecayError::SingularPencil { re: lambda.re, im: lambda.im })?;
    Ok(linalg::frobenius(&(&block - &direct)) / linalg::frobenius(&direct))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::{make_certificate_t1, optimize_rate, SearchConfig, Variant};
    use crate::constants::Theorem1Params;
    use crate::decomposition::{decompose, OperatorPair};
    use crate::linalg::{cplx, real};

    fn scalar(a: Complex64, d: Complex64) -> Decomposition {
        decompose(&OperatorPair::new(CMat::from_element(1, 1, a), CMat::from_element(1, 1, d)).unwrap()).unwrap()
    }

    #[test]
    fn critically_damped_double_root() {
        let report = pencil_spectrum(&scalar(real(1.0), real(2.0))).unwrap();
        assert_eq!(report.eigenvalues.len(), 2);
        for l in &report.eigenvalues {
            assert_eq!(*l, real(-1.0));
        }
    }

    #[test]
    fn quadratic_roots_are_stable() {
        // tiny root of λ² + 1e8 λ + 1 is −1e−8 to full precision
        let r = quadratic_roots(real(1.0), real(1e8));
        assert!((r[0].re + 1e-8).abs() < 1e-22);
        assert!((r[1].re + 1e8).abs() < 1e-6);
    }

    #[test]
    fn sectorial_scalar_roots() {
        let dec = scalar(cplx(1.0, 1.0), real(2.0));
        let report = pencil_spectrum(&dec).unwrap();
        let s = 0.5f64.sqrt();
        let expected = [cplx(-1.0 + s, -s), cplx(-1.0 - s, s)];
        for (got, want) in report.eigenvalues.iter().zip(&expected) {
            assert!((got - want).norm() < 1e-12, "{got} vs {want}");
        }
        assert!((report.spectral_abscissa - (-1.0 + s)).abs() < 1e-12);
        assert!(report.residuals_ok(&dec));
    }

    #[test]
    fn decoupled_copies() {
        let dec = decompose(&OperatorPair::new(CMat::identity(2, 2), CMat::identity(2, 2) * real(2.0)).unwrap()).unwrap();
        let report = pencil_spectrum(&dec).unwrap();
        assert_eq!(report.eigenvalues.len(), 4);
        for l in &report.eigenvalues {
            assert!((l - real(-1.0)).norm() < 1e-6);
        }
    }

    #[test]
    fn localization_gap() {
        let dec = scalar(real(1.0), real(2.0));
        let mut report = pencil_spectrum(&dec).unwrap();
        let mut cert = make_certificate_t1(&dec, Theorem1Params::new(1.0, 0.5)).unwrap();
        cert.rate = 0.25;
        let loc = report.localize(&cert).unwrap();
        assert!(loc.localized);
        assert!((loc.gap - 0.75).abs() < 1e-7);
        assert_eq!(report.localized, Some(true));

        let zero = make_certificate_t1(&dec, Theorem1Params::new(1.0, 1.0)).unwrap();
        assert!(verify_localization(&report, &zero).unwrap().localized);
    }

    #[test]
    fn optimized_certificate_respects_abscissa() {
        let dec = scalar(cplx(1.0, 1.0), real(2.0));
        let report = pencil_spectrum(&dec).unwrap();
        for variant in [Variant::Theorem1, Variant::Theorem2] {
            let cert = optimize_rate(&dec, variant, &SearchConfig::default()).unwrap();
            assert!(cert.rate <= 1.0 - 0.5f64.sqrt());
            assert!(verify_localization(&report, &cert).unwrap().localized);
        }
    }

    #[test]
    fn resolvent_scalar_by_hand() {
        // 𝒜 − I = [[−3, −1], [1, −1]], det 4.
        let dec = scalar(real(1.0), real(2.0));
        let r = resolvent_from_pencil(&dec, real(1.0)).unwrap();
        let expected = CMat::from_row_slice(2, 2, &[real(-0.25), real(0.25), real(-0.25), real(-0.75)]);
        assert!(linalg::frobenius(&(r - expected)) < 1e-15);
        assert!(resolvent_check(&dec, real(1.0)).unwrap() <= 1e-12);
    }

    #[test]
    fn resolvent_rejects_zero_and_spectrum() {
        let dec = scalar(real(1.0), real(2.0));
        assert!(matches!(resolvent_check(&dec, real(0.0)), Err(DecayError::InvalidParams(_))));
        assert!(resolvent_check(&dec, real(-1.0)).is_err());
    }
}
