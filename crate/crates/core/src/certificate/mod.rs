//! Decay certificates and the modified energy inner product they live in.
//!
//! States are ordered `x = (x₁, x₂) = (u′, u)` and evolve by `x′ = 𝒜x` with
//! `𝒜 = [[−D, −A], [I, 0]]`. For `0 < k < β` the form
//!
//! ```text
//! [x, y] = (x₁,y₁) + k(x₁,y₂) + k(x₂,y₁) + ((T + kD₁)x₂, y₂)
//! ```
//!
//! is an inner product equivalent to the energy product `‖x₁‖² + ‖x₂‖₁²`,
//! and a valid certificate guarantees `Re[𝒜x, x] ≤ −rate·[x, x]`.

mod search;

pub use search::{optimize_rate, SearchConfig};

use serde::{Deserialize, Serialize};

use crate::constants::{self, Theorem1Params, Theorem2Params};
use crate::decomposition::Decomposition;
use crate::error::{DecayError, Result};
use crate::linalg::{self, real, CMat, MatrixExponential};

/// Absolute tolerance for the accretivity and contraction checks.
pub const VERIFY_TOL: f64 = 1e-8;

/// Slack allowed below the analytic norm-equivalence lower bound.
pub const EQUIVALENCE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Rate `kθ`, `θ = min{ω₁/2, (1−m)/ω₂}`; needs assumption (B).
    Theorem1,
    /// Rate `kθ′`, `θ′ = min{(ω₁′−1)/2, (1−p−q)/ω₂}`; needs assumption (C).
    Theorem2,
}

impl Variant {
    pub fn short_name(self) -> &'static str {
        match self {
            Variant::Theorem1 => "t1",
            Variant::Theorem2 => "t2",
        }
    }
}

/// A parameter choice with its constants and the decay rate it certifies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub variant: Variant,
    pub k: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    /// `ω₁` for the first variant, `ω₁′` for the second.
    pub omega1_value: f64,
    pub omega2_value: f64,
    /// Zero when the certificate is invalid.
    pub theta: f64,
    /// `k·θ`.
    pub rate: f64,
    pub valid: bool,
    /// `1 − k/β`.
    pub equivalence_lower: f64,
    /// `λ_max` of the pencil `(G, G₀)`.
    pub equivalence_upper: f64,
}

impl Certificate {
    /// Constant `C` in `E(t) ≤ C·e^{−2·rate·t}·E(0)`: the ratio of the
    /// norm-equivalence constants.
    pub fn energy_constant(&self) -> f64 {
        self.equivalence_upper / self.equivalence_lower
    }

    /// Constant in `‖e^{t𝒜}‖ ≤ const·e^{−rate·t}` in the energy norm.
    pub fn norm_constant(&self) -> f64 {
        self.energy_constant().sqrt()
    }
}

/// `θ` for the first variant, or `None` if `ω₁ < 0`.
pub(crate) fn theta_t1(omega1: f64, omega2: f64, m: f64) -> Option<f64> {
    (omega1 >= 0.0).then(|| (omega1 / 2.0).min((1.0 - m) / omega2))
}

/// `θ′` for the second variant, or `None` if `ω₁′ < 1`.
pub(crate) fn theta_t2(omega1_prime: f64, omega2: f64, p: f64, q: f64) -> Option<f64> {
    (omega1_prime >= 1.0).then(|| ((omega1_prime - 1.0) / 2.0).min((1.0 - p - q) / omega2))
}

/// `𝒜 = [[−D, −A], [I, 0]]`.
pub fn build_block_matrix(dec: &Decomposition) -> CMat {
    let n = dec.dim();
    let pair = dec.pair();
    linalg::block2x2(
        &(-pair.damping()),
        &(-pair.stiffness()),
        &linalg::identity(n),
        &CMat::zeros(n, n),
    )
}

/// `𝒜⁻¹ = [[0, I], [−A⁻¹, −A⁻¹D]]`.
pub fn block_matrix_inverse(dec: &Decomposition) -> Result<CMat> {
    let n = dec.dim();
    let pair = dec.pair();
    let lu = pair.stiffness().clone().lu();
    let a_inv = lu
        .solve(&linalg::identity(n))
        .ok_or_else(|| DecayError::NotPositiveDefinite("stiffness is singular".into()))?;
    let a_inv_d = &a_inv * pair.damping();
    Ok(linalg::block2x2(&CMat::zeros(n, n), &linalg::identity(n), &(-a_inv), &(-a_inv_d)))
}

/// Gram matrix of the modified inner product for a given `k`.
#[derive(Clone, Debug)]
pub struct GramForm {
    pub g: CMat,
    pub k: f64,
    chol: nalgebra::Cholesky<num_complex::Complex64, nalgebra::Dyn>,
}

impl GramForm {
    /// `Lᴴ` where `G = L·Lᴴ`; `‖Lᴴx‖² = [x, x]`.
    pub fn factor_adjoint(&self) -> CMat {
        self.chol.l().adjoint()
    }

    pub fn cholesky(&self) -> &nalgebra::Cholesky<num_complex::Complex64, nalgebra::Dyn> {
        &self.chol
    }

    /// `[x, y] = yᴴ G x`.
    pub fn inner(&self, x: &linalg::CVec, y: &linalg::CVec) -> num_complex::Complex64 {
        (y.adjoint() * &self.g * x)[(0, 0)]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        linalg::hermitian_eigenvalues(&self.g)[0]
    }
}

/// `G = [[I, kI], [kI, T + kD₁]]`, checked positive definite by Cholesky.
pub fn build_gram(dec: &Decomposition, k: f64) -> Result<GramForm> {
    if !(k > 0.0) {
        return Err(DecayError::InvalidParams(format!("k = {k} must be positive")));
    }
    let n = dec.dim();
    let eye = linalg::identity(n);
    let g = linalg::block2x2(&eye, &(&eye * real(k)), &(&eye * real(k)), &(&dec.t + &dec.d1 * real(k)));
    let chol = linalg::cholesky(&g, &format!("modified Gram matrix at k = {k}"))?;
    Ok(GramForm { g, k, chol })
}

/// `G₀ = diag(I, T)`, the Gram matrix of the energy norm.
pub fn energy_gram(dec: &Decomposition) -> CMat {
    let n = dec.dim();
    linalg::block2x2(&linalg::identity(n), &CMat::zeros(n, n), &CMat::zeros(n, n), &dec.t)
}

/// Extreme eigenvalues of the pencil `(G, G₀)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormEquivalence {
    pub lower: f64,
    pub upper: f64,
}

pub fn verify_norm_equivalence(dec: &Decomposition, k: f64) -> Result<NormEquivalence> {
    let gram = build_gram(dec, k)?;
    let values = linalg::generalized_hermitian_eigenvalues(&gram.g, &energy_gram(dec))?;
    let lower = values[0];
    let upper = *values.last().expect("non-empty spectrum");
    if k < dec.beta {
        let bound = 1.0 - k / dec.beta - EQUIVALENCE_TOL;
        if lower < bound {
            return Err(DecayError::VerificationFailed {
                what: "norm equivalence lower bound".into(),
                observed: lower,
                bound,
            });
        }
    }
    Ok(NormEquivalence { lower, upper })
}

fn finish(
    dec: &Decomposition,
    variant: Variant,
    k: f64,
    (m, p, q): (Option<f64>, Option<f64>, Option<f64>),
    omega1_value: f64,
    omega2_value: f64,
    theta: Option<f64>,
) -> Result<Certificate> {
    let equivalence = verify_norm_equivalence(dec, k)?;
    let valid = theta.is_some();
    let theta = theta.unwrap_or(0.0).max(0.0);
    Ok(Certificate {
        variant,
        k,
        m,
        p,
        q,
        omega1_value,
        omega2_value,
        theta,
        rate: k * theta,
        valid,
        equivalence_lower: 1.0 - k / dec.beta,
        equivalence_upper: equivalence.upper,
    })
}

pub fn make_certificate_t1(dec: &Decomposition, params: Theorem1Params) -> Result<Certificate> {
    if !dec.holds_b() {
        return Err(DecayError::NotAccretiveDamping { beta: dec.beta });
    }
    let omega1 = constants::omega1(dec, params)?;
    let omega2 = constants::omega2(dec, params.k)?;
    let theta = theta_t1(omega1, omega2, params.m);
    finish(dec, Variant::Theorem1, params.k, (Some(params.m), None, None), omega1, omega2, theta)
}

pub fn make_certificate_t2(dec: &Decomposition, params: Theorem2Params) -> Result<Certificate> {
    let omega1p = constants::omega1_prime(dec, params)?;
    let omega2 = constants::omega2(dec, params.k)?;
    let theta = theta_t2(omega1p, omega2, params.p, params.q);
    finish(dec, Variant::Theorem2, params.k, (None, Some(params.p), Some(params.q)), omega1p, omega2, theta)
}

/// Outcome of checking `Re[𝒜x, x] ≤ −rate·[x, x]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AccretivityCheck {
    /// `λ_max` of the pencil `(Herm(G𝒜), G)`; the exact decay rate of the
    /// semigroup in the modified norm is its negation.
    pub lambda_max: f64,
    /// `−rate`.
    pub bound: f64,
    /// `bound − lambda_max`; nonnegative up to the tolerance.
    pub margin: f64,
}

/// Logarithmic norm of `𝒜` in the modified inner product at this `k`.
pub fn modified_log_norm(dec: &Decomposition, gram: &GramForm) -> f64 {
    let ga = &gram.g * build_block_matrix(dec);
    let h = linalg::hermitian_part(&ga);
    let reduced = linalg::congruence_reduce(&h, gram.cholesky());
    *linalg::hermitian_eigenvalues(&reduced).last().expect("non-empty spectrum")
}

pub fn verify_accretivity(dec: &Decomposition, cert: &Certificate, tol: f64) -> Result<AccretivityCheck> {
    if !cert.valid {
        return Err(DecayError::InvalidParams("cannot verify an invalid certificate".into()));
    }
    let gram = build_gram(dec, cert.k)?;
    let lambda_max = modified_log_norm(dec, &gram);
    let bound = -cert.rate;
    if lambda_max > bound + tol {
        return Err(DecayError::VerificationFailed {
            what: "accretivity of -A - rate*I in the modified inner product".into(),
            observed: lambda_max,
            bound,
        });
    }
    Ok(AccretivityCheck { lambda_max, bound, margin: bound - lambda_max })
}

/// Sample of `‖G^{1/2} e^{t𝒜} G^{−1/2}‖₂` against `e^{−rate·t}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContractionSample {
    pub t: f64,
    pub norm: f64,
    pub bound: f64,
}

impl ContractionSample {
    pub fn holds(&self, rtol: f64) -> bool {
        self.norm <= self.bound * (1.0 + rtol)
    }
}

/// Sample times used by the contraction check.
pub const CONTRACTION_TIMES: [f64; 6] = [0.1, 0.5, 1.0, 2.0, 5.0, 10.0];

/// Semigroup norms in the modified inner product. Uses `G = L·Lᴴ`, for
/// which `‖Lᴴ e^{t𝒜} L^{−ᴴ}‖₂ = ‖G^{1/2} e^{t𝒜} G^{−1/2}‖₂`.
pub fn semigroup_contraction(
    dec: &Decomposition,
    cert: &Certificate,
    exp: &MatrixExponential,
    times: &[f64],
) -> Result<Vec<ContractionSample>> {
    let gram = build_gram(dec, cert.k)?;
    let lh = gram.factor_adjoint();
    let lh_inv = lh
        .solve_upper_triangular(&linalg::identity(lh.nrows()))
        .ok_or_else(|| DecayError::NotPositiveDefinite("Gram factor".into()))?;
    Ok(times
        .iter()
        .map(|&t| {
            let m = &lh * exp.at(t) * &lh_inv;
            ContractionSample { t, norm: linalg::spectral_norm(&m), bound: (-cert.rate * t).exp() }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::{decompose, OperatorPair};
    use crate::linalg::{cplx, frobenius};
    use num_complex::Complex64;

    fn scalar(a: Complex64, d: Complex64) -> Decomposition {
        decompose(&OperatorPair::new(CMat::from_element(1, 1, a), CMat::from_element(1, 1, d)).unwrap()).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn block_matrix_scalar() {
        let dec = scalar(real(1.0), real(2.0));
        let expected = CMat::from_row_slice(2, 2, &[real(-2.0), real(-1.0), real(1.0), real(0.0)]);
        assert_eq!(build_block_matrix(&dec), expected);
    }

    #[test]
    fn block_inverse_scalar() {
        let dec = scalar(cplx(1.0, 1.0), real(2.0));
        let inv = block_matrix_inverse(&dec).unwrap();
        let expected = CMat::from_row_slice(
            2,
            2,
            &[real(0.0), real(1.0), cplx(-0.5, 0.5), cplx(-1.0, 1.0)],
        );
        assert!(frobenius(&(inv - expected)) < 1e-15);
    }

    #[test]
    fn gram_scalar() {
        let dec = scalar(real(1.0), real(2.0));
        let gram = build_gram(&dec, 1.0).unwrap();
        let expected = CMat::from_row_slice(2, 2, &[real(1.0), real(1.0), real(1.0), real(3.0)]);
        assert_eq!(gram.g, expected);
        assert!(close(gram.min_eigenvalue(), 2.0 - 2f64.sqrt(), 1e-14));
    }

    #[test]
    fn gram_outlives_k_below_beta() {
        let dec = scalar(real(1.0), real(2.0));
        let gram = build_gram(&dec, 2.0).unwrap();
        // Schur complement 1 + 2k - k^2 = 1 at k = 2.
        let det = gram.g[(0, 0)] * gram.g[(1, 1)] - gram.g[(0, 1)] * gram.g[(1, 0)];
        assert!(close(det.re, 1.0, 1e-14));
        assert!(gram.min_eigenvalue() > 0.0);
        assert!(matches!(build_gram(&dec, 10.0), Err(DecayError::NotPositiveDefinite(_))));
        assert!(matches!(build_gram(&dec, 0.0), Err(DecayError::InvalidParams(_))));
    }

    #[test]
    fn gram_tends_to_energy_gram() {
        let dec = scalar(cplx(3.0, 1.0), real(2.0));
        let gram = build_gram(&dec, 1e-12).unwrap();
        assert!(frobenius(&(gram.g - energy_gram(&dec))) < 1e-11);
    }

    #[test]
    fn t1_scalar_certificates() {
        let dec = scalar(real(1.0), real(2.0));
        let c = make_certificate_t1(&dec, Theorem1Params::new(1.0, 0.5)).unwrap();
        assert!(c.valid);
        assert!(close(c.omega1_value, 1.0, 1e-12));
        assert!(close(c.omega2_value, 4.0, 1e-12));
        assert!(close(c.theta, 0.125, 1e-12));
        assert!(close(c.rate, 0.125, 1e-12));
        assert!(close(c.equivalence_lower, 0.5, 1e-15));

        let c = make_certificate_t1(&dec, Theorem1Params::new(1.0, 1.0)).unwrap();
        assert!(c.valid);
        assert_eq!(c.theta, 0.0);

        let dec = scalar(cplx(1.0, 1.0), real(2.0));
        let c = make_certificate_t1(&dec, Theorem1Params::new(1.0, 1.0)).unwrap();
        assert!(close(c.omega1_value, 0.75, 1e-12));
        assert_eq!(c.theta, 0.0);
    }

    #[test]
    fn t2_scalar_certificates() {
        let dec = scalar(real(1.0), real(2.0));
        let c = make_certificate_t2(&dec, Theorem2Params::new(1.0, 0.25, 0.25)).unwrap();
        assert!(c.valid);
        assert!(close(c.omega1_value, 2.0, 1e-12));
        assert!(close(c.theta, 0.125, 1e-12));
        assert!(close(c.rate, 0.125, 1e-12));

        let c = make_certificate_t2(&dec, Theorem2Params::new(1.0, 0.5, 0.5)).unwrap();
        assert!(c.valid);
        assert_eq!(c.theta, 0.0);

        let dec = scalar(cplx(1.0, 1.0), real(2.0));
        let c = make_certificate_t2(&dec, Theorem2Params::new(1.0, 0.5, 0.25)).unwrap();
        assert!(close(c.omega1_value, 1.5, 1e-12));
        assert!(close(c.theta, 0.0625, 1e-12));
    }

    #[test]
    fn invalid_certificate_has_zero_rate() {
        // omega1 = 0.5/k - 1 - 100/(4 m k^2) < 0 for every admissible k, m.
        let dec = scalar(cplx(1.0, 10.0), real(0.5));
        let c = make_certificate_t1(&dec, Theorem1Params::new(0.25, 1.0)).unwrap();
        assert!(!c.valid);
        assert_eq!(c.rate, 0.0);
        assert!(verify_accretivity(&dec, &c, VERIFY_TOL).is_err());
    }

    #[test]
    fn accretivity_scalar_oracle() {
        // Herm(G𝒜) = -I and λ(G) = 2 ± √2, so λ_max(Herm(G𝒜), G) = -1/(2+√2).
        let dec = scalar(real(1.0), real(2.0));
        let c = make_certificate_t1(&dec, Theorem1Params::new(1.0, 0.5)).unwrap();
        let check = verify_accretivity(&dec, &c, VERIFY_TOL).unwrap();
        assert!(close(check.lambda_max, -1.0 / (2.0 + 2f64.sqrt()), 1e-13));
        assert!(check.lambda_max <= -0.125);
        assert!(close(check.margin, -0.125 + 1.0 / (2.0 + 2f64.sqrt()), 1e-13));
    }

    #[test]
    fn zero_rate_is_plain_accretivity() {
        let dec = scalar(real(1.0), real(2.0));
        let c = make_certificate_t1(&dec, Theorem1Params::new(1.0, 1.0)).unwrap();
        let check = verify_accretivity(&dec, &c, VERIFY_TOL).unwrap();
        assert!(check.lambda_max <= 0.0);
        assert_eq!(check.bound, 0.0);
    }

    #[test]
    fn norm_equivalence_scalar() {
        let dec = scalar(real(1.0), real(2.0));
        let eq = verify_norm_equivalence(&dec, 1.0).unwrap();
        assert!(eq.lower >= 0.5);
        let eq = verify_norm_equivalence(&dec, 1e-12).unwrap();
        assert!(close(eq.lower, 1.0, 1e-11) && close(eq.upper, 1.0, 1e-11));
    }

    #[test]
    fn contraction_scalar() {
        let dec = scalar(real(1.0), real(2.0));
        let c = make_certificate_t1(&dec, Theorem1Params::new(1.0, 0.5)).unwrap();
        let exp = MatrixExponential::new(&build_block_matrix(&dec)).unwrap();
        let samples = semigroup_contraction(&dec, &c, &exp, &CONTRACTION_TIMES).unwrap();
        assert!(samples.iter().all(|s| s.holds(1e-6)));
        let s0 = semigroup_contraction(&dec, &c, &exp, &[0.0]).unwrap();
        assert!(close(s0[0].norm, 1.0, 1e-12));
    }
}
