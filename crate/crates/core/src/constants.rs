//! The scalar ingredients of the two decay certificates.
//!
//! * `ω₁(k, m) = λ_min( D₁/k − I − Cᴴ T⁻¹ C/(4m) )` with `C = S̃/k − D₂`,
//! * `ω₂(k) = λ_max` of the pencil `(T + k D₁ + k² I, T)`,
//! * `ω₁′(k, p, q) = a₀ ( δ/k − ‖S̃‖²/(4 p k²) − ‖D₂‖²/(4 q) )`.
//!
//! `ω₁` uses the squared dual norm `‖Cx‖²₋₁ = xᴴ Cᴴ T⁻¹ C x`, which is the
//! quantity the Cauchy–Schwarz step of the decay argument actually produces.

use serde::{Deserialize, Serialize};

use crate::decomposition::Decomposition;
use crate::error::{DecayError, Result};
use crate::linalg::{self, real, CMat, CVec};

/// Parameters of the first certificate: `0 < k < β`, `0 < m ≤ 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Params {
    pub k: f64,
    pub m: f64,
}

/// Parameters of the second certificate: `0 < k < β`, `p, q > 0`, `p + q ≤ 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Theorem2Params {
    pub k: f64,
    pub p: f64,
    pub q: f64,
}

fn check_k(dec: &Decomposition, k: f64) -> Result<()> {
    if !(k > 0.0 && k < dec.beta) {
        return Err(DecayError::InvalidParams(format!("k = {k} must lie in (0, beta = {})", dec.beta)));
    }
    Ok(())
}

impl Theorem1Params {
    pub fn new(k: f64, m: f64) -> Self {
        Self { k, m }
    }

    pub fn validate(&self, dec: &Decomposition) -> Result<()> {
        check_k(dec, self.k)?;
        if !(self.m > 0.0 && self.m <= 1.0) {
            return Err(DecayError::InvalidParams(format!("m = {} must lie in (0, 1]", self.m)));
        }
        Ok(())
    }
}

impl Theorem2Params {
    pub fn new(k: f64, p: f64, q: f64) -> Self {
        Self { k, p, q }
    }

    pub fn validate(&self, dec: &Decomposition) -> Result<()> {
        check_k(dec, self.k)?;
        if !(self.p > 0.0 && self.q > 0.0 && self.p + self.q <= 1.0) {
            return Err(DecayError::InvalidParams(format!(
                "p = {}, q = {} must be positive with p + q <= 1",
                self.p, self.q
            )));
        }
        Ok(())
    }
}

/// The k-dependent pieces of `ω₁`, reusable across many values of m.
#[derive(Clone, Debug)]
pub struct Omega1Parts {
    /// `D₁/k − I`.
    pub base: CMat,
    /// `Cᴴ T⁻¹ C / 4`.
    pub penalty: CMat,
    /// `C = S̃/k − D₂`.
    pub coupling: CMat,
}

impl Omega1Parts {
    pub fn new(dec: &Decomposition, k: f64) -> Self {
        let n = dec.dim();
        let inv_k = real(1.0 / k);
        let base = &dec.d1 * inv_k - linalg::identity(n);
        let coupling = &dec.s_tilde * inv_k - &dec.d2;
        let penalty = linalg::hermitian_part(&(coupling.adjoint() * dec.solve_t(&coupling))).map(|z| z * 0.25);
        Self { base, penalty, coupling }
    }

    /// The Hermitian matrix whose smallest eigenvalue is `ω₁(k, m)`.
    pub fn matrix(&self, m: f64) -> CMat {
        &self.base - &self.penalty * real(1.0 / m)
    }

    pub fn value(&self, m: f64) -> f64 {
        linalg::hermitian_eigenvalues(&self.matrix(m))[0]
    }

    /// `ω₁(k, m) > level`, decided by a Cholesky attempt on the shifted
    /// matrix instead of an eigensolve.
    pub fn exceeds(&self, m: f64, level: f64) -> bool {
        let mut shifted = self.matrix(m);
        for j in 0..shifted.nrows() {
            shifted[(j, j)] -= real(level);
        }
        linalg::cholesky(&shifted, "shifted omega1 matrix").is_ok()
    }
}

/// `ω₁` together with the statement-as-written variant for comparison.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Omega1Breakdown {
    /// Squared-norm quotient, the value used by certificates.
    pub value: f64,
    /// `(1/k)(D₁x,x) − ‖x‖² − ‖Cx‖₋₁/(4m)` (unsquared norm) evaluated at the
    /// unit minimizer of the squared quotient. The unsquared quotient is not
    /// homogeneous, so it has no scale-free infimum; this is a diagnostic only.
    pub unsquared_at_minimizer: f64,
}

pub fn omega1(dec: &Decomposition, params: Theorem1Params) -> Result<f64> {
    params.validate(dec)?;
    Ok(Omega1Parts::new(dec, params.k).value(params.m))
}

pub fn omega1_breakdown(dec: &Decomposition, params: Theorem1Params) -> Result<Omega1Breakdown> {
    params.validate(dec)?;
    let parts = Omega1Parts::new(dec, params.k);
    let eig = linalg::hermitian_eigen(&parts.matrix(params.m));
    let x: CVec = eig.vectors.column(0).into_owned();
    let quad = |m: &CMat| (x.adjoint() * m * &x)[(0, 0)].re;
    let cx = &parts.coupling * &x;
    let dual = dec.scale_norm_sqr(&cx, -1).max(0.0).sqrt();
    Ok(Omega1Breakdown {
        value: eig.min(),
        unsquared_at_minimizer: quad(&parts.base) - dual / (4.0 * params.m),
    })
}

pub fn omega2(dec: &Decomposition, k: f64) -> Result<f64> {
    if !(k > 0.0) {
        return Err(DecayError::InvalidParams(format!("k = {k} must be positive")));
    }
    let n = dec.dim();
    let numerator = &dec.t + &dec.d1 * real(k) + linalg::identity(n) * real(k * k);
    let value = *linalg::generalized_hermitian_eigenvalues(&numerator, &dec.t)?
        .last()
        .expect("non-empty spectrum");
    debug_assert!(
        value <= omega2_bounds(dec, k).footnote * (1.0 + 1e-8) + 1e-12,
        "omega2 exceeds its analytic upper bound"
    );
    Ok(value)
}

/// Analytic upper bounds on `ω₂` that appear alongside its definition.
/// Reported for reference; certificates use the exact eigenvalue.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Omega2Bounds {
    /// `1 + k‖D₁‖ + k²/a₀`.
    pub footnote: f64,
    /// `1 + k‖D₁‖ + kβ/a₀`.
    pub in_text: f64,
}

pub fn omega2_bounds(dec: &Decomposition, k: f64) -> Omega2Bounds {
    Omega2Bounds {
        footnote: 1.0 + k * dec.norm_d1_dual + k * k / dec.a0,
        in_text: 1.0 + k * dec.norm_d1_dual + k * dec.beta / dec.a0,
    }
}

pub fn omega1_prime(dec: &Decomposition, params: Theorem2Params) -> Result<f64> {
    if !dec.holds_c() {
        return Err(DecayError::AssumptionCViolated { delta: dec.delta });
    }
    params.validate(dec)?;
    Ok(omega1_prime_unchecked(dec, params))
}

pub(crate) fn omega1_prime_unchecked(dec: &Decomposition, params: Theorem2Params) -> f64 {
    let Theorem2Params { k, p, q } = params;
    dec.a0 * (dec.delta / k - dec.norm_s * dec.norm_s / (4.0 * p * k * k) - dec.norm_d2_dual * dec.norm_d2_dual / (4.0 * q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::{decompose, OperatorPair};
    use crate::linalg::cplx;
    use num_complex::Complex64;

    fn scalar(a: Complex64, d: Complex64) -> Decomposition {
        decompose(&OperatorPair::new(CMat::from_element(1, 1, a), CMat::from_element(1, 1, d)).unwrap()).unwrap()
    }

    #[test]
    fn omega1_scalar_values() {
        let dec = scalar(real(1.0), real(2.0));
        assert!((omega1(&dec, Theorem1Params::new(1.0, 0.5)).unwrap() - 1.0).abs() < 1e-14);
        let dec = scalar(cplx(1.0, 1.0), real(2.0));
        assert!((omega1(&dec, Theorem1Params::new(1.0, 1.0)).unwrap() - 0.75).abs() < 1e-14);
    }

    #[test]
    fn omega1_vanishes_at_boundary_damping() {
        // D = k exactly: only k < beta is admissible, so approach from below.
        let k = 1.0;
        let dec = scalar(real(1.0), real(k * (1.0 + 1e-12)));
        let v = omega1(&dec, Theorem1Params::new(k, 0.3)).unwrap();
        assert!(v.abs() < 1e-11);
    }

    #[test]
    fn omega1_rejects_bad_params() {
        let dec = scalar(real(1.0), real(2.0));
        assert!(matches!(omega1(&dec, Theorem1Params::new(2.0, 0.5)), Err(DecayError::InvalidParams(_))));
        assert!(matches!(omega1(&dec, Theorem1Params::new(1.0, 0.0)), Err(DecayError::InvalidParams(_))));
        assert!(matches!(omega1(&dec, Theorem1Params::new(1.0, 1.5)), Err(DecayError::InvalidParams(_))));
        assert!(matches!(omega1(&dec, Theorem1Params::new(-0.1, 0.5)), Err(DecayError::InvalidParams(_))));
    }

    #[test]
    fn omega2_scalar_values() {
        let dec = scalar(real(1.0), real(2.0));
        assert!((omega2(&dec, 1.0).unwrap() - 4.0).abs() < 1e-14);
        assert!((omega2(&dec, 0.5).unwrap() - 2.25).abs() < 1e-14);
        assert!((omega2(&dec, 1e-9).unwrap() - 1.0).abs() < 1e-8);
        assert!(omega2(&dec, 0.0).is_err());
    }

    #[test]
    fn omega1_prime_scalar_values() {
        let dec = scalar(real(1.0), real(2.0));
        let v = omega1_prime(&dec, Theorem2Params::new(1.0, 0.5, 0.5)).unwrap();
        assert!((v - 2.0).abs() < 1e-14);
        let dec = scalar(cplx(1.0, 1.0), real(2.0));
        let v = omega1_prime(&dec, Theorem2Params::new(1.0, 0.5, 0.5)).unwrap();
        assert!((v - 1.5).abs() < 1e-14);
    }

    #[test]
    fn omega1_prime_canceled_penalty_is_zero() {
        // a0 = 1, delta = 2, k = 1, p = 1/2: delta/k = |S|^2/(4 p k^2) when |S|^2 = 4.
        let dec = scalar(cplx(1.0, 2.0), real(2.0));
        let v = omega1_prime(&dec, Theorem2Params::new(1.0, 0.5, 0.5)).unwrap();
        assert!(v.abs() < 1e-14);
    }

    #[test]
    fn omega1_prime_requires_c() {
        let i = cplx(0.0, 1.0);
        let d = CMat::from_element(1, 1, i);
        let dec = decompose(&OperatorPair::new(CMat::identity(1, 1), d).unwrap()).unwrap();
        let err = omega1_prime(&dec, Theorem2Params::new(0.5, 0.5, 0.5)).unwrap_err();
        assert!(matches!(err, DecayError::AssumptionCViolated { .. }));
    }

    #[test]
    fn breakdown_matches_in_the_scalar_case() {
        // n = 1: unit minimizer x = 1, ‖Cx‖₋₁ = |C|/sqrt(T) = 1.
        let dec = scalar(cplx(1.0, 1.0), real(2.0));
        let b = omega1_breakdown(&dec, Theorem1Params::new(1.0, 1.0)).unwrap();
        assert!((b.value - 0.75).abs() < 1e-14);
        assert!((b.unsquared_at_minimizer - 0.75).abs() < 1e-14);
    }

    #[test]
    fn omega2_bounds_scalar() {
        let dec = scalar(real(1.0), real(2.0));
        let b = omega2_bounds(&dec, 1.0);
        assert!((b.footnote - 4.0).abs() < 1e-14);
        assert!((b.in_text - 5.0).abs() < 1e-14);
    }
}
