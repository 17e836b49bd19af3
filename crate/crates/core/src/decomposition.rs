//! Input validation and the Hermitian splitting of stiffness and damping.
//!
//! For `u'' + D u' + A u = 0` on `ℂⁿ` the stiffness is split as
//! `A = T + i·S̃` and the damping as `D = D₁ + i·D₂`, all four Hermitian.
//! The scale norms `‖x‖ₛ = (xᴴ Tˢ x)^{1/2}` for `s ∈ {−1, 0, 1}` turn the
//! operator norms `H₁ → H₋₁` into spectral norms of `T^{−1/2}(·)T^{−1/2}`.

use serde::{Deserialize, Serialize};

use crate::error::{DecayError, Result};
use crate::linalg::{self, CMat};

/// Relative threshold for positive-definiteness decisions.
pub const DEFINITENESS_RTOL: f64 = 1e-10;

/// The stiffness/damping pair `(A, D)` of `u'' + D u' + A u = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorPair {
    stiffness: CMat,
    damping: CMat,
}

impl OperatorPair {
    pub fn new(stiffness: CMat, damping: CMat) -> Result<Self> {
        let n = stiffness.nrows();
        if n == 0 || stiffness.ncols() != n {
            return Err(DecayError::InvalidInput(format!(
                "stiffness must be square and non-empty, got {}x{}",
                stiffness.nrows(),
                stiffness.ncols()
            )));
        }
        if damping.nrows() != n || damping.ncols() != n {
            return Err(DecayError::DimensionMismatch {
                stiffness: n,
                damping_rows: damping.nrows(),
                damping_cols: damping.ncols(),
            });
        }
        if !linalg::is_finite(&stiffness) || !linalg::is_finite(&damping) {
            return Err(DecayError::InvalidInput("matrix entries must be finite".into()));
        }
        Ok(Self { stiffness, damping })
    }

    pub fn dim(&self) -> usize {
        self.stiffness.nrows()
    }

    /// `A`.
    pub fn stiffness(&self) -> &CMat {
        &self.stiffness
    }

    /// `D`.
    pub fn damping(&self) -> &CMat {
        &self.damping
    }
}

/// Structural splitting of an [`OperatorPair`] plus the constants the decay
/// bounds are built from.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pair: OperatorPair,
    /// Hermitian part of A.
    pub t: CMat,
    /// `(A − Aᴴ)/(2i)`.
    pub s_tilde: CMat,
    /// `T^{−1/2} S̃ T^{−1/2}`.
    pub s: CMat,
    pub d1: CMat,
    pub d2: CMat,
    /// `λ_min(T)`.
    pub a0: f64,
    /// `λ_min(D₁)`.
    pub beta: f64,
    /// Smallest eigenvalue of the pencil `(D₁, T)`.
    pub delta: f64,
    /// `‖S‖₂`: the tangent of the sector containing the numerical range of A.
    pub sector_tan: f64,
    /// `‖S̃‖` as a map `H₁ → H₋₁`; numerically equal to `sector_tan`.
    pub norm_s: f64,
    pub norm_d1_dual: f64,
    pub norm_d2_dual: f64,
    t_inv_sqrt: CMat,
    t_chol: nalgebra::Cholesky<num_complex::Complex64, nalgebra::Dyn>,
}

/// Which of the standing assumptions hold, with their witnesses.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    /// `Re(Ax,x) ≥ a₀‖x‖²` with `a₀ > 0`.
    pub holds_a: bool,
    /// `Re(Dx,x) ≥ β‖x‖²` with `β > 0`.
    pub holds_b: bool,
    /// `Re(Dx,x) ≥ δ‖x‖₁²` with `δ > 0`.
    pub holds_c: bool,
    pub a0: f64,
    pub beta: f64,
    pub delta: f64,
}

impl Decomposition {
    pub fn pair(&self) -> &OperatorPair {
        &self.pair
    }

    pub fn dim(&self) -> usize {
        self.pair.dim()
    }

    /// `T^{−1/2}`.
    pub fn t_inv_sqrt(&self) -> &CMat {
        &self.t_inv_sqrt
    }

    /// `T⁻¹·B` via the Cholesky factor of T.
    pub fn solve_t(&self, b: &CMat) -> CMat {
        self.t_chol.solve(b)
    }

    /// `T^{−1/2} M T^{−1/2}`, the matrix of an `H₁ → H₋₁` map in the
    /// orthonormal coordinates of H.
    pub fn to_dual_coordinates(&self, m: &CMat) -> CMat {
        &self.t_inv_sqrt * m * &self.t_inv_sqrt
    }

    pub fn holds_b(&self) -> bool {
        self.beta > DEFINITENESS_RTOL * linalg::hermitian_norm(&self.d1)
    }

    pub fn holds_c(&self) -> bool {
        self.delta > DEFINITENESS_RTOL * self.norm_d1_dual
    }

    /// Scale norm `‖x‖ₛ² = xᴴ Tˢ x` for `s ∈ {−1, 0, 1}`.
    pub fn scale_norm_sqr(&self, x: &linalg::CVec, s: i32) -> f64 {
        match s {
            0 => x.norm_squared(),
            1 => (x.adjoint() * &self.t * x)[(0, 0)].re,
            -1 => (x.adjoint() * self.t_chol.solve(x))[(0, 0)].re,
            _ => panic!("only the scales -1, 0, 1 are realized"),
        }
    }
}

pub fn decompose(pair: &OperatorPair) -> Result<Decomposition> {
    let a = pair.stiffness();
    let d = pair.damping();
    let t = linalg::hermitian_part(a);
    let s_tilde = linalg::skew_hermitian_part(a);
    let d1 = linalg::hermitian_part(d);
    let d2 = linalg::skew_hermitian_part(d);

    let t_eig = linalg::hermitian_eigen(&t);
    let a0 = t_eig.min();
    let t_norm = t_eig.values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let threshold = DEFINITENESS_RTOL * t_norm;
    if !(a0 > threshold) {
        return Err(DecayError::NotSectorial { lambda_min: a0, threshold });
    }
    let t_inv_sqrt = t_eig.apply_fn(|v| 1.0 / v.sqrt());
    let t_chol = linalg::cholesky(&t, "Hermitian part of the stiffness")?;

    let beta = linalg::hermitian_eigenvalues(&d1)[0];
    let delta = linalg::hermitian_eigenvalues(&linalg::congruence_reduce(&d1, &t_chol))[0];

    let congruent = |m: &CMat| linalg::hermitian_part(&(&t_inv_sqrt * m * &t_inv_sqrt));
    let s = congruent(&s_tilde);
    let sector_tan = linalg::hermitian_norm(&s);
    let norm_d1_dual = linalg::hermitian_norm(&congruent(&d1));
    let norm_d2_dual = linalg::hermitian_norm(&congruent(&d2));

    Ok(Decomposition {
        pair: pair.clone(),
        t,
        s_tilde,
        s,
        d1,
        d2,
        a0,
        beta,
        delta,
        sector_tan,
        norm_s: sector_tan,
        norm_d1_dual,
        norm_d2_dual,
        t_inv_sqrt,
        t_chol,
    })
}

pub fn check_assumptions(dec: &Decomposition) -> AssumptionReport {
    let holds_b = dec.holds_b();
    // (C) implies (B); a rounding-level delta cannot outvote beta.
    let holds_c = dec.holds_c() && holds_b;
    AssumptionReport {
        holds_a: dec.a0 > 0.0,
        holds_b,
        holds_c,
        a0: dec.a0,
        beta: dec.beta,
        delta: dec.delta,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cplx, frobenius, real};

    fn scalar(a: num_complex::Complex64, d: num_complex::Complex64) -> Decomposition {
        let pair = OperatorPair::new(CMat::from_element(1, 1, a), CMat::from_element(1, 1, d)).unwrap();
        decompose(&pair).unwrap()
    }

    #[test]
    fn scalar_split() {
        let dec = scalar(cplx(1.0, 1.0), real(2.0));
        assert_eq!(dec.t[(0, 0)], real(1.0));
        assert_eq!(dec.s_tilde[(0, 0)], real(1.0));
        assert_eq!(dec.d1[(0, 0)], real(2.0));
        assert_eq!(dec.d2[(0, 0)], real(0.0));
        assert!((dec.a0 - 1.0).abs() < 1e-15);
        assert!((dec.beta - 2.0).abs() < 1e-15);
        assert!((dec.delta - 2.0).abs() < 1e-15);
        assert!((dec.sector_tan - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_by_two_stiffness() {
        let i = cplx(0.0, 1.0);
        let a = CMat::from_row_slice(2, 2, &[real(1.0), i, i, real(1.0)]);
        let d = CMat::identity(2, 2) * real(2.0);
        let dec = decompose(&OperatorPair::new(a, d).unwrap()).unwrap();
        assert!(frobenius(&(&dec.t - CMat::identity(2, 2))) < 1e-15);
        let swap = CMat::from_row_slice(2, 2, &[real(0.0), real(1.0), real(1.0), real(0.0)]);
        assert!(frobenius(&(&dec.s_tilde - swap)) < 1e-15);
        assert!((dec.a0 - 1.0).abs() < 1e-14);
        assert!((dec.beta - 2.0).abs() < 1e-14);
        assert!((dec.sector_tan - 1.0).abs() < 1e-14);
    }

    #[test]
    fn nonnormal_damping_split() {
        let a = CMat::identity(2, 2);
        let d = CMat::from_row_slice(2, 2, &[real(2.0), real(1.0), real(0.0), real(2.0)]);
        let dec = decompose(&OperatorPair::new(a, d).unwrap()).unwrap();
        let d1 = CMat::from_row_slice(2, 2, &[real(2.0), real(0.5), real(0.5), real(2.0)]);
        let d2 = CMat::from_row_slice(2, 2, &[real(0.0), cplx(0.0, -0.5), cplx(0.0, 0.5), real(0.0)]);
        assert!(frobenius(&(&dec.d1 - d1)) < 1e-15);
        assert!(frobenius(&(&dec.d2 - d2)) < 1e-15);
        assert!((dec.beta - 1.5).abs() < 1e-14);
        let report = check_assumptions(&dec);
        assert!(report.holds_a && report.holds_b && report.holds_c);
        assert!((report.delta - 1.5).abs() < 1e-14);
    }

    #[test]
    fn identity_case_all_assumptions() {
        let dec = decompose(&OperatorPair::new(CMat::identity(3, 3), CMat::identity(3, 3) * real(2.0)).unwrap()).unwrap();
        let r = check_assumptions(&dec);
        assert!(r.holds_a && r.holds_b && r.holds_c);
        assert!((r.delta - 2.0).abs() < 1e-14);
    }

    #[test]
    fn skew_damping_fails_b() {
        let i = cplx(0.0, 1.0);
        let d = CMat::from_row_slice(2, 2, &[i, real(1.0), real(-1.0), real(0.0)]);
        let dec = decompose(&OperatorPair::new(CMat::identity(2, 2), d).unwrap()).unwrap();
        let r = check_assumptions(&dec);
        assert!(r.holds_a);
        assert!(!r.holds_b);
        assert!(!r.holds_c);
    }

    #[test]
    fn indefinite_stiffness_rejected() {
        let a = CMat::from_row_slice(2, 2, &[real(1.0), real(0.0), real(0.0), real(-1.0)]);
        let err = decompose(&OperatorPair::new(a, CMat::identity(2, 2)).unwrap()).unwrap_err();
        assert!(matches!(err, DecayError::NotSectorial { .. }));
    }

    #[test]
    fn pair_validation() {
        let err = OperatorPair::new(CMat::identity(2, 2), CMat::identity(3, 3)).unwrap_err();
        assert!(matches!(err, DecayError::DimensionMismatch { .. }));
        let mut bad = CMat::identity(2, 2);
        bad[(0, 1)] = real(f64::NAN);
        assert!(matches!(OperatorPair::new(bad, CMat::identity(2, 2)), Err(DecayError::InvalidInput(_))));
        assert!(OperatorPair::new(CMat::zeros(0, 0), CMat::zeros(0, 0)).is_err());
    }

    #[test]
    fn scale_norms() {
        let dec = scalar(real(4.0), real(1.0));
        let x = linalg::CVec::from_element(1, real(1.0));
        assert!((dec.scale_norm_sqr(&x, 1) - 4.0).abs() < 1e-15);
        assert!((dec.scale_norm_sqr(&x, 0) - 1.0).abs() < 1e-15);
        assert!((dec.scale_norm_sqr(&x, -1) - 0.25).abs() < 1e-15);
    }
}
