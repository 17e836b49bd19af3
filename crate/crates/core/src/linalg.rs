//! Dense complex linear algebra used throughout the crate.
//!
//! Everything here is a thin layer over `nalgebra`: Hermitian splits,
//! sorted Hermitian eigensolves, Cholesky congruence for generalized
//! Hermitian-definite problems, a complex Schur based eigendecomposition
//! with eigenvectors, and a matrix exponential that prefers the
//! eigendecomposition when it is well conditioned.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, Schur};
use num_complex::Complex64;

use crate::error::{DecayError, Result};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// Largest eigenvector condition number for which the eigendecomposition
/// route of the matrix exponential is trusted.
pub const EIGEN_COND_LIMIT: f64 = 1e8;

#[inline]
pub fn cplx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn real(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `(M + Mᴴ)/2`.
pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()).map(|z| z * 0.5)
}

/// `(M − Mᴴ)/(2i)`, so that `M = H(M) + i·K(M)` with both parts Hermitian.
pub fn skew_hermitian_part(m: &CMat) -> CMat {
    (m - m.adjoint()).map(|z| z * cplx(0.0, -0.5))
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn is_finite(m: &CMat) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vec_norm(v: &CVec) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest singular value.
pub fn spectral_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().iter().cloned().fold(0.0, f64::max)
}

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

impl HermitianEigen {
    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().expect("non-empty spectrum")
    }

    /// `V·diag(f(λ))·Vᴴ`.
    pub fn apply_fn(&self, f: impl Fn(f64) -> f64) -> CMat {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for j in 0..n {
            let s = f(self.values[j]);
            scaled.column_mut(j).scale_mut(s);
        }
        hermitian_part(&(scaled * self.vectors.adjoint()))
    }
}

/// Full eigendecomposition of the Hermitian part of `m` (callers pass
/// matrices that are Hermitian up to rounding).
pub fn hermitian_eigen(m: &CMat) -> HermitianEigen {
    let h = hermitian_part(m);
    let eig = h.symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMat::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    HermitianEigen { values, vectors }
}

/// Ascending eigenvalues of the Hermitian part of `m`.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let mut values: Vec<f64> = hermitian_part(m).symmetric_eigenvalues().iter().cloned().collect();
    values.sort_by(f64::total_cmp);
    values
}

/// Spectral norm of a Hermitian matrix (largest |λ|).
pub fn hermitian_norm(m: &CMat) -> f64 {
    let values = hermitian_eigenvalues(m);
    values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

/// Cholesky factorization of a Hermitian positive-definite matrix.
pub fn cholesky(m: &CMat, what: &str) -> Result<Cholesky<Complex64, Dyn>> {
    let fail = || DecayError::NotPositiveDefinite(what.to_string());
    let chol = Cholesky::new(hermitian_part(m)).ok_or_else(fail)?;
    // the complex factorization takes square roots of negative pivots
    // without failing; a valid factor has a real positive diagonal
    let l = chol.l_dirty();
    let ok = (0..l.nrows()).all(|j| {
        let d = l[(j, j)];
        d.re > 0.0 && d.re.is_finite() && d.im.abs() <= 1e-12 * d.re
    });
    if ok {
        Ok(chol)
    } else {
        Err(fail())
    }
}

/// `L⁻¹·H·L⁻ᴴ` for `B = L·Lᴴ`; the standard-form matrix of the pencil (H, B).
pub fn congruence_reduce(h: &CMat, chol: &Cholesky<Complex64, Dyn>) -> CMat {
    let l = chol.l();
    let x = l
        .solve_lower_triangular(&hermitian_part(h))
        .expect("Cholesky factor has a nonzero diagonal");
    let c = l
        .solve_lower_triangular(&x.adjoint())
        .expect("Cholesky factor has a nonzero diagonal");
    hermitian_part(&c)
}

/// Ascending eigenvalues of the Hermitian-definite problem `H x = λ B x`.
pub fn generalized_hermitian_eigenvalues(h: &CMat, b: &CMat) -> Result<Vec<f64>> {
    let chol = cholesky(b, "generalized eigenproblem metric")?;
    Ok(hermitian_eigenvalues(&congruence_reduce(h, &chol)))
}

/// Eigendecomposition of a general complex matrix.
///
/// Eigenpairs are sorted by descending real part, ties by ascending
/// imaginary part. Columns of `vectors` have unit 2-norm.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<Complex64>,
    pub vectors: CMat,
}

impl EigenDecomposition {
    /// `κ₂(V) = σ_max/σ_min`; infinite when V is numerically singular.
    pub fn condition_number(&self) -> f64 {
        let sv = self.vectors.singular_values();
        let max = sv.iter().cloned().fold(0.0, f64::max);
        let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
        if min > 0.0 {
            max / min
        } else {
            f64::INFINITY
        }
    }
}

/// Deterministic eigenvalue ordering used in every report.
pub fn spectrum_order(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    b.re.total_cmp(&a.re).then(a.im.total_cmp(&b.im))
}

pub fn eigen_decomposition(m: &CMat) -> Result<EigenDecomposition> {
    let n = m.nrows();
    if n == 0 || n != m.ncols() {
        return Err(DecayError::InvalidInput("eigendecomposition needs a non-empty square matrix".into()));
    }
    if !is_finite(m) {
        return Err(DecayError::InvalidInput("matrix has non-finite entries".into()));
    }
    let schur = Schur::try_new(m.clone(), f64::EPSILON, 1000 * n.max(10))
        .ok_or_else(|| DecayError::EigensolverFailure(format!("complex Schur iteration on a {n}x{n} matrix")))?;
    let (q, t) = schur.unpack();

    let tnorm = frobenius(&t).max(f64::MIN_POSITIVE);
    let small = f64::EPSILON * tnorm;
    let mut y = CMat::zeros(n, n);
    for i in 0..n {
        let lambda = t[(i, i)];
        y[(i, i)] = real(1.0);
        for j in (0..i).rev() {
            let mut acc = Complex64::new(0.0, 0.0);
            for l in (j + 1)..=i {
                acc += t[(j, l)] * y[(l, i)];
            }
            let mut den = t[(j, j)] - lambda;
            if den.norm() < small {
                den = real(small);
            }
            y[(j, i)] = -acc / den;
        }
    }
    let mut vectors = q * y;
    for j in 0..n {
        let norm = vectors.column(j).norm();
        if norm > 0.0 {
            vectors.column_mut(j).unscale_mut(norm);
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| spectrum_order(&t[(a, a)], &t[(b, b)]));
    let values = order.iter().map(|&i| t[(i, i)]).collect();
    let vectors = CMat::from_fn(n, n, |r, c| vectors[(r, order[c])]);
    Ok(EigenDecomposition { values, vectors })
}

/// Eigenvalues only, in report order.
pub fn eigenvalues(m: &CMat) -> Result<Vec<Complex64>> {
    Ok(eigen_decomposition(m)?.values)
}

/// Max real part of the spectrum.
pub fn spectral_abscissa(values: &[Complex64]) -> f64 {
    values.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
}

/// Which algorithm a [`MatrixExponential`] uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExpMethod {
    Eigen,
    ScalingSquaring,
}

/// `t ↦ e^{tM}` for a fixed matrix M.
///
/// Uses `V·diag(e^{tλ})·V⁻¹` when the eigenvector matrix has condition
/// number at most [`EIGEN_COND_LIMIT`], otherwise Padé scaling and squaring
/// at every requested `t`.
#[derive(Clone, Debug)]
pub struct MatrixExponential {
    matrix: CMat,
    route: ExpRoute,
}

#[derive(Clone, Debug)]
enum ExpRoute {
    Eigen { values: Vec<Complex64>, vectors: CMat, inverse: CMat },
    Dense,
}

impl MatrixExponential {
    pub fn new(m: &CMat) -> Result<Self> {
        let eig = eigen_decomposition(m)?;
        Ok(Self::from_decomposition(m, eig))
    }

    pub fn from_decomposition(m: &CMat, eig: EigenDecomposition) -> Self {
        let route = if eig.condition_number() <= EIGEN_COND_LIMIT {
            match eig.vectors.clone().lu().try_inverse() {
                Some(inverse) => ExpRoute::Eigen { values: eig.values, vectors: eig.vectors, inverse },
                None => ExpRoute::Dense,
            }
        } else {
            ExpRoute::Dense
        };
        Self { matrix: m.clone(), route }
    }

    /// Forces scaling and squaring regardless of conditioning.
    pub fn dense(m: &CMat) -> Self {
        Self { matrix: m.clone(), route: ExpRoute::Dense }
    }

    pub fn method(&self) -> ExpMethod {
        match self.route {
            ExpRoute::Eigen { .. } => ExpMethod::Eigen,
            ExpRoute::Dense => ExpMethod::ScalingSquaring,
        }
    }

    pub fn at(&self, t: f64) -> CMat {
        match &self.route {
            ExpRoute::Eigen { values, vectors, inverse } => {
                let mut scaled = vectors.clone();
                for (j, lambda) in values.iter().enumerate() {
                    let f = (lambda * t).exp();
                    for z in scaled.column_mut(j).iter_mut() {
                        *z *= f;
                    }
                }
                scaled * inverse
            }
            ExpRoute::Dense => (&self.matrix * real(t)).exp(),
        }
    }

    /// `e^{tM}·x`.
    pub fn apply(&self, t: f64, x: &CVec) -> CVec {
        match &self.route {
            ExpRoute::Eigen { values, vectors, inverse } => {
                let mut coeffs = inverse * x;
                for (c, lambda) in coeffs.iter_mut().zip(values) {
                    *c *= (lambda * t).exp();
                }
                vectors * coeffs
            }
            ExpRoute::Dense => (&self.matrix * real(t)).exp() * x,
        }
    }
}

/// Builds `[[a, b], [c, d]]` from four equally sized square blocks.
pub fn block2x2(a: &CMat, b: &CMat, c: &CMat, d: &CMat) -> CMat {
    let n = a.nrows();
    let mut out = CMat::zeros(2 * n, 2 * n);
    out.view_mut((0, 0), (n, n)).copy_from(a);
    out.view_mut((0, n), (n, n)).copy_from(b);
    out.view_mut((n, 0), (n, n)).copy_from(c);
    out.view_mut((n, n), (n, n)).copy_from(d);
    out
}
