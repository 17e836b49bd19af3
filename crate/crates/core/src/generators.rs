//! Problem families satisfying the standing assumptions.
//!
//! Random systems are reproducible across platforms: every draw comes from
//! `ChaCha8Rng::seed_from_u64(seed)`, a counter-based stream cipher whose
//! output depends only on the seed and the number of values consumed. The
//! draw order is fixed: four Haar-like unitaries (each from an n×n complex
//! Gaussian matrix, row-major, real part before imaginary part) interleaved
//! with their diagonal spectra, in the order T, S, D₁, D₂.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::decomposition::OperatorPair;
use crate::error::{DecayError, Result};
use crate::linalg::{self, cplx, real, CMat};
use crate::pencil::quadratic_roots;

/// `n = 1` system with its pencil roots in closed form.
#[derive(Clone, Debug)]
pub struct ScalarSystem {
    pub pair: OperatorPair,
    pub a: Complex64,
    pub d: Complex64,
    /// Roots of `λ² + dλ + a`, in report order.
    pub roots: [Complex64; 2],
}

impl ScalarSystem {
    pub fn abscissa(&self) -> f64 {
        self.roots[0].re
    }

    /// True when `d² = 4a` to relative precision `rtol`.
    pub fn is_double_root(&self, rtol: f64) -> bool {
        (self.d * self.d - self.a * 4.0).norm() <= rtol * (self.d * self.d).norm().max(self.a.norm())
    }
}

pub fn gen_scalar(a: Complex64, d: Complex64) -> Result<ScalarSystem> {
    if !(a.re > 0.0) || !(d.re > 0.0) || !a.im.is_finite() || !d.im.is_finite() {
        return Err(DecayError::InvalidParams(format!(
            "scalar system needs Re a > 0 and Re d > 0, got a = {a}, d = {d}"
        )));
    }
    let pair = OperatorPair::new(CMat::from_element(1, 1, a), CMat::from_element(1, 1, d))?;
    Ok(ScalarSystem { pair, a, d, roots: quadratic_roots(a, d) })
}

/// `(n+1)²·tridiag(−1, 2, −1)`: the Dirichlet Laplacian on n interior
/// points of (0, 1).
pub fn dirichlet_laplacian(n: usize) -> CMat {
    let h2 = ((n + 1) * (n + 1)) as f64;
    CMat::from_fn(n, n, |i, j| match i.abs_diff(j) {
        0 => real(2.0 * h2),
        1 => real(-h2),
        _ => real(0.0),
    })
}

/// Smallest eigenvalue of [`dirichlet_laplacian`].
pub fn laplacian_min_eigenvalue(n: usize) -> f64 {
    let h = (n + 1) as f64;
    2.0 * h * h * (1.0 - (std::f64::consts::PI / h).cos())
}

/// Largest eigenvalue of [`dirichlet_laplacian`].
pub fn laplacian_max_eigenvalue(n: usize) -> f64 {
    let h = (n + 1) as f64;
    2.0 * h * h * (1.0 - (n as f64 * std::f64::consts::PI / h).cos())
}

/// Viscoelastic string: `A = (1 + iγ)L`, `D = d·I`.
///
/// Gives `T = L`, `S = γI` (sector tangent γ), `D₁ = dI`, `D₂ = 0`.
pub fn gen_damped_wave(n: usize, gamma: f64, d: f64) -> Result<OperatorPair> {
    if n == 0 || !(gamma >= 0.0) || !gamma.is_finite() || !(d > 0.0) || !d.is_finite() {
        return Err(DecayError::InvalidParams(format!(
            "damped wave needs n >= 1, gamma >= 0, d > 0; got n = {n}, gamma = {gamma}, d = {d}"
        )));
    }
    let a = dirichlet_laplacian(n) * cplx(1.0, gamma);
    OperatorPair::new(a, CMat::identity(n, n) * real(d))
}

/// Spectral ranges of random systems.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomSystemConfig {
    /// Eigenvalues of T are uniform in this range.
    pub t_range: (f64, f64),
    /// Eigenvalues of D₁ are uniform in `[beta_min, beta_min + d1_spread]`.
    pub d1_spread: f64,
    /// Eigenvalues of D₂ are uniform in `[−d2_max, d2_max]`.
    pub d2_max: f64,
}

impl Default for RandomSystemConfig {
    fn default() -> Self {
        Self { t_range: (1.0, 10.0), d1_spread: 2.0, d2_max: 0.5 }
    }
}

fn unitary(rng: &mut ChaCha8Rng, n: usize) -> CMat {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut entries = Vec::with_capacity(n * n);
    for _ in 0..n * n {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        entries.push(cplx(re * scale, im * scale));
    }
    let z = CMat::from_row_slice(n, n, &entries);
    let qr = z.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { real(1.0) };
        for z in q.column_mut(j).iter_mut() {
            *z *= phase;
        }
    }
    q
}

fn uniform_spectrum(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| lo + (hi - lo) * rng.random::<f64>()).collect()
}

fn with_spectrum(q: &CMat, values: &[f64]) -> CMat {
    let diag = CMat::from_diagonal(&DVector::from_iterator(values.len(), values.iter().map(|&v| real(v))));
    linalg::hermitian_part(&(q * diag * q.adjoint()))
}

/// `A = T^{1/2}(I + iS)T^{1/2}`, `D = D₁ + iD₂` with random unitary
/// eigenbases and the default [`RandomSystemConfig`] spectra.
pub fn gen_random_valid(n: usize, sector_tan_max: f64, beta_min: f64, seed: u64) -> OperatorPair {
    gen_random_with(n, sector_tan_max, beta_min, seed, &RandomSystemConfig::default())
}

pub fn gen_random_with(
    n: usize,
    sector_tan_max: f64,
    beta_min: f64,
    seed: u64,
    config: &RandomSystemConfig,
) -> OperatorPair {
    assert!(n >= 1, "dimension must be positive");
    assert!(sector_tan_max >= 0.0 && beta_min > 0.0, "need sector_tan_max >= 0 and beta_min > 0");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let qt = unitary(&mut rng, n);
    let t_values = uniform_spectrum(&mut rng, n, config.t_range.0, config.t_range.1);
    let qs = unitary(&mut rng, n);
    let s_values = uniform_spectrum(&mut rng, n, -sector_tan_max, sector_tan_max);
    let q1 = unitary(&mut rng, n);
    let d1_values = uniform_spectrum(&mut rng, n, beta_min, beta_min + config.d1_spread);
    let q2 = unitary(&mut rng, n);
    let d2_values = uniform_spectrum(&mut rng, n, -config.d2_max, config.d2_max);

    let sqrt_t: Vec<f64> = t_values.iter().map(|v| v.sqrt()).collect();
    let t_half = with_spectrum(&qt, &sqrt_t);
    let s = with_spectrum(&qs, &s_values);
    let core = linalg::identity(n) + s * cplx(0.0, 1.0);
    let a = &t_half * core * &t_half;

    let d = with_spectrum(&q1, &d1_values) + with_spectrum(&q2, &d2_values) * cplx(0.0, 1.0);
    OperatorPair::new(a, d).expect("generated matrices are finite and square")
}
