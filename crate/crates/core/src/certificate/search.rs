//! Parameter search for the largest certified rate.
//!
//! For a fixed k the inner maximization is solved to machine precision:
//!
//! - first variant: `ω₁(m)` is nondecreasing in m and `(1−m)/ω₂` is strictly
//!   decreasing, so `θ(m)` peaks where the two branches cross; the crossing is
//!   found by bisection on `[m_min, 1]`;
//! - second variant: for fixed `s = p + q` the split minimizing
//!   `‖S‖²/(4pk²) + ‖D₂‖²/(4q)` is `p : q = ‖S‖/k : ‖D₂‖`, which leaves
//!   `ω₁′(s) = a₀δ/k − E/s` with `E = a₀(‖S‖/k + ‖D₂‖)²/4`; the crossing of
//!   `(ω₁′(s) − 1)/2` and `(1 − s)/ω₂` is the positive root of a quadratic.
//!
//! The outer search over k evaluates a logarithmic grid on `(β·k_lo, β·k_hi)`
//! and refines the best grid point by golden-section search on log k between
//! its neighbours. Invalid points score `−∞`. Ties prefer larger k, then
//! larger m (resp. larger p, then larger q).

use std::cmp::Ordering;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{make_certificate_t1, make_certificate_t2, theta_t1, theta_t2, Certificate, Variant};
use crate::constants::{self, Omega1Parts, Theorem1Params, Theorem2Params};
use crate::decomposition::Decomposition;
use crate::error::{DecayError, Result};

/// Environment variable capping the search's worker threads.
pub const THREADS_ENV: &str = "DECAYCERT_THREADS";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Points on the k-grid.
    pub grid: usize,
    /// Smallest m considered.
    pub m_min: f64,
    /// Smallest p and q considered.
    pub pq_min: f64,
    /// k-grid spans `(β·k_lo_frac, β·k_hi_frac)`.
    pub k_lo_frac: f64,
    pub k_hi_frac: f64,
    /// Bisection steps for the m-crossing.
    pub bisect_iters: usize,
    /// Golden-section iterations of the k refinement.
    pub golden_iters: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            grid: 64,
            m_min: 1e-6,
            pq_min: 1e-6,
            k_lo_frac: 1e-3,
            k_hi_frac: 1.0 - 1e-3,
            bisect_iters: 40,
            golden_iters: 40,
        }
    }
}

impl SearchConfig {
    pub fn with_grid(grid: usize) -> Self {
        Self { grid, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.grid >= 2
            && self.m_min > 0.0
            && self.m_min < 1.0
            && self.pq_min > 0.0
            && self.pq_min < 0.5
            && self.k_lo_frac > 0.0
            && self.k_lo_frac < self.k_hi_frac
            && self.k_hi_frac < 1.0;
        if ok {
            Ok(())
        } else {
            Err(DecayError::InvalidParams(format!("invalid search configuration {self:?}")))
        }
    }

    fn k_grid(&self, beta: f64) -> Vec<f64> {
        let lo = (beta * self.k_lo_frac).ln();
        let hi = (beta * self.k_hi_frac).ln();
        let last = (self.grid - 1) as f64;
        (0..self.grid).map(|i| (lo + (hi - lo) * i as f64 / last).exp()).collect()
    }

    fn k_ratio(&self) -> f64 {
        (self.k_hi_frac / self.k_lo_frac).powf(1.0 / (self.grid - 1) as f64)
    }
}

fn pool() -> &'static rayon::ThreadPool {
    static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        let threads = std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&n| n > 0)
            .unwrap_or(0);
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool")
    })
}

/// A scored parameter tuple; `params` is `[k, m, 0]` or `[k, p, q]`.
#[derive(Clone, Copy, Debug)]
struct Point {
    score: f64,
    params: [f64; 3],
}

impl Point {
    fn invalid(params: [f64; 3]) -> Self {
        Self { score: f64::NEG_INFINITY, params }
    }

    /// Total order implementing the tie-breaks.
    fn cmp(&self, other: &Self) -> Ordering {
        self.score
            .total_cmp(&other.score)
            .then(self.params[0].total_cmp(&other.params[0]))
            .then(self.params[1].total_cmp(&other.params[1]))
            .then(self.params[2].total_cmp(&other.params[2]))
    }

    fn better(self, other: Self) -> Self {
        if other.cmp(&self) == Ordering::Greater {
            other
        } else {
            self
        }
    }
}

fn reduce(points: impl IntoIterator<Item = Point>) -> Point {
    points
        .into_iter()
        .fold(Point::invalid([f64::NEG_INFINITY; 3]), Point::better)
}

/// Golden-section maximization on `[a, b]`; returns the best point it
/// evaluated. Ties move the bracket toward `b`.
fn golden_max(mut f: impl FnMut(f64) -> Point, mut a: f64, mut b: f64, iters: usize) -> Point {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut best = f1.better(f2);
    for _ in 0..iters {
        if f1.score > f2.score {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
            best = best.better(f1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
            best = best.better(f2);
        }
    }
    best
}

fn t1_score(k: f64, m: f64, parts: &Omega1Parts, omega2: f64) -> Point {
    match theta_t1(parts.value(m), omega2, m) {
        Some(theta) => Point { score: k * theta, params: [k, m, 0.0] },
        None => Point::invalid([k, m, 0.0]),
    }
}

/// Best m at fixed k.
fn t1_best_m(dec: &Decomposition, k: f64, config: &SearchConfig) -> Point {
    let (Ok(omega2), parts) = (constants::omega2(dec, k), Omega1Parts::new(dec, k)) else {
        return Point::invalid([k, 1.0, 0.0]);
    };
    // ω₁(m)/2 − (1 − m)/ω₂ is nondecreasing in m; only its sign is needed
    let crossed = |m: f64| parts.exceeds(m, 2.0 * (1.0 - m) / omega2);
    let (mut lo, mut hi) = (config.m_min, 1.0);
    if crossed(lo) {
        return t1_score(k, lo, &parts, omega2);
    }
    for _ in 0..config.bisect_iters {
        let mid = 0.5 * (lo + hi);
        if crossed(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    t1_score(k, lo, &parts, omega2).better(t1_score(k, hi, &parts, omega2))
}

fn t2_score(dec: &Decomposition, k: f64, p: f64, q: f64, omega2: f64) -> Point {
    if p + q > 1.0 {
        return Point::invalid([k, p, q]);
    }
    let omega1p = constants::omega1_prime_unchecked(dec, Theorem2Params { k, p, q });
    match theta_t2(omega1p, omega2, p, q) {
        Some(theta) => Point { score: k * theta, params: [k, p, q] },
        None => Point::invalid([k, p, q]),
    }
}

/// Best `(p, q)` at fixed k.
fn t2_best_pq(dec: &Decomposition, k: f64, config: &SearchConfig) -> Point {
    let Ok(omega2) = constants::omega2(dec, k) else {
        return Point::invalid([k, 0.5, 0.5]);
    };
    let ra = dec.norm_s / k;
    let rb = dec.norm_d2_dual;
    let e = dec.a0 * (ra + rb) * (ra + rb) / 4.0;
    let c = dec.a0 * dec.delta / k;
    // 2s² + (ω₂(c − 1) − 2)s − ω₂E = 0
    let b = omega2 * (c - 1.0) - 2.0;
    let disc = b * b + 8.0 * omega2 * e;
    let root = if b <= 0.0 { (-b + disc.sqrt()) / 4.0 } else { 2.0 * omega2 * e / (b + disc.sqrt()) };
    let s = root.clamp(2.0 * config.pq_min, 1.0);
    let share = if ra + rb > 0.0 { ra / (ra + rb) } else { 0.5 };
    let p = (s * share).clamp(config.pq_min, s - config.pq_min);
    t2_score(dec, k, p, s - p, omega2)
}

/// Grid over k, then golden-section refinement between the neighbours of
/// the best grid point.
fn search_k(beta: f64, config: &SearchConfig, inner: impl Fn(f64) -> Point + Sync) -> Point {
    let ks = config.k_grid(beta);
    let per_k: Vec<Point> = pool().install(|| ks.par_iter().map(|&k| inner(k)).collect());
    let start = reduce(per_k);
    if start.score == f64::NEG_INFINITY {
        return start;
    }
    let k = start.params[0];
    let ratio = config.k_ratio();
    let (k_min, k_max) = (beta * config.k_lo_frac, beta * config.k_hi_frac);
    let (lo, hi) = ((k / ratio).max(k_min).ln(), (k * ratio).min(k_max).ln());
    start.better(golden_max(|lk| inner(lk.exp()), lo, hi, config.golden_iters))
}

/// Best-found valid certificate for `variant`.
///
/// Deterministic for a given configuration: grid evaluation may run in
/// parallel but results are reduced in grid order.
pub fn optimize_rate(dec: &Decomposition, variant: Variant, config: &SearchConfig) -> Result<Certificate> {
    config.validate()?;
    match variant {
        Variant::Theorem1 => {
            if !dec.holds_b() {
                return Err(DecayError::NotAccretiveDamping { beta: dec.beta });
            }
            let best = search_k(dec.beta, config, |k| t1_best_m(dec, k, config));
            if best.score == f64::NEG_INFINITY {
                return Err(DecayError::NoValidCertificate);
            }
            let [k, m, _] = best.params;
            make_certificate_t1(dec, Theorem1Params { k, m })
        }
        Variant::Theorem2 => {
            if !dec.holds_c() {
                return Err(DecayError::AssumptionCViolated { delta: dec.delta });
            }
            let best = search_k(dec.beta, config, |k| t2_best_pq(dec, k, config));
            if best.score == f64::NEG_INFINITY {
                return Err(DecayError::NoValidCertificate);
            }
            let [k, p, q] = best.params;
            make_certificate_t2(dec, Theorem2Params { k, p, q })
        }
    }
}
