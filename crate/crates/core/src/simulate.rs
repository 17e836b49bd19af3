//! Time-domain validation: exact propagation by the matrix exponential,
//! energy tracking, envelope checks, and empirical decay-rate fitting.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::certificate::{build_block_matrix, Certificate};
use crate::decomposition::Decomposition;
use crate::error::{DecayError, Result};
use crate::linalg::{self, CVec, MatrixExponential};

/// Energies below this are excluded from rate fitting.
pub const ENERGY_FLOOR: f64 = 1e-300;

pub const DEFAULT_TAIL_FRACTION: f64 = 0.5;
pub const DEFAULT_SAMPLES: usize = 400;
/// Horizon cap for the default grid.
pub const MAX_HORIZON: f64 = 200.0;
/// Fewest samples a fitting window may hold.
pub const MIN_FIT_SAMPLES: usize = 10;

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// `(u′(t), u(t))` stacked.
    pub states: Vec<CVec>,
    /// `‖u′‖² + uᴴTu`.
    pub energies: Vec<f64>,
    /// Fitted with [`DEFAULT_TAIL_FRACTION`] when enough samples are above
    /// the floor.
    pub fitted_rate: Option<f64>,
}

/// Propagates many initial conditions for one system.
pub struct Propagator<'a> {
    dec: &'a Decomposition,
    exp: MatrixExponential,
}

impl<'a> Propagator<'a> {
    pub fn new(dec: &'a Decomposition) -> Result<Self> {
        Ok(Self { dec, exp: MatrixExponential::new(&build_block_matrix(dec))? })
    }

    pub fn with_exponential(dec: &'a Decomposition, exp: MatrixExponential) -> Self {
        Self { dec, exp }
    }

    pub fn exponential(&self) -> &MatrixExponential {
        &self.exp
    }

    pub fn energy(&self, state: &CVec) -> f64 {
        let n = self.dec.dim();
        let velocity = state.rows(0, n).into_owned();
        let position = state.rows(n, n).into_owned();
        self.dec.scale_norm_sqr(&velocity, 0) + self.dec.scale_norm_sqr(&position, 1)
    }

    pub fn propagate(&self, u0: &CVec, u1: &CVec, times: &[f64]) -> Result<Trajectory> {
        let n = self.dec.dim();
        if u0.len() != n || u1.len() != n {
            return Err(DecayError::InvalidInput(format!("initial data must have length {n}")));
        }
        validate_grid(times)?;
        let mut x0 = CVec::zeros(2 * n);
        x0.rows_mut(0, n).copy_from(u1);
        x0.rows_mut(n, n).copy_from(u0);

        let states: Vec<CVec> = times
            .iter()
            .map(|&t| if t == 0.0 { x0.clone() } else { self.exp.apply(t, &x0) })
            .collect();
        let energies: Vec<f64> = states.iter().map(|s| self.energy(s)).collect();
        let mut traj = Trajectory { times: times.to_vec(), states, energies, fitted_rate: None };
        traj.fitted_rate = fit_rate(&traj, DEFAULT_TAIL_FRACTION).ok();
        Ok(traj)
    }
}

fn validate_grid(times: &[f64]) -> Result<()> {
    if times.first() != Some(&0.0) {
        return Err(DecayError::InvalidInput("time grid must start at 0".into()));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) || times.iter().any(|t| !t.is_finite()) {
        return Err(DecayError::InvalidInput("time grid must be finite and strictly increasing".into()));
    }
    Ok(())
}

/// `states[i] = e^{tᵢ𝒜}·(u₁, u₀)`.
pub fn propagate(dec: &Decomposition, u0: &CVec, u1: &CVec, times: &[f64]) -> Result<Trajectory> {
    Propagator::new(dec)?.propagate(u0, u1, times)
}

/// `samples` equally spaced points on `[0, 40/rate]`, capped at
/// [`MAX_HORIZON`].
pub fn default_time_grid(rate: f64, samples: usize) -> Vec<f64> {
    let horizon = if rate > 0.0 { (40.0 / rate).min(MAX_HORIZON) } else { MAX_HORIZON };
    uniform_grid(horizon, samples)
}

pub fn uniform_grid(horizon: f64, samples: usize) -> Vec<f64> {
    let last = (samples.max(2) - 1) as f64;
    (0..samples.max(2)).map(|i| horizon * i as f64 / last).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeCheck {
    pub holds: bool,
    /// `max_i E(tᵢ) / (C·e^{−2·rate·tᵢ}·E(0))`.
    pub worst_ratio: f64,
    /// Sample time of the worst ratio.
    pub worst_time: f64,
}

/// `E(tᵢ) ≤ C·e^{−2·rate·tᵢ}·E(0)` at every sample.
pub fn check_envelope(traj: &Trajectory, cert: &Certificate, constant: f64) -> EnvelopeCheck {
    check_envelope_at_rate(traj, cert.rate, constant)
}

pub fn check_envelope_at_rate(traj: &Trajectory, rate: f64, constant: f64) -> EnvelopeCheck {
    let e0 = traj.energies[0];
    let mut worst_ratio = f64::NEG_INFINITY;
    let mut worst_time = 0.0;
    for (&t, &e) in traj.times.iter().zip(&traj.energies) {
        let bound = constant * (-2.0 * rate * t).exp() * e0;
        let ratio = if bound > 0.0 { e / bound } else if e > 0.0 { f64::INFINITY } else { 0.0 };
        if ratio > worst_ratio {
            worst_ratio = ratio;
            worst_time = t;
        }
    }
    EnvelopeCheck { holds: worst_ratio <= 1.0, worst_ratio, worst_time }
}

/// Largest one-step growth factor `E(tᵢ₊₁) / (C·e^{−2·rate·Δt}·E(tᵢ))`.
pub fn worst_step_ratio(traj: &Trajectory, rate: f64, constant: f64) -> f64 {
    traj.times
        .windows(2)
        .zip(traj.energies.windows(2))
        .filter(|(_, e)| e[0] > ENERGY_FLOOR)
        .map(|(t, e)| e[1] / (constant * (-2.0 * rate * (t[1] - t[0])).exp() * e[0]))
        .fold(0.0, f64::max)
}

/// Exponential rate of the state norm: `−slope/2` of the least-squares line
/// through `(t, log E)` over the last `tail_fraction` of the samples whose
/// energy is above [`ENERGY_FLOOR`].
pub fn fit_rate(traj: &Trajectory, tail_fraction: f64) -> Result<f64> {
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(DecayError::InvalidParams(format!("tail fraction {tail_fraction} must lie in (0, 1]")));
    }
    let usable = traj.energies.iter().take_while(|&&e| e > ENERGY_FLOOR).count();
    let window = ((usable as f64) * tail_fraction).floor() as usize;
    if window < MIN_FIT_SAMPLES {
        return Err(DecayError::InsufficientData(format!(
            "{window} samples above the energy floor in the fitting window, need {MIN_FIT_SAMPLES}"
        )));
    }
    let start = usable - window;
    let ts = &traj.times[start..usable];
    let ys: Vec<f64> = traj.energies[start..usable].iter().map(|e| e.ln()).collect();
    let len = window as f64;
    let t_mean = ts.iter().sum::<f64>() / len;
    let y_mean = ys.iter().sum::<f64>() / len;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (t, y) in ts.iter().zip(&ys) {
        sxy += (t - t_mean) * (y - y_mean);
        sxx += (t - t_mean) * (t - t_mean);
    }
    Ok(-0.5 * sxy / sxx)
}

/// Writes `t, E, re_x0, im_x0, …` with a header row. Floats use the
/// shortest representation that round-trips.
pub fn write_csv(traj: &Trajectory, mut out: impl Write) -> Result<()> {
    let dim = traj.states.first().map_or(0, |s| s.len());
    let mut header = vec!["t".to_string(), "E".to_string()];
    for i in 0..dim {
        header.push(format!("re_x{i}"));
        header.push(format!("im_x{i}"));
    }
    writeln!(out, "{}", header.join(","))?;
    for ((t, e), state) in traj.times.iter().zip(&traj.energies).zip(&traj.states) {
        let mut row = vec![format!("{t:?}"), format!("{e:?}")];
        for z in state.iter() {
            row.push(format!("{:?}", z.re));
            row.push(format!("{:?}", z.im));
        }
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

/// Complex Gaussian initial data `(u₀, u₁)` from
/// `ChaCha8Rng::seed_from_u64(seed)`: all of u₀ before u₁, real part before
/// imaginary part.
pub fn random_initial_data(n: usize, seed: u64) -> (CVec, CVec) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || {
        CVec::from_fn(n, |_, _| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            linalg::cplx(re, im)
        })
    };
    let u0 = draw();
    let u1 = draw();
    (u0, u1)
}

/// `(u, u′)` from a stacked state of a system of dimension `n`.
pub fn split_state(state: &CVec, n: usize) -> (CVec, CVec) {
    (state.rows(n, n).into_owned(), state.rows(0, n).into_owned())
}
