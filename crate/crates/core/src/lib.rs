//! Certified exponential decay for damped second-order systems
//! `u″ + Du′ + Au = 0` with sectorial stiffness `A` and accretive damping `D`.
//!
//! The pipeline: [`decompose`] splits the pair into Hermitian parts and
//! constants, [`certificate::optimize_rate`] finds parameters with the largest
//! certified rate, and [`pencil`] and [`simulate`] cross-check the rate
//! against the spectrum and against trajectories.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certificate;
pub mod cli;
pub mod constants;
pub mod decomposition;
pub mod error;
pub mod generators;
pub mod linalg;
pub mod mtx;
pub mod pencil;
pub mod report;
pub mod simulate;

pub use certificate::{optimize_rate, Certificate, SearchConfig, Variant};
pub use decomposition::{check_assumptions, decompose, AssumptionReport, Decomposition, OperatorPair};
pub use error::{DecayError, Result};
pub use linalg::{CMat, CVec};
pub use pencil::{pencil_spectrum, SpectrumReport};
pub use report::RunReport;
pub use simulate::{propagate, Trajectory};
