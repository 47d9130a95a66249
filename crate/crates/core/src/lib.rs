//! Quantum reading of phase-shift-keyed optical memories with squeezed
//! coherent probes and lossy homodyne detection.
//!
//! The crate answers one question: given an energy budget `E`, a phase
//! difference `delta` between the two cell states, and an overall efficiency
//! `eta`, how well can a Gaussian probe plus homodyne detector distinguish
//! the two phase shifters?
//!
//! - [`gauss`]: optimal binary discrimination of one-dimensional Gaussian
//!   outcome distributions (decision rules, error probabilities, `erf`).
//! - [`states`]: squeezed coherent probe parametrization, phase-shifter
//!   action, energy accounting, Wigner function.
//! - [`homodyne`]: homodyne outcome statistics for squeezed coherent probes,
//!   including detector inefficiency.
//! - [`reading`]: the strategies themselves - the coherent-probe baseline
//!   (standard quantum limit), the closed-form optimal squeezed strategy,
//!   numeric optimization, the hybrid lower bound, tradeoff curves.
//! - [`fock`]: an independent truncated Fock-space verifier for the loss
//!   channel algebra and the Gaussian homodyne statistics.
//! - [`cli`]: command-line front end emitting JSON records and CSV curves.
//!
//! See the crate `examples/` directory for one runnable example per
//! capability.

use thiserror::Error as ThisError;

pub mod cli;
pub mod fock;
pub mod gauss;
pub mod homodyne;
pub mod reading;
pub mod states;

pub use gauss::{DecisionRule, GaussianPdf};
pub use homodyne::HomodyneSetup;
pub use reading::{ReadingTask, SearchConfig, Strategy};
pub use states::SqueezedCoherentState;

/// Errors shared across the crate.
#[derive(Debug, ThisError)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("probe energy {actual} exceeds budget {budget}")]
    EnergyBudget { actual: f64, budget: f64 },

    #[error("closed-form strategies require equal priors, got prior0 = {0}")]
    UnsupportedPrior(f64),

    #[error("quadrature did not reach tolerance {tol:e} within depth {depth}")]
    QuadratureNonConvergence { tol: f64, depth: usize },

    #[error(
        "truncated state tail mass {tail:.3e} exceeds {tol:.1e}; retry with dim >= {suggested}"
    )]
    Truncation {
        tail: f64,
        tol: f64,
        suggested: usize,
    },

    #[error("matrix exponential produced non-finite entries")]
    MatrixExpOverflow,

    #[error("mean-scale fit inconsistent across samples: spread {0:.3e} exceeds {1:.1e}")]
    InconsistentScaleFit(f64, f64),
}

pub type Result<T> = std::result::Result<T, Error>;
