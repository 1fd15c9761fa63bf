//! One-dimensional wave-packet propagation instrumented with position and
//! momentum differential entropies, the joint (Leipnik) entropy and the
//! entropic uncertainty relation.
//!
//! Units are ℏ = 1 throughout; the closed-form oscillator oracles in
//! [`states`] additionally assume m = ω = 1.

pub mod entropy;
pub mod error;
pub mod grid;
pub mod propagator;
pub mod scenario;
pub mod states;

pub use entropy::{
    differential_entropy, entropy_report, gaussian_entropy_bound, EntropyBound, EntropyReport,
    EUR_BOUND,
};
pub use error::{Error, Result};
pub use grid::{
    density, fourier_transform, inverse_fourier_transform, moments, Density, Grid, Moments,
    Representation, WaveFunction,
};
pub use propagator::{energy, evolve, step, Potential, SplitOperator, Trajectory};
pub use states::{make_state, OracleCurve, SjBounds, StateSpec};
