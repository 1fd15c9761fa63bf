//! Initial states and the closed-form harmonic-oscillator oracles
//! (units ℏ = m = ω = 1).

use std::f64::consts::{E, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::entropy::EUR_BOUND;
use crate::error::{Error, Result};
use crate::grid::{Density, Grid, Representation, WaveFunction};

/// Maximum |ψ| tolerated at the outermost lattice points.
pub const EDGE_TOLERANCE: f64 = 1e-8;

fn default_cat_phase() -> f64 {
    PI
}

/// Declarative description of an initial state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    /// `(γ²π)^{−1/4} exp(−(x − x0)²/2γ² + i p0 x)`
    Gaussian { x0: f64, p0: f64, gamma: f64 },
    /// Gaussian with γ = 1.
    Coherent { q0: f64, p0: f64 },
    /// Centred Gaussian with width γ.
    Squeezed { gamma: f64 },
    /// `coherent(q0, p0) + e^{iφ} coherent(q0, −p0)`, renormalised.
    Cat {
        q0: f64,
        p0: f64,
        #[serde(default = "default_cat_phase")]
        relative_phase: f64,
    },
}

impl StateSpec {
    pub fn validate(&self) -> Result<()> {
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!(
                    "state parameter {name} = {v} is not finite"
                )))
            }
        };
        match *self {
            StateSpec::Gaussian { x0, p0, gamma } => {
                finite("x0", x0)?;
                finite("p0", p0)?;
                check_gamma(gamma)
            }
            StateSpec::Coherent { q0, p0 } => {
                finite("q0", q0)?;
                finite("p0", p0)
            }
            StateSpec::Squeezed { gamma } => check_gamma(gamma),
            StateSpec::Cat {
                q0,
                p0,
                relative_phase,
            } => {
                finite("q0", q0)?;
                finite("p0", p0)?;
                finite("relative_phase", relative_phase)
            }
        }
    }

    /// `(x0, p0, γ)` for the single-Gaussian variants, `None` for cats.
    pub fn gaussian_parameters(&self) -> Option<(f64, f64, f64)> {
        match *self {
            StateSpec::Gaussian { x0, p0, gamma } => Some((x0, p0, gamma)),
            StateSpec::Coherent { q0, p0 } => Some((q0, p0, 1.0)),
            StateSpec::Squeezed { gamma } => Some((0.0, 0.0, gamma)),
            StateSpec::Cat { .. } => None,
        }
    }

    pub fn is_gaussian(&self) -> bool {
        self.gaussian_parameters().is_some()
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "width parameter γ must be in (0, ∞), got {gamma}"
        )))
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be positive, got {v}")))
    }
}

fn gaussian_amplitude(x: f64, x0: f64, p0: f64, gamma: f64) -> Complex64 {
    let norm = (gamma * gamma * PI).powf(-0.25);
    let envelope = norm * (-(x - x0).powi(2) / (2.0 * gamma * gamma)).exp();
    Complex64::from_polar(envelope, p0 * x)
}

/// Samples the requested state on `grid` in position representation.
pub fn make_state(spec: &StateSpec, grid: &Grid) -> Result<WaveFunction> {
    spec.validate()?;
    let amps: Vec<Complex64> = match *spec {
        StateSpec::Cat {
            q0,
            p0,
            relative_phase,
        } => {
            let phase = Complex64::from_polar(1.0, relative_phase);
            grid.positions()
                .map(|x| {
                    gaussian_amplitude(x, q0, p0, 1.0) + phase * gaussian_amplitude(x, q0, -p0, 1.0)
                })
                .collect()
        }
        _ => {
            let (x0, p0, gamma) = spec.gaussian_parameters().expect("single Gaussian");
            grid.positions()
                .map(|x| gaussian_amplitude(x, x0, p0, gamma))
                .collect()
        }
    };
    let raw_norm = (amps.iter().map(|a| a.norm_sqr()).sum::<f64>() * grid.dx()).sqrt();
    if raw_norm < 1e-8 {
        return Err(Error::Config(format!(
            "state {spec:?} has (numerically) vanishing norm {raw_norm:e}"
        )));
    }
    let wf = WaveFunction::new(grid, Representation::Position, amps)?;
    let edge = wf.edge_amplitude();
    if edge >= EDGE_TOLERANCE {
        return Err(Error::Config(format!(
            "state leaks past the grid edge: |ψ| = {edge:e} at the boundary of [{}, {}]",
            grid.x_min(),
            grid.x_max()
        )));
    }
    Ok(wf)
}

/// Gaussian probability density with given mean and variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianProfile {
    pub mean: f64,
    pub variance: f64,
}

impl GaussianProfile {
    pub fn pdf(&self, x: f64) -> f64 {
        (-(x - self.mean).powi(2) / (2.0 * self.variance)).exp() / (2.0 * PI * self.variance).sqrt()
    }

    /// `(1/2) ln(2πe σ²)`
    pub fn entropy(&self) -> f64 {
        0.5 * (2.0 * PI * E * self.variance).ln()
    }

    /// Samples the profile on the position lattice of `grid`.
    pub fn on_grid(&self, grid: &Grid) -> Result<Density> {
        let values = grid.positions().map(|x| self.pdf(x)).collect();
        Density::normalized(Representation::Position, grid.x_min(), grid.dx(), values)
    }
}

/// Centre of a coherent state, `q(t) = q0 cos t + p0 sin t`.
pub fn coherent_center(q0: f64, p0: f64, t: f64) -> f64 {
    q0 * t.cos() + p0 * t.sin()
}

/// Coherent-state position density `π^{−1/2} exp[−(x − q(t))²]`.
pub fn coherent_density_at(q0: f64, p0: f64, t: f64) -> GaussianProfile {
    GaussianProfile {
        mean: coherent_center(q0, p0, t),
        variance: 0.5,
    }
}

/// Position variance of the squeezed state,
/// `σ²(t) = [(1/γ²) sin²t + γ² cos²t] / 2`.
pub fn squeezed_sigma2(gamma: f64, t: f64) -> Result<f64> {
    check_gamma(gamma)?;
    let (s, c) = t.sin_cos();
    Ok(0.5 * (s * s / (gamma * gamma) + gamma * gamma * c * c))
}

/// Momentum variance of the squeezed state,
/// `σ̃²(t) = [γ² sin²t + (1/γ²) cos²t] / 2`.
pub fn squeezed_sigma2_tilde(gamma: f64, t: f64) -> Result<f64> {
    check_gamma(gamma)?;
    let (s, c) = t.sin_cos();
    Ok(0.5 * (gamma * gamma * s * s + c * c / (gamma * gamma)))
}

/// `S_J(t) = ln(2πe) + (1/2) ln[σ²(t) σ̃²(t)]`
pub fn squeezed_joint_entropy(gamma: f64, t: f64) -> Result<f64> {
    let product = squeezed_sigma2(gamma, t)? * squeezed_sigma2_tilde(gamma, t)?;
    Ok((2.0 * PI * E).ln() + 0.5 * product.ln())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SjBounds {
    pub min: f64,
    pub max: f64,
}

/// Range swept by the squeezed-state joint entropy over one period.
pub fn sj_bounds(gamma: f64) -> Result<SjBounds> {
    check_gamma(gamma)?;
    let g4 = gamma.powi(4);
    Ok(SjBounds {
        min: EUR_BOUND,
        max: EUR_BOUND + 0.5 * ((g4 + 1.0 / g4 + 2.0) / 4.0).ln(),
    })
}

/// Variance of a freely spreading minimum-uncertainty Gaussian,
/// `γ²/2 + t²/(2 m² γ²)`.
pub fn free_gaussian_sigma2(gamma: f64, mass: f64, t: f64) -> Result<f64> {
    check_gamma(gamma)?;
    check_positive("mass", mass)?;
    Ok(0.5 * gamma * gamma + t * t / (2.0 * mass * mass * gamma * gamma))
}

/// Scalar closed-form curves `t ↦ value`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleCurve {
    CoherentSq,
    CoherentSp,
    CoherentCenter { q0: f64, p0: f64 },
    SqueezedSigma2 { gamma: f64 },
    SqueezedSigma2Tilde { gamma: f64 },
    SqueezedSj { gamma: f64 },
    FreeSigma2 { gamma: f64, mass: f64 },
}

impl OracleCurve {
    pub fn evaluate(&self, t: f64) -> Result<f64> {
        match *self {
            OracleCurve::CoherentSq | OracleCurve::CoherentSp => Ok(0.5 * EUR_BOUND),
            OracleCurve::CoherentCenter { q0, p0 } => Ok(coherent_center(q0, p0, t)),
            OracleCurve::SqueezedSigma2 { gamma } => squeezed_sigma2(gamma, t),
            OracleCurve::SqueezedSigma2Tilde { gamma } => squeezed_sigma2_tilde(gamma, t),
            OracleCurve::SqueezedSj { gamma } => squeezed_joint_entropy(gamma, t),
            OracleCurve::FreeSigma2 { gamma, mass } => free_gaussian_sigma2(gamma, mass, t),
        }
    }
}
