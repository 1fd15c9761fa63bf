//! Differential entropies and the entropic uncertainty diagnostics.

use std::f64::consts::{E, PI};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{density, fourier_transform, moments, Density, Representation, WaveFunction};

/// `1 + ln π`, the lower bound of `S_q + S_p`.
pub const EUR_BOUND: f64 = 2.144_729_885_849_4;

/// Density values below this contribute nothing to `−ρ ln ρ`.
pub const DENSITY_FLOOR: f64 = 1e-300;

/// `−∫ ρ ln ρ` in nats, rectangle rule, `0·ln 0 = 0`.
pub fn differential_entropy(d: &Density) -> Result<f64> {
    let mut acc = 0.0;
    for &r in d.values() {
        if r.is_nan() {
            return Err(Error::numerical("NaN in density passed to entropy"));
        }
        if r > DENSITY_FLOOR {
            acc -= r * r.ln();
        }
    }
    Ok(acc * d.spacing())
}

/// Entropy of a density next to the Gaussian maximum-entropy bound for its
/// variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyBound {
    pub entropy: f64,
    /// `(1/2) ln(2πe σ²)`
    pub bound: f64,
}

impl EntropyBound {
    pub fn gap(&self) -> f64 {
        self.bound - self.entropy
    }
}

pub fn gaussian_entropy_bound(d: &Density) -> Result<EntropyBound> {
    let variance = moments(d)?.variance;
    if variance <= 0.0 {
        return Err(Error::Config(
            "entropy bound undefined for a zero-variance density".into(),
        ));
    }
    Ok(EntropyBound {
        entropy: differential_entropy(d)?,
        bound: 0.5 * (2.0 * PI * E * variance).ln(),
    })
}

/// Entropic and variance-based uncertainty diagnostics of one state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyReport {
    pub t: f64,
    pub s_q: f64,
    pub s_p: f64,
    /// `S_q + S_p`
    pub s_j: f64,
    pub delta_x: f64,
    pub delta_p: f64,
    /// `(2πe) ΔX ΔP exp[−(S_q + S_p)]`, ≥ 1 with equality for Gaussians.
    pub power_product: f64,
    /// `S_q + S_p − (1 + ln π)`
    pub eur_slack: f64,
    /// `ΔX ΔP − 1/2`
    pub heisenberg_slack: f64,
}

pub fn entropy_report(wf: &WaveFunction, t: f64) -> Result<EntropyReport> {
    wf.expect_repr(Representation::Position)?;
    let rho = density(wf)?;
    let rho_p = density(&fourier_transform(wf)?)?;
    let s_q = differential_entropy(&rho)?;
    let s_p = differential_entropy(&rho_p)?;
    let delta_x = moments(&rho)?.std_dev();
    let delta_p = moments(&rho_p)?.std_dev();
    let s_j = s_q + s_p;
    let product = delta_x * delta_p;
    Ok(EntropyReport {
        t,
        s_q,
        s_p,
        s_j,
        delta_x,
        delta_p,
        power_product: 2.0 * PI * E * product * (-s_j).exp(),
        eur_slack: s_j - EUR_BOUND,
        heisenberg_slack: product - 0.5,
    })
}
