//! Spatial/momentum lattices, wavefunctions, densities and the
//! continuum-normalised Fourier transform between the two representations.
//!
//! Conventions (ℏ = 1):
//!
//! * `x_j = x_min + j·dx`, `j ∈ [0, n)`
//! * `p_k = (k − n/2)·dp`, `dp = 2π/(n·dx)`, so the momentum lattice covers
//!   `[−π/dx, π/dx)` in ascending order
//! * `(𝓕ψ)(p) = (2π)^{−1/2} ∫ ψ(x) e^{−ipx} dx`, discretised by the rectangle
//!   rule so that amplitudes approximate the continuum transform pointwise.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Uniform 1D lattice together with its reciprocal momentum lattice.
///
/// Cloning is cheap: the FFT plans are shared.
#[derive(Clone)]
pub struct Grid {
    n: usize,
    x_min: f64,
    dx: f64,
    forward: Arc<dyn Fft<f64>>,
    backward: Arc<dyn Fft<f64>>,
}

impl Grid {
    /// Builds an `n`-point grid covering `[x_min, x_max)`.
    pub fn new(n: usize, x_min: f64, x_max: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::Config(format!(
                "grid point count must be a power of two >= 8, got {n}"
            )));
        }
        if !(x_min.is_finite() && x_max.is_finite()) || x_max <= x_min {
            return Err(Error::Config(format!(
                "degenerate grid interval [{x_min}, {x_max}]"
            )));
        }
        let dx = (x_max - x_min) / n as f64;
        let mut planner = FftPlanner::new();
        Ok(Grid {
            n,
            x_min,
            dx,
            forward: planner.plan_fft_forward(n),
            backward: planner.plan_fft_inverse(n),
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_min + self.n as f64 * self.dx
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dp(&self) -> f64 {
        2.0 * PI / (self.n as f64 * self.dx)
    }

    /// Lowest momentum on the lattice, `−π/dx`.
    pub fn p_min(&self) -> f64 {
        self.momentum(0)
    }

    /// Largest |p| reachable on the lattice.
    pub fn p_max(&self) -> f64 {
        PI / self.dx
    }

    pub fn position(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx
    }

    pub fn momentum(&self, k: usize) -> f64 {
        (k as f64 - (self.n / 2) as f64) * self.dp()
    }

    pub fn positions(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |j| self.position(j))
    }

    pub fn momenta(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |k| self.momentum(k))
    }

    /// Quadrature weight of the given representation.
    pub fn spacing(&self, repr: Representation) -> f64 {
        match repr {
            Representation::Position => self.dx,
            Representation::Momentum => self.dp(),
        }
    }

    pub fn coordinate(&self, repr: Representation, i: usize) -> f64 {
        match repr {
            Representation::Position => self.position(i),
            Representation::Momentum => self.momentum(i),
        }
    }

    /// Unnormalised forward DFT, `X_k = Σ_j x_j e^{−2πi jk/n}`.
    pub(crate) fn dft_forward(&self, buf: &mut [Complex64]) {
        self.forward.process(buf);
    }

    /// Unnormalised inverse DFT, `x_j = Σ_k X_k e^{+2πi jk/n}`.
    pub(crate) fn dft_inverse(&self, buf: &mut [Complex64]) {
        self.backward.process(buf);
    }

    /// Momentum of raw DFT bin `k` (standard FFT ordering).
    pub(crate) fn dft_momentum(&self, k: usize) -> f64 {
        let k = if k < self.n / 2 {
            k as f64
        } else {
            k as f64 - self.n as f64
        };
        k * self.dp()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.x_min == other.x_min && self.dx == other.dx
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("n", &self.n)
            .field("x_min", &self.x_min)
            .field("dx", &self.dx)
            .finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Position,
    Momentum,
}

/// Tolerance on `‖ψ‖ = 1` enforced by [`WaveFunction::from_normalized`].
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Complex amplitudes on a [`Grid`], unit L² norm under the rectangle rule.
#[derive(Debug, Clone)]
pub struct WaveFunction {
    grid: Grid,
    repr: Representation,
    amps: Vec<Complex64>,
}

impl WaveFunction {
    /// Wraps `amps` and rescales them to unit norm.
    pub fn new(grid: &Grid, repr: Representation, amps: Vec<Complex64>) -> Result<Self> {
        check_len(grid, &amps)?;
        if let Some(bad) = amps
            .iter()
            .find(|a| !(a.re.is_finite() && a.im.is_finite()))
        {
            return Err(Error::numerical(format!("non-finite amplitude {bad}")));
        }
        let norm = l2_norm(&amps, grid.spacing(repr));
        if norm == 0.0 {
            return Err(Error::Config("cannot normalize a zero wavefunction".into()));
        }
        let amps = amps.into_iter().map(|a| a / norm).collect();
        Ok(WaveFunction {
            grid: grid.clone(),
            repr,
            amps,
        })
    }

    /// Wraps amplitudes that are already normalised; fails if they are not.
    pub fn from_normalized(
        grid: &Grid,
        repr: Representation,
        amps: Vec<Complex64>,
    ) -> Result<Self> {
        check_len(grid, &amps)?;
        let norm = l2_norm(&amps, grid.spacing(repr));
        if !norm.is_finite() {
            return Err(Error::numerical("non-finite wavefunction norm"));
        }
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::Contract(format!(
                "wavefunction norm {norm} deviates from 1"
            )));
        }
        Ok(WaveFunction {
            grid: grid.clone(),
            repr,
            amps,
        })
    }

    /// Samples `f(x)` on the grid and normalises.
    pub fn from_fn(grid: &Grid, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let amps = grid.positions().map(f).collect();
        Self::new(grid, Representation::Position, amps)
    }

    pub(crate) fn from_parts_unchecked(
        grid: Grid,
        repr: Representation,
        amps: Vec<Complex64>,
    ) -> Self {
        WaveFunction { grid, repr, amps }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn representation(&self) -> Representation {
        self.repr
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.amps, self.grid.spacing(self.repr))
    }

    /// Largest modulus at the two outermost lattice points.
    pub fn edge_amplitude(&self) -> f64 {
        self.amps[0]
            .norm()
            .max(self.amps[self.amps.len() - 1].norm())
    }

    /// L² distance `‖ψ − φ‖` on the shared lattice.
    pub fn distance(&self, other: &WaveFunction) -> Result<f64> {
        self.expect_compatible(other)?;
        let sum: f64 = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        Ok((sum * self.grid.spacing(self.repr)).sqrt())
    }

    pub(crate) fn expect_repr(&self, repr: Representation) -> Result<()> {
        if self.repr != repr {
            return Err(Error::Contract(format!(
                "expected a {repr:?}-representation wavefunction, got {:?}",
                self.repr
            )));
        }
        Ok(())
    }

    fn expect_compatible(&self, other: &WaveFunction) -> Result<()> {
        if self.grid != other.grid || self.repr != other.repr {
            return Err(Error::Contract(
                "wavefunctions live on different lattices".into(),
            ));
        }
        Ok(())
    }
}

fn check_len(grid: &Grid, amps: &[Complex64]) -> Result<()> {
    if amps.len() != grid.len() {
        return Err(Error::Contract(format!(
            "{} amplitudes supplied for a {}-point grid",
            amps.len(),
            grid.len()
        )));
    }
    Ok(())
}

fn l2_norm(amps: &[Complex64], weight: f64) -> f64 {
    (amps.iter().map(|a| a.norm_sqr()).sum::<f64>() * weight).sqrt()
}

/// Position → momentum representation, `(𝓕ψ)(p_k)`.
pub fn fourier_transform(wf: &WaveFunction) -> Result<WaveFunction> {
    wf.expect_repr(Representation::Position)?;
    let grid = &wf.grid;
    // e^{−i p_k x_j} = e^{−i p_k x_min} · e^{−2πi jk/n} · (−1)^j
    let mut buf: Vec<Complex64> = wf
        .amps
        .iter()
        .enumerate()
        .map(|(j, &a)| if j % 2 == 0 { a } else { -a })
        .collect();
    grid.dft_forward(&mut buf);
    let scale = grid.dx / (2.0 * PI).sqrt();
    for (k, a) in buf.iter_mut().enumerate() {
        *a *= Complex64::from_polar(scale, -grid.momentum(k) * grid.x_min);
    }
    Ok(WaveFunction::from_parts_unchecked(
        grid.clone(),
        Representation::Momentum,
        buf,
    ))
}

/// Momentum → position representation; exact inverse of [`fourier_transform`].
pub fn inverse_fourier_transform(wf: &WaveFunction) -> Result<WaveFunction> {
    wf.expect_repr(Representation::Momentum)?;
    let grid = &wf.grid;
    let mut buf: Vec<Complex64> = wf
        .amps
        .iter()
        .enumerate()
        .map(|(k, &a)| a * Complex64::from_polar(1.0, grid.momentum(k) * grid.x_min))
        .collect();
    grid.dft_inverse(&mut buf);
    let scale = grid.dp() / (2.0 * PI).sqrt();
    for (j, a) in buf.iter_mut().enumerate() {
        *a *= if j % 2 == 0 { scale } else { -scale };
    }
    Ok(WaveFunction::from_parts_unchecked(
        grid.clone(),
        Representation::Position,
        buf,
    ))
}

/// Unit-mass tolerance enforced on [`Density`] values.
pub const MASS_TOLERANCE: f64 = 1e-9;

/// Nonnegative probability profile on one lattice axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Density {
    axis: Representation,
    origin: f64,
    spacing: f64,
    values: Vec<f64>,
}

impl Density {
    /// Validates nonnegativity and unit mass; `origin` is the coordinate of
    /// the first sample.
    pub fn new(axis: Representation, origin: f64, spacing: f64, values: Vec<f64>) -> Result<Self> {
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::Config(format!("invalid density spacing {spacing}")));
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::numerical("NaN in density"));
        }
        if let Some(v) = values.iter().find(|&&v| v < 0.0) {
            return Err(Error::Contract(format!("negative density value {v}")));
        }
        let mass = values.iter().sum::<f64>() * spacing;
        if (mass - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::Contract(format!(
                "density mass {mass} deviates from 1"
            )));
        }
        Ok(Density {
            axis,
            origin,
            spacing,
            values,
        })
    }

    /// Like [`Density::new`] but rescales `values` to unit mass first.
    pub fn normalized(
        axis: Representation,
        origin: f64,
        spacing: f64,
        mut values: Vec<f64>,
    ) -> Result<Self> {
        let mass = values.iter().sum::<f64>() * spacing;
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::Config(format!(
                "cannot normalise density of mass {mass}"
            )));
        }
        values.iter_mut().for_each(|v| *v /= mass);
        Self::new(axis, origin, spacing, values)
    }

    pub fn axis(&self) -> Representation {
        self.axis
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        self.origin + i as f64 * self.spacing
    }

    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.spacing
    }
}

/// `|ψ_j|²` on the lattice of the wavefunction's representation.
pub fn density(wf: &WaveFunction) -> Result<Density> {
    let grid = &wf.grid;
    let origin = grid.coordinate(wf.repr, 0);
    let values = wf.amps.iter().map(|a| a.norm_sqr()).collect();
    Density::new(wf.repr, origin, grid.spacing(wf.repr), values)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
}

impl Moments {
    pub fn std_dev(&self) -> f64 {
        self.variance.sqrt()
    }
}

/// First and second central moment by rectangle-rule quadrature.
pub fn moments(d: &Density) -> Result<Moments> {
    let w = d.spacing;
    let mean: f64 = d
        .values
        .iter()
        .enumerate()
        .map(|(i, &r)| d.coordinate(i) * r)
        .sum::<f64>()
        * w;
    let variance: f64 = d
        .values
        .iter()
        .enumerate()
        .map(|(i, &r)| (d.coordinate(i) - mean).powi(2) * r)
        .sum::<f64>()
        * w;
    if !variance.is_finite() || variance < -1e-12 {
        return Err(Error::numerical(format!("invalid variance {variance}")));
    }
    Ok(Moments {
        mean,
        variance: variance.max(0.0),
    })
}
