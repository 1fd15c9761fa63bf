//! Second-order split-operator propagation for `H = P²/2m + V(X)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{density, fourier_transform, Grid, Representation, WaveFunction};
use crate::states::EDGE_TOLERANCE;

/// Norm drift tolerated on trajectory samples.
pub const TRAJECTORY_NORM_TOLERANCE: f64 = 1e-9;

/// Momentum weight beyond the phase-wrap threshold that triggers a warning.
const WRAP_WEIGHT_TOLERANCE: f64 = 1e-12;

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Potential {
    Free {
        #[serde(default = "unit")]
        mass: f64,
    },
    /// `V(x) = m ω² x² / 2`
    Harmonic {
        #[serde(default = "unit")]
        mass: f64,
        #[serde(default = "unit")]
        omega: f64,
    },
    /// Piecewise-constant: `V(x) = values[i]` for `x ∈ [x[i], x[i+1])`,
    /// clamped to the first/last value outside the table.
    Tabulated {
        #[serde(default = "unit")]
        mass: f64,
        x: Vec<f64>,
        values: Vec<f64>,
    },
}

impl Potential {
    pub fn free() -> Self {
        Potential::Free { mass: 1.0 }
    }

    /// Oscillator with `m = ω = 1`.
    pub fn harmonic() -> Self {
        Potential::Harmonic {
            mass: 1.0,
            omega: 1.0,
        }
    }

    pub fn mass(&self) -> f64 {
        match *self {
            Potential::Free { mass }
            | Potential::Harmonic { mass, .. }
            | Potential::Tabulated { mass, .. } => mass,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mass = self.mass();
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::Config(format!("mass must be positive, got {mass}")));
        }
        match self {
            Potential::Free { .. } => Ok(()),
            Potential::Harmonic { omega, .. } => {
                if *omega > 0.0 && omega.is_finite() {
                    Ok(())
                } else {
                    Err(Error::Config(format!("ω must be positive, got {omega}")))
                }
            }
            Potential::Tabulated { x, values, .. } => {
                if x.is_empty() || x.len() != values.len() {
                    return Err(Error::Config(format!(
                        "tabulated potential needs matching non-empty x/values, got {} and {}",
                        x.len(),
                        values.len()
                    )));
                }
                if x.iter().chain(values).any(|v| !v.is_finite()) {
                    return Err(Error::Config(
                        "tabulated potential has non-finite entries".into(),
                    ));
                }
                if x.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::Config(
                        "tabulated potential nodes must be strictly increasing".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        match self {
            Potential::Free { .. } => 0.0,
            Potential::Harmonic { mass, omega } => 0.5 * mass * omega * omega * x * x,
            Potential::Tabulated {
                x: nodes, values, ..
            } => {
                let i = nodes.partition_point(|&node| node <= x);
                values[i.saturating_sub(1)]
            }
        }
    }

    /// True for the oscillator in the units the closed-form oracles use.
    pub fn is_unit_harmonic(&self) -> bool {
        matches!(*self, Potential::Harmonic { mass, omega } if mass == 1.0 && omega == 1.0)
    }

    /// Classical period `2π/ω` of a harmonic potential.
    pub fn period(&self) -> Option<f64> {
        match *self {
            Potential::Harmonic { omega, .. } => Some(2.0 * PI / omega),
            _ => None,
        }
    }
}

/// Precomputed Strang factors `e^{−iV dt/2} 𝓕⁻¹ e^{−ip² dt/2m} 𝓕 e^{−iV dt/2}`
/// for one (grid, potential, dt) triple.
#[derive(Debug, Clone)]
pub struct SplitOperator {
    grid: Grid,
    dt: f64,
    half_potential: Vec<Complex64>,
    // in raw DFT ordering, with the 1/n of the inverse DFT folded in
    kinetic: Vec<Complex64>,
}

impl SplitOperator {
    /// `dt` may be negative for backward propagation.
    pub fn new(grid: &Grid, potential: &Potential, dt: f64) -> Result<Self> {
        potential.validate()?;
        if !(dt.is_finite() && dt != 0.0) {
            return Err(Error::Config(format!(
                "time step must be finite and nonzero, got {dt}"
            )));
        }
        let half_potential = grid
            .positions()
            .map(|x| Complex64::from_polar(1.0, -0.5 * potential.evaluate(x) * dt))
            .collect();
        let inv_n = 1.0 / grid.len() as f64;
        let mass = potential.mass();
        let kinetic = (0..grid.len())
            .map(|k| {
                let p = grid.dft_momentum(k);
                Complex64::from_polar(inv_n, -p * p * dt / (2.0 * mass))
            })
            .collect();
        Ok(SplitOperator {
            grid: grid.clone(),
            dt,
            half_potential,
            kinetic,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Advances position-space amplitudes by one step in place.
    pub fn apply(&self, amps: &mut [Complex64]) -> Result<()> {
        for (a, v) in amps.iter_mut().zip(&self.half_potential) {
            *a *= v;
        }
        self.grid.dft_forward(amps);
        for (a, k) in amps.iter_mut().zip(&self.kinetic) {
            *a *= k;
        }
        self.grid.dft_inverse(amps);
        for (a, v) in amps.iter_mut().zip(&self.half_potential) {
            *a *= v;
        }
        if amps.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(Error::numerical("non-finite amplitude after split step"));
        }
        Ok(())
    }

    pub fn advance(&self, wf: &WaveFunction) -> Result<WaveFunction> {
        wf.expect_repr(Representation::Position)?;
        if wf.grid() != &self.grid {
            return Err(Error::Contract(
                "wavefunction grid differs from propagator grid".into(),
            ));
        }
        let mut amps = wf.amplitudes().to_vec();
        self.apply(&mut amps)?;
        Ok(WaveFunction::from_parts_unchecked(
            self.grid.clone(),
            Representation::Position,
            amps,
        ))
    }
}

/// Probability in momentum cells whose kinetic phase per step reaches π.
pub fn kinetic_wrap_weight(wf: &WaveFunction, mass: f64, dt: f64) -> Result<f64> {
    let grid = wf.grid();
    let p_max = grid.p_max();
    if dt.abs() * p_max * p_max / (2.0 * mass) < PI {
        return Ok(0.0);
    }
    let phi = match wf.representation() {
        Representation::Position => fourier_transform(wf)?,
        Representation::Momentum => wf.clone(),
    };
    let rho = density(&phi)?;
    let weight = rho
        .values()
        .iter()
        .enumerate()
        .filter(|&(k, _)| {
            let p = grid.momentum(k);
            dt.abs() * p * p / (2.0 * mass) >= PI
        })
        .map(|(_, r)| r)
        .sum::<f64>()
        * rho.spacing();
    Ok(weight)
}

fn warn_on_phase_wrap(wf: &WaveFunction, mass: f64, dt: f64) -> Result<()> {
    let weight = kinetic_wrap_weight(wf, mass, dt)?;
    if weight > WRAP_WEIGHT_TOLERANCE {
        log::warn!(
            "kinetic phase per step exceeds π on momenta carrying probability {weight:e}; reduce dt or dx"
        );
    }
    Ok(())
}

/// One Strang step.
pub fn step(wf: &WaveFunction, potential: &Potential, dt: f64) -> Result<WaveFunction> {
    let op = SplitOperator::new(wf.grid(), potential, dt)?;
    warn_on_phase_wrap(wf, potential.mass(), dt)?;
    op.advance(wf)
}

/// Sampled solution of the time-dependent Schrödinger equation.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<WaveFunction>,
    pub dt: f64,
    pub scheme: &'static str,
    /// Largest |ψ| observed at the lattice edges over all samples.
    pub max_edge_amplitude: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &WaveFunction {
        self.states
            .last()
            .expect("trajectory has at least the initial sample")
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, &WaveFunction)> {
        self.times.iter().copied().zip(&self.states)
    }
}

/// Steps `round(t_end/dt)` times, recording every `sample_every`-th state
/// (plus the initial and final ones).
pub fn evolve(
    wf0: &WaveFunction,
    potential: &Potential,
    dt: f64,
    t_end: f64,
    sample_every: usize,
) -> Result<Trajectory> {
    wf0.expect_repr(Representation::Position)?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Config(format!(
            "time step must be positive, got {dt}"
        )));
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::Config(format!(
            "end time must be nonnegative, got {t_end}"
        )));
    }
    if sample_every == 0 {
        return Err(Error::Config("sample_every must be at least 1".into()));
    }
    let op = SplitOperator::new(wf0.grid(), potential, dt)?;
    warn_on_phase_wrap(wf0, potential.mass(), dt)?;

    let n_steps = (t_end / dt).round() as usize;
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![wf0.clone()],
        dt,
        scheme: "strang-vtv",
        max_edge_amplitude: wf0.edge_amplitude(),
    };
    let mut leak_reported = false;
    let mut amps = wf0.amplitudes().to_vec();
    for k in 1..=n_steps {
        let t = k as f64 * dt;
        op.apply(&mut amps).map_err(|e| e.at_time(t))?;
        if k % sample_every != 0 && k != n_steps {
            continue;
        }
        let wf = WaveFunction::from_parts_unchecked(
            wf0.grid().clone(),
            Representation::Position,
            amps.clone(),
        );
        let norm = wf.norm();
        if (norm - 1.0).abs() > TRAJECTORY_NORM_TOLERANCE {
            return Err(Error::Numerical {
                t: Some(t),
                msg: format!("norm drifted to {norm}"),
            });
        }
        let edge = wf.edge_amplitude();
        if edge > EDGE_TOLERANCE && !leak_reported {
            log::warn!("|ψ| = {edge:e} at the grid edge at t = {t}; periodic wrap-around may contaminate results");
            leak_reported = true;
        }
        traj.max_edge_amplitude = traj.max_edge_amplitude.max(edge);
        traj.times.push(t);
        traj.states.push(wf);
    }
    Ok(traj)
}

/// `⟨P²⟩/2m + ⟨V⟩`
pub fn energy(wf: &WaveFunction, potential: &Potential) -> Result<f64> {
    potential.validate()?;
    wf.expect_repr(Representation::Position)?;
    let grid = wf.grid();
    let phi = fourier_transform(wf)?;
    let kinetic: f64 = phi
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(k, a)| grid.momentum(k).powi(2) * a.norm_sqr())
        .sum::<f64>()
        * grid.dp()
        / (2.0 * potential.mass());
    let pot: f64 = wf
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(j, a)| potential.evaluate(grid.position(j)) * a.norm_sqr())
        .sum::<f64>()
        * grid.dx();
    Ok(kinetic + pot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::moments;
    use crate::states::{free_gaussian_sigma2, make_state, StateSpec};

    fn default_grid() -> Grid {
        Grid::new(1024, -12.0, 12.0).unwrap()
    }

    fn coherent(q0: f64, p0: f64) -> WaveFunction {
        make_state(&StateSpec::Coherent { q0, p0 }, &default_grid()).unwrap()
    }

    #[test]
    fn free_step_spreads_like_oracle() {
        let wf = coherent(0.0, 0.0);
        let dt = 1e-3;
        let next = step(&wf, &Potential::free(), dt).unwrap();
        let var = moments(&density(&next).unwrap()).unwrap().variance;
        assert!((var - free_gaussian_sigma2(1.0, 1.0, dt).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn harmonic_step_moves_center() {
        let dt = 1e-3;
        let next = step(&coherent(1.0, 0.0), &Potential::harmonic(), dt).unwrap();
        let mean = moments(&density(&next).unwrap()).unwrap().mean;
        assert!((mean - dt.cos()).abs() < 1e-8);
    }

    #[test]
    fn step_preserves_norm() {
        let wf = make_state(
            &StateSpec::Cat {
                q0: 1.0,
                p0: 2.0,
                relative_phase: 0.4,
            },
            &default_grid(),
        )
        .unwrap();
        for pot in [Potential::free(), Potential::harmonic()] {
            let next = step(&wf, &pot, 0.01).unwrap();
            assert!((next.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn step_rejects_bad_input() {
        let wf = coherent(0.0, 0.0);
        assert!(matches!(
            step(&wf, &Potential::free(), 0.0),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            step(&wf, &Potential::free(), f64::NAN),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            step(
                &wf,
                &Potential::Harmonic {
                    mass: 1.0,
                    omega: -1.0
                },
                0.1
            ),
            Err(Error::Config(_))
        ));
        let phi = fourier_transform(&wf).unwrap();
        assert!(matches!(
            step(&phi, &Potential::free(), 0.1),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn non_finite_potential_aborts() {
        let g = Grid::new(64, -8.0, 8.0).unwrap();
        let wf = make_state(&StateSpec::Coherent { q0: 0.0, p0: 0.0 }, &g).unwrap();
        let op = SplitOperator::new(
            &g,
            &Potential::Harmonic {
                mass: 1.0,
                omega: 1e200,
            },
            1.0,
        )
        .unwrap();
        let mut amps = wf.into_amplitudes();
        assert!(matches!(op.apply(&mut amps), Err(Error::Numerical { .. })));
    }

    #[test]
    fn coherent_returns_after_full_period() {
        let wf = coherent(1.0, 0.0);
        let traj = evolve(&wf, &Potential::harmonic(), 1e-3, 2.0 * PI, 100).unwrap();
        let t_last = *traj.times.last().unwrap();
        assert!((t_last - 2.0 * PI).abs() <= 1e-3);
        let d0 = density(&wf).unwrap();
        let d1 = density(traj.final_state()).unwrap();
        let t_err = (t_last - 2.0 * PI).abs();
        for (a, b) in d0.values().iter().zip(d1.values()) {
            // residual offset t_last − 2π is below 1e−3 and moves the peak
            assert!((a - b).abs() < 1e-6 + t_err, "{a} vs {b}");
        }
    }

    #[test]
    fn evolve_sampling_layout() {
        let wf = coherent(0.0, 0.0);
        let traj = evolve(&wf, &Potential::free(), 0.1, 1.05, 3).unwrap();
        // 11 steps (1.05/0.1 rounds to 11), samples at 0, 3, 6, 9 and the final step
        assert_eq!(traj.len(), 5);
        assert!(traj.times.windows(2).all(|w| w[1] > w[0]));
        assert!((traj.times[4] - 1.1).abs() < 1e-12);
        assert!(matches!(
            evolve(&wf, &Potential::free(), 0.1, 1.0, 0),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            evolve(&wf, &Potential::free(), -0.1, 1.0, 1),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn free_variance_after_unit_time() {
        let traj = evolve(&coherent(0.0, 0.0), &Potential::free(), 1e-3, 1.0, 1000).unwrap();
        let var = moments(&density(traj.final_state()).unwrap())
            .unwrap()
            .variance;
        assert!((var - 1.0).abs() < 1e-6);
    }

    #[test]
    fn energy_examples() {
        let e = energy(&coherent(0.0, 0.0), &Potential::free()).unwrap();
        assert!((e - 0.25).abs() < 1e-12);
        let e = energy(&coherent(1.0, 0.0), &Potential::harmonic()).unwrap();
        assert!((e - 1.0).abs() < 1e-12);
        // (q0² + p0²)/2 + 1/2
        let e = energy(&coherent(1.5, -2.0), &Potential::harmonic()).unwrap();
        assert!((e - (0.5 * (2.25 + 4.0) + 0.5)).abs() < 1e-10);
    }

    #[test]
    fn tabulated_potential_is_piecewise_constant() {
        let pot = Potential::Tabulated {
            mass: 1.0,
            x: vec![-1.0, 0.0, 1.0],
            values: vec![2.0, 3.0, 4.0],
        };
        pot.validate().unwrap();
        assert_eq!(pot.evaluate(-5.0), 2.0);
        assert_eq!(pot.evaluate(-1.0), 2.0);
        assert_eq!(pot.evaluate(-0.5), 2.0);
        assert_eq!(pot.evaluate(0.0), 3.0);
        assert_eq!(pot.evaluate(0.99), 3.0);
        assert_eq!(pot.evaluate(7.0), 4.0);

        let bad = Potential::Tabulated {
            mass: 1.0,
            x: vec![0.0, 0.0],
            values: vec![1.0, 1.0],
        };
        assert!(bad.validate().is_err());
        let bad = Potential::Tabulated {
            mass: 1.0,
            x: vec![0.0],
            values: vec![f64::INFINITY],
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn constant_tabulated_potential_only_shifts_phase() {
        let wf = coherent(0.5, 1.0);
        let pot = Potential::Tabulated {
            mass: 1.0,
            x: vec![0.0],
            values: vec![0.7],
        };
        let a = evolve(&wf, &pot, 1e-2, 1.0, 100).unwrap();
        let b = evolve(&wf, &Potential::free(), 1e-2, 1.0, 100).unwrap();
        let da = density(a.final_state()).unwrap();
        let db = density(b.final_state()).unwrap();
        for (x, y) in da.values().iter().zip(db.values()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn wrap_weight_vanishes_for_resolved_states() {
        let wf = coherent(0.0, 0.0);
        // dt·p_max²/2 ≈ 9 > π on the default grid, but no probability lives there
        let w = kinetic_wrap_weight(&wf, 1.0, 1e-3).unwrap();
        assert!(w < 1e-12);
        assert_eq!(kinetic_wrap_weight(&wf, 1.0, 1e-5).unwrap(), 0.0);
    }

    #[test]
    fn potential_parses_from_toml() {
        let p: Potential = toml::from_str("kind = \"harmonic\"").unwrap();
        assert!(p.is_unit_harmonic());
        let p: Potential = toml::from_str("kind = \"free\"\nmass = 2.0").unwrap();
        assert_eq!(p.mass(), 2.0);
        assert!(toml::from_str::<Potential>("kind = \"harmonic\"\nfrequency = 2.0").is_err());
    }
}
