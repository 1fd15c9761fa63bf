use std::f64::consts::PI;

use num_complex::Complex64;
use packet_entropy::grid::{
    density, fourier_transform, inverse_fourier_transform, moments, Grid, Representation,
    WaveFunction,
};
use proptest::prelude::*;

fn gaussian(grid: &Grid, x0: f64, p0: f64, gamma: f64) -> WaveFunction {
    let c = (gamma * gamma * PI).powf(-0.25);
    WaveFunction::from_fn(grid, |x| {
        Complex64::from_polar(
            c * (-(x - x0).powi(2) / (2.0 * gamma * gamma)).exp(),
            p0 * x,
        )
    })
    .unwrap()
}

/// `(2π)^{−1/2} ∫ ψ(x) e^{−ipx} dx` by composite Simpson on a fine mesh.
fn direct_transform(
    psi: impl Fn(f64) -> Complex64,
    p: f64,
    a: f64,
    b: f64,
    panels: usize,
) -> Complex64 {
    let h = (b - a) / panels as f64;
    let f = |x: f64| psi(x) * Complex64::from_polar(1.0, -p * x);
    let mut acc = f(a) + f(b);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += f(a + i as f64 * h) * w;
    }
    acc * h / 3.0 / (2.0 * PI).sqrt()
}

#[test]
fn squeezed_momentum_profile_matches_dense_quadrature() {
    let gamma = 2.0;
    // wide enough that the truncated tail of ∫ψ is far below the tolerance
    let grid = Grid::new(2048, -24.0, 24.0).unwrap();
    let psi = gaussian(&grid, 0.0, 0.0, gamma);
    let phi = fourier_transform(&psi).unwrap();
    let continuum = |x: f64| {
        Complex64::new(
            (gamma * gamma * PI).powf(-0.25) * (-x * x / (2.0 * gamma * gamma)).exp(),
            0.0,
        )
    };
    for k in [1024usize, 1027, 1032, 1050, 1000, 990] {
        let p = grid.momentum(k);
        let reference = direct_transform(continuum, p, -30.0, 30.0, 40_000);
        assert!((phi.amplitudes()[k] - reference).norm() < 1e-10, "p = {p}");
    }
    let m = moments(&density(&phi).unwrap()).unwrap();
    assert!((m.variance - 1.0 / (2.0 * gamma * gamma)).abs() < 1e-10);
    assert!((m.variance - 0.125).abs() < 1e-10);
}

#[test]
fn modulated_displaced_gaussian_round_trip() {
    let grid = Grid::new(1024, -12.0, 12.0).unwrap();
    let (x0, p0) = (1.75, -2.5);
    let psi = gaussian(&grid, x0, p0, 1.0);
    let phi = fourier_transform(&psi).unwrap();

    // shift/modulation: |𝓕ψ|(p) is the standard profile centred at p0
    for k in (0..grid.len()).step_by(7) {
        let p = grid.momentum(k);
        let expect = PI.powf(-0.25) * (-(p - p0).powi(2) / 2.0).exp();
        assert!((phi.amplitudes()[k].norm() - expect).abs() < 1e-10);
    }
    let reference = direct_transform(
        |x| Complex64::from_polar(PI.powf(-0.25) * (-(x - x0).powi(2) / 2.0).exp(), p0 * x),
        grid.momentum(400),
        -30.0,
        30.0,
        40_000,
    );
    assert!((phi.amplitudes()[400] - reference).norm() < 1e-10);

    let back = inverse_fourier_transform(&phi).unwrap();
    let m = moments(&density(&back).unwrap()).unwrap();
    assert!((m.mean - x0).abs() < 1e-10);
    assert!(back.distance(&psi).unwrap() < 1e-12);
}

#[test]
fn double_transform_is_parity() {
    // dx = dp makes the momentum lattice coincide with the position lattice
    let n = 128;
    let dx = (2.0 * PI / n as f64).sqrt();
    let half = dx * n as f64 / 2.0;
    let grid = Grid::new(n, -half, half).unwrap();
    assert!((grid.dp() - grid.dx()).abs() < 1e-14);

    let psi = gaussian(&grid, 1.2, 0.8, 0.9);
    let once = fourier_transform(&psi).unwrap();
    let relabelled =
        WaveFunction::new(&grid, Representation::Position, once.into_amplitudes()).unwrap();
    let twice = fourier_transform(&relabelled).unwrap();
    let a = psi.amplitudes();
    let b = twice.amplitudes();
    for j in 1..n {
        assert!((b[n - j] - a[j]).norm() < 1e-10, "j = {j}");
    }
}

#[test]
fn moments_converge_under_refinement() {
    let coarse = Grid::new(512, -12.0, 12.0).unwrap();
    let fine = Grid::new(1024, -12.0, 12.0).unwrap();
    for (x0, gamma) in [(0.0, 1.0), (0.7, 1.4), (-1.0, 0.6)] {
        let a = moments(&density(&gaussian(&coarse, x0, 0.3, gamma)).unwrap()).unwrap();
        let b = moments(&density(&gaussian(&fine, x0, 0.3, gamma)).unwrap()).unwrap();
        assert!((a.mean - b.mean).abs() < 1e-10);
        assert!((a.variance - b.variance).abs() < 1e-10);
        // common lattice points carry the same density
        let da = density(&gaussian(&coarse, x0, 0.3, gamma)).unwrap();
        let db = density(&gaussian(&fine, x0, 0.3, gamma)).unwrap();
        for j in 0..coarse.len() {
            assert!((da.values()[j] - db.values()[2 * j]).abs() < 1e-10);
        }
    }
}

fn arbitrary_state(n_log2: u32) -> impl Strategy<Value = WaveFunction> {
    let n = 1usize << n_log2;
    (
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n),
        -20.0f64..0.0,
        1.0f64..30.0,
    )
        .prop_filter_map("nonzero", move |(raw, x_min, width)| {
            let grid = Grid::new(n, x_min, x_min + width).ok()?;
            let amps = raw
                .into_iter()
                .map(|(re, im)| Complex64::new(re, im))
                .collect();
            WaveFunction::new(&grid, Representation::Position, amps).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transform_is_unitary_and_invertible(psi in (3u32..11).prop_flat_map(arbitrary_state)) {
        let phi = fourier_transform(&psi).unwrap();
        prop_assert!((phi.norm() - 1.0).abs() < 1e-12);
        let back = inverse_fourier_transform(&phi).unwrap();
        for (a, b) in psi.amplitudes().iter().zip(back.amplitudes()) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn densities_have_unit_mass(psi in (3u32..10).prop_flat_map(arbitrary_state)) {
        let rho = density(&psi).unwrap();
        prop_assert!((rho.mass() - 1.0).abs() < 1e-9);
        let rho_p = density(&fourier_transform(&psi).unwrap()).unwrap();
        prop_assert!((rho_p.mass() - 1.0).abs() < 1e-9);
        prop_assert!(moments(&rho).unwrap().variance >= 0.0);
    }
}
